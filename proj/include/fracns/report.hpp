#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace fracns {

inline constexpr const char* kReportSchema = "fracns-report-v1";

// 64-bit FNV-1a of a byte string, hex-encoded; used as the content hash of
// canonical (sorted-key, compact) config dumps so reports are traceable
std::string content_hash_hex(const std::string& bytes);

// canonical dump (nlohmann emits sorted object keys by default) -> hash
std::string config_hash(const nlohmann::json& config);

// Writes `body` with the schema version, the config hash, and provenance
// fields merged in; refuses to overwrite a report with a different schema.
void write_json_report(const std::string& path, const nlohmann::json& config,
                       nlohmann::json body);

// one header row + numeric rows, RFC-4180 style, '.' decimal point
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

struct CurveSeries {
    std::string name;
    std::vector<double> y;
};

// Minimal self-contained SVG line plot (one polyline per series, linear axes,
// legend top-right); no external dependencies.
void write_svg_curves(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<CurveSeries>& series);

// All schema_version fields of *.json reports directly inside `dir` agree;
// returns the common version ("" if no reports).  errors: mixed versions.
std::string check_report_directory(const std::string& dir);

}  // namespace fracns

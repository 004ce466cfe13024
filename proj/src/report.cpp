#include "fracns/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracns {

std::string content_hash_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string config_hash(const nlohmann::json& config) {
    return content_hash_hex(config.dump());  // dump() is canonical: sorted keys, compact
}

void write_json_report(const std::string& path, const nlohmann::json& config,
                       nlohmann::json body) {
    body["schema_version"] = kReportSchema;
    body["config_hash"] = config_hash(config);
    body["config"] = config;
    if (std::filesystem::exists(path)) {
        std::ifstream in(path);
        nlohmann::json old;
        try {
            in >> old;
        } catch (...) {
            old = nlohmann::json::object();
        }
        if (old.contains("schema_version") && old["schema_version"] != kReportSchema)
            throw std::runtime_error("report schema mismatch at " + path);
    }
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write report " + path);
    out << body.dump(2) << "\n";
}

void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv " + path);
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 < columns.size() ? "," : "\n");
    out.precision(12);
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::invalid_argument("csv row width mismatch");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

void write_svg_curves(const std::string& path, const std::string& title,
                      const std::vector<double>& x, const std::vector<CurveSeries>& series) {
    if (x.empty() || series.empty())
        throw std::invalid_argument("svg plot needs data");
    double xmin = x.front(), xmax = x.front(), ymin = 0.0, ymax = 0.0;
    bool first = true;
    for (double v : x) {
        xmin = std::min(xmin, v);
        xmax = std::max(xmax, v);
    }
    for (const CurveSeries& s : series) {
        if (s.y.size() != x.size())
            throw std::invalid_argument("svg series length mismatch");
        for (double v : s.y) {
            if (first) {
                ymin = ymax = v;
                first = false;
            }
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double W = 640, H = 420, ml = 60, mr = 120, mt = 40, mb = 50;
    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (W - ml - mr); };
    auto py = [&](double v) { return H - mb - (v - ymin) / (ymax - ymin) * (H - mt - mb); };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};

    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write svg " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
        << "' viewBox='0 0 " << W << " " << H << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << W / 2 << "' y='24' text-anchor='middle' font-size='16'>" << title
        << "</text>\n";
    // axes + ticks
    out << "<line x1='" << ml << "' y1='" << H - mb << "' x2='" << W - mr << "' y2='"
        << H - mb << "' stroke='black'/>\n"
        << "<line x1='" << ml << "' y1='" << mt << "' x2='" << ml << "' y2='" << H - mb
        << "' stroke='black'/>\n";
    out.precision(6);
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + (xmax - xmin) * k / 4.0;
        double yv = ymin + (ymax - ymin) * k / 4.0;
        out << "<text x='" << px(xv) << "' y='" << H - mb + 18
            << "' text-anchor='middle' font-size='11'>" << xv << "</text>\n"
            << "<text x='" << ml - 6 << "' y='" << py(yv) + 4
            << "' text-anchor='end' font-size='11'>" << yv << "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const char* color = palette[si % 6];
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='";
        for (std::size_t i = 0; i < x.size(); ++i)
            out << px(x[i]) << "," << py(series[si].y[i]) << " ";
        out << "'/>\n";
        double ly = mt + 16.0 * double(si);
        out << "<line x1='" << W - mr + 10 << "' y1='" << ly << "' x2='" << W - mr + 34
            << "' y2='" << ly << "' stroke='" << color << "' stroke-width='2'/>\n"
            << "<text x='" << W - mr + 40 << "' y='" << ly + 4 << "' font-size='12'>"
            << series[si].name << "</text>\n";
    }
    out << "</svg>\n";
}

std::string check_report_directory(const std::string& dir) {
    std::string version;
    if (!std::filesystem::is_directory(dir)) return version;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        nlohmann::json j;
        try {
            in >> j;
        } catch (...) {
            continue;  // not a report
        }
        if (!j.contains("schema_version")) continue;
        std::string v = j["schema_version"].get<std::string>();
        if (version.empty())
            version = v;
        else if (version != v)
            throw std::runtime_error("mixed report schema versions in " + dir + ": " +
                                     version + " vs " + v);
    }
    return version;
}

}  // namespace fracns

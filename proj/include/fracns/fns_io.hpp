#pragma once

#include <string>
#include <vector>

#include "fracns/field.hpp"

namespace fracns {

// FNS1 field file:
//   bytes  0..15  magic "FNS1FIELD" + zero padding + version byte 1
//   bytes 16..19  n_per_dim (u32 little endian)
//   bytes 20..23  component count (u32)
//   bytes 24..31  box_length (f64)
//   bytes 32..39  s (f64)
//   then components * n^3 little-endian f64 samples, row major, x fastest.
// Component count 1 = scalar, 3 = vector.  Extended fields (stacked y-levels)
// append a u32 level count and the f64 y-level table directly after the
// header; see extension.hpp.

struct FieldFile {
    int ncomp = 0;
    double s = 0.0;
    ScalarField scalar;  // valid when ncomp == 1
    VectorField vector;  // valid when ncomp == 3
};

void write_field(const std::string& path, const ScalarField& f, double s);
void write_field(const std::string& path, const VectorField& f, double s);
FieldFile read_field(const std::string& path);

// raw helpers shared with the extended-field format
void write_fns1_header(std::ostream& out, std::uint32_t n, std::uint32_t ncomp, double L,
                       double s);
void read_fns1_header(std::istream& in, std::uint32_t& n, std::uint32_t& ncomp, double& L,
                      double& s);
void write_f64(std::ostream& out, const double* data, std::size_t count);
void read_f64(std::istream& in, double* data, std::size_t count);

}  // namespace fracns

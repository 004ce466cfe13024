#include "fracns/fns_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace fracns {

static_assert(std::endian::native == std::endian::little,
              "FNS1 writer assumes a little-endian host");

namespace {
const char kMagic[16] = {'F', 'N', 'S', '1', 'F', 'I', 'E', 'L', 'D', 0, 0, 0, 0, 0, 0, 1};

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), 4);
}
std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), 4);
    return v;
}
void write_d(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), 8); }
double read_d(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), 8);
    return v;
}
}  // namespace

void write_fns1_header(std::ostream& out, std::uint32_t n, std::uint32_t ncomp, double L,
                       double s) {
    out.write(kMagic, 16);
    write_u32(out, n);
    write_u32(out, ncomp);
    write_d(out, L);
    write_d(out, s);
}

void read_fns1_header(std::istream& in, std::uint32_t& n, std::uint32_t& ncomp, double& L,
                      double& s) {
    char magic[16];
    in.read(magic, 16);
    if (!in || std::memcmp(magic, kMagic, 16) != 0)
        throw std::runtime_error("FNS1: bad magic or version");
    n = read_u32(in);
    ncomp = read_u32(in);
    L = read_d(in);
    s = read_d(in);
    if (!in) throw std::runtime_error("FNS1: truncated header");
    if (n < 8 || n % 2 || n > 4096) throw std::runtime_error("FNS1: implausible n_per_dim");
    if (!(L > 0.0)) throw std::runtime_error("FNS1: non-positive box length");
}

void write_f64(std::ostream& out, const double* data, std::size_t count) {
    out.write(reinterpret_cast<const char*>(data), std::streamsize(count * 8));
}

void read_f64(std::istream& in, double* data, std::size_t count) {
    in.read(reinterpret_cast<char*>(data), std::streamsize(count * 8));
    if (!in) throw std::runtime_error("FNS1: truncated payload");
}

void write_field(const std::string& path, const ScalarField& f, double s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("FNS1: cannot open for write: " + path);
    write_fns1_header(out, std::uint32_t(f.grid.n), 1, f.grid.L, s);
    write_f64(out, f.v.data(), f.v.size());
    if (!out) throw std::runtime_error("FNS1: write failed: " + path);
}

void write_field(const std::string& path, const VectorField& f, double s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("FNS1: cannot open for write: " + path);
    write_fns1_header(out, std::uint32_t(f.grid.n), 3, f.grid.L, s);
    for (int c = 0; c < 3; ++c) write_f64(out, f.comp[c].data(), f.comp[c].size());
    if (!out) throw std::runtime_error("FNS1: write failed: " + path);
}

FieldFile read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("FNS1: cannot open: " + path);
    std::uint32_t n, ncomp;
    double L, s;
    read_fns1_header(in, n, ncomp, L, s);
    if (ncomp != 1 && ncomp != 3)
        throw std::runtime_error("FNS1: unsupported component count");
    FieldFile ff;
    ff.ncomp = int(ncomp);
    ff.s = s;
    TorusGrid g(int(n), L);
    if (ncomp == 1) {
        ff.scalar = ScalarField(g);
        read_f64(in, ff.scalar.v.data(), ff.scalar.v.size());
    } else {
        ff.vector = VectorField(g);
        for (int c = 0; c < 3; ++c) read_f64(in, ff.vector.comp[c].data(), ff.vector.comp[c].size());
    }
    return ff;
}

}  // namespace fracns

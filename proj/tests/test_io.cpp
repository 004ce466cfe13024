#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "fracns/fns_io.hpp"
#include "fracns/spectral.hpp"

using namespace fracns;

TEST_CASE("FNS1 scalar round trip is bit exact") {
    TorusGrid g(16, 2.0 * M_PI);
    ScalarField f = random_band_scalar(g, 1, 5, 77);
    std::string path = "/tmp/fracns_test_scalar.fns1";
    write_field(path, f, 0.8);
    FieldFile ff = read_field(path);
    CHECK(ff.ncomp == 1);
    CHECK(ff.s == 0.8);
    CHECK(ff.scalar.grid.n == 16);
    CHECK(ff.scalar.grid.L == 2.0 * M_PI);
    REQUIRE(ff.scalar.v.size() == f.v.size());
    for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(ff.scalar.v[i] == f.v[i]);
    std::remove(path.c_str());
}

TEST_CASE("FNS1 vector round trip") {
    TorusGrid g(16, 1.0);
    VectorField u(g);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < u.comp[c].size(); ++i) u.comp[c][i] = 0.1 * c + 1e-3 * double(i % 97);
    std::string path = "/tmp/fracns_test_vector.fns1";
    write_field(path, u, 0.9);
    FieldFile ff = read_field(path);
    CHECK(ff.ncomp == 3);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < u.comp[c].size(); ++i)
            CHECK(ff.vector.comp[c][i] == u.comp[c][i]);
    std::remove(path.c_str());
}

TEST_CASE("FNS1 rejects corruption") {
    TorusGrid g(16, 1.0);
    ScalarField f(g);
    std::string path = "/tmp/fracns_test_bad.fns1";
    write_field(path, f, 0.8);

    // corrupt the magic
    {
        std::fstream io(path, std::ios::in | std::ios::out | std::ios::binary);
        io.seekp(0);
        io.put('X');
    }
    CHECK_THROWS_AS(read_field(path), std::runtime_error);

    // truncation
    write_field(path, f, 0.8);
    {
        std::ifstream in(path, std::ios::binary);
        std::vector<char> buf(1000);
        in.read(buf.data(), 1000);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(buf.data(), 1000);
    }
    CHECK_THROWS_AS(read_field(path), std::runtime_error);
    std::remove(path.c_str());
}

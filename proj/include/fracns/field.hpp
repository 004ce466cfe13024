#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "fracns/grid.hpp"

namespace fracns {

struct ScalarField {
    TorusGrid grid;
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(const TorusGrid& g) : grid(g), v(g.size(), 0.0) {}
    ScalarField(const TorusGrid& g, std::function<double(double, double, double)> f);

    double& operator()(int i, int j, int k) { return v[grid.idx(i, j, k)]; }
    double operator()(int i, int j, int k) const { return v[grid.idx(i, j, k)]; }
};

struct VectorField {
    TorusGrid grid;
    std::array<std::vector<double>, 3> comp;

    VectorField() = default;
    explicit VectorField(const TorusGrid& g) : grid(g) {
        for (auto& c : comp) c.assign(g.size(), 0.0);
    }
    ScalarField component(int j) const;
    void set_component(int j, const ScalarField& f);
    double magnitude(std::size_t id) const {
        double a = comp[0][id], b = comp[1][id], c = comp[2][id];
        return std::sqrt(a * a + b * b + c * c);
    }
};

// Fourier coefficients with the convention  c(xi) ~ integral f(x) e^{-i xi.x} dx,
// i.e. c = h^3 * DFT(f).  Stored full-complex, same (i,j,k) layout as physical
// fields with signed modes given by TorusGrid::mode.
struct SpectralField {
    TorusGrid grid;
    std::vector<std::complex<double>> c;

    SpectralField() = default;
    explicit SpectralField(const TorusGrid& g) : grid(g), c(g.size(), {0.0, 0.0}) {}
};

// --- arithmetic -------------------------------------------------------------
ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double a, const ScalarField& f);
ScalarField pointwise_product(const ScalarField& a, const ScalarField& b);
VectorField operator+(const VectorField& a, const VectorField& b);
VectorField operator-(const VectorField& a, const VectorField& b);
VectorField operator*(double a, const VectorField& f);

// --- norms (integrals over the cell, midpoint rule) -------------------------
double lp_norm(const ScalarField& f, double p);
double l2_norm(const ScalarField& f);
double linf_norm(const ScalarField& f);
double mean(const ScalarField& f);
double l2_norm(const VectorField& f);
double linf_norm(const VectorField& f);
// restricted to a periodic ball
double lp_norm(const ScalarField& f, double p, const Ball& region);
double ball_volume_on_grid(const TorusGrid& g, const Ball& region);

double max_abs_diff(const ScalarField& a, const ScalarField& b);
double rel_l2_error(const ScalarField& got, const ScalarField& want);
double rel_l2_error(const VectorField& got, const VectorField& want);

}  // namespace fracns

#include "fracns/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fracns {

ScalarField::ScalarField(const TorusGrid& g, std::function<double(double, double, double)> f)
    : grid(g), v(g.size()) {
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) v[g.idx(i, j, k)] = f(g.x(i), g.x(j), g.x(k));
}

ScalarField VectorField::component(int j) const {
    ScalarField f(grid);
    f.v = comp[j];
    return f;
}

void VectorField::set_component(int j, const ScalarField& f) {
    require_same_grid(grid, f.grid);
    comp[j] = f.v;
}

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] + b.v[i];
    return out;
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] - b.v[i];
    return out;
}

ScalarField operator*(double a, const ScalarField& f) {
    ScalarField out(f.grid);
    for (std::size_t i = 0; i < f.v.size(); ++i) out.v[i] = a * f.v[i];
    return out;
}

ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    ScalarField out(a.grid);
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
    return out;
}

VectorField operator+(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid);
    VectorField out(a.grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.comp[c].size(); ++i)
            out.comp[c][i] = a.comp[c][i] + b.comp[c][i];
    return out;
}

VectorField operator-(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid);
    VectorField out(a.grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < a.comp[c].size(); ++i)
            out.comp[c][i] = a.comp[c][i] - b.comp[c][i];
    return out;
}

VectorField operator*(double a, const VectorField& f) {
    VectorField out(f.grid);
    for (int c = 0; c < 3; ++c)
        for (std::size_t i = 0; i < f.comp[c].size(); ++i) out.comp[c][i] = a * f.comp[c][i];
    return out;
}

double lp_norm(const ScalarField& f, double p) {
    double h3 = std::pow(f.grid.spacing(), 3);
    double acc = 0.0;
    for (double x : f.v) acc += std::pow(std::abs(x), p);
    return std::pow(acc * h3, 1.0 / p);
}

double l2_norm(const ScalarField& f) {
    double h3 = std::pow(f.grid.spacing(), 3);
    double acc = 0.0;
    for (double x : f.v) acc += x * x;
    return std::sqrt(acc * h3);
}

double linf_norm(const ScalarField& f) {
    double m = 0.0;
    for (double x : f.v) m = std::max(m, std::abs(x));
    return m;
}

double mean(const ScalarField& f) {
    double acc = 0.0;
    for (double x : f.v) acc += x;
    return acc / double(f.v.size());
}

double l2_norm(const VectorField& f) {
    double h3 = std::pow(f.grid.spacing(), 3);
    double acc = 0.0;
    for (int c = 0; c < 3; ++c)
        for (double x : f.comp[c]) acc += x * x;
    return std::sqrt(acc * h3);
}

double linf_norm(const VectorField& f) {
    double m = 0.0;
    for (std::size_t i = 0; i < f.comp[0].size(); ++i) m = std::max(m, f.magnitude(i));
    return m;
}

double lp_norm(const ScalarField& f, double p, const Ball& region) {
    const TorusGrid& g = f.grid;
    if (region.radius <= 0.0 || region.radius >= 0.5 * g.L * std::sqrt(3.0))
        return lp_norm(f, p);
    double h3 = std::pow(g.spacing(), 3);
    double r2 = region.radius * region.radius;
    double acc = 0.0;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                if (g.dist2(x, region.center) <= r2)
                    acc += std::pow(std::abs(f.v[g.idx(i, j, k)]), p);
            }
    return std::pow(acc * h3, 1.0 / p);
}

double ball_volume_on_grid(const TorusGrid& g, const Ball& region) {
    double h3 = std::pow(g.spacing(), 3);
    double r2 = region.radius * region.radius;
    std::size_t count = 0;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                if (g.dist2(x, region.center) <= r2) ++count;
            }
    return double(count) * h3;
}

double max_abs_diff(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid);
    double m = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double rel_l2_error(const ScalarField& got, const ScalarField& want) {
    double d = l2_norm(got - want), n = l2_norm(want);
    return n > 0 ? d / n : d;
}

double rel_l2_error(const VectorField& got, const VectorField& want) {
    double d = l2_norm(got - want), n = l2_norm(want);
    return n > 0 ? d / n : d;
}

}  // namespace fracns

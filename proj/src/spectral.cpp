#include "fracns/spectral.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "fracns/util.hpp"

namespace fracns {

void apply_multiplier_inplace(SpectralField& spec,
                              const std::function<std::complex<double>(double, double, double)>& m,
                              bool zero_mode_to_zero, bool kill_nyquist) {
    const TorusGrid& g = spec.grid;
    const int n = g.n;
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                std::size_t id = g.idx(i, j, k);
                if (zero_mode_to_zero && i == 0 && j == 0 && k == 0) {
                    spec.c[id] = 0.0;
                    continue;
                }
                if (kill_nyquist &&
                    (g.mode(i) == -n / 2 || g.mode(j) == -n / 2 || g.mode(k) == -n / 2)) {
                    spec.c[id] = 0.0;
                    continue;
                }
                spec.c[id] *= m(g.xi(i), g.xi(j), g.xi(k));
            }
}

ScalarField apply_multiplier(const ScalarField& f,
                             const std::function<std::complex<double>(double, double, double)>& m,
                             bool zero_mode_to_zero, bool kill_nyquist) {
    SpectralField spec = fourier_forward(f);
    apply_multiplier_inplace(spec, m, zero_mode_to_zero, kill_nyquist);
    return fourier_inverse(spec);
}

ScalarField fractional_laplacian(const ScalarField& field, double gamma) {
    if (gamma < -1.0)
        throw std::invalid_argument("fractional_laplacian: order below -1 not supported");
    return apply_multiplier(
        field,
        [gamma](double x, double y, double z) -> std::complex<double> {
            return std::pow(x * x + y * y + z * z, 0.5 * gamma);
        },
        true, false);
}

VectorField fractional_laplacian(const VectorField& field, double gamma) {
    VectorField out(field.grid);
    for (int c = 0; c < 3; ++c)
        out.set_component(c, fractional_laplacian(field.component(c), gamma));
    return out;
}

ScalarField riesz_transform(const ScalarField& field, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("riesz_transform: component must be 1..3");
    return apply_multiplier(
        field,
        [j](double x, double y, double z) -> std::complex<double> {
            double xi[3] = {x, y, z};
            double r = std::sqrt(x * x + y * y + z * z);
            return std::complex<double>(0.0, -xi[j - 1] / r);
        },
        true, true);
}

ScalarField derivative(const ScalarField& field, int j) {
    if (j < 1 || j > 3) throw std::invalid_argument("derivative: component must be 1..3");
    return apply_multiplier(
        field,
        [j](double x, double y, double z) -> std::complex<double> {
            double xi[3] = {x, y, z};
            return std::complex<double>(0.0, xi[j - 1]);
        },
        true, true);
}

VectorField gradient(const ScalarField& field) {
    VectorField out(field.grid);
    for (int c = 0; c < 3; ++c) out.set_component(c, derivative(field, c + 1));
    return out;
}

ScalarField divergence(const VectorField& field) {
    ScalarField out = derivative(field.component(0), 1);
    out = out + derivative(field.component(1), 2);
    out = out + derivative(field.component(2), 3);
    return out;
}

ScalarField littlewood_paley(const ScalarField& field, int j, LPKind kind) {
    double s1 = std::pow(2.0, -double(j));
    double s0 = std::pow(2.0, -double(j - 1));
    return apply_multiplier(
        field,
        [=](double x, double y, double z) -> std::complex<double> {
            double r = std::sqrt(x * x + y * y + z * z);
            switch (kind) {
                case LPKind::block:
                    return lp_rho(s1 * r) - lp_rho(s0 * r);
                case LPKind::low:
                    return lp_rho(s1 * r);
                case LPKind::high:
                    return 1.0 - lp_rho(s1 * r);
            }
            return 0.0;
        },
        false, false);
}

ScalarField fractional_heat(const ScalarField& field, double t, double s) {
    if (t < 0.0) throw std::invalid_argument("fractional_heat: negative time");
    return apply_multiplier(
        field,
        [t, s](double x, double y, double z) -> std::complex<double> {
            return std::exp(-t * std::pow(x * x + y * y + z * z, s));
        },
        false, false);
}

void dealias_inplace(SpectralField& spec) {
    const TorusGrid& g = spec.grid;
    int cut = g.n / 3;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i)
                if (std::abs(g.mode(i)) > cut || std::abs(g.mode(j)) > cut ||
                    std::abs(g.mode(k)) > cut)
                    spec.c[g.idx(i, j, k)] = 0.0;
}

ScalarField dealias(const ScalarField& f) {
    SpectralField spec = fourier_forward(f);
    dealias_inplace(spec);
    return fourier_inverse(spec);
}

ScalarField truncate_to_ball(const ScalarField& f, double r) {
    return apply_multiplier(
        f,
        [r](double x, double y, double z) -> std::complex<double> {
            return (x * x + y * y + z * z <= r * r) ? 1.0 : 0.0;
        },
        false, false);
}

ScalarField sample_radial(const TorusGrid& g, const std::array<double, 3>& c,
                          const std::function<double(double)>& profile) {
    ScalarField out(g);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                out.v[g.idx(i, j, k)] = profile(std::sqrt(g.dist2(x, c)));
            }
    return out;
}

namespace {

// Full-cell seminorm: iterate over displacements, inner sums over all points.
double seminorm_full(const ScalarField& f, double gamma, double p) {
    const TorusGrid& g = f.grid;
    const int n = g.n;
    const double h = g.spacing();
    const double expo = 3.0 + gamma * p;
    std::vector<double> partial(n, 0.0);
    parallel_for(std::size_t(n), [&](std::size_t dkz) {
        int dk = int(dkz);
        double acc = 0.0;
        for (int dj = 0; dj < n; ++dj)
            for (int di = 0; di < n; ++di) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                double dx = g.wrap(di * h), dy = g.wrap(dj * h), dz = g.wrap(dk * h);
                double dist2 = dx * dx + dy * dy + dz * dz;
                if (dist2 < h * h) continue;
                double w = std::pow(dist2, -0.5 * expo);
                double inner = 0.0;
                if (p == 2.0) {
                    for (int k = 0; k < n; ++k) {
                        int k2 = (k + dk) % n;
                        for (int j = 0; j < n; ++j) {
                            int j2 = (j + dj) % n;
                            const double* row = &f.v[g.idx(0, j, k)];
                            const double* row2 = &f.v[g.idx(0, j2, k2)];
                            for (int i = 0; i < n; ++i) {
                                double d = row[i] - row2[(i + di) % n];
                                inner += d * d;
                            }
                        }
                    }
                } else {
                    for (int k = 0; k < n; ++k) {
                        int k2 = (k + dk) % n;
                        for (int j = 0; j < n; ++j) {
                            int j2 = (j + dj) % n;
                            const double* row = &f.v[g.idx(0, j, k)];
                            const double* row2 = &f.v[g.idx(0, j2, k2)];
                            for (int i = 0; i < n; ++i)
                                inner += std::pow(std::abs(row[i] - row2[(i + di) % n]), p);
                        }
                    }
                }
                acc += w * inner;
            }
        partial[dk] = acc;
    });
    double total = 0.0;
    for (double x : partial) total += x;
    double h3 = h * h * h;
    return total * h3 * h3;
}

}  // namespace

double sobolev_slobodeckij_seminorm(const ScalarField& field, double gamma, double p,
                                    const Ball& region) {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("seminorm: gamma must lie in (0,1)");
    if (p < 1.0) throw std::invalid_argument("seminorm: p must be >= 1");
    const TorusGrid& g = field.grid;
    const double h = g.spacing();
    if (region.radius <= 0.0 || 2.0 * region.radius >= g.L)
        return seminorm_full(field, gamma, p);
    if (4.0 * region.radius > g.L)
        throw std::invalid_argument("seminorm: region too large for the grid");

    // gather points of the region
    std::vector<std::array<double, 3>> pts;
    std::vector<double> vals;
    double r2 = region.radius * region.radius;
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::array<double, 3> x{g.x(i), g.x(j), g.x(k)};
                if (g.dist2(x, region.center) <= r2) {
                    pts.push_back(x);
                    vals.push_back(field.v[g.idx(i, j, k)]);
                }
            }
    const double expo = 3.0 + gamma * p;
    std::vector<double> partial(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t aa) {
        double acc = 0.0;
        for (std::size_t bb = 0; bb < pts.size(); ++bb) {
            if (aa == bb) continue;
            double d2 = g.dist2(pts[aa], pts[bb]);
            if (d2 < h * h) continue;
            acc += std::pow(std::abs(vals[aa] - vals[bb]), p) * std::pow(d2, -0.5 * expo);
        }
        partial[aa] = acc;
    });
    double total = 0.0;
    for (double x : partial) total += x;
    double h3 = h * h * h;
    return total * h3 * h3;
}

ScalarField random_band_scalar(const TorusGrid& g, double k1, double k2, std::uint64_t seed) {
    // Fill physical white noise, then band-pass; avoids hand-managing the
    // Hermitian symmetry of the coefficients.
    std::mt19937_64 rng(mix_seed(seed, 0x5eed));
    std::normal_distribution<double> gauss(0.0, 1.0);
    ScalarField f(g);
    for (auto& x : f.v) x = gauss(rng);
    double scale = 2.0 * M_PI / g.L;
    f = apply_multiplier(
        f,
        [=](double x, double y, double z) -> std::complex<double> {
            double km = std::sqrt(x * x + y * y + z * z) / scale;
            return (km >= k1 && km <= k2) ? 1.0 : 0.0;
        },
        true, true);
    double nrm = l2_norm(f);
    if (nrm > 0.0) f = (1.0 / nrm) * f;
    return f;
}

double fractional_leibniz_check(const ScalarField& f, const ScalarField& g, double alpha,
                                const LeibnizExponents& e) {
    auto holder_ok = [](double r, double p, double q) {
        return std::abs(1.0 / r - 1.0 / p - 1.0 / q) < 1e-12;
    };
    if (!holder_ok(e.r, e.p1, e.q1) || !holder_ok(e.r, e.p2, e.q2))
        throw std::invalid_argument("fractional_leibniz_check: Holder relation violated");
    ScalarField fg = pointwise_product(f, g);
    double lhs = lp_norm(fractional_laplacian(fg, alpha), e.r);
    double rhs = lp_norm(fractional_laplacian(f, alpha), e.p1) * lp_norm(g, e.q1) +
                 lp_norm(f, e.p2) * lp_norm(fractional_laplacian(g, alpha), e.q2);
    if (rhs == 0.0) return 0.0;
    return lhs / rhs;
}

}  // namespace fracns

#include "fracns/maximal.hpp"

#include <cmath>

#include "fracns/util.hpp"

namespace fracns {

namespace {

using Poly = std::vector<double>;  // coefficients, ascending degree

double poly_eval(const Poly& p, double u) {
    double acc = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * u + p[i];
    return acc;
}

// d/du of P(u) e^{-u^2/2} = (P' - u P)(u) e^{-u^2/2}
Poly poly_step(const Poly& p) {
    Poly q(p.size() + 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) q[i - 1] += double(i) * p[i];
    for (std::size_t i = 0; i < p.size(); ++i) q[i + 1] -= p[i];
    return q;
}

}  // namespace

double TestProfile::value(const std::array<double, 3>& x) const {
    double out = scale;
    for (int i = 0; i < 3; ++i) {
        double u = x[i] / width;
        out *= (poly[i][0] + poly[i][1] * u) * std::exp(-0.5 * u * u);
    }
    return out;
}

double TestProfile::schwartz_budget() const {
    constexpr int N = 4;
    // 1D derivative tables: per axis, per order, polynomial factors
    std::array<std::array<Poly, N + 2>, 3> q;
    for (int i = 0; i < 3; ++i) {
        q[i][0] = {poly[i][0], poly[i][1]};
        for (int k = 1; k <= N + 1; ++k) q[i][k] = poly_step(q[i][k - 1]);
    }
    const double lim = 8.0 * width, du = width / 4.0;
    const int m = int(std::round(lim / du));
    // tabulate |d^k psi_i| on the 1D grid
    std::vector<std::array<std::array<double, N + 2>, 3>> tab(2 * m + 1);
    for (int g = -m; g <= m; ++g) {
        double x = g * du, u = x / width, e = std::exp(-0.5 * u * u);
        for (int i = 0; i < 3; ++i)
            for (int k = 0; k <= N + 1; ++k)
                tab[g + m][i][k] = std::abs(poly_eval(q[i][k], u)) * e * std::pow(width, -k);
    }
    double acc = 0.0;
    for (int gz = -m; gz <= m; ++gz)
        for (int gy = -m; gy <= m; ++gy)
            for (int gx = -m; gx <= m; ++gx) {
                double r = std::sqrt(double(gx) * gx + double(gy) * gy + double(gz) * gz) * du;
                double w = std::pow(1.0 + r, N);
                double sum = 0.0;
                for (int a1 = 0; a1 <= N + 1; ++a1)
                    for (int a2 = 0; a2 + a1 <= N + 1; ++a2)
                        for (int a3 = 0; a3 + a2 + a1 <= N + 1; ++a3)
                            sum += tab[gx + m][0][a1] * tab[gy + m][1][a2] * tab[gz + m][2][a3];
                acc += w * sum;
            }
    return acc * du * du * du * std::abs(scale);
}

TestFunctionFamily make_admissible_family() {
    TestFunctionFamily fam;
    auto add = [&](TestProfile p) {
        p.scale = 1.0;
        double budget = p.schwartz_budget();
        p.scale = 1.0 / budget;
        fam.members.push_back(p);
    };
    for (double w : {0.6, 1.0, 1.6}) {
        TestProfile p;
        p.name = "gauss_w" + std::to_string(w);
        p.width = w;
        add(p);
    }
    for (int axis = 0; axis < 3; ++axis) {
        TestProfile p;
        p.name = "hermite_axis" + std::to_string(axis + 1);
        p.width = 1.0;
        p.poly[axis] = {0.0, 1.0};
        add(p);
    }
    return fam;
}

ScalarField convolve_periodic(const ScalarField& a, const ScalarField& kernel) {
    require_same_grid(a.grid, kernel.grid);
    const TorusGrid& g = a.grid;
    std::vector<std::complex<double>> fa(g.size()), fw(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        fa[i] = a.v[i];
        fw[i] = kernel.v[i];
    }
    dft3(fa, g.n, -1);
    dft3(fw, g.n, -1);
    for (std::size_t i = 0; i < g.size(); ++i) fa[i] *= fw[i];
    dft3(fa, g.n, +1);
    ScalarField out(g);
    double inv = 1.0 / double(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) out.v[i] = fa[i].real() * inv;
    return out;
}

ScalarField hardy_littlewood_max(const ScalarField& field) {
    const TorusGrid& g = field.grid;
    const double h = g.spacing();
    ScalarField absf(g);
    for (std::size_t i = 0; i < g.size(); ++i) absf.v[i] = std::abs(field.v[i]);
    ScalarField out = absf;  // the h/2 rung: single-cell average
    for (double r = h; r <= 0.25 * g.L + 1e-12; r *= 2.0) {
        // counting-ball kernel
        ScalarField ker(g);
        std::size_t count = 0;
        double r2 = r * r * (1.0 + 1e-12);
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) {
                    double dx = g.wrap(i * h), dy = g.wrap(j * h), dz = g.wrap(k * h);
                    if (dx * dx + dy * dy + dz * dz <= r2) {
                        ker.v[g.idx(i, j, k)] = 1.0;
                        ++count;
                    }
                }
        for (auto& w : ker.v) w /= double(count);
        ScalarField avg = convolve_periodic(absf, ker);
        for (std::size_t i = 0; i < g.size(); ++i) out.v[i] = std::max(out.v[i], avg.v[i]);
    }
    return out;
}

namespace {

ScalarField profile_kernel(const TorusGrid& g, const TestProfile& psi, double t) {
    // h^3 t^{-3} psi(min_image(y)/t): midpoint quadrature weights of Psi_t
    ScalarField ker(g);
    const double h = g.spacing();
    double w = h * h * h / (t * t * t);
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                std::array<double, 3> y{g.wrap(i * h) / t, g.wrap(j * h) / t, g.wrap(k * h) / t};
                ker.v[g.idx(i, j, k)] = w * psi.value(y);
            }
    return ker;
}

// separable periodic cube max with window radius wc cells
ScalarField cube_max(const ScalarField& f, int wc) {
    if (wc <= 0) return f;
    const TorusGrid& g = f.grid;
    ScalarField a = f, b(g);
    const int n = g.n;
    // axis x
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double m = -1e300;
                for (int d = -wc; d <= wc; ++d) m = std::max(m, a(((i + d) % n + n) % n, j, k));
                b(i, j, k) = m;
            }
    // axis y
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double m = -1e300;
                for (int d = -wc; d <= wc; ++d) m = std::max(m, b(i, ((j + d) % n + n) % n, k));
                a(i, j, k) = m;
            }
    // axis z
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                double m = -1e300;
                for (int d = -wc; d <= wc; ++d) m = std::max(m, a(i, j, ((k + d) % n + n) % n));
                b(i, j, k) = m;
            }
    return b;
}

template <bool NonTangential>
ScalarField smooth_max_impl(const ScalarField& field, const TestProfile& psi) {
    const TorusGrid& g = field.grid;
    const double h = g.spacing();
    ScalarField out(g);
    bool any = false;
    for (double t = h; t <= 0.25 * g.L + 1e-12; t *= 2.0) {
        ScalarField conv = convolve_periodic(field, profile_kernel(g, psi, t));
        for (auto& x : conv.v) x = std::abs(x);
        if (NonTangential) conv = cube_max(conv, int(std::floor(t / h + 1e-9)));
        if (!any) {
            out = conv;
            any = true;
        } else {
            for (std::size_t i = 0; i < g.size(); ++i) out.v[i] = std::max(out.v[i], conv.v[i]);
        }
    }
    if (!any) throw std::invalid_argument("smooth_max: ladder empty (grid too coarse)");
    return out;
}

}  // namespace

ScalarField smooth_max(const ScalarField& field, const TestProfile& psi) {
    return smooth_max_impl<false>(field, psi);
}

ScalarField nontangential_max(const ScalarField& field, const TestProfile& psi) {
    return smooth_max_impl<true>(field, psi);
}

ScalarField grand_max_approx(const ScalarField& field, const TestFunctionFamily& family) {
    if (family.members.empty()) throw std::invalid_argument("grand_max_approx: empty family");
    ScalarField out = nontangential_max(field, family.members[0]);
    for (std::size_t m = 1; m < family.members.size(); ++m) {
        ScalarField next = nontangential_max(field, family.members[m]);
        for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = std::max(out.v[i], next.v[i]);
    }
    return out;
}

double band_limited_max_bound_check(const ScalarField& field, double r,
                                    const std::vector<std::array<int, 3>>& probe_offsets) {
    const TorusGrid& g = field.grid;
    ScalarField trunc = truncate_to_ball(field, r);
    if (rel_l2_error(trunc, field) > 1e-10)
        throw std::invalid_argument("band_limited_max_bound_check: spectrum exceeds B_r");
    ScalarField mf = hardy_littlewood_max(field);
    const double h = g.spacing();
    double worst = 0.0;
    for (const auto& z : probe_offsets) {
        double zr = std::sqrt(double(z[0]) * z[0] + double(z[1]) * z[1] + double(z[2]) * z[2]) * h;
        double denom_w = std::pow(1.0 + r * zr, 3);
        for (int k = 0; k < g.n; ++k)
            for (int j = 0; j < g.n; ++j)
                for (int i = 0; i < g.n; ++i) {
                    int i2 = ((i - z[0]) % g.n + g.n) % g.n;
                    int j2 = ((j - z[1]) % g.n + g.n) % g.n;
                    int k2 = ((k - z[2]) % g.n + g.n) % g.n;
                    double m = mf(i, j, k);
                    if (m <= 0.0) continue;
                    double ratio = std::abs(field(i2, j2, k2)) / (denom_w * m);
                    worst = std::max(worst, ratio);
                }
    }
    return worst;
}

double hardy_norm_proxy(const ScalarField& field) {
    double out = lp_norm(field, 1.0);
    for (int j = 1; j <= 3; ++j) out += lp_norm(riesz_transform(field, j), 1.0);
    return out;
}

}  // namespace fracns

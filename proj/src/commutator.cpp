#include "fracns/commutator.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <tuple>

#include "fracns/util.hpp"
#include "fracns/maximal.hpp"

namespace fracns {

namespace {

// spectral zero-padding interpolation onto the factor-x grid.  Coarse
// Nyquist-plane coefficients (|m| = n/2) are split half-and-half between the
// +n/2 and -n/2 fine modes, the unique real-valued extension, so grid values
// at coarse points are reproduced exactly for every input field.
ScalarField upsample_to(const ScalarField& f, int factor) {
    const TorusGrid& g = f.grid;
    TorusGrid g2(factor * g.n, g.L);
    SpectralField a = fourier_forward(f);
    SpectralField b(g2);
    const int half = g.n / 2;
    auto wrap = [&](int m) { return m < 0 ? m + g2.n : m; };
    for (int k = 0; k < g.n; ++k)
        for (int j = 0; j < g.n; ++j)
            for (int i = 0; i < g.n; ++i) {
                int m[3] = {g.mode(i), g.mode(j), g.mode(k)};
                std::complex<double> c = a.c[g.idx(i, j, k)];
                int opts[3][2];
                int nopt[3];
                for (int ax = 0; ax < 3; ++ax) {
                    if (std::abs(m[ax]) == half) {
                        opts[ax][0] = half;
                        opts[ax][1] = -half;
                        nopt[ax] = 2;
                        c *= 0.5;
                    } else {
                        opts[ax][0] = m[ax];
                        nopt[ax] = 1;
                    }
                }
                for (int oi = 0; oi < nopt[0]; ++oi)
                    for (int oj = 0; oj < nopt[1]; ++oj)
                        for (int ok = 0; ok < nopt[2]; ++ok)
                            b.c[g2.idx(wrap(opts[0][oi]), wrap(opts[1][oj]),
                                       wrap(opts[2][ok]))] += c;
            }
    return fourier_inverse(b);
}

// spectral projection onto the coarse band: keep modes with all |m_j| <= n/2,
// folding the two fine +-n/2 planes back onto the single coarse Nyquist plane
// (the adjoint of the upsampling split above)
ScalarField downsample_spectral(const ScalarField& f, const TorusGrid& coarse) {
    const TorusGrid& gf = f.grid;
    SpectralField a = fourier_forward(f);
    SpectralField b(coarse);
    const int half = coarse.n / 2;
    auto wrap = [&](int m) { return m < 0 ? m + gf.n : m; };
    for (int k = 0; k < coarse.n; ++k)
        for (int j = 0; j < coarse.n; ++j)
            for (int i = 0; i < coarse.n; ++i) {
                int m[3] = {coarse.mode(i), coarse.mode(j), coarse.mode(k)};
                int opts[3][2];
                int nopt[3];
                for (int ax = 0; ax < 3; ++ax) {
                    if (std::abs(m[ax]) == half) {
                        opts[ax][0] = half;
                        opts[ax][1] = -half;
                        nopt[ax] = 2;
                    } else {
                        opts[ax][0] = m[ax];
                        nopt[ax] = 1;
                    }
                }
                std::complex<double> acc{0.0, 0.0};
                for (int oi = 0; oi < nopt[0]; ++oi)
                    for (int oj = 0; oj < nopt[1]; ++oj)
                        for (int ok = 0; ok < nopt[2]; ++ok)
                            acc += a.c[gf.idx(wrap(opts[0][oi]), wrap(opts[1][oj]),
                                              wrap(opts[2][ok]))];
                b.c[coarse.idx(i, j, k)] = acc;
            }
    return fourier_inverse(b);
}

ScalarField downsample_from(const ScalarField& f, const TorusGrid& coarse, int factor) {
    ScalarField out(coarse);
    for (int k = 0; k < coarse.n; ++k)
        for (int j = 0; j < coarse.n; ++j)
            for (int i = 0; i < coarse.n; ++i)
                out.v[coarse.idx(i, j, k)] = f(factor * i, factor * j, factor * k);
    return out;
}

// signed minimal-image lattice coordinate of index i on a grid of size n
inline int signed_index(int i, int n) { return i <= n / 2 ? i : i - n; }

// cell average of w(|delta|) |delta|^{-3-beta} over the lattice cell centered
// at d, by 3-point Gauss per axis.  Point sampling has an O((h/rho)^2)
// midpoint error across the chi transition (only a few cells wide), which
// dominated the quadrature budget; exact-ish cell masses remove it.
double cell_avg_kernel(double d0, double d1, double d2, double h, double beta,
                       const std::function<double(double)>* window) {
    static const double gn[3] = {-0.3872983346207417, 0.0,
                                 0.3872983346207417};  // +- sqrt(3/5)/2, unit cell
    static const double gw[3] = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    double acc = 0.0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int c = 0; c < 3; ++c) {
                double x0 = d0 + gn[a] * h, x1 = d1 + gn[b] * h, x2 = d2 + gn[c] * h;
                double r = std::sqrt(x0 * x0 + x1 * x1 + x2 * x2);
                double wv = window ? (*window)(r) : 1.0;
                if (wv == 0.0 || r == 0.0) continue;
                acc += gw[a] * gw[b] * gw[c] * std::pow(r, -3.0 - beta) * wv;
            }
    return acc;
}

// periodized power kernel sum_{|m|_inf <= 3} |d + m L|^{-3-beta} plus the
// isotropic integral remainder of the discarded images; chi (when given)
// multiplies the m = 0 term by (1 - chi(|d|))
ScalarField periodized_tail_kernel(const TorusGrid& g, double beta,
                                   const std::function<double(double)>* one_minus_factor) {
    ScalarField ker(g);
    const double L = g.L;
    const double h = g.spacing();
    const double remainder = 4.0 * M_PI / (beta * std::pow(3.5 * L, beta)) / (L * L * L);
    parallel_for(g.size(), [&](std::size_t id) {
        auto c = g.coords(id);
        double d0 = signed_index(c[0], g.n) * h;
        double d1 = signed_index(c[1], g.n) * h;
        double d2 = signed_index(c[2], g.n) * h;
        double acc = remainder;
        for (int m0 = -3; m0 <= 3; ++m0)
            for (int m1 = -3; m1 <= 3; ++m1)
                for (int m2 = -3; m2 <= 3; ++m2) {
                    double w0 = d0 + m0 * L, w1 = d1 + m1 * L, w2 = d2 + m2 * L;
                    double r2 = w0 * w0 + w1 * w1 + w2 * w2;
                    bool home = (m0 == 0 && m1 == 0 && m2 == 0);
                    if (home && r2 == 0.0 && !one_minus_factor)
                        continue;  // the singular center cell is excluded
                    if (home && r2 < L * L / 16.0) {
                        // near cells carry the kernel curvature (and the chi
                        // transition): use the cell mass, not the point value
                        acc += cell_avg_kernel(w0, w1, w2, h, beta, one_minus_factor);
                        continue;
                    }
                    if (r2 == 0.0) continue;  // the singular center is excluded
                    double term = std::pow(r2, -0.5 * (3.0 + beta));
                    if (home && one_minus_factor)
                        term *= (*one_minus_factor)(std::sqrt(r2));
                    acc += term;
                }
        ker.v[id] = acc;
    });
    return ker;
}

// lattice convolution sum_y f(y) ker(x-y) h^3 via the DFT
ScalarField lattice_convolve(const ScalarField& f, const ScalarField& ker) {
    ScalarField out = convolve_periodic(f, ker);
    double h3 = std::pow(f.grid.spacing(), 3);
    for (double& v : out.v) v *= h3;
    return out;
}

void require_beta(double beta) {
    if (!(beta > 0.5 && beta < 2.0))
        throw std::invalid_argument("commutator order beta must lie in (1/2, 2)");
}

// int |d|^2 chi(|d|) |d|^{-3-beta} dd = 4 pi int_0^{2 rho} r^{1-beta} chi(r) dr.
// The quadratic Taylor part of the paired integrand is integrated against the
// kernel with this exact moment instead of the lattice sum; that removes the
// h^{2-beta} lattice error of the singular region.
double chi_second_moment(double beta, const std::function<double(double)>& chi, double rho) {
    // [0, rho]: chi = 1, closed form; [rho, 2 rho]: 64-point Gauss-Legendre
    double acc = std::pow(rho, 2.0 - beta) / (2.0 - beta);
    const int m = 64;
    for (int i = 0; i < m; ++i) {
        // midpoint-offset Chebyshev-free nodes: plain composite midpoint is
        // plenty for the smooth factor
        double r = rho + (i + 0.5) * rho / m;
        acc += std::pow(r, 1.0 - beta) * chi(r) * rho / m;
    }
    return 4.0 * M_PI * acc;
}

}  // namespace

namespace {

// alias-free product by zero padding: multiply on the 2x grid, then project
// back onto the coarse band.  Unlike a 2/3-rule chop this keeps every coarse
// mode of the true product, which matters when both factors carry content
// near the grid cutoff.
ScalarField padded_product(const ScalarField& a, const ScalarField& b) {
    const TorusGrid& g = a.grid;
    ScalarField a2 = upsample_to(a, 2), b2 = upsample_to(b, 2);
    for (std::size_t m = 0; m < a2.v.size(); ++m) a2.v[m] *= b2.v[m];
    return downsample_spectral(a2, g);
}

}  // namespace

ScalarField spectral_commutator(const ScalarField& phi, const ScalarField& v, double beta) {
    require_beta(beta);
    require_same_grid(phi.grid, v.grid);
    const TorusGrid& g = phi.grid;
    ScalarField out = fractional_laplacian(padded_product(phi, v), beta);
    ScalarField lv = fractional_laplacian(v, beta);
    for (std::size_t m = 0; m < g.size(); ++m) out.v[m] -= phi.v[m] * lv.v[m];
    return out;
}

double CutoffPair::chi(double r) const { return radial_cutoff(r, rho, 2.0 * rho); }

double CutoffPair::phi_radial(double r) const {
    // erfc roll-off with a compactly supported outer truncation: the Gaussian
    // spectral tail (exp(-(sigma k)^2/4)) keeps every grid representation of
    // phi accurate at modest n, and the truncation acts only where the erfc
    // factor is already ~5e-5, so it barely perturbs the spectrum
    double sigma = 0.145 * R;
    return 0.5 * std::erfc((r - 0.45 * R) / sigma) * radial_cutoff(r, 0.85 * R, 0.95 * R);
}

CutoffPair make_cutoff_pair(const TorusGrid& g, const std::array<double, 3>& center,
                            double R, double R0) {
    if (!(R > 0.0 && R < R0 && R0 <= 0.5 * g.L))
        throw std::invalid_argument("make_cutoff_pair: need 0 < R < R0 <= L/2");
    double rho = (R0 - R) / 5.0;
    if (!(2.0 * rho < R))
        throw std::invalid_argument("make_cutoff_pair: need 2 rho < R (R0 < 7R/2)");
    CutoffPair out;
    out.grid = g;
    out.center = center;
    out.R = R;
    out.R0 = R0;
    out.rho = rho;
    out.phi = sample_radial(g, center, [&out](double r) { return out.phi_radial(r); });
    return out;
}

ScalarField CommutatorPieces::sum() const {
    ScalarField out = l1 + l2;
    out = out + t1;
    return out + t2;
}

CommutatorPieces decomposed_commutator(const CutoffPair& cut, const ScalarField& G,
                                       double beta, int refine) {
    require_beta(beta);
    require_same_grid(cut.grid, G.grid);
    if (refine < 2 || (refine & (refine - 1)) != 0)
        throw std::invalid_argument("decomposed_commutator: refine must be 2, 4, 8, ...");
    const TorusGrid& g = cut.grid;
    ScalarField G2 = upsample_to(G, refine);
    const TorusGrid& gf = G2.grid;
    // the operand is the band-limited field cut.phi: spectral interpolation
    // onto the refined lattice is exact for it, so the quadrature and the
    // spectral commutator act on the identical function
    ScalarField phi2 = upsample_to(cut.phi, refine);
    const double hf = gf.spacing();
    const double hf3 = hf * hf * hf;

    // local offsets: refined lattice points with 0 < |d| < 2 rho, one
    // representative per {d, -d} pair, with the chi-windowed kernel weight
    struct Offset {
        int di, dj, dk;
        double w;  // cell average of chi(|d|) |d|^{-3-beta} over the cell, times hf^3
    };
    std::vector<Offset> offsets;
    std::function<double(double)> chi_win = [&cut](double r) { return cut.chi(r); };
    int reach = int(std::ceil(2.0 * cut.rho / hf)) + 2;
    for (int dk = -reach; dk <= reach; ++dk)
        for (int dj = -reach; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                if (!(di > 0 || (di == 0 && dj > 0) || (di == 0 && dj == 0 && dk > 0)))
                    continue;
                double r = hf * std::sqrt(double(di) * di + double(dj) * dj +
                                          double(dk) * dk);
                if (r >= 2.0 * cut.rho + hf) continue;
                double w = cell_avg_kernel(di * hf, dj * hf, dk * hf, hf, beta, &chi_win);
                if (w == 0.0) continue;
                offsets.push_back({di, dj, dk, w * hf3});
            }

    // derivatives for the quadratic Taylor correction: the paired integrand
    // minus its second-order part is O(|d|^4) K, which the lattice integrates
    // accurately, while the quadratic part gets the exact kernel moment.
    // Both operands are band-limited, so their spectral derivatives are exact.
    ScalarField dG[3];
    for (int j = 0; j < 3; ++j) dG[j] = derivative(G, j + 1);
    ScalarField dphi[3], hphi[3][3];
    for (int j = 0; j < 3; ++j) {
        dphi[j] = derivative(cut.phi, j + 1);
        for (int k = 0; k <= j; ++k) hphi[j][k] = derivative(dphi[j], k + 1);
    }
    for (int j = 0; j < 3; ++j)
        for (int k = j + 1; k < 3; ++k) hphi[j][k] = hphi[k][j];
    std::function<double(double)> chi_fn = [&](double r) { return cut.chi(r); };
    const double ichi = chi_second_moment(beta, chi_fn, cut.rho);

    CommutatorPieces out{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
    int nf = gf.n;
    parallel_for(g.size(), [&](std::size_t id) {
        auto c = g.coords(id);
        int xi = refine * c[0], xj = refine * c[1], xk = refine * c[2];
        double phx = phi2(xi, xj, xk), gx = G2(xi, xj, xk);
        double gp3[3], gg3[3], hh[3][3];
        for (int a = 0; a < 3; ++a) {
            gp3[a] = dphi[a].v[id];
            gg3[a] = dG[a].v[id];
            for (int b = 0; b < 3; ++b) hh[a][b] = hphi[a][b].v[id];
        }
        double acc1 = 0.0, acc2 = 0.0;
        for (const Offset& o : offsets) {
            int pi = (xi + o.di + nf) % nf, pj = (xj + o.dj + nf) % nf,
                pk = (xk + o.dk + nf) % nf;
            int mi = (xi - o.di + nf) % nf, mj = (xj - o.dj + nf) % nf,
                mk = (xk - o.dk + nf) % nf;
            double php = phi2(pi, pj, pk), phm = phi2(mi, mj, mk);
            double gp = G2(pi, pj, pk), gm = G2(mi, mj, mk);
            double d[3] = {o.di * hf, o.dj * hf, o.dk * hf};
            double dhd = 0.0, dgp = 0.0, dgg = 0.0;
            for (int a = 0; a < 3; ++a) {
                dgp += d[a] * gp3[a];
                dgg += d[a] * gg3[a];
                for (int b = 0; b < 3; ++b) dhd += d[a] * hh[a][b] * d[b];
            }
            // pair d with -d so the odd kernel part cancels exactly, then
            // strip the quadratic Taylor term (restored analytically below)
            acc1 += (2.0 * phx - php - phm + dhd) * o.w;
            acc2 += ((gp - gx) * (phx - php) + (gm - gx) * (phx - phm) + 2.0 * dgg * dgp) *
                    o.w;
        }
        double lap_phi = hh[0][0] + hh[1][1] + hh[2][2];
        double grad_dot = gp3[0] * gg3[0] + gp3[1] * gg3[1] + gp3[2] * gg3[2];
        out.l1.v[id] = gx * (acc1 - lap_phi * ichi / 6.0);
        out.l2.v[id] = acc2 - grad_dot * ichi / 3.0;
    });

    // tail pieces: bounded kernel, computed as exact lattice convolutions.
    // The kernel depends only on (lattice, beta, rho); repeated calls with the
    // same geometry (ensembles, acceptance sweeps) reuse it.
    static std::map<std::tuple<int, long long, long long, long long>, ScalarField>
        kt_cache;
    auto kt_key = std::make_tuple(gf.n, (long long)std::llround(gf.L * 1e12),
                                  (long long)std::llround(beta * 1e12),
                                  (long long)std::llround(cut.rho * 1e12));
    auto kt_it = kt_cache.find(kt_key);
    if (kt_it == kt_cache.end()) {
        std::function<double(double)> window = [&](double r) {
            return 1.0 - cut.chi(r);
        };
        kt_it = kt_cache.emplace(kt_key, periodized_tail_kernel(gf, beta, &window)).first;
    }
    const ScalarField& kt = kt_it->second;
    ScalarField conv_g = lattice_convolve(G2, kt);
    ScalarField gphi(gf);
    for (std::size_t m = 0; m < gf.size(); ++m) gphi.v[m] = G2.v[m] * phi2.v[m];
    ScalarField conv_gphi = lattice_convolve(gphi, kt);
    ScalarField t1f = downsample_from(conv_g, g, refine),
                t2f = downsample_from(conv_gphi, g, refine);
    for (std::size_t m = 0; m < g.size(); ++m) {
        out.t1.v[m] = cut.phi.v[m] * t1f.v[m];
        out.t2.v[m] = -t2f.v[m];
    }

    for (const ScalarField* p : {&out.l1, &out.l2, &out.t1, &out.t2})
        for (double v : p->v)
            if (!std::isfinite(v))
                throw std::runtime_error("decomposed_commutator: quadrature diverged");
    return out;
}

double calibrate_cbeta(const TorusGrid& g, double beta, int refine) {
    require_beta(beta);
    TorusGrid gf(refine * g.n, g.L);
    const double hf = gf.spacing();
    const double hf3 = hf * hf * hf;
    ScalarField kper = periodized_tail_kernel(gf, beta, nullptr);

    // the quadratic-Taylor correction of the singular region: replace the
    // lattice second moment of chi K by its exact continuum value
    const double rho = g.L / 16.0;
    std::function<double(double)> chi = [rho](double r) {
        return radial_cutoff(r, rho, 2.0 * rho);
    };
    double m1 = 0.0;  // lattice sum of d1^2 times the cell-averaged chi K weight
    int reach = int(std::ceil(2.0 * rho / hf)) + 2;
    for (int dk = -reach; dk <= reach; ++dk)
        for (int dj = -reach; dj <= reach; ++dj)
            for (int di = -reach; di <= reach; ++di) {
                if (di == 0 && dj == 0 && dk == 0) continue;
                double r = hf * std::sqrt(double(di) * di + double(dj) * dj +
                                          double(dk) * dk);
                if (r >= 2.0 * rho + hf) continue;
                double d1 = di * hf;
                m1 += d1 * d1 * cell_avg_kernel(di * hf, dj * hf, dk * hf, hf, beta, &chi) *
                      hf3;
            }
    const double ichi = chi_second_moment(beta, chi, rho);
    // per unit q^2 f(x): exact moment in, lattice moment out
    const double quad_fix = ichi / 6.0 - 0.5 * m1;

    // plane wave f = cos(q x1): the corrected lattice singular integral
    // should reproduce |q|^beta f(x); the ratio is the kernel constant
    const double q = 2.0 * (2.0 * M_PI / g.L);
    std::vector<double> s_of_x(std::size_t(g.n), 0.0);
    parallel_for(std::size_t(g.n), [&](std::size_t ix) {
        double x = g.x(int(ix));
        double fx = std::cos(q * x);
        double acc = 0.0;
        for (int dk = 0; dk < gf.n; ++dk)
            for (int dj = 0; dj < gf.n; ++dj)
                for (int di = 0; di < gf.n; ++di) {
                    if (di == 0 && dj == 0 && dk == 0) continue;
                    double d1 = signed_index(di, gf.n) * hf;
                    acc += (fx - std::cos(q * (x + d1))) * kper.v[gf.idx(di, dj, dk)];
                }
        s_of_x[ix] = acc * hf3 + q * q * fx * quad_fix;
    });
    double num = 0.0, den = 0.0;
    for (int i = 0; i < g.n; ++i) {
        double fx = std::cos(q * g.x(i));
        num += s_of_x[std::size_t(i)] * fx;
        den += std::pow(q, beta) * fx * fx;
    }
    return num / den;
}

double tail_trick_ratio(const ScalarField& u, const CutoffPair& cut, double s,
                        double beta, TailVariant variant, double gamma, int k) {
    require_same_grid(u.grid, cut.grid);
    if (!(beta > s)) throw std::invalid_argument("tail_trick_ratio: need beta > s");
    if (k < 0 || k > 2) throw std::invalid_argument("tail_trick_ratio: k must be in 0..2");
    if (variant == TailVariant::trick2 &&
        !(gamma - s >= 0.0 && gamma - s < 1.0 && gamma <= 1.0))
        throw std::invalid_argument("tail_trick_ratio: need 0 <= gamma - s < 1, gamma <= 1");
    const TorusGrid& g = u.grid;

    ScalarField w = (variant == TailVariant::trick1) ? u : fractional_laplacian(u, gamma);
    ScalarField w2 = upsample_to(w, 2);
    // the kernel depends only on (grid, beta, rho): cache it across ensemble calls
    static std::map<std::tuple<int, double, double, double>, ScalarField> cache;
    auto key = std::make_tuple(g.n, g.L, beta, cut.rho);
    auto it = cache.find(key);
    if (it == cache.end()) {
        std::function<double(double)> window = [&](double r) { return 1.0 - cut.chi(r); };
        it = cache.emplace(key, periodized_tail_kernel(w2.grid, beta, &window)).first;
    }
    ScalarField tail = downsample_from(lattice_convolve(w2, it->second), g, 2);

    Ball ball{cut.center, cut.R};
    double num = wk_inf_norm_ball(tail, k, ball);
    ScalarField mlam = hardy_littlewood_max(fractional_laplacian(u, s));
    double den = lp_norm(mlam, 2.0, ball);
    if (variant == TailVariant::trick1) den += lp_norm(u, 1.0, ball);
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

double wk_inf_norm_ball(const ScalarField& f, int k, const Ball& region) {
    if (k < 0 || k > 4)
        throw std::invalid_argument("wk_inf_norm_ball: order must be in 0..4");
    const TorusGrid& g = f.grid;
    auto ball_max = [&](const ScalarField& h) {
        double out = 0.0;
        double r2 = region.radius * region.radius;
        for (int kk = 0; kk < g.n; ++kk)
            for (int jj = 0; jj < g.n; ++jj)
                for (int ii = 0; ii < g.n; ++ii) {
                    std::array<double, 3> x{g.x(ii), g.x(jj), g.x(kk)};
                    if (g.dist2(x, region.center) > r2) continue;
                    out = std::max(out, std::abs(h(ii, jj, kk)));
                }
        return out;
    };
    double out = ball_max(f);
    std::vector<ScalarField> layer{f};
    for (int depth = 1; depth <= k; ++depth) {
        std::vector<ScalarField> next;
        for (const ScalarField& h : layer)
            for (int j = 1; j <= 3; ++j) {
                ScalarField d = derivative(h, j);
                out = std::max(out, ball_max(d));
                next.push_back(std::move(d));
            }
        layer = std::move(next);
    }
    return out;
}

}  // namespace fracns

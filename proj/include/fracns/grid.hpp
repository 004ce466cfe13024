#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace fracns {

// Periodic cube [0,L)^3 sampled on n points per axis.  All fields that
// interact must share (n, L) exactly.
struct TorusGrid {
    int n = 0;
    double L = 0.0;

    TorusGrid() = default;
    TorusGrid(int n_per_dim, double box_length) : n(n_per_dim), L(box_length) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("TorusGrid: n_per_dim must be even and >= 8");
        if (!(L > 0.0))
            throw std::invalid_argument("TorusGrid: box_length must be positive");
    }

    double spacing() const { return L / n; }
    std::size_t size() const { return std::size_t(n) * n * n; }

    // row-major, x fastest
    std::size_t idx(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * k);
    }
    std::array<int, 3> coords(std::size_t id) const {
        int i = int(id % n);
        int j = int((id / n) % n);
        int k = int(id / (std::size_t(n) * n));
        return {i, j, k};
    }
    double x(int i) const { return i * spacing(); }

    // signed mode index in [-n/2, n/2)
    int mode(int i) const { return i <= n / 2 ? (i < n / 2 ? i : -n / 2) : i - n; }
    // wavenumber component xi = 2*pi/L * mode
    double xi(int i) const { return 2.0 * M_PI / L * mode(i); }

    // minimal periodic image of a coordinate difference
    double wrap(double d) const {
        while (d > 0.5 * L) d -= L;
        while (d < -0.5 * L) d += L;
        return d;
    }
    double dist2(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
        double dx = wrap(a[0] - b[0]), dy = wrap(a[1] - b[1]), dz = wrap(a[2] - b[2]);
        return dx * dx + dy * dy + dz * dz;
    }
    bool operator==(const TorusGrid& o) const { return n == o.n && L == o.L; }
    bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

inline void require_same_grid(const TorusGrid& a, const TorusGrid& b) {
    if (a != b) throw std::invalid_argument("grid mismatch between fields");
}

// Dissipation strength s in (3/4, 1) plus the derived exponents used
// throughout: a = 1-2s (extension weight), delta = 2s/(6-s).
struct DissipationOrder {
    double s;
    explicit DissipationOrder(double s_) : s(s_) {
        if (!(s > 0.75 && s < 1.0))
            throw std::invalid_argument("DissipationOrder: s must lie in (3/4, 1)");
    }
    double a() const { return 1.0 - 2.0 * s; }
    double delta() const { return 2.0 * s / (6.0 - s); }
};

// Ball region on the torus (periodic metric).
struct Ball {
    std::array<double, 3> center{0.0, 0.0, 0.0};
    double radius = 0.0;
};

}  // namespace fracns

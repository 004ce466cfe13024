// Python bindings: numpy-facing wrappers over the core library.  Scalar
// fields are (n, n, n) float64 arrays indexed [x, y, z]; vector fields add a
// leading component axis (3, n, n, n).  The box size L defaults to 2*pi.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fracns/commutator.hpp"
#include "fracns/diagnostics.hpp"
#include "fracns/fns_io.hpp"
#include "fracns/util.hpp"

namespace py = pybind11;
using namespace fracns;

namespace {

using Arr = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Arrays are indexed [x, y, z] (so meshgrid(..., indexing="ij") coordinates
// line up with axes 0, 1, 2); the field storage is x-fastest, hence the
// transposed copies here.
void copy_in(const double* a, std::vector<double>& v, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                v[std::size_t(i) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * k)] =
                    a[std::size_t(k) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * i)];
}

void copy_out(const std::vector<double>& v, double* a, int n) {
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                a[std::size_t(k) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * i)] =
                    v[std::size_t(i) + std::size_t(n) * (std::size_t(j) + std::size_t(n) * k)];
}

ScalarField to_scalar(const Arr& a, double L) {
    if (a.ndim() != 3 || a.shape(0) != a.shape(1) || a.shape(1) != a.shape(2))
        throw std::invalid_argument("expected a cubic (n, n, n) array");
    TorusGrid g(int(a.shape(0)), L);
    ScalarField f(g);
    copy_in(a.data(), f.v, g.n);
    return f;
}

VectorField to_vector(const Arr& a, double L) {
    if (a.ndim() != 4 || a.shape(0) != 3 || a.shape(1) != a.shape(2) ||
        a.shape(2) != a.shape(3))
        throw std::invalid_argument("expected a (3, n, n, n) array");
    TorusGrid g(int(a.shape(1)), L);
    VectorField u(g);
    for (int c = 0; c < 3; ++c)
        copy_in(a.data() + std::size_t(c) * g.size(), u.comp[std::size_t(c)], g.n);
    return u;
}

py::array from_scalar(const ScalarField& f) {
    int n = f.grid.n;
    py::array_t<double> out({n, n, n});
    copy_out(f.v, out.mutable_data(), n);
    return out;
}

py::array from_vector(const VectorField& u) {
    int n = u.grid.n;
    py::array_t<double> out({3, n, n, n});
    for (int c = 0; c < 3; ++c)
        copy_out(u.comp[std::size_t(c)], out.mutable_data() + std::size_t(c) * u.grid.size(),
                 n);
    return out;
}

SolverConfig make_config(double s, double dt, double t_end, const std::string& integrator,
                         bool nonlinear, int output_every, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.s = s;
    cfg.dt = dt;
    cfg.t_end = t_end;
    if (integrator == "etd_rk2")
        cfg.integrator = Integrator::etd_rk2;
    else if (integrator == "etd_rk4")
        cfg.integrator = Integrator::etd_rk4;
    else
        throw std::invalid_argument("integrator must be 'etd_rk2' or 'etd_rk4'");
    cfg.nonlinear = nonlinear;
    cfg.output_every = output_every;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_fracns, m) {
    m.doc() = "Pseudo-spectral fractional Navier-Stokes core (numpy interface)";

    m.def(
        "fractional_laplacian",
        [](const Arr& f, double gamma, double L) {
            return from_scalar(fractional_laplacian(to_scalar(f, L), gamma));
        },
        py::arg("f"), py::arg("gamma"), py::arg("L") = 2.0 * M_PI,
        "Apply Lambda^gamma = (-Laplacian)^{gamma/2}.");

    m.def(
        "fractional_heat",
        [](const Arr& f, double t, double s, double L) {
            return from_scalar(fractional_heat(to_scalar(f, L), t, s));
        },
        py::arg("f"), py::arg("t"), py::arg("s"), py::arg("L") = 2.0 * M_PI,
        "Apply the semigroup exp(-t Lambda^{2s}).");

    m.def(
        "riesz_transform",
        [](const Arr& f, int j, double L) {
            return from_scalar(riesz_transform(to_scalar(f, L), j));
        },
        py::arg("f"), py::arg("j"), py::arg("L") = 2.0 * M_PI,
        "Riesz transform R_j, j in {1, 2, 3}.");

    m.def(
        "leray_project",
        [](const Arr& u, double L) { return from_vector(leray_project(to_vector(u, L))); },
        py::arg("u"), py::arg("L") = 2.0 * M_PI,
        "Project onto divergence-free fields.");

    m.def(
        "solve_pressure",
        [](const Arr& u, double L) {
            PressurePair pp = solve_pressure(to_vector(u, L));
            return py::make_tuple(from_scalar(pp.p), from_vector(pp.grad));
        },
        py::arg("u"), py::arg("L") = 2.0 * M_PI,
        "Pressure p = (-Laplacian)^{-1} div div (u tensor u) and its gradient.");

    m.def(
        "make_initial",
        [](const std::string& kind, int n, double L, double k1, double k2, double slope,
           std::uint64_t seed, double width, double amplitude) {
            TorusGrid g(n, L);
            InitialKind ik;
            if (kind == "taylor_green")
                ik = InitialKind::taylor_green;
            else if (kind == "random_band")
                ik = InitialKind::random_band;
            else if (kind == "localized_bump")
                ik = InitialKind::localized_bump;
            else
                throw std::invalid_argument("unknown initial kind: " + kind);
            InitialParams p;
            p.k1 = k1;
            p.k2 = k2;
            p.slope = slope;
            p.seed = seed;
            p.width = width;
            p.amplitude = amplitude;
            return from_vector(make_initial(g, ik, p));
        },
        py::arg("kind"), py::arg("n"), py::arg("L") = 2.0 * M_PI, py::arg("k1") = 1.0,
        py::arg("k2") = 4.0, py::arg("slope") = 0.0, py::arg("seed") = 0,
        py::arg("width") = 0.7, py::arg("amplitude") = 1.0,
        "Build a divergence-free initial field ('taylor_green', 'random_band', "
        "'localized_bump').");

    m.def(
        "simulate",
        [](const Arr& u0, double s, double dt, double t_end, const std::string& integrator,
           bool nonlinear, int output_every, std::uint64_t seed, double L) {
            VectorField u = to_vector(u0, L);
            Trajectory traj = run(make_config(s, dt, t_end, integrator, nonlinear,
                                              output_every, seed),
                                  u.grid, u);
            py::dict out;
            out["times"] = py::array(py::cast(traj.times));
            out["energy"] = py::array(py::cast(traj.energy));
            out["dissipation"] = py::array(py::cast(traj.dissipation));
            out["final"] = from_vector(traj.frames.back());
            out["energy_residual"] = traj.energy_residual(traj.times.size() - 1);
            return out;
        },
        py::arg("u0"), py::arg("s"), py::arg("dt"), py::arg("t_end"),
        py::arg("integrator") = "etd_rk2", py::arg("nonlinear") = true,
        py::arg("output_every") = 1, py::arg("seed") = 0, py::arg("L") = 2.0 * M_PI,
        "Run the fractional Navier-Stokes solver; returns times, energy, cumulative "
        "dissipation, the final field, and the energy-balance residual.");

    m.def(
        "weak_lp_norm",
        [](const Arr& f, double p, double L) {
            WeakLpResult r = weak_lp_norm(to_scalar(f, L), p, Ball{{0.0, 0.0, 0.0}, -1.0});
            return py::make_tuple(r.c, r.attained_level);
        },
        py::arg("f"), py::arg("p"), py::arg("L") = 2.0 * M_PI,
        "Weak-Lp quasi-norm estimate over the whole box: (value, attained level).");

    m.def(
        "pressure_hardy_ratio",
        [](const Arr& u, int n_riesz, double s, double L) {
            return pressure_hardy_ratio(to_vector(u, L), n_riesz, s);
        },
        py::arg("u"), py::arg("n_riesz"), py::arg("s"), py::arg("L") = 2.0 * M_PI,
        "||R^n Lambda^{2s} p||_1 / ||Lambda^s u||_2^2.");

    m.def("derivative_exponent", &derivative_exponent, py::arg("s"), py::arg("n"),
          "p = 2(3s-1)/(n+2s-1) for s in [3/4, 1], n in {1, 2}.");

    m.def(
        "dimension_bounds",
        [](double s) {
            auto [a, b] = dimension_bounds(s);
            return py::make_tuple(a, b);
        },
        py::arg("s"),
        "Box-counting dimension bounds (suitable, Leray-Hopf) for s in [3/4, 1].");

    m.def(
        "write_field",
        [](const std::string& path, const Arr& a, double s, double L) {
            if (a.ndim() == 3)
                write_field(path, to_scalar(a, L), s);
            else
                write_field(path, to_vector(a, L), s);
        },
        py::arg("path"), py::arg("field"), py::arg("s") = 0.0, py::arg("L") = 2.0 * M_PI,
        "Serialize a scalar or vector field to the FNS1 container.");

    m.def(
        "read_field",
        [](const std::string& path) {
            FieldFile ff = read_field(path);
            if (ff.ncomp == 1) return py::make_tuple(from_scalar(ff.scalar), ff.s);
            return py::make_tuple(from_vector(ff.vector), ff.s);
        },
        py::arg("path"), "Read an FNS1 field file: (array, s).");
}

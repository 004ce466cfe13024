"""End-to-end smoke tests for the Python bindings."""

import math

import numpy as np
import pytest

import fracns


N = 16
TWO_PI = 2.0 * math.pi


def grid_coords(n):
    x = np.arange(n) * (TWO_PI / n)
    return np.meshgrid(x, x, x, indexing="ij")


def test_fractional_laplacian_plane_wave():
    x, y, _ = grid_coords(N)
    f = np.cos(2 * x + y)
    got = fracns.fractional_laplacian(f, 1.2)
    want = 5.0 ** 0.6 * f
    assert np.max(np.abs(got - want)) < 1e-10


def test_heat_semigroup_decay():
    x, _, _ = grid_coords(N)
    f = np.cos(x)
    got = fracns.fractional_heat(f, 0.5, 0.8)
    assert np.allclose(got, math.exp(-0.5) * f, atol=1e-12)


def test_riesz_transform_is_bounded_and_antisymmetric():
    x, _, _ = grid_coords(N)
    f = np.cos(x)
    r1 = fracns.riesz_transform(f, 1)
    assert np.allclose(r1, np.sin(x), atol=1e-12)


def test_simulate_energy_balance():
    u0 = fracns.make_initial("random_band", N, k1=1.0, k2=3.0, seed=7)
    out = fracns.simulate(u0, s=0.8, dt=5e-3, t_end=0.1, output_every=5)
    energy = out["energy"]
    assert energy[-1] < energy[0]  # dissipative
    assert out["energy_residual"] < 1e-3 * energy[0]
    assert out["final"].shape == (3, N, N, N)


def test_taylor_green_pressure():
    u = fracns.make_initial("taylor_green", N)
    p, grad = fracns.solve_pressure(u)
    x, y, _ = grid_coords(N)
    scale = np.max(np.abs(u[0])) ** 2  # oracle scales with the squared amplitude
    want = -(np.cos(2 * x) + np.cos(2 * y)) / 4.0 * scale
    assert np.max(np.abs(p - want)) < 1e-8
    assert grad.shape == (3, N, N, N)


def test_leray_projection_removes_gradients():
    # band-limited: divergence-free field plus the gradient of a smooth scalar
    u = fracns.make_initial("random_band", N, k1=1.0, k2=3.0, seed=3)
    x, y, z = grid_coords(N)
    grad = np.stack([np.cos(x) * np.sin(y), -np.sin(x) * np.cos(y) * 0.0, np.sin(z)])
    grad[1] = np.sin(x) * np.cos(y)  # gradient of sin(x) sin(y) - cos(z)
    once = fracns.leray_project(u + grad)
    assert np.max(np.abs(once - u)) < 1e-10
    twice = fracns.leray_project(once)
    assert np.max(np.abs(once - twice)) < 1e-10


def test_weak_lp_indicator():
    f = np.zeros((N, N, N))
    f[:4, :4, :4] = 2.0
    c, level = fracns.weak_lp_norm(f, 2.0)
    h = TWO_PI / N
    want = 2.0 * (64 * h**3) ** 0.5
    assert abs(c - want) / want < 1e-10
    assert level == pytest.approx(2.0)


def test_pressure_hardy_ratio_finite():
    u0 = fracns.make_initial("random_band", N, k1=1.0, k2=3.0, seed=11)
    r = fracns.pressure_hardy_ratio(u0, 1, 0.8)
    assert math.isfinite(r) and r > 0.0


def test_closed_forms():
    assert fracns.derivative_exponent(1.0, 2) == pytest.approx(4.0 / 3.0, abs=1e-14)
    lo, _ = fracns.dimension_bounds(0.75)
    assert lo == pytest.approx(3.0, abs=1e-14)


def test_field_io_roundtrip(tmp_path):
    u0 = fracns.make_initial("localized_bump", N, width=0.5)
    path = str(tmp_path / "u.fns")
    fracns.write_field(path, u0, s=0.85)
    arr, s = fracns.read_field(path)
    assert s == pytest.approx(0.85)
    assert np.array_equal(arr, u0)

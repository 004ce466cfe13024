"""Pseudo-spectral fractional Navier-Stokes toolkit (Python interface).

Scalar fields are ``(n, n, n)`` float64 arrays, vector fields ``(3, n, n, n)``,
both sampled on the uniform periodic lattice of a box of side ``L``
(default ``2 * pi``).
"""

from _fracns import (
    dimension_bounds,
    derivative_exponent,
    fractional_heat,
    fractional_laplacian,
    leray_project,
    make_initial,
    pressure_hardy_ratio,
    read_field,
    riesz_transform,
    simulate,
    solve_pressure,
    weak_lp_norm,
    write_field,
)

__all__ = [
    "dimension_bounds",
    "derivative_exponent",
    "fractional_heat",
    "fractional_laplacian",
    "leray_project",
    "make_initial",
    "pressure_hardy_ratio",
    "read_field",
    "riesz_transform",
    "simulate",
    "solve_pressure",
    "weak_lp_norm",
    "write_field",
]

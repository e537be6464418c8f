"""Exact test functions, the half-disk preset, and an independent
high-accuracy reference integrator (Romberg over trapezoid refinements,
sharing no panel logic with the production quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .engine import ApproachSequence
from .errors import OracleFailure
from .geometry import ApproachCurve, LuneDomain, ParametricCurve, validate_lune

__all__ = [
    "TestFunction",
    "Preset",
    "half_disk_preset",
    "figure_lune_polyline",
    "standard_test_functions",
    "get_test_function",
    "reference_integrate",
]


@dataclass(frozen=True)
class TestFunction:
    name: str
    value: Callable[[np.ndarray], np.ndarray]
    holomorphy_note: str
    stress: bool = False


@dataclass(frozen=True)
class Preset:
    name: str
    lune: LuneDomain
    gamma: ApproachCurve
    seq: ApproachSequence

    def validate(self, angle_tol: float = 0.1):
        return validate_lune(self.lune, self.gamma, angle_tol=angle_tol)


def half_disk_preset() -> Preset:
    """Right half-disk; data arc = vertical diameter traversed from i down
    to -i, complement = right unit semicircle from -i to i, approach curve
    gamma(t) = -t with pole schedule a_N = -1/N."""
    gamma_arc = ParametricCurve.segment(1j, -1j)
    complement = ParametricCurve.circle_arc(0.0, 1.0, -math.pi / 2, math.pi / 2)

    def gpoint(t):
        return -np.asarray(t, dtype=float) + 0.0j

    def gtangent(t):
        return np.zeros(np.shape(t), dtype=complex) - 1.0

    gamma = ApproachCurve(ParametricCurve(0.0, 1.0, gpoint, gtangent))
    lune = LuneDomain(gamma_arc=gamma_arc, complement_arc=complement)
    return Preset(name="half-disk", lune=lune, gamma=gamma,
                  seq=ApproachSequence(gamma=gamma, t_of=lambda n: 1.0 / max(n, 1)))


def figure_lune_polyline(n_per_arc: int = 256) -> LuneDomain:
    """Polyline approximation of an S-shaped two-arc data curve through the
    origin (two half-circles of radius 1/2 centered at +-i/2), closed by
    the right unit semicircle. Decorative preset; no smoothness claim at
    the joint."""
    th1 = np.linspace(math.pi / 2, 3 * math.pi / 2, n_per_arc)
    upper = 0.5j + 0.5 * np.exp(1j * th1)          # i -> 0, bulging left
    th2 = np.linspace(math.pi / 2, -math.pi / 2, n_per_arc)
    lower = -0.5j + 0.5 * np.exp(1j * th2)         # 0 -> -i, bulging right
    pts = np.concatenate([upper, lower[1:]])
    ts = np.linspace(0.0, 1.0, pts.size)
    gamma_arc = ParametricCurve.from_samples(ts, pts)
    complement = ParametricCurve.circle_arc(0.0, 1.0, -math.pi / 2, math.pi / 2)
    return LuneDomain(gamma_arc=gamma_arc, complement_arc=complement)


def standard_test_functions() -> list[TestFunction]:
    p = complex(-1.5, 0.5)
    p_hard = complex(-0.05, 1.02)
    return [
        TestFunction("one", lambda z: np.ones_like(np.asarray(z, dtype=complex)),
                     "entire"),
        TestFunction("identity", lambda z: np.asarray(z, dtype=complex),
                     "entire"),
        TestFunction("exp", lambda z: np.exp(np.asarray(z, dtype=complex)),
                     "entire"),
        TestFunction("inv_z_plus_2", lambda z: 1.0 / (np.asarray(z, dtype=complex) + 2.0),
                     "holomorphic off z = -2, well clear of the closed unit disk"),
        TestFunction("inv_pole_left", lambda z: 1.0 / (np.asarray(z, dtype=complex) - p),
                     "pole at -1.5+0.5i, outside the closed unit disk"),
        TestFunction("cubic", lambda z: (lambda w: w ** 3 - 2.0 * w + 1.0)(np.asarray(z, dtype=complex)),
                     "entire"),
        TestFunction("inv_pole_near_boundary",
                     lambda z: 1.0 / (np.asarray(z, dtype=complex) - p_hard),
                     "pole at -0.05+1.02i, just outside the unit circle", stress=True),
    ]


def get_test_function(name: str) -> TestFunction:
    for f in standard_test_functions():
        if f.name == name:
            return f
    raise KeyError(f"unknown test function {name!r}; "
                   f"choose from {[f.name for f in standard_test_functions()]}")


def reference_integrate(curve: ParametricCurve,
                        integrand: Callable[[np.ndarray], np.ndarray],
                        target_error: float,
                        max_rounds: int = 20) -> complex:
    """Romberg (Richardson-extrapolated trapezoid) contour integral of
    integrand(zeta) dzeta, refined until two successive diagonal entries
    agree within target_error. Raises OracleFailure otherwise.

    Independent of the production quadrature: no panels, no Gauss rules.
    """
    lo, hi = curve.param_range

    def samples(n: int) -> np.ndarray:
        t = np.linspace(lo, hi, n + 1)
        zeta = np.asarray(curve.point(t), dtype=complex)
        dz = np.asarray(curve.tangent(t), dtype=complex) + np.zeros_like(zeta)
        return np.asarray(integrand(zeta), dtype=complex) * dz

    n = 4
    h = (hi - lo) / n
    f = samples(n)
    row = [h * (0.5 * f[0] + np.sum(f[1:-1]) + 0.5 * f[-1])]
    prev_diag = row[0]
    for k in range(1, max_rounds + 1):
        n *= 2
        h *= 0.5
        f = samples(n)
        trap = h * (0.5 * f[0] + np.sum(f[1:-1]) + 0.5 * f[-1])
        new_row = [trap]
        pow4 = 1.0
        for r in row:
            pow4 *= 4.0
            new_row.append(new_row[-1] + (new_row[-1] - r) / (pow4 - 1.0))
        row = new_row
        diag = row[-1]
        change = abs(diag - prev_diag)
        if change < target_error:
            return complex(diag)
        prev_diag = diag
    raise OracleFailure(
        f"reference integrator did not reach {target_error:g} "
        f"after {max_rounds} refinement rounds (last change {change:g})")

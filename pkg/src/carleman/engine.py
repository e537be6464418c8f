"""Continuation engine: damped-kernel boundary integrals over the data arc,
full-boundary and tail cross-checks, contraction ratios, amplification
diagnostics, and the convergence study orchestration.

The reconstruction of u at z from data on the arc gamma_arc is

    u_N(z) = integral over gamma_arc of C_N(zeta, z) u0(zeta) dzeta,

with C_N the damped Cauchy kernel of order N and pole a_N on the approach
curve. The tail integral over the complement arc measures exactly what the
finite-N reconstruction is missing, and the amplification factor measures
how violently the kernel magnifies data noise (the ill-posedness of the
problem in computable form).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .geometry import ApproachCurve, Disk, LuneDomain, ParametricCurve, in_covering_disk, _param_nearest_origin
from .kernels import carleman_log_nodes, kernel_log_magnitude
from .quadrature import IntegralEstimate, QuadratureConfig, integrate_contour

__all__ = [
    "ApproachSequence",
    "BoundaryData",
    "PerOrderRecord",
    "ContinuationResult",
    "carleman_approximation",
    "full_boundary_check",
    "tail_integral",
    "contraction_ratio",
    "limit_contraction_ratio",
    "amplification_factor",
    "run_convergence_study",
    "with_noise",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class ApproachSequence:
    """Pole schedule a_N = gamma(t_of(N)); default t_N = 1/N, with the
    order-0 kernel sharing the N = 1 pole."""

    gamma: ApproachCurve
    t_of: Callable[[int], float] = lambda n: 1.0 / max(n, 1)

    def pole(self, order: int) -> complex:
        if order < 0:
            raise DomainError("kernel order must be nonnegative")
        t = self.t_of(order)
        lo, hi = self.gamma.curve.param_range
        if not lo <= t <= hi:
            raise DomainError(f"t_of({order}) = {t} leaves the approach curve range")
        return complex(self.gamma.point(t))

    def covering_disk(self, order: int) -> Disk:
        c = self.pole(order)
        return Disk(center=c, radius=1.0 - abs(c))


@dataclass(frozen=True)
class BoundaryData:
    """Boundary values of the target function.

    Analytic test data carries an evaluator over zeta (usable on any arc,
    which is what enables the full-boundary and tail cross-checks).
    Tabulated data is linear interpolation in the data arc's parameter and
    is only usable on that arc.
    """

    provenance: str  # "analytic-test-function" | "tabulated-with-linear-interpolation"
    evaluator: Callable[[np.ndarray], np.ndarray] | None = None
    table_t: np.ndarray | None = None
    table_u: np.ndarray | None = None
    extra_noise: Callable[[np.ndarray], np.ndarray] | None = None
    noise_level: float = 0.0

    @staticmethod
    def from_function(f: Callable[[np.ndarray], np.ndarray]) -> "BoundaryData":
        return BoundaryData(provenance="analytic-test-function", evaluator=f)

    @staticmethod
    def from_table(ts: Sequence[float], us: Sequence[complex]) -> "BoundaryData":
        ts = np.asarray(ts, dtype=float)
        us = np.asarray(us, dtype=complex)
        if ts.size < 2 or ts.shape != us.shape:
            raise DomainError("tabulated data needs >= 2 matching samples")
        if not np.all(np.diff(ts) > 0):
            raise DomainError("tabulated parameters must be strictly increasing")
        return BoundaryData(provenance="tabulated-with-linear-interpolation",
                            table_t=ts, table_u=us)

    @property
    def analytic(self) -> bool:
        return self.provenance == "analytic-test-function"

    def check_covers(self, curve: ParametricCurve) -> None:
        if self.analytic:
            return
        lo, hi = curve.param_range
        if self.table_t[0] > lo + 1e-12 or self.table_t[-1] < hi - 1e-12:
            raise DomainError(
                f"tabulated data covers [{self.table_t[0]}, {self.table_t[-1]}] "
                f"but the data arc parameter range is [{lo}, {hi}]")

    def values(self, zeta: np.ndarray, t: np.ndarray) -> np.ndarray:
        if self.analytic:
            u = np.asarray(self.evaluator(zeta), dtype=complex) + np.zeros(np.shape(zeta), dtype=complex)
        else:
            t = np.asarray(t, dtype=float)
            u = (np.interp(t, self.table_t, self.table_u.real)
                 + 1j * np.interp(t, self.table_t, self.table_u.imag))
        if self.extra_noise is not None:
            u = u + self.extra_noise(zeta)
        return u


def _splitmix64(x: np.ndarray) -> np.ndarray:
    x = (x + np.uint64(0x9E3779B97F4A7C15)).astype(np.uint64)
    x ^= x >> np.uint64(30)
    x = (x * np.uint64(0xBF58476D1CE4E5B9)).astype(np.uint64)
    x ^= x >> np.uint64(27)
    x = (x * np.uint64(0x94D049BB133111EB)).astype(np.uint64)
    x ^= x >> np.uint64(31)
    return x


def with_noise(data: BoundaryData, delta: float, seed: int) -> BoundaryData:
    """Perturb boundary values by delta * e^{i phi(zeta)} with a phase drawn
    deterministically from the bits of zeta and the seed, so the perturbation
    is independent of evaluation order."""

    def perturbation(zeta: np.ndarray) -> np.ndarray:
        flat = np.ascontiguousarray(np.atleast_1d(zeta).astype(np.complex128))
        bits = flat.view(np.uint64).reshape(-1, 2)
        with np.errstate(over="ignore"):
            h = _splitmix64(bits[:, 0] ^ _splitmix64(bits[:, 1] ^ np.uint64(seed)))
        u = h.astype(np.float64) / 2.0 ** 64
        n = delta * np.exp(2j * math.pi * u)
        return n.reshape(np.shape(zeta))

    return BoundaryData(provenance=data.provenance, evaluator=data.evaluator,
                        table_t=data.table_t, table_u=data.table_u,
                        extra_noise=perturbation, noise_level=abs(delta))


class _KernelIntegrand:
    """C_N(zeta, z) * u(zeta) in polar-log form, for the quadrature engine."""

    def __init__(self, z: complex, pole: complex, order: int, data: BoundaryData):
        self.z = complex(z)
        self.pole = complex(pole)
        self.order = int(order)
        self.data = data
        # pointwise data uncertainty relative to the integrand magnitude;
        # quadrature cannot (and should not try to) resolve below this
        self.relative_floor = data.noise_level

    def log_values(self, zeta: np.ndarray, t: np.ndarray):
        lm, ph = carleman_log_nodes(zeta, self.z, self.pole, self.order)
        u = self.data.values(zeta, t)
        with np.errstate(divide="ignore"):
            lm = lm + np.log(np.abs(u))
        return lm, ph + np.angle(u)


def _corner_params(curve: ParametricCurve) -> tuple[float, ...]:
    """Parameters where the curve touches the origin (where poles accumulate)."""
    t, dist = _param_nearest_origin(curve)
    return (t,) if dist < 1e-9 else ()


def _grading_levels(config: QuadratureConfig, order: int) -> int:
    return max(config.grading.levels, math.ceil(order / 4))


def _require_interior(lune: LuneDomain, z: complex) -> None:
    if not lune.contains(z):
        raise DomainError(f"z = {z!r} is not an interior point of the lune")


def _arc_integral(curve: ParametricCurve, z, pole, order, data, config) -> IntegralEstimate:
    cfg = config.with_corners(_corner_params(curve), levels=_grading_levels(config, order))
    return integrate_contour(curve, _KernelIntegrand(z, pole, order, data), cfg)


@dataclass(frozen=True)
class ApproximationRecord:
    u_N: complex
    quadrature_error: float
    overflow_panels: int
    converged: bool
    in_disk: bool


def carleman_approximation(lune: LuneDomain, u0: BoundaryData, seq: ApproachSequence,
                           order: int, z: complex,
                           config: QuadratureConfig | None = None) -> ApproximationRecord:
    """Finite-order reconstruction u_N(z) from data on the data arc only."""
    config = config or QuadratureConfig()
    _require_interior(lune, z)
    u0.check_covers(lune.gamma_arc)
    a = seq.pole(order)
    est = _arc_integral(lune.gamma_arc, z, a, order, u0, config)
    return ApproximationRecord(
        u_N=est.value,
        quadrature_error=est.error_estimate,
        overflow_panels=est.overflow_panels,
        converged=est.converged,
        in_disk=in_covering_disk(seq.covering_disk(order), z),
    )


def full_boundary_check(lune: LuneDomain, u: BoundaryData, seq: ApproachSequence,
                        order: int, z: complex,
                        config: QuadratureConfig | None = None) -> IntegralEstimate:
    """Damped-kernel integral over the whole boundary; equals u(z) up to
    quadrature error for every order, since the damping factor is
    holomorphic on the closed lune and equals 1 at zeta = z.

    Requires analytic data (values on both arcs)."""
    config = config or QuadratureConfig()
    _require_interior(lune, z)
    if not u.analytic:
        raise DomainError("full-boundary check needs data on both arcs (analytic test data)")
    a = seq.pole(order)
    e1 = _arc_integral(lune.gamma_arc, z, a, order, u, config)
    e2 = _arc_integral(lune.complement_arc, z, a, order, u, config)
    return IntegralEstimate(
        value=e1.log_value.add(e2.log_value).to_complex(),
        error_estimate=e1.error_estimate + e2.error_estimate,
        panels_used=e1.panels_used + e2.panels_used,
        overflow_panels=e1.overflow_panels + e2.overflow_panels,
        converged=e1.converged and e2.converged,
        log_value=e1.log_value.add(e2.log_value),
        log_abs_integral=max(e1.log_abs_integral, e2.log_abs_integral),
    )


def tail_integral(lune: LuneDomain, u: BoundaryData, seq: ApproachSequence,
                  order: int, z: complex,
                  config: QuadratureConfig | None = None) -> IntegralEstimate:
    """Damped-kernel integral over the complement arc; the exact discrepancy
    u(z) - u_N(z), vanishing geometrically once the contraction ratio drops
    below 1. Requires analytic data."""
    config = config or QuadratureConfig()
    _require_interior(lune, z)
    if not u.analytic:
        raise DomainError("tail integral needs data on the complement arc (analytic test data)")
    a = seq.pole(order)
    return _arc_integral(lune.complement_arc, z, a, order, u, config)


def _refine_max(f: Callable[[float], float], t: np.ndarray, vals: np.ndarray) -> float:
    """Golden-section refinement of max f around the best sample."""
    i = int(np.argmax(vals))
    a = t[max(i - 1, 0)]
    b = t[min(i + 1, len(t) - 1)]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(60):
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = f(d)
    tm = 0.5 * (a + b)
    return max(float(np.max(vals)), f(tm))


def contraction_ratio(z: complex, complement_arc: ParametricCurve, a_N: complex,
                      samples: int = 2048) -> float:
    """q_N(z) = max over the complement arc of |z - a_N| / |zeta - a_N|."""
    z, a_N = complex(z), complex(a_N)
    num = abs(z - a_N)
    if num == 0.0:
        return 0.0
    t = np.linspace(complement_arc.t_min, complement_arc.t_max, samples)
    zeta = np.asarray(complement_arc.point(t), dtype=complex)
    vals = num / np.abs(zeta - a_N)

    def f(tt: float) -> float:
        return num / abs(complex(complement_arc.point(tt)) - a_N)

    return _refine_max(f, t, vals)


def limit_contraction_ratio(z: complex, complement_arc: ParametricCurve,
                            samples: int = 2048) -> float:
    """The unshifted ratio max |z|/|zeta| over the complement arc (the
    a_N -> 0 limit of contraction_ratio)."""
    t = np.linspace(complement_arc.t_min, complement_arc.t_max, samples)
    zeta = np.asarray(complement_arc.point(t), dtype=complex)
    num = abs(complex(z))

    def f(tt: float) -> float:
        return num / abs(complex(complement_arc.point(tt)))

    return _refine_max(f, t, num / np.abs(zeta))


def amplification_factor(gamma_arc: ParametricCurve, z: complex, a_N: complex,
                         order: int, samples: int = 2048) -> float:
    """log of the max kernel magnitude on the data arc. Data noise of size
    delta perturbs u_N by at most arclength(data arc) * delta * exp(result)."""
    z, a_N = complex(z), complex(a_N)
    if z == a_N:
        return -math.inf
    t = np.linspace(gamma_arc.t_min, gamma_arc.t_max, samples)
    zeta = np.asarray(gamma_arc.point(t), dtype=complex)
    lm, _ = carleman_log_nodes(zeta, z, a_N, order)

    def f(tt: float) -> float:
        return kernel_log_magnitude(complex(gamma_arc.point(tt)), z, a_N, order)

    return _refine_max(f, t, lm)


@dataclass(frozen=True)
class PerOrderRecord:
    N: int
    u_N: complex
    quadrature_error: float
    q_N: float
    q_limit: float
    tail_abs: float | None
    M_N_log: float
    overflow_panels: int
    in_disk: bool
    converged: bool
    abs_err: float | None


@dataclass(frozen=True)
class ContinuationResult:
    z: complex
    per_N: tuple[PerOrderRecord, ...] = ()
    error: str | None = None

    @property
    def best_N(self) -> int | None:
        usable = [r for r in self.per_N if r.abs_err is not None and math.isfinite(r.abs_err)]
        if not usable:
            return None
        return min(usable, key=lambda r: r.abs_err).N


def _study_point(lune: LuneDomain, u0: BoundaryData, exact, seq: ApproachSequence,
                 z: complex, N_set: Sequence[int], config: QuadratureConfig) -> ContinuationResult:
    try:
        _require_interior(lune, z)
        u0.check_covers(lune.gamma_arc)
    except DomainError as exc:
        return ContinuationResult(z=z, error=str(exc))
    exact_value = complex(exact(np.asarray([z]))[0]) if exact is not None else None
    records = []
    for order in N_set:
        a = seq.pole(order)
        approx = carleman_approximation(lune, u0, seq, order, z, config)
        tail_abs = None
        if u0.analytic:
            tail_abs = abs(tail_integral(lune, u0, seq, order, z, config).value)
        abs_err = None
        if exact_value is not None:
            abs_err = abs(approx.u_N - exact_value)
        records.append(PerOrderRecord(
            N=order,
            u_N=approx.u_N,
            quadrature_error=approx.quadrature_error,
            q_N=contraction_ratio(z, lune.complement_arc, a),
            q_limit=limit_contraction_ratio(z, lune.complement_arc),
            tail_abs=tail_abs,
            M_N_log=amplification_factor(lune.gamma_arc, z, a, order),
            overflow_panels=approx.overflow_panels,
            in_disk=approx.in_disk,
            converged=approx.converged,
            abs_err=abs_err,
        ))
    return ContinuationResult(z=z, per_N=tuple(records))


def run_convergence_study(lune: LuneDomain, u0: BoundaryData,
                          exact: Callable[[np.ndarray], np.ndarray] | None,
                          seq: ApproachSequence,
                          z_set: Sequence[complex], N_set: Sequence[int],
                          config: QuadratureConfig | None = None,
                          parallel: bool = False) -> list[ContinuationResult]:
    """Per-z, per-order trajectory of the reconstruction with all
    diagnostics. Individual failures (z outside the lune, non-convergence)
    are recorded in the result, never raised.

    Each (z, N) task is pure and the final ordering is by position in z_set,
    so parallel and serial runs produce identical results."""
    config = config or QuadratureConfig()
    ts = [seq.t_of(n) for n in sorted(set(N_set))]
    if any(b >= a for a, b in zip(ts, ts[1:])):
        raise DomainError("pole schedule t_of must be strictly decreasing in N")
    if parallel:
        with ThreadPoolExecutor() as pool:
            futures = [pool.submit(_study_point, lune, u0, exact, seq, z, list(N_set), config)
                       for z in z_set]
            return [f.result() for f in futures]
    return [_study_point(lune, u0, exact, seq, z, list(N_set), config) for z in z_set]

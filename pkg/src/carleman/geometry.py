"""Parametric curves, lune domains, approach curves and covering disks.

Points in the plane are represented as Python/numpy ``complex`` values
throughout; all curve evaluators accept scalars or numpy arrays of
parameters and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError

__all__ = [
    "ParametricCurve",
    "ApproachCurve",
    "LuneDomain",
    "Disk",
    "LuneDiagnostics",
    "approach_disk",
    "covering_parameter",
    "default_t_grid",
    "in_covering_disk",
    "validate_lune",
    "winding_number",
]

_ENDPOINT_TOL = 1e-12


def _require_finite(z: complex, what: str = "point") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise DomainError(f"{what} has non-finite components: {z!r}")
    return z


@dataclass(frozen=True)
class ParametricCurve:
    """A smooth (or piecewise-linear) planar curve t -> point(t).

    ``point`` and ``tangent`` must accept scalar or ndarray parameters.
    For polyline curves the tangent is the chord direction of the segment
    containing t.
    """

    t_min: float
    t_max: float
    point: Callable[[np.ndarray | float], np.ndarray | complex]
    tangent: Callable[[np.ndarray | float], np.ndarray | complex]
    descriptor: str = "analytic-preset"

    def __post_init__(self) -> None:
        if not self.t_min < self.t_max:
            raise DomainError(f"empty parameter range [{self.t_min}, {self.t_max}]")

    @property
    def param_range(self) -> tuple[float, float]:
        return (self.t_min, self.t_max)

    def start(self) -> complex:
        return complex(self.point(self.t_min))

    def end(self) -> complex:
        return complex(self.point(self.t_max))

    def sample(self, n: int, *, offset: float = 0.0) -> np.ndarray:
        """n points along the curve; offset in (0,1) shifts nodes off the endpoints."""
        t = np.linspace(self.t_min, self.t_max, n, endpoint=offset == 0.0)
        if offset:
            step = (self.t_max - self.t_min) / n
            t = self.t_min + (np.arange(n) + offset) * step
        return np.asarray(self.point(t), dtype=complex)

    @staticmethod
    def segment(z0: complex, z1: complex) -> "ParametricCurve":
        z0, z1 = complex(z0), complex(z1)
        d = z1 - z0

        def point(t):
            return z0 + d * np.asarray(t, dtype=float)

        def tangent(t):
            return np.full_like(np.asarray(t, dtype=float), 0.0) + d

        return ParametricCurve(0.0, 1.0, point, tangent)

    @staticmethod
    def circle_arc(center: complex, radius: float, theta0: float, theta1: float) -> "ParametricCurve":
        center = complex(center)
        if theta1 <= theta0:
            raise DomainError("circle_arc needs theta1 > theta0")

        def point(t):
            return center + radius * np.exp(1j * np.asarray(t, dtype=float))

        def tangent(t):
            return 1j * radius * np.exp(1j * np.asarray(t, dtype=float))

        return ParametricCurve(theta0, theta1, point, tangent)

    @staticmethod
    def from_samples(ts: Sequence[float], zs: Sequence[complex]) -> "ParametricCurve":
        """Piecewise-linear curve through (t, z) samples; chord tangents."""
        ts = np.asarray(ts, dtype=float)
        zs = np.asarray(zs, dtype=complex)
        if ts.ndim != 1 or ts.size < 2 or ts.shape != zs.shape:
            raise DomainError("need at least 2 samples with matching shapes")
        if not np.all(np.diff(ts) > 0):
            raise DomainError("sample parameters must be strictly increasing")
        if not np.all(np.isfinite(zs.view(float))):
            raise DomainError("non-finite sample point")
        chords = np.diff(zs) / np.diff(ts)

        def point(t):
            t = np.asarray(t, dtype=float)
            return np.interp(t, ts, zs.real) + 1j * np.interp(t, ts, zs.imag)

        def tangent(t):
            t = np.asarray(t, dtype=float)
            idx = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, len(chords) - 1)
            return chords[idx]

        return ParametricCurve(float(ts[0]), float(ts[-1]), point, tangent,
                               descriptor="polyline-from-samples")


@dataclass(frozen=True)
class ApproachCurve:
    """Curve gamma with gamma(0) = 0 running from the origin into the disk,
    staying off the closure of the lune (checked by the lune validator, not here).
    """

    curve: ParametricCurve

    def __post_init__(self) -> None:
        if self.curve.t_min != 0.0:
            raise DomainError("approach curve parameter range must start at 0")
        if abs(self.curve.start()) > _ENDPOINT_TOL:
            raise DomainError("approach curve must start at the origin")

    def point(self, t):
        return self.curve.point(t)

    @property
    def t_max(self) -> float:
        return self.curve.t_max


@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def __post_init__(self) -> None:
        _require_finite(self.center, "disk center")
        if self.radius < 0:
            raise DomainError("disk radius must be nonnegative")


@dataclass(frozen=True)
class LuneDomain:
    """Sub-domain of the unit disk bounded by a data arc and its complement.

    Traversing gamma_arc then complement_arc runs the full boundary with
    positive orientation (domain on the left).
    """

    gamma_arc: ParametricCurve
    complement_arc: ParametricCurve

    def boundary_arcs(self) -> tuple[ParametricCurve, ParametricCurve]:
        return (self.gamma_arc, self.complement_arc)

    def boundary_samples(self, n: int = 4096) -> np.ndarray:
        # half-offset keeps nodes off arc endpoints (the origin may sit there)
        half = n // 2
        return np.concatenate([
            self.gamma_arc.sample(half, offset=0.5),
            self.complement_arc.sample(n - half, offset=0.5),
        ])

    def winding(self, z: complex, n: int = 4096) -> float:
        return winding_number(self.boundary_samples(n), z)

    def contains(self, z: complex, n: int = 4096) -> bool:
        """Winding-number interior test; points on the boundary report False."""
        pts = self.boundary_samples(n)
        if np.min(np.abs(pts - z)) < 1e-9:
            return False
        return abs(self.winding(z, n)) > 0.5


def winding_number(points: np.ndarray, z: complex) -> float:
    """Total argument change of the closed polygon through ``points`` around z,
    in full turns."""
    d = points - z
    if np.min(np.abs(d)) == 0.0:
        raise DomainError("winding number undefined at a boundary vertex")
    rolled = np.roll(d, -1)
    return float(np.sum(np.angle(rolled / d)) / (2.0 * math.pi))


def approach_disk(gamma: ApproachCurve, t: float) -> Disk:
    """Covering disk centered at gamma(t) touching the unit circle."""
    if not (gamma.curve.t_min <= t <= gamma.curve.t_max):
        raise DomainError(f"t={t} outside parameter range {gamma.curve.param_range}")
    c = complex(gamma.point(t))
    return Disk(center=c, radius=1.0 - abs(c))


def in_covering_disk(d: Disk, z: complex) -> bool:
    return abs(z - d.center) < d.radius


def default_t_grid(k_max: int = 200) -> np.ndarray:
    """Descending grid 1, 1/2, ..., 1/(k_max+1)."""
    return 1.0 / (np.arange(k_max + 1) + 1.0)


def covering_parameter(gamma: ApproachCurve, z: complex,
                       t_grid: Sequence[float] | None = None) -> float | None:
    """First grid parameter whose covering disk contains z; None if the grid
    never reaches small enough t. Requires |z| < 1."""
    if abs(z) >= 1.0:
        raise DomainError(f"|z| = {abs(z)} >= 1; covering disks never reach z")
    if t_grid is None:
        t_grid = default_t_grid()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.size == 0:
        raise DomainError("empty t_grid")
    lo, hi = gamma.curve.param_range
    if np.any(t_grid < lo) or np.any(t_grid > hi):
        raise DomainError("t_grid leaves the approach curve's parameter range")
    for t in t_grid:
        if in_covering_disk(approach_disk(gamma, float(t)), z):
            return float(t)
    return None


@dataclass(frozen=True)
class LuneDiagnostics:
    closure_ok: bool
    gamma_in_disk: bool
    transversality_checked: bool
    transversality_angle: float | None
    transversality_ok: bool
    origin_outside: bool
    origin_winding: float
    origin_inconclusive: bool
    messages: tuple[str, ...] = field(default_factory=tuple)

    @property
    def all_ok(self) -> bool:
        return (self.closure_ok and self.gamma_in_disk and self.origin_outside
                and (self.transversality_ok or not self.transversality_checked))


def _param_nearest_origin(curve: ParametricCurve, n: int = 4097) -> tuple[float, float]:
    """(t*, |curve(t*)|) minimizing distance to the origin, golden-refined."""
    t = np.linspace(curve.t_min, curve.t_max, n)
    r = np.abs(np.asarray(curve.point(t), dtype=complex))
    i = int(np.argmin(r))
    lo = t[max(i - 1, 0)]
    hi = t[min(i + 1, n - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = abs(complex(curve.point(c))), abs(complex(curve.point(d)))
    for _ in range(80):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = abs(complex(curve.point(c)))
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = abs(complex(curve.point(d)))
    tm = 0.5 * (a + b)
    return float(tm), abs(complex(curve.point(tm)))


def _line_angle(u: complex, v: complex) -> float:
    """Unsigned angle between the lines spanned by u and v, in [0, pi/2]."""
    cross = abs(u.real * v.imag - u.imag * v.real)
    dot = abs(u.real * v.real + u.imag * v.imag)
    return math.atan2(cross, dot)


def validate_lune(lune: LuneDomain, gamma: ApproachCurve,
                  angle_tol: float = 0.1, n_boundary: int = 4096) -> LuneDiagnostics:
    """Diagnostics record for a candidate lune: boundary closure, data arc
    inside the closed unit disk, transversality of the data arc and the
    approach curve at the origin, and the origin lying outside the domain.
    """
    msgs: list[str] = []
    g, c = lune.gamma_arc, lune.complement_arc

    closure_ok = (abs(g.end() - c.start()) <= _ENDPOINT_TOL
                  and abs(c.end() - g.start()) <= _ENDPOINT_TOL)
    if not closure_ok:
        msgs.append(
            f"boundary not closed: gaps {abs(g.end() - c.start()):.3e}, "
            f"{abs(c.end() - g.start()):.3e}")

    r = np.abs(g.sample(2048))
    gamma_in_disk = bool(np.max(r) <= 1.0 + 1e-12)
    if not gamma_in_disk:
        msgs.append(f"data arc leaves the closed unit disk (max |z| = {np.max(r):.6f})")

    # transversality only applies when both curves pass through the origin
    t_star, dist = _param_nearest_origin(g)
    checked = dist <= 1e-7 and abs(complex(gamma.point(0.0))) <= _ENDPOINT_TOL
    angle: float | None = None
    trans_ok = True
    if checked:
        tg = complex(g.tangent(t_star))
        ta = complex(gamma.curve.tangent(gamma.curve.t_min))
        angle = _line_angle(tg, ta)
        trans_ok = angle >= angle_tol
        if not trans_ok:
            msgs.append(f"curves nearly tangent at origin (angle {angle:.3e} rad)")
    else:
        msgs.append("transversality check skipped: curves do not meet at the origin")

    w = winding_number(lune.boundary_samples(n_boundary), 0.0)
    # on-boundary origin yields |w| near 1/2; clearly interior yields |w| near 1
    origin_outside = abs(w) < 0.55
    inconclusive = 0.55 <= abs(w) <= 0.95
    if not origin_outside:
        kind = "inconclusive" if inconclusive else "inside the lune"
        msgs.append(f"origin test {kind} (winding {w:.4f})")

    return LuneDiagnostics(
        closure_ok=closure_ok,
        gamma_in_disk=gamma_in_disk,
        transversality_checked=checked,
        transversality_angle=angle,
        transversality_ok=trans_ok,
        origin_outside=origin_outside,
        origin_winding=w,
        origin_inconclusive=inconclusive,
        messages=tuple(msgs),
    )

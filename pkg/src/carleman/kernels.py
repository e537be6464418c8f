"""Damped Cauchy ("Carleman") kernels in series-difference, product, and
overflow-safe log-magnitude forms, plus Laurent partial sums of the Cauchy
kernel.

The kernel of order N with pole a is

    C_N(zeta, z) = (1/(2 pi i)) * (1/(zeta - z)) * ((z - a)/(zeta - a))^(N+1)
                 = (1/(2 pi i)) * (1/(zeta - z) - sum_{k=0}^N (z-a)^k/(zeta-a)^{k+1})

and both forms are exposed; all carleman_* functions include the 1/(2 pi i)
prefactor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import _accel
from .errors import SingularityError

__all__ = [
    "LogComplex",
    "cauchy_kernel",
    "laurent_partial_sum",
    "carleman_difference",
    "carleman_product",
    "carleman_product_log",
    "kernel_log_magnitude",
    "carleman_log_nodes",
    "SINGULARITY_RADIUS",
    "LOG_OVERFLOW",
]

TWO_PI = 2.0 * math.pi
INV_2PI_I = 1.0 / (2.0j * math.pi)

# inputs closer than this to a pole are treated as misuse, not evaluated
SINGULARITY_RADIUS = 1e-14
# log-magnitude beyond which a double overflows
LOG_OVERFLOW = 700.0
# switch the power to log-domain evaluation above this exponent*|log ratio|
_LOG_POWER_SWITCH = 60.0


def _wrap_phase(p: float) -> float:
    """Reduce to (-pi, pi]."""
    p = math.remainder(p, TWO_PI)
    if p <= -math.pi:
        p += TWO_PI
    return p


@dataclass(frozen=True)
class LogComplex:
    """A complex value stored as (log magnitude, phase); log_mag = -inf is zero."""

    log_mag: float
    phase: float

    @staticmethod
    def from_complex(v: complex) -> "LogComplex":
        v = complex(v)
        if v == 0:
            return LogComplex(-math.inf, 0.0)
        return LogComplex(math.log(abs(v)), cmath.phase(v))

    @staticmethod
    def zero() -> "LogComplex":
        return LogComplex(-math.inf, 0.0)

    def to_complex(self) -> complex:
        if self.log_mag == -math.inf:
            return 0.0 + 0.0j
        if self.log_mag > LOG_OVERFLOW:
            return cmath.rect(math.inf, self.phase)
        return cmath.exp(complex(self.log_mag, self.phase))

    @property
    def overflows(self) -> bool:
        return self.log_mag > LOG_OVERFLOW

    def mul(self, other: "LogComplex") -> "LogComplex":
        if self.log_mag == -math.inf or other.log_mag == -math.inf:
            return LogComplex.zero()
        return LogComplex(self.log_mag + other.log_mag,
                          _wrap_phase(self.phase + other.phase))

    def pow(self, n: int) -> "LogComplex":
        if self.log_mag == -math.inf:
            return LogComplex.zero() if n > 0 else LogComplex(0.0, 0.0)
        return LogComplex(n * self.log_mag, _wrap_phase(n * self.phase))

    def add(self, other: "LogComplex") -> "LogComplex":
        """Sum with rescaling to the larger magnitude; exact when both finite."""
        a, b = self, other
        if a.log_mag < b.log_mag:
            a, b = b, a
        if a.log_mag == -math.inf:
            return LogComplex.zero()
        d = b.log_mag - a.log_mag
        scale = math.exp(d) if d > -745.0 else 0.0
        s = cmath.exp(1j * a.phase) + scale * cmath.exp(1j * b.phase)
        if s == 0:
            return LogComplex.zero()
        return LogComplex(a.log_mag + math.log(abs(s)), cmath.phase(s))

    def abs_diff(self, other: "LogComplex") -> float:
        """log |self - other|."""
        return self.add(LogComplex(other.log_mag, _wrap_phase(other.phase + math.pi))).log_mag


def _check_separation(zeta: complex, *poles: complex) -> None:
    for p in poles:
        if abs(zeta - p) < SINGULARITY_RADIUS:
            raise SingularityError(f"evaluation point {zeta!r} coincides with pole {p!r}")


def cauchy_kernel(zeta: complex, z: complex) -> complex:
    """1 / (2 pi i (zeta - z))."""
    zeta, z = complex(zeta), complex(z)
    _check_separation(zeta, z)
    return INV_2PI_I / (zeta - z)


def laurent_partial_sum(zeta: complex, z: complex, a: complex, order: int) -> complex:
    """sum_{k=0}^{order} (z-a)^k / (zeta-a)^{k+1}, Horner in (z-a)/(zeta-a)."""
    zeta, z, a = complex(zeta), complex(z), complex(a)
    if order < 0:
        raise ValueError("order must be >= 0")
    _check_separation(zeta, a)
    r = (z - a) / (zeta - a)
    acc = 1.0 + 0.0j
    for _ in range(order):
        acc = 1.0 + r * acc
    return acc / (zeta - a)


def carleman_difference(zeta: complex, z: complex, a: complex, order: int) -> complex:
    """Series-difference form: (1/(2 pi i)) (Cauchy kernel minus its Laurent
    partial sum about a). Numerically useful only while the two terms are
    comparable; the product form is the stable one."""
    zeta, z, a = complex(zeta), complex(z), complex(a)
    _check_separation(zeta, z, a)
    return INV_2PI_I * (1.0 / (zeta - z) - laurent_partial_sum(zeta, z, a, order))


def carleman_product_log(zeta: complex, z: complex, a: complex, order: int) -> LogComplex:
    """Product form evaluated entirely in the log domain; never overflows."""
    zeta, z, a = complex(zeta), complex(z), complex(a)
    _check_separation(zeta, z, a)
    if z == a:
        return LogComplex.zero()
    base = LogComplex.from_complex((z - a) / (zeta - a))
    front = LogComplex.from_complex(INV_2PI_I / (zeta - z))
    return front.mul(base.pow(order + 1))


def carleman_product(zeta: complex, z: complex, a: complex, order: int) -> complex:
    """Product form: (1/(2 pi i)) (1/(zeta-z)) ((z-a)/(zeta-a))^(order+1).

    Large exponents are routed through the log domain; a result whose
    magnitude exceeds double range comes back as complex infinity (use
    carleman_product_log to inspect it).
    """
    zeta, z, a = complex(zeta), complex(z), complex(a)
    _check_separation(zeta, z, a)
    if z == a:
        return 0.0 + 0.0j
    ratio = (z - a) / (zeta - a)
    n1 = order + 1
    if n1 * abs(math.log(abs(ratio))) > _LOG_POWER_SWITCH:
        lc = carleman_product_log(zeta, z, a, order)
        if lc.overflows:
            return cmath.rect(math.inf, lc.phase)
        return lc.to_complex()
    return INV_2PI_I / (zeta - z) * ratio ** n1


def kernel_log_magnitude(zeta: complex, z: complex, a: complex, order: int) -> float:
    """log |carleman_product|, exact in the log domain (-inf at z = a)."""
    zeta, z, a = complex(zeta), complex(z), complex(a)
    _check_separation(zeta, z, a)
    if z == a:
        return -math.inf
    return (-math.log(TWO_PI) - math.log(abs(zeta - z))
            + (order + 1) * (math.log(abs(z - a)) - math.log(abs(zeta - a))))


def carleman_log_nodes(zeta: np.ndarray, z: complex, a: complex,
                       order: int) -> tuple[np.ndarray, np.ndarray]:
    """(log-magnitude, phase) arrays of the product-form kernel over a node
    array; the hot path used by the quadrature engine."""
    zeta = np.ascontiguousarray(zeta, dtype=np.complex128)
    return _accel.carleman_log_nodes(zeta, complex(z), complex(a), float(order))

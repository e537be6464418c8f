"""Hot numeric kernels: log-form Carleman kernel evaluation over node arrays
and the scaled panel reductions used by the contour quadrature.

Two interchangeable implementations live here: plain numpy, and numba
``@njit`` loops. Selection happens once at import time via the environment
variable ``CARLEMAN_NUMBA`` ("0" forces the numpy fallback; anything else,
or unset, uses numba when importable). ``benchmarks/bench_kernels.py``
compares the two lanes.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = [
    "USE_NUMBA",
    "carleman_log_nodes",
    "scaled_phase_sum",
    "scaled_abs_sum",
]

_LOG_TWO_PI = math.log(2.0 * math.pi)
_HALF_PI = 0.5 * math.pi
_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------- numpy lane

def _carleman_log_nodes_np(zeta, z, a, order):
    """(log-magnitude, phase) of the damped Cauchy kernel
    (1/(2 pi i)) * (1/(zeta-z)) * ((z-a)/(zeta-a))^(order+1) at each node."""
    dz = zeta - z
    da = zeta - a
    w = z - a
    p = order + 1.0
    if w == 0.0:
        logmag = np.full(zeta.shape, -np.inf)
        phase = np.zeros(zeta.shape)
        return logmag, phase
    logmag = (-_LOG_TWO_PI - np.log(np.abs(dz))
              + p * (math.log(abs(w)) - np.log(np.abs(da))))
    phase = (-_HALF_PI - np.angle(dz)
             + p * (math.atan2(w.imag, w.real) - np.angle(da)))
    phase = np.remainder(phase + math.pi, _TWO_PI) - math.pi
    return logmag, phase


def _pairwise_np(vals):
    # balanced adjacent-pair tree; same shape as the numba lane's reduction
    v = vals.copy()
    n = v.shape[0]
    while n > 1:
        half = n // 2
        v[:half] = v[:2 * half:2] + v[1:2 * half:2]
        if n % 2:
            v[half] = v[n - 1]
            n = half + 1
        else:
            n = half
    return v[0]


def _scaled_phase_sum_np(logmag, phase):
    """Sum of exp(logmag)*e^{i*phase} factored as (m, s) with the true sum
    equal to exp(m)*s; m is the max finite log-magnitude (-inf if none)."""
    m = np.max(logmag)
    if not np.isfinite(m):
        return -np.inf, 0.0 + 0.0j
    s = _pairwise_np(np.exp(logmag - m) * (np.cos(phase) + 1j * np.sin(phase)))
    return float(m), complex(s)


def _scaled_abs_sum_np(logmag):
    m = np.max(logmag)
    if not np.isfinite(m):
        return -np.inf, 0.0
    return float(m), float(_pairwise_np(np.exp(logmag - m)))


# ---------------------------------------------------------------- numba lane

def _build_numba():
    from numba import njit

    @njit(cache=True)
    def carleman_log_nodes_nb(zeta, z, a, order):  # pragma: no cover - jit
        n = zeta.shape[0]
        logmag = np.empty(n)
        phase = np.empty(n)
        w = z - a
        p = order + 1.0
        if w == 0.0:
            for i in range(n):
                logmag[i] = -np.inf
                phase[i] = 0.0
            return logmag, phase
        lw = math.log(abs(w))
        aw = math.atan2(w.imag, w.real)
        for i in range(n):
            dz = zeta[i] - z
            da = zeta[i] - a
            logmag[i] = (-_LOG_TWO_PI - math.log(abs(dz))
                         + p * (lw - math.log(abs(da))))
            ph = (-_HALF_PI - math.atan2(dz.imag, dz.real)
                  + p * (aw - math.atan2(da.imag, da.real)))
            phase[i] = (ph + math.pi) % _TWO_PI - math.pi
        return logmag, phase

    @njit(cache=True)
    def _pairwise_c(vals):  # pragma: no cover - jit
        v = vals.copy()
        n = v.shape[0]
        while n > 1:
            half = n // 2
            for i in range(half):
                v[i] = v[2 * i] + v[2 * i + 1]
            if n % 2:
                v[half] = v[n - 1]
                n = half + 1
            else:
                n = half
        return v[0]

    @njit(cache=True)
    def scaled_phase_sum_nb(logmag, phase):  # pragma: no cover - jit
        m = -np.inf
        for i in range(logmag.shape[0]):
            if logmag[i] > m:
                m = logmag[i]
        if not np.isfinite(m):
            return -np.inf, 0.0 + 0.0j
        terms = np.empty(logmag.shape[0], dtype=np.complex128)
        for i in range(logmag.shape[0]):
            terms[i] = math.exp(logmag[i] - m) * complex(math.cos(phase[i]), math.sin(phase[i]))
        return m, _pairwise_c(terms)

    @njit(cache=True)
    def _pairwise_f(vals):  # pragma: no cover - jit
        v = vals.copy()
        n = v.shape[0]
        while n > 1:
            half = n // 2
            for i in range(half):
                v[i] = v[2 * i] + v[2 * i + 1]
            if n % 2:
                v[half] = v[n - 1]
                n = half + 1
            else:
                n = half
        return v[0]

    @njit(cache=True)
    def scaled_abs_sum_nb(logmag):  # pragma: no cover - jit
        m = -np.inf
        for i in range(logmag.shape[0]):
            if logmag[i] > m:
                m = logmag[i]
        if not np.isfinite(m):
            return -np.inf, 0.0
        terms = np.empty(logmag.shape[0])
        for i in range(logmag.shape[0]):
            terms[i] = math.exp(logmag[i] - m)
        return m, _pairwise_f(terms)

    return carleman_log_nodes_nb, scaled_phase_sum_nb, scaled_abs_sum_nb


USE_NUMBA = os.environ.get("CARLEMAN_NUMBA", "1") != "0"

if USE_NUMBA:
    try:
        carleman_log_nodes, scaled_phase_sum, scaled_abs_sum = _build_numba()
    except ImportError:
        USE_NUMBA = False

if not USE_NUMBA:
    carleman_log_nodes = _carleman_log_nodes_np
    scaled_phase_sum = _scaled_phase_sum_np
    scaled_abs_sum = _scaled_abs_sum_np

"""Benchmark the hot kernels in both lanes: numba @njit vs the pure-numpy
fallback (the lane normally selected by the CARLEMAN_NUMBA env flag).

The workload mirrors the quadrature engine: many small panels (default 32
nodes, the fine Gauss rule of the default order-16 configuration) rather
than one huge array, since per-call overhead dominates at panel size.

Run:  python3 benchmarks/bench_kernels.py [--nodes 32] [--panels 2000] [--repeats 10]

For an end-to-end comparison of a full continuation study, run the same
CLI scenario twice with CARLEMAN_NUMBA=1 / CARLEMAN_NUMBA=0.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from carleman import _accel


def _time(fn, repeats):
    fn()  # warm-up (numba compilation happens here)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=32,
                    help="nodes per panel (2x gauss_order in the engine)")
    ap.add_argument("--panels", type=int, default=2000,
                    help="panels per timed pass")
    ap.add_argument("--repeats", type=int, default=10)
    args = ap.parse_args()

    rng = np.random.default_rng(7)
    panels = []
    for _ in range(args.panels):
        t = np.sort(rng.uniform(0.0, 1.0, args.nodes))
        panels.append(1j * (1.0 - 2.0 * t))  # nodes on the half-disk data arc
    z = 0.5 + 0.1j
    a = -0.05 + 0.0j
    order = 40.0

    nb = _accel._build_numba()
    np_lane = (_accel._carleman_log_nodes_np, _accel._scaled_phase_sum_np,
               _accel._scaled_abs_sum_np)

    rows = []
    for name, (log_nodes, phase_sum, abs_sum) in (("numba", nb), ("numpy", np_lane)):
        def pass_nodes():
            for zeta in panels:
                log_nodes(zeta, z, a, order)

        lm, ph = log_nodes(panels[0], z, a, order)
        lm, ph = np.ascontiguousarray(lm), np.ascontiguousarray(ph)

        def pass_sum():
            for _ in range(args.panels):
                phase_sum(lm, ph)

        def pass_abs():
            for _ in range(args.panels):
                abs_sum(lm)

        rows.append((name, _time(pass_nodes, args.repeats),
                     _time(pass_sum, args.repeats), _time(pass_abs, args.repeats)))

    print(f"{args.panels} panels x {args.nodes} nodes, best of {args.repeats} runs (seconds)")
    print(f"{'lane':8s} {'log_nodes':>12s} {'phase_sum':>12s} {'abs_sum':>12s}")
    for name, a_, b_, c_ in rows:
        print(f"{name:8s} {a_:12.6f} {b_:12.6f} {c_:12.6f}")
    nb_t, np_t = rows[0][1:], rows[1][1:]
    print("speedup numba vs numpy: "
          + ", ".join(f"{n / m:.2f}x" for m, n in zip(nb_t, np_t)))

    # the two lanes must agree to rounding on the same inputs
    worst_lm = worst_ph = 0.0
    for zeta in panels[:50]:
        lm_nb, ph_nb = nb[0](zeta, z, a, order)
        lm_np, ph_np = np_lane[0](zeta, z, a, order)
        worst_lm = max(worst_lm, float(np.max(np.abs(lm_nb - lm_np))))
        worst_ph = max(worst_ph, float(np.max(np.abs(ph_nb - ph_np))))
    print("max lane disagreement:", worst_lm, worst_ph)


if __name__ == "__main__":
    main()

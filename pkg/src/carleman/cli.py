"""Command-line front end.

Subcommands:

* ``verify-kernel`` - run the kernel form-equivalence property suite.
* ``continue``      - run a continuation study from a scenario config file
                      and write CSV or JSON diagnostics.
* ``lemma-check``   - sample interior points and verify every one is
                      eventually covered by an approach disk.

Exit codes: 0 success, 1 property/coverage failure, 2 invalid arguments or
config, 3 unreadable input file, 4 quadrature failed to converge on more
than 10% of rows.

Scenario config grammar (flat key-value text)::

    # comment
    [section]
    key = value

Sections and keys are described in the README.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .engine import (ApproachSequence, BoundaryData, run_convergence_study, with_noise)
from .errors import DomainError
from .geometry import (ApproachCurve, LuneDomain, ParametricCurve, covering_parameter,
                       default_t_grid, validate_lune)
from .kernels import (carleman_difference, carleman_product, carleman_product_log,
                      kernel_log_magnitude)
from .oracles import get_test_function, half_disk_preset
from .quadrature import GradingSpec, QuadratureConfig

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BADARGS = 2
EXIT_BADFILE = 3
EXIT_NOCONV = 4

CSV_HEADER = "z_re,z_im,N,uN_re,uN_im,quad_err,qN,in_disk,tail_abs,MN_log,abs_err"


class ConfigError(Exception):
    pass


class FileProblem(Exception):
    """Input file missing, malformed, or not matching the scenario curves."""


def parse_config(text: str) -> dict[str, dict[str, str]]:
    """Hand-rolled flat key-value reader with [section] headers."""
    sections: dict[str, dict[str, str]] = {}
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if not name:
                raise ConfigError(f"line {lineno}: empty section name")
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key-value pair before any [section]")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.split("#", 1)[0].strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        current[key] = value
    return sections


@dataclass
class Scenario:
    lune: LuneDomain
    gamma: ApproachCurve
    seq: ApproachSequence
    data: BoundaryData
    exact: object | None
    z_set: list[complex]
    N_set: list[int]
    config: QuadratureConfig
    noise_delta: float | None
    noise_seed: int
    parallel: bool
    out_path: str
    out_format: str
    messages: list[str] = field(default_factory=list)


def _parse_range(spec: str) -> list[int]:
    spec = spec.strip()
    if ":" in spec:
        lo, hi = spec.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in spec.split(",") if x.strip()]


def _parse_axis(spec: str) -> np.ndarray:
    lo, hi, n = spec.split(":")
    n = int(n)
    if n < 1:
        raise ConfigError(f"axis count must be >= 1 in {spec!r}")
    return np.linspace(float(lo), float(hi), n)


def _read_triples(path: str, what: str) -> tuple[list[float], list[complex]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise FileProblem(f"cannot read {path}: {exc}") from exc
    ts: list[float] = []
    zs: list[complex] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise FileProblem(f"{path}:{lineno}: expected '{what}', got {raw!r}")
        try:
            t, x, y = map(float, parts)
        except ValueError as exc:
            raise FileProblem(f"{path}:{lineno}: {exc}") from exc
        ts.append(t)
        zs.append(complex(x, y))
    return ts, zs


def read_curve_file(path: str) -> ParametricCurve:
    """Curve sample files: lines 't x y', '#' comments."""
    ts, zs = _read_triples(path, "t x y")
    try:
        return ParametricCurve.from_samples(ts, zs)
    except DomainError as exc:
        raise FileProblem(f"{path}: {exc}") from exc


def read_boundary_file(path: str) -> BoundaryData:
    """Boundary data files: lines 't u_re u_im', '#' comments."""
    ts, us = _read_triples(path, "t u_re u_im")
    try:
        return BoundaryData.from_table(ts, us)
    except DomainError as exc:
        raise FileProblem(f"{path}: {exc}") from exc


def build_scenario(sections: dict[str, dict[str, str]]) -> Scenario:
    sc = sections.get("scenario", {})
    msgs: list[str] = []

    preset_name = sc.get("preset")
    curves = sections.get("curves", {})
    if preset_name:
        if preset_name != "half-disk":
            raise ConfigError(f"unknown preset {preset_name!r} (available: half-disk)")
        preset = half_disk_preset()
        lune, gamma, seq = preset.lune, preset.gamma, preset.seq
    elif curves:
        for key in ("gamma_file", "complement_file", "approach_file"):
            if key not in curves:
                raise ConfigError(f"[curves] section needs {key}")
        gamma_arc = read_curve_file(curves["gamma_file"])
        complement = read_curve_file(curves["complement_file"])
        approach = ApproachCurve(read_curve_file(curves["approach_file"]))
        lune = LuneDomain(gamma_arc=gamma_arc, complement_arc=complement)
        gamma = approach
        seq = ApproachSequence(gamma=gamma,
                               t_of=lambda n: gamma.t_max / max(n, 1))
        diag = validate_lune(lune, gamma)
        if not diag.all_ok:
            raise ConfigError("custom lune failed validation: " + "; ".join(diag.messages))
    else:
        raise ConfigError("config needs scenario.preset or a [curves] section")

    data_spec = sc.get("data")
    if not data_spec:
        raise ConfigError("scenario.data is required (test function name or file:PATH)")
    exact = None
    if data_spec.startswith("file:"):
        data = read_boundary_file(data_spec[5:])
        try:
            data.check_covers(lune.gamma_arc)
        except DomainError as exc:
            raise FileProblem(str(exc)) from exc
    else:
        try:
            tf = get_test_function(data_spec)
        except KeyError as exc:
            raise ConfigError(str(exc)) from exc
        data = BoundaryData.from_function(tf.value)
        exact = tf.value

    if "z_points" in sc:
        z_set = [complex(s.replace(" ", "")) for s in sc["z_points"].split(",") if s.strip()]
    elif "z_grid" in sc:
        axes = sc["z_grid"].split(",")
        if len(axes) != 2:
            raise ConfigError("z_grid needs 're0:re1:n, im0:im1:n'")
        res, ims = _parse_axis(axes[0]), _parse_axis(axes[1])
        z_set = [complex(r, i) for r in res for i in ims]
    else:
        raise ConfigError("scenario needs z_points or z_grid")
    if not z_set:
        raise ConfigError("empty z set")

    if "N" not in sc:
        raise ConfigError("scenario.N is required ('lo:hi' or comma list)")
    N_set = _parse_range(sc["N"])
    if not N_set:
        raise ConfigError("empty N set")

    q = sections.get("quadrature", {})
    config = QuadratureConfig(
        gauss_order=int(q.get("gauss_order", 16)),
        rel_tol=float(q.get("rel_tol", 1e-10)),
        abs_tol=float(q.get("abs_tol", 1e-14)),
        max_depth=int(q.get("max_depth", 30)),
        grading=GradingSpec(ratio=float(q.get("grading_ratio", 0.15)),
                            levels=int(q.get("grading_levels", 25))),
    )

    noise = sections.get("noise", {})
    noise_delta = float(noise["delta"]) if "delta" in noise else None
    noise_seed = int(noise.get("seed", 0))

    out = sections.get("output", {})
    out_format = out.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError(f"output.format must be csv or json, not {out_format!r}")
    out_path = out.get("path", "-")

    return Scenario(
        lune=lune, gamma=gamma, seq=seq, data=data, exact=exact,
        z_set=z_set, N_set=N_set, config=config,
        noise_delta=noise_delta, noise_seed=noise_seed,
        parallel=sc.get("parallel", "false").lower() in ("1", "true", "yes"),
        out_path=out_path, out_format=out_format, messages=msgs,
    )


def _fmt(x: float | None) -> str:
    if x is None:
        return ""
    return repr(float(x))


def render_csv(results) -> str:
    lines = [CSV_HEADER]
    for res in results:
        if res.error is not None:
            lines.append(f"# error at z=({_fmt(res.z.real)},{_fmt(res.z.imag)}): {res.error}")
            continue
        for r in res.per_N:
            lines.append(",".join([
                _fmt(res.z.real), _fmt(res.z.imag), str(r.N),
                _fmt(r.u_N.real), _fmt(r.u_N.imag),
                _fmt(r.quadrature_error), _fmt(r.q_N),
                "true" if r.in_disk else "false",
                _fmt(r.tail_abs), _fmt(r.M_N_log), _fmt(r.abs_err),
            ]))
    for res in results:
        if res.error is None and res.best_N is not None:
            lines.append(f"# N_opt z=({_fmt(res.z.real)},{_fmt(res.z.imag)}) N_opt={res.best_N}")
    return "\n".join(lines) + "\n"


def render_json(results) -> str:
    def num(x):
        if x is None:
            return None
        x = float(x)
        return x if math.isfinite(x) else repr(x)

    payload = []
    for res in results:
        entry = {"z_re": num(res.z.real), "z_im": num(res.z.imag),
                 "error": res.error, "N_opt": res.best_N, "records": []}
        for r in res.per_N:
            entry["records"].append({
                "N": r.N,
                "uN_re": num(r.u_N.real), "uN_im": num(r.u_N.imag),
                "quad_err": num(r.quadrature_error), "qN": num(r.q_N),
                "q_limit": num(r.q_limit),
                "in_disk": r.in_disk,
                "tail_abs": num(r.tail_abs), "MN_log": num(r.M_N_log),
                "overflow_panels": r.overflow_panels,
                "converged": r.converged,
                "abs_err": num(r.abs_err),
            })
        payload.append(entry)
    return json.dumps({"results": payload}, indent=2, sort_keys=True) + "\n"


def cmd_continue(args) -> int:
    try:
        text = Path(args.config).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_BADFILE
    try:
        scenario = build_scenario(parse_config(text))
    except FileProblem as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BADFILE
    except (ConfigError, DomainError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BADARGS

    data = scenario.data
    if scenario.noise_delta is not None:
        data = with_noise(data, scenario.noise_delta, scenario.noise_seed)
    results = run_convergence_study(
        scenario.lune, data, scenario.exact, scenario.seq,
        scenario.z_set, scenario.N_set, scenario.config,
        parallel=scenario.parallel)

    out = render_csv(results) if scenario.out_format == "csv" else render_json(results)
    if scenario.out_path == "-":
        sys.stdout.write(out)
    else:
        Path(scenario.out_path).write_text(out)

    rows = [r for res in results if res.error is None for r in res.per_N]
    bad = sum(1 for r in rows if not r.converged)
    if rows and bad / len(rows) > 0.10:
        print(f"warning: quadrature not converged on {bad}/{len(rows)} rows",
              file=sys.stderr)
        return EXIT_NOCONV
    return EXIT_OK


def cmd_verify_kernel(args) -> int:
    if args.count <= 0:
        print("error: count must be positive", file=sys.stderr)
        return EXIT_BADARGS
    if args.max_N < 0:
        print("error: max-N must be nonnegative", file=sys.stderr)
        return EXIT_BADARGS
    rng = np.random.default_rng(args.seed)
    ok = True

    def report(name: str, passed: bool, detail: str = "") -> None:
        nonlocal ok
        ok = ok and passed
        print(f"{'PASS' if passed else 'FAIL'} {name}{(' ' + detail) if detail else ''}")

    def random_tuple():
        while True:
            pts = (rng.uniform(-2, 2, 3) + 1j * rng.uniform(-2, 2, 3))
            zeta, z, a = (complex(p) for p in pts)
            if abs(zeta) > 2 or abs(z) > 2 or abs(a) > 2:
                continue
            if min(abs(zeta - z), abs(zeta - a), abs(z - a)) >= 0.05:
                return zeta, z, a

    worst = 0.0
    for _ in range(args.count):
        zeta, z, a = random_tuple()
        n = int(rng.integers(0, args.max_N + 1))
        d = carleman_difference(zeta, z, a, n)
        p = carleman_product(zeta, z, a, n)
        rel = abs(d - p) / (1.0 + abs(p))
        worst = max(worst, rel)
    report("form-equivalence (series-difference vs product)", worst <= 1e-10,
           f"worst {worst:.3e} over {args.count} tuples, N <= {args.max_N}")

    worst0 = 0.0
    for _ in range(min(args.count, 200)):
        zeta, z, a = random_tuple()
        closed = (z - a) / ((zeta - z) * (zeta - a)) / (2j * math.pi)
        worst0 = max(worst0, abs(carleman_product(zeta, z, a, 0) - closed)
                     / (1.0 + abs(closed)))
    report("order-0 partial-fraction closed form", worst0 <= 1e-14,
           f"worst {worst0:.3e}")

    worst_log = 0.0
    for _ in range(min(args.count, 200)):
        zeta, z, a = random_tuple()
        n = int(rng.integers(0, args.max_N + 1))
        lm = kernel_log_magnitude(zeta, z, a, n)
        lc = carleman_product_log(zeta, z, a, n)
        worst_log = max(worst_log, abs(lm - lc.log_mag))
    report("log-magnitude consistency", worst_log <= 1e-10,
           f"worst log-gap {worst_log:.3e}")

    return EXIT_OK if ok else EXIT_FAIL


def cmd_lemma_check(args) -> int:
    if args.count <= 0:
        print("error: count must be positive", file=sys.stderr)
        return EXIT_BADARGS
    if args.preset != "half-disk":
        print(f"error: unknown preset {args.preset!r}", file=sys.stderr)
        return EXIT_BADARGS
    preset = half_disk_preset()
    diag = preset.validate()
    if not diag.all_ok:
        print("error: lune validation failed: " + "; ".join(diag.messages),
              file=sys.stderr)
        return EXIT_BADARGS

    rng = np.random.default_rng(args.seed)
    # default harmonic grid, extended geometrically toward t = 0: near-boundary
    # points need arbitrarily small covering parameters
    grid = np.concatenate([default_t_grid(), 2.0 ** -np.arange(9, 61, dtype=float)])
    max_t = 0.0
    failures = 0
    found = 0
    while found < args.count:
        z = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        if abs(z) >= 0.999 or not preset.lune.contains(z):
            continue
        found += 1
        t = covering_parameter(preset.gamma, z, grid)
        if t is None:
            failures += 1
            print(f"FAIL z=({z.real:.6f},{z.imag:.6f}) never covered")
        else:
            max_t = max(max_t, t)
    print(f"covered {found - failures}/{found} sampled interior points; "
          f"max t needed = {max_t!r}")
    return EXIT_OK if failures == 0 else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="carleman",
        description="Analytic continuation in lune domains from partial boundary data.")
    sub = ap.add_subparsers(dest="command", required=True)

    vk = sub.add_parser("verify-kernel", help="run the kernel property suite")
    vk.add_argument("--count", type=int, default=1000)
    vk.add_argument("--max-N", dest="max_N", type=int, default=64)
    vk.add_argument("--seed", type=int, default=0)
    vk.set_defaults(func=cmd_verify_kernel)

    co = sub.add_parser("continue", help="run a continuation study from a config file")
    co.add_argument("config", help="scenario config file")
    co.set_defaults(func=cmd_continue)

    lc = sub.add_parser("lemma-check", help="verify covering-disk reachability")
    lc.add_argument("--preset", default="half-disk")
    lc.add_argument("--count", type=int, default=100)
    lc.add_argument("--seed", type=int, default=0)
    lc.set_defaults(func=cmd_lemma_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command line interface: ``keplerreg <subcommand> ...``.

JSON goes to stdout (or to ``--out``), logs to stderr. Floats are printed
with 17 significant digits so that runs can be diffed.
Exit codes: 0 success, 1 failed invariant suite, 2 domain error, 64 usage error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import lsmap, orbit, scan
from .curvature import closed_form_CK, closed_form_CRt, hk_derivatives, hr_derivatives, tangential_curvature
from .curvature import curvature_batch
from .errors import DomainError
from .hamiltonians import eval_HK, eval_HR, eval_HX, hx_arrays, locate_L1
from .kepler_equation import kepler_function_grid, solve_elliptic, solve_hyperbolic
from .phase import CartesianState, SphereState, state_from_json
from .projections import ComplexPair
from .verify import run_all

log = logging.getLogger("keplerreg")

EXIT_OK, EXIT_VERIFY, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2, 64


@dataclass
class RunConfig:
    tolerance: float = 1e-10
    extent: float = 1.5
    n_per_axis: int = 21
    workers: int = 1
    samples: int = 1000
    seed: int = 0
    out: str | None = None

    def __post_init__(self):
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path) as fh:
            data = json.load(fh)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    def merged(self, args) -> "RunConfig":
        """Flags given on the command line override the config file."""
        values = asdict(self)
        for name in values:
            flag = getattr(args, name, None)
            if flag is not None:
                values[name] = flag
        return RunConfig(**values)


def _fmt(obj):
    if isinstance(obj, dict):
        return {k: _fmt(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_fmt(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _Float(obj)
    return obj


class _Float(float):
    def __repr__(self):
        if not math.isfinite(self):
            return "null"
        return format(float(self), ".17g")


def _encode(o):
    if isinstance(o, dict):
        yield "{"
        for n, (k, v) in enumerate(o.items()):
            if n:
                yield ", "
            yield json.dumps(k) + ": "
            yield from _encode(v)
        yield "}"
    elif isinstance(o, list):
        yield "["
        for n, v in enumerate(o):
            if n:
                yield ", "
            yield from _encode(v)
        yield "]"
    elif isinstance(o, _Float):
        yield repr(o)
    else:
        yield json.dumps(o)


def dumps(obj) -> str:
    return "".join(_encode(_fmt(obj)))


def _emit(obj, out=None):
    text = dumps(obj)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
        log.info("wrote %s", out)
    else:
        print(text)


def _write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([format(float(v), ".17g") for v in row])
    log.info("wrote %d rows to %s", len(rows), path)


def cmd_kepler_fn(args, cfg):
    if args.action == "solve":
        solver = solve_hyperbolic if args.hyperbolic else solve_elliptic
        root = solver(args.x, args.y)
        _emit({"phi": root.phi, "residual": root.residual, "iterations": root.iterations}, cfg.out)
        return EXIT_OK
    report = kepler_function_grid(args.lo, args.hi, args.step)
    if cfg.out:
        _write_rows(cfg.out, ["x", "y", "phi"], list(report.rows()))
        print(dumps({"extrema": report.extrema}))
    else:
        _emit({"extrema": report.extrema})
    return EXIT_OK


def _read_state(path):
    if path in (None, "-"):
        return state_from_json(json.load(sys.stdin))
    with open(path) as fh:
        return state_from_json(json.load(fh))


def cmd_map(args, cfg):
    state = _read_state(args.input)
    if args.direction == "fwd":
        if not isinstance(state, CartesianState):
            raise ValueError("map fwd expects a {\"q\", \"p\"} state")
        state.check()
        out = lsmap.forward(state).to_json()
    else:
        if not isinstance(state, SphereState):
            raise ValueError("map inv expects a {\"xi\", \"eta\", \"sign\"} state")
        out = lsmap.inverse(state).to_json()
    _emit(out, cfg.out)
    return EXIT_OK


def cmd_orbit(args, cfg):
    state = CartesianState(args.q, args.p).check()
    rows = orbit.orbit_table(state, args.t_end, args.samples)
    header = ["t", "q1", "q2", "q3", "p1", "p2", "p3", "ell", "g", "h", "Lc", "Gc", "Hc"]
    if cfg.out:
        _write_rows(cfg.out, header, rows)
    else:
        _emit([dict(zip(header, r)) for r in rows])
    return EXIT_OK


def cmd_curvature(args, cfg):
    point = np.asarray(args.point, dtype=float)
    cp = ComplexPair.from_point(point)
    result = {"system": args.system, "point": point}
    if args.system == "kepler":
        result["energy"] = eval_HK(cp)
        result["curvature"] = tangential_curvature(None, point, hk_derivatives(point)) if args.exact \
            else tangential_curvature(lambda x: eval_HK(ComplexPair.from_point(x)), point, richardson=args.richardson)
        result["closed_form"] = closed_form_CK(cp)
    elif args.system == "rotating":
        result["energy"] = eval_HR(cp)
        result["curvature"] = tangential_curvature(None, point, hr_derivatives(point)) if args.exact \
            else tangential_curvature(lambda x: eval_HR(ComplexPair.from_point(x)), point, richardson=args.richardson)
        result["closed_form"] = closed_form_CRt(cp)
    else:
        hx = eval_HX(cp, args.mu)
        curv = curvature_batch(lambda pts: hx_arrays(pts, args.mu).energy, point, args.richardson)[0]
        if not np.isfinite(curv):
            raise DomainError("a probe point of the finite-difference stencil left the chain domain")
        result.update(mu=args.mu, energy=hx.energy, rdHP=hx.rdhp, q=hx.q, p=hx.p, curvature=curv)
        if args.mu == 0:
            result["closed_form"] = closed_form_CRt(cp)
    _emit(result, cfg.out)
    return EXIT_OK


def cmd_scan(args, cfg):
    report = scan.grid_scan(args.mu, args.c_cap, cfg.extent, cfg.n_per_axis, cfg.workers, args.richardson)
    summary = report.summary()
    try:
        summary["threshold"] = scan.threshold_estimate(report)
    except DomainError as exc:
        summary["threshold"] = None
        log.warning("%s", exc)
    if cfg.out:
        report.write_csv(cfg.out)
        log.info("retained %d samples, %d non-positive", report.retained, len(report.negatives))
    print(dumps(summary))
    return EXIT_OK


def cmd_minimize(args, cfg):
    data = scan.read_scan_csv(args.starts_from)
    pool = np.flatnonzero(data["rdHP"] > args.rdhp_min)
    order = pool[np.argsort(data["curvature"][pool], kind="stable")][: args.top]
    points = np.stack([data[c] for c in ("w1", "w2", "z1", "z2")], axis=1)[order]
    c_cap = args.c_cap if args.c_cap is not None else locate_L1(args.mu).energy
    results = []
    for k, start in enumerate(points):
        res = scan.constrained_minimize(args.mu, c_cap, start)
        log.info("start %d: curvature %.6g converged %s", k, res.curvature, res.converged)
        results.append(res.to_json())
    _emit({"mu": args.mu, "c_cap": c_cap, "results": results}, cfg.out)
    return EXIT_OK


def cmd_l1(args, cfg):
    _emit(locate_L1(args.mu).to_json(), cfg.out)
    return EXIT_OK


def cmd_verify(args, cfg):
    suites = run_all(cfg.samples, cfg.seed, cfg.tolerance)
    for s in suites:
        log.info("%-32s max %.3e  tol %.1e  %s", s.name, s.max_residual, s.tolerance, "ok" if s.ok else "FAIL")
    ok = all(s.ok for s in suites)
    _emit({"ok": ok, "suites": [s.to_json() for s in suites]}, cfg.out)
    return EXIT_OK if ok else EXIT_VERIFY


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--out", default=None, help="write the result here instead of stdout")
    common.add_argument("--workers", type=int, default=None)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="keplerreg", description="Ligon-Schaaf regularization toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kepler-fn", parents=[common], help="generalized Kepler equation")
    kf = p.add_subparsers(dest="action", required=True, parser_class=_Parser)
    s = kf.add_parser("solve", parents=[common])
    s.add_argument("x", type=float)
    s.add_argument("y", type=float)
    s.add_argument("--hyperbolic", action="store_true")
    g = kf.add_parser("grid", parents=[common])
    g.add_argument("--lo", type=float, default=-1.0)
    g.add_argument("--hi", type=float, default=1.0)
    g.add_argument("--step", type=float, default=0.01)
    p.set_defaults(func=cmd_kepler_fn)

    p = sub.add_parser("map", parents=[common], help="forward or inverse LS map")
    p.add_argument("direction", choices=["fwd", "inv"])
    p.add_argument("--in", dest="input", default=None, help="JSON state file (stdin if omitted)")
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("orbit", parents=[common], help="Kepler propagation and elements")
    p.add_argument("--q", type=float, nargs=3, required=True)
    p.add_argument("--p", type=float, nargs=3, required=True)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--samples", type=int, default=100)
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("curvature", parents=[common], help="tangential curvature at a point")
    p.add_argument("--system", choices=["kepler", "rotating", "cr3bp"], required=True)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--point", type=float, nargs=4, required=True)
    p.add_argument("--richardson", action="store_true")
    p.add_argument("--exact", action="store_true", help="closed-form derivatives (kepler, rotating)")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("scan", parents=[common], help="grid scan of the curvature")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--c-cap", type=float, default=None)
    p.add_argument("--extent", type=float, default=None)
    p.add_argument("--n", dest="n_per_axis", type=int, default=None)
    p.add_argument("--richardson", action="store_true")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("minimize", parents=[common], help="constrained curvature minimization")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--c-cap", type=float, default=None)
    p.add_argument("--starts-from", required=True, help="scan CSV")
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--rdhp-min", type=float, default=0.0)
    p.set_defaults(func=cmd_minimize)

    p = sub.add_parser("l1", parents=[common], help="L1 point and energy cap")
    p.add_argument("--mu", type=float, required=True)
    p.set_defaults(func=cmd_l1)

    p = sub.add_parser("verify", parents=[common], help="run the invariant suites")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--tolerance", type=float, default=None)
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        stream=sys.stderr, format="%(levelname)s %(message)s")
    try:
        cfg = RunConfig.load(args.config) if args.config else RunConfig()
        cfg = cfg.merged(args)
    except (OSError, ValueError, TypeError) as exc:
        print(f"keplerreg: bad configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args, cfg)
    except DomainError as exc:
        print(f"keplerreg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"keplerreg: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

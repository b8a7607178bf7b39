"""Command-line interface: bounds reports, surface dumps, threshold
estimation, oriented-percolation densities, parameter sweeps, self-checks.

Output is CSV or JSON with a fixed column order so reruns diff cleanly;
everything except the runtime column is a pure function of (config, seeds).
Exit codes: 0 success, 1 check failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import _kernels, bounds, mc, selfcheck
from .errors import BracketError, ConfigError, InvalidWindowError
from .lattice import FloorSpec, make_tilt
from .mc import ReplicaPlan
from .paths import Window

REPORT_COLUMNS = (
    "alpha_num", "alpha_den", "d", "k", "q_grid",
    "lb_general", "lb_simplex_opt", "lb_alpha", "ub_factorial", "ub_expected_T",
    "C_alpha_theta", "q_hat", "q_hat_lo", "q_hat_hi",
    "R", "H", "replicas", "seed", "censored", "runtime_ms",
    "sandwich_ok", "tail_probs", "reach_means",
)

_INT_COLUMNS = {"alpha_num", "alpha_den", "d", "k", "R", "H", "replicas",
                "seed", "censored", "runtime_ms"}
_LIST_COLUMNS = {"q_grid", "tail_probs", "reach_means"}


@dataclass(frozen=True)
class SweepConfig:
    alphas: tuple          # Fractions
    dims: tuple
    ks: tuple | str        # explicit k values, or "d" for k = d per dim
    qs: tuple              # diagnostics grid
    radius: dict           # d -> R
    height_cap: dict       # d -> H
    replicas: int
    seed: int
    bracket: tuple
    target: float
    tail_h: int


@dataclass(frozen=True)
class ReportRow:
    values: dict  # keyed by REPORT_COLUMNS


def parse_alpha(text) -> Fraction:
    try:
        if isinstance(text, str) and "/" in text:
            num, den = text.split("/", 1)
            frac = Fraction(int(num), int(den))
        else:
            frac = Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError("alpha", f"cannot parse {text!r} as a rational") from exc
    if not 0 <= frac < 1:
        raise ConfigError("alpha", f"must lie in [0, 1), got {frac}")
    return frac


def load_sweep_config(data: dict) -> SweepConfig:
    try:
        alphas = tuple(parse_alpha(a) for a in data["alphas"])
        dims = tuple(int(d) for d in data["dims"])
        ks = data.get("ks", "d")
        if ks != "d":
            ks = tuple(int(k) for k in ks)
        qs = tuple(float(q) for q in data.get("qs", ()))
        replicas = int(data.get("replicas", 400))
        seed = int(data.get("seed", 1))
        bracket = tuple(data.get("bracket", (1e-4, 0.6)))
        target = float(data.get("target", 0.5))
        tail_h = int(data.get("tail_h", 3))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), "missing or malformed entry") from exc
    if any(d < 1 for d in dims):
        raise ConfigError("dims", f"dimensions must be >= 1, got {dims}")
    if ks != "d":
        if any(k < 0 for k in ks):
            raise ConfigError("ks", f"k values must be >= 0, got {ks}")
        if dims and all(k > max(dims) for k in ks):
            raise ConfigError("ks", f"every k in {ks} exceeds max dim {max(dims)}")
    if replicas < 1:
        raise ConfigError("replicas", f"must be >= 1, got {replicas}")
    if not (0 <= bracket[0] < bracket[1] <= 1):
        raise ConfigError("bracket", f"need 0 <= lo < hi <= 1, got {bracket}")

    def per_dim(key, default_fn):
        raw = data.get(key)
        out = {}
        for d in dims:
            if raw is None:
                out[d] = default_fn(d)
            elif isinstance(raw, dict):
                out[d] = int(raw.get(str(d), default_fn(d)))
            else:
                out[d] = int(raw)
            if out[d] < 1:
                raise ConfigError(key, f"must be >= 1, got {out[d]} at d={d}")
        return out

    radius = per_dim("radius", lambda d: 40 if d == 1 else 12)
    height_cap = per_dim("height_cap", lambda d: 2 * radius[d])
    return SweepConfig(alphas, dims, ks, qs, radius, height_cap,
                       replicas, seed, bracket, target, tail_h)


def grid_points(config: SweepConfig):
    """Canonical (alpha, d, k) order: alphas outermost, then dims, then ks."""
    for alpha in config.alphas:
        for d in config.dims:
            ks = (d,) if config.ks == "d" else tuple(k for k in config.ks if k <= d)
            for k in ks:
                yield alpha, d, k


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_cell(col: str, value) -> str:
    if col in _LIST_COLUMNS:
        return "|".join(_fmt(v) for v in value)
    return _fmt(value)


def run_sweep(config: SweepConfig):
    """One ReportRow per grid point, in canonical order."""
    rows = []
    for alpha, d, k in grid_points(config):
        t0 = time.perf_counter()
        rep = bounds.bounds_report(float(alpha), d, k)
        floor = FloorSpec("plane", make_tilt(alpha, d, k=k))
        window = Window(config.radius[d], config.height_cap[d])
        plan = ReplicaPlan(config.replicas, config.seed)
        est = mc.estimate_pc(floor, window, plan, config.bracket, target=config.target)
        tails = []
        reaches = []
        for q in config.qs:
            tails.append(mc.estimate_tail(q, floor, config.tail_h, window, plan).point)
            reaches.append(mc.estimate_reach_size(q, floor, max(config.tail_h - 2, 0),
                                                  window, plan).point)
        lb_alpha_val = bounds.lb_alpha(float(alpha), d, k) if k >= 1 else None
        sandwich_ok = rep.exact_lower() <= rep.exact_upper() + 1e-15
        runtime_ms = int(1000 * (time.perf_counter() - t0))
        rows.append(ReportRow({
            "alpha_num": alpha.numerator,
            "alpha_den": alpha.denominator,
            "d": d,
            "k": k,
            "q_grid": list(config.qs),
            "lb_general": rep.get("lb_general").value,
            "lb_simplex_opt": rep.get("lb_simplex_opt").value,
            "lb_alpha": lb_alpha_val,
            "ub_factorial": rep.get("ub_factorial").value,
            "ub_expected_T": rep.get("ub_expected_T").value,
            "C_alpha_theta": rep.get("C_alpha_theta").value,
            "q_hat": est.point,
            "q_hat_lo": est.lo,
            "q_hat_hi": est.hi,
            "R": config.radius[d],
            "H": config.height_cap[d],
            "replicas": config.replicas,
            "seed": config.seed,
            "censored": est.censored_count,
            "runtime_ms": runtime_ms,
            "sandwich_ok": sandwich_ok,
            "tail_probs": tails,
            "reach_means": reaches,
        }))
    return rows


def rows_to_csv(rows) -> str:
    lines = [",".join(REPORT_COLUMNS)]
    for row in rows:
        lines.append(",".join(_fmt_cell(c, row.values[c]) for c in REPORT_COLUMNS))
    return "\n".join(lines) + "\n"


def rows_to_json(rows) -> str:
    payload = [{c: row.values[c] for c in REPORT_COLUMNS} for row in rows]
    return json.dumps(payload, indent=2) + "\n"


def _parse_cell(col: str, text: str):
    if col in _LIST_COLUMNS:
        return [] if text == "" else [float(v) for v in text.split("|")]
    if text == "":
        return None
    if col in _INT_COLUMNS:
        return int(text)
    if col == "sandwich_ok":
        return text == "true"
    return float(text)


def read_report_csv(text: str):
    """Parse ``rows_to_csv`` output back into ReportRows (round-trip tested)."""
    lines = [ln for ln in text.splitlines() if ln]
    header = lines[0].split(",")
    if tuple(header) != REPORT_COLUMNS:
        raise ValueError("unexpected report header")
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        rows.append(ReportRow({c: _parse_cell(c, v) for c, v in zip(header, cells)}))
    return rows


def emit_report(rows, fmt: str, path: str) -> None:
    """Write rows as CSV or JSON; '-' writes to stdout."""
    if fmt not in ("csv", "json"):
        raise ConfigError("format", f"must be 'csv' or 'json', got {fmt!r}")
    text = rows_to_csv(rows) if fmt == "csv" else rows_to_json(rows)
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path!r}: {exc}") from exc


# --- subcommands -------------------------------------------------------------

def _add_shared(p, q_flag=True):
    p.add_argument("--alpha", default="0", help="tilt as a rational p/q (e.g. 1/2)")
    p.add_argument("--dim", type=int, default=1, help="base dimension d")
    p.add_argument("--k", type=int, default=None, help="tilted axes (default d)")
    if q_flag:
        p.add_argument("--q", type=float, default=0.2, help="closed-site probability")
    p.add_argument("--radius", type=int, default=20, help="window radius R")
    p.add_argument("--height-cap", type=int, default=None, help="height cap H (default 2R)")
    p.add_argument("--replicas", type=int, default=400)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _floor_from(args) -> FloorSpec:
    alpha = parse_alpha(args.alpha)
    k = args.k if args.k is not None else args.dim
    kind = "pyramid" if getattr(args, "pyramid", False) else "plane"
    return FloorSpec(kind, make_tilt(alpha, args.dim, k=k))


def _emit_table(header, rows, fmt, path):
    if fmt == "csv":
        text = ",".join(header) + "\n"
        for r in rows:
            text += ",".join(_fmt(v) for v in r) + "\n"
    else:
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_bounds(args) -> int:
    alpha = parse_alpha(args.alpha)
    k = args.k if args.k is not None else args.dim
    rep = bounds.bounds_report(float(alpha), args.dim, k)
    rows = [(e.name, e.kind, e.value, e.validity) for e in rep.entries]
    rows.append(("exact_lower_max", "lower", rep.exact_lower(), bounds.EXACT))
    rows.append(("exact_upper_min", "upper", rep.exact_upper(), bounds.EXACT))
    _emit_table(("name", "kind", "value", "validity"), rows, args.format, args.out)
    return 0


def cmd_surface(args) -> int:
    floor = _floor_from(args)
    cap = args.height_cap if args.height_cap is not None else 2 * args.radius
    d, num, den = floor.tilt.d, floor.tilt.alpha.numerator, floor.tilt.alpha.denominator
    eta = np.array(floor.tilt.eta, dtype=np.int64)
    _, capped, truncated, _, colmax = _kernels.reach_kernel(
        np.uint64(args.seed & 0xFFFFFFFFFFFFFFFF), args.q, d, num, den, eta,
        floor.kind == "pyramid", args.radius, cap, 0, _kernels.MODE_SURFACE, 0,
    )
    side = 2 * args.radius + 1
    rows = []
    for c in range(len(colmax)):
        coords = []
        tmp = c
        for _ in range(d):
            coords.append(tmp % side - args.radius)
            tmp //= side
        f = floor.floor(tuple(coords))
        rows.append(tuple(coords) + (f, f + int(colmax[c]) + 1))
    header = tuple(f"x{i + 1}" for i in range(d)) + ("floor", "surface_height")
    rows.sort(key=lambda r: r[:d])
    _emit_table(header, rows, args.format, args.out)
    if capped:
        print(f"# height cap {cap} attained (surface diverged within the window)",
              file=sys.stderr)
    if truncated:
        print("# search touched the window boundary", file=sys.stderr)
    return 0


def cmd_estimate_pc(args) -> int:
    floor = _floor_from(args)
    cap = args.height_cap if args.height_cap is not None else 2 * args.radius
    window = Window(args.radius, cap)
    plan = ReplicaPlan(args.replicas, args.seed)
    lo, hi = (float(v) for v in args.bracket.split(","))
    est = mc.estimate_pc(floor, window, plan, (lo, hi),
                         h_star=args.h_star, target=args.target)
    _emit_table(("q_hat", "q_hat_lo", "q_hat_hi", "replicas", "censored"),
                [(est.point, est.lo, est.hi, est.replicas, est.censored_count)],
                args.format, args.out)
    return 0


def cmd_rho_gamma(args) -> int:
    from .rho import gamma_estimate

    est = gamma_estimate(args.q, args.dim, args.n, args.replicas, args.seed)
    _emit_table(("q", "d", "n", "replicas", "gamma_hat", "stderr"),
                [(est.q, args.dim, est.n, est.replicas, est.gamma_hat, est.stderr)],
                args.format, args.out)
    return 0


def cmd_sweep(args) -> int:
    try:
        data = json.loads(Path(args.config).read_text())
    except OSError as exc:
        print(f"cannot read config {args.config!r}: {exc}", file=sys.stderr)
        return 2
    config = load_sweep_config(data)
    rows = run_sweep(config)
    fmt = args.format or data.get("format", "csv")
    out = args.out or data.get("out", "-")
    emit_report(rows, fmt, out)
    bad = [r for r in rows if not r.values["sandwich_ok"]]
    if bad:
        print(f"{len(bad)} rows violate the exact-bounds sandwich", file=sys.stderr)
        return 1
    return 0


def cmd_selfcheck(args) -> int:
    results = selfcheck.run(args.level)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"[{status}] {r.number:2d} {r.name} ({r.seconds:.1f}s): {r.details}")
    n_fail = sum(1 for r in results if not r.passed)
    print(f"selfcheck {args.level}: {len(results) - n_fail}/{len(results)} passed")
    if args.out:
        payload = [
            {"number": r.number, "name": r.name, "passed": r.passed,
             "details": r.details, "seconds": round(r.seconds, 3)}
            for r in results
        ]
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return 1 if n_fail else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tiltperc",
        description="Lipschitz percolation above tilted planes: bounds, "
                    "surfaces, and Monte Carlo threshold estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="analytic bounds report for one (alpha, d, k)")
    _add_shared(p, q_flag=False)

    p = sub.add_parser("surface", help="dump the window-restricted surface heights")
    _add_shared(p)
    p.add_argument("--pyramid", action="store_true", help="use the inverted-pyramid floor")

    p = sub.add_parser("estimate-pc", help="bisect the surface-existence threshold")
    _add_shared(p, q_flag=False)
    p.add_argument("--bracket", default="0.0001,0.6", help="q_lo,q_hi")
    p.add_argument("--target", type=float, default=0.5)
    p.add_argument("--h-star", type=int, default=None, help="proxy height (default H/2)")

    p = sub.add_parser("rho-gamma", help="oriented-percolation density estimate")
    _add_shared(p)
    p.add_argument("--n", type=int, default=60, help="path length")

    p = sub.add_parser("sweep", help="run a parameter sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("selfcheck", help="run the verification suite")
    p.add_argument("--level", choices=("quick", "full"), default="quick")
    p.add_argument("--out", default=None, help="also write results as JSON")
    return parser


_COMMANDS = {
    "bounds": cmd_bounds,
    "surface": cmd_surface,
    "estimate-pc": cmd_estimate_pc,
    "rho-gamma": cmd_rho_gamma,
    "sweep": cmd_sweep,
    "selfcheck": cmd_selfcheck,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, BracketError, InvalidWindowError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"check failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

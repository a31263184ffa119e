"""Command-line front end.

    frax verify   --s 0.25 0.75 --identity dedu partial-Green [--x ...] [--y ...]
    frax green    --s 0.3 --x 0.1 0.5 --y -0.5 0.2 --format csv
    frax robin    --s 0.5 --x 0 0.3
    frax hadamard --s 0.1 0.25 0.4
    frax rkhs     --s 0.25 0.75
    frax vortex   --pair-equal --gamma 1 --d 1 --T 10 --output pair.csv

Identity commands write a JSON array of reports (or CSV with --format csv)
and exit 0 iff every gated report passes, 1 otherwise; bad configuration
exits 2.  ``--config file.{json,yaml}`` supplies defaults with the same keys
as the flags; flags given on the command line win.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hadamard as hd
from . import identities as ids
from . import rkhs
from . import vortex as vx
from .constants import FracParams
from .errors import DomainError, FraxError, UnsupportedOrderError
from .green1d import IntervalDomain, green_arrays, robin
from .report import reports_to_csv, reports_to_json, with_tol

COMMANDS = ("verify", "green", "robin", "hadamard", "rkhs", "vortex")
DEFAULT_S = (0.25, 0.5, 0.75)
DEFAULT_X = (-0.8, -0.4, 0.0, 0.4, 0.8)
DEFAULT_Y = (-0.5, 0.1, 0.6)


def _cos_source(y):
    return np.cos(0.5 * np.pi * np.asarray(y, dtype=float))


def _cos_source_derivative(y):
    return -0.5 * np.pi * np.sin(0.5 * np.pi * np.asarray(y, dtype=float))


# identity id -> (argument pattern, callable); patterns: point (p, x), pair (p, x, y), global (p)
def _registry(dom, dim):
    fam = hd.ShapeFamily(half_width=dom.half_width)
    return {
        "dedu": ("point", lambda p, x: ids.check_derivative_representation(p, x, dom)),
        "repres-partial-deriv": ("point", lambda p, x: ids.check_derivative_representation_general_f(
            p, x, _cos_source, _cos_source_derivative, dom=dom)),
        "partial-Green": ("pair", lambda p, x, y: ids.check_pohozaev_green(p, x, y, dom)),
        "repres-gradient-Robin": ("point", lambda p, x: ids.check_robin_gradient(p, x, dom)),
        "cutoff-double-integral": ("global", lambda p: ids.check_cutoff_double_integral(p)),
        "fundamental-normalization": ("global", lambda p: ids.check_fundamental_normalization(
            FracParams(p.s, dim))),
        "repres-shape-deriv": ("point", lambda p, x: hd.shape_derivative_solution(p, x, fam)),
        "var-green-bis": ("pair", lambda p, x, y: hd.hadamard_green(p, x, y, fam)),
        "var-Robin-func": ("point", lambda p, x: hd.hadamard_robin(p, x, fam)),
        "energy-shape-deriv": ("global", lambda p: hd.energy_shape_derivative(p, fam)),
        "reproducing": ("point", lambda p, x: rkhs.check_reproducing(p, x, dom)),
        "s-harmonic": ("point", lambda p, x: rkhs.check_s_harmonic(p, x, dom)),
        "gram-psd": ("global", lambda p: rkhs.check_gram_psd(
            p, np.linspace(-0.9, 0.9, 8) * dom.half_width, dom)),
    }


IDENTITY_IDS = tuple(_registry(IntervalDomain(), 1))
GROUPS = {
    "verify": ("dedu", "partial-Green", "repres-gradient-Robin", "repres-shape-deriv", "var-green-bis",
               "var-Robin-func", "energy-shape-deriv", "reproducing", "gram-psd"),
    "hadamard": ("repres-shape-deriv", "var-green-bis", "var-Robin-func", "energy-shape-deriv"),
    "rkhs": ("reproducing", "s-harmonic", "gram-psd"),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    s_values: list
    grid: dict
    tolerances: dict = field(default_factory=dict)
    output_path: str = "-"
    format: str = "json"
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if not self.s_values:
            raise UsageError("s list is empty")
        for s in self.s_values:
            if not (isinstance(s, float) and 0.0 < s < 1.0):
                raise UsageError(f"s = {s!r} is not in (0, 1)")
        if self.command != "vortex" and not self.grid.get("x"):
            raise UsageError("spatial grid is empty")
        if self.format not in ("json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")


def _flat_floats(values, name):
    out = []
    for v in values or ():
        if isinstance(v, (int, float)):
            out.append(float(v))
            continue
        for part in str(v).replace(";", ",").split(","):
            part = part.strip()
            if part:
                try:
                    out.append(float(part))
                except ValueError:
                    raise UsageError(f"{name}: {part!r} is not a number") from None
    return out


def _flat_words(values):
    out = []
    for v in values or ():
        out += [w for w in str(v).replace(";", ",").split(",") if w.strip()]
    return [w.strip() for w in out]


def _parse_tols(items):
    tols = {}
    for item in items or ():
        if isinstance(item, dict):
            tols.update({str(k): float(v) for k, v in item.items()})
            continue
        key, sep, val = str(item).partition("=")
        if not sep:
            raise UsageError(f"tolerance override {item!r} must look like ID=VALUE")
        try:
            tols[key.strip()] = float(val)
        except ValueError:
            raise UsageError(f"tolerance override {item!r} has a non-numeric value") from None
        if not tols[key.strip()] >= 0:
            raise UsageError("tolerances must be non-negative")
    return tols


def _common(sp):
    sp.add_argument("--config", help="JSON or YAML file with defaults (keys as the long flags)")
    sp.add_argument("--s", nargs="+", default=None, help="fractional orders in (0, 1); commas allowed")
    sp.add_argument("-o", "--output", default="-", help="output file ('-' for stdout)")
    sp.add_argument("--format", choices=("json", "csv"), default=None)


def _grid_args(sp):
    sp.add_argument("--x", nargs="+", default=None, help="interior sample points")
    sp.add_argument("--y", nargs="+", default=None, help="second points for two-point identities")
    sp.add_argument("--half-width", type=float, default=1.0, help="interval (-L, L)")


def build_parser():
    parser = argparse.ArgumentParser(prog="frax", description="Fractional Green-function identity checks "
                                     "and s-point-vortex simulations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("verify", "hadamard", "rkhs"):
        sp = sub.add_parser(name, help=f"run the {name} identity suite")
        _common(sp)
        _grid_args(sp)
        sp.add_argument("--identity", nargs="+", default=None,
                        help=f"identity ids (default: the {name} group); choices: {', '.join(IDENTITY_IDS)}")
        sp.add_argument("--tol", nargs="+", default=None, metavar="ID=VALUE", help="tolerance overrides")
        sp.add_argument("--dim", type=int, default=1, help="dimension for fundamental-normalization")
    for name in ("green", "robin"):
        sp = sub.add_parser(name, help=f"tabulate the interval {name} function")
        _common(sp)
        _grid_args(sp)
    sp = sub.add_parser("vortex", help="integrate s-point vortices; writes a CSV trajectory")
    _common(sp)
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--pair-equal", action="store_true", help="two equal vortices a distance d apart")
    mode.add_argument("--pair-opposite", action="store_true", help="vortex dipole")
    mode.add_argument("--three", action="store_true", help="three same-sign vortices")
    mode.add_argument("--disk", action="store_true", help="single vortex in the unit disk")
    sp.add_argument("--positions", default=None, help="custom start 'x1,y1;x2,y2;...'")
    sp.add_argument("--strengths", default=None, help="custom strengths 'g1,g2,...'")
    sp.add_argument("--gamma", type=float, default=1.0)
    sp.add_argument("--d", type=float, default=1.0, help="pair separation")
    sp.add_argument("--r0", type=float, default=0.5, help="disk start radius")
    sp.add_argument("--T", type=float, default=10.0, help="horizon")
    sp.add_argument("--dt", type=float, default=1e-3)
    sp.add_argument("--method", choices=vx.METHODS, default="rk4")
    sp.add_argument("--flow", choices=vx.FLOWS, default="hamiltonian")
    sp.add_argument("--every", type=int, default=1, help="write every k-th step")
    sp.add_argument("--max-drift", type=float, default=None,
                    help="exit 1 if the relative drift of H, M or I exceeds this")
    return parser


def _load_config(path):
    text = Path(path).read_text()
    if str(path).endswith((".yaml", ".yml")):
        import yaml
        data = yaml.safe_load(text)
    else:
        data = json.loads(text)
    if not isinstance(data, dict):
        raise UsageError("config file must hold a mapping")
    return {str(k).replace("-", "_"): v for k, v in data.items()}


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            conf = _load_config(args.config)
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        known = set(vars(args))
        unknown = set(conf) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        # flags win: only fill values the command line left unset
        explicit = _explicit_dests(parser, argv)
        for k, v in conf.items():
            if k not in explicit and k not in ("command", "config"):
                setattr(args, k, v)
    default_s = [0.5] if args.command == "vortex" else list(DEFAULT_S)
    s_values = _flat_floats(args.s, "s") if args.s is not None else default_s
    if args.s is not None and not s_values:
        raise UsageError("s list is empty")
    grid, options, tols = {}, {}, {}
    if args.command != "vortex":
        grid["x"] = _flat_floats(args.x, "x") if args.x is not None else list(DEFAULT_X)
        grid["y"] = _flat_floats(args.y, "y") if args.y is not None else list(DEFAULT_Y)
        grid["half_width"] = float(args.half_width)
        if not grid["half_width"] > 0:
            raise UsageError("half-width must be positive")
    if args.command in GROUPS:
        ident = _flat_words(args.identity) if args.identity else list(GROUPS[args.command])
        bad = [i for i in ident if i not in IDENTITY_IDS]
        if bad or not ident:
            raise UsageError(f"unknown identities {bad}; choices: {', '.join(IDENTITY_IDS)}")
        options["identities"] = ident
        options["dim"] = int(args.dim)
        tols = _parse_tols(args.tol)
        unknown = set(tols) - set(IDENTITY_IDS)
        if unknown:
            raise UsageError(f"tolerance override for unknown identities {sorted(unknown)}")
    if args.command == "vortex":
        for k in ("pair_equal", "pair_opposite", "three", "disk", "positions", "strengths", "gamma", "d",
                  "r0", "T", "dt", "method", "flow", "every", "max_drift"):
            options[k] = getattr(args, k)
    fmt = args.format or ("csv" if args.command == "vortex" else "json")
    return RunConfig(args.command, s_values, grid, tols, args.output, fmt, options)


def _explicit_dests(parser, argv):
    """Destinations set explicitly on the command line (long flags only)."""
    dests = set()
    for tok in argv:
        if tok == "-o":
            dests.add("output")
        elif tok.startswith("--"):
            dests.add(tok[2:].split("=", 1)[0].replace("-", "_"))
    return dests


def _identity_reports(cfg: RunConfig, log):
    dom = IntervalDomain(cfg.grid["half_width"])
    reg = _registry(dom, cfg.options["dim"])
    xs = [x * 1.0 for x in cfg.grid["x"]]
    ys = [y * 1.0 for y in cfg.grid["y"]]
    for x in xs + ys:
        if not abs(x) < dom.half_width:
            raise UsageError(f"grid point {x} is outside (-{dom.half_width}, {dom.half_width})")
    reports, skipped = [], set()
    for ident in cfg.options["identities"]:
        kind, fn = reg[ident]
        for s in cfg.s_values:
            p = FracParams(s)
            if kind == "point":
                calls = [(x,) for x in xs]
            elif kind == "pair":
                calls = [(x, y) for x in xs for y in ys if x != y]
            else:
                calls = [()]
            for args in calls:
                try:
                    rep = fn(p, *args)
                except UnsupportedOrderError as exc:
                    if (ident, s) not in skipped:
                        log(f"skipped {ident} at s={s}: {exc}")
                        skipped.add((ident, s))
                    continue
                if ident in cfg.tolerances:
                    rep = with_tol(rep, cfg.tolerances[ident])
                reports.append(rep)
    return reports


def _table(rows, fmt):
    if fmt == "json":
        from .report import _fmt
        return _fmt(rows, 2, 0) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    cols = list(rows[0]) if rows else []
    w.writerow(cols)
    for r in rows:
        w.writerow([format(r[c], ".17g") if isinstance(r[c], float) else r[c] for c in cols])
    return buf.getvalue()


def _green_rows(cfg, log):
    dom = IntervalDomain(cfg.grid["half_width"])
    rows = []
    for s in cfg.s_values:
        p = FracParams(s)
        for x in cfg.grid["x"]:
            for y in cfg.grid["y"]:
                if x == y:
                    continue
                try:
                    dom.require_interior(x, y)
                    g, gx, gy, _ = green_arrays(p, x, y, dom)
                except UnsupportedOrderError as exc:
                    log(f"skipped s={s}: {exc}")
                    break
                rows.append({"s": s, "x": float(x), "y": float(y), "G": float(g), "dGdx": float(gx),
                             "dGdy": float(gy)})
    return rows


def _robin_rows(cfg, log):
    dom = IntervalDomain(cfg.grid["half_width"])
    rows = []
    for s in cfg.s_values:
        p = FracParams(s)
        for x in cfg.grid["x"]:
            try:
                r, dr = robin(p, x, dom)
            except UnsupportedOrderError as exc:
                log(f"skipped s={s}: {exc}")
                break
            rows.append({"s": s, "x": float(x), "R": r, "dR": dr})
    return rows


def _vortex_start(o):
    g, d = o["gamma"], o["d"]
    if o["positions"]:
        pos = [_flat_floats([pt], "positions") for pt in str(o["positions"]).split(";") if pt.strip()]
        if any(len(pt) != 2 for pt in pos):
            raise UsageError("positions must be 'x,y' pairs separated by ';'")
        gam = _flat_floats([o["strengths"]], "strengths") if o["strengths"] else [g] * len(pos)
        return pos, gam
    if o["pair_opposite"]:
        return [[-0.5 * d, 0.0], [0.5 * d, 0.0]], [g, -g]
    if o["three"]:
        return [[1.0, 0.0], [-0.5, 0.8], [-0.3, -0.9]], [g, 0.7 * g, 1.3 * g]
    return [[-0.5 * d, 0.0], [0.5 * d, 0.0]], [g, g]


def _run_vortex(cfg, log):
    o = cfg.options
    if len(cfg.s_values) != 1:
        raise UsageError("vortex runs take exactly one s value")
    s = cfg.s_values[0]
    if not (o["dt"] > 0 and o["T"] > 0 and o["every"] >= 1):
        raise UsageError("dt, T and every must be positive")
    try:
        step_cfg = vx.StepperConfig(method=o["method"], dt=o["dt"], flow=o["flow"])
        if o["disk"]:
            traj = vx.single_vortex_in_disk([o["r0"], 0.0], step_cfg, FracParams(s, 2), o["T"])
        else:
            pos, gam = _vortex_start(o)
            state = vx.VortexState(0.0, pos, gam)
            traj = vx.run_trajectory(state, step_cfg, FracParams(s, 2), o["T"])
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    drift = traj.drift()
    keys = ("H", "I") if o["disk"] else ("H", "M", "I")
    log(f"termination={traj.termination} " + " ".join(f"drift {k}={drift[k]:.3g}" for k in keys))
    buf = io.StringIO()
    traj.write_csv(buf, every=o["every"])
    ok = traj.termination == "horizon"
    if o["max_drift"] is not None:
        ok = ok and all(drift[k] <= o["max_drift"] for k in keys)
    return buf.getvalue(), ok


def run(cfg: RunConfig, log=None) -> int:
    """Execute a configuration; returns the exit status."""
    log = log or (lambda msg: print(msg, file=sys.stderr))
    if cfg.command in GROUPS:
        reports = _identity_reports(cfg, log)
        text = reports_to_json(reports) if cfg.format == "json" else reports_to_csv(reports)
        ok = all(r.passed for r in reports if r.gated)
        failed = [r for r in reports if r.gated and not r.passed]
        for r in failed:
            log(r.summary())
        log(f"{len(reports)} reports, {len(failed)} gated failures")
    elif cfg.command == "green":
        text, ok = _table(_green_rows(cfg, log), cfg.format), True
    elif cfg.command == "robin":
        text, ok = _table(_robin_rows(cfg, log), cfg.format), True
    else:
        text, ok = _run_vortex(cfg, log)
    if cfg.output_path in ("-", "", None):
        sys.stdout.write(text)
    else:
        Path(cfg.output_path).write_text(text)
    return 0 if ok else 1


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        cfg = parse_config(argv)
        return run(cfg)
    except SystemExit as exc:  # argparse usage errors
        return int(exc.code) if isinstance(exc.code, int) else 2
    except UsageError as exc:
        print(f"frax: error: {exc}", file=sys.stderr)
        return 2
    except (FraxError, OSError) as exc:
        print(f"frax: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

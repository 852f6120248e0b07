"""Command-line front end.

Exit status: 0 on success, 2 on invalid designs or rates, 3 when a search
finds nothing, 64 on usage errors.
"""

import argparse
import configparser
import csv
import io
import json
import os
import sys
from pathlib import Path

from . import oc, tables
from .design import Design, DesignError, Rates, format_real
from .duration import design_parameters, duration_pmf
from .search import (
    BUDGET_MODES,
    CRITERIA,
    InfeasibleError,
    SearchSpec,
    SuggestedFilter,
    enumerate_feasible,
    select,
    simon_designs,
)
from .simulate import SimConfig, simulate

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_USAGE = 0, 2, 3, 64
FORMAT_ENV = "TWOSTAGE_FORMAT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _fmt(value):
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6f}"
    if value is None:
        return ""
    return str(value)


def _write_csv(out, header, rows):
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def _write_json(out, payload):
    json.dump(payload, out, indent=2)
    out.write("\n")


# argument groups -----------------------------------------------------------

def _add_design(p, stage2=True):
    p.add_argument("--n1", type=int)
    p.add_argument("--r1", type=int)
    if stage2:
        p.add_argument("--n2", type=int)
        p.add_argument("--r2", type=int)
        p.add_argument("--t1", type=float)
        p.add_argument("--t2", type=float)


def _add_rates(p, p2=True):
    p.add_argument("--p1", type=float)
    if p2:
        p.add_argument("--p2", type=float)


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s): {', '.join(missing)}")


def _design(args):
    _require(args, "n1", "n2", "r1", "r2")
    return Design(args.n1, args.n2, args.r1, args.r2, args.t1, args.t2)


def _rates(args):
    _require(args, "p1", "p2")
    return Rates(args.p1, args.p2)


def _grid(args, stop):
    if args.grid:
        return [float(v) for v in args.grid.split(",")]
    return oc.probability_grid(stop, args.step)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--config", type=Path, help="key = value file; flags override it")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--output", type=Path, help="write here instead of standard output")

    parser = _Parser(prog="twostage", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("oc", parents=[common], help="operating characteristics of one design")
    _add_design(p)
    _add_rates(p)

    p = sub.add_parser("search", parents=[common], help="enumerate and select designs")
    p.add_argument("--total-n", type=int, default=tables.TOTAL_N)
    p.add_argument("--budget", choices=BUDGET_MODES, default="exact-total")
    p.add_argument("--alpha", type=float, default=tables.ALPHA)
    p.add_argument("--p1", type=float, default=tables.NULL.p1)
    p.add_argument("--p2", type=float, default=tables.NULL.p2)
    p.add_argument("--alt-p1", type=float, help="defaults to --p1")
    p.add_argument("--alt-p2", type=float, default=tables.ALT.p2)
    p.add_argument("--criterion", choices=CRITERIA + ("simon",), default="suggested")
    p.add_argument("--alpha-window", type=float, nargs=2, metavar=("LOW", "HIGH"))
    p.add_argument("--early-stop-window", type=float, nargs=2, metavar=("LOW", "HIGH"),
                   default=(0.05, 0.2))
    p.add_argument("--stage1-ratio", type=float, default=0.5)
    p.add_argument("--all-ties", action="store_true", help="print every tied design")
    p.add_argument("--power", type=float, default=tables.SIMON_POWER, help="simon only")
    p.add_argument("--n-max", type=int, default=tables.SIMON_N_MAX, help="simon only")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("curve", parents=[common], help="power or early-stopping curve")
    _add_design(p)
    p.add_argument("--kind", choices=("power", "early-stop"), default="power")
    p.add_argument("--p1", type=float, help="fixed Stage-1 rate (power curves)")
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--grid", help="comma-separated grid instead of --step")
    p.add_argument("--plot", type=Path, help="also render the curve to this image file")

    p = sub.add_parser("surface", parents=[common], help="power over the (p1, p2) triangle")
    _add_design(p)
    p.add_argument("--step", type=float, default=0.01)
    p.add_argument("--null-p1", type=float)
    p.add_argument("--null-p2", type=float)
    p.add_argument("--plot", type=Path, help="also render the surface to this image file")

    p = sub.add_parser("stage1", parents=[common], help="Stage-1 decision-time distribution")
    _add_design(p, stage2=False)
    _add_rates(p, p2=False)
    p.add_argument("--s", type=int, help="successes needed (instead of --n1/--r1)")
    p.add_argument("--t", type=int, help="failures needed (instead of --n1/--r1)")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo check (JSON report)")
    _add_design(p)
    _add_rates(p)
    p.add_argument("--replicates", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("tables", parents=[common], help="regenerate the reference tables")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--figures", type=Path, help="directory for rendered figures and their data")
    return parser


def _read_config(path):
    """Flat ``key = value`` lines; keys are option names with - or _."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    cp = configparser.ConfigParser(delimiters=("=", ":"), comment_prefixes=("#", ";"))
    try:
        cp.read_string("[config]\n" + text)
    except configparser.Error as exc:
        raise UsageError(f"bad config {path}: {exc}") from None
    return {k.replace("-", "_"): v for k, v in cp["config"].items()}


def _apply_config(parser, argv, args):
    """Re-parse with config-file values as defaults so flags still win."""
    values = _read_config(args.config)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, raw in values.items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        try:
            if action.nargs == 2:
                defaults[key] = [action.type(v) for v in raw.replace(",", " ").split()]
            elif action.const is True:
                defaults[key] = raw.strip().lower() in ("1", "true", "yes", "on")
            elif action.type is not None:
                defaults[key] = action.type(raw)
            else:
                defaults[key] = raw
        except ValueError:
            raise UsageError(f"bad value for config key {key!r}: {raw!r}") from None
        if action.choices is not None and defaults[key] not in action.choices:
            raise UsageError(f"bad value for config key {key!r}: {raw!r}")
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


# subcommands -----------------------------------------------------------------

def _cmd_oc(args, out, fmt):
    design, rates = _design(args), _rates(args)
    result = oc.operating_characteristics(design, rates)
    record = {**design.to_record(), **rates.to_record(), **result.to_record()}
    if fmt == "json":
        _write_json(out, record)
    else:
        row = []
        for key, value in record.items():
            if key in ("t1", "t2", "p1", "p2") and value is not None:
                value = format_real(value)
            row.append(value)
        _write_csv(out, list(record), [row])


SEARCH_HEADER = ("label", "n1", "n2", "r1", "r2", "exact_alpha", "ess_bound",
                 "early_stop_prob", "power_alt")


def _ranked_record(label, rd):
    return {
        "label": label,
        "design": rd.design.to_record(),
        "oc_null": rd.oc_null.to_record(),
        "oc_alt": rd.oc_alt.to_record(),
        "criterion_value": rd.criterion_value,
    }


def _cmd_search(args, out, fmt):
    null = Rates(args.p1, args.p2)
    alt = Rates(args.p1 if args.alt_p1 is None else args.alt_p1, args.alt_p2)
    if args.criterion == "simon":
        # both looks count the same outcome: one rate per hypothesis
        result = simon_designs(null.p2, alt.p2, args.alpha, args.power, args.n_max)
        labeled = [("simon-optimal", result.optimal), ("simon-minimax", result.minimax)]
    else:
        window = tuple(args.alpha_window) if args.alpha_window else None
        spec = SearchSpec(
            total_n=args.total_n,
            alpha_target=args.alpha,
            null_rates=null,
            alt_rates=alt,
            criterion=args.criterion,
            budget_mode=args.budget,
            suggested_filter=SuggestedFilter(window, tuple(args.early_stop_window),
                                             args.stage1_ratio),
        )
        chosen = select(spec, enumerate_feasible(spec, workers=args.workers))
        if args.criterion != "suggested" and not args.all_ties:
            chosen = chosen[:1]
        labeled = [(args.criterion, rd) for rd in chosen]

    if fmt == "json":
        _write_json(out, [_ranked_record(label, rd) for label, rd in labeled])
    else:
        rows = []
        for label, rd in labeled:
            d = rd.design
            rows.append((label, d.n1, d.n2, d.r1, d.r2, rd.oc_null.reject_prob,
                         rd.oc_null.ess_bound, rd.oc_null.early_stop_prob, rd.oc_alt.reject_prob))
        _write_csv(out, SEARCH_HEADER, rows)


def _cmd_curve(args, out, fmt):
    design = _design(args)
    if args.kind == "power":
        _require(args, "p1")
        curve = oc.power_curve(design, args.p1, _grid(args, args.p1))
        header, points = ("p2", "reject_prob"), list(curve.grid)
    else:
        points = oc.early_stop_curve(design, _grid(args, 1.0))
        header = ("p1", "early_stop_prob")
    if fmt == "json":
        _write_json(out, [dict(zip(header, pt)) for pt in points])
    else:
        _write_csv(out, header, points)
    if args.plot:
        from . import plotting

        label = f"n1={design.n1} n2={design.n2} r1={design.r1} r2={design.r2}"
        if args.kind == "power":
            plotting.plot_power_curves({label: points}, args.plot)
        else:
            plotting.plot_early_stop_curves({label: points}, args.plot)


def _cmd_surface(args, out, fmt):
    design = _design(args)
    grid = _grid(argparse.Namespace(grid=None, step=args.step), 1.0)
    surface = oc.power_surface(design, grid, grid)
    header = ("p1", "p2", "reject_prob")
    cells = list(surface.cells())
    if fmt == "json":
        _write_json(out, [dict(zip(header, c)) for c in cells])
    else:
        _write_csv(out, header, cells)
    if args.plot:
        from . import plotting

        null = None
        if args.null_p1 is not None and args.null_p2 is not None:
            null = (args.null_p1, args.null_p2)
        plotting.plot_power_surface(surface, args.plot, null=null)


def _cmd_stage1(args, out, fmt):
    _require(args, "p1")
    if args.s is not None or args.t is not None:
        _require(args, "s", "t")
        s, t = args.s, args.t
    else:
        _require(args, "n1", "r1")
        s, t = design_parameters(Design(args.n1, 0, args.r1, 0))
    dist = duration_pmf(s, t, args.p1)
    if fmt == "json":
        _write_json(out, {
            "s": s, "t": t, "p": args.p1,
            "pmf": [{"y": y, "probability": w} for y, w in dist.pmf.items()],
            "mean": dist.mean, "sd": dist.sd,
        })
    else:
        rows = list(dist.pmf.items()) + [("mean", dist.mean), ("sd", dist.sd)]
        _write_csv(out, ("y", "probability"), rows)


def _cmd_simulate(args, out, fmt):
    config = SimConfig(_design(args), _rates(args), args.replicates, args.seed)
    report = simulate(config, workers=args.workers)
    record = {**config.design.to_record(), **config.rates.to_record(), **report.to_record()}
    _write_json(out, record)


def _table_payload(rows, durations):
    t2 = [dict(zip(tables.TABLE2_HEADER, r.values())) for r in rows]
    for rec in t2:
        for key in ("simon_r1", "simon_r2"):
            if rec[key] == "":
                rec[key] = None
    t3 = [dict(zip(tables.TABLE3_HEADER, r)) for r in durations]
    return {"table2": t2, "table3": t3}


def _cmd_tables(args, out, fmt):
    rows = tables.design_table(workers=args.workers)
    durations = tables.duration_table(rows)
    if fmt == "json":
        _write_json(out, _table_payload(rows, durations))
    else:
        _write_csv(out, tables.TABLE2_HEADER, [r.values() for r in rows])
        out.write("\n")
        _write_csv(out, tables.TABLE3_HEADER, durations)
    if args.figures:
        from .figures import render_reference_figures

        render_reference_figures(rows, args.figures)


COMMANDS = {
    "oc": _cmd_oc,
    "search": _cmd_search,
    "curve": _cmd_curve,
    "surface": _cmd_surface,
    "stage1": _cmd_stage1,
    "simulate": _cmd_simulate,
    "tables": _cmd_tables,
}


def run(argv=None, stdout=None, stderr=None):
    """Parse ``argv``, run the subcommand and return its exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:  # --help
            return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
        if args.config is not None:
            args = _apply_config(parser, argv, args)
        fmt = args.format or os.environ.get(FORMAT_ENV, "csv")
        if fmt not in ("csv", "json"):
            raise UsageError(f"{FORMAT_ENV} must be csv or json, got {fmt!r}")
        buffer = io.StringIO()
        COMMANDS[args.command](args, buffer, fmt)
    except UsageError as exc:
        parser.print_usage(stderr)
        print(exc, file=stderr)
        return EXIT_USAGE
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=stderr)
        return EXIT_INFEASIBLE
    except (DesignError, ValueError) as exc:
        print(f"invalid: {exc}", file=stderr)
        return EXIT_INVALID
    if args.output:
        args.output.write_text(buffer.getvalue())
    else:
        stdout.write(buffer.getvalue())
    return EXIT_OK


def main():
    sys.exit(run())

"""Command-line interface (``pplab <command> ...``)."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import mpmath

from . import __version__, asymptotics, experiment, sampler, series, verify
from .partitions import enumerate_plane_partitions


def _grid(text: str) -> list[float]:
    vals = []
    for tok in str(text).replace(" ", "").split(","):
        if tok:
            v = float(tok)
            vals.append(int(v) if v.is_integer() and "." not in tok else v)
    if not vals:
        raise argparse.ArgumentTypeError("empty grid")
    return vals


def read_config(path) -> dict[str, str]:
    """``key=value`` lines; blank lines and ``#`` comments are skipped."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value")
        k, v = line.split("=", 1)
        out[k.strip().replace("-", "_")] = v.strip()
    return out


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _rows_to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands


def cmd_counts(a) -> int:
    s = series.plane_partition_counts(a.max) if a.kind == "q" else series.linear_partition_counts(a.max)
    _emit(s.to_json() + "\n" if a.format == "json" else s.to_csv(), a.output)
    return 0


def cmd_enumerate(a) -> int:
    _emit("".join(w.to_json() + "\n" for w in enumerate_plane_partitions(a.n)), a.output)
    return 0


def cmd_trace_dist(a) -> int:
    t = series.trace_series(a.max)
    _emit(t.to_json() + "\n" if a.format == "json" else t.to_csv(), a.output)
    return 0


def cmd_xdist(a) -> int:
    t = series.x_distribution_exact(a.max, a.m, exact=False if a.float else None)
    _emit(t.to_json() + "\n" if a.format == "json" else t.to_csv(), a.output)
    return 0


def cmd_sample(a) -> int:
    matrices, report = sampler.sample_batch(a.n, a.count, a.seed, a.workers)
    _emit("".join(sampler.decode(M).to_json() + "\n" for M in matrices), a.output)
    d = report.to_dict()
    if not a.timing:
        d.pop("elapsed")
    text = json.dumps(d, sort_keys=True) + "\n"
    if a.report:
        Path(a.report).write_text(text)
    else:
        sys.stderr.write(text)
    return 0


def cmd_asymptotics(a) -> int:
    header = ["n", "d_expansion", "d_exact", "delta", "u", "m", "wright", "hardy_ramanujan"]
    rows = []
    for n in a.n_grid:
        sd = asymptotics.saddle_data(n)
        m = asymptotics.threshold_m(n, a.c).m_real if n >= 3 else None
        vals = [sd.d_expansion, sd.d_exact, sd.delta, sd.u, m,
                asymptotics.wright_estimate(n), asymptotics.hardy_ramanujan_estimate(n)]
        rows.append([n] + ["" if v is None else mpmath.nstr(v, 15) for v in vals])
    if a.format == "csv":
        text = _rows_to_csv(header, rows)
    elif a.format == "json":
        text = json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    else:
        widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
        text = "".join(
            "  ".join(str(x).rjust(w) for x, w in zip(r, widths)) + "\n" for r in [header] + rows
        )
    _emit(text, a.output)
    return 0


def cmd_experiment(a) -> int:
    cfg = experiment.ExperimentConfig(
        n=a.n, c=a.c, samples=a.samples, seed=a.seed, workers=a.workers,
        mode=a.mode, output=a.output, format="json", timing=a.timing,
    )
    _emit(experiment.run_poisson_experiment(cfg).to_json(), a.output)
    return 0


SUITES = {
    "identities": lambda a: verify.run_identity_suite(a.n_max, a.r_max, a.l_max),
    "bijections": lambda a: verify.run_bijection_suite(),
    "sampler": lambda a: verify.run_sampler_suite(draws=a.draws, seed=a.seed),
    "prop1": lambda a: verify.run_prop1_suite(),
}


def cmd_verify(a) -> int:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    reports = [SUITES[s](a) for s in names]
    if a.format == "json":
        text = json.dumps([r.to_dict() for r in reports], indent=2) + "\n"
    else:
        text = "".join(f"== {r.suite}\n{r.to_text()}\n" for r in reports)
    _emit(text, a.output)
    return 0 if all(r.passed for r in reports) else 1


def cmd_scan(a) -> int:
    rows = experiment.convergence_scan(a.n_grid, a.c, a.y_grid)
    _emit(experiment.scan_to_csv(rows), a.output)
    return 0


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="pplab", description="Plane partition counting, sampling and limit laws.", allow_abbrev=False
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--config", help="key=value file supplying defaults; flags override")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        sp = sub.add_parser(name, help=help, allow_abbrev=False)
        sp.set_defaults(func=func)
        sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        return sp

    sp = add("counts", cmd_counts, "p(n) or q(n) for n <= N")
    sp.add_argument("--kind", choices=["p", "q"], default="q")
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = add("enumerate", cmd_enumerate, "all plane partitions of n as JSON lines")
    sp.add_argument("--n", type=int, required=True)

    sp = add("trace-dist", cmd_trace_dist, "trace generating function table")
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = add("xdist", cmd_xdist, "joint counts of weight and units of size > m")
    sp.add_argument("--max", type=int, required=True)
    sp.add_argument("--m", type=float, required=True)
    sp.add_argument("--float", action="store_true", help="normalized double-precision rows")
    sp.add_argument("--format", choices=["csv", "json"], default="csv")

    sp = add("sample", cmd_sample, "uniform random plane partitions as JSON lines")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--report", help="file for the batch report (default stderr)")
    sp.add_argument("--timing", action="store_true", help="include elapsed time in the report")

    sp = add("asymptotics", cmd_asymptotics, "saddle points, thresholds and count estimates")
    sp.add_argument("--n-grid", type=_grid, required=True)
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--format", choices=["text", "csv", "json"], default="text")

    sp = add("experiment", cmd_experiment, "Poisson-limit experiment report (JSON)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--mode", choices=["mc", "exact", "both", "monte-carlo"], default="both")
    sp.add_argument("--timing", action="store_true", help="include wall time in the report")

    sp = add("verify", cmd_verify, "run verification suites; exit 1 on any failure")
    sp.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    sp.add_argument("--n-max", type=int, default=12)
    sp.add_argument("--r-max", type=int, default=3)
    sp.add_argument("--l-max", type=int, default=3)
    sp.add_argument("--draws", type=int, default=100_000)
    sp.add_argument("--seed", type=int, default=2024)
    sp.add_argument("--format", choices=["text", "json"], default="text")

    sp = add("scan", cmd_scan, "convergence scan toward the Poisson limit (CSV)")
    sp.add_argument("--n-grid", type=_grid, required=True)
    sp.add_argument("--c", type=float, default=0.0)
    sp.add_argument("--y-grid", type=_grid, default=[0.0, 0.5])
    return p


def _apply_config(parser: argparse.ArgumentParser, argv) -> argparse.Namespace:
    pre = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return parser.parse_args(argv)
    values = read_config(known.config)
    sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    for sp in sub_action.choices.values():
        defaults = {}
        for action in sp._actions:
            if action.dest in values:
                raw = values[action.dest]
                if isinstance(action, argparse._StoreTrueAction):
                    defaults[action.dest] = raw.lower() in ("1", "true", "yes", "on")
                else:
                    defaults[action.dest] = action.type(raw) if action.type else raw
                action.required = False
        sp.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

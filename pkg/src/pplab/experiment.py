"""Poisson-limit experiments, the saddle-point check and convergence scans."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath

from . import __version__, asymptotics, sampler, series
from ._precision import WORKING_DPS
from .bijections import CorrespondenceMatrix
from .distributions import DistributionTable, poisson_table, tv_distance
from .partitions import x_statistic

log = logging.getLogger(__name__)

MODES = ("mc", "exact", "both")
_MODE_ALIASES = {"monte-carlo": "mc", "montecarlo": "mc"}


@dataclass(frozen=True)
class ExperimentConfig:
    n: int
    c: float = 0.0
    samples: int = 10_000
    seed: int = 0
    workers: int = 1
    mode: str = "both"
    output: str | None = None
    format: str = "json"
    timing: bool = False

    def __post_init__(self):
        object.__setattr__(self, "mode", _MODE_ALIASES.get(self.mode, self.mode))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.n < 3:
            raise ValueError("experiments need n >= 3")

    def to_dict(self) -> dict:
        # where the report is written does not change its content
        d = asdict(self)
        del d["output"]
        return d


@dataclass
class PoissonReport:
    n: int
    c: float
    m_real: str
    m_int: int
    lambda_target: float
    seed: int
    mode: str
    empirical: dict | None = None
    empirical_mean: float | None = None
    empirical_variance: float | None = None
    empirical_mean_stderr: float | None = None
    exact: dict | None = None
    exact_mean: str | None = None
    exact_mean_float: float | None = None
    exact_variance_float: float | None = None
    tv_empirical_vs_poisson: float | None = None
    tv_exact_vs_poisson: float | None = None
    tv_empirical_vs_exact: float | None = None
    literal_part_statistic: dict | None = None
    sampler: dict | None = None
    warnings: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    version: str = __version__
    runtime: float | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        if d["runtime"] is None:
            del d["runtime"]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


@lru_cache(maxsize=8)
def _exact_xdist(n: int, m: int) -> series.BivariateTable:
    return series.x_distribution_exact(n, m, exact=True)


def exact_law(n: int, m: int) -> DistributionTable:
    """Law of the number of units of size > m in a uniform plane partition of n."""
    row = _exact_xdist(n, m).row(n)
    total = sum(row.values())
    assert total == series.plane_partition_counts(n)[n]
    return DistributionTable({k: Fraction(v, total) for k, v in row.items()}, "exact", total)


def large_units(M: CorrespondenceMatrix, m: int) -> int:
    return sum(b for size, b in M.class_totals().items() if size > m)


def run_poisson_experiment(cfg: ExperimentConfig) -> PoissonReport:
    t0 = time.perf_counter()
    spec = asymptotics.threshold_m(cfg.n, cfg.c)
    m = spec.m_int
    lam = float(asymptotics.poisson_mean_plane(cfg.c))
    poisson = poisson_table(lam)
    rep = PoissonReport(
        n=cfg.n,
        c=cfg.c,
        m_real=mpmath.nstr(spec.m_real, 20),
        m_int=m,
        lambda_target=lam,
        seed=cfg.seed,
        mode=cfg.mode,
        config=cfg.to_dict(),
    )
    mode = cfg.mode
    if mode in ("exact", "both") and cfg.n > series.EXACT_BIVARIATE_LIMIT:
        msg = f"n={cfg.n} exceeds the exact table limit {series.EXACT_BIVARIATE_LIMIT}; using monte-carlo only"
        log.warning(msg)
        rep.warnings.append(msg)
        mode = "mc"
    emp = exact = lit = None
    if mode in ("mc", "both"):
        matrices, batch = sampler.sample_batch(cfg.n, cfg.samples, cfg.seed, cfg.workers)
        counts = Counter(large_units(M, m) for M in matrices)
        literal = Counter(x_statistic(sampler.decode(M), m) for M in matrices)
        emp = DistributionTable.from_counts(counts)
        mean, var = float(emp.mean()), float(emp.variance())
        rep.empirical = emp.to_dict()
        rep.empirical_mean = mean
        rep.empirical_variance = var
        rep.empirical_mean_stderr = math.sqrt(var / cfg.samples)
        rep.tv_empirical_vs_poisson = tv_distance(emp, poisson)
        lit = DistributionTable.from_counts(literal)
        rep.literal_part_statistic = {
            "table": lit.to_dict(),
            "mean": float(lit.mean()),
            "tv_vs_poisson": tv_distance(lit, poisson),
        }
        rep.sampler = {
            "u": batch.u,
            "trials": str(batch.trials),
            "acceptance_rate": batch.acceptance_rate,
            "wilson_99": [batch.wilson_low, batch.wilson_high],
            "workers": cfg.workers,
        }
    if mode in ("exact", "both"):
        exact = exact_law(cfg.n, m)
        mean = exact.mean()
        rep.exact = exact.to_dict()
        rep.exact_mean = str(mean)
        rep.exact_mean_float = float(mean)
        rep.exact_variance_float = float(exact.variance())
        rep.tv_exact_vs_poisson = tv_distance(exact, poisson)
    if emp is not None and exact is not None:
        rep.tv_empirical_vs_exact = tv_distance(emp, exact)
        rep.literal_part_statistic["tv_vs_exact"] = tv_distance(lit, exact)
    if cfg.timing:
        rep.runtime = time.perf_counter() - t0
    return rep


def proposition1_check(n: int, m: int, y: float) -> dict:
    """Compare ``sum_k count(n,k) y^k / q(n)`` with ``f_m(e^-d_n, y)``."""
    if not 0 <= y <= 1:
        raise ValueError("y must lie in [0,1]")
    if n > series.EXACT_BIVARIATE_LIMIT:
        raise ValueError(f"n must be <= {series.EXACT_BIVARIATE_LIMIT} for the exact table")
    m = int(m)
    row = _exact_xdist(n, m).row(n)
    yq = Fraction(y)
    lhs_exact = sum(v * yq**k for k, v in row.items()) / series.plane_partition_counts(n)[n]
    with mpmath.workdps(WORKING_DPS):
        lhs = mpmath.mpf(lhs_exact.numerator) / lhs_exact.denominator
        u = mpmath.exp(-asymptotics.saddle_exact(n))
        rhs = series.evaluate_f_m(u, y, m)
        gap = abs(lhs - rhs) / rhs
    return {"n": n, "m": m, "y": y, "lhs": float(lhs), "rhs": float(rhs), "relative_gap": float(gap)}


SCAN_COLUMNS = ("n", "m_real", "m_int", "u", "exact_mean", "mean_gap", "tv_exact_vs_poisson")


def convergence_scan(n_grid, c: float, y_grid, exact_limit: int = series.EXACT_BIVARIATE_LIMIT) -> list[dict]:
    """One row per n (sorted), with exact-law columns left empty above ``exact_limit``."""
    n_grid = sorted(set(int(n) for n in n_grid))
    if not n_grid:
        raise ValueError("n grid must not be empty")
    lam = float(asymptotics.poisson_mean_plane(c))
    poisson = poisson_table(lam)
    rows = []
    for n in n_grid:
        spec = asymptotics.threshold_m(n, c)
        d = asymptotics.saddle_exact(n)
        with mpmath.workdps(WORKING_DPS):
            u = mpmath.exp(-d)
        row = {
            "n": n,
            "m_real": mpmath.nstr(spec.m_real, 12),
            "m_int": spec.m_int,
            "u": mpmath.nstr(u, 15),
            "exact_mean": "",
            "mean_gap": "",
            "tv_exact_vs_poisson": "",
        }
        if n <= exact_limit:
            law = exact_law(n, spec.m_int)
            mean = float(law.mean())
            row.update(exact_mean=repr(mean), mean_gap=repr(abs(mean - lam)),
                       tv_exact_vs_poisson=repr(tv_distance(law, poisson)))
        for y in y_grid:
            f = float(series.evaluate_f_m(u, y, spec.m_int))
            lim = float(asymptotics.limit_pgf_plane(c, y))
            row[f"f_y{y}"] = repr(f)
            row[f"limit_y{y}"] = repr(lim)
            row[f"gap_y{y}"] = repr(abs(f - lim))
        rows.append(row)
    return rows


def scan_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()

"""Verification suites: enumeration against series, bijections, sampler, saddle point."""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath
import numpy as np
from scipy import stats

from . import asymptotics, sampler, series
from .bijections import (
    CorrespondenceMatrix,
    bender_knuth_inverse,
    bender_knuth_map,
    knuth_inverse,
    knuth_map,
    matrix_to_plane_partition,
    row_label_counts,
    unit_size_counts,
)
from .partitions import (
    conjugate_trace,
    enumerate_plane_partitions,
    enumerate_restricted,
    part_counts,
    trace,
    x_statistic,
)


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "checks": [c.__dict__ for c in self.checks],
            "notes": self.notes,
        }

    def to_text(self) -> str:
        lines = [f"[{'PASS' if c.passed else 'FAIL'}] {c.name}" + (f": {c.detail}" if c.detail else "") for c in self.checks]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


# --------------------------------------------------------------------------
# identities


def probe_points(variables: int, count: int = 8, seed: int = 7) -> list[list[Fraction]]:
    """``count`` rational probe vectors; each coordinate takes distinct values."""
    rnd = random.Random(seed)
    columns = []
    for _ in range(variables):
        vals: set[Fraction] = set()
        while len(vals) < count:
            vals.add(Fraction(rnd.randint(1, 61), rnd.randint(1, 61)))
        col = sorted(vals)
        rnd.shuffle(col)
        columns.append(col)
    return [[columns[v][i] for v in range(variables)] for i in range(count)]


def _product_series(factors: list[tuple[Fraction, int]], N: int) -> list[Fraction]:
    """Expand ``prod (1 - c x^e)^(-1)`` up to degree N."""
    a = [Fraction(0)] * (N + 1)
    a[0] = Fraction(1)
    for c, e in factors:
        for n in range(e, N + 1):
            a[n] += c * a[n - e]
    return a


def restricted_identity(
    N: int, r: int, l: int, statistic: Callable, label: Callable[[int, int], int], probes
) -> tuple[bool, str]:
    """Compare ``sum_w prod_i y_i^stat_i(w) x^|w|`` with ``prod_{k<=l, j<=r} (1 - y_label x^(k+j-1))^-1``.

    ``label(j, k)`` names the variable attached to the factor of cell (j, k).
    """
    stats_by_n = [[statistic(w) for w in enumerate_restricted(n, r, l)] for n in range(N + 1)]
    for point in probes:
        y = lambda i: point[i - 1]
        rhs = _product_series(
            [(y(label(j, k)), k + j - 1) for k in range(1, l + 1) for j in range(1, r + 1)], N
        )
        for n in range(N + 1):
            lhs = Fraction(0)
            for counts in stats_by_n[n]:
                term = Fraction(1)
                for i, e in counts.items():
                    term *= y(i) ** e
                lhs += term
            if lhs != rhs[n]:
                return False, f"r={r} l={l} n={n} probe={[str(p) for p in point]}"
    return True, ""


def run_identity_suite(n_max: int = 12, r_max: int = 3, l_max: int = 3, restricted_n_max: int = 10) -> SuiteReport:
    rep = SuiteReport("identities")
    ts = series.trace_series(n_max)
    q = series.plane_partition_counts(n_max)
    enum = {n: list(enumerate_plane_partitions(n)) for n in range(n_max + 1)}

    # (a) trace and conjugate trace histograms
    bad = None
    for n in range(n_max + 1):
        want = ts.row(n)
        h_trace = dict(sorted(Counter(trace(w) for w in enum[n]).items()))
        h_ctrace = dict(sorted(Counter(conjugate_trace(w) for w in enum[n]).items()))
        if not (h_trace == h_ctrace == want and len(enum[n]) == q[n]):
            bad = n
            break
    rep.add(
        f"trace and conjugate-trace histograms equal trace_series for n<={n_max}",
        bad is None,
        "" if bad is None else f"smallest counterexample n={bad}",
    )

    # (b) restricted two-parameter identities
    N = min(n_max, restricted_n_max)
    for r in range(1, r_max + 1):
        for l in range(1, l_max + 1):
            ok, where = restricted_identity(
                N, r, l, row_label_counts, lambda j, k: j, probe_points(r)
            )
            rep.add(f"restricted identity, row labels marked (r={r}, l={l}, n<={N})", ok, where)
            ok, where = restricted_identity(
                N, r, l, unit_size_counts, lambda j, k: j + k - 1, probe_points(r + l - 1)
            )
            rep.add(f"restricted identity, unit sizes marked (r={r}, l={l}, n<={N})", ok, where)
    ok, where = restricted_identity(min(N, 6), 1, 2, part_counts, lambda j, k: j, probe_points(2))
    if not ok:
        rep.notes.append(
            "marking parts k >= h by their value k does not give the row-label product; "
            f"first mismatch {where}"
        )

    # (c) large-unit distributions
    units = {n: [unit_size_counts(w) for w in enum[n]] for n in enum}
    for m in (0, 1, 2, 3):
        xd = series.x_distribution_exact(n_max, m)
        bad = None
        literal_bad = None
        for n in range(n_max + 1):
            hist = dict(sorted(Counter(sum(c for s, c in u.items() if s > m) for u in units[n]).items()))
            if hist != xd.row(n):
                bad = n
                break
            literal = dict(sorted(Counter(x_statistic(w, m) for w in enum[n]).items()))
            if literal_bad is None and literal != hist:
                literal_bad = (n, literal, hist)
        rep.add(
            f"x_distribution_exact(m={m}) equals large-unit histograms for n<={n_max}",
            bad is None,
            "" if bad is None else f"smallest counterexample n={bad}",
        )
        if m == 0:
            rep.add(
                "m=0 table equals conjugate-trace histogram",
                all(xd.row(n) == ts.row(n) for n in range(n_max + 1)),
            )
        elif literal_bad is not None:
            n, lit, hist = literal_bad
            rep.notes.append(
                f"m={m}: parts > m with value >= row index are distributed differently "
                f"from large units from n={n} on ({lit} vs {hist})"
            )
    return rep


# --------------------------------------------------------------------------
# bijections


def matrices_of_weight(w: int) -> Iterator[CorrespondenceMatrix]:
    cells = [(j, s + 1 - j) for s in range(1, w + 1) for j in range(1, s + 1)]

    def rec(i: int, left: int, acc: dict) -> Iterator[dict]:
        if left == 0:
            yield dict(acc)
            return
        if i == len(cells):
            return
        j, k = cells[i]
        size = j + k - 1
        for b in range(left // size, -1, -1):
            if b:
                acc[(j, k)] = b
            yield from rec(i + 1, left - b * size, acc)
            acc.pop((j, k), None)

    for d in rec(0, w, {}):
        yield CorrespondenceMatrix.from_dict(d)


def run_bijection_suite(matrix_weight_max: int = 8, partition_weight_max: int = 10) -> SuiteReport:
    rep = SuiteReport("bijections")
    ts = series.trace_series(matrix_weight_max)
    q = series.plane_partition_counts(max(matrix_weight_max, partition_weight_max))
    failures = []
    for w in range(matrix_weight_max + 1):
        image = Counter()
        for M in matrices_of_weight(w):
            p = knuth_map(M)
            col = Counter(k for (j, k), b in M.items for _ in range(b))
            row = Counter(j for (j, k), b in M.items for _ in range(b))
            if Counter(v for _, _, v in p.first.cells()) != col or Counter(v for _, _, v in p.second.cells()) != row:
                failures.append(f"multiplicities w={w} {M.to_json()}")
            if knuth_inverse(p) != M or knuth_map(knuth_inverse(p)) != p:
                failures.append(f"knuth round trip w={w} {M.to_json()}")
            omega = bender_knuth_map(p)
            if bender_knuth_inverse(omega) != p:
                failures.append(f"bender-knuth round trip w={w} {M.to_json()}")
            if omega.weight != w or conjugate_trace(omega) != M.total:
                failures.append(f"chain statistics w={w} {M.to_json()}")
            if omega.largest_part != p.first.largest_part or omega.num_rows != p.second.largest_part:
                failures.append(f"largest parts w={w} {M.to_json()}")
            image[omega] += 1
        if len(image) != q[w] or any(v != 1 for v in image.values()):
            failures.append(f"image at weight {w} has {len(image)} distinct of {sum(image.values())}")
        if dict(sorted(Counter(conjugate_trace(o) for o in image).items())) != ts.row(w):
            failures.append(f"conjugate-trace histogram at weight {w}")
    rep.add(
        f"matrix side: multiplicities, round trips, chain image for weight<={matrix_weight_max}",
        not failures,
        "; ".join(failures[:3]),
    )
    bad = []
    for n in range(partition_weight_max + 1):
        for omega in enumerate_plane_partitions(n):
            p = bender_knuth_inverse(omega)
            if bender_knuth_map(p) != omega or matrix_to_plane_partition(knuth_inverse(p)) != omega:
                bad.append(omega.to_json())
    rep.add(f"partition side round trips for n<={partition_weight_max}", not bad, "; ".join(bad[:3]))
    return rep


# --------------------------------------------------------------------------
# sampler


def chi_square_uniform(n: int, draws: int, seed: int) -> tuple[float, float, int]:
    """Chi-square statistic of ``draws`` exact-size samples against uniform on Omega(n)."""
    params = sampler.default_params(n)
    matrices, _ = sampler.sample_matrices(params, draws, sampler.make_rng(seed))
    cells = {w: i for i, w in enumerate(enumerate_plane_partitions(n))}
    obs = np.zeros(len(cells))
    for M in matrices:
        obs[cells[sampler.decode(M)]] += 1
    expected = draws / len(cells)
    chi2 = float(((obs - expected) ** 2).sum() / expected)
    df = len(cells) - 1
    return chi2, float(stats.chi2.ppf(0.999, df)), df


def weight_law_check(u: float, draws: int, seed: int, k_max: int = 20, sigmas: float = 4.0) -> tuple[bool, float]:
    """Empirical Boltzmann weights against ``q(k) u^k / Q(u)``; returns worst z-score."""
    params = sampler.SamplerParams(k_max, u, sampler.underflow_cutoff(u))
    weights = sampler.boltzmann_weights(params, draws, sampler.make_rng(seed))
    q = series.plane_partition_counts(k_max)
    logQ = series.evaluate_log_Q(u)
    worst = 0.0
    for k in range(k_max + 1):
        p = float(q[k] * mpmath.mpf(u) ** k / mpmath.exp(logQ))
        sd = (draws * p * (1 - p)) ** 0.5
        z = abs(int(np.count_nonzero(weights == k)) - draws * p) / sd if sd > 0 else 0.0
        worst = max(worst, z)
    return worst <= sigmas, worst


def run_sampler_suite(draws: int = 100_000, seed: int = 2024, n: int = 8, weight_u: float = 0.3) -> SuiteReport:
    rep = SuiteReport("sampler")
    chi2, crit, df = chi_square_uniform(n, draws, seed)
    rep.add(f"chi-square uniformity at n={n} ({draws} draws, df={df})", chi2 < crit, f"{chi2:.2f} < {crit:.2f}")
    for u in (weight_u, sampler.saddle_parameter(n)):
        ok, z = weight_law_check(u, draws, seed + 1)
        rep.add(f"pre-rejection weight law at u={u:.6g}, k<=20", ok, f"max |z| = {z:.2f}")
    return rep


# --------------------------------------------------------------------------
# saddle point


def run_prop1_suite(n: int = 2000, n_ref: int = 500, ys=(0.0, 0.5), tol: float = 0.05) -> SuiteReport:
    from .experiment import proposition1_check

    rep = SuiteReport("prop1")
    m = asymptotics.threshold_m(n, 0).m_int
    m_ref = asymptotics.threshold_m(n_ref, 0).m_int
    for y in ys:
        big = proposition1_check(n, m, y)
        small = proposition1_check(n_ref, m_ref, y)
        rep.add(f"relative gap at n={n}, y={y}", big["relative_gap"] <= tol, f"{big['relative_gap']:.6f} <= {tol}")
        rep.add(
            f"gap shrinks from n={n_ref} to n={n}, y={y}",
            big["relative_gap"] < small["relative_gap"],
            f"{small['relative_gap']:.6f} -> {big['relative_gap']:.6f}",
        )
    return rep

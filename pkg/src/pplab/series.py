"""Exact truncated power series for partition generating functions.

Univariate coefficients come from the log-derivative recurrence
``n a(n) = sum_k g(k) a(n - k)``.  Bivariate tables are either built by
multiplying Euler factors directly (the trace series) or, for the large
part counts, by the Newton recurrence in y, where polynomial products are
done by Kronecker substitution into a single big integer.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from functools import lru_cache
from math import comb

import gmpy2
import mpmath
import numpy as np

from ._precision import TAIL_CUTOFF, WORKING_DPS

EXACT_BIVARIATE_LIMIT = 2000


@dataclass(frozen=True)
class BigIntSeries:
    coeffs: tuple[int, ...]
    kind: str = ""

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> int:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "value"])
        for n, c in enumerate(self.coeffs):
            w.writerow([n, str(c)])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"kind": self.kind, "order": self.order, "rows": [[n, str(c)] for n, c in enumerate(self.coeffs)]}
        )


@dataclass(frozen=True)
class BivariateTable:
    """Coefficients of ``y^t x^n`` for ``0 <= t <= n <= order``.

    ``entries`` holds only non-zero values.  With ``exact=False`` each
    x-degree row holds normalized probabilities (floats) instead of counts.
    """

    entries: dict[tuple[int, int], object]
    order: int
    kind: str = ""
    exact: bool = True
    params: dict = field(default_factory=dict)

    def row(self, n: int) -> dict[int, object]:
        return {t: v for (nn, t), v in sorted(self.entries.items()) if nn == n}

    def total(self, n: int):
        return sum(self.row(n).values())

    def max_degree(self, n: int) -> int:
        return max(self.row(n), default=0)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "t", "value"])
        for (n, t), v in sorted(self.entries.items()):
            w.writerow([n, t, str(v) if self.exact else repr(float(v))])
        return buf.getvalue()

    def to_json(self) -> str:
        rows = [[n, t, str(v) if self.exact else repr(float(v))] for (n, t), v in sorted(self.entries.items())]
        return json.dumps(
            {"kind": self.kind, "order": self.order, "exact": self.exact, "params": self.params, "rows": rows}
        )


# --------------------------------------------------------------------------
# divisor sums and univariate series


@lru_cache(maxsize=None)
def divisor_power_sum(k: int, r: int) -> int:
    if k < 1:
        raise ValueError("divisor sums need k >= 1")
    total = 0
    d = 1
    while d * d <= k:
        if k % d == 0:
            total += d**r
            e = k // d
            if e != d:
                total += e**r
        d += 1
    return total


def _sigma_table(N: int, r: int, max_divisor: int | None = None) -> list[int]:
    """``s[k] = sum of d^r over divisors d of k with d <= max_divisor``."""
    s = [0] * (N + 1)
    top = N if max_divisor is None else min(N, max_divisor)
    for d in range(1, top + 1):
        p = d**r
        for k in range(d, N + 1, d):
            s[k] += p
    return s


def _log_derivative_series(g: list[int], N: int) -> list[int]:
    a = [0] * (N + 1)
    a[0] = 1
    for n in range(1, N + 1):
        acc = 0
        for k in range(1, n + 1):
            if g[k]:
                acc += g[k] * a[n - k]
        a[n] = acc // n
    return a


def linear_partition_counts(N: int) -> BigIntSeries:
    if N < 0:
        raise ValueError("truncation order must be non-negative")
    return BigIntSeries(tuple(_log_derivative_series(_sigma_table(N, 1), N)), kind="p")


@lru_cache(maxsize=8)
def _q_coeffs(N: int) -> tuple[int, ...]:
    return tuple(_log_derivative_series(_sigma_table(N, 2), N))


def plane_partition_counts(N: int) -> BigIntSeries:
    if N < 0:
        raise ValueError("truncation order must be non-negative")
    return BigIntSeries(_q_coeffs(N), kind="q")


def small_part_series(N: int, m: int) -> list[int]:
    """Coefficients of ``prod_{j <= m} (1 - x^j)^(-j)``."""
    return _log_derivative_series(_sigma_table(N, 2, max_divisor=m), N)


# --------------------------------------------------------------------------
# bivariate tables


def trace_series(N: int) -> BivariateTable:
    """Plane partitions counted by weight and (conjugate) trace.

    Multiplies the factors ``(1 - y x^j)^(-j) = sum_c C(c+j-1, c) y^c x^{jc}``
    one at a time on a dense table.
    """
    if N < 0:
        raise ValueError("truncation order must be non-negative")
    table = [[0] * (N + 1) for _ in range(N + 1)]
    table[0][0] = 1
    for j in range(1, N + 1):
        new = [row[:] for row in table]
        for c in range(1, N // j + 1):
            coef = comb(c + j - 1, c)
            shift = j * c
            for n in range(shift, N + 1):
                src, dst = table[n - shift], new[n]
                for t in range(0, n - shift + 1):
                    if src[t]:
                        dst[t + c] += coef * src[t]
        table = new
    entries = {(n, t): v for n, row in enumerate(table) for t, v in enumerate(row) if v}
    return BivariateTable(entries, N, kind="trace")


def _pack(coeffs, slot: int) -> gmpy2.mpz:
    return gmpy2.mpz(int.from_bytes(b"".join(int(c).to_bytes(slot, "little") for c in coeffs), "little"))


def _unpack(value: gmpy2.mpz, slot: int, count: int) -> list[int]:
    v = int(value)
    raw = v.to_bytes(max((v.bit_length() + 7) // 8, slot * count), "little")
    return [int.from_bytes(raw[i * slot:(i + 1) * slot], "little") for i in range(count)]


def _slot_bytes(max_bits: int) -> int:
    return max_bits // 8 + 2


def x_distribution_exact(N: int, m: float, exact: bool | None = None) -> BivariateTable:
    """Coefficients of ``prod_{j<=m} (1-x^j)^(-j) prod_{j>m} (1-y x^j)^(-j)``.

    Entry (n, k) counts plane partitions of n carrying exactly k units of
    size above m, which is the coefficient extraction of Q(x) f_m(x, y).
    ``m`` is floored.  Above ``EXACT_BIVARIATE_LIMIT`` the default switches
    to normalized double-precision rows marked ``exact=False``.
    """
    if N < 0 or m < 0:
        raise ValueError("need N >= 0 and m >= 0")
    mi = int(m)
    if exact is None:
        exact = N <= EXACT_BIVARIATE_LIMIT
    if not exact:
        return _x_distribution_float(N, mi)
    K = N // (mi + 1)
    base = small_part_series(N, mi)
    # y-power sums: p_s(x) = sum_{j > m} j x^{js}
    power_sums = []
    for s in range(1, K + 1):
        p = [0] * (N + 1)
        for j in range(mi + 1, N // s + 1):
            p[j * s] = j
        power_sums.append(p)
    layers = [base]
    # every layer coefficient is at most q(N), so each packed product
    # coefficient is at most k q(N)
    bits = _q_coeffs(N)[N].bit_length()
    for k in range(1, K + 1):
        slot = _slot_bytes(bits + k.bit_length() + 1)
        acc = gmpy2.mpz(0)
        for s in range(1, k + 1):
            acc += _pack(power_sums[s - 1], slot) * _pack(layers[k - s], slot)
        coeffs = _unpack(acc, slot, N + 1)
        layer = []
        for c in coeffs:
            qt, rem = divmod(c, k)
            assert rem == 0
            layer.append(qt)
        layers.append(layer)
    entries = {(n, k): layers[k][n] for k in range(K + 1) for n in range(N + 1) if layers[k][n]}
    return BivariateTable(entries, N, kind="xdist", params={"m": mi})


def _x_distribution_float(N: int, mi: int) -> BivariateTable:
    """Same recurrence on normalized rows ``count(n, k) / q(n)``."""
    logq = np.array([float(mpmath.log(c)) for c in _q_coeffs(N)])
    K = N // (mi + 1)
    base = small_part_series(N, mi)
    layers = [np.array([float(mpmath.mpf(b) / c) for b, c in zip(base, _q_coeffs(N))])]
    for k in range(1, K + 1):
        acc = np.zeros(N + 1)
        for s in range(1, k + 1):
            prev = layers[k - s]
            for j in range(mi + 1, N // s + 1):
                e = j * s
                ratio = np.exp(logq[: N + 1 - e] - logq[e:])
                acc[e:] += j * prev[: N + 1 - e] * ratio
        layers.append(acc / k)
    entries = {(n, k): layers[k][n] for k in range(K + 1) for n in range(N + 1) if layers[k][n] > 0}
    return BivariateTable(entries, N, kind="xdist", exact=False, params={"m": mi})


# --------------------------------------------------------------------------
# numeric evaluation


def _check_unit_interval(u) -> None:
    if not 0 < u < 1:
        raise ValueError(f"evaluation point must lie in (0,1), got {u}")


def evaluate_log_Q(u, tail_tolerance=TAIL_CUTOFF):
    """``log Q(u) = -sum_j j log(1 - u^j)`` summed until terms drop below tolerance."""
    _check_unit_interval(u)
    with mpmath.workdps(WORKING_DPS):
        u = mpmath.mpf(u)
        total = mpmath.mpf(0)
        j = 1
        uj = u
        while True:
            term = -j * mpmath.log1p(-uj)
            total += term
            if term < tail_tolerance and j * uj < tail_tolerance:
                break
            j += 1
            uj *= u
        return +total


def evaluate_f_m(u, y, m, tail_tolerance=TAIL_CUTOFF):
    """``prod_{j > m} ((1 - u^j) / (1 - y u^j))^j`` through its logarithm."""
    _check_unit_interval(u)
    if not 0 <= y <= 1:
        raise ValueError(f"y must lie in [0,1], got {y}")
    with mpmath.workdps(WORKING_DPS):
        u = mpmath.mpf(u)
        y = mpmath.mpf(y)
        j = int(m) + 1
        uj = u**j
        total = mpmath.mpf(0)
        while uj > 0:
            term = j * (mpmath.log1p(-uj) - mpmath.log1p(-y * uj))
            total += term
            if abs(term) < tail_tolerance:
                break
            j += 1
            uj *= u
        return +mpmath.exp(total)

"""Saddle points, thresholds and limit laws, evaluated with mpmath.

Everything returns ``mpmath.mpf`` computed at ``WORKING_DPS`` digits.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from ._precision import TAIL_CUTOFF, WORKING_DPS


@dataclass(frozen=True)
class Constants:
    zeta3: mpf
    zeta_prime_neg1: mpf
    gamma_const: mpf
    pi: mpf


@dataclass(frozen=True)
class SaddleData:
    n: float
    d_expansion: mpf
    d_exact: mpf
    u: mpf
    delta: mpf | None


@dataclass(frozen=True)
class ThresholdSpec:
    n: float
    c: float
    m_real: mpf
    m_int: int


_CONSTANTS: Constants | None = None


def constants() -> Constants:
    global _CONSTANTS
    if _CONSTANTS is None:
        with mpmath.workdps(WORKING_DPS):
            z3 = mpmath.zeta(3)
            zp = mpmath.zeta(-1, derivative=1)
            _CONSTANTS = Constants(+z3, +zp, zp / 2, +mpmath.pi)
    return _CONSTANTS


def saddle_expansion(n) -> mpf:
    """Two-term expansion ``(2 zeta(3) / n)^(1/3) - 1/(36 n)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    with mpmath.workdps(WORKING_DPS):
        n = mpf(n)
        return (2 * constants().zeta3 / n) ** (mpf(1) / 3) - 1 / (36 * n)


def mean_weight(u, stop_above=None) -> mpf:
    """``u Q'(u) / Q(u) = sum_j j^2 u^j / (1 - u^j)``.

    The terms are positive, so with ``stop_above`` the sum is abandoned (and
    the partial sum returned) as soon as it exceeds that value.
    """
    with mpmath.workdps(WORKING_DPS):
        u = mpf(u)
        total = mpf(0)
        j, uj = 1, u
        while True:
            term = j * j * uj / (1 - uj)
            total += term
            if term < TAIL_CUTOFF * total:
                return total
            if stop_above is not None and total > stop_above:
                return total
            j += 1
            uj *= u


def _mean_weight_derivative(u) -> mpf:
    # d/du sum_j j^2 u^j / (1 - u^j) = sum_j j^3 u^(j-1) / (1 - u^j)^2
    total = mpf(0)
    j, uj = 1, mpf(u)
    while True:
        term = j**3 * uj / (u * (1 - uj) ** 2)
        total += term
        if term < TAIL_CUTOFF * total:
            return total
        j += 1
        uj *= u


def saddle_exact(n) -> mpf:
    """Root ``d`` of ``mean_weight(e^-d) = n``.

    Bisection in u (the mean weight is increasing) down to a bracket of
    width 1e-14, then Newton steps until the residual is below 1e-12 n.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    with mpmath.workdps(WORKING_DPS):
        n = mpf(n)
        lo, hi = mpmath.exp(-1), 1 - 1 / (2 * n)
        # near u = 1 the full sum needs O(n) terms, but only the comparison
        # with n matters, and partial sums increase
        below = lambda v: mean_weight(v, stop_above=n) < n
        while not below(lo) and mean_weight(lo) > n:
            lo = lo * lo
        while below(hi):
            hi = (1 + hi) / 2
        if not (mean_weight(lo) <= n and not below(hi)):
            raise ArithmeticError(f"could not bracket the saddle point for n={n}")
        while hi - lo > mpf("1e-14"):
            mid = (lo + hi) / 2
            if below(mid):
                lo = mid
            else:
                hi = mid
        u = (lo + hi) / 2
        for _ in range(20):
            r = mean_weight(u) - n
            if abs(r) < mpf("1e-25") * n:
                break
            u = u - r / _mean_weight_derivative(u)
        return -mpmath.log(u)


def delta_window(n) -> mpf:
    if n < 2:
        raise ValueError("n must be >= 2")
    with mpmath.workdps(WORKING_DPS):
        return saddle_expansion(n) ** (mpf(5) / 3) / mpmath.log(n)


def saddle_data(n) -> SaddleData:
    d_exp = saddle_expansion(n)
    d = saddle_exact(n)
    with mpmath.workdps(WORKING_DPS):
        return SaddleData(n, d_exp, d, mpmath.exp(-d), delta_window(n) if n >= 2 else None)


def log_wright_estimate(n) -> mpf:
    if n < 1:
        raise ValueError("n must be >= 1")
    k = constants()
    with mpmath.workdps(WORKING_DPS):
        n = mpf(n)
        return (
            mpf(7) / 36 * mpmath.log(k.zeta3)
            - mpf(11) / 36 * mpmath.log(2)
            - mpmath.log(3 * k.pi) / 2
            - mpf(25) / 36 * mpmath.log(n)
            + 3 * k.zeta3 ** (mpf(1) / 3) * (n / 2) ** (mpf(2) / 3)
            + 2 * k.gamma_const
        )


def wright_estimate(n) -> mpf:
    """Leading asymptotic for the number of plane partitions of n."""
    with mpmath.workdps(WORKING_DPS):
        return mpmath.exp(log_wright_estimate(n))


def hardy_ramanujan_estimate(n) -> mpf:
    if n < 1:
        raise ValueError("n must be >= 1")
    with mpmath.workdps(WORKING_DPS):
        n = mpf(n)
        return mpmath.exp(mpmath.pi * mpmath.sqrt(2 * n / 3)) / (4 * n * mpmath.sqrt(3))


def _check_threshold_n(n) -> None:
    if n < 3:
        raise ValueError("thresholds need n >= 3 so that log log n > 0")


def threshold_m(n, c) -> ThresholdSpec:
    """``(n / 2 zeta(3))^(1/3) (log (n / 2 zeta(3))^(2/3) + log log n + c)``."""
    _check_threshold_n(n)
    with mpmath.workdps(WORKING_DPS):
        a = mpf(n) / (2 * constants().zeta3)
        m = a ** (mpf(1) / 3) * (mpf(2) / 3 * mpmath.log(a) + mpmath.log(mpmath.log(n)) + c)
        return ThresholdSpec(n, c, m, max(int(mpmath.floor(m)), 0))


def threshold_m_saddle(n, c) -> ThresholdSpec:
    """Same threshold written through the saddle scale: ``(log d^-2 + log log n + c) / d``."""
    _check_threshold_n(n)
    with mpmath.workdps(WORKING_DPS):
        d = saddle_expansion(n)
        m = (mpmath.log(d**-2) + mpmath.log(mpmath.log(n)) + c) / d
        return ThresholdSpec(n, c, m, max(int(mpmath.floor(m)), 0))


def debye_tail_series(t) -> mpf:
    """``int_t^inf u^2/(e^u - 1) du`` as ``sum_k e^{-kt} (t^2/k + 2t/k^2 + 2/k^3)``."""
    if t < 0:
        raise ValueError("t must be >= 0")
    with mpmath.workdps(WORKING_DPS):
        t = mpf(t)
        if t == 0:
            return 2 * mpmath.zeta(3)
        total = mpf(0)
        k = 1
        while True:
            term = mpmath.exp(-k * t) * (t * t / k + 2 * t / k**2 + mpf(2) / k**3)
            total += term
            if term < TAIL_CUTOFF * total:
                return total
            k += 1


def debye_tail_quadrature(t) -> mpf:
    if t < 0:
        raise ValueError("t must be >= 0")
    with mpmath.workdps(WORKING_DPS):
        f = lambda u: u * u / mpmath.expm1(u) if u else mpf(0)
        return mpmath.quad(f, [mpf(t), mpf(t) + 1, mpf(t) + 10, mpmath.inf])


def debye_tail(t) -> tuple[mpf, mpf]:
    """Return ``(exact, (t^2 + 2t + 2) e^-t)``."""
    exact = debye_tail_series(t)
    with mpmath.workdps(WORKING_DPS):
        t = mpf(t)
        return exact, (t * t + 2 * t + 2) * mpmath.exp(-t)


def limit_pgf_plane(c, y) -> mpf:
    with mpmath.workdps(WORKING_DPS):
        return mpmath.exp(mpf(2) / 3 * mpmath.exp(-c) * (mpf(y) - 1))


def poisson_mean_plane(c) -> mpf:
    with mpmath.workdps(WORKING_DPS):
        return mpf(2) / 3 * mpmath.exp(-c)


# --------------------------------------------------------------------------
# linear partitions


def saddle_expansion_linear(n) -> mpf:
    """``pi / sqrt(6 n) - 1/(4 n)``."""
    with mpmath.workdps(WORKING_DPS):
        n = mpf(n)
        return mpmath.pi / mpmath.sqrt(6 * n) - 1 / (4 * n)


def threshold_m_linear(n, c) -> mpf:
    with mpmath.workdps(WORKING_DPS):
        a = mpmath.sqrt(6 * mpf(n)) / mpmath.pi
        return a * (mpmath.log(a) + c)


def evaluate_linear_tail(x, y, m) -> mpf:
    """``prod_{j > m} (1 - x^j) / (1 - y x^j)``."""
    if not 0 < x < 1:
        raise ValueError("x must lie in (0,1)")
    with mpmath.workdps(WORKING_DPS):
        x, y = mpf(x), mpf(y)
        j = int(mpmath.floor(m)) + 1
        xj = x**j
        total = mpf(0)
        while True:
            term = mpmath.log1p(-xj) - mpmath.log1p(-y * xj)
            total += term
            if abs(term) < TAIL_CUTOFF:
                return mpmath.exp(total)
            j += 1
            xj *= x


@dataclass(frozen=True)
class LinearSuite:
    n: float
    c: float
    y: float
    d_prime: mpf
    m_fristedt: mpf
    F_value: mpf
    limit: mpf


def linear_suite(n, c, y) -> LinearSuite:
    _check_threshold_n(n)
    if not 0 <= y <= 1:
        raise ValueError("y must lie in [0,1]")
    d = saddle_expansion_linear(n)
    m = threshold_m_linear(n, c)
    with mpmath.workdps(WORKING_DPS):
        F = evaluate_linear_tail(mpmath.exp(-d), y, m)
        limit = mpmath.exp(mpmath.exp(-c) * (mpf(y) - 1))
    return LinearSuite(n, c, y, d, m, F, limit)

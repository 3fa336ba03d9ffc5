import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import bivariate_product, product_series
from pplab import series
from pplab.series import (
    divisor_power_sum,
    evaluate_f_m,
    evaluate_log_Q,
    linear_partition_counts,
    plane_partition_counts,
    trace_series,
    x_distribution_exact,
)

Q20 = [1, 1, 3, 6, 13, 24, 48, 86, 160, 282, 500, 859, 1479, 2485, 4167, 6879, 11297, 18334, 29601, 47330, 75278]


@pytest.mark.parametrize("k,r,want", [(1, 2, 1), (6, 2, 50), (4, 1, 7), (12, 0, 6)])
def test_divisor_power_sum(k, r, want):
    assert divisor_power_sum(k, r) == want


def test_divisor_power_sum_rejects_zero():
    with pytest.raises(ValueError):
        divisor_power_sum(0, 1)


def test_linear_counts():
    p = linear_partition_counts(22)
    assert linear_partition_counts(0).coeffs == (1,)
    assert p[5] == 7
    assert p[22] == 1002
    assert p.kind == "p"


def test_plane_counts_known_values():
    q = plane_partition_counts(20)
    assert list(q.coeffs) == Q20
    assert q[1] == 1 and q[4] == 13 and q[6] == 48


def test_counts_match_direct_product():
    N = 60
    assert list(plane_partition_counts(N).coeffs) == product_series(lambda j: j, N)
    assert list(linear_partition_counts(N).coeffs) == product_series(lambda j: 1, N)


def test_negative_order_rejected():
    with pytest.raises(ValueError):
        plane_partition_counts(-1)
    with pytest.raises(ValueError):
        trace_series(-1)


def test_series_export():
    q = plane_partition_counts(3)
    assert q.to_csv() == "n,value\n0,1\n1,1\n2,3\n3,6\n"
    assert '"3", "6"' not in q.to_json()
    assert '[3, "6"]' in q.to_json()


def test_trace_series_small():
    t = trace_series(6)
    assert t.row(1) == {1: 1}
    assert t.row(2) == {1: 2, 2: 1}
    for n in range(7):
        assert t.total(n) == Q20[n]


def test_trace_series_matches_product_oracle():
    N = 12
    t = trace_series(N)
    want = bivariate_product(N, lambda j: True)
    for n in range(N + 1):
        assert t.row(n) == {k: v for k, v in enumerate(want[n]) if v}


def test_bivariate_csv():
    t = trace_series(2)
    assert t.to_csv() == "n,t,value\n0,0,1\n1,1,1\n2,1,2\n2,2,1\n"


def test_xdist_m0_is_trace_series():
    N = 10
    assert x_distribution_exact(N, 0).entries == trace_series(N).entries


def test_xdist_small_hand_value():
    # at n=2 with threshold 1: the factor (1 - y x^2)^(-2) contributes 2 y x^2
    # and (1 - x)^(-1) contributes x^2
    assert x_distribution_exact(2, 1).row(2) == {0: 1, 1: 2}


@pytest.mark.parametrize("m", [1, 2, 3, 5, 2.7])
def test_xdist_matches_product_oracle(m):
    N = 14
    t = x_distribution_exact(N, m)
    want = bivariate_product(N, lambda j: j > int(m))
    for n in range(N + 1):
        assert t.row(n) == {k: v for k, v in enumerate(want[n]) if v}
        assert t.total(n) == Q20[n]


def test_xdist_large_m_all_mass_at_zero():
    t = x_distribution_exact(12, 12)
    assert all(k == 0 for (_, k) in t.entries)


def test_xdist_totals_large_order():
    t = x_distribution_exact(400, 20)
    q = plane_partition_counts(400)
    for n in (0, 57, 200, 400):
        assert t.total(n) == q[n]


def test_xdist_float_mode_matches_exact():
    N, m = 150, 8
    ex = x_distribution_exact(N, m, exact=True)
    fl = x_distribution_exact(N, m, exact=False)
    assert not fl.exact
    q = plane_partition_counts(N)
    for n in (10, 80, 150):
        for k, v in ex.row(n).items():
            assert fl.row(n)[k] == pytest.approx(v / q[n], rel=1e-9, abs=1e-300)


def test_xdist_rejects_negative():
    with pytest.raises(ValueError):
        x_distribution_exact(5, -1)


def test_log_Q_against_direct_sum():
    with mpmath.workdps(40):
        direct = -mpmath.fsum(j * mpmath.log(1 - mpmath.mpf(0.5) ** j) for j in range(1, 200))
    assert abs(evaluate_log_Q(0.5) - direct) < mpmath.mpf("1e-30")
    assert evaluate_log_Q(0.6) > evaluate_log_Q(0.5)
    assert evaluate_log_Q(1e-12) < 1e-11


def test_log_Q_domain():
    for u in (0, 1, -0.1, 1.5):
        with pytest.raises(ValueError):
            evaluate_log_Q(u)


def test_f_m_values():
    assert evaluate_f_m(0.7, 1, 3) == 1
    assert evaluate_f_m(0.5, 0, 2000) == 1
    with mpmath.workdps(40):
        u = mpmath.mpf(0.9)
        direct = mpmath.fprod(((1 - u**j)) ** j for j in range(6, 2001))
    assert abs(evaluate_f_m(0.9, 0, 5) / direct - 1) < 1e-10


def test_f_m_domain():
    with pytest.raises(ValueError):
        evaluate_f_m(0.5, 1.5, 2)
    with pytest.raises(ValueError):
        evaluate_f_m(1.0, 0.5, 2)


@settings(max_examples=40, deadline=None)
@given(
    u=st.floats(0.05, 0.95),
    y1=st.floats(0, 1),
    y2=st.floats(0, 1),
    m=st.integers(0, 30),
)
def test_f_m_bounded_and_monotone_in_y(u, y1, y2, m):
    a, b = sorted((y1, y2))
    fa, fb = evaluate_f_m(u, a, m), evaluate_f_m(u, b, m)
    assert 0 < fa <= fb <= 1


def test_no_extra_precision_leak():
    evaluate_log_Q(0.5)
    assert mpmath.mp.dps == 15
    assert series.EXACT_BIVARIATE_LIMIT == 2000
    assert math.isclose(float(evaluate_log_Q(0.5)), float(evaluate_log_Q(0.5)))

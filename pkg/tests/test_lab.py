import json
import math
from fractions import Fraction

import pytest

from pplab import __version__, cli
from pplab.cache import CacheError, cache_load, cache_store
from pplab.distributions import DistributionTable, NormalizationError, poisson_table, tv_distance
from pplab.experiment import (
    ExperimentConfig,
    convergence_scan,
    exact_law,
    proposition1_check,
    run_poisson_experiment,
    scan_to_csv,
)
from pplab.series import linear_partition_counts, plane_partition_counts, trace_series, x_distribution_exact
from pplab.verify import probe_points, run_bijection_suite, run_identity_suite


# distributions


def test_tv_basic():
    a = DistributionTable({0: Fraction(1, 2), 1: Fraction(1, 2)}, "exact", 2)
    b = DistributionTable({0: Fraction(1)}, "exact", 1)
    c = DistributionTable({5: 1.0}, "empirical")
    assert tv_distance(a, a) == 0
    assert tv_distance(a, b) == 0.5
    assert tv_distance(b, c) == 1.0
    with pytest.raises(NormalizationError):
        tv_distance(a, DistributionTable({0: 0.7}, "empirical"))


def test_poisson_table():
    assert poisson_table(0).support == {0: 1.0}
    lam = 2 / 3
    t = poisson_table(lam)
    assert t.support[0] == pytest.approx(math.exp(-lam))
    assert float(t.mean()) == pytest.approx(lam, abs=1e-10)
    assert t.is_normalized()
    with pytest.raises(ValueError):
        poisson_table(-1)


def test_from_counts_exact_masses():
    t = DistributionTable.from_counts({0: 1, 2: 3})
    assert t.support == {0: Fraction(1, 4), 2: Fraction(3, 4)}
    assert t.mean() == Fraction(3, 2)
    assert t.to_dict()["total"] == "4"


# cache


def test_cache_round_trip(tmp_path):
    q = plane_partition_counts(500)
    path = cache_store(tmp_path / "q.tbl", q)
    back = cache_load(path, kind="q")
    assert back == q
    t = x_distribution_exact(30, 3)
    cache_store(tmp_path / "x.tbl", t)
    assert cache_load(tmp_path / "x.tbl").entries == t.entries
    f = x_distribution_exact(30, 3, exact=False)
    cache_store(tmp_path / "f.tbl", f)
    assert cache_load(tmp_path / "f.tbl").entries == f.entries


def test_cache_corruption(tmp_path):
    path = cache_store(tmp_path / "q.tbl", plane_partition_counts(50))
    raw = bytearray(path.read_bytes())
    raw[-5] = ord("7") if raw[-5] != ord("7") else ord("8")
    path.write_bytes(bytes(raw))
    with pytest.raises(CacheError, match="checksum"):
        cache_load(path)


def test_cache_partial_and_version(tmp_path):
    path = cache_store(tmp_path / "q.tbl", plane_partition_counts(50))
    raw = path.read_bytes()
    path.write_bytes(raw[:-10])
    with pytest.raises(CacheError, match="partial"):
        cache_load(path)
    head, body = raw.split(b"\n", 1)
    h = json.loads(head)
    h["version"] = 99
    path.write_bytes(json.dumps(h).encode() + b"\n" + body)
    with pytest.raises(CacheError, match="version"):
        cache_load(path)


def test_cache_kind_mismatch(tmp_path):
    path = cache_store(tmp_path / "p.tbl", linear_partition_counts(40))
    with pytest.raises(CacheError, match="kind"):
        cache_load(path, kind="q")


# experiments


def test_exact_law_mean_is_exact_rational():
    law = exact_law(60, 10)
    row = x_distribution_exact(60, 10).row(60)
    q = plane_partition_counts(60)[60]
    assert law.mean() == Fraction(sum(k * v for k, v in row.items()), q)


def test_limit_check_at_y_one():
    r = proposition1_check(200, 20, 1)
    assert r["lhs"] == r["rhs"] == 1.0 and r["relative_gap"] == 0


def test_experiment_report_and_determinism():
    cfg = ExperimentConfig(n=30, c=0.0, samples=500, seed=9)
    a = run_poisson_experiment(cfg).to_json()
    b = run_poisson_experiment(cfg).to_json()
    assert a == b
    d = json.loads(a)
    assert d["version"] == __version__ and d["seed"] == 9
    assert d["config"]["samples"] == 500
    assert "runtime" not in d
    for key in ("tv_empirical_vs_poisson", "tv_exact_vs_poisson", "tv_empirical_vs_exact"):
        assert 0 <= d[key] <= 1
    assert d["m_int"] == math.floor(float(d["m_real"]))
    assert Fraction(d["exact_mean"]) == exact_law(30, d["m_int"]).mean()


def test_experiment_modes():
    d = json.loads(run_poisson_experiment(ExperimentConfig(n=30, mode="exact")).to_json())
    assert d["empirical"] is None and d["exact"] is not None
    t = run_poisson_experiment(ExperimentConfig(n=30, samples=20, mode="mc", timing=True))
    assert t.exact is None and t.runtime is not None
    with pytest.raises(ValueError):
        ExperimentConfig(n=30, samples=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=30, workers=0)
    with pytest.raises(ValueError):
        ExperimentConfig(n=2)


def test_experiment_exact_downgrade(monkeypatch):
    from pplab import series

    monkeypatch.setattr(series, "EXACT_BIVARIATE_LIMIT", 20)
    rep = run_poisson_experiment(ExperimentConfig(n=25, samples=50, mode="both"))
    assert rep.exact is None and rep.empirical is not None
    assert rep.warnings


def test_tv_empirical_vs_exact_shrinks_with_samples():
    tvs = []
    for s in (10**3, 10**4, 10**5):
        rep = run_poisson_experiment(ExperimentConfig(n=100, samples=s, seed=1))
        tvs.append(rep.tv_empirical_vs_exact)
    assert tvs[0] > tvs[1] > tvs[2]
    support = len(exact_law(100, 13).support)
    assert tvs[2] <= 3 * math.sqrt(support / 10**5)


def test_scan_rows():
    rows = convergence_scan([40, 20, 60], 0.0, [0.0, 0.5])
    assert [r["n"] for r in rows] == [20, 40, 60]
    lim = math.exp(2 / 3 * (0.5 - 1))
    assert all(float(r["limit_y0.5"]) == pytest.approx(lim) for r in rows)
    text = scan_to_csv(rows)
    assert text.splitlines()[0].startswith("n,m_real,m_int")
    assert len(text.splitlines()) == 4
    with pytest.raises(ValueError):
        convergence_scan([], 0.0, [0.0])


# verification suites


def test_identity_suite_small():
    rep = run_identity_suite(6, 2, 2, restricted_n_max=6)
    assert rep.passed, rep.to_text()
    assert trace_series(2).row(2) == {1: 2, 2: 1}


def test_probe_points_distinct():
    pts = probe_points(3, count=8)
    assert len(pts) == 8
    for v in range(3):
        assert len({p[v] for p in pts}) == 8


def test_bijection_suite_small():
    assert run_bijection_suite(5, 6).passed


# command line


def run_cli(argv, capsys):
    rc = cli.main(argv)
    out = capsys.readouterr()
    return rc, out.out, out.err


def test_cli_counts(capsys):
    rc, out, _ = run_cli(["counts", "--kind", "q", "--max", "6"], capsys)
    assert rc == 0 and out.splitlines()[-1] == "6,48"
    rc, out, _ = run_cli(["counts", "--kind", "p", "--max", "5", "--format", "json"], capsys)
    assert json.loads(out)["rows"][5] == [5, "7"]


def test_cli_enumerate_and_tables(capsys):
    rc, out, _ = run_cli(["enumerate", "--n", "2"], capsys)
    assert sorted(out.split()) == ["[[1,1]]", "[[1],[1]]", "[[2]]"]
    rc, out, _ = run_cli(["trace-dist", "--max", "2"], capsys)
    assert "2,2,1" in out.splitlines()
    rc, out, _ = run_cli(["xdist", "--max", "3", "--m", "1"], capsys)
    assert "3,1,5" in out.splitlines()


def test_cli_sample(capsys, tmp_path):
    rep = tmp_path / "r.json"
    rc, out, _ = run_cli(["sample", "--n", "6", "--count", "5", "--seed", "2", "--report", str(rep)], capsys)
    lines = out.splitlines()
    assert rc == 0 and len(lines) == 5
    assert all(sum(map(sum, json.loads(l))) == 6 for l in lines)
    assert json.loads(rep.read_text())["requested"] == 5


def test_cli_asymptotics(capsys):
    rc, out, _ = run_cli(["asymptotics", "--n-grid", "100,1000", "--format", "csv"], capsys)
    lines = out.splitlines()
    assert lines[0].startswith("n,d_expansion") and len(lines) == 3
    rc, out, _ = run_cli(["asymptotics", "--n-grid", "1000", "--format", "json"], capsys)
    assert json.loads(out)[0]["m"].startswith("44.43")


def test_cli_experiment_config_file(capsys, tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("# defaults\nn = 20\nsamples = 300\nseed = 4\nmode = both\n")
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["--config", str(conf), "experiment", "-o", str(a)]) == 0
    assert cli.main(["--config", str(conf), "experiment", "--samples", "300", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    d = json.loads(a.read_text())
    assert d["n"] == 20 and d["config"]["samples"] == 300
    assert cli.main(["--config", str(conf), "experiment", "--seed", "5", "-o", str(b)]) == 0
    assert json.loads(b.read_text())["seed"] == 5


def test_cli_verify_exit_status(capsys, monkeypatch):
    rc, out, _ = run_cli(["verify", "--suite", "identities", "--n-max", "5"], capsys)
    assert rc == 0 and "[PASS]" in out and "[FAIL]" not in out
    from pplab import verify

    def failing(*a, **k):
        rep = verify.SuiteReport("bijections")
        rep.add("forced", False)
        return rep

    monkeypatch.setattr(verify, "run_bijection_suite", failing)
    rc, out, _ = run_cli(["verify", "--suite", "bijections"], capsys)
    assert rc == 1 and "[FAIL] forced" in out


def test_cli_scan(capsys):
    rc, out, _ = run_cli(["scan", "--n-grid", "30,50", "--c", "0", "--y-grid", "0,0.5"], capsys)
    assert rc == 0 and len(out.splitlines()) == 3


def test_cli_errors(capsys):
    rc, _, err = run_cli(["counts", "--max", "-3"], capsys)
    assert rc == 2 and "error" in err
    with pytest.raises(SystemExit):
        cli.main(["counts"])

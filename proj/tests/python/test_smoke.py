import json
from fractions import Fraction
from pathlib import Path

import pytest

import illl

DATA = Path(__file__).resolve().parents[2] / "data"


@pytest.fixture
def golden():
    return illl.read_instance(str(DATA / "golden_ratio.txt"))


def test_instance_fields(golden):
    assert (golden.m, golden.n, golden.M) == (1, 1, 64)
    assert golden.q_max == 10000
    assert golden.d == 2
    assert golden.P == [[11400714819323198486]]
    assert golden.kprime == len(illl.schedule(golden))


def test_golden_records_are_fibonacci(golden):
    recs = illl.approximate(golden, dedup=True)
    heights = [r["s"] for r in recs]
    fib = {1, 2}
    while max(fib) < 10000:
        a, b = sorted(fib)[-2:]
        fib.add(a + b)
    assert heights and set(heights) <= fib
    assert all(isinstance(r["maxerr"], Fraction) for r in recs)
    assert all(r["theta"] < 1 for r in recs)


def test_frontier_matches_fibonacci(golden):
    frontier = [e["s"] for e in illl.best_approximations(golden, 100)]
    assert frontier == [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


def test_verify_and_certificate(golden):
    checks = illl.verify(golden, grid=10)
    assert checks and all(ok for _, ok, _ in checks)
    cert = illl.certificate(golden)
    assert cert["m"] == 1 and cert["n"] == 1


def test_constructor_and_errors():
    inst = illl.Instance(1, 1, 8, [[128]], 100)
    assert inst.a(0, 0) == Fraction(1, 2)
    with pytest.raises(illl.InvalidInstance):
        illl.Instance(1, 1, 8, [[0]], 100)
    with pytest.raises(illl.ParseError):
        illl.parse_instance("1 1 8\n100 2 1\nabc\n")


def test_ocf():
    assert illl.ocf_distribution(0.0) == 0.0
    assert illl.ocf_distribution(1.0) == pytest.approx(1.0)
    samples = illl.ocf_samples(11)
    assert len(samples) == 11 and samples[0][0] == 0.0


def test_small_experiment(tmp_path):
    plan = {"m": 1, "n": 1, "d": "2", "q_max": "100000", "repetitions": 5, "seed": 7}
    thetas = illl.theta_samples(plan)
    assert thetas and all(t > 0 for t in thetas)
    assert thetas == illl.theta_samples(plan, threads=1)
    manifest = illl.run_experiment({"name": "smoke", "plans": [plan]}, tmp_path)
    assert manifest["tool"]
    assert (tmp_path / "ocf.csv").exists()
    assert "fig1" in illl.preset_names()
    assert illl.preset("fig1")["plans"]

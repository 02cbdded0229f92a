"""
Test the smacof engine
"""
import numpy as np
import pytest

from models import EngineConfig, MDSData
from services.engine import PhaseTimer, SmacofEngine, iteration_line, run
from services.errors import EngineError, MDSDataError, ReducibleWeightsError
from services.mds_data import make_mds_data
from tests.helpers import random_data
from tests.test_mds_data import SMALL

FLAG_COMBINATIONS = [
    (weighted, ordinal, ties)
    for weighted in (False, True)
    for ordinal, ties in ((False, 1), (True, 1), (True, 2), (True, 3))
]


def stress_trace(output: str):
    return [float(line.split()[-1]) for line in output.splitlines() if line.startswith("itel")]


def test_iteration_line():
    assert iteration_line(1, 0.5) == "itel    1 stress 0.5000000000"
    assert iteration_line(25, 0.0172132, digits=4, width=8) == "itel   25 stress   0.0172"


def test_monotone_descent(capsys):
    """Stress never increases over 200 random problems and all eight flag combinations"""
    rng = np.random.default_rng(41)
    violations = 0
    for trial in range(200):
        n = int(rng.integers(4, 11))
        missing = 0.15 if trial % 4 == 0 else 0.0
        unweighted = random_data(rng, n, missing=missing, decimals=1)
        weighted = random_data(rng, n, weighted=True, missing=missing, decimals=1)
        for use_weights, ordinal, ties in FLAG_COMBINATIONS:
            cfg = EngineConfig(ndim=2, weighted=use_weights, ordinal=ordinal, ties=ties,
                               itmax=40, verbose=True, digits=15, width=20)
            SmacofEngine(cfg).run(weighted if use_weights else unweighted)
            trace = stress_trace(capsys.readouterr().out)
            violations += int(np.sum(np.diff(trace) > 1e-12))
    assert violations == 0
    print("SUCCESS: No stress increase in 1600 runs")


def test_default_fit_on_random_complete_data():
    """The Torgerson start and the fit succeed on every seeded complete data set"""
    for seed in range(100):
        rng = np.random.default_rng(seed)
        result = run(random_data(rng, 4 + seed % 7))
        assert np.isfinite(result.stress)
        assert result.niter >= 1


def test_metric_run_scales_delta():
    data = make_mds_data(SMALL)
    result = run(data)
    delta = np.asarray(result.delta)
    np.testing.assert_allclose(result.dhat, delta / np.linalg.norm(delta), atol=1e-12)
    assert not result.ordinal
    assert result.niter >= 1


def test_determinism():
    rng = np.random.default_rng(42)
    data = random_data(rng, 9, decimals=1)
    cfg = EngineConfig(ordinal=True, ties=1)
    assert SmacofEngine(cfg).run(data).model_dump_json() == SmacofEngine(cfg).run(data).model_dump_json()


def test_ties_irrelevant_without_ties():
    """All approaches to ties give the same run when the dissimilarities are distinct"""
    rng = np.random.default_rng(43)
    data = random_data(rng, 8)
    assert all(b > 0 for b in data.blocks)
    results = [SmacofEngine(EngineConfig(ordinal=True, ties=ties)).run(data) for ties in (1, 2, 3)]
    for other in results[1:]:
        assert other.niter == results[0].niter
        assert other.stress == pytest.approx(results[0].stress, abs=1e-12)
        np.testing.assert_allclose(other.conf, results[0].conf, atol=1e-10)


def test_result_fields():
    """Indices follow the primary reordering and the result echoes its settings"""
    rng = np.random.default_rng(44)
    data = random_data(rng, 7, weighted=True, decimals=1)
    result = SmacofEngine(EngineConfig(ndim=3, weighted=True, ordinal=True, ties=1)).run(data)

    assert result.nobj == 7 and result.ndim == 3
    assert np.asarray(result.conf).shape == (7, 3)
    assert np.asarray(result.init).shape == (7, 3)
    assert result.delta == data.delta
    assert sorted(zip(result.iind, result.jind, result.weightmat)) == sorted(zip(data.iind, data.jind, data.weights))
    w = np.asarray(result.weightmat)
    assert np.sum(w * np.asarray(result.dhat) ** 2) == pytest.approx(1.0)
    np.testing.assert_allclose(np.asarray(result.conf).mean(axis=0), 0.0, atol=1e-12)
    assert result.weighted and result.ordinal and result.ties == 1


def test_unweighted_ignores_weights():
    rng = np.random.default_rng(45)
    data = random_data(rng, 6, weighted=True)
    result = run(data)
    assert result.weightmat == [1.0] * data.ndat


def test_verbose_output(capsys):
    run(make_mds_data(SMALL), EngineConfig(verbose=True, itmax=3))
    out = capsys.readouterr().out
    assert out.startswith("itel    1 stress ")
    assert len(stress_trace(out)) <= 3


def test_xinit_checks():
    data = make_mds_data(SMALL)
    with pytest.raises(EngineError, match="shape"):
        run(data, xinit=np.zeros((3, 2)))
    with pytest.raises(EngineError, match="non-finite"):
        run(data, xinit=[[np.nan, 0.0]] * 4)

    start = [[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -1.0]]
    result = run(data, xinit=start)
    np.testing.assert_allclose(result.init, start)


def test_invalid_and_reducible_data():
    bad = MDSData(iind=[2, 3], jind=[1, 1], delta=[2.0, 1.0], blocks=[1, 1], weights=[1.0, 1.0], nobj=3, ndat=2)
    with pytest.raises(MDSDataError, match="delta not sorted"):
        run(bad)

    split = MDSData(iind=[2, 4], jind=[1, 3], delta=[1.0, 2.0], blocks=[1, 1], weights=[1.0, 1.0], nobj=4, ndat=2)
    with pytest.raises(ReducibleWeightsError) as info:
        run(split, xinit=np.eye(4)[:, :2])
    assert info.value.components == [[1, 2], [3, 4]]


def test_phase_timer():
    rng = np.random.default_rng(46)
    timer = PhaseTimer()
    run(random_data(rng, 6, decimals=1), EngineConfig(ordinal=True, ties=2), timer=timer)
    assert set(timer.totals) == {"setup", "xphase", "dphase"}
    assert all(seconds > 0 for seconds in timer.totals.values())

    metric = PhaseTimer()
    run(random_data(rng, 6), timer=metric)
    assert metric.totals["dphase"] == 0.0


if __name__ == "__main__":
    print("Testing engine...")

    test_iteration_line()
    test_metric_run_scales_delta()
    test_determinism()
    test_ties_irrelevant_without_ties()
    test_result_fields()
    test_xinit_checks()
    test_invalid_and_reducible_data()
    test_phase_timer()

    print("\nSUCCESS: All engine tests passed!")

import json

import numpy as np
import pytest

from timestretch.config import CorpusConfig, PvConfig
from timestretch.evaluation.corpus import evaluate_melody, run_corpus
from timestretch.evaluation.melody import MelodySpec

PV_KEYS = ("e_pv_256_1024", "e_pv_128_512")


def test_rate_one_gives_no_pv_error():
    report = run_corpus(CorpusConfig(count=1, rates=[1.0]), progress=False)
    metrics = report.per_signal[0].metrics()
    for key in PV_KEYS:
        assert metrics[key] < 1e-6
    assert list(metrics) == [*PV_KEYS, "e_nspv", "red_pv", "red_nspv"]
    assert metrics["red_pv"] == 4.0
    assert set(report.per_rate) == {"1.0"}


def test_differing_pv_redundancies_get_their_own_columns():
    config = CorpusConfig(
        count=1, pv=[PvConfig(hop=256, channels=1024), PvConfig(hop=256, channels=512)]
    )
    metrics = evaluate_melody(MelodySpec.random(2), 1.0, config).metrics()
    assert metrics["red_pv_256_1024"] == 4.0
    assert metrics["red_pv_256_512"] == 2.0
    assert "red_pv" not in metrics


def test_pv_without_a_frame_and_no_ground_truth():
    result = evaluate_melody(MelodySpec.random(4), 4.0, CorpusConfig(count=1))
    metrics = result.metrics()
    assert metrics["e_pv_256_1024"] is None
    assert metrics["e_nspv"] is None
    assert metrics["red_nspv"] > 0
    assert np.isnan(result.row()[3])


def test_reports_are_written(tmp_path):
    report = run_corpus(CorpusConfig(count=1, rates=[1.0]), progress=False)
    json_path = tmp_path / "report.json"
    report.write(json_path)
    loaded = json.loads(json_path.read_text())
    assert loaded["config"]["count"] == 1
    assert len(loaded["per_signal"]) == 1

    csv_path = tmp_path / "report.csv"
    report.write(csv_path)
    header = csv_path.read_text().splitlines()[0].split(",")
    assert header[:3] == ["index", "seed", "r"]
    assert "e_nspv" in header


@pytest.mark.slow
def test_same_seed_gives_the_same_report():
    config = CorpusConfig(count=2, seed=7)
    first = run_corpus(config, progress=False)
    second = run_corpus(config, progress=False)
    assert first.model_dump_json() == second.model_dump_json()


@pytest.mark.slow
def test_nspv_beats_pv_on_the_synthetic_corpus():
    report = run_corpus(CorpusConfig(count=50, seed=0), progress=False)
    averages = report.averages
    for key in PV_KEYS:
        assert averages["e_nspv"] < averages[key]
    assert averages["e_nspv"] <= 0.25
    assert 2.5 <= averages["red_nspv"] <= 4.5
    for item in report.per_signal:
        assert 0.5 <= item.r <= 3.75


@pytest.mark.slow
@pytest.mark.parametrize(
    ("rate", "low", "high"), [(1.5, 2.5, 3.5), (3.0, 4.0, 6.0), (4.0, 6.0, 8.0)]
)
def test_redundancy_grows_with_the_rate(rate, low, high):
    report = run_corpus(CorpusConfig(count=10, seed=1, rates=[rate]), progress=False)
    assert low <= report.per_rate[str(rate)]["red_nspv"] <= high

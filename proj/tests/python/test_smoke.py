import json
import math

import pytest

try:
    import wearlab as wl
except ImportError:  # build-tree runs import the extension directly
    import _wearlab as wl


def test_registry_shape():
    reg = wl.registry()
    assert len(reg) == 284
    assert reg[0]["id"] == 1
    assert reg[0]["dataset"] == "DS4"
    names = {e["name"] for e in reg}
    assert len(names) == 284
    assert wl.feature_id("avg RMSSD during sleep") == 102


def test_scalar_operations():
    assert wl.estimated_hba1c(96.8) == pytest.approx(5.0)
    assert wl.estimated_hba1c(100.05) == pytest.approx(5.11, abs=5e-3)
    stats = wl.descriptive_stats([1, 2, 3, 4])
    assert stats["mean"] == pytest.approx(2.5)
    assert stats["variance"] == pytest.approx(1.25)
    assert wl.rmssd([800, 810, 790]) == pytest.approx(math.sqrt(250))
    bands = wl.glucose_band_fractions([50, 60, 100, 200, 300])
    assert bands["target"] == pytest.approx(20.0)

    assert wl.pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.981981, abs=1e-6)
    rs = wl.rank_sum_test([1, 2], [3, 4])
    assert rs["exact"] and rs["p_value"] == pytest.approx(1 / 3)
    chi = wl.chi_square_test(20, 10, 10, 20)
    assert chi["chi2"] == pytest.approx(6.6667, abs=1e-3)
    assert wl.bh_fdr([0.01, 0.02, 0.03, 0.04]) == pytest.approx([0.04] * 4)


def test_auc_matches_roc_area():
    pos, neg = [0.8, 0.6], [0.7, 0.2]
    a = wl.auc(pos, neg)
    assert a == pytest.approx(0.75)
    curve = wl.roc_curve(pos, neg)
    area = sum(
        (x1 - x0) * (y0 + y1) / 2
        for (x0, y0, _), (x1, y1, _) in zip(curve, curve[1:])
    )
    assert area == pytest.approx(a, abs=1e-12)
    with pytest.raises(ValueError):
        wl.auc([], [0.1])


def test_synth_extract_pipeline(tmp_path):
    cohort = tmp_path / "cohort"
    info = wl.generate_cohort(str(cohort), positives=4, negatives=3, days=5, seed=7,
                              amplify=2.0)
    assert info["subjects"] == 7
    assert (cohort / "subjects.csv").exists()

    extracted = wl.extract_cohort(str(cohort), threads=2)
    assert len(extracted["subjects"]) == 7
    assert sum(extracted["labels"]) == 4
    assert len(extracted["values"][0]) == 284
    assert extracted["records_dropped"] == 0

    config = {
        "cohort": str(cohort),
        "out": str(tmp_path / "out"),
        "scenario": "ds4",
        "selector": "none",
        "model": "knn",
        "seeds": [0],
        "threads": 2,
    }
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(config))
    report = wl.run_pipeline(str(config_path))
    assert 0.0 <= report["mean_auc"] <= 1.0
    assert (tmp_path / "out" / "eval.json").exists()
    assert (tmp_path / "out" / "features.csv").exists()

import json

import numpy as np
import pytest
import scipy.linalg
import scipy.stats
from sklearn.metrics import roc_auc_score

import lcaudit


def test_frechet_matches_scipy_sqrtm():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(40, 4))
    b = rng.normal(size=(40, 4)) * 1.5 + 0.3
    mu1, mu2 = a.mean(0), b.mean(0)
    s1, s2 = np.cov(a, rowvar=False), np.cov(b, rowvar=False)
    want = np.sum((mu1 - mu2) ** 2) + np.trace(s1 + s2 - 2 * scipy.linalg.sqrtm(s1 @ s2).real)
    assert lcaudit.frechet_distance(mu1, s1, mu2, s2) == pytest.approx(want, rel=1e-8)


def test_mmd2_matches_direct_sum():
    rng = np.random.default_rng(2)
    x, y = rng.normal(size=(7, 3)), rng.normal(size=(9, 3))
    k = lambda a, b: np.exp(-((a[:, None] - b[None]) ** 2).sum(-1) / 2.0)
    kxx, kyy = k(x, x), k(y, y)
    want = ((kxx.sum() - np.trace(kxx)) / 42 + (kyy.sum() - np.trace(kyy)) / 72 - 2 * k(x, y).mean())
    assert lcaudit.mmd2_unbiased(x, y, 1.0) == pytest.approx(want, abs=1e-12)


def test_three_sample_test_flags_copied_training_set():
    rng = np.random.default_rng(3)
    train, test = rng.normal(size=(60, 5)), rng.normal(size=(60, 5))
    r = lcaudit.mmd_three_sample_test(train, train, test)
    assert r["p_value"] < 0.01
    assert not r["degenerate"]


def test_wasserstein_matches_scipy():
    rng = np.random.default_rng(4)
    a, b = rng.normal(size=30), rng.normal(size=17) + 0.5
    assert lcaudit.wasserstein1(a, b) == pytest.approx(scipy.stats.wasserstein_distance(a, b), abs=1e-12)


def test_nndr_and_distances_match_brute_force():
    rng = np.random.default_rng(5)
    synth, targets = rng.normal(size=(12, 2)), rng.normal(size=(8, 2))
    d = np.linalg.norm(targets[:, None] - synth[None], axis=-1)
    d.sort(axis=1)
    np.testing.assert_allclose(lcaudit.nndr(targets, synth), d[:, 0] / d[:, 1], atol=1e-12)
    np.testing.assert_allclose(lcaudit.min_distances(targets, synth), d[:, 0], atol=1e-12)


def test_roc_auc_matches_sklearn():
    rng = np.random.default_rng(6)
    scores = np.round(rng.normal(size=200), 1)
    member = rng.random(200) < 0.4
    r = lcaudit.roc_curve(scores, member)
    # Members are predicted for low scores.
    assert r["auc"] == pytest.approx(roc_auc_score(member, -scores), abs=1e-12)
    assert r["fpr"][0] == 0.0 and r["tpr"][-1] == 1.0


def test_small_helpers():
    assert lcaudit.degree_day(10.0) == 6.0
    assert lcaudit.degree_day(20.0) == 0.0
    assert lcaudit.forecast_repeat_week(list(range(1, 401)), 2) == [65.0, 66.0]
    assert lcaudit.acf([1.0, -1.0] * 50, 1)[1] == pytest.approx(-0.99)
    m = lcaudit.classification_metrics([0, 1, 1, 2], [0, 1, 2, 2])
    assert m["accuracy"] == 0.75
    with pytest.raises(lcaudit.DomainError):
        lcaudit.acf([1.0] * 10, 2)


def test_cli_and_audit_round_trip(tmp_path):
    assert lcaudit.cli_main(["gen-surrogate", "--n-curves", "12", "--days", "14", "--out", str(tmp_path)]) == 0
    assert lcaudit.cli_main(["no-such-command"]) == 1
    cfg = json.loads((tmp_path / "audit.json").read_text())
    cfg["suites"] = ["thermo"]
    (tmp_path / "thermo.json").write_text(json.dumps(cfg))
    a = lcaudit.run_audit(tmp_path / "thermo.json", seed=5)
    assert a == lcaudit.run_audit(tmp_path / "thermo.json", seed=5)
    report = json.loads(a)
    assert sorted(report) == ["meta", "thermo"]

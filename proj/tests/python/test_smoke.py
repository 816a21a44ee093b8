import json
import math
import os
from pathlib import Path

import numpy as np
import pytest

import latent_diversity as ld

FIXTURES = Path(os.environ.get("LATENT_DIVERSITY_FIXTURES", Path(__file__).resolve().parents[1] / "fixtures"))


def numpy_entropy(x, k, ddof=1):
    cov = np.cov(x, rowvar=False, ddof=ddof)
    lam = np.sort(np.linalg.eigvalsh(cov))[::-1]
    floor = max(1e-12, 1e-10 * lam[0])
    lam = lam[:k][lam[:k] > floor]
    return 0.5 * len(lam) * math.log(2 * math.pi * math.e) + 0.5 * np.sum(np.log(lam))


def test_unusual_fixture_matches_numpy():
    x = ld.read_array(FIXTURES / "regimes" / "unusual.npy")
    assert x.shape == (45, 512)
    score = ld.tce(x)
    assert score.kind == "TCE"
    assert score.k == 20
    assert score.n == 45
    assert score.value == pytest.approx(66.96061847210603, rel=1e-12)
    assert score.value == pytest.approx(numpy_entropy(x, 20), rel=1e-9)


def test_diversity_follows_space():
    rng = np.random.default_rng(3)
    x = rng.normal(size=(40, 16))
    assert ld.diversity(x, k=5).kind == "generic_truncated_entropy"
    assert ld.diversity(x, k=5).value == pytest.approx(numpy_entropy(x, 5), rel=1e-10)
    with pytest.raises(ld.LatentDiversityError) as info:
        ld.diversity(x, space="clip512")
    assert info.value.code == "SpaceMismatch"


def test_gram_and_dense_agree():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(30, 200)) * np.linspace(3, 0.1, 200)
    dense = ld.top_k_eigenvalues(x, 10, method="dense").eigenvalues
    gram = ld.top_k_eigenvalues(x, 10, method="gram").eigenvalues
    np.testing.assert_allclose(dense[:10], gram[:10], rtol=1e-9)


def test_rank_deficient_raises():
    rng = np.random.default_rng(1)
    with pytest.raises(ld.LatentDiversityError) as info:
        ld.tce(rng.normal(size=(30, 512)), k=40)
    assert info.value.code == "RankDeficient"


def test_fid_closed_form():
    rng = np.random.default_rng(2)
    x = rng.normal(size=(200, 4))
    assert ld.fid(x, x).value == pytest.approx(0.0, abs=1e-9)
    a = np.array([[-1.0], [1.0]])
    assert ld.fid(a, a + 1.0).value == pytest.approx(1.0, abs=1e-12)


def test_npy_roundtrip(tmp_path):
    rng = np.random.default_rng(4)
    x = rng.normal(size=(7, 3))
    path = tmp_path / "x.npy"
    ld.write_array(x, path)
    np.testing.assert_array_equal(np.load(path), x)
    np.testing.assert_array_equal(ld.read_array(path), x)
    ld.write_array(x, path, dtype="float32")
    assert np.load(path).dtype == np.float32


def test_load_manifest():
    loaded = ld.load_embeddings(FIXTURES / "regimes" / "usual.manifest.json")
    assert loaded["space"] == "clip512"
    assert loaded["data"].shape == (45, 512)
    assert set(loaded["labels"]) == {"usual"}


def test_regimes_and_comparison():
    low = ld.resample_scores(ld.generate_regime("control_low", seed=11), seed=7)
    high = ld.resample_scores(ld.generate_regime("unusual", seed=11), seed=7)
    assert len(low) == 10
    result = ld.compare_values([s.value for s in low], [s.value for s in high])
    assert result.exact
    assert result.p_value < 0.01
    assert np.mean([s.value for s in low]) < np.mean([s.value for s in high])


def test_gaussian_sampler_recovers_entropy():
    lam = [4.0, 2.0, 1.0, 0.5]
    x = ld.sample_gaussian(lam, d=8, n=20000, seed=9)
    assert ld.diversity(x, k=4).value == pytest.approx(ld.gaussian_entropy(lam, 4), rel=0.02)


def test_cli_in_process():
    code, out, _ = ld.run_cli(["entropy", str(FIXTURES / "regimes" / "unusual.npy"), "--format", "json"])
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "TCE"
    assert doc["value"] == pytest.approx(66.96061847210603, rel=1e-12)
    code, _, err = ld.run_cli(["entropy"])
    assert code == 2

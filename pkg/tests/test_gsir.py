import json

import numpy as np
import pytest

from oracles import lambda_straight_line, random_psd
from wgsir import simgen
from wgsir.distances import pairwise_matrix
from wgsir.gsir import (GsirError, RegularizationSpec, TrainingRefs, assemble_lambda, fit,
                        predictors_insample, predictors_outsample)
from wgsir.harness import estimate
from wgsir.kernels import GramMatrix, KernelSpec, center_gram, default_gamma, gram_matrix
from wgsir.measures import EmpiricalMeasure
from wgsir.metrics import rvmr


def gram_from(K):
    return GramMatrix(K=K, G=center_gram(K), spec=KernelSpec(1.0))


def univariate_setup(rng, n=12, m=15):
    X = [EmpiricalMeasure(rng.normal(size=m) * rng.uniform(0.5, 2)) for _ in range(n)]
    Y = [EmpiricalMeasure(rng.normal(size=m) + X[i].points.std() * 2) for i in range(n)]
    Dx, Dy = pairwise_matrix(X), pairwise_matrix(Y)
    gx = gram_matrix(Dx, KernelSpec(default_gamma(Dx)))
    gy = gram_matrix(Dy, KernelSpec(default_gamma(Dy)))
    return X, Y, gx, gy


def test_zero_response_gives_zero_spectrum(rng):
    _, _, gx, _ = univariate_setup(rng)
    gy = GramMatrix(K=np.ones((gx.n, gx.n)), G=np.zeros((gx.n, gx.n)), spec=KernelSpec(1.0))
    f = fit(gx, gy, RegularizationSpec(0.01), "GSIR1")
    assert np.all(np.abs(f.eigenvalues) < 1e-15)


@pytest.mark.parametrize("variant", ["GSIR1", "GSIR2"])
def test_lambda_matches_straight_line(rng, variant):
    for _ in range(5):
        Kx = random_psd(rng, 3) + np.eye(3)
        Ky = random_psd(rng, 3) + np.eye(3)
        Gx, Gy = center_gram(Kx), center_gram(Ky)
        eta_x, eta_y = rng.uniform(0.01, 1), rng.uniform(0.01, 1)
        lam = assemble_lambda(Gx, Gy, eta_x, variant, eta_y)
        ref = lambda_straight_line(Gx, Gy, eta_x, variant, eta_y)
        np.testing.assert_allclose(lam, ref, atol=1e-10)


def test_fit_uses_scaled_ridge(rng):
    _, _, gx, gy = univariate_setup(rng)
    f = fit(gx, gy, RegularizationSpec(0.1, 0.2), "GSIR2")
    assert f.eta_x == pytest.approx(0.1 * np.linalg.eigvalsh(gx.G)[-1], rel=1e-12)
    assert f.eta_y == pytest.approx(0.2 * np.linalg.eigvalsh(gy.G)[-1], rel=1e-12)
    lam = assemble_lambda(gx.G, gy.G, f.eta_x, "GSIR2", f.eta_y)
    np.testing.assert_allclose(np.sort(f.eigenvalues), np.sort(np.linalg.eigvalsh(lam)), atol=1e-12)


def test_fit_deterministic(rng):
    _, _, gx, gy = univariate_setup(rng)
    a = fit(gx, gy, RegularizationSpec(0.01), "GSIR1", d=2)
    b = fit(gx, gy, RegularizationSpec(0.01), "GSIR1", d=2)
    assert np.array_equal(a.eigenvalues, b.eigenvalues)
    assert np.array_equal(a.coefficients, b.coefficients)


def test_fit_errors(rng):
    _, _, gx, gy = univariate_setup(rng)
    small = gram_from(np.eye(3))
    with pytest.raises(GsirError):
        fit(gx, small, RegularizationSpec(0.1))
    with pytest.raises(GsirError):
        fit(gx, gy, RegularizationSpec(0.1), d=gx.n + 1)
    with pytest.raises(GsirError):
        RegularizationSpec(0.0)
    with pytest.raises(GsirError):
        fit(gx, gy, RegularizationSpec(0.1), variant="gsir3")


def test_rank_one_predictor(rng):
    _, _, gx, _ = univariate_setup(rng)
    u = center_gram(np.eye(gx.n))[:, 0]
    gy = GramMatrix(K=np.eye(gx.n), G=np.outer(u, u), spec=KernelSpec(1.0))
    f = fit(gx, gy, RegularizationSpec(0.05), d=1)
    assert np.sum(f.eigenvalues > 1e-10 * f.eigenvalues[0]) == 1
    v1 = f.eigenvectors[:, 0]
    expected = gx.G @ np.linalg.solve(gx.G + f.eta_x * np.eye(gx.n), v1)
    np.testing.assert_allclose(predictors_insample(f)[:, 0], expected, atol=1e-10)


def test_invariants(rng):
    _, _, gx, gy = univariate_setup(rng)
    for variant in ("GSIR1", "GSIR2"):
        f = fit(gx, gy, RegularizationSpec(1e-3, 1e-3), variant, d=3)
        V = f.eigenvectors[:, :3]
        np.testing.assert_allclose(V.T @ V, np.eye(3), atol=1e-10)
        assert f.eigenvalues.min() >= -1e-8
        P = predictors_insample(f)
        assert np.abs(P.mean(axis=0)).max() <= 1e-9
        if variant == "GSIR2":
            assert f.eigenvalues.max() <= 1 + 1e-8


def test_outsample_reproduces_insample(rng):
    X, _, gx, gy = univariate_setup(rng)
    f = fit(gx, gy, RegularizationSpec(1e-3), d=3,
            train_refs=TrainingRefs(X, gx.spec, "W2"))
    ins = predictors_insample(f)
    np.testing.assert_allclose(predictors_outsample(f, X), ins, atol=1e-8)
    np.testing.assert_allclose(predictors_outsample(f, [X[4]]), ins[4:5], atol=1e-8)
    assert predictors_outsample(f, []).shape == (0, 3)


def test_outsample_dimension_mismatch(rng):
    X, _, gx, gy = univariate_setup(rng)
    f = fit(gx, gy, RegularizationSpec(1e-3), train_refs=TrainingRefs(X, gx.spec, "W2"))
    with pytest.raises(GsirError):
        predictors_outsample(f, [EmpiricalMeasure(np.ones((4, 2)))])
    bare = fit(gx, gy, RegularizationSpec(1e-3))
    with pytest.raises(GsirError):
        predictors_outsample(bare, X)


def test_permutation_equivariance(rng):
    X, Y, gx, gy = univariate_setup(rng, n=15)
    f = fit(gx, gy, RegularizationSpec(1e-3), d=2)
    p = rng.permutation(15)
    Dx, Dy = pairwise_matrix([X[i] for i in p]), pairwise_matrix([Y[i] for i in p])
    gxp = gram_matrix(Dx, gx.spec)
    gyp = gram_matrix(Dy, gy.spec)
    fp = fit(gxp, gyp, RegularizationSpec(1e-3), d=2)
    np.testing.assert_allclose(fp.eigenvalues, f.eigenvalues, atol=1e-10)
    np.testing.assert_allclose(predictors_insample(fp), predictors_insample(f)[p], atol=1e-10)


def test_independence_shrinks_top_eigenvalue():
    rng = np.random.default_rng(11)
    gen = simgen.generate(simgen.SimScenario("I-1", 100, 50), rng)
    X, Y = gen.data.predictors, gen.data.responses
    paired = estimate(X, Y).fit.eigenvalues[0]
    permuted = []
    for _ in range(20):
        p = rng.permutation(100)
        permuted.append(estimate(X, [Y[i] for i in p]).fit.eigenvalues[0])
    assert paired > np.percentile(permuted, 95)


def test_model_I2_recovers_two_predictors():
    scores = []
    for seed in range(5):
        rng = np.random.default_rng([seed, 99])
        gen = simgen.generate(simgen.SimScenario("I-2", 200, 50), rng)
        X, Y = gen.data.predictors, gen.data.responses
        est = estimate(X[:100], Y[:100], d=2)
        pred = predictors_outsample(est.fit, X[100:])
        scores.append(rvmr(pred, gen.true_predictors[100:]))
    assert np.mean(scores) > 0.4


def test_json_roundtrip(tmp_path, rng):
    X, _, gx, gy = univariate_setup(rng)
    f = fit(gx, gy, RegularizationSpec(1e-3), d=2, train_refs=TrainingRefs(X, gx.spec, "W2"))
    text = f.to_json(tmp_path / "fit.json")
    doc = json.loads((tmp_path / "fit.json").read_text())
    assert doc == json.loads(text)
    assert doc["variant"] == "GSIR1" and doc["d"] == 2
    np.testing.assert_array_equal(doc["eigenvalues"], f.eigenvalues)
    np.testing.assert_array_equal(np.array(doc["coefficients"]), f.coefficients)
    assert len(doc["training_digests"]) == len(X)
    assert doc["kernel"]["gamma"] == gx.spec.gamma

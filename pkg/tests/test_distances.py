import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from oracles import w2_assignment, w2_lp
from wgsir.distances import (DistanceError, SlicingSpec, cross_matrix, hellinger_beta,
                             hellinger_gaussian, hellinger_gaussian_sq, pairwise_matrix,
                             sliced_w2sq_terms, sw2_empirical, w2_empirical_1d, w2_gaussian)
from wgsir.measures import EmpiricalMeasure


def M(x):
    return EmpiricalMeasure(x)


# ------------------------------------------------------------ W2 1-D

def test_w2_identical():
    assert w2_empirical_1d(M([0.0, 2.0]), M([0.0, 2.0])) == 0.0


def test_w2_shift():
    assert w2_empirical_1d(M([0.0, 1.0]), M([1.0, 2.0])) == pytest.approx(1.0, abs=1e-15)
    assert w2_lp([0.0, 1.0], [1.0, 2.0]) == pytest.approx(1.0, abs=1e-9)


def test_w2_order_invariant():
    assert w2_empirical_1d(M([0, 1, 2, 3]), M([3, 1, 0, 2])) == 0.0


def test_w2_needs_univariate():
    with pytest.raises(DistanceError):
        w2_empirical_1d(M([[0.0, 1.0]]), M([[0.0, 1.0]]))


def test_w2_matches_assignment(rng):
    for _ in range(50):
        m = rng.integers(1, 7)
        x, y = rng.normal(size=m), rng.normal(size=m) * 2
        assert w2_empirical_1d(M(x), M(y)) == pytest.approx(w2_assignment(x, y), abs=1e-12)


def test_w2_unequal_sizes_grid(rng):
    # grid of 1000 midpoints is exact when both sizes divide 1000
    x, y = rng.normal(size=4), rng.normal(size=5)
    assert w2_empirical_1d(M(x), M(y)) == pytest.approx(w2_lp(x, y), abs=1e-8)
    x, y = rng.normal(size=3), rng.normal(size=7)
    assert w2_empirical_1d(M(x), M(y)) == pytest.approx(w2_lp(x, y), abs=0.02)


def test_w2_metric_axioms(rng):
    for _ in range(100):
        a, b, c = (M(rng.normal(size=8) * rng.uniform(0.1, 3)) for _ in range(3))
        ab, bc, ac = w2_empirical_1d(a, b), w2_empirical_1d(b, c), w2_empirical_1d(a, c)
        assert ab == w2_empirical_1d(b, a)
        assert ab >= 0
        assert ac <= ab + bc + 1e-9


# ------------------------------------------------------------ SW2

def test_slicing_unit_vectors():
    theta = SlicingSpec(200, 3, 5).directions
    np.testing.assert_allclose(np.linalg.norm(theta, axis=1), 1.0, atol=1e-12)
    assert np.array_equal(theta, SlicingSpec(200, 3, 5).directions)
    with pytest.raises(DistanceError):
        SlicingSpec(0, 1, 2)


def test_sw2_identical():
    pts = np.random.default_rng(0).normal(size=(10, 3))
    for seed in range(5):
        assert sw2_empirical(M(pts), M(pts), SlicingSpec(20, seed, 3)) == 0.0


def test_sw2_dirac_limit():
    a, b = M([[0.0, 0.0]]), M([[1.0, 1.0]])
    spec = SlicingSpec(20000, 11, 2)
    terms = sliced_w2sq_terms(a, b, spec)
    est = np.sqrt(terms.mean())
    se = terms.std(ddof=1) / np.sqrt(terms.size) / (2 * est)
    assert abs(est - 1.0) <= 3 * se


def test_sw2_univariate_bypass(rng):
    x, y = rng.normal(size=9), rng.normal(size=9)
    assert sw2_empirical(M(x), M(y), SlicingSpec(5, 1, 1)) == w2_empirical_1d(M(x), M(y))
    assert sw2_empirical(M(x), M(y)) == w2_empirical_1d(M(x), M(y))


def test_sw2_dimension_mismatch():
    with pytest.raises(DistanceError):
        sw2_empirical(M([[0.0, 1.0]]), M([[0.0, 1.0, 2.0]]), SlicingSpec(3, 0, 2))


def test_sw2_symmetric(rng):
    a, b = M(rng.normal(size=(6, 2))), M(rng.normal(size=(6, 2)))
    spec = SlicingSpec(50, 4, 2)
    assert sw2_empirical(a, b, spec) == sw2_empirical(b, a, spec)


def test_sw2_below_w2(rng):
    spec = SlicingSpec(50, 8, 2)
    for _ in range(20):
        x, y = rng.normal(size=(5, 2)), rng.normal(size=(5, 2)) + rng.normal(size=2)
        terms = sliced_w2sq_terms(M(x), M(y), spec)
        sw = np.sqrt(terms.mean())
        se = terms.std(ddof=1) / np.sqrt(terms.size) / (2 * max(sw, 1e-12))
        assert sw <= w2_lp(x, y) + 3 * se


# ------------------------------------------------------------ Gaussian / Beta closed forms

def test_w2_gaussian_examples():
    assert w2_gaussian([0], [[1]], [0], [[1]]) == 0.0
    assert w2_gaussian([0], [[1]], [3], [[1]]) == pytest.approx(3.0, abs=1e-12)
    v = w2_gaussian([-1, 0], np.diag([1, 0.5]), [0, 1], np.diag([0.5, 1]))
    expected = np.sqrt(2 + 2 * (1 - np.sqrt(0.5)) ** 2)
    assert v == pytest.approx(expected, abs=1e-12)
    assert v == pytest.approx(1.47363, abs=1e-5)


def test_w2_gaussian_commuting_form(rng):
    for _ in range(20):
        s1, s2 = rng.uniform(0.1, 3, 3), rng.uniform(0.1, 3, 3)
        m1, m2 = rng.normal(size=3), rng.normal(size=3)
        direct = np.sqrt(np.sum((m1 - m2) ** 2) + np.sum((np.sqrt(s1) - np.sqrt(s2)) ** 2))
        assert w2_gaussian(m1, np.diag(s1), m2, np.diag(s2)) == pytest.approx(direct, abs=1e-10)


def test_w2_gaussian_rotation_invariant(rng):
    for _ in range(20):
        A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
        S1, S2 = A @ A.T, B @ B.T
        m1, m2 = rng.normal(size=3), rng.normal(size=3)
        Q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
        base = w2_gaussian(m1, S1, m2, S2)
        rot = w2_gaussian(Q @ m1, Q @ S1 @ Q.T, Q @ m2, Q @ S2 @ Q.T)
        assert rot == pytest.approx(base, abs=1e-10)
        assert w2_gaussian(m2, S2, m1, S1) == pytest.approx(base, abs=1e-10)


def test_w2_gaussian_rejects_bad_cov():
    with pytest.raises(DistanceError, match="symmetric"):
        w2_gaussian([0, 0], [[1, 0.5], [0, 1]], [0, 0], np.eye(2))
    with pytest.raises(DistanceError, match="indefinite"):
        w2_gaussian([0, 0], [[1, 2], [2, 1]], [0, 0], np.eye(2))


def _hellinger_beta_quad(a1, b1, a2, b2):
    f = lambda t: np.sqrt(stats.beta.pdf(t, a1, b1) * stats.beta.pdf(t, a2, b2))
    return 1 - integrate.quad(f, 0, 1, limit=200)[0]


def test_hellinger_beta_examples():
    assert hellinger_beta(2, 3, 2, 3) == 0.0
    assert hellinger_beta(1, 1, 3, 1) == pytest.approx(1 - np.sqrt(3) / 2, abs=1e-12)
    assert hellinger_beta(1, 1, 3, 1) == pytest.approx(_hellinger_beta_quad(1, 1, 3, 1), abs=1e-8)
    h = hellinger_beta(2, 1, 2, 3)
    assert 0 < h < 1
    assert h == hellinger_beta(2, 3, 2, 1)
    assert h == pytest.approx(_hellinger_beta_quad(2, 1, 2, 3), abs=1e-8)
    with pytest.raises(DistanceError):
        hellinger_beta(0, 1, 1, 1)


def test_hellinger_gaussian_examples():
    assert hellinger_gaussian([0, 0], np.eye(2), [0, 0], np.eye(2)) == 0.0
    assert hellinger_gaussian_sq([0], [[1]], [1], [[1]]) == pytest.approx(1 - np.exp(-1 / 8), abs=1e-14)
    assert hellinger_gaussian_sq([0, 0], np.eye(2), [0, 0], 4 * np.eye(2)) == pytest.approx(0.2, abs=1e-12)
    assert hellinger_gaussian([0, 0], np.eye(2), [0, 0], 4 * np.eye(2)) == pytest.approx(np.sqrt(0.2), abs=1e-12)


def test_hellinger_gaussian_quadrature():
    f = lambda t: np.sqrt(stats.norm.pdf(t, 0.3, 1.2) * stats.norm.pdf(t, -0.5, 0.7))
    oracle = 1 - integrate.quad(f, -np.inf, np.inf)[0]
    assert hellinger_gaussian_sq([0.3], [[1.44]], [-0.5], [[0.49]]) == pytest.approx(oracle, abs=1e-10)


# ------------------------------------------------------------ matrices

def test_pairwise_zero_for_identical():
    ms = [M([1.0, 2.0, 3.0])] * 4
    assert np.all(pairwise_matrix(ms).values == 0)


def test_pairwise_matches_singles(rng):
    ms = [M(rng.normal(size=7)) for _ in range(3)]
    D = pairwise_matrix(ms, "W2")
    assert D.metric == "W2" and D.n == 3
    for i in range(3):
        for k in range(3):
            assert D.values[i, k] == pytest.approx(w2_empirical_1d(ms[i], ms[k]), abs=1e-12)
    assert np.array_equal(D.values, D.values.T)


def test_pairwise_mixed_sizes(rng):
    ms = [M(rng.normal(size=s)) for s in (4, 5, 5, 8)]
    D = pairwise_matrix(ms, "W2")
    assert np.array_equal(D.values, D.values.T)
    assert D.values[1, 2] == w2_empirical_1d(ms[1], ms[2])
    assert D.values[0, 3] == w2_empirical_1d(ms[0], ms[3])


def test_pairwise_sw2_below_lp(rng):
    spec = SlicingSpec(50, 3, 2)
    pts = [rng.normal(size=(5, 2)) * rng.uniform(0.5, 2) + rng.normal(size=2) for _ in range(10)]
    ms = [M(p) for p in pts]
    D = pairwise_matrix(ms, "SW2", spec)
    for i in range(10):
        for k in range(i + 1, 10):
            terms = sliced_w2sq_terms(ms[i], ms[k], spec)
            se = terms.std(ddof=1) / np.sqrt(terms.size) / (2 * D.values[i, k])
            assert D.values[i, k] == pytest.approx(np.sqrt(terms.mean()), abs=1e-12)
            assert D.values[i, k] <= w2_lp(pts[i], pts[k]) + 3 * se


def test_pairwise_errors(rng):
    with pytest.raises(DistanceError):
        pairwise_matrix([M([1.0])])
    with pytest.raises(DistanceError, match="SlicingSpec"):
        pairwise_matrix([M(rng.normal(size=(3, 2))) for _ in range(3)], "SW2")
    with pytest.raises(DistanceError, match="univariate"):
        pairwise_matrix([M(rng.normal(size=(3, 2))) for _ in range(3)], "W2")


def test_cross_matrix_consistent(rng):
    spec = SlicingSpec(10, 2, 2)
    A = [M(rng.normal(size=(6, 2))) for _ in range(4)]
    B = [M(rng.normal(size=(6, 2))) for _ in range(3)]
    C = cross_matrix(A, B, "SW2", spec)
    assert C.shape == (4, 3)
    for i in range(4):
        for k in range(3):
            assert C[i, k] == pytest.approx(sw2_empirical(A[i], B[k], spec), abs=1e-12)


def test_distance_csv(tmp_path, rng):
    D = pairwise_matrix([M(rng.normal(size=5)) for _ in range(3)])
    D.to_csv(tmp_path / "d.csv")
    back = np.loadtxt(tmp_path / "d.csv", delimiter=",")
    assert np.array_equal(back, D.values)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-100, 100), min_size=1, max_size=6).flatmap(
    lambda xs: st.tuples(st.just(xs), st.lists(st.floats(-100, 100), min_size=len(xs), max_size=len(xs)))))
def test_w2_assignment_property(pair):
    x, y = pair
    assert w2_empirical_1d(M(x), M(y)) == pytest.approx(w2_assignment(x, y), abs=1e-9, rel=1e-12)

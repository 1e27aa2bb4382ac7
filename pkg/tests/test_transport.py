import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog
from scipy.spatial.distance import cdist

from cdpersistence.errors import DimensionMismatch
from cdpersistence.pointcloud import EmpiricalMeasure, circle_points
from cdpersistence.transport import (
    distance_function, hausdorff, transport_functional_gap, transport_simplex, wasserstein,
)


def lp_wasserstein(a: EmpiricalMeasure, b: EmpiricalMeasure) -> float:
    """Reference value from the dense transportation LP solved by HiGHS."""
    C = cdist(a.points, b.points)
    n, m = C.shape
    A_eq = np.zeros((n + m, n * m))
    for i in range(n):
        A_eq[i, i * m:(i + 1) * m] = 1.0
    for j in range(m):
        A_eq[n + j, j::m] = 1.0
    res = linprog(C.ravel(), A_eq=A_eq, b_eq=np.concatenate([a.weights, b.weights]),
                  bounds=(0, None), method="highs")
    assert res.status == 0
    return res.fun


def random_measure(rng, size, dim, uniform=False):
    pts = rng.uniform(-1, 1, (size, dim))
    if uniform:
        return EmpiricalMeasure.uniform(pts)
    w = rng.random(size) + 0.05
    return EmpiricalMeasure(pts, w / w.sum())


@pytest.mark.parametrize("seed", range(25))
def test_wasserstein_matches_lp(seed):
    rng = np.random.default_rng(seed)
    dim = 1 + seed % 3
    a = random_measure(rng, rng.integers(1, 30), dim, uniform=seed % 2 == 0)
    b = random_measure(rng, rng.integers(1, 30), dim)
    dist, plan = wasserstein(a, b)
    assert dist == pytest.approx(lp_wasserstein(a, b), abs=1e-9)
    G = plan.as_matrix(len(a), len(b))
    assert np.allclose(G.sum(axis=1), a.weights, atol=1e-9)
    assert np.allclose(G.sum(axis=0), b.weights, atol=1e-9)
    assert plan.cost == pytest.approx((G * cdist(a.points, b.points)).sum(), abs=1e-9)


def test_wasserstein_examples():
    a = EmpiricalMeasure.uniform([[0.0, 0.0]])
    b = EmpiricalMeasure.uniform([[1.0, 0.0]])
    assert wasserstein(a, b)[0] == pytest.approx(1.0)
    c = EmpiricalMeasure.uniform(circle_points(8, 0.4))
    assert wasserstein(c, c)[0] == pytest.approx(0.0, abs=1e-12)
    # singleton target: every unit of mass travels straight to it
    rng = np.random.default_rng(3)
    x = random_measure(rng, 12, 2)
    y = np.array([[0.3, -0.2]])
    expected = float(np.dot(x.weights, np.linalg.norm(x.points - y, axis=1)))
    assert wasserstein(x, EmpiricalMeasure.uniform(y))[0] == pytest.approx(expected, abs=1e-12)


def test_wasserstein_self_merge_is_zero():
    rng = np.random.default_rng(1)
    a = random_measure(rng, 10, 2)
    doubled = EmpiricalMeasure(np.vstack([a.points, a.points]), np.concatenate([a.weights, a.weights]) / 2)
    assert wasserstein(a, doubled)[0] == pytest.approx(0.0, abs=1e-12)


def test_wasserstein_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        wasserstein(EmpiricalMeasure.uniform([[0.0]]), EmpiricalMeasure.uniform([[0.0, 0.0]]))


def test_degenerate_transport_problem():
    # many ties in cost and mass: exercises the anti-cycling fallback
    a = np.full(12, 1 / 12)
    b = np.full(12, 1 / 12)
    C = np.ones((12, 12))
    np.fill_diagonal(C, 0.0)
    cost, flow = transport_simplex(a, b, C[::-1])
    assert cost == pytest.approx(0.0, abs=1e-12)
    assert np.allclose(flow.sum(axis=0), b)


def test_max_support_size_subsamples():
    rng = np.random.default_rng(0)
    a = random_measure(rng, 300, 2, uniform=True)
    b = random_measure(rng, 300, 2, uniform=True)
    est, _ = wasserstein(a, b, max_support_size=50, seed=1)
    assert est >= 0


measures = st.integers(0, 2**32 - 1).map(lambda s: np.random.default_rng(s))


@settings(max_examples=30, deadline=None)
@given(measures)
def test_wasserstein_symmetric_and_triangle(rng):
    a, b, c = (random_measure(rng, int(rng.integers(1, 12)), 2) for _ in range(3))
    ab, ba = wasserstein(a, b)[0], wasserstein(b, a)[0]
    assert ab == pytest.approx(ba, abs=1e-9)
    assert ab <= wasserstein(a, c)[0] + wasserstein(c, b)[0] + 1e-9


def brute_hausdorff(A, B):
    d = lambda p, q: np.sqrt(sum((x - y) ** 2 for x, y in zip(p, q)))
    ab = max(min(d(p, q) for q in B) for p in A)
    ba = max(min(d(p, q) for p in A) for q in B)
    return max(ab, ba)


def test_hausdorff_examples():
    assert hausdorff([[0.0, 0.0]], [[0.0, 0.0]]) == 0.0
    assert hausdorff(np.array([0.0]), np.array([0.0, 1.0])) == pytest.approx(1.0)
    assert hausdorff([[0.0, 0.0]], [[3.0, 4.0]]) == pytest.approx(5.0)
    with pytest.raises(DimensionMismatch):
        hausdorff([[0.0]], [[0.0, 1.0]])


@settings(max_examples=40, deadline=None)
@given(measures)
def test_hausdorff_brute_force_symmetry_triangle(rng):
    A, B, C = (rng.uniform(-1, 1, (int(rng.integers(1, 9)), 2)) for _ in range(3))
    ab = hausdorff(A, B)
    assert ab == pytest.approx(brute_hausdorff(A.tolist(), B.tolist()), abs=1e-12)
    assert ab == hausdorff(B, A)
    assert ab <= hausdorff(A, C) + hausdorff(C, B) + 1e-12


def test_distance_function_examples():
    circle = circle_points(8, 0.4)
    assert distance_function(circle, [0.0, 0.0]) == pytest.approx(0.4)
    assert distance_function(circle, circle[3]) == 0.0
    assert distance_function(np.array([-1.0, 1.0]), 0.0) == pytest.approx(1.0)
    grid = np.random.default_rng(0).uniform(-1, 1, (50, 2))
    vec = distance_function(circle, grid)
    assert np.allclose(vec, cdist(grid, circle).min(axis=1))


def test_transport_functional_gap_examples():
    a = EmpiricalMeasure.uniform([[0.0]])
    b = EmpiricalMeasure.uniform([[1.0]])
    assert transport_functional_gap(a, b, lambda X: np.full(len(X), 7.0), 1e-3)
    assert transport_functional_gap(a, b, lambda X: X[:, 0], 1.0)


@pytest.mark.parametrize("seed", range(10))
def test_transport_functional_gap_markov_polynomials(seed):
    # a degree-2 polynomial is Lipschitz on the box with constant 2^2 * sup|c| (Markov)
    rng = np.random.default_rng(seed)
    coef = rng.normal(size=6)
    c = lambda X: coef @ np.array([np.ones(len(X)), X[:, 0], X[:, 1], X[:, 0] ** 2, X[:, 0] * X[:, 1], X[:, 1] ** 2])
    grid = np.stack(np.meshgrid(*[np.linspace(-1, 1, 201)] * 2), -1).reshape(-1, 2)
    eta = 2 ** 2 * np.abs(c(grid)).max()
    a, b = random_measure(rng, 20, 2, uniform=True), random_measure(rng, 20, 2, uniform=True)
    dist = lp_wasserstein(a, b)
    assert transport_functional_gap(a, b, c, eta, distance=dist)


@settings(max_examples=200, deadline=None)
@given(measures)
def test_transport_functional_gap_lipschitz(rng):
    a, b = random_measure(rng, 8, 2), random_measure(rng, 8, 2)
    v = rng.normal(size=2)
    eta = float(np.linalg.norm(v)) + float(rng.random())
    c = lambda X: np.abs(X @ v) + np.sin(X @ v)  # Lipschitz constant <= 2|v|
    assert transport_functional_gap(a, b, c, 2 * eta)

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdpersistence.errors import NonFiniteValue, OutOfDomain, ResourceLimit
from cdpersistence.grid_complex import (
    build_freudenthal, locate_simplex, lower_star, pl_error_bound, pl_interpolate, simplex_counts,
)


def kuhn_oracle(n, m):
    """All simplices of the Kuhn triangulation, by walking every permutation in every cube."""
    def index(g):
        return sum(int(c) * (m + 1) ** i for i, c in enumerate(g))

    out = [set() for _ in range(n + 1)]
    for cell in itertools.product(range(m), repeat=n):
        for perm in itertools.permutations(range(n)):
            g = list(cell)
            verts = [index(g)]
            for axis in perm:
                g[axis] += 1
                verts.append(index(g))
            for k in range(n + 1):
                for face in itertools.combinations(sorted(verts), k + 1):
                    out[k].add(face)
    return out


@pytest.mark.parametrize("n,m", [(1, 1), (1, 4), (2, 1), (2, 3), (2, 5), (3, 1), (3, 2), (3, 3)])
def test_matches_enumeration_oracle(n, m):
    cplx = build_freudenthal(n, m)
    oracle = kuhn_oracle(n, m)
    for k in range(n + 1):
        got = {tuple(int(v) for v in row) for row in cplx.simplices[k]}
        assert len(got) == len(cplx.simplices[k]), "duplicate simplices"
        assert got == oracle[k]


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("m", [1, 2, 5, 10])
def test_counts_euler_closure(n, m):
    cplx = build_freudenthal(n, m)
    counts = cplx.counts()
    assert counts == simplex_counts(n, m)
    assert counts[0] == (m + 1) ** n
    assert counts[n] == math.factorial(n) * m ** n
    assert cplx.euler_characteristic() == 1
    for k in range(1, n + 1):
        # facets[k] points at the actual faces
        faces = cplx.simplices[k - 1][cplx.facets[k]]
        for j in range(k + 1):
            expected = np.delete(cplx.simplices[k], k - j, axis=1)
            assert any(np.array_equal(faces[:, i], expected) for i in range(k + 1))


def test_known_counts():
    assert build_freudenthal(2, 3).counts() == [16, 33, 18]
    assert build_freudenthal(1, 4).counts() == [5, 4]
    c = build_freudenthal(3, 2).counts()
    assert c[0] == 27 and c[3] == 48


@pytest.mark.parametrize("n,m", [(2, 3), (3, 2)])
def test_simplex_diameter(n, m):
    cplx = build_freudenthal(n, m)
    X = cplx.vertex_coords()
    top = cplx.simplices[n]
    diam = max(np.linalg.norm(X[s][:, None] - X[s][None], axis=-1).max() for s in top)
    assert diam == pytest.approx(cplx.diameter)
    assert cplx.diameter == pytest.approx(2 * math.sqrt(n) / m)


def test_resource_limit():
    with pytest.raises(ResourceLimit):
        build_freudenthal(3, 50, max_simplices=1000)


def test_locate_examples():
    cplx = build_freudenthal(2, 1)
    verts, w = locate_simplex(cplx, [0.0, 0.0])
    # center of the square lies on the diagonal from (-1,-1) to (1,1)
    assert sorted(verts) == [0, 3] and np.allclose(w, [0.5, 0.5])
    verts, w = locate_simplex(cplx, [1.0, -1.0])
    assert verts == (1,) and np.allclose(w, [1.0])
    verts, w = locate_simplex(build_freudenthal(3, 4), [0.13, -0.41, 0.77])
    assert len(verts) == 4 and np.all(w > 0) and w.sum() == pytest.approx(1.0)
    with pytest.raises(OutOfDomain):
        locate_simplex(cplx, [1.5, 0.0])


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_locate_reconstructs_point(n, m, seed):
    rng = np.random.default_rng(seed)
    cplx = build_freudenthal(n, m)
    x = rng.uniform(-1, 1, n)
    verts, w = locate_simplex(cplx, x)
    assert np.allclose(w @ cplx.vertex_coords(np.array(verts)), x, atol=1e-12)
    # the located vertices span a simplex of the complex
    k = len(verts) - 1
    rows = {tuple(r) for r in cplx.simplices[k].tolist()}
    assert tuple(sorted(verts)) in rows


def test_pl_interpolate_examples():
    cplx = build_freudenthal(1, 2)
    f = lower_star(cplx, cplx.vertex_coords()[:, 0] ** 2)
    assert pl_interpolate(f, [0.5]) == pytest.approx(0.5)
    assert pl_interpolate(f, [1.0]) == pytest.approx(1.0)
    with pytest.raises(OutOfDomain):
        pl_interpolate(f, [2.0])


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_pl_reproduces_affine(n, m, seed):
    rng = np.random.default_rng(seed)
    a, c = rng.normal(size=n), rng.normal()
    cplx = build_freudenthal(n, m)
    f = lower_star(cplx, cplx.vertex_coords() @ a + c)
    x = rng.uniform(-1, 1, n)
    assert pl_interpolate(f, x) == pytest.approx(x @ a + c, abs=1e-12)


def test_pl_continuous_across_faces():
    # points on the shared diagonal of a cell, evaluated from both neighbouring triangles
    rng = np.random.default_rng(0)
    cplx = build_freudenthal(2, 4)
    f = lower_star(cplx, rng.normal(size=cplx.vertex_count))
    for t in np.linspace(0.05, 0.95, 7):
        x = np.array([-1 + 0.5 * t, -1 + 0.5 * t])
        above = pl_interpolate(f, x + [0.0, 1e-13])
        below = pl_interpolate(f, x + [1e-13, 0.0])
        assert above == pytest.approx(below, abs=1e-11)


@pytest.mark.parametrize("seed", range(5))
def test_pl_approximation_error(seed):
    # f(x) = sin(a.x) is |a|-Lipschitz
    rng = np.random.default_rng(seed)
    n, m = 2, 12
    a = rng.normal(size=n) * 3
    L = float(np.linalg.norm(a))
    cplx = build_freudenthal(n, m)
    filt = lower_star(cplx, np.sin(cplx.vertex_coords() @ a))
    X = rng.uniform(-1, 1, (10_000, n))
    err = max(abs(filt.pl_interpolate(x) - np.sin(x @ a)) for x in X)
    assert err <= L * cplx.diameter


def test_lower_star_examples():
    cplx = build_freudenthal(1, 3)
    f = lower_star(cplx, [0.0, 1.0, 0.0, 2.0])
    assert np.allclose(f.simplex_values[1], [1, 1, 2])
    flat = lower_star(build_freudenthal(2, 2), np.zeros(9))
    dims = flat.order_dim
    assert np.all(np.diff(dims) >= 0)
    with pytest.raises(NonFiniteValue):
        lower_star(cplx, [0.0, np.nan, 0.0, 1.0])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_lower_star_order_is_a_filtration(n, m, seed):
    rng = np.random.default_rng(seed)
    cplx = build_freudenthal(n, m)
    vals = rng.integers(0, 4, cplx.vertex_count).astype(float)  # ties on purpose
    f = lower_star(cplx, vals)
    for k in range(n + 1):
        assert np.allclose(f.simplex_values[k], vals[cplx.simplices[k]].max(axis=1))
    for k in range(1, n + 1):
        assert np.all(f.boundary_rows(k).max(axis=1) < f.position[k])
    ordered = f.ordered_values()
    assert np.all(np.diff(ordered) >= 0)


def test_filtration_export():
    cplx = build_freudenthal(1, 2)
    f = lower_star(cplx, [0.5, 0.0, 1.0])
    lines = f.export_text().splitlines()
    assert lines[0] == "0 0.0 1"
    assert lines[-1] == "1 1.0 1 2"
    blob = f.export_binary()
    assert len(blob) == 3 * (4 + 8 + 8) + 2 * (4 + 8 + 16)


def test_pl_error_bound():
    assert pl_error_bound(1, 1, 2) == pytest.approx(1.0)
    assert pl_error_bound(1, 4, 4) == pytest.approx(1.0)
    assert pl_error_bound(3, 2, 250) == pytest.approx(6 * math.sqrt(2) / 250)
    with pytest.raises(ValueError):
        pl_error_bound(0, 1, 1)

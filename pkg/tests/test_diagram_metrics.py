import itertools
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cdpersistence.diagram_metrics import (
    bottleneck, format_ratio, interval_cost, pair_cost, signal_to_noise,
)
from cdpersistence.errors import InsufficientIntervals
from cdpersistence.grid_complex import build_freudenthal, lower_star
from cdpersistence.persistence import PersistenceDiagram, compute_persistence


def oracle_bottleneck(A, B):
    """Minimum over every partial bijection of the max cost, by enumeration."""
    A, B = [tuple(x) for x in A], [tuple(x) for x in B]
    best = math.inf
    for k in range(min(len(A), len(B)) + 1):
        for left in itertools.combinations(range(len(A)), k):
            for right in itertools.permutations(range(len(B)), k):
                costs = [pair_cost(A[i], B[j]) for i, j in zip(left, right)]
                costs += [interval_cost(A[i]) for i in range(len(A)) if i not in left]
                costs += [interval_cost(B[j]) for j in range(len(B)) if j not in right]
                best = min(best, max(costs, default=0.0))
    return best


def test_interval_cost():
    assert interval_cost([0, 2]) == 1.0
    assert interval_cost([3, 3]) == 0.0
    assert interval_cost([0, math.inf]) == math.inf


def test_pair_cost():
    assert pair_cost([0, 2], [0, 2]) == 0.0
    assert pair_cost([0, 2], [0.5, 2.5]) == 0.5
    assert pair_cost([0, math.inf], [1, math.inf]) == 1.0
    assert pair_cost([0, 3], [0, math.inf]) == math.inf


def test_bottleneck_examples():
    assert bottleneck([[0, 2]], [])[0] == 1.0
    assert bottleneck([[0, 2]], [[0.5, 2.5]])[0] == 0.5
    d = PersistenceDiagram({0: [[0, 1], [0.2, math.inf]], 1: [[0.3, 0.6]]})
    assert bottleneck(d, d, 0)[0] == 0.0 and bottleneck(d, d, 1)[0] == 0.0
    assert bottleneck([], [])[0] == 0.0
    assert bottleneck([[0, math.inf]], [[0, 5]])[0] == math.inf
    assert bottleneck([[0, math.inf]], [[0.25, math.inf], [0, 0.1]])[0] == 0.25
    with pytest.raises(ValueError):
        bottleneck(d, d)


def random_diagram(rng, k, with_inf=False):
    b = rng.integers(0, 6, k) / 2.0        # coarse values create ties
    d = b + rng.integers(1, 6, k) / 2.0
    if with_inf and k:
        d[0] = math.inf
    return np.column_stack([b, d])


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 6), st.integers(0, 2**32 - 1), st.booleans())
def test_against_exhaustive_oracle(total, seed, with_inf):
    rng = np.random.default_rng(seed)
    k1 = int(rng.integers(0, total + 1))
    A = random_diagram(rng, k1, with_inf)
    B = random_diagram(rng, total - k1, with_inf and rng.random() < 0.5)
    value, matching = bottleneck(A, B)
    assert value == oracle_bottleneck(A, B)
    # the matching is a partial bijection realising the value
    left = [i for i, _ in matching.pairs]
    right = [j for _, j in matching.pairs]
    assert len(set(left)) == len(left) and len(set(right)) == len(right)
    assert sorted(left + matching.unmatched_1) == list(range(len(A)))
    assert sorted(right + matching.unmatched_2) == list(range(len(B)))
    if math.isfinite(value):
        costs = [pair_cost(A[i], B[j]) for i, j in matching.pairs]
        costs += [interval_cost(A[i]) for i in matching.unmatched_1]
        costs += [interval_cost(B[j]) for j in matching.unmatched_2]
        assert matching.cost == max(costs, default=0.0) == value


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pseudometric_and_translation(seed):
    rng = np.random.default_rng(seed)
    A, B, C = (rng.uniform(0, 1, (int(rng.integers(0, 12)), 2)).cumsum(axis=1) for _ in range(3))
    ab = bottleneck(A, B)[0]
    assert ab == bottleneck(B, A)[0]
    assert ab <= bottleneck(A, C)[0] + bottleneck(C, B)[0] + 1e-9
    shift = float(rng.normal())
    assert bottleneck(A + shift, B + shift)[0] == pytest.approx(ab, abs=1e-12)


@pytest.mark.parametrize("seed", range(25))
def test_stability_under_vertex_perturbation(seed):
    rng = np.random.default_rng(seed)
    n, m = 1 + seed % 2, 6
    cplx = build_freudenthal(n, m)
    f = rng.normal(size=cplx.vertex_count)
    g = f + rng.uniform(-0.3, 0.3, size=f.shape)
    Df, Dg = compute_persistence(lower_star(cplx, f)), compute_persistence(lower_star(cplx, g))
    for p in range(n + 1):
        assert bottleneck(Df, Dg, p)[0] <= np.abs(f - g).max() + 1e-9


def test_matching_json():
    _, matching = bottleneck([[0, 2], [0, 0.2]], [[0.5, 2.5]])
    obj = json.loads(matching.to_json())
    assert obj["pairs"] == [[0, 0]] and obj["unmatched"] == [[1], []] and obj["cost"] == 0.5


def test_signal_to_noise():
    d = PersistenceDiagram({1: [[0, 5], [0, 4], [0, 1]]})
    assert signal_to_noise(d, 1, 2) == 4.0
    assert signal_to_noise(d, 1, 3) == math.inf
    assert signal_to_noise(PersistenceDiagram({1: [[0, 2], [1, 3]]}), 1, 1) == 1.0
    with pytest.raises(InsufficientIntervals):
        signal_to_noise(d, 1, 4)
    with pytest.raises(ValueError):
        signal_to_noise(d, 1, 0)
    # infinite intervals do not enter the ratio
    assert signal_to_noise(PersistenceDiagram({0: [[0, math.inf], [0, 3], [0, 1]]}), 0, 1) == 3.0
    assert format_ratio(math.inf) == ">> 10" and format_ratio(7.84) == "7.8"
    assert format_ratio(53.2) == ">> 10" and format_ratio(10.0) == "10.0"

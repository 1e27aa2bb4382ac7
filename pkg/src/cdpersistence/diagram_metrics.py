"""Bottleneck distance between persistence diagrams and the signal-to-noise ratio.

Costs follow the interval conventions: leaving ``I = [b, d)`` unmatched costs
``(d - b) / 2``, matching ``I`` with ``J`` costs the larger endpoint gap, with
``|inf - inf| = 0``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .errors import InsufficientIntervals
from .persistence import PersistenceDiagram


def interval_cost(interval) -> float:
    b, d = float(interval[0]), float(interval[1])
    if math.isinf(d):
        return math.inf
    return (d - b) / 2.0


def _endpoint_gap(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    both_inf = np.isinf(x) & np.isinf(y) & (np.sign(x) == np.sign(y))
    with np.errstate(invalid="ignore"):
        gap = np.abs(x - y)
    return np.where(both_inf, 0.0, gap)


def pair_cost(I, J) -> float:
    gb = _endpoint_gap(I[0], J[0])
    gd = _endpoint_gap(I[1], J[1])
    return float(max(gb, gd))


@dataclass
class Matching:
    pairs: list          # (index in D1, index in D2)
    unmatched_1: list
    unmatched_2: list
    cost: float

    def to_json(self) -> str:
        return json.dumps({
            "pairs": [list(p) for p in self.pairs],
            "unmatched": [self.unmatched_1, self.unmatched_2],
            "cost": None if math.isinf(self.cost) else self.cost,
        })


def _cost_tables(A: np.ndarray, B: np.ndarray):
    pair = np.maximum(
        _endpoint_gap(A[:, None, 0], B[None, :, 0]),
        _endpoint_gap(A[:, None, 1], B[None, :, 1]),
    )
    half_a = np.where(np.isinf(A[:, 1]), np.inf, (A[:, 1] - A[:, 0]) / 2.0)
    half_b = np.where(np.isinf(B[:, 1]), np.inf, (B[:, 1] - B[:, 0]) / 2.0)
    return pair, half_a, half_b


def _perfect_matching(pair, half_a, half_b, delta):
    """Maximum matching of the threshold graph; ``None`` if it is not perfect.

    Left nodes: intervals of A, then one diagonal slot per interval of B.
    Right nodes: intervals of B, then one diagonal slot per interval of A.
    """
    ka, kb = pair.shape
    rows, cols = [], []
    r, c = np.nonzero(pair <= delta)
    rows.append(r)
    cols.append(c)
    ia = np.flatnonzero(half_a <= delta)
    rows.append(ia)
    cols.append(kb + ia)
    ib = np.flatnonzero(half_b <= delta)
    rows.append(ka + ib)
    cols.append(ib)
    # diagonal slots match each other freely
    dr, dc = np.meshgrid(np.arange(kb), np.arange(ka), indexing="ij")
    rows.append(ka + dr.ravel())
    cols.append(kb + dc.ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    size = ka + kb
    graph = csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(size, size))
    match = maximum_bipartite_matching(graph, perm_type="column")
    if np.any(match < 0):
        return None
    return match


def bottleneck(D1, D2, degree: int | None = None):
    """Exact bottleneck distance and an optimal matching.

    ``D1``/``D2`` are :class:`PersistenceDiagram` (then ``degree`` selects the
    homology degree) or plain ``(k, 2)`` interval arrays. The optimum is one of
    the pairwise or unmatched costs; binary search over those candidates with a
    perfect-matching test on the threshold graph finds it.
    """
    A = _intervals(D1, degree)
    B = _intervals(D2, degree)
    ka, kb = len(A), len(B)
    if ka == 0 and kb == 0:
        return 0.0, Matching([], [], [], 0.0)
    pair, half_a, half_b = _cost_tables(A, B)
    cands = np.unique(np.concatenate([[0.0], pair.ravel(), half_a, half_b]))
    cands = cands[np.isfinite(cands)]
    lo, hi = 0, len(cands) - 1
    best = None
    if _perfect_matching(pair, half_a, half_b, cands[hi]) is None:
        value = math.inf
        match = _perfect_matching(pair, half_a, half_b, math.inf)
    else:
        while lo < hi:
            mid = (lo + hi) // 2
            if _perfect_matching(pair, half_a, half_b, cands[mid]) is not None:
                hi = mid
            else:
                lo = mid + 1
        value = float(cands[lo])
        match = _perfect_matching(pair, half_a, half_b, cands[lo])
    best = _extract(match, pair, half_a, half_b)
    best.cost = value if math.isinf(value) else best.cost
    return value, best


def _extract(match, pair, half_a, half_b) -> Matching:
    ka, kb = pair.shape
    pairs, un_a, un_b = [], [], []
    matched_b = set()
    for i in range(ka):
        j = int(match[i])
        if j < kb:
            pairs.append((i, j))
            matched_b.add(j)
        else:
            un_a.append(i)
    un_b = [j for j in range(kb) if j not in matched_b]
    costs = [pair[i, j] for i, j in pairs] + [half_a[i] for i in un_a] + [half_b[j] for j in un_b]
    return Matching(pairs, un_a, un_b, float(max(costs)) if costs else 0.0)


def _intervals(D, degree) -> np.ndarray:
    if isinstance(D, PersistenceDiagram):
        if degree is None:
            raise ValueError("degree is required for PersistenceDiagram inputs")
        return D[degree]
    return np.asarray(D, dtype=float).reshape(-1, 2)


def signal_to_noise(diagram, degree: int, true_count: int) -> float:
    """``L_k / L_{k+1}`` for the finite interval lengths sorted descending.

    ``inf`` when there is no ``(k+1)``-th interval (displayed as ``>> 10``).
    """
    if true_count < 1:
        raise ValueError("true_count must be >= 1")
    iv = _intervals(diagram, degree)
    lengths = iv[:, 1] - iv[:, 0]
    lengths = np.sort(lengths[np.isfinite(lengths)])[::-1]
    k = true_count
    if len(lengths) < k:
        raise InsufficientIntervals(f"{len(lengths)} finite intervals in degree {degree}, need {k}")
    if len(lengths) == k:
        return math.inf
    return float(lengths[k - 1] / lengths[k])


def format_ratio(value: float, cap: float = 10.0) -> str:
    """Table cell for a ratio; anything above ``cap`` (including ``inf``) shows as ``>> 10``."""
    return f">> {cap:g}" if value > cap else f"{value:.1f}"

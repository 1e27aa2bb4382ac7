"""Ground metrics on point clouds: exact Wasserstein-1, Hausdorff, distance function."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numba
import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimensionMismatch
from .pointcloud import EmpiricalMeasure

_CHUNK = 4096


@dataclass(frozen=True)
class TransportPlan:
    entries: dict  # (source index, target index) -> mass
    cost: float

    def as_matrix(self, n_source: int, n_target: int) -> np.ndarray:
        out = np.zeros((n_source, n_target))
        for (i, j), mass in self.entries.items():
            out[i, j] = mass
        return out


@numba.njit(cache=True)
def _network_simplex(a, b, C, max_iter):
    n, m = C.shape
    nodes = n + m
    # basis: n + m - 1 tree cells, initialised by the northwest-corner rule
    ei_arr = np.empty(nodes - 1, dtype=np.int64)
    ej_arr = np.empty(nodes - 1, dtype=np.int64)
    flow = np.empty(nodes - 1)
    ra = a.copy()
    rb = b.copy()
    i = 0
    j = 0
    k = 0
    while True:
        f = min(ra[i], rb[j])
        ei_arr[k] = i
        ej_arr[k] = j
        flow[k] = f
        k += 1
        ra[i] -= f
        rb[j] -= f
        if i == n - 1 and j == m - 1:
            break
        if j == m - 1 or (i < n - 1 and ra[i] <= rb[j]):
            i += 1
        else:
            j += 1

    scale = 1.0
    for x in range(n):
        for y in range(m):
            if abs(C[x, y]) > scale:
                scale = abs(C[x, y])
    tol = 1e-12 * scale
    block = max(int(np.sqrt(n * m)), 16)
    start = 0
    degenerate_run = 0

    pot = np.zeros(nodes)
    parent = np.empty(nodes, dtype=np.int64)
    parent_edge = np.empty(nodes, dtype=np.int64)
    depth = np.empty(nodes, dtype=np.int64)
    deg = np.empty(nodes, dtype=np.int64)
    offs = np.empty(nodes + 1, dtype=np.int64)
    nbr = np.empty(2 * (nodes - 1), dtype=np.int64)
    nbr_edge = np.empty(2 * (nodes - 1), dtype=np.int64)
    queue = np.empty(nodes, dtype=np.int64)
    seen = np.empty(nodes, dtype=np.bool_)
    path_l = np.empty(nodes, dtype=np.int64)
    path_r = np.empty(nodes, dtype=np.int64)
    cyc = np.empty(nodes, dtype=np.int64)

    for it in range(max_iter):
        # adjacency of the current tree (CSR), then BFS from source 0 for potentials
        deg[:] = 0
        for e in range(nodes - 1):
            deg[ei_arr[e]] += 1
            deg[n + ej_arr[e]] += 1
        offs[0] = 0
        for x in range(nodes):
            offs[x + 1] = offs[x] + deg[x]
        deg[:] = 0
        for e in range(nodes - 1):
            u = ei_arr[e]
            w = n + ej_arr[e]
            nbr[offs[u] + deg[u]] = w
            nbr_edge[offs[u] + deg[u]] = e
            deg[u] += 1
            nbr[offs[w] + deg[w]] = u
            nbr_edge[offs[w] + deg[w]] = e
            deg[w] += 1
        seen[:] = False
        seen[0] = True
        pot[0] = 0.0
        parent[0] = -1
        parent_edge[0] = -1
        depth[0] = 0
        head = 0
        tail = 1
        queue[0] = 0
        while head < tail:
            x = queue[head]
            head += 1
            for q in range(offs[x], offs[x + 1]):
                y = nbr[q]
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    parent_edge[y] = nbr_edge[q]
                    depth[y] = depth[x] + 1
                    if x < n:
                        pot[y] = C[x, y - n] - pot[x]
                    else:
                        pot[y] = C[y, x - n] - pot[x]
                    queue[tail] = y
                    tail += 1

        # pricing
        bland = degenerate_run > 2 * nodes
        best = -tol
        enter = -1
        if bland:
            for cell in range(n * m):
                x = cell // m
                y = cell - x * m
                if C[x, y] - pot[x] - pot[n + y] < -tol:
                    enter = cell
                    break
        else:
            scanned = 0
            cell = start
            while scanned < n * m:
                x = cell // m
                y = cell - x * m
                r = C[x, y] - pot[x] - pot[n + y]
                if r < best:
                    best = r
                    enter = cell
                scanned += 1
                cell += 1
                if cell == n * m:
                    cell = 0
                if scanned % block == 0 and enter >= 0:
                    break
            start = cell
        if enter < 0:
            return ei_arr, ej_arr, flow, it
        si = enter // m
        sj = enter - si * m

        # cycle through the tree path sink sj -> lca <- source si
        x = n + sj
        y = si
        nl = 0
        nr = 0
        while depth[x] > depth[y]:
            path_l[nl] = parent_edge[x]
            nl += 1
            x = parent[x]
        while depth[y] > depth[x]:
            path_r[nr] = parent_edge[y]
            nr += 1
            y = parent[y]
        while x != y:
            path_l[nl] = parent_edge[x]
            nl += 1
            x = parent[x]
            path_r[nr] = parent_edge[y]
            nr += 1
            y = parent[y]
        nc = 0
        for q in range(nl):
            cyc[nc] = path_l[q]
            nc += 1
        for q in range(nr - 1, -1, -1):
            cyc[nc] = path_r[q]
            nc += 1
        # even positions lose mass, odd positions gain it
        theta = np.inf
        leave = -1
        for q in range(0, nc, 2):
            e = cyc[q]
            if flow[e] < theta:
                theta = flow[e]
                leave = e
            elif bland and flow[e] == theta:
                if ei_arr[e] * m + ej_arr[e] < ei_arr[leave] * m + ej_arr[leave]:
                    leave = e
        for q in range(nc):
            e = cyc[q]
            if q % 2 == 0:
                flow[e] -= theta
            else:
                flow[e] += theta
        if theta <= 0.0:
            degenerate_run += 1
        else:
            degenerate_run = 0
        ei_arr[leave] = si
        ej_arr[leave] = sj
        flow[leave] = theta
    return ei_arr, ej_arr, flow, -1


def transport_simplex(a, b, cost, max_iter: int | None = None):
    """Solve the balanced transportation problem exactly by the network simplex method.

    The bipartite graph sources -> sinks is complete and a basis is a spanning tree
    of ``n + m - 1`` cells, started from the northwest-corner rule. Entering cells
    come from block pricing; after a long run of degenerate pivots the method
    switches to Bland's rule so it cannot cycle.

    Returns ``(optimal cost, flow matrix)``.
    """
    a = np.ascontiguousarray(a, dtype=float)
    b = np.ascontiguousarray(b, dtype=float)
    C = np.ascontiguousarray(cost, dtype=float)
    n, m = C.shape
    b = b * (a.sum() / b.sum())  # absorb rounding so the problem is exactly balanced
    max_iter = max_iter or 50 * (n + m) * max(n, m) + 1000
    ei, ej, f, iters = _network_simplex(a, b, C, max_iter)
    if iters < 0:
        raise RuntimeError("network simplex did not converge")
    flow = np.zeros((n, m))
    np.add.at(flow, (ei, ej), np.maximum(f, 0.0))
    return float((flow * C).sum()), flow


def wasserstein(a: EmpiricalMeasure, b: EmpiricalMeasure,
                max_support_size: int | None = None, seed: int = 0):
    """Exact Wasserstein-1 distance with Euclidean ground cost.

    If ``max_support_size`` is given, a measure whose support is larger is first
    replaced by a weighted subsample of that size (see
    :meth:`EmpiricalMeasure.subsample`); the result is then only an estimate.

    Returns ``(distance, TransportPlan)``.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim}")
    if max_support_size is not None:
        a = a.subsample(max_support_size, seed)
        b = b.subsample(max_support_size, seed + 1)
    C = cdist(a.points, b.points)
    # zero-weight atoms never carry mass; drop them to keep the basis small
    ia = np.flatnonzero(a.weights > 0)
    ib = np.flatnonzero(b.weights > 0)
    _, flow = transport_simplex(a.weights[ia], b.weights[ib], C[np.ix_(ia, ib)])
    entries = {}
    for r, s in zip(*np.nonzero(flow)):
        entries[(int(ia[r]), int(ib[s]))] = float(flow[r, s])
    total = float(sum(mass * C[i, j] for (i, j), mass in entries.items()))
    return total, TransportPlan(entries, total)


def _as_points(x, dim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    elif arr.ndim == 1:
        arr = arr[:, None] if dim == 1 else arr[None, :]
    return arr


def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite point sets under the Euclidean norm."""
    A = _as_points(a, 1 if np.ndim(a) == 1 else None)
    B = _as_points(b, 1 if np.ndim(b) == 1 else None)
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"dims {A.shape[1]} and {B.shape[1]}")
    a_to_b = _min_dist(A, B)
    b_to_a = _min_dist(B, A)
    return float(max(a_to_b.max(), b_to_a.max()))


def _min_dist(queries: np.ndarray, cloud: np.ndarray) -> np.ndarray:
    out = np.empty(queries.shape[0])
    for s in range(0, queries.shape[0], _CHUNK):
        out[s:s + _CHUNK] = cdist(queries[s:s + _CHUNK], cloud).min(axis=1)
    return out


def distance_function(cloud, x) -> np.ndarray | float:
    """``min_p ||x - p||_2`` over the cloud; ``x`` may be one point or an array of points."""
    P = cloud.points if isinstance(cloud, EmpiricalMeasure) else np.asarray(cloud, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    X = np.asarray(x, dtype=float)
    single = X.ndim == 0 or (X.ndim == 1 and X.shape[0] == P.shape[1])
    if single:
        return float(_min_dist(X.reshape(1, -1), P)[0])
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[1] != P.shape[1]:
        raise DimensionMismatch(f"dims {X.shape[1]} and {P.shape[1]}")
    return _min_dist(X, P)


def transport_functional_gap(a: EmpiricalMeasure, b: EmpiricalMeasure,
                             c: Callable[[np.ndarray], np.ndarray], eta: float,
                             distance: float | None = None) -> bool:
    """Check ``|E_a[c] - E_b[c]| <= eta * W1(a, b)`` for an ``eta``-Lipschitz ``c``.

    ``c`` maps an (N, n) array to N values. A precomputed ``distance`` skips the LP.
    """
    if a.dim != b.dim:
        raise DimensionMismatch(f"dims {a.dim} and {b.dim}")
    if distance is None:
        distance, _ = wasserstein(a, b)
    gap = abs(float(np.dot(a.weights, c(a.points))) - float(np.dot(b.weights, c(b.points))))
    return gap <= eta * distance + 1e-9

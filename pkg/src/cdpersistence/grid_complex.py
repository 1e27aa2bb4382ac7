"""Freudenthal (Kuhn) triangulation of [-1, 1]^n and lower-star filtrations on it.

Every simplex of the triangulation is ``v, v + e_S1, ..., v + e_Sk`` for a
base lattice vertex ``v`` and a strictly increasing chain of coordinate sets
``S1 < S2 < ... < Sk`` (``e_S`` is the 0/1 indicator vector of ``S``). This
(base, chain) encoding is unique, which makes faces and facets closed-form:
dropping an inner vertex drops a set from the chain, dropping ``v`` rebases
at ``v + e_S1``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonFiniteValue, OutOfDomain, ResourceLimit

DEFAULT_SIMPLEX_CAP = 2 ** 27


def _chains(n: int, k: int) -> list[tuple[int, ...]]:
    """Strictly increasing chains of ``k`` nonempty coordinate bitmasks."""
    full = range(1, 1 << n)
    out = []
    for chain in itertools.product(full, repeat=k):
        if all((a & b) == a and a != b for a, b in zip(chain, chain[1:])):
            out.append(chain)
    return out


def simplex_counts(n: int, m: int) -> list[int]:
    """Number of k-simplices of the triangulation, k = 0..n, without building it."""
    counts = [(m + 1) ** n]
    for k in range(1, n + 1):
        total = 0
        for chain in _chains(n, k):
            top = bin(chain[-1]).count("1")
            total += m ** top * (m + 1) ** (n - top)
        counts.append(total)
    return counts


@dataclass(eq=False)
class FreudenthalComplex:
    """Triangulation ``K_m`` of the box with vertex grid ``(2/m) Z^n`` (as ``-1 + 2i/m``).

    ``simplices[k]`` is an int array of shape ``(count_k, k + 1)`` whose rows are
    ascending vertex indices; ``facets[k]`` (k >= 1) holds, per k-simplex, the
    indices of its ``k + 1`` facets into ``simplices[k - 1]``.
    Vertex ``i`` has coordinates given by the mixed-radix digits of ``i``,
    coordinate 0 fastest.
    """

    dim: int
    resolution: int
    simplices: list = field(repr=False)
    facets: list = field(repr=False)
    types: list = field(repr=False)

    @property
    def vertex_count(self) -> int:
        return (self.resolution + 1) ** self.dim

    @property
    def diameter(self) -> float:
        return 2.0 * math.sqrt(self.dim) / self.resolution

    def counts(self) -> list[int]:
        return [len(s) for s in self.simplices]

    def euler_characteristic(self) -> int:
        return sum((-1) ** k * c for k, c in enumerate(self.counts()))

    def vertex_grid_index(self, idx) -> np.ndarray:
        idx = np.asarray(idx)
        strides = (self.resolution + 1) ** np.arange(self.dim)
        return (idx[..., None] // strides) % (self.resolution + 1)

    def vertex_coords(self, idx=None) -> np.ndarray:
        if idx is None:
            idx = np.arange(self.vertex_count)
        return -1.0 + 2.0 * self.vertex_grid_index(idx) / self.resolution

    def vertex_index(self, grid_index) -> np.ndarray:
        g = np.asarray(grid_index)
        strides = (self.resolution + 1) ** np.arange(self.dim)
        return (g * strides).sum(axis=-1)

    def locate_simplex(self, x):
        """Minimal simplex containing ``x`` and the barycentric weights of its vertices.

        Returns ``(vertex tuple, weights)``; weights are strictly positive and sum to 1.
        """
        vertices, weights = self._kuhn_simplex(x)
        keep = weights > 0
        return tuple(int(v) for v in vertices[keep]), weights[keep]

    def _kuhn_simplex(self, x):
        """Top-dimensional Kuhn simplex containing ``x`` (vertices ascending) with
        barycentric weights, zeros included."""
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.dim:
            raise OutOfDomain(f"point of dim {x.shape[0]} in a {self.dim}-dimensional complex")
        if not np.all(np.isfinite(x)) or np.any(np.abs(x) > 1.0):
            raise OutOfDomain(f"{x} is outside [-1, 1]^n")
        m = self.resolution
        u = (x + 1.0) * m / 2.0
        cell = np.minimum(np.floor(u), m - 1).astype(np.int64)
        frac = u - cell
        order = np.argsort(-frac, kind="stable")
        sorted_frac = frac[order]
        weights = np.empty(self.dim + 1)
        weights[0] = 1.0 - sorted_frac[0]
        weights[1:-1] = sorted_frac[:-1] - sorted_frac[1:]
        weights[-1] = sorted_frac[-1]
        weights = np.clip(weights, 0.0, None)
        steps = np.zeros((self.dim + 1, self.dim), dtype=np.int64)
        for k, axis in enumerate(order):
            steps[k + 1:, axis] = 1
        vertices = self.vertex_index(cell + steps)
        return vertices, weights / weights.sum()


def build_freudenthal(n: int, m: int, max_simplices: int = DEFAULT_SIMPLEX_CAP) -> FreudenthalComplex:
    """Triangulate the ``m^n`` lattice cubes of [-1, 1]^n into ``n!`` simplices each, with all faces."""
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    total = sum(simplex_counts(n, m))
    if total > max_simplices:
        raise ResourceLimit(f"K_{m} in dimension {n} has {total} simplices (cap {max_simplices})")
    side = m + 1
    V = side ** n
    strides = side ** np.arange(n)
    grid = np.indices((side,) * n).reshape(n, -1)[::-1].T  # row i = digits of vertex i
    offset = [int(sum(strides[i] for i in range(n) if mask >> i & 1)) for mask in range(1 << n)]

    simplices = [np.arange(V, dtype=np.int64)[:, None]]
    facets = [None]
    types = [[()]]
    # lookup[k][t] : base vertex -> index of the k-simplex of chain type t (or -1)
    lookups = [[np.arange(V, dtype=np.int64)]]
    for k in range(1, n + 1):
        chains = _chains(n, k)
        blocks, lookup = [], []
        start = 0
        for chain in chains:
            top = chain[-1]
            ok = np.ones(V, dtype=bool)
            for i in range(n):
                if top >> i & 1:
                    ok &= grid[:, i] < m
            bases = np.flatnonzero(ok)
            table = np.full(V, -1, dtype=np.int64)
            table[bases] = start + np.arange(len(bases))
            lookup.append(table)
            verts = np.empty((len(bases), k + 1), dtype=np.int64)
            verts[:, 0] = bases
            for j, mask in enumerate(chain):
                verts[:, j + 1] = bases + offset[mask]
            blocks.append((chain, bases, verts))
            start += len(bases)
        lookups.append(lookup)
        types.append(chains)
        simplices.append(np.vstack([b[2] for b in blocks]) if blocks else np.empty((0, k + 1), np.int64))

        fac = np.empty((start, k + 1), dtype=np.int64)
        row = 0
        for chain, bases, _ in blocks:
            cnt = len(bases)
            prev = lookups[k - 1]
            # drop vertex 0: rebase at v + e_S1, chain S_j - S1
            first = chain[0]
            rest = tuple(c & ~first for c in chain[1:])
            fac[row:row + cnt, 0] = _lookup(prev, types[k - 1], rest, bases + offset[first])
            # drop vertex j (1 <= j <= k): remove S_j from the chain
            for j in range(1, k + 1):
                sub = chain[:j - 1] + chain[j:]
                fac[row:row + cnt, j] = _lookup(prev, types[k - 1], sub, bases)
            row += cnt
        facets.append(fac)
    return FreudenthalComplex(n, m, simplices, facets, types)


def _lookup(tables, chains, chain, bases):
    if not chain:
        return bases
    return tables[chains.index(chain)][bases]


def pl_error_bound(lipschitz: float, n: int, m: int) -> float:
    """Bottleneck error ``L_f * 2 sqrt(n) / m`` of the lower-star approximation."""
    if lipschitz <= 0:
        raise ValueError("Lipschitz constant must be positive")
    return lipschitz * 2.0 * math.sqrt(n) / m


@dataclass(eq=False)
class Filtration:
    """Lower-star filtration: each simplex enters at the max of its vertex values.

    ``order`` lists ``(dim, index)`` pairs sorted by (value, dim, vertex tuple);
    ``position[k][i]`` is the rank of simplex ``i`` of dimension ``k`` in it.
    """

    complex: FreudenthalComplex
    vertex_values: np.ndarray
    simplex_values: list = field(repr=False)
    order_dim: np.ndarray = field(repr=False)
    order_index: np.ndarray = field(repr=False)
    position: list = field(repr=False)

    def __len__(self) -> int:
        return len(self.order_dim)

    def value_at(self, pos) -> np.ndarray:
        pos = np.asarray(pos)
        out = np.empty(pos.shape)
        dims = self.order_dim[pos]
        idx = self.order_index[pos]
        for k, vals in enumerate(self.simplex_values):
            sel = dims == k
            out[sel] = vals[idx[sel]]
        return out

    def ordered_values(self) -> np.ndarray:
        return self.value_at(np.arange(len(self)))

    def boundary_rows(self, k: int) -> np.ndarray:
        """Filtration positions of the facets of every k-simplex, each row ascending."""
        rows = self.position[k - 1][self.complex.facets[k]]
        rows.sort(axis=1)
        return rows

    def pl_interpolate(self, x) -> float:
        vertices, weights = self.complex._kuhn_simplex(x)
        return float(np.dot(weights, self.vertex_values[vertices]))

    def export_text(self) -> str:
        """One line ``dim value v0 .. vk`` per simplex, in filtration order."""
        lines = []
        for k, i in zip(self.order_dim.tolist(), self.order_index.tolist()):
            verts = " ".join(map(str, self.complex.simplices[k][i]))
            lines.append(f"{k} {float(self.simplex_values[k][i])!r} {verts}")
        return "\n".join(lines) + "\n"

    def export_binary(self) -> bytes:
        """Little-endian records ``int32 dim, float64 value, int64 v0..v_dim``."""
        chunks = []
        for k, i in zip(self.order_dim.tolist(), self.order_index.tolist()):
            chunks.append(np.int32(k).tobytes())
            chunks.append(np.float64(self.simplex_values[k][i]).tobytes())
            chunks.append(self.complex.simplices[k][i].astype("<i8").tobytes())
        return b"".join(chunks)


def lower_star(cplx: FreudenthalComplex, vertex_values) -> Filtration:
    f = np.asarray(vertex_values, dtype=float).reshape(-1)
    if f.shape[0] != cplx.vertex_count:
        raise ValueError(f"{f.shape[0]} values for {cplx.vertex_count} vertices")
    if not np.all(np.isfinite(f)):
        raise NonFiniteValue("vertex values must be finite")
    values = [f[s].max(axis=1) for s in cplx.simplices]
    n = cplx.dim
    total = sum(len(v) for v in values)
    dims = np.concatenate([np.full(len(v), k, dtype=np.int64) for k, v in enumerate(values)])
    idx = np.concatenate([np.arange(len(v), dtype=np.int64) for v in values])
    allvals = np.concatenate(values)
    # vertex tuples, padded with -1; within one dim the padding is constant
    tup = np.full((total, n + 1), -1, dtype=np.int64)
    row = 0
    for k, s in enumerate(cplx.simplices):
        tup[row:row + len(s), :k + 1] = s
        row += len(s)
    keys = [tup[:, j] for j in range(n, -1, -1)] + [dims, allvals]
    perm = np.lexsort(keys)
    del tup, keys
    order_dim, order_index = dims[perm], idx[perm]
    position = []
    for k, v in enumerate(values):
        pos = np.empty(len(v), dtype=np.int64)
        sel = order_dim == k
        pos[order_index[sel]] = np.flatnonzero(sel)
        position.append(pos)
    return Filtration(cplx, f, values, order_dim, order_index, position)


def pl_interpolate(filtration: Filtration, x) -> float:
    """Piecewise-linear interpolant of the vertex values at ``x``."""
    return filtration.pl_interpolate(x)


def locate_simplex(cplx: FreudenthalComplex, x):
    return cplx.locate_simplex(x)

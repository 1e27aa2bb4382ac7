"""Persistent homology of lower-star filtrations over Z/2 by boundary-matrix reduction."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import InvalidFiltration, ParseError
from .grid_complex import Filtration


@dataclass(eq=False)
class PersistenceDiagram:
    """Intervals ``[birth, death)`` per homology degree; ``death`` may be ``inf``.

    ``intervals[p]`` is a float array of shape ``(k, 2)`` sorted by (birth, death).
    Multiplicities are repeated rows.
    """

    intervals: dict = field(default_factory=dict)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for p, arr in self.intervals.items():
            a = np.asarray(arr, dtype=float).reshape(-1, 2)
            if np.any(a[:, 0] > a[:, 1]):
                raise ValueError("birth must not exceed death")
            a = a[a[:, 0] < a[:, 1]]
            clean[int(p)] = a[np.lexsort((a[:, 1], a[:, 0]))]
        self.intervals = clean

    def __getitem__(self, p: int) -> np.ndarray:
        return self.intervals.get(p, np.empty((0, 2)))

    @property
    def degrees(self) -> list[int]:
        return sorted(self.intervals)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PersistenceDiagram):
            return NotImplemented
        degs = set(self.degrees) | set(other.degrees)
        return all(np.array_equal(self[p], other[p]) for p in degs)

    def betti_at(self, t: float) -> dict:
        return betti_at(self, t)

    def to_json(self) -> str:
        diagrams = {
            str(p): [[float(b), None if math.isinf(d) else float(d)] for b, d in self[p]]
            for p in self.degrees
        }
        return json.dumps({"meta": self.meta, "diagrams": diagrams}, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "PersistenceDiagram":
        try:
            obj = json.loads(text)
            ivs = {
                int(p): [[b, math.inf if d is None else d] for b, d in rows]
                for p, rows in obj["diagrams"].items()
            }
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise ParseError(f"bad diagram JSON: {exc}") from exc
        return cls(ivs, obj.get("meta", {}))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["degree", "birth", "death"])
        for p in self.degrees:
            for b, d in self[p]:
                w.writerow([p, repr(float(b)), "inf" if math.isinf(d) else repr(float(d))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PersistenceDiagram":
        ivs: dict = {}
        rows = csv.reader(io.StringIO(text))
        try:
            for row in rows:
                if not row or row[0] == "degree":
                    continue
                ivs.setdefault(int(row[0]), []).append([float(row[1]), float(row[2])])
        except (ValueError, IndexError) as exc:
            raise ParseError(f"bad diagram CSV: {exc}") from exc
        return cls(ivs)


@numba.njit(cache=True)
def _reduce_columns(rows, skip, low_owner):
    """Reduce the columns of one dimension, left to right.

    ``rows[c]`` are the ascending filtration positions of column ``c``'s facets;
    columns are given in filtration order. ``low_owner[r]`` maps a pivot row to
    the column owning it (updated in place). Returns the pivot of every column,
    ``-1`` for columns that reduce to zero or are skipped.
    """
    ncols, width = rows.shape
    lows = np.full(ncols, -1, dtype=np.int64)
    cap = max(16, 4 * ncols)
    store = np.empty(cap, dtype=np.int64)
    used = 0
    start = np.zeros(ncols, dtype=np.int64)
    length = np.zeros(ncols, dtype=np.int64)
    wcap = 64
    work = np.empty(wcap, dtype=np.int64)
    tmp = np.empty(wcap, dtype=np.int64)
    for c in range(ncols):
        if skip[c]:
            continue
        wl = width
        for q in range(width):
            work[q] = rows[c, q]
        while wl > 0:
            owner = low_owner[work[wl - 1]]
            if owner < 0:
                break
            s0 = start[owner]
            ol = length[owner]
            if wl + ol > wcap:
                while wl + ol > wcap:
                    wcap *= 2
                nw = np.empty(wcap, dtype=np.int64)
                nw[:wl] = work[:wl]
                work = nw
                tmp = np.empty(wcap, dtype=np.int64)
            # symmetric difference of two ascending lists
            i = 0
            j = 0
            t = 0
            while i < wl and j < ol:
                a = work[i]
                b = store[s0 + j]
                if a < b:
                    tmp[t] = a
                    i += 1
                    t += 1
                elif b < a:
                    tmp[t] = b
                    j += 1
                    t += 1
                else:
                    i += 1
                    j += 1
            while i < wl:
                tmp[t] = work[i]
                i += 1
                t += 1
            while j < ol:
                tmp[t] = store[s0 + j]
                j += 1
                t += 1
            work, tmp = tmp, work
            wl = t
        if wl > 0:
            low = work[wl - 1]
            low_owner[low] = c
            lows[c] = low
            if used + wl > cap:
                while used + wl > cap:
                    cap *= 2
                ns = np.empty(cap, dtype=np.int64)
                ns[:used] = store[:used]
                store = ns
            store[used:used + wl] = work[:wl]
            start[c] = used
            length[c] = wl
            used += wl
    return lows


def _check_order(filtration: Filtration, k: int, rows: np.ndarray, col_pos: np.ndarray) -> None:
    if rows.size and np.any(rows[:, -1] >= col_pos):
        raise InvalidFiltration(f"a face of some {k}-simplex comes after it in the filtration")


def compute_persistence(filtration: Filtration, max_degree: int | None = None) -> PersistenceDiagram:
    """Persistence diagram of a lower-star filtration, degrees ``0..max_degree``.

    Columns are reduced from the top dimension down; every pivot row found in
    dimension ``k + 1`` is a column of dimension ``k`` that is known to reduce to
    zero, so it is skipped (clearing). The reduction always starts at the top
    dimension, even when fewer degrees are requested: without the cleared
    columns the reduction of dimension ``max_degree + 1`` gets much slower.
    """
    cplx = filtration.complex
    n = cplx.dim
    max_degree = n if max_degree is None else int(max_degree)
    if max_degree < 0:
        raise ValueError("max_degree must be >= 0")
    top = n
    total = len(filtration)
    values = filtration.ordered_values()
    low_owner = np.full(total, -1, dtype=np.int64)
    cleared = np.zeros(total, dtype=bool)
    pairs: dict = {}
    positive: dict = {0: filtration.position[0]}
    for k in range(top, 0, -1):
        col_pos = np.sort(filtration.position[k])
        col_idx = filtration.order_index[col_pos]
        rows = filtration.boundary_rows(k)[col_idx]
        _check_order(filtration, k, rows, col_pos)
        lows = _reduce_columns(np.ascontiguousarray(rows), cleared[col_pos], low_owner)
        has = lows >= 0
        pairs[k - 1] = (lows[has], col_pos[has])
        cleared[lows[has]] = True
        positive[k] = col_pos[~has]
    intervals = {}
    for p in range(0, min(max_degree, n) + 1):
        births, deaths = pairs.get(p, (np.empty(0, np.int64), np.empty(0, np.int64)))
        finite = np.column_stack([values[births], values[deaths]])
        pos = positive.get(p)
        if pos is None:
            essential = np.empty((0, 2))
        else:
            unpaired = np.setdiff1d(pos, births, assume_unique=False)
            essential = np.column_stack([values[unpaired], np.full(len(unpaired), np.inf)])
        intervals[p] = np.vstack([finite, essential])
    meta = {"resolution": cplx.resolution, "dim": n, "field": 2,
            "min_value": float(filtration.vertex_values.min()),
            "max_value": float(filtration.vertex_values.max())}
    return PersistenceDiagram(intervals, meta)


def naive_persistence(filtration: Filtration, max_degree: int | None = None) -> PersistenceDiagram:
    """Textbook reduction of the full boundary matrix without clearing.

    Pure Python with integer bitsets; only meant for small complexes, as an
    independent check of :func:`compute_persistence`.
    """
    cplx = filtration.complex
    n = cplx.dim
    max_degree = n if max_degree is None else int(max_degree)
    total = len(filtration)
    values = filtration.ordered_values()
    dims = filtration.order_dim
    cols = [0] * total
    for k in range(1, n + 1):
        facet_pos = filtration.position[k - 1][cplx.facets[k]]
        for i, fp in enumerate(facet_pos.tolist()):
            j = int(filtration.position[k][i])
            bits = 0
            for r in fp:
                if r >= j:
                    raise InvalidFiltration("face after coface")
                bits |= 1 << r
            cols[j] = bits
    owner: dict = {}
    for j in range(total):
        col = cols[j]
        while col:
            low = col.bit_length() - 1
            if low not in owner:
                break
            col ^= cols[owner[low]]
        cols[j] = col
        if col:
            owner[col.bit_length() - 1] = j
    intervals: dict = {p: [] for p in range(min(max_degree, n) + 1)}
    paired = set(owner)
    for low, j in owner.items():
        p = int(dims[low])
        if p in intervals:
            intervals[p].append((values[low], values[j]))
    for j in range(total):
        p = int(dims[j])
        if p in intervals and cols[j] == 0 and j not in paired:
            intervals[p].append((values[j], math.inf))
    return PersistenceDiagram(
        {p: np.asarray(v, dtype=float).reshape(-1, 2) for p, v in intervals.items()},
        {"resolution": cplx.resolution, "dim": n, "field": 2,
         "min_value": float(filtration.vertex_values.min()),
         "max_value": float(filtration.vertex_values.max())},
    )


def betti_at(diagram: PersistenceDiagram, t: float) -> dict:
    """Number of intervals with ``birth <= t < death``, per degree."""
    return {p: int(np.count_nonzero((iv[:, 0] <= t) & (t < iv[:, 1]))) for p, iv in diagram.intervals.items()}


def interval_lengths(diagram: PersistenceDiagram, p: int) -> np.ndarray:
    iv = diagram[p]
    return iv[:, 1] - iv[:, 0]


def significant_intervals(diagram: PersistenceDiagram, p: int, k: int) -> np.ndarray:
    """The ``k`` longest intervals of degree ``p`` (infinite first, ties by earlier birth)."""
    iv = diagram[p]
    order = np.lexsort((iv[:, 0], -(iv[:, 1] - iv[:, 0])))
    return iv[order[:k]]


def significant_count(diagram: PersistenceDiagram, p: int, gap: float = 3.0) -> int:
    """Number of significant intervals in degree ``p``.

    Infinite intervals always count. Among the finite lengths, sorted
    descending, the leading cluster ``{L_i >= L_1 / gap}`` counts when the
    first length after it is at least ``gap`` times shorter than the shortest
    member (a missing next length is taken as 0); otherwise no finite interval
    counts.
    """
    if gap <= 1:
        raise ValueError("gap must be > 1")
    iv = diagram[p]
    lengths = iv[:, 1] - iv[:, 0]
    essential = int(np.count_nonzero(np.isinf(lengths)))
    finite = np.sort(lengths[np.isfinite(lengths)])[::-1]
    if finite.size == 0:
        return essential
    k = int(np.count_nonzero(finite >= finite[0] / gap))
    nxt = finite[k] if k < finite.size else 0.0
    return essential + (k if finite[k - 1] >= gap * nxt else 0)

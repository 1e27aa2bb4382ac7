"""Empirical measures on [-1, 1]^n, shape samplers and noise models.

Ground metrics between clouds (Wasserstein, Hausdorff, distance function)
live in :mod:`cdpersistence.transport`.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidShape, ParseError

WEIGHT_TOL = 1e-12

SHAPE_KINDS = (
    "intervals-1d",
    "circle",
    "two-circles",
    "disk",
    "triangle",
    "square",
    "cube-skeleton",
    "union",
)


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Finitely supported probability measure with support in the box [-1, 1]^n."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        w = np.array(self.weights, dtype=float).reshape(-1)
        if pts.ndim != 2 or pts.shape[0] == 0 or pts.shape[1] == 0:
            raise InvalidShape("a measure needs at least one point of positive dimension")
        if w.shape[0] != pts.shape[0]:
            raise InvalidShape(f"{w.shape[0]} weights for {pts.shape[0]} points")
        if not np.all(np.isfinite(pts)) or np.any(np.abs(pts) > 1.0):
            raise InvalidShape("all coordinates must lie in [-1, 1]")
        if np.any(w < 0) or abs(w.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidShape(f"weights must be nonnegative and sum to 1 (sum={w.sum()!r})")
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, points) -> "EmpiricalMeasure":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.shape[0] == 0:
            raise InvalidShape("empty point set cannot be normalized")
        return cls(pts, np.full(pts.shape[0], 1.0 / pts.shape[0]))

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]

    def mixture(self, other: "EmpiricalMeasure", t: float) -> "EmpiricalMeasure":
        """Return ``(1 - t) * self + t * other`` on the concatenated support."""
        if other.dim != self.dim:
            raise DimensionMismatch(f"dims {self.dim} and {other.dim}")
        w = np.concatenate([(1.0 - t) * self.weights, t * other.weights])
        return EmpiricalMeasure(np.vstack([self.points, other.points]), w / w.sum())

    def subsample(self, size: int, seed: int = 0) -> "EmpiricalMeasure":
        """Draw ``size`` support points without replacement, proportionally to weight,
        and renormalize their weights. Returns ``self`` if the support is small enough."""
        if len(self) <= size:
            return self
        rng = np.random.Generator(np.random.PCG64(seed))
        idx = np.sort(rng.choice(len(self), size=size, replace=False, p=self.weights))
        w = self.weights[idx]
        return EmpiricalMeasure(self.points[idx], w / w.sum())

    # serialization -----------------------------------------------------------------

    def to_json(self) -> str:
        return json.dumps(
            {"dim": self.dim, "points": self.points.tolist(), "weights": self.weights.tolist()}
        )

    @classmethod
    def from_json(cls, text: str) -> "EmpiricalMeasure":
        try:
            obj = json.loads(text)
            pts = np.asarray(obj["points"], dtype=float).reshape(-1, int(obj["dim"]))
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"bad point-cloud JSON: {exc}") from exc
        if "weights" in obj and obj["weights"] is not None:
            return cls(pts, obj["weights"])
        return cls.uniform(pts)

    def to_csv(self, with_weights: bool = True) -> str:
        buf = io.StringIO()
        buf.write(f"# dim={self.dim}\n")
        writer = csv.writer(buf, lineterminator="\n")
        for p, w in zip(self.points, self.weights):
            row = [repr(float(v)) for v in p]
            if with_weights:
                row.append(repr(float(w)))
            writer.writerow(row)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, dim: int | None = None) -> "EmpiricalMeasure":
        """Parse ``x1,...,xn[,weight]`` rows.

        Without ``dim`` (as argument or as a ``# dim=n`` header line) every
        column is a coordinate.
        """
        rows = []
        for line in csv.reader(io.StringIO(text)):
            if not line:
                continue
            head = line[0].strip()
            if head.startswith("#"):
                if dim is None and head.replace(" ", "").startswith("#dim="):
                    dim = int(head.replace(" ", "")[5:])
                continue
            try:
                rows.append([float(v) for v in line])
            except ValueError as exc:
                raise ParseError(f"bad CSV row {line!r}") from exc
        if not rows or len({len(r) for r in rows}) != 1:
            raise ParseError("CSV must contain rows of equal length")
        arr = np.asarray(rows)
        if dim is None or arr.shape[1] == dim:
            return cls.uniform(arr)
        if arr.shape[1] != dim + 1:
            raise ParseError(f"expected {dim} or {dim + 1} columns, got {arr.shape[1]}")
        w = arr[:, dim]
        return cls(arr[:, :dim], w / w.sum())


def load_measure(path: str | Path, dim: int | None = None) -> EmpiricalMeasure:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return EmpiricalMeasure.from_json(text)
    return EmpiricalMeasure.from_csv(text, dim=dim)


def save_measure(measure: EmpiricalMeasure, path: str | Path) -> None:
    path = Path(path)
    if path.suffix.lower() == ".json":
        path.write_text(measure.to_json())
    else:
        path.write_text(measure.to_csv())


# shapes ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseSpec:
    uniform_count: int = 0
    gaussian_sigma: float = 0.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.uniform_count < 0:
            raise InvalidShape("uniform_count must be >= 0")
        if not self.gaussian_sigma >= 0:
            raise InvalidShape("gaussian_sigma must be >= 0")
        if not 0 <= self.rng_seed < 2**64:
            raise InvalidShape("rng_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class ShapeSpec:
    """A shape to sample from.

    ``parameters`` is kind-specific:

    * ``intervals-1d``: ``intervals`` list of ``[a, b]``
    * ``circle`` / ``disk``: ``center``, ``radius``
    * ``two-circles``: ``centers``, ``radii``, optional ``fractions``
    * ``triangle``: ``vertices`` (3x2), optional ``hollow``
    * ``square``: ``center``, ``side``, optional ``hollow``
    * ``cube-skeleton``: ``edge`` (default 1.5), ``samples_per_edge``
    * ``union``: ``parts`` list of ``{"kind", "parameters", "weight"}``
    """

    kind: str
    parameters: dict = field(default_factory=dict)
    sample_count: int = 0
    noise: NoiseSpec = field(default_factory=NoiseSpec)

    @property
    def dim(self) -> int:
        return _shape_dim(self.kind, self.parameters)

    def with_noise(self, **changes) -> "ShapeSpec":
        noise = NoiseSpec(**{**self.noise.__dict__, **changes})
        return ShapeSpec(self.kind, self.parameters, self.sample_count, noise)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "parameters": self.parameters,
            "sample_count": self.sample_count,
            "noise": dict(self.noise.__dict__),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ShapeSpec":
        noise = NoiseSpec(**obj.get("noise", {}))
        return cls(obj["kind"], dict(obj.get("parameters", {})), int(obj.get("sample_count", 0)), noise)

    @classmethod
    def cube_skeleton(cls, edge: float = 1.5, per_edge: int = 50, sigma: float = 0.025,
                      uniform_count: int = 0, seed: int = 0) -> "ShapeSpec":
        return cls("cube-skeleton", {"edge": edge, "samples_per_edge": per_edge},
                   12 * per_edge, NoiseSpec(uniform_count, sigma, seed))


def _shape_dim(kind: str, params: dict) -> int:
    if kind == "intervals-1d":
        return 1
    if kind == "cube-skeleton":
        return 3
    if kind == "union":
        dims = {_shape_dim(p["kind"], p.get("parameters", {})) for p in params["parts"]}
        if len(dims) != 1:
            raise InvalidShape("union parts must share a dimension")
        return dims.pop()
    if kind in SHAPE_KINDS:
        return 2
    raise InvalidShape(f"unknown shape kind {kind!r}")


def _inside(lo, hi, what: str) -> None:
    if not (np.all(np.asarray(lo) > -1.0) and np.all(np.asarray(hi) < 1.0)):
        raise InvalidShape(f"{what} is not strictly inside the open box (-1, 1)^n")


def _validate(kind: str, p: dict) -> None:
    if kind == "intervals-1d":
        iv = np.asarray(p["intervals"], dtype=float).reshape(-1, 2)
        if np.any(iv[:, 1] <= iv[:, 0]):
            raise InvalidShape("intervals must have a < b")
        _inside(iv.min(), iv.max(), "interval union")
    elif kind in ("circle", "disk"):
        c, r = np.asarray(p["center"], float), float(p["radius"])
        if r <= 0:
            raise InvalidShape("radius must be positive")
        _inside(c - r, c + r, kind)
    elif kind == "two-circles":
        for c, r in zip(p["centers"], p["radii"]):
            _validate("circle", {"center": c, "radius": r})
    elif kind == "triangle":
        v = np.asarray(p["vertices"], float).reshape(3, 2)
        e1, e2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
        if area <= 0:
            raise InvalidShape("degenerate triangle")
        _inside(v.min(axis=0), v.max(axis=0), "triangle")
    elif kind == "square":
        c, h = np.asarray(p["center"], float), 0.5 * float(p["side"])
        if h <= 0:
            raise InvalidShape("side must be positive")
        _inside(c - h, c + h, "square")
    elif kind == "cube-skeleton":
        h = 0.5 * float(p.get("edge", 1.5))
        if h <= 0:
            raise InvalidShape("edge must be positive")
        _inside(-h, h, "cube skeleton")
    elif kind == "union":
        for part in p["parts"]:
            _validate(part["kind"], part.get("parameters", {}))
    else:
        raise InvalidShape(f"unknown shape kind {kind!r}")


def _split(count: int, fractions: Sequence[float]) -> list[int]:
    f = np.asarray(fractions, dtype=float)
    f = f / f.sum()
    sizes = np.floor(f * count).astype(int)
    sizes[: count - sizes.sum()] += 1
    return sizes.tolist()


def _base_points(kind: str, p: dict, count: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "intervals-1d":
        iv = np.asarray(p["intervals"], dtype=float).reshape(-1, 2)
        lengths = iv[:, 1] - iv[:, 0]
        which = rng.choice(len(iv), size=count, p=lengths / lengths.sum())
        u = rng.random(count)
        return (iv[which, 0] + u * lengths[which])[:, None]
    if kind == "circle":
        theta = rng.uniform(0.0, 2 * np.pi, count)
        c, r = np.asarray(p["center"], float), float(p["radius"])
        return c + r * np.column_stack([np.cos(theta), np.sin(theta)])
    if kind == "disk":
        c, r = np.asarray(p["center"], float), float(p["radius"])
        rad = r * np.sqrt(rng.random(count))
        theta = rng.uniform(0.0, 2 * np.pi, count)
        return c + rad[:, None] * np.column_stack([np.cos(theta), np.sin(theta)])
    if kind == "two-circles":
        sizes = _split(count, p.get("fractions", [1.0] * len(p["radii"])))
        parts = [
            _base_points("circle", {"center": c, "radius": r}, k, rng)
            for c, r, k in zip(p["centers"], p["radii"], sizes)
        ]
        return np.vstack(parts)
    if kind == "triangle":
        v = np.asarray(p["vertices"], float).reshape(3, 2)
        if p.get("hollow", False):
            edges = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
            return _polyline(edges, count, rng)
        a, b = rng.random(count), rng.random(count)
        flip = a + b > 1.0
        a[flip], b[flip] = 1.0 - a[flip], 1.0 - b[flip]
        return v[0] + a[:, None] * (v[1] - v[0]) + b[:, None] * (v[2] - v[0])
    if kind == "square":
        c, h = np.asarray(p["center"], float), 0.5 * float(p["side"])
        if p.get("hollow", False):
            corners = c + h * np.array([[-1, -1], [1, -1], [1, 1], [-1, 1]], dtype=float)
            edges = [(corners[i], corners[(i + 1) % 4]) for i in range(4)]
            return _polyline(edges, count, rng)
        return c + rng.uniform(-h, h, size=(count, 2))
    if kind == "cube-skeleton":
        return _cube_skeleton(float(p.get("edge", 1.5)), count // 12)
    if kind == "union":
        parts = p["parts"]
        sizes = _split(count, [part.get("weight", 1.0) for part in parts])
        return np.vstack([
            _base_points(part["kind"], part.get("parameters", {}), k, rng)
            for part, k in zip(parts, sizes)
        ])
    raise InvalidShape(f"unknown shape kind {kind!r}")


def _polyline(edges, count: int, rng: np.random.Generator) -> np.ndarray:
    lengths = np.array([np.linalg.norm(b - a) for a, b in edges])
    which = rng.choice(len(edges), size=count, p=lengths / lengths.sum())
    t = rng.random(count)[:, None]
    starts = np.array([a for a, _ in edges])[which]
    ends = np.array([b for _, b in edges])[which]
    return starts + t * (ends - starts)


def _cube_skeleton(edge: float, per_edge: int) -> np.ndarray:
    """Evenly spaced points on the 12 edges; cell midpoints so corners are not repeated."""
    h = 0.5 * edge
    t = -h + edge * (np.arange(per_edge) + 0.5) / per_edge
    out = []
    for axis in range(3):
        others = [a for a in range(3) if a != axis]
        for s0 in (-h, h):
            for s1 in (-h, h):
                pts = np.empty((per_edge, 3))
                pts[:, axis] = t
                pts[:, others[0]] = s0
                pts[:, others[1]] = s1
                out.append(pts)
    return np.vstack(out)


def sample_shape(spec: ShapeSpec) -> EmpiricalMeasure:
    """Sample a uniformly weighted cloud from ``spec``.

    Base points come first, then every coordinate gets an independent
    N(0, sigma) perturbation (clamped back into the box), then
    ``uniform_count`` uniform points of [-1, 1]^n are appended.
    """
    kind, p = spec.kind, spec.parameters
    _validate(kind, p)
    n = _shape_dim(kind, p)
    count = spec.sample_count
    if kind == "cube-skeleton":
        per_edge = int(p.get("samples_per_edge", max(count // 12, 0)))
        if count != 12 * per_edge:
            raise InvalidShape(f"cube-skeleton needs sample_count == 12 * samples_per_edge ({12 * per_edge})")
    if count < 0:
        raise InvalidShape("sample_count must be >= 0")
    noise = spec.noise
    if count + noise.uniform_count == 0:
        raise InvalidShape("empty measure: sample_count and uniform_count are both 0")
    rng = np.random.Generator(np.random.PCG64(noise.rng_seed))
    base = _base_points(kind, p, count, rng) if count else np.empty((0, n))
    if noise.gaussian_sigma > 0 and count:
        base = base + rng.normal(0.0, noise.gaussian_sigma, size=base.shape)
    base = np.clip(base, -1.0, 1.0)
    extra = rng.uniform(-1.0, 1.0, size=(noise.uniform_count, n))
    return EmpiricalMeasure.uniform(np.vstack([base, extra]))


def circle_points(k: int, radius: float, center=(0.0, 0.0), phase: float = 0.0) -> np.ndarray:
    """``k`` equidistant points on a circle."""
    theta = phase + 2 * math.pi * np.arange(k) / k
    return np.asarray(center, float) + radius * np.column_stack([np.cos(theta), np.sin(theta)])

"""Named sample clouds used by the experiment scripts and the acceptance suite."""
from __future__ import annotations

from .pointcloud import NoiseSpec, ShapeSpec

FIVE_INTERVALS = [[-0.9, -0.7], [-0.5, -0.3], [-0.1, 0.1], [0.3, 0.5], [0.7, 0.9]]

# two circles: (centers, radii). Circles lie on a quartic curve, so a little
# Gaussian jitter keeps the moment matrix of degree 12 invertible.
TWO_CIRCLES = {
    "disjoint": ([[-0.5, 0.0], [0.5, 0.0]], [0.4, 0.4]),
    "touching": ([[-0.45, 0.0], [0.45, 0.0]], [0.45, 0.45]),
    "overlapping": ([[-0.4, 0.0], [0.4, 0.0]], [0.45, 0.45]),
}
CIRCLE_SIGMA = 0.01

THREE_SHAPES = [
    {"kind": "disk", "parameters": {"center": [-0.5, -0.5], "radius": 0.4}},
    {"kind": "triangle", "parameters": {"vertices": [[-0.9, 0.1], [-0.1, 0.1], [-0.5, 0.9]]}},
    {"kind": "square", "parameters": {"center": [0.5, 0.0], "side": 0.9}},
]


def five_intervals(count: int = 500, seed: int = 0) -> ShapeSpec:
    return ShapeSpec("intervals-1d", {"intervals": FIVE_INTERVALS}, count, NoiseSpec(rng_seed=seed))


def two_circles(config: str = "disjoint", count: int = 3000, seed: int = 0,
                sigma: float = CIRCLE_SIGMA) -> ShapeSpec:
    centers, radii = TWO_CIRCLES[config]
    return ShapeSpec("two-circles", {"centers": centers, "radii": radii}, count,
                     NoiseSpec(gaussian_sigma=sigma, rng_seed=seed))


def three_shapes(count: int = 10000, uniform_count: int = 0, sigma: float = 0.0, seed: int = 0) -> ShapeSpec:
    """A disk, a triangle and a square, arranged around an empty center."""
    return ShapeSpec("union", {"parts": THREE_SHAPES}, count, NoiseSpec(uniform_count, sigma, seed))


def cube_skeleton(uniform_count: int = 0, seed: int = 0) -> ShapeSpec:
    return ShapeSpec.cube_skeleton(edge=1.5, per_edge=50, sigma=0.025, uniform_count=uniform_count, seed=seed)


PRESETS = {
    "five-intervals": five_intervals,
    "figure-eight-disjoint": lambda **kw: two_circles("disjoint", **kw),
    "figure-eight-touching": lambda **kw: two_circles("touching", **kw),
    "figure-eight-overlapping": lambda **kw: two_circles("overlapping", **kw),
    "three-shapes": three_shapes,
    "cube-skeleton": cube_skeleton,
}


def preset(name: str, **kwargs) -> ShapeSpec:
    try:
        return PRESETS[name](**kwargs)
    except KeyError:
        from .errors import InvalidShape

        raise InvalidShape(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None

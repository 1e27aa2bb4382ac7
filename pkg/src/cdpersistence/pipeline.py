"""End-to-end runs: cloud -> vertex function -> lower-star persistence, with stage timings.

Also houses the experiment drivers behind the CLI subcommands (comparison of
filtrations, signal-to-noise tables, resolution sweeps).
"""
from __future__ import annotations

import functools
import json
import math
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .christoffel import BasisSpec, fit, log_christoffel_eval
from .diagram_metrics import bottleneck, format_ratio, signal_to_noise
from .errors import ConfigError, ParseError
from .grid_complex import build_freudenthal, lower_star, pl_error_bound
from .persistence import PersistenceDiagram, compute_persistence
from .pointcloud import EmpiricalMeasure, ShapeSpec, load_measure, sample_shape
from .transport import distance_function

KINDS = ("christoffel", "distance-function")
STAGES = ("sample", "fit", "sweep", "reduce", "metrics")


@dataclass
class RunConfig:
    """Parameters of one pipeline run.

    ``input`` is either a path to a cloud file (CSV/JSON) or a shape
    description as accepted by :meth:`ShapeSpec.from_dict`. A ``resolution``
    of ``None`` picks 250 for clouds in one or two dimensions and 50 in three.
    """

    input: str | dict = ""
    degree: int = 8
    resolution: int | None = None
    eps: float = 0.0
    kind: str = "christoffel"
    max_degree: int | None = None
    basis: str = "chebyshev-tensor"
    out: str | None = None
    rng_seed: int | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.degree < 0:
            raise ConfigError("degree must be >= 0")
        if self.resolution is not None and self.resolution < 1:
            raise ConfigError("resolution must be >= 1")
        if not self.eps >= 0:
            raise ConfigError("eps must be >= 0")
        if self.max_degree is not None and self.max_degree < 0:
            raise ConfigError("max_degree must be >= 0")

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        try:
            obj = json.loads(text)
        except ValueError as exc:
            raise ParseError(f"bad config JSON: {exc}") from exc
        known = {f.name for f in fields(cls)}
        extra = set(obj) - known
        if extra:
            raise ConfigError(f"unknown config fields: {sorted(extra)}")
        return cls(**obj)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def shape(self) -> ShapeSpec | None:
        if isinstance(self.input, dict):
            spec = ShapeSpec.from_dict(self.input)
            if self.rng_seed is not None:
                spec = spec.with_noise(rng_seed=int(self.rng_seed))
            return spec
        return None


@dataclass
class ExperimentReport:
    config: dict
    diagrams: dict = field(default_factory=dict)       # label -> PersistenceDiagram
    statistics: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps({
            "config": self.config,
            "diagrams": {k: json.loads(d.to_json()) for k, d in self.diagrams.items()},
            "statistics": _jsonable(self.statistics),
            "timings": self.timings,
        }, sort_keys=True, indent=1)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return None
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


class _Timer:
    """Contiguous stage accounting: each ``add`` charges the time since the previous one."""

    def __init__(self):
        self.t = dict.fromkeys(STAGES, 0.0)
        self.start = self.last = time.perf_counter()

    def add(self, stage: str) -> None:
        now = time.perf_counter()
        self.t[stage] += now - self.last
        self.last = now

    def report(self) -> dict:
        out = dict(self.t)
        out["total"] = time.perf_counter() - self.start
        return out


def default_resolution(n: int) -> int:
    return 250 if n <= 2 else 50


@functools.lru_cache(maxsize=4)
def _complex(n: int, m: int):
    return build_freudenthal(n, m)


def load_input(config: RunConfig) -> EmpiricalMeasure:
    spec = config.shape()
    if spec is not None:
        return sample_shape(spec)
    if not config.input:
        raise ConfigError("config has no input")
    try:
        return load_measure(config.input)
    except OSError as exc:
        raise ParseError(f"cannot read {config.input}: {exc}") from exc


def vertex_function(measure: EmpiricalMeasure, config: RunConfig, coords: np.ndarray):
    """Values of the filtration function at ``coords``; returns ``(values, model)``."""
    if config.kind == "distance-function":
        return distance_function(measure, coords), None
    model = fit(measure, BasisSpec(measure.dim, config.degree, config.basis), config.eps)
    return log_christoffel_eval(model, coords), model


def diagram_for(measure: EmpiricalMeasure, config: RunConfig, timer: _Timer | None = None):
    """Persistence diagram of ``measure`` under ``config``; ``(diagram, model)``."""
    timer = timer or _Timer()
    n = measure.dim
    model = None
    if config.kind == "christoffel":
        model = fit(measure, BasisSpec(n, config.degree, config.basis), config.eps)
        timer.add("fit")
    cplx = _complex(n, config.resolution or default_resolution(n))
    coords = cplx.vertex_coords()
    if model is not None:
        values = log_christoffel_eval(model, coords)
    else:
        values = distance_function(measure, coords)
    timer.add("sweep")
    filt = lower_star(cplx, values)
    max_degree = n - 1 if config.max_degree is None else min(config.max_degree, n)
    dgm = compute_persistence(filt, max_degree)
    dgm.meta.update({"kind": config.kind, "degree": config.degree if model is not None else None})
    timer.add("reduce")
    return dgm, model


def cmd_compute(config: RunConfig) -> ExperimentReport:
    timer = _Timer()
    measure = load_input(config)
    timer.add("sample")
    dgm, _ = diagram_for(measure, config, timer)
    stats = {"betti_infinite": {p: int(np.isinf(dgm[p][:, 1]).sum()) for p in dgm.degrees},
             "interval_counts": {p: len(dgm[p]) for p in dgm.degrees}}
    timer.add("metrics")
    timings = timer.report()
    report = ExperimentReport(asdict(config), {"diagram": dgm}, stats, timings)
    if config.out:
        write_diagram(dgm, config.out)
    return report


def write_diagram(dgm: PersistenceDiagram, path: str) -> None:
    p = Path(path)
    text = dgm.to_csv() if p.suffix.lower() == ".csv" else dgm.to_json()
    try:
        p.write_text(text)
    except OSError as exc:
        raise ParseError(f"cannot write {p}: {exc}") from exc


def cmd_compare(config_a: RunConfig, config_b: RunConfig) -> ExperimentReport:
    """Both filtrations on the same cloud and grid, with per-degree bottleneck distances."""
    if config_a.input != config_b.input or config_a.resolution != config_b.resolution:
        raise ConfigError("compare needs the same input and resolution")
    timer = _Timer()
    measure = load_input(config_a)
    timer.add("sample")
    da, _ = diagram_for(measure, config_a, timer)
    db, _ = diagram_for(measure, config_b, timer)
    dists = {p: bottleneck(da, db, p)[0] for p in sorted(set(da.degrees) | set(db.degrees))}
    timer.add("metrics")
    timings = timer.report()
    return ExperimentReport(
        {"a": asdict(config_a), "b": asdict(config_b)},
        {"a": da, "b": db},
        {"bottleneck(a,b)": dists},
        timings,
    )


@dataclass
class SNRTable:
    methods: list            # row labels
    noise_levels: list       # M values
    medians: dict            # (method, M) -> median ratio
    runs: dict               # (method, M) -> list of ratios
    trials: int

    def to_csv(self) -> str:
        head = "method," + ",".join("baseline" if M == 0 else str(M) for M in self.noise_levels)
        lines = [head if self.trials > 1 else head + ",note"]
        for meth in self.methods:
            row = [meth] + [format_ratio(self.medians[(meth, M)]) for M in self.noise_levels]
            if self.trials == 1:
                row.append("single run (not a median)")
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def cmd_snr_table(base: ShapeSpec, degrees=(6,), noise_levels=(25, 250), trials: int = 10,
                  resolution: int = 50, true_count: int = 5, include_distance: bool = True,
                  seed: int = 0, progress=None) -> SNRTable:
    """Median H1 signal-to-noise ratios per filtration and uniform-noise level.

    Trial ``t`` at noise level ``M`` uses seed ``seed + t`` for the Gaussian jitter
    and the uniform points, so every method sees the same clouds.
    """
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    methods = (["distance"] if include_distance else []) + [f"d={d}" for d in degrees]
    runs = {(meth, M): [] for meth in methods for M in noise_levels}
    for M in noise_levels:
        for t in range(trials):
            cloud = sample_shape(base.with_noise(uniform_count=int(M), rng_seed=seed + t))
            for meth in methods:
                if meth == "distance":
                    cfg = RunConfig(kind="distance-function", resolution=resolution, max_degree=1)
                else:
                    cfg = RunConfig(degree=int(meth[2:]), resolution=resolution, max_degree=1)
                dgm, _ = diagram_for(cloud, cfg)
                runs[(meth, M)].append(signal_to_noise(dgm, 1, true_count))
                if progress:
                    progress(meth, M, t, runs[(meth, M)][-1])
    medians = {key: float(np.median(v)) for key, v in runs.items()}
    return SNRTable(methods, list(noise_levels), medians, runs, trials)


def cmd_resolution_sweep(config: RunConfig, resolutions, lipschitz: float | None = None) -> ExperimentReport:
    """Bottleneck distances between diagrams at consecutive resolutions, per degree."""
    ms = [int(m) for m in resolutions]
    if len(ms) < 2 or any(b < a for a, b in zip(ms, ms[1:])):
        raise ConfigError("resolutions must be nondecreasing with at least two entries")
    timer = _Timer()
    measure = load_input(config)
    timer.add("sample")
    dgms = {}
    for m in ms:
        if m not in dgms:
            dgms[m], _ = diagram_for(measure, replace(config, resolution=m), timer)
        _complex.cache_clear()
    deltas = []
    for a, b in zip(ms, ms[1:]):
        da, db = dgms[a], dgms[b]
        entry = {"from": a, "to": b,
                 "bottleneck": {p: bottleneck(da, db, p)[0] for p in sorted(set(da.degrees) | set(db.degrees))}}
        if lipschitz is not None:
            entry["bound"] = pl_error_bound(lipschitz, measure.dim, a) + pl_error_bound(lipschitz, measure.dim, b)
        deltas.append(entry)
    timer.add("metrics")
    timings = timer.report()
    return ExperimentReport(
        {**asdict(config), "resolutions": ms},
        {f"m={m}": d for m, d in dgms.items()},
        {"deltas": deltas},
        timings,
    )


def significant_betti(dgm: PersistenceDiagram, gap: float = 3.0) -> tuple:
    from .persistence import significant_count

    return tuple(significant_count(dgm, p, gap) for p in dgm.degrees)

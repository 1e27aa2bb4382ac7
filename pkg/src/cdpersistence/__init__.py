"""Christoffel-Darboux persistence of point clouds in [-1, 1]^n."""
from .christoffel import BasisSpec, ChristoffelModel, fit, christoffel_eval, log_christoffel_eval
from .diagram_metrics import bottleneck, signal_to_noise
from .grid_complex import build_freudenthal, lower_star
from .persistence import PersistenceDiagram, compute_persistence
from .pointcloud import EmpiricalMeasure, NoiseSpec, ShapeSpec, sample_shape
from .transport import hausdorff, wasserstein

__version__ = "0.1.0"

__all__ = [
    "BasisSpec", "ChristoffelModel", "EmpiricalMeasure", "NoiseSpec", "PersistenceDiagram", "ShapeSpec",
    "bottleneck", "build_freudenthal", "christoffel_eval", "compute_persistence", "fit", "hausdorff",
    "log_christoffel_eval", "lower_star", "sample_shape", "signal_to_noise", "wasserstein",
]

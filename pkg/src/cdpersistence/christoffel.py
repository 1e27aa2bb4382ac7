"""Empirical moment matrices and the Christoffel polynomial.

For a basis ``b`` of polynomials of degree <= d and a measure ``mu`` the
moment matrix is ``M = E_mu[b b^T]`` and the Christoffel polynomial is
``Lambda(x) = b(x)^T M^{-1} b(x)``.  ``Lambda`` does not depend on the basis;
the Chebyshev tensor basis is the default because it keeps ``M`` well
conditioned on [-1, 1]^n.
"""
from __future__ import annotations

import itertools
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_triangular

from .errors import BasisMismatch, DegenerateSampleSet, DimensionMismatch
from .pointcloud import EmpiricalMeasure

FAMILIES = ("chebyshev-tensor", "monomial")
PIVOT_RTOL = 1e-12
_EVAL_CHUNK = 1 << 15


def basis_size(n: int, d: int) -> int:
    """Dimension ``C(n + d, d)`` of the n-variate polynomials of degree <= d."""
    if n < 1 or d < 0:
        raise ValueError(f"need n >= 1 and d >= 0, got n={n}, d={d}")
    s = math.comb(n + d, d)
    if s > sys.maxsize:
        raise OverflowError(f"s({n}, {d}) = {s} exceeds the platform integer")
    return s


def graded_multi_indices(n: int, d: int) -> list[tuple[int, ...]]:
    """Exponent vectors with total degree <= d, graded then lexicographic."""
    out = []
    for total in range(d + 1):
        out.extend(a for a in itertools.product(range(total + 1), repeat=n) if sum(a) == total)
    return out


@dataclass(frozen=True)
class BasisSpec:
    dim: int
    degree: int
    family: str = "chebyshev-tensor"
    multi_indices: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown basis family {self.family!r}")
        basis_size(self.dim, self.degree)
        object.__setattr__(self, "multi_indices", tuple(graded_multi_indices(self.dim, self.degree)))

    @property
    def size(self) -> int:
        return len(self.multi_indices)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "degree": self.degree, "family": self.family}


def _univariate_table(x: np.ndarray, d: int, family: str) -> np.ndarray:
    """``P[..., k]`` = k-th univariate basis polynomial at ``x``, k = 0..d."""
    P = np.empty(x.shape + (d + 1,))
    P[..., 0] = 1.0
    if d >= 1:
        P[..., 1] = x
    for k in range(2, d + 1):
        if family == "monomial":
            P[..., k] = P[..., k - 1] * x
        else:
            P[..., k] = 2.0 * x * P[..., k - 1] - P[..., k - 2]
    return P


def eval_basis(basis: BasisSpec, x) -> np.ndarray:
    """Basis values at one point (returns shape ``(s,)``) or at many points ``(N, n)`` -> ``(N, s)``."""
    X = np.asarray(x, dtype=float)
    single = X.ndim <= 1
    X = X.reshape(1, -1) if single else X
    if X.shape[1] != basis.dim:
        raise DimensionMismatch(f"points have dim {X.shape[1]}, basis has dim {basis.dim}")
    P = _univariate_table(X, basis.degree, basis.family)  # (N, n, d+1)
    alpha = np.asarray(basis.multi_indices, dtype=np.intp)  # (s, n)
    out = np.ones((X.shape[0], basis.size))
    for i in range(basis.dim):
        out *= P[:, i, alpha[:, i]]
    return out[0] if single else out


@dataclass(frozen=True, eq=False)
class MomentMatrix:
    basis: BasisSpec
    entries: np.ndarray
    regularization_eps: float = 0.0


def moment_matrix(measure: EmpiricalMeasure, basis: BasisSpec, eps: float = 0.0) -> MomentMatrix:
    """``sum_i w_i b(X_i) b(X_i)^T + eps * I``, accumulated in chunks of samples."""
    if measure.dim != basis.dim:
        raise DimensionMismatch(f"measure dim {measure.dim} != basis dim {basis.dim}")
    if eps < 0:
        raise ValueError("eps must be >= 0")
    s = basis.size
    M = np.zeros((s, s))
    for start in range(0, len(measure), _EVAL_CHUNK):
        B = eval_basis(basis, measure.points[start:start + _EVAL_CHUNK])
        w = measure.weights[start:start + _EVAL_CHUNK]
        M += (B * w[:, None]).T @ B
    M = 0.5 * (M + M.T)
    M[np.diag_indices(s)] += eps
    return MomentMatrix(basis, M, float(eps))


@dataclass(eq=False)
class ChristoffelModel:
    """A fitted Christoffel polynomial, stored as the Cholesky factor of its moment matrix."""

    basis: BasisSpec
    moment: np.ndarray
    factor: np.ndarray
    eps: float = 0.0
    log_sup_norm: float | None = None

    def __call__(self, x) -> np.ndarray | float:
        return christoffel_eval(self, x)

    def estimate_sup_norm(self, grid) -> float:
        """Max of Lambda over ``grid``; a lower bound for the true sup over the box.

        Also caches ``log10`` of it in :attr:`log_sup_norm`.
        """
        sup = float(np.max(christoffel_eval(self, np.asarray(grid, dtype=float).reshape(-1, self.basis.dim))))
        self.log_sup_norm = math.log10(sup)
        return sup

    def to_json(self) -> str:
        return json.dumps({
            "basis": self.basis.to_dict(),
            "eps": self.eps,
            "moment_matrix": self.moment.ravel().tolist(),
            "factor": self.factor.ravel().tolist(),
        })

    @classmethod
    def from_json(cls, text: str) -> "ChristoffelModel":
        obj = json.loads(text)
        basis = BasisSpec(**obj["basis"])
        s = basis.size
        return cls(
            basis,
            np.asarray(obj["moment_matrix"], dtype=float).reshape(s, s),
            np.asarray(obj["factor"], dtype=float).reshape(s, s),
            float(obj["eps"]),
        )


def recommended_eps(M: np.ndarray) -> float:
    return 1e-10 * float(np.trace(M)) / M.shape[0]


def fit(measure: EmpiricalMeasure, basis: BasisSpec, eps: float = 0.0) -> ChristoffelModel:
    """Build and factor the moment matrix.

    Raises
    ------
    DegenerateSampleSet
        If ``M + eps I`` is not numerically positive definite, i.e. some Cholesky
        pivot falls below ``1e-12 * trace / s``.
    """
    mm = moment_matrix(measure, basis, eps)
    M = mm.entries
    s = basis.size
    threshold = PIVOT_RTOL * float(np.trace(M)) / s
    try:
        L = np.linalg.cholesky(M)
        ok = bool(np.all(np.diag(L) ** 2 >= threshold))
    except np.linalg.LinAlgError:
        ok = False
    if not ok:
        hint = (f"; retry with regularization, e.g. eps={recommended_eps(M):.3g}"
                if eps == 0 else "; increase eps")
        raise DegenerateSampleSet(
            f"moment matrix of degree {basis.degree} is singular for these {len(measure)} samples "
            f"(they lie on an algebraic hypersurface of degree <= {basis.degree})" + hint
        )
    return ChristoffelModel(basis, M, L, float(eps))


def christoffel_eval(model: ChristoffelModel, x) -> np.ndarray | float:
    """``Lambda(x) = ||L^{-1} b(x)||^2``. Accepts one point or an ``(N, n)`` array."""
    X = np.asarray(x, dtype=float)
    single = X.ndim == 0 or (X.ndim == 1 and X.shape[0] == model.basis.dim)
    X = X.reshape(-1, model.basis.dim)
    out = np.empty(X.shape[0])
    for start in range(0, X.shape[0], _EVAL_CHUNK):
        B = eval_basis(model.basis, X[start:start + _EVAL_CHUNK])
        V = solve_triangular(model.factor, B.T, lower=True, check_finite=False)
        out[start:start + _EVAL_CHUNK] = np.einsum("ij,ij->j", V, V)
    return float(out[0]) if single else out


def log_christoffel_eval(model: ChristoffelModel, x) -> np.ndarray | float:
    """``log10 Lambda(x)``, the filtration function. Nonnegative for probability measures."""
    val = christoffel_eval(model, x)
    return math.log10(val) if isinstance(val, float) else np.log10(val)


def wasserstein_stability_constant(n: int, d: int) -> float:
    """``4 * s(n, d) * d^2``."""
    return 4.0 * basis_size(n, d) * d * d


@dataclass
class StabilityReport:
    """Grid evaluation of the perturbation bounds between two fitted models.

    Sup norms are maxima over the supplied grid, hence lower bounds on the true
    sup norms over the box.
    """

    wasserstein_distance: float
    constant: float                # 4 s(n,d) d^2
    sup_x: float                   # ||Lambda_X|| on grid
    sup_y: float
    max_relative_gap: float        # max |Lambda_X - Lambda_Y| / Lambda_Y
    relative_bound: float          # constant * sup_x * d_W
    log10_gap: float               # ||log10 Lambda_X - log10 Lambda_Y||
    ln_gap: float
    log10_bound: float             # log10(constant * max(sup) * d_W + 1)
    ln_bound: float
    local_condition: bool          # constant * sup_x * d_W <= 1/2
    local_sup_holds: bool          # sup_y <= 2 sup_x (vacuously True if not local)
    slack: float = 1e-6

    @property
    def relative_holds(self) -> bool:
        return self.max_relative_gap <= self.relative_bound + self.slack

    @property
    def log_holds(self) -> bool:
        return (self.log10_gap <= self.log10_bound + self.slack
                and self.ln_gap <= self.ln_bound + self.slack)

    @property
    def all_hold(self) -> bool:
        return self.relative_holds and self.log_holds and self.local_sup_holds


def stability_gap(model_x: ChristoffelModel, model_y: ChristoffelModel,
                  measure_x: EmpiricalMeasure, measure_y: EmpiricalMeasure,
                  grid, distance: float | None = None, slack: float = 1e-6) -> StabilityReport:
    """Evaluate both sides of the Wasserstein perturbation bounds on ``grid``."""
    if model_x.basis != model_y.basis:
        raise BasisMismatch(f"{model_x.basis} vs {model_y.basis}")
    from .transport import wasserstein

    G = np.asarray(grid, dtype=float).reshape(-1, model_x.basis.dim)
    if G.shape[0] == 0:
        raise ValueError("grid must be nonempty")
    if distance is None:
        distance, _ = wasserstein(measure_x, measure_y)
    lx = christoffel_eval(model_x, G)
    ly = christoffel_eval(model_y, G)
    sup_x, sup_y = float(lx.max()), float(ly.max())
    const = wasserstein_stability_constant(model_x.basis.dim, model_x.basis.degree)
    arg = const * max(sup_x, sup_y) * distance + 1.0
    local = const * sup_x * distance <= 0.5
    return StabilityReport(
        wasserstein_distance=float(distance),
        constant=const,
        sup_x=sup_x,
        sup_y=sup_y,
        max_relative_gap=float(np.max(np.abs(lx - ly) / ly)),
        relative_bound=const * sup_x * distance,
        log10_gap=float(np.max(np.abs(np.log10(lx) - np.log10(ly)))),
        ln_gap=float(np.max(np.abs(np.log(lx) - np.log(ly)))),
        log10_bound=math.log10(arg),
        ln_bound=math.log(arg),
        local_condition=bool(local),
        local_sup_holds=bool((not local) or sup_y <= 2.0 * sup_x + slack),
        slack=slack,
    )

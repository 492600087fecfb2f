"""Least squares over a Euclidean ball, empirical norms and Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .simulate import PathDataset
from .spline import SplineBasis, design_matrix

__all__ = [
    "NumericFailure",
    "RegressionProblem",
    "GramMatrix",
    "constrained_lsq",
    "ball_constrained_solve",
    "empirical_norm_sq",
    "gram_matrix",
]

_MAX_BISECTIONS = 200
_RADIUS_RTOL = 1e-10


class NumericFailure(RuntimeError):
    """A numerical routine failed on inputs it should handle."""


@dataclass(frozen=True)
class RegressionProblem:
    """Minimise ``||design @ a - targets||^2`` subject to ``sum(a**2) <= radius``."""

    design: np.ndarray
    targets: np.ndarray
    radius: float

    def __post_init__(self):
        design = np.asarray(self.design, dtype=float)
        targets = np.asarray(self.targets, dtype=float).ravel()
        if design.ndim != 2 or design.shape[0] != len(targets):
            raise ValueError("design rows must match targets length")
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "targets", targets)


@dataclass(frozen=True)
class GramMatrix:
    entries: np.ndarray
    source: Union[int, str]

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.entries)[0])


def ball_constrained_solve(G: np.ndarray, g: np.ndarray, radius: float) -> np.ndarray:
    """Minimiser of ``a'Ga - 2g'a`` over ``sum(a**2) <= radius`` for symmetric PSD ``G``.

    The ridge path ``(G + lam I) a = g`` is traced through the eigendecomposition
    of ``G``. The minimum-norm solution at ``lam -> 0+`` is returned when
    feasible; otherwise ``lam`` is bisected until the squared norm hits the
    radius, using that ``sum(a(lam)**2)`` decreases strictly in ``lam``.
    """
    G = np.asarray(G, dtype=float)
    g = np.asarray(g, dtype=float).ravel()
    if not (np.all(np.isfinite(G)) and np.all(np.isfinite(g)) and np.isfinite(radius)):
        raise ValueError("non-finite input to constrained least squares")
    if not radius > 0:
        raise ValueError("radius must be positive")
    w, V = np.linalg.eigh(0.5 * (G + G.T))
    w = np.clip(w, 0.0, None)
    c = V.T @ g
    cutoff = w.max(initial=0.0) * len(w) * np.finfo(float).eps
    pos = w > cutoff

    a0 = V[:, pos] @ (c[pos] / w[pos])
    if a0 @ a0 <= radius:
        return a0

    def sq_norm(lam):
        return float(np.sum((c / (w + lam)) ** 2))

    lo, hi = 0.0, np.linalg.norm(c) / np.sqrt(radius)
    # hi is feasible: sum c^2/(w+hi)^2 <= |c|^2/hi^2 = radius
    for _ in range(_MAX_BISECTIONS):
        lam = 0.5 * (lo + hi)
        s = sq_norm(lam)
        if abs(s - radius) <= _RADIUS_RTOL * radius:
            return V @ (c / (w + lam))
        if s > radius:
            lo = lam
        else:
            hi = lam
        if hi - lo <= np.spacing(hi):
            # bracket exhausted at machine precision: take the feasible end
            return V @ (c / (w + hi))
    raise NumericFailure("ridge bisection did not converge")


def constrained_lsq(p: RegressionProblem) -> np.ndarray:
    D, y = p.design, p.targets
    if not (np.all(np.isfinite(D)) and np.all(np.isfinite(y))):
        raise ValueError("non-finite input to constrained least squares")
    return ball_constrained_solve(D.T @ D, D.T @ y, p.radius)


def _sample_points(ds: PathDataset, label: Optional[int]) -> np.ndarray:
    paths = ds.paths if label is None else ds.class_paths(label)
    if len(paths) == 0:
        raise ValueError("empty subset")
    return paths[:, :-1].ravel()


def empirical_norm_sq(ds: PathDataset, f: Callable, label: Optional[int] = None) -> float:
    """Mean of ``f(X_{k/n})**2`` over ``k < n`` and all paths of the subset (``None`` = all)."""
    x = _sample_points(ds, label)
    v = np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)
    return float(np.mean(v ** 2))


def gram_matrix(ds: PathDataset, label: Optional[int], basis: SplineBasis) -> GramMatrix:
    """Empirical Gram matrix ``B'B / (N_i n)`` of the basis at the class sample points."""
    x = _sample_points(ds, label)
    B = design_matrix(basis, x)
    G = B.T @ B / len(x)
    return GramMatrix(0.5 * (G + G.T), "pooled" if label is None else int(label))

"""Spline least-squares estimators of the class drifts and the diffusion coefficient.

Drift targets are the scaled increments ``Z = (X_{k+1} - X_k) / delta`` of the
paths of one class; diffusion targets are ``U = (X_{k+1} - X_k)**2 / delta``
pooled over all paths. Both are regressed on the B-spline basis at ``X_k``
with an ``l2`` constraint on the coefficients, then truncated.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Dict, Optional, Tuple, Union

import numpy as np

from .regress import ball_constrained_solve
from .simulate import PathDataset
from .spline import Clamp, SplineBasis, SplineFn, Threshold, design_matrix, zero_spline

__all__ = [
    "EmptyClassWarning",
    "EstimatorConfig",
    "FittedModel",
    "estimate_weights",
    "drift_radius",
    "drift_threshold",
    "fit_drift_class",
    "fit_sigma_sq",
    "drift_contrasts",
    "sigma_contrasts",
    "select_dimension_drift",
    "select_dimension_sigma",
    "interval_half_width",
    "theory_dimension",
    "fit_all",
]

MODES = ("general", "known_sigma")
A_RULES = ("log_n", "sqrt_log_n", "theory")


class EmptyClassWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EstimatorConfig:
    """Tuning of the plug-in estimators.

    ``a_rule`` is ``"log_n"`` (``A = log N``), ``"sqrt_log_n"`` (``A = sqrt(log N)``),
    ``"theory"`` (``A = sqrt(3 beta / (2 beta + 1) log N_i)``), a positive float
    for a fixed half-width, or ``None`` for the mode default (``log_n`` in general
    mode, ``theory`` with a known diffusion).

    ``radius_form="sum_sq"`` bounds ``sum(a**2)`` by the radius; ``"norm"``
    bounds ``sqrt(sum(a**2))`` instead. ``contrast_normalization="class"``
    averages the selection contrast over the class sample, ``"total"`` divides
    the class sum by ``N n``.
    """

    mode: str = "general"
    degree: int = 3
    k_grid: Tuple[int, ...] = (1, 2, 4, 8, 16, 32)
    kappa_drift: float = 0.1
    kappa_sigma: float = 5.0
    a_rule: Union[str, float, None] = None
    beta: float = 1.0
    known_sigma_sq: float = 1.0
    k_rule: str = "penalized"
    radius_form: str = "sum_sq"
    contrast_normalization: str = "class"

    def __post_init__(self):
        object.__setattr__(self, "k_grid", tuple(int(k) for k in self.k_grid))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if not self.k_grid or min(self.k_grid) < 1:
            raise ValueError("k_grid must be a nonempty set of positive integers")
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if not (self.kappa_drift > 0 and self.kappa_sigma > 0):
            raise ValueError("kappa values must be positive")
        if isinstance(self.a_rule, str):
            if self.a_rule not in A_RULES:
                raise ValueError(f"a_rule must be one of {A_RULES}, a number or None")
        elif self.a_rule is not None and not float(self.a_rule) > 0:
            raise ValueError("a fixed half-width must be positive")
        if not (self.beta > 0 and self.known_sigma_sq > 0):
            raise ValueError("beta and known_sigma_sq must be positive")
        if self.k_rule not in ("penalized", "theory"):
            raise ValueError("k_rule must be 'penalized' or 'theory'")
        if self.radius_form not in ("sum_sq", "norm"):
            raise ValueError("radius_form must be 'sum_sq' or 'norm'")
        if self.contrast_normalization not in ("class", "total"):
            raise ValueError("contrast_normalization must be 'class' or 'total'")

    @property
    def known_sigma(self) -> bool:
        return self.mode == "known_sigma"

    def replace(self, **changes) -> "EstimatorConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class FittedModel:
    """Estimated weights, thresholded drifts and clamped diffusion (or a known constant)."""

    weights: np.ndarray
    drifts: Tuple[SplineFn, ...]
    sigma_sq: Union[SplineFn, float]
    k_drift: Tuple[int, ...]
    a_drift: Tuple[float, ...]
    k_sigma: Optional[int] = None
    a_sigma: Optional[float] = None
    empty_classes: Tuple[int, ...] = ()
    degenerate: bool = False
    config: EstimatorConfig = field(default_factory=EstimatorConfig)

    @property
    def k_classes(self) -> int:
        return len(self.drifts)

    def sigma_sq_at(self, x) -> np.ndarray:
        if isinstance(self.sigma_sq, SplineFn):
            return self.sigma_sq(x)
        return np.full(np.shape(x), float(self.sigma_sq))


def estimate_weights(ds: PathDataset) -> np.ndarray:
    if ds.N < 1:
        raise ValueError("cannot estimate weights from an empty dataset")
    return ds.class_counts() / ds.N


def _increments(paths: np.ndarray, n: int):
    x = paths[:, :-1].ravel()
    dx = np.diff(paths, axis=1).ravel()
    return x, dx * n


def _check_n(ds: PathDataset) -> None:
    if ds.n < 1:
        raise ValueError("n must be at least 1")


def drift_radius(K: int, M: int, N: int, N_i: int, A: float, mode: str = "general") -> float:
    if mode == "general":
        return (K + M) * math.log(N) ** 3
    return (K + M) * math.log(N_i) * A ** 2


def drift_threshold(N: int, N_i: int, A: float, mode: str = "general") -> float:
    if mode == "general":
        return math.log(N) ** 1.5
    return A * math.sqrt(math.log(N_i))


def _as_sum_sq(radius: float, radius_form: str) -> float:
    return radius if radius_form == "sum_sq" else radius ** 2


def _fit(x, y, basis: SplineBasis, radius: float, transform) -> Tuple[SplineFn, np.ndarray]:
    B = design_matrix(basis, x)
    a = ball_constrained_solve(B.T @ B, B.T @ y, radius)
    f = SplineFn(basis, a, transform)
    return f, transform(B @ a)


def _drift_setup(ds: PathDataset, label: int, A: float, K: int, M: int, mode: str, radius_form: str):
    N_i = int(np.sum(ds.labels == label))
    if N_i == 0:
        return None
    if mode == "known_sigma" and N_i < 2:
        raise ValueError("known-diffusion drift estimation needs at least two paths in the class")
    basis = SplineBasis.build(A, K, M)
    radius = _as_sum_sq(drift_radius(K, M, ds.N, N_i, A, mode), radius_form)
    T = drift_threshold(ds.N, N_i, A, mode)
    return basis, radius, Threshold(T)


def _check_N(ds: PathDataset, mode: str) -> None:
    if mode == "general" and ds.N < 3:
        raise ValueError("need at least three paths so that log N > 1")


def fit_drift_class(
    ds: PathDataset,
    label: int,
    A: float,
    K: int,
    M: int = 3,
    *,
    mode: str = "general",
    radius_form: str = "sum_sq",
) -> SplineFn:
    """Thresholded constrained spline regression of ``Z`` on ``X`` for one class.

    An empty class yields the zero spline (with an :class:`EmptyClassWarning`).
    """
    _check_n(ds)
    _check_N(ds, mode)
    setup = _drift_setup(ds, label, A, K, M, mode, radius_form)
    if setup is None:
        warnings.warn(f"class {label} has no paths; using the zero drift", EmptyClassWarning)
        T = drift_threshold(ds.N, 2, A, mode)
        return zero_spline(SplineBasis.build(A, K, M), Threshold(T))
    basis, radius, transform = setup
    x, z = _increments(ds.class_paths(label), ds.n)
    return _fit(x, z, basis, radius, transform)[0]


def sigma_clamp(N: int) -> Clamp:
    return Clamp(1.0 / math.log(N), math.log(N) ** 1.5)


def fit_sigma_sq(ds: PathDataset, A: float, K: int, M: int = 3, *, radius_form: str = "sum_sq") -> SplineFn:
    """Clamped constrained spline regression of squared scaled increments, all paths pooled."""
    _check_n(ds)
    _check_N(ds, "general")
    basis = SplineBasis.build(A, K, M)
    radius = _as_sum_sq((K + M) * math.log(ds.N) ** 3, radius_form)
    x, z = _increments(ds.paths, ds.n)
    return _fit(x, z * z / ds.n, basis, radius, sigma_clamp(ds.N))[0]


def drift_contrasts(
    ds: PathDataset, label: int, cfg: EstimatorConfig, A: float
) -> Dict[int, Tuple[float, SplineFn]]:
    """Penalised contrast and fitted drift for every ``K`` in the grid."""
    _check_n(ds)
    _check_N(ds, cfg.mode)
    M = cfg.degree
    paths = ds.class_paths(label)
    if len(paths) == 0:
        raise ValueError(f"class {label} is empty")
    x, z = _increments(paths, ds.n)
    denom = len(x) if cfg.contrast_normalization == "class" else ds.N * ds.n
    out = {}
    for K in sorted(set(cfg.k_grid)):
        basis, radius, transform = _drift_setup(ds, label, A, K, M, cfg.mode, cfg.radius_form)
        f, fitted = _fit(x, z, basis, radius, transform)
        pen = cfg.kappa_drift * (K + M) * math.log(ds.N) ** 3 / ds.N
        out[K] = (float(np.sum((fitted - z) ** 2) / denom + pen), f)
    return out


def sigma_contrasts(ds: PathDataset, cfg: EstimatorConfig, A: float) -> Dict[int, Tuple[float, SplineFn]]:
    _check_n(ds)
    _check_N(ds, "general")
    M = cfg.degree
    x, z = _increments(ds.paths, ds.n)
    u = z * z / ds.n
    clamp = sigma_clamp(ds.N)
    out = {}
    for K in sorted(set(cfg.k_grid)):
        basis = SplineBasis.build(A, K, M)
        radius = _as_sum_sq((K + M) * math.log(ds.N) ** 3, cfg.radius_form)
        f, fitted = _fit(x, u, basis, radius, clamp)
        pen = cfg.kappa_sigma * (K + M) * math.log(ds.N) ** 3 / (ds.N * ds.n)
        out[K] = (float(np.mean((fitted - u) ** 2) + pen), f)
    return out


def _argmin(contrasts: Dict[int, Tuple[float, SplineFn]]) -> int:
    # sorted keys + strict comparison: ties go to the smaller K
    best = None
    for K in sorted(contrasts):
        if best is None or contrasts[K][0] < contrasts[best][0]:
            best = K
    return best


def interval_half_width(cfg: EstimatorConfig, N: int, N_i: Optional[int] = None) -> float:
    rule = cfg.a_rule
    if rule is None:
        rule = "theory" if cfg.known_sigma else "log_n"
    if not isinstance(rule, str):
        return float(rule)
    if rule == "log_n":
        return math.log(N)
    if rule == "sqrt_log_n":
        return math.sqrt(math.log(N))
    size = N if N_i is None else N_i
    return math.sqrt(3 * cfg.beta / (2 * cfg.beta + 1) * math.log(size))


def theory_dimension(N_i: int, beta: float) -> int:
    """``K ~ log(N_i)**(-5/2) N_i**(1/(2 beta + 1))``, rounded, at least 1."""
    return max(1, int(round(math.log(N_i) ** -2.5 * N_i ** (1.0 / (2 * beta + 1)))))


def select_dimension_drift(ds: PathDataset, label: int, cfg: EstimatorConfig, A: Optional[float] = None) -> int:
    if len(cfg.k_grid) == 1:
        return cfg.k_grid[0]
    if A is None:
        A = interval_half_width(cfg, ds.N, int(np.sum(ds.labels == label)))
    return _argmin(drift_contrasts(ds, label, cfg, A))


def select_dimension_sigma(ds: PathDataset, cfg: EstimatorConfig, A: Optional[float] = None) -> int:
    if len(cfg.k_grid) == 1:
        return cfg.k_grid[0]
    if A is None:
        A = math.log(ds.N) if cfg.a_rule is None else interval_half_width(cfg, ds.N)
    return _argmin(sigma_contrasts(ds, cfg, A))


def fit_all(ds: PathDataset, cfg: Optional[EstimatorConfig] = None) -> FittedModel:
    """Weights, per-class drift with selected dimension, and pooled diffusion estimate."""
    cfg = EstimatorConfig() if cfg is None else cfg
    if ds.N < 1:
        raise ValueError("cannot fit an empty dataset")
    _check_n(ds)
    _check_N(ds, cfg.mode)
    M = cfg.degree
    counts = ds.class_counts()
    drifts, ks, As, empty = [], [], [], []
    degenerate = cfg.known_sigma and int(counts.min()) <= 1
    for label in range(1, ds.k_classes + 1):
        N_i = int(counts[label - 1])
        if N_i == 0 or (cfg.known_sigma and N_i <= 1):
            A = interval_half_width(cfg, ds.N, max(N_i, 2))
            K = min(cfg.k_grid)
            if N_i == 0:
                warnings.warn(f"class {label} has no paths; using the zero drift", EmptyClassWarning)
                empty.append(label)
            T = drift_threshold(ds.N, max(N_i, 2), A, cfg.mode)
            drifts.append(zero_spline(SplineBasis.build(A, K, M), Threshold(T)))
            ks.append(K)
            As.append(A)
            continue
        A = interval_half_width(cfg, ds.N, N_i)
        if cfg.k_rule == "theory":
            K = theory_dimension(N_i, cfg.beta)
            f = fit_drift_class(ds, label, A, K, M, mode=cfg.mode, radius_form=cfg.radius_form)
        else:
            contrasts = drift_contrasts(ds, label, cfg, A)
            K = _argmin(contrasts)
            f = contrasts[K][1]
        drifts.append(f)
        ks.append(K)
        As.append(A)

    if cfg.known_sigma:
        sigma_sq, k_sigma, a_sigma = float(cfg.known_sigma_sq), None, None
    else:
        a_sigma = math.log(ds.N) if cfg.a_rule is None else interval_half_width(cfg, ds.N)
        contrasts = sigma_contrasts(ds, cfg, a_sigma)
        k_sigma = _argmin(contrasts)
        sigma_sq = contrasts[k_sigma][1]

    return FittedModel(
        weights=estimate_weights(ds),
        drifts=tuple(drifts),
        sigma_sq=sigma_sq,
        k_drift=tuple(ks),
        a_drift=tuple(As),
        k_sigma=k_sigma,
        a_sigma=a_sigma,
        empty_classes=tuple(empty),
        degenerate=bool(degenerate),
        config=cfg,
    )

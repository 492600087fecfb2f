"""Discretised likelihood statistics, softmax posteriors and risk evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .estimate import FittedModel
from .models import DiffusionModel
from .regress import NumericFailure
from .simulate import PathDataset, PathSample

__all__ = [
    "f_statistic",
    "f_statistics",
    "posterior_probs",
    "PlugInClassifier",
    "BayesClassifier",
    "classify",
    "empirical_risk",
    "excess_risk",
]


def f_statistics(paths: np.ndarray, drifts: Sequence[Callable], sigma_sq: Callable) -> np.ndarray:
    """Statistic of every drift for every path; shape ``(N, K)``.

    For a path ``x_0..x_n`` with ``delta = 1/n`` the statistic of drift ``b`` is
    ``sum_k (b/s2)(x_k) (x_{k+1} - x_k) - delta/2 (b**2/s2)(x_k)``.
    """
    paths = np.atleast_2d(np.asarray(paths, dtype=float))
    n = paths.shape[1] - 1
    if n < 1:
        raise ValueError("paths need at least two observations")
    x = paths[:, :-1]
    dx = np.diff(paths, axis=1)
    s2 = np.broadcast_to(np.asarray(sigma_sq(x), dtype=float), x.shape)
    if not np.all(s2 > 0):
        raise NumericFailure("non-positive squared diffusion at a sample point")
    out = np.empty((len(paths), len(drifts)))
    for i, b in enumerate(drifts):
        bx = np.broadcast_to(np.asarray(b(x), dtype=float), x.shape)
        ratio = bx / s2
        out[:, i] = np.sum(ratio * dx - 0.5 / n * ratio * bx, axis=1)
    return out


def f_statistic(values, drift: Callable, sigma_sq: Callable) -> float:
    return float(f_statistics(np.asarray(values, dtype=float)[None, :], [drift], sigma_sq)[0, 0])


def posterior_probs(weights, F) -> np.ndarray:
    """``p_i exp(F_i) / sum_k p_k exp(F_k)``, computed after subtracting the max exponent.

    ``F`` may be a vector or an ``(N, K)`` array of rows.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < 0) or not np.any(w > 0):
        raise ValueError("weights must be nonnegative and not all zero")
    F = np.asarray(F, dtype=float)
    with np.errstate(divide="ignore"):
        logits = np.log(w) + F
    m = np.max(logits, axis=-1, keepdims=True)
    e = np.exp(logits - m)
    return e / e.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class PlugInClassifier:
    fitted: FittedModel
    degenerate_fallback: bool = False

    @classmethod
    def from_fit(cls, fitted: FittedModel) -> "PlugInClassifier":
        return cls(fitted, fitted.degenerate)

    @property
    def k_classes(self) -> int:
        return self.fitted.k_classes

    def statistics(self, paths) -> np.ndarray:
        return f_statistics(paths, self.fitted.drifts, self.fitted.sigma_sq_at)

    def posterior(self, paths) -> np.ndarray:
        return posterior_probs(self.fitted.weights, self.statistics(paths))

    def predict(self, paths) -> np.ndarray:
        paths = np.atleast_2d(paths)
        if self.degenerate_fallback:
            return np.ones(len(paths), dtype=np.int64)
        return np.argmax(self.posterior(paths), axis=1) + 1


@dataclass(frozen=True)
class BayesClassifier:
    """The Bayes rule with the true coefficients and the same discretised statistic."""

    model: DiffusionModel

    @property
    def k_classes(self) -> int:
        return self.model.k_classes

    def statistics(self, paths) -> np.ndarray:
        return f_statistics(paths, self.model.drifts, lambda x: np.square(self.model.diffusion(x)))

    def posterior(self, paths) -> np.ndarray:
        return posterior_probs(self.model.weights, self.statistics(paths))

    def predict(self, paths) -> np.ndarray:
        return np.argmax(self.posterior(np.atleast_2d(paths)), axis=1) + 1


def _values(path) -> np.ndarray:
    return path.values if isinstance(path, PathSample) else np.asarray(path, dtype=float)


def classify(c, path) -> int:
    return int(c.predict(_values(path)[None, :])[0])


def _predict_all(c, paths: np.ndarray) -> np.ndarray:
    if hasattr(c, "predict"):
        return np.asarray(c.predict(paths))
    return np.array([c(p) for p in paths])


def empirical_risk(c, test: PathDataset) -> float:
    """Misclassification rate on ``test``; ``c`` has ``predict(paths)`` or maps one path to a label."""
    if test.N == 0:
        raise ValueError("empty test set")
    return float(np.mean(_predict_all(c, test.paths) != test.labels))


def excess_risk(plug_in, bayes, test: PathDataset) -> float:
    return empirical_risk(plug_in, test) - empirical_risk(bayes, test)

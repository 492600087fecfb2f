"""Mixture diffusion models ``dX = b_Y(X) dt + sigma(X) dW``, ``X_0 = 0``."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "ModelId",
    "DiffusionModel",
    "THETA_GRID",
    "make_cosine_model",
    "make_ou_model",
    "make_model",
    "parse_model_id",
    "eval_drift",
    "eval_sigma",
]

# drift-gap parameters used in the cosine experiments
THETA_GRID = tuple([0.5, 0.75] + [(4 + a) / 4 for a in range(1, 13)])

_MODEL_ID_RE = re.compile(r"^(cosine|ou):([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?|[0-9]+/[0-9]+)$")


@dataclass(frozen=True)
class ModelId:
    """Named model family plus its parameter, e.g. ``cosine:4`` or ``ou:0.5``."""

    name: str
    param: float

    def __post_init__(self):
        if self.name not in ("cosine", "ou"):
            raise ValueError(f"unknown model family {self.name!r}")
        if not (np.isfinite(self.param) and self.param > 0):
            raise ValueError(f"model parameter must be positive, got {self.param}")

    @property
    def param_name(self) -> str:
        return "theta" if self.name == "cosine" else "sigma"

    def __str__(self) -> str:
        return f"{self.name}:{self.param!r}"


def parse_model_id(text: str) -> ModelId:
    """Parse ``cosine:<theta>`` or ``ou:<sigma>``; fractions like ``3/2`` are accepted."""
    m = _MODEL_ID_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed model id {text!r}")
    return ModelId(m.group(1), float(Fraction(m.group(2))))


@dataclass(frozen=True)
class DiffusionModel:
    """K class drifts, one shared diffusion coefficient and mixture weights.

    Drift and diffusion callables must accept numpy arrays.
    """

    drifts: Tuple[Callable, ...]
    diffusion: Callable
    weights: np.ndarray
    sigma_floor: float
    model_id: Optional[ModelId] = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if len(w) != len(self.drifts):
            raise ValueError("one weight per drift required")
        if len(w) < 2:
            raise ValueError("at least two classes required")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a probability vector")
        if self.sigma_floor < 0:
            raise ValueError("sigma_floor must be nonnegative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "drifts", tuple(self.drifts))

    @property
    def k_classes(self) -> int:
        return len(self.drifts)

    def drift(self, label: int, x):
        return eval_drift(self, label, x)

    def sigma(self, x):
        return eval_sigma(self, x)


def _uniform(k: int) -> np.ndarray:
    return np.full(k, 1.0 / k)


def make_cosine_model(theta: float, weights: Optional[Sequence[float]] = None) -> DiffusionModel:
    """Three classes with drifts ``b, theta*b, -theta*b`` where ``b = 1/4 + 3/4 cos^2``."""
    if not theta > 0:
        raise ValueError(f"theta must be positive, got {theta}")

    def b1(x):
        return 0.25 + 0.75 * np.cos(x) ** 2

    def b2(x):
        return theta * b1(x)

    def b3(x):
        return -theta * b1(x)

    def sigma(x):
        return 0.1 + 0.9 / np.sqrt(1.0 + np.square(x))

    return DiffusionModel(
        drifts=(b1, b2, b3),
        diffusion=sigma,
        weights=_uniform(3) if weights is None else weights,
        sigma_floor=0.1,
        model_id=ModelId("cosine", float(theta)),
    )


def make_ou_model(sigma: float, weights: Optional[Sequence[float]] = None) -> DiffusionModel:
    """Three Ornstein-Uhlenbeck classes ``1 - x``, ``-1 - x``, ``-x`` with constant noise."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")

    def b1(x):
        return 1.0 - np.asarray(x, dtype=float)

    def b2(x):
        return -1.0 - np.asarray(x, dtype=float)

    def b3(x):
        return -np.asarray(x, dtype=float)

    def diffusion(x):
        return np.full(np.shape(x), float(sigma))

    return DiffusionModel(
        drifts=(b1, b2, b3),
        diffusion=diffusion,
        weights=_uniform(3) if weights is None else weights,
        sigma_floor=float(sigma),
        model_id=ModelId("ou", float(sigma)),
    )


def make_model(model_id, weights=None) -> DiffusionModel:
    if isinstance(model_id, str):
        model_id = parse_model_id(model_id)
    factory = make_cosine_model if model_id.name == "cosine" else make_ou_model
    return factory(model_id.param, weights)


def _check_label(model: DiffusionModel, label: int) -> None:
    if not 1 <= label <= model.k_classes:
        raise ValueError(f"class {label} outside 1..{model.k_classes}")


def eval_drift(model: DiffusionModel, label: int, x):
    _check_label(model, label)
    v = model.drifts[label - 1](np.asarray(x, dtype=float))
    return v if np.ndim(v) else float(v)


def eval_sigma(model: DiffusionModel, x):
    v = model.diffusion(np.asarray(x, dtype=float))
    return v if np.ndim(v) else float(v)

"""Clamped B-spline bases on a symmetric interval ``[-A, A]``.

The basis has ``K`` equal interior intervals and degree ``M``; its dimension
is ``K + M``.  Evaluation at ``x = A`` uses the left limit so the partition of
unity holds on the closed interval, and every basis function vanishes outside
``[-A, A]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

__all__ = [
    "KnotVector",
    "SplineBasis",
    "Threshold",
    "Clamp",
    "SplineFn",
    "build_knots",
    "eval_basis",
    "design_matrix",
    "eval_spline",
    "knot_sites",
    "lipschitz_interpolant",
]


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot sequence with boundary multiplicity ``M + 1``."""

    knots: np.ndarray
    A: float
    K: int
    M: int

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        knots.setflags(write=False)
        object.__setattr__(self, "knots", knots)
        if len(knots) != self.K + 2 * self.M + 1:
            raise ValueError(
                f"expected {self.K + 2 * self.M + 1} knots, got {len(knots)}"
            )
        if np.any(np.diff(knots) < 0):
            raise ValueError("knots must be nondecreasing")
        M = self.M
        if not (np.all(knots[: M + 1] == -self.A) and np.all(knots[-M - 1:] == self.A)):
            raise ValueError("boundary knots must have multiplicity M + 1 at -A and A")
        if np.any(np.diff(knots[M: M + self.K + 1]) <= 0):
            raise ValueError("interior knots must be strictly increasing")

    @property
    def interior(self) -> np.ndarray:
        """The breakpoints ``u_0 < ... < u_K``."""
        return self.knots[self.M: self.M + self.K + 1]


def build_knots(A: float, K: int, M: int) -> KnotVector:
    """Knots ``-A`` (M+1 times), ``-A + 2lA/K`` for ``0 < l < K``, ``A`` (M+1 times)."""
    if not (np.isfinite(A) and A > 0):
        raise ValueError(f"A must be positive, got {A}")
    if int(K) != K or K < 1:
        raise ValueError(f"K must be a positive integer, got {K}")
    if int(M) != M or M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    K, M = int(K), int(M)
    interior = -A + 2.0 * A * np.arange(K + 1) / K
    interior[-1] = A
    knots = np.concatenate([np.full(M, -A), interior, np.full(M, A)])
    return KnotVector(knots=knots, A=float(A), K=K, M=M)


@dataclass(frozen=True)
class SplineBasis:
    knots: KnotVector

    @classmethod
    def build(cls, A: float, K: int, M: int) -> "SplineBasis":
        return cls(build_knots(A, K, M))

    @property
    def dim(self) -> int:
        return len(self.knots.knots) - self.knots.M - 1

    @property
    def A(self) -> float:
        return self.knots.A

    @property
    def K(self) -> int:
        return self.knots.K

    @property
    def M(self) -> int:
        return self.knots.M

    def __call__(self, x) -> np.ndarray:
        return design_matrix(self, x)


def _spans_and_values(basis: SplineBasis, x: np.ndarray):
    """Nonzero basis values at each point via the triangular Cox-de Boor table.

    Returns ``(inside, span, values)`` where ``values[p, r]`` is the value of
    basis function ``span[p] - M + r`` at ``x[p]``.
    """
    t = basis.knots.knots
    M = basis.M
    dim = basis.dim
    A = basis.A
    inside = np.abs(x) <= A
    xs = x[inside]
    # last knot <= x, restricted to the nonempty spans M..dim-1; x = A maps to the last span
    span = np.clip(np.searchsorted(t, xs, side="right") - 1, M, dim - 1)
    npts = len(xs)
    values = np.zeros((npts, M + 1))
    values[:, 0] = 1.0
    left = np.zeros((npts, M + 1))
    right = np.zeros((npts, M + 1))
    for j in range(1, M + 1):
        left[:, j] = xs - t[span + 1 - j]
        right[:, j] = t[span + j] - xs
        saved = np.zeros(npts)
        for r in range(j):
            denom = right[:, r + 1] + left[:, j - r]
            # 0/0 := 0; cannot trigger on a nonempty span but kept explicit
            with np.errstate(invalid="ignore", divide="ignore"):
                temp = np.where(denom != 0.0, values[:, r] / denom, 0.0)
            values[:, r] = saved + right[:, r + 1] * temp
            saved = left[:, j - r] * temp
        values[:, j] = saved
    return inside, span, values


def design_matrix(basis: SplineBasis, x) -> np.ndarray:
    """Basis values at every point of ``x``; shape ``(len(x), dim)``."""
    x = np.atleast_1d(np.asarray(x, dtype=float)).ravel()
    out = np.zeros((len(x), basis.dim))
    inside, span, values = _spans_and_values(basis, x)
    rows = np.flatnonzero(inside)
    for r in range(basis.M + 1):
        out[rows, span - basis.M + r] = values[:, r]
    return out


def eval_basis(basis: SplineBasis, x: float) -> np.ndarray:
    """All ``dim`` basis values at a single point."""
    return design_matrix(basis, [x])[0]


@dataclass(frozen=True)
class Threshold:
    """Symmetric truncation to ``[-T, T]``."""

    T: float

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("threshold must be positive")

    def __call__(self, v):
        return np.clip(v, -self.T, self.T)


@dataclass(frozen=True)
class Clamp:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo <= self.hi:
            raise ValueError("clamp requires lo <= hi")

    def __call__(self, v):
        return np.clip(v, self.lo, self.hi)


Transform = Union[Threshold, Clamp, None]


@dataclass(frozen=True)
class SplineFn:
    """A coefficient vector over a basis, optionally followed by a transform."""

    basis: SplineBasis
    coeffs: np.ndarray
    transform: Transform = field(default=None)

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float).ravel()
        if len(coeffs) != self.basis.dim:
            raise ValueError(
                f"need {self.basis.dim} coefficients, got {len(coeffs)}"
            )
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)

    def raw(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (design_matrix(self.basis, x) @ self.coeffs).reshape(x.shape)

    def __call__(self, x):
        v = self.raw(x)
        if self.transform is not None:
            v = self.transform(v)
        return v if np.ndim(v) else float(v)

    def with_transform(self, transform: Transform) -> "SplineFn":
        return SplineFn(self.basis, self.coeffs, transform)


def eval_spline(f: SplineFn, x):
    return f(x)


def knot_sites(basis: SplineBasis, rule: str = "left") -> np.ndarray:
    """Sampling sites, one per basis function.

    ``"left"`` gives the knots ``u_{-M}, ..., u_{K-1}`` (the left end of each
    support); ``"greville"`` gives knot averages, which make the interpolant
    exact on linear functions.
    """
    t = basis.knots.knots
    dim, M = basis.dim, basis.M
    if rule == "left":
        return t[:dim].copy()
    if rule == "greville":
        return np.array([t[l + 1: l + M + 1].mean() for l in range(dim)])
    raise ValueError(f"unknown rule {rule!r}")


def lipschitz_interpolant(samples, basis: SplineBasis) -> SplineFn:
    """Quasi-interpolant ``sum_l h(u_l) B_l`` from samples at :func:`knot_sites`."""
    samples = np.asarray(samples, dtype=float).ravel()
    if len(samples) != basis.dim:
        raise ValueError(f"need {basis.dim} samples, got {len(samples)}")
    return SplineFn(basis, samples)


def interpolate_function(
    h: Callable, basis: SplineBasis, rule: str = "left"
) -> SplineFn:
    return lipschitz_interpolant(h(knot_sites(basis, rule)), basis)


def zero_spline(basis: SplineBasis, transform: Optional[Transform] = None) -> SplineFn:
    return SplineFn(basis, np.zeros(basis.dim), transform)

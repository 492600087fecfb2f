"""Euler-Maruyama simulation of labelled paths and the dataset text format.

Random streams
--------------
Record ``j`` of a dataset with base seed ``s`` draws from
``numpy.random.Generator(PCG64(SeedSequence([s, j])))``: one uniform for the
label (inverse CDF over the mixture weights), then ``n * refinement``
standard normals (numpy's ziggurat sampler) for the Brownian increments.
Every record is therefore reproducible on its own, independent of how
records are batched.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Optional, Union

import numpy as np

from .models import DiffusionModel, ModelId, parse_model_id

__all__ = [
    "PathSample",
    "PathDataset",
    "DatasetFormatError",
    "record_rng",
    "simulate_path",
    "sample_dataset",
    "write_dataset",
    "read_dataset",
]

FORMAT_TAG = "sdeclass-v1"
_CHUNK = 512


class DatasetFormatError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class PathSample:
    label: int
    values: np.ndarray


@dataclass(frozen=True, eq=False)
class PathDataset:
    """``N`` labelled paths observed at times ``0, 1/n, ..., 1``.

    ``paths`` has shape ``(N, n + 1)``; ``labels`` holds classes ``1..k_classes``.
    """

    n: int
    k_classes: int
    labels: np.ndarray
    paths: np.ndarray
    model_id: Optional[ModelId] = None
    seed: int = 0

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        paths = np.asarray(self.paths, dtype=float)
        if paths.size == 0:
            paths = paths.reshape(0, self.n + 1)
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if paths.ndim != 2 or paths.shape[1] != self.n + 1:
            raise ValueError(f"paths must have shape (N, {self.n + 1})")
        if len(labels) != len(paths):
            raise ValueError("one label per path required")
        if len(labels) and (labels.min() < 1 or labels.max() > self.k_classes):
            raise ValueError(f"labels must lie in 1..{self.k_classes}")
        labels.setflags(write=False)
        paths.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "paths", paths)

    @property
    def delta(self) -> float:
        return 1.0 / self.n

    @property
    def N(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.N

    @property
    def records(self) -> List[PathSample]:
        return [PathSample(int(y), x) for y, x in zip(self.labels, self.paths)]

    def __iter__(self) -> Iterator[PathSample]:
        return iter(self.records)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k_classes + 1)[1:]

    def class_paths(self, label: int) -> np.ndarray:
        return self.paths[self.labels == label]

    def __eq__(self, other) -> bool:
        if not isinstance(other, PathDataset):
            return NotImplemented
        return (
            self.n == other.n
            and self.k_classes == other.k_classes
            and self.model_id == other.model_id
            and self.seed == other.seed
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.paths, other.paths)
        )


def record_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(index)])))


def _euler(model: DiffusionModel, labels: np.ndarray, noise: np.ndarray, n: int, r: int) -> np.ndarray:
    """Integrate all rows at once on the fine grid and keep every ``r``-th point."""
    h = 1.0 / (n * r)
    sqrt_h = np.sqrt(h)
    x = np.zeros(len(labels))
    out = np.empty((len(labels), n + 1))
    out[:, 0] = 0.0
    masks = [(c, labels == c) for c in range(1, model.k_classes + 1)]
    masks = [(c, m) for c, m in masks if m.any()]
    drift = np.empty_like(x)
    for step in range(n * r):
        for c, m in masks:
            drift[m] = model.drifts[c - 1](x[m])
        x = x + drift * h + model.diffusion(x) * sqrt_h * noise[:, step]
        if (step + 1) % r == 0:
            out[:, (step + 1) // r] = x
    return out


def simulate_path(
    model: DiffusionModel,
    label: int,
    n: int,
    refinement: int = 10,
    rng: Optional[np.random.Generator] = None,
) -> PathSample:
    """One path started at 0, simulated with step ``1/(n*refinement)``, observed every ``1/n``."""
    if n < 1 or refinement < 1:
        raise ValueError("n and refinement must be at least 1")
    if not 1 <= label <= model.k_classes:
        raise ValueError(f"class {label} outside 1..{model.k_classes}")
    rng = np.random.default_rng() if rng is None else rng
    noise = rng.standard_normal(n * refinement)[None, :]
    values = _euler(model, np.array([label]), noise, n, refinement)[0]
    return PathSample(int(label), values)


def sample_dataset(
    model: DiffusionModel, N: int, n: int, refinement: int = 10, seed: int = 0
) -> PathDataset:
    """Draw ``N`` labelled paths; record ``j`` uses the stream ``record_rng(seed, j)``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    if n < 1 or refinement < 1:
        raise ValueError("n and refinement must be at least 1")
    cdf = np.cumsum(model.weights)
    cdf[-1] = 1.0
    steps = n * refinement
    labels = np.empty(N, dtype=np.int64)
    paths = np.empty((N, n + 1))
    for start in range(0, N, _CHUNK):
        stop = min(N, start + _CHUNK)
        noise = np.empty((stop - start, steps))
        for j in range(start, stop):
            rng = record_rng(seed, j)
            # first class whose cumulative weight exceeds u; zero-weight classes never drawn
            labels[j] = int(np.searchsorted(cdf, rng.random(), side="right")) + 1
            noise[j - start] = rng.standard_normal(steps)
        paths[start:stop] = _euler(model, labels[start:stop], noise, n, refinement)
    return PathDataset(
        n=n,
        k_classes=model.k_classes,
        labels=labels,
        paths=paths,
        model_id=model.model_id,
        seed=int(seed),
    )


def _header(ds: PathDataset) -> str:
    model = "none" if ds.model_id is None else str(ds.model_id)
    return f"{FORMAT_TAG},n={ds.n},classes={ds.k_classes},model={model},seed={ds.seed}"


def write_dataset(ds: PathDataset, path: Union[str, Path]) -> None:
    lines = [_header(ds)]
    for y, x in zip(ds.labels, ds.paths):
        lines.append(",".join([str(int(y))] + ["%.17g" % v for v in x]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_header(line: str):
    fields = line.strip().split(",")
    if len(fields) != 5 or fields[0] != FORMAT_TAG:
        raise DatasetFormatError(1, f"expected header '{FORMAT_TAG},n=..,classes=..,model=..,seed=..'")
    kv = {}
    for f in fields[1:]:
        key, sep, value = f.partition("=")
        if not sep:
            raise DatasetFormatError(1, f"malformed header field {f!r}")
        kv[key] = value
    if set(kv) != {"n", "classes", "model", "seed"}:
        raise DatasetFormatError(1, "header must define n, classes, model and seed")
    try:
        n = int(kv["n"])
        k = int(kv["classes"])
        seed = int(kv["seed"])
        model_id = None if kv["model"] == "none" else parse_model_id(kv["model"])
    except ValueError as exc:
        raise DatasetFormatError(1, str(exc)) from None
    if n < 1 or k < 1 or not 0 <= seed < 2**64:
        raise DatasetFormatError(1, "n and classes must be positive, seed an unsigned 64-bit integer")
    return n, k, model_id, seed


def read_dataset(path: Union[str, Path]) -> PathDataset:
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise DatasetFormatError(1, "empty file")
    n, k, model_id, seed = _parse_header(lines[0])
    labels, rows = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != n + 2:
            raise DatasetFormatError(lineno, f"expected {n + 2} fields, got {len(fields)}")
        try:
            label = int(fields[0])
            values = [float(v) for v in fields[1:]]
        except ValueError as exc:
            raise DatasetFormatError(lineno, str(exc)) from None
        if not 1 <= label <= k:
            raise DatasetFormatError(lineno, f"label {label} outside 1..{k}")
        if not np.all(np.isfinite(values)):
            raise DatasetFormatError(lineno, "non-finite path value")
        labels.append(label)
        rows.append(values)
    paths = np.array(rows, dtype=float).reshape(len(rows), n + 1)
    return PathDataset(n=n, k_classes=k, labels=np.array(labels, dtype=np.int64),
                       paths=paths, model_id=model_id, seed=seed)

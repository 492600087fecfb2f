"""Fitted-model JSON files and INI experiment configuration.

Model files (schema ``sdeclass-model-v1``)::

    {"schema": "sdeclass-model-v1",
     "weights": [...], "degenerate": false, "empty_classes": [],
     "drifts": [<spline>, ...],
     "sigma_sq": <spline> | {"constant": 1.0},
     "k_drift": [...], "a_drift": [...], "k_sigma": 8, "a_sigma": 6.9,
     "estimator": {...EstimatorConfig fields...}}

    <spline> = {"A": 6.9, "K": 8, "M": 3, "coeffs": [...],
                "transform": null | {"kind": "threshold", "T": ...}
                                  | {"kind": "clamp", "lo": ..., "hi": ...}}

Config files are INI with an ``[experiment]`` and an ``[estimator]`` section::

    [experiment]
    model = cosine:4
    n_train = 1000
    n_test = 1000
    n = 100
    reps = 20
    seed = 0
    refinement = 10
    outputs = results

    [estimator]
    mode = general            ; or known_sigma
    degree = 3
    k_grid = 1, 2, 4, 8, 16, 32
    kappa_drift = 0.1
    kappa_sigma = 5
    a_rule = log_n            ; log_n | sqrt_log_n | theory | <number>
    beta = 1
    known_sigma_sq = 1
    k_rule = penalized        ; or theory
    radius_form = sum_sq      ; or norm
    contrast_normalization = class   ; or total

Every key is optional. ``SDECLASS_OUTPUT_DIR`` overrides ``outputs``.
"""

from __future__ import annotations

import configparser
import json
import os
from dataclasses import asdict, fields
from pathlib import Path
from typing import Union

import numpy as np

from .estimate import EstimatorConfig, FittedModel
from .experiment import ExperimentSpec
from .spline import Clamp, SplineBasis, SplineFn, Threshold

__all__ = [
    "MODEL_SCHEMA",
    "fitted_to_dict",
    "fitted_from_dict",
    "save_fitted",
    "load_fitted",
    "estimator_from_section",
    "load_config",
]

MODEL_SCHEMA = "sdeclass-model-v1"
OUTPUT_ENV = "SDECLASS_OUTPUT_DIR"


class ModelFormatError(ValueError):
    pass


def _spline_to_dict(f: SplineFn) -> dict:
    t = f.transform
    if t is None:
        tr = None
    elif isinstance(t, Threshold):
        tr = {"kind": "threshold", "T": t.T}
    else:
        tr = {"kind": "clamp", "lo": t.lo, "hi": t.hi}
    return {"A": f.basis.A, "K": f.basis.K, "M": f.basis.M,
            "coeffs": [float(c) for c in f.coeffs], "transform": tr}


def _spline_from_dict(d: dict) -> SplineFn:
    tr = d.get("transform")
    if tr is None:
        transform = None
    elif tr["kind"] == "threshold":
        transform = Threshold(float(tr["T"]))
    elif tr["kind"] == "clamp":
        transform = Clamp(float(tr["lo"]), float(tr["hi"]))
    else:
        raise ModelFormatError(f"unknown transform {tr['kind']!r}")
    return SplineFn(SplineBasis.build(float(d["A"]), int(d["K"]), int(d["M"])), d["coeffs"], transform)


def fitted_to_dict(fm: FittedModel) -> dict:
    sigma = (_spline_to_dict(fm.sigma_sq) if isinstance(fm.sigma_sq, SplineFn)
             else {"constant": float(fm.sigma_sq)})
    est = asdict(fm.config)
    est["k_grid"] = list(est["k_grid"])
    return {
        "schema": MODEL_SCHEMA,
        "weights": [float(w) for w in fm.weights],
        "degenerate": fm.degenerate,
        "empty_classes": list(fm.empty_classes),
        "drifts": [_spline_to_dict(f) for f in fm.drifts],
        "sigma_sq": sigma,
        "k_drift": list(fm.k_drift),
        "a_drift": list(fm.a_drift),
        "k_sigma": fm.k_sigma,
        "a_sigma": fm.a_sigma,
        "estimator": est,
    }


def fitted_from_dict(d: dict) -> FittedModel:
    if d.get("schema") != MODEL_SCHEMA:
        raise ModelFormatError(f"expected schema {MODEL_SCHEMA!r}, got {d.get('schema')!r}")
    try:
        sig = d["sigma_sq"]
        sigma_sq = float(sig["constant"]) if "constant" in sig else _spline_from_dict(sig)
        return FittedModel(
            weights=np.array(d["weights"], dtype=float),
            drifts=tuple(_spline_from_dict(f) for f in d["drifts"]),
            sigma_sq=sigma_sq,
            k_drift=tuple(d["k_drift"]),
            a_drift=tuple(d["a_drift"]),
            k_sigma=d.get("k_sigma"),
            a_sigma=d.get("a_sigma"),
            empty_classes=tuple(d.get("empty_classes", ())),
            degenerate=bool(d.get("degenerate", False)),
            config=EstimatorConfig(**d.get("estimator", {})),
        )
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model file: {exc}") from None


def save_fitted(fm: FittedModel, path: Union[str, Path]) -> None:
    Path(path).write_text(json.dumps(fitted_to_dict(fm), indent=1) + "\n", encoding="utf-8")


def load_fitted(path: Union[str, Path]) -> FittedModel:
    return fitted_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def _a_rule(value: str):
    value = value.strip()
    if value in ("", "default", "none"):
        return None
    try:
        return float(value)
    except ValueError:
        return value


def estimator_from_section(section) -> EstimatorConfig:
    """Build an :class:`EstimatorConfig` from a mapping of INI strings."""
    known = {f.name for f in fields(EstimatorConfig)}
    unknown = set(section) - known
    if unknown:
        raise ValueError(f"unknown estimator keys: {sorted(unknown)}")
    kw = {}
    for key, raw in section.items():
        if key == "k_grid":
            kw[key] = tuple(int(v) for v in raw.replace(",", " ").split())
        elif key in ("degree",):
            kw[key] = int(raw)
        elif key in ("kappa_drift", "kappa_sigma", "beta", "known_sigma_sq"):
            kw[key] = float(raw)
        elif key == "a_rule":
            kw[key] = _a_rule(raw)
        else:
            kw[key] = raw.strip()
    return EstimatorConfig(**kw)


_EXPERIMENT_INT_KEYS = ("n_train", "n_test", "n", "reps", "seed", "refinement")


def _parser(path: Union[str, Path]) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    with open(path, encoding="utf-8") as fh:
        cp.read_file(fh)
    extra = set(cp.sections()) - {"experiment", "estimator"}
    if extra:
        raise ValueError(f"unknown config sections: {sorted(extra)}")
    return cp


def load_estimator_config(path: Union[str, Path]) -> EstimatorConfig:
    cp = _parser(path)
    return estimator_from_section(dict(cp["estimator"])) if cp.has_section("estimator") else EstimatorConfig()


def load_config(path: Union[str, Path]) -> ExperimentSpec:
    cp = _parser(path)
    if not cp.has_section("experiment"):
        raise ValueError("config needs an [experiment] section")
    exp = dict(cp["experiment"])
    unknown = set(exp) - set(_EXPERIMENT_INT_KEYS) - {"model", "outputs"}
    if unknown:
        raise ValueError(f"unknown experiment keys: {sorted(unknown)}")
    if "model" not in exp:
        raise ValueError("[experiment] needs a model")
    kw = {k: int(exp[k]) for k in _EXPERIMENT_INT_KEYS if k in exp}
    kw.setdefault("n_train", 1000)
    kw.setdefault("n_test", 1000)
    kw.setdefault("n", 100)
    est = estimator_from_section(dict(cp["estimator"])) if cp.has_section("estimator") else EstimatorConfig()
    outputs = os.environ.get(OUTPUT_ENV) or exp.get("outputs")
    return ExperimentSpec(model=exp["model"].strip(), estimator=est, outputs=outputs, **kw)

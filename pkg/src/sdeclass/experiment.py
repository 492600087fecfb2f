"""Monte-Carlo risk experiments and the table sweeps.

Each repetition draws a fresh training set and test set, fits the plug-in
classifier and scores it (and the Bayes classifier) on the same test set.
Seeds are derived with :class:`numpy.random.SeedSequence` from the base seed
and the repetition index, so results do not depend on execution order.
"""

from __future__ import annotations

import io
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from .classify import BayesClassifier, PlugInClassifier, empirical_risk
from .estimate import EstimatorConfig, fit_all
from .models import DiffusionModel, ModelId, make_model
from .simulate import sample_dataset

__all__ = [
    "ExperimentSpec",
    "RiskRow",
    "RepFailure",
    "RiskReport",
    "derive_seed",
    "run_experiment",
    "TABLES",
    "table_specs",
    "reproduce",
]

CLASSIFIERS = ("plugin", "bayes")


def derive_seed(*keys: int) -> int:
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1, np.uint64)[0])


@dataclass(frozen=True)
class ExperimentSpec:
    model: Union[str, ModelId, DiffusionModel]
    n_train: int
    n_test: int
    n: int
    reps: int = 20
    seed: int = 0
    estimator: EstimatorConfig = field(default_factory=EstimatorConfig)
    refinement: int = 10
    classifiers: Tuple[str, ...] = CLASSIFIERS
    label: str = "plugin"
    outputs: Optional[str] = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be at least 1")
        if self.n_test < 1:
            raise ValueError("n_test must be at least 1")
        if self.n < 1 or self.refinement < 1:
            raise ValueError("n and refinement must be at least 1")
        if not set(self.classifiers) <= set(CLASSIFIERS) or not self.classifiers:
            raise ValueError(f"classifiers must be drawn from {CLASSIFIERS}")
        if "plugin" in self.classifiers and self.n_train < 1:
            raise ValueError("the plug-in classifier needs training paths")

    def diffusion_model(self) -> DiffusionModel:
        if isinstance(self.model, DiffusionModel):
            return self.model
        return make_model(self.model)

    @property
    def param(self) -> Tuple[str, float]:
        mid = self.diffusion_model().model_id
        if mid is None:
            return "param", float("nan")
        return mid.param_name, mid.param


@dataclass(frozen=True)
class RiskRow:
    param_name: str
    param: float
    N: int
    n: int
    classifier: str
    risks: Tuple[float, ...]
    runtime: float = 0.0

    @property
    def reps(self) -> int:
        return len(self.risks)

    @property
    def mean_risk(self) -> float:
        return float(np.mean(self.risks))

    @property
    def std_risk(self) -> float:
        return float(np.std(self.risks, ddof=1)) if len(self.risks) > 1 else 0.0


@dataclass(frozen=True)
class RepFailure:
    param_name: str
    param: float
    N: int
    n: int
    classifier: str
    rep: int
    error: str


@dataclass
class RiskReport:
    rows: List[RiskRow] = field(default_factory=list)
    failures: List[RepFailure] = field(default_factory=list)

    def extend(self, other: "RiskReport") -> None:
        self.rows.extend(other.rows)
        self.failures.extend(other.failures)

    def find(self, classifier: str, **where) -> List[RiskRow]:
        out = []
        for r in self.rows:
            if r.classifier != classifier:
                continue
            if all(getattr(r, k) == v for k, v in where.items()):
                out.append(r)
        return out

    def to_csv(self) -> str:
        """Plain CSV; the first column is named after the model parameter."""
        buf = io.StringIO()
        name = self.rows[0].param_name if self.rows else (
            self.failures[0].param_name if self.failures else "param")
        buf.write(f"{name},N,n,classifier,mean_risk,std_risk,reps\n")
        for r in self.rows:
            buf.write(f"{r.param!r},{r.N},{r.n},{r.classifier},{r.mean_risk!r},{r.std_risk!r},{r.reps}\n")
        counts: Dict[tuple, int] = {}
        for f in self.failures:
            key = (f.param, f.N, f.n, f.classifier)
            counts[key] = counts.get(key, 0) + 1
        for (param, N, n, clf), c in counts.items():
            buf.write(f"{param!r},{N},{n},failed:{clf},,,{c}\n")
        return buf.getvalue()

    def write_csv(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_csv(), encoding="utf-8")


def _run_rep(spec: ExperimentSpec, rep: int) -> Dict[str, Union[float, str]]:
    """Risks of each requested classifier for one repetition; errors become strings."""
    model = spec.diffusion_model()
    try:
        test = sample_dataset(model, spec.n_test, spec.n, spec.refinement, derive_seed(spec.seed, rep, 1))
    except Exception as exc:  # noqa: BLE001 - recorded as a failure row
        return {c: _describe(exc) for c in spec.classifiers}
    out: Dict[str, Union[float, str]] = {}
    if "bayes" in spec.classifiers:
        try:
            out["bayes"] = empirical_risk(BayesClassifier(model), test)
        except Exception as exc:  # noqa: BLE001
            out["bayes"] = _describe(exc)
    if "plugin" in spec.classifiers:
        try:
            train = sample_dataset(model, spec.n_train, spec.n, spec.refinement, derive_seed(spec.seed, rep, 0))
            fitted = fit_all(train, spec.estimator)
            out["plugin"] = empirical_risk(PlugInClassifier.from_fit(fitted), test)
        except Exception as exc:  # noqa: BLE001
            out["plugin"] = _describe(exc)
    return out


def _describe(exc: BaseException) -> str:
    return "".join(traceback.format_exception_only(type(exc), exc)).strip()


def _rep_task(args):
    spec, rep = args
    t0 = time.perf_counter()
    res = _run_rep(spec, rep)
    return res, time.perf_counter() - t0


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> RiskReport:
    """Repeat simulate / fit / score ``spec.reps`` times and aggregate per classifier."""
    tasks = [(spec, r) for r in range(spec.reps)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_rep_task, tasks))
    else:
        results = [_rep_task(t) for t in tasks]
    pname, param = spec.param
    report = RiskReport()
    runtime = sum(dt for _, dt in results)
    for clf in spec.classifiers:
        risks = []
        for rep, (res, _) in enumerate(results):
            v = res[clf]
            if isinstance(v, str):
                report.failures.append(RepFailure(pname, param, _N(spec, clf), spec.n,
                                                  _name(spec, clf), rep, v))
            else:
                risks.append(float(v))
        if risks:
            report.rows.append(RiskRow(pname, param, _N(spec, clf), spec.n, _name(spec, clf),
                                       tuple(risks), runtime))
    return report


def _N(spec: ExperimentSpec, clf: str) -> int:
    return spec.n_test if clf == "bayes" and "plugin" not in spec.classifiers else spec.n_train


def _name(spec: ExperimentSpec, clf: str) -> str:
    return spec.label if clf == "plugin" else "bayes"


# table id -> scale -> settings
TABLES: Dict[str, Dict[str, dict]] = {
    "bayes_t2": {
        "desk": dict(params=(0.5, 1.5, 2.5, 4.0), N=(2000,), n=(200,), reps=20),
        "full": dict(params=(0.5, 1.5, 2.5, 4.0), N=(4000,), n=(500,), reps=100),
    },
    "plugin_t3": {
        "desk": dict(params=(0.5, 1.5, 2.5, 4.0), N=(100, 1000), n=(100,), reps=20, n_test=1000),
        "full": dict(params=(0.5, 1.5, 2.5, 4.0), N=(100, 1000), n=(100, 500), reps=100, n_test=1000),
    },
    "ou_t4": {
        "desk": dict(params=(0.5, 1.0, 1.5), N=(100,), n=(100,), reps=20, n_test=1000),
        "full": dict(params=(0.5, 1.0, 1.5), N=(100,), n=(100,), reps=100, n_test=1000),
    },
    "ou_known_sigma_t5": {
        "desk": dict(params=(1.0,), N=(100, 1000), n=(100,), reps=20, n_test=1000),
        "full": dict(params=(1.0,), N=(100, 1000), n=(100,), reps=100, n_test=1000),
    },
}


def table_specs(table: str, scale: str = "desk", seed: int = 0) -> List[ExperimentSpec]:
    if table not in TABLES:
        raise ValueError(f"unknown table {table!r}; choose from {sorted(TABLES)}")
    if scale not in ("desk", "full"):
        raise ValueError("scale must be 'desk' or 'full'")
    s = TABLES[table][scale]
    family = "cosine" if table in ("bayes_t2", "plugin_t3") else "ou"
    specs = []
    for pi, param in enumerate(s["params"]):
        model = ModelId(family, param)
        for N in s["N"]:
            for n in s["n"]:
                cfg_seed = derive_seed(seed, pi, N, n)
                if table == "bayes_t2":
                    specs.append(ExperimentSpec(model, 0, N, n, s["reps"], cfg_seed,
                                                classifiers=("bayes",)))
                elif table == "ou_known_sigma_t5":
                    for rule in ("sqrt_log_n", "log_n"):
                        est = EstimatorConfig(mode="known_sigma", a_rule=rule,
                                              known_sigma_sq=param ** 2)
                        specs.append(ExperimentSpec(model, N, s["n_test"], n, s["reps"], cfg_seed,
                                                    estimator=est, classifiers=("plugin",),
                                                    label=f"plugin[A={rule}]"))
                else:
                    specs.append(ExperimentSpec(model, N, s["n_test"], n, s["reps"], cfg_seed))
    return specs


def reproduce(
    table: str,
    scale: str = "desk",
    seed: int = 0,
    out: Optional[Union[str, Path]] = None,
    workers: int = 1,
) -> RiskReport:
    """Run one of the table sweeps; writes the CSV report when ``out`` is given."""
    report = RiskReport()
    for spec in table_specs(table, scale, seed):
        report.extend(run_experiment(spec, workers))
    if out is not None:
        report.write_csv(out)
    return report

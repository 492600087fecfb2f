import math
from collections import Counter

import numpy as np
import pytest

from sdeclass.estimate import (
    EmptyClassWarning,
    EstimatorConfig,
    drift_contrasts,
    estimate_weights,
    fit_all,
    fit_drift_class,
    fit_sigma_sq,
    interval_half_width,
    select_dimension_drift,
    select_dimension_sigma,
    sigma_contrasts,
    theory_dimension,
)
from sdeclass.models import DiffusionModel, make_cosine_model, make_ou_model
from sdeclass.regress import empirical_norm_sq
from sdeclass.simulate import PathDataset, sample_dataset
from sdeclass.spline import Clamp, Threshold


@pytest.fixture(scope="module")
def cosine4():
    return sample_dataset(make_cosine_model(4.0), 1000, 100, 10, seed=21)


@pytest.fixture(scope="module")
def selections():
    m = make_cosine_model(4.0)
    out = {1: Counter(), 2: Counter(), 3: Counter()}
    for s in range(20):
        fit = fit_all(sample_dataset(m, 1000, 100, 10, seed=1000 + s))
        for label, K in enumerate(fit.k_drift, start=1):
            out[label][K] += 1
    return out


@pytest.fixture(scope="module")
def ou1():
    return sample_dataset(make_ou_model(1.0), 300, 100, 10, seed=22)


class TestWeights:
    def test_counting(self):
        ds = PathDataset(1, 3, [1, 1, 2, 3], np.zeros((4, 2)))
        np.testing.assert_allclose(estimate_weights(ds), [0.5, 0.25, 0.25])

    def test_single_class(self):
        ds = PathDataset(1, 3, [2, 2], np.zeros((2, 2)))
        np.testing.assert_array_equal(estimate_weights(ds), [0, 1, 0])

    def test_uniform_model(self):
        ds = sample_dataset(make_ou_model(1.0), 4000, 1, 1, seed=2)
        assert np.all(np.abs(estimate_weights(ds) - 1 / 3) <= 0.025)

    def test_empty(self):
        with pytest.raises(ValueError):
            estimate_weights(PathDataset(1, 3, [], np.zeros((0, 2))))


class TestFitDrift:
    def test_noiseless_linear_drift(self):
        # sigma = 0, one Euler step per observation: Z = 1 - X exactly
        m = make_ou_model(1.0)
        noiseless = DiffusionModel(m.drifts, lambda x: np.zeros_like(x), m.weights, 0.0)
        ds = sample_dataset(noiseless, 30, 50, 1, seed=0)
        A = math.log(ds.N)
        f = fit_drift_class(ds, 1, A, 4, 3)
        x = ds.class_paths(1)[:, :-1].ravel()
        np.testing.assert_allclose(f(x), 1 - x, atol=1e-8)

    def test_beats_zero_predictor(self):
        m = make_cosine_model(1.0)
        ds = sample_dataset(m, 1000, 100, 10, seed=5)
        A = math.log(ds.N)
        cfg = EstimatorConfig()
        K = select_dimension_drift(ds, 1, cfg, A)
        f = fit_drift_class(ds, 1, A, K, 3)
        b1 = lambda x: m.drift(1, x)  # noqa: E731
        err = empirical_norm_sq(ds, lambda x: f(x) - b1(x), label=1)
        assert err < empirical_norm_sq(ds, b1, label=1)

    def test_threshold_contract(self, cosine4):
        A = math.log(cosine4.N)
        probe = np.linspace(-2 * A, 2 * A, 10_000)
        for label in (1, 2, 3):
            f = fit_drift_class(cosine4, label, A, 32, 3)
            assert isinstance(f.transform, Threshold)
            assert f.transform.T == pytest.approx(math.log(1000) ** 1.5)
            assert np.max(np.abs(f(probe))) <= f.transform.T
            assert np.all(f(probe[np.abs(probe) > A]) == 0)

    def test_known_sigma_threshold(self, ou1):
        N_i = int(np.sum(ou1.labels == 2))
        A = math.sqrt(math.log(N_i))
        f = fit_drift_class(ou1, 2, A, 4, 3, mode="known_sigma")
        assert f.transform.T == pytest.approx(A * math.sqrt(math.log(N_i)))
        assert np.max(np.abs(f(np.linspace(-5, 5, 10_000)))) <= f.transform.T

    def test_empty_class(self):
        ds = PathDataset(2, 3, [1, 1, 2], np.zeros((3, 3)))
        with pytest.warns(EmptyClassWarning):
            f = fit_drift_class(ds, 3, 1.0, 2, 3)
        assert np.all(f.coeffs == 0)

    def test_too_few_paths(self):
        ds = PathDataset(2, 3, [1, 2], np.zeros((2, 3)))
        with pytest.raises(ValueError):
            fit_drift_class(ds, 1, 1.0, 2, 3)


class TestFitSigma:
    def test_constant_diffusion_recovered(self):
        ds = sample_dataset(make_ou_model(1.0), 1000, 500, 10, seed=17)
        A = math.log(ds.N)
        f = fit_sigma_sq(ds, A, select_dimension_sigma(ds, EstimatorConfig(), A), 3)
        assert 0.9 <= np.mean(f(np.linspace(-1, 1, 201))) <= 1.1

    def test_clamp_contract(self, ou1):
        A = math.log(ou1.N)
        f = fit_sigma_sq(ou1, A, 16, 3)
        assert f.transform == Clamp(1 / math.log(300), math.log(300) ** 1.5)
        probe = np.linspace(-3 * A, 3 * A, 10_000)
        v = f(probe)
        assert np.all((v >= f.transform.lo) & (v <= f.transform.hi))
        np.testing.assert_allclose(f(np.array([A + 0.1, -A - 5])), 1 / math.log(300))


class TestSelection:
    def test_single_element_grid(self, ou1):
        cfg = EstimatorConfig(k_grid=(8,))
        assert select_dimension_drift(ou1, 1, cfg) == 8
        assert select_dimension_sigma(ou1, cfg) == 8

    def test_pure_noise_large_penalty(self):
        zero = lambda x: np.zeros_like(x)  # noqa: E731
        m = DiffusionModel((zero, zero), lambda x: np.ones_like(x), [0.5, 0.5], 1.0)
        ds = sample_dataset(m, 200, 50, 2, seed=3)
        cfg = EstimatorConfig(k_grid=(16, 2, 4, 8), kappa_drift=50.0, kappa_sigma=1e4)
        assert select_dimension_drift(ds, 1, cfg) == 2
        assert select_dimension_sigma(ds, cfg) == 2

    def test_contrast_minimal_at_selection(self, cosine4):
        cfg = EstimatorConfig()
        A = math.log(cosine4.N)
        for label in (1, 2, 3):
            c = drift_contrasts(cosine4, label, cfg, A)
            K = select_dimension_drift(cosine4, label, cfg, A)
            assert all(c[K][0] <= v for v, _ in c.values())
        c = sigma_contrasts(cosine4, cfg, A)
        K = select_dimension_sigma(cosine4, cfg, A)
        assert all(c[K][0] <= v for v, _ in c.values())

    def test_ties_go_to_smaller_k(self, cosine4, monkeypatch):
        import sdeclass.estimate as est

        flat = {K: (1.0, None) for K in (1, 2, 4)}
        monkeypatch.setattr(est, "drift_contrasts", lambda *a, **k: flat)
        assert est.select_dimension_drift(cosine4, 1, EstimatorConfig(k_grid=(4, 2, 1))) == 1

    def test_no_pile_up_at_one_for_separated_classes(self, selections):
        assert selections[2][1] == 0 and selections[3][1] == 0

    @pytest.mark.xfail(strict=True, reason="with kappa=0.1 the penalty favours K in {1, 2} for the flat class-1 drift")
    def test_selected_dimension_range(self, selections):
        for label in (1, 2, 3):
            assert set(selections[label]) <= {4, 8, 16, 32}


class TestFitAll:
    def test_general(self, cosine4):
        fit = fit_all(cosine4)
        assert fit.weights.sum() == pytest.approx(1.0)
        assert fit.a_drift == (math.log(1000),) * 3
        assert set(fit.k_drift) <= set(EstimatorConfig().k_grid)
        assert fit.k_sigma in EstimatorConfig().k_grid
        probe = np.linspace(-10, 10, 10_000)
        for f in fit.drifts:
            assert np.max(np.abs(f(probe))) <= math.log(1000) ** 1.5
        s = fit.sigma_sq_at(probe)
        assert np.all((s >= 1 / math.log(1000)) & (s <= math.log(1000) ** 1.5))
        assert not fit.degenerate and fit.empty_classes == ()

    def test_absent_class(self):
        ds = sample_dataset(make_cosine_model(2.5, weights=[0.5, 0.5, 0.0]), 60, 20, 2, seed=0)
        with pytest.warns(EmptyClassWarning):
            fit = fit_all(ds)
        assert fit.empty_classes == (3,)
        assert np.all(fit.drifts[2].coeffs == 0)
        assert fit.weights[2] == 0

    def test_known_sigma(self, ou1):
        cfg = EstimatorConfig(mode="known_sigma")
        fit = fit_all(ou1, cfg)
        assert fit.sigma_sq == 1.0 and fit.k_sigma is None
        counts = ou1.class_counts()
        for A, N_i in zip(fit.a_drift, counts):
            assert A == pytest.approx(math.sqrt(math.log(N_i)))

    def test_known_sigma_degenerate(self):
        ds = sample_dataset(make_ou_model(1.0, weights=[0.5, 0.5, 0.0]), 20, 20, 2, seed=1)
        with pytest.warns(EmptyClassWarning):
            fit = fit_all(ds, EstimatorConfig(mode="known_sigma"))
        assert fit.degenerate

    def test_theory_dimension_rule(self, ou1):
        fit = fit_all(ou1, EstimatorConfig(k_rule="theory", k_grid=(64,)))
        assert fit.k_drift == tuple(theory_dimension(int(c), 1.0) for c in ou1.class_counts())

    def test_radius_forms(self, ou1):
        N = ou1.N
        for form, power in (("sum_sq", 1), ("norm", 2)):
            fit = fit_all(ou1, EstimatorConfig(radius_form=form))
            for f, K in zip(fit.drifts, fit.k_drift):
                R = (K + 3) * math.log(N) ** 3
                assert f.coeffs @ f.coeffs <= R ** power * (1 + 1e-9)

    def test_too_small(self):
        ds = PathDataset(2, 3, [1, 2], np.zeros((2, 3)))
        with pytest.raises(ValueError):
            fit_all(ds)


def test_interval_rules():
    assert interval_half_width(EstimatorConfig(), 1000) == pytest.approx(math.log(1000))
    assert interval_half_width(EstimatorConfig(a_rule="sqrt_log_n"), 1000) == pytest.approx(math.sqrt(math.log(1000)))
    assert interval_half_width(EstimatorConfig(a_rule=2.5), 1000) == 2.5
    cfg = EstimatorConfig(mode="known_sigma", beta=2.0)
    assert interval_half_width(cfg, 1000, 300) == pytest.approx(math.sqrt(6 / 5 * math.log(300)))


@pytest.mark.parametrize(
    "kw",
    [dict(mode="other"), dict(k_grid=()), dict(k_grid=(0, 2)), dict(kappa_drift=0.0),
     dict(a_rule="log"), dict(a_rule=-1.0), dict(radius_form="l1"), dict(contrast_normalization="x")],
)
def test_config_validation(kw):
    with pytest.raises(ValueError):
        EstimatorConfig(**kw)

import itertools

import numpy as np
import pytest

from sdeclass.models import (
    THETA_GRID,
    DiffusionModel,
    ModelId,
    eval_drift,
    eval_sigma,
    make_cosine_model,
    make_model,
    make_ou_model,
    parse_model_id,
)

GRID = np.linspace(-10, 10, 1000)


def test_cosine_values_at_zero():
    m = make_cosine_model(1.0)
    assert [eval_drift(m, c, 0.0) for c in (1, 2, 3)] == [1.0, 1.0, -1.0]
    assert eval_sigma(m, 0.0) == 1.0


def test_cosine_class2_half_theta():
    assert eval_drift(make_cosine_model(0.5), 2, 0.0) == pytest.approx(0.5)


def test_cosine_class1_at_half_pi():
    assert eval_drift(make_cosine_model(2.5), 1, np.pi / 2) == pytest.approx(0.25)


@pytest.mark.parametrize("theta", [0.5, 1.5, 2.5, 4.0])
def test_min_pairwise_sup_distance(theta):
    # sup b1 = 1, so the pairwise gaps are |theta-1|, 1+theta and 2 theta
    m = make_cosine_model(theta)
    x = np.linspace(-np.pi, np.pi, 20001)
    gaps = [np.max(np.abs(m.drift(i, x) - m.drift(j, x))) for i, j in itertools.combinations((1, 2, 3), 2)]
    assert min(gaps) == pytest.approx(min(abs(theta - 1), 1 + theta, 2 * theta), abs=1e-9)


@pytest.mark.parametrize("theta", THETA_GRID)
def test_cosine_structure(theta):
    m = make_cosine_model(theta)
    b1, b2, b3 = (m.drift(c, GRID) for c in (1, 2, 3))
    np.testing.assert_allclose(b2, theta * b1)
    np.testing.assert_allclose(b3, -b2)
    s = m.sigma(GRID)
    assert np.all((s > 0.1) & (s <= 1.0))
    lip = np.max(np.abs(np.diff(s)) / np.diff(GRID))
    assert lip <= 1.0


def test_theta_grid():
    assert len(THETA_GRID) == 14
    assert 1.5 in THETA_GRID and 2.5 in THETA_GRID and 4.0 in THETA_GRID


def test_ou_values():
    m = make_ou_model(1.0)
    assert [eval_drift(m, c, 2.0) for c in (1, 2, 3)] == [-1.0, -3.0, -2.0]
    assert eval_drift(m, 3, 0.0) == 0.0
    np.testing.assert_array_equal(eval_sigma(m, GRID), 1.0)
    assert eval_sigma(make_ou_model(0.5), 3.0) == 0.5


@pytest.mark.parametrize("factory", [make_cosine_model, make_ou_model])
def test_weights_probability_vector(factory):
    m = factory(1.0)
    assert m.k_classes == 3
    assert m.weights.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(m.weights > 0)


def test_custom_weights_and_validation():
    m = make_cosine_model(1.0, weights=[1.0, 0.0, 0.0])
    assert m.weights[0] == 1.0
    with pytest.raises(ValueError):
        make_cosine_model(1.0, weights=[0.5, 0.2, 0.2])
    with pytest.raises(ValueError):
        make_cosine_model(1.0, weights=[1.2, -0.2, 0.0])


@pytest.mark.parametrize("bad", [0.0, -1.0])
def test_nonpositive_parameters(bad):
    with pytest.raises(ValueError):
        make_cosine_model(bad)
    with pytest.raises(ValueError):
        make_ou_model(bad)


def test_class_out_of_range():
    m = make_ou_model(1.0)
    for c in (0, 4):
        with pytest.raises(ValueError):
            eval_drift(m, c, 0.0)


@pytest.mark.parametrize(
    "text,expected",
    [("cosine:4", ModelId("cosine", 4.0)), ("ou:0.5", ModelId("ou", 0.5)),
     ("cosine:3/2", ModelId("cosine", 1.5)), (" ou:1e0 ", ModelId("ou", 1.0))],
)
def test_parse_model_id(text, expected):
    assert parse_model_id(text) == expected
    assert parse_model_id(str(expected)) == expected


@pytest.mark.parametrize("text", ["cosine", "heston:1", "ou:-1", "ou:0", "cosine:abc", "ou:1:2"])
def test_parse_model_id_rejects(text):
    with pytest.raises(ValueError):
        parse_model_id(text)


def test_make_model_records_id():
    m = make_model("ou:1.5")
    assert m.model_id == ModelId("ou", 1.5)
    assert m.model_id.param_name == "sigma"
    assert make_model(ModelId("cosine", 2.5)).model_id.param_name == "theta"


def test_diffusion_model_needs_two_classes():
    with pytest.raises(ValueError):
        DiffusionModel((lambda x: x,), lambda x: 1.0, [1.0], 1.0)

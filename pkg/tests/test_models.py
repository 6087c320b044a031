import math

import numpy as np
import pytest

from cosymcr.accs.report import Sample
from cosymcr.errors import ModelSpecError
from cosymcr.expr.evaluation import evaluate
from cosymcr.models.registry import (
    CONTROL_CONTACT,
    CONTROL_TWISTED,
    FLAT,
    HYPERBOLIC,
    LINEAR,
    MODEL_FRAME,
    MODEL_GLOBAL_CR,
    TRIGONOMETRIC,
    ModelSpec,
    build_model,
    check_commutators,
    check_limit_at_two,
    display_formula_r,
    frame_component_values,
    limit_convergence,
    list_models,
    model_cr_data,
    model_frame,
    model_kmn,
)


def test_registry_lists_every_model():
    names = [model["name"] for model in list_models()]
    assert names == [FLAT, MODEL_FRAME, MODEL_GLOBAL_CR, CONTROL_TWISTED, CONTROL_CONTACT]
    assert all(model["description"] for model in list_models())


def test_invalid_specs():
    with pytest.raises(ModelSpecError):
        ModelSpec("sphere")
    with pytest.raises(ModelSpecError):
        ModelSpec(CONTROL_TWISTED, 1)
    with pytest.raises(ModelSpecError):
        ModelSpec(CONTROL_CONTACT, 2)
    with pytest.raises(ModelSpecError):
        ModelSpec(MODEL_FRAME, 0)
    with pytest.raises(ModelSpecError):
        model_frame(ModelSpec(FLAT))
    with pytest.raises(ModelSpecError):
        model_cr_data(ModelSpec(MODEL_FRAME, 1, 1.0))


@pytest.mark.parametrize(
    "mu, case", [(0.0, HYPERBOLIC), (1.99, HYPERBOLIC), (2.0, LINEAR), (-2.0, LINEAR), (2.01, TRIGONOMETRIC), (-5.0, TRIGONOMETRIC)]
)
def test_frame_case_routing(mu, case):
    spec = ModelSpec(MODEL_FRAME, 1, mu)
    assert spec.frame_case == case
    if case == LINEAR:
        assert spec.omega is None
        assert spec.params == {"mu": mu}
    else:
        assert spec.params["w"] == pytest.approx(math.sqrt(abs(1 - mu ** 2 / 4)))


def test_spec_parameters_and_labels():
    assert ModelSpec(FLAT, 2).params == {}
    assert ModelSpec(MODEL_GLOBAL_CR, 1, 0.5).params == {"mu": 0.5}
    assert ModelSpec(MODEL_FRAME, 1, 1.0).label == "model-frame(n=1, mu=1)"
    assert ModelSpec(FLAT, 3).chart().dimension == 7
    assert model_kmn(ModelSpec(MODEL_FRAME, 1, 3.0)) == (-1.0, 3.0, 0.0)
    assert model_kmn(ModelSpec(FLAT)) == (0.0, 0.0, 0.0)
    assert model_kmn(ModelSpec(CONTROL_CONTACT)) is None


@pytest.mark.parametrize("name, n, mu", [(MODEL_FRAME, 1, 0.0), (MODEL_FRAME, 2, 1.0), (MODEL_FRAME, 1, 2.0), (MODEL_FRAME, 1, -3.0), (MODEL_GLOBAL_CR, 1, 1.5)])
def test_frame_commutators(name, n, mu):
    spec = ModelSpec(name, n, mu)
    report = check_commutators(spec, Sample.draw(spec.chart(), 10, seed=6))
    assert report.passed, report.families


def test_frames_start_at_the_identity():
    values = frame_component_values(ModelSpec(MODEL_FRAME, 1, 1.0), [0.0])
    np.testing.assert_allclose(values[0], [1.0, 0.0, 0.0, 1.0], atol=1e-15)


def test_frames_are_unimodular():
    t_values = np.linspace(-0.8, 0.8, 9)
    for mu in (0.5, 2.0, 3.5):
        xx, yx, xy, yy = frame_component_values(ModelSpec(MODEL_FRAME, 1, mu), t_values).T
        np.testing.assert_allclose(xx * yy - xy * yx, 1.0, atol=1e-12)


def test_limit_at_two():
    report = check_limit_at_two(1, 1e-6)
    assert report.passed
    assert report.max_residual <= 1e-4
    assert set(report.families) == {"plus_from_below", "plus_from_above", "minus_from_below", "minus_from_above"}
    assert report.notes == {"delta": 1e-6}


def test_limit_converges_monotonically():
    deviations, decreasing = limit_convergence(1)
    assert decreasing
    assert deviations[1e-6] < deviations[1e-2]


def test_r_display_factor_differs_from_the_frame_metric():
    spec = ModelSpec(MODEL_GLOBAL_CR, 1, 0.0)
    point = [0.0, 1.0, 0.0]
    # at z = 1: the display formula gives 3, the frame metric 1 + |a|² = 2
    assert evaluate(display_formula_r(spec), point, spec.params) == pytest.approx(3.0)
    structure = build_model(spec)
    assert evaluate(structure.g[0, 0], point, spec.params) == pytest.approx(2.0)
    assert evaluate(model_cr_data(spec).r, point, spec.params) == pytest.approx(2.0)


def test_built_models_carry_their_parameters(model_mu1, twisted, contact):
    assert model_mu1.params == {"mu": 1.0, "w": pytest.approx(math.sqrt(0.75))}
    assert twisted.chart.dimension == 5
    assert contact.params == {}

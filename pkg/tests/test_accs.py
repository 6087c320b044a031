import numpy as np
import pytest

from cosymcr.accs.checks import (
    check_acm_axioms,
    check_almost_cosymplectic,
    check_cosymplectic,
    check_cosymplectic_equivalences,
    check_goldberg_yano,
    check_kahler_leaves,
    check_normal,
)
from cosymcr.accs.report import Sample, per_point_max, residual_report
from cosymcr.errors import UnsupportedDimensionError
from cosymcr.expr.expression import exp, mul
from cosymcr.fields.tensors import VectorField
from cosymcr.models.registry import FLAT, MODEL_FRAME, MODEL_GLOBAL_CR, ModelSpec, build_model


def _sample(structure, count=12, seed=5):
    return Sample.draw(structure.chart, count, seed)


def test_axioms_hold_on_every_registered_structure(flat, model_mu0, model_mu1, contact, twisted):
    for structure in (flat, model_mu0, model_mu1, contact, twisted):
        report = check_acm_axioms(structure, _sample(structure))
        assert report.passed, (structure.name, report.families)
    print("✅ Almost contact metric axioms hold!")


def test_almost_cosymplectic(flat, model_mu1, twisted, contact):
    for structure in (flat, model_mu1, twisted):
        assert check_almost_cosymplectic(structure, _sample(structure)).passed
    report = check_almost_cosymplectic(contact, _sample(contact))
    assert not report.passed
    assert not report.families["d_eta"]["passed"]
    assert report.families["d_eta"]["max_residual"] == pytest.approx(0.5)


def test_kahler_leaves(flat, model_mu0, model_mu1, twisted):
    for structure in (flat, model_mu0, model_mu1):
        assert check_kahler_leaves(structure, _sample(structure)).passed
    report = check_kahler_leaves(twisted, _sample(twisted, count=6))
    assert not report.passed
    assert report.max_residual > 1e-3


def test_flat_is_cosymplectic(flat):
    report = check_cosymplectic(flat, _sample(flat))
    assert report.passed
    assert report.notes["verdicts_agree"]
    assert check_normal(flat, _sample(flat)).passed
    assert check_goldberg_yano(flat, _sample(flat)).passed


def test_model_spaces_fail_every_cosymplectic_characterisation(model_mu0, model_mu1):
    for structure in (model_mu0, model_mu1):
        report = check_cosymplectic(structure, _sample(structure))
        assert not report.passed
        for family in ("normality", "nabla_phi", "goldberg_yano"):
            assert report.families[family]["max_residual"] >= 1e-3
        assert report.notes["verdicts"] == {"normality": False, "nabla_phi": False, "goldberg_yano": False}


def test_cosymplectic_equivalences_agree(flat, model_mu1):
    for structure in (flat, model_mu1):
        report = check_cosymplectic_equivalences(structure, _sample(structure))
        assert report.passed
        assert report.name == "cosymplectic_equivalences"
    assert not check_cosymplectic_equivalences(model_mu1, _sample(model_mu1)).notes["cosymplectic"]


def test_golden_tensors_of_the_model(model_mu0, sample3):
    chart = model_mu0.chart
    t = chart.var(0)
    points = sample3.points
    A = model_mu0.tensor_A.evaluate(points, model_mu0.params)
    # A∂x = ∂x and A∂y = −∂y
    np.testing.assert_allclose(A[:, :, 1], np.tile([0, 1, 0], (len(points), 1)), atol=1e-12)
    np.testing.assert_allclose(A[:, :, 2], np.tile([0, 0, -1], (len(points), 1)), atol=1e-12)
    X = VectorField(chart, [0, exp(t), 0])
    Y = VectorField(chart, [0, 0, exp(mul(-1, t))])
    hX = model_mu0.tensor_h.apply(X).evaluate(points, model_mu0.params)
    np.testing.assert_allclose(hX, -Y.evaluate(points), atol=1e-12)


def test_h_and_A_anticommute_with_phi(model_mu1, sample3):
    points = sample3.points
    phi = model_mu1.phi.evaluate(points, model_mu1.params)
    for tensor in (model_mu1.tensor_h, model_mu1.tensor_A):
        value = tensor.evaluate(points, model_mu1.params)
        np.testing.assert_allclose(phi @ value + value @ phi, 0, atol=1e-10)


def test_fundamental_form_of_the_flat_structure(flat):
    Phi = flat.fundamental_form
    assert Phi.component(1, 2).value == 1


def test_nijenhuis_torsion_of_the_twisted_control(twisted):
    chart = twisted.chart
    torsion = twisted.nijenhuis()(VectorField.coordinate(chart, 1), VectorField.coordinate(chart, 2))
    values = torsion.evaluate(chart.sample(4, seed=1))
    np.testing.assert_allclose(values[:, 2], 2, atol=1e-12)


def test_residual_report_statistics():
    residuals = {"a": np.array([[0.1, -0.3], [0.0, 0.2]]), "b": np.array([0.05, np.nan])}
    report = residual_report("demo", residuals, tolerance=0.25, seed=3)
    assert not report.passed
    assert report.families["a"]["max_residual"] == pytest.approx(0.3)
    assert report.families["b"]["max_residual"] == "inf"
    assert report.to_dict()["max_residual"] == "inf"
    assert report.points == 2
    np.testing.assert_allclose(per_point_max(residuals["a"]), [0.3, 0.2])
    assert "❌ demo" in report.summary_line()


@pytest.mark.parametrize("spec", [ModelSpec(MODEL_FRAME, 2, 0.0), ModelSpec(MODEL_FRAME, 2, 3.0), ModelSpec(MODEL_GLOBAL_CR, 2, 1.0)])
def test_models_in_two_complex_dimensions(spec):
    structure = build_model(spec)
    sample = _sample(structure, count=6)
    for check in (check_acm_axioms, check_almost_cosymplectic, check_kahler_leaves):
        report = check(structure, sample)
        assert report.passed, (check.__name__, report.families)
    assert not check_cosymplectic(structure, sample).passed


def test_numeric_only_flat_structure():
    structure = build_model(ModelSpec(FLAT, 4))
    assert structure.numeric_only and structure.mode == "numeric-only"
    sample = _sample(structure, count=4)
    for check in (check_acm_axioms, check_almost_cosymplectic, check_kahler_leaves, check_cosymplectic):
        assert check(structure, sample).passed
    assert check_kahler_leaves(structure, sample).notes["mode"] == "numeric-only"
    assert check_cosymplectic(structure, sample).notes["verdicts_agree"]
    assert np.all(structure.gamma_values(sample.points) == 0)
    with pytest.raises(UnsupportedDimensionError, match="dimension 9"):
        structure.curvature


def test_numeric_only_model_space_has_kahler_leaves():
    structure = build_model(ModelSpec(MODEL_FRAME, 4, 1.0))
    sample = _sample(structure, count=3)
    report = check_kahler_leaves(structure, sample)
    assert report.passed, report.families
    assert report.notes == {"mode": "numeric-only"}
    assert not check_cosymplectic(structure, sample).passed

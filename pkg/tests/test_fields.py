import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cosymcr.errors import ChartMismatchError, NotPositiveDefiniteError, UnsupportedDegreeError
from cosymcr.expr.evaluation import evaluate_batch
from cosymcr.expr.expression import ONE, ZERO, Const, add, cos, exp, is_zero, mul, sin
from cosymcr.fields.calculus import (
    complexify_frame,
    differential,
    exterior_derivative,
    lie_bracket,
    lie_derivative_tensor11,
    wedge,
)
from cosymcr.fields.chart import ChartDecl
from cosymcr.fields.tensors import KForm, MetricField, Tensor11, VectorField

chart = ChartDecl(1)
t, x, y = chart.variables
points = chart.sample(25, seed=5)


def test_chart_defaults():
    assert chart.dimension == 3
    assert chart.names == ("t", "x1", "y1")
    assert chart.box == ((-0.8, 0.8),) * 3
    two = ChartDecl(2)
    assert two.x_index(2) == 2 and two.y_index(1) == 3
    with pytest.raises(ChartMismatchError):
        two.x_index(3)


def test_chart_sampling_is_seeded_and_inside_the_box():
    first = chart.sample(100, seed=42)
    np.testing.assert_array_equal(first, chart.sample(100, seed=42))
    assert first.shape == (100, 3)
    assert np.all(np.abs(first) <= 0.8)
    custom = ChartDecl(1, box=((0, 1), (2, 3), (-1, 0)))
    values = custom.sample(30)
    assert np.all((values[:, 1] >= 2) & (values[:, 1] <= 3))


def test_chart_validation():
    with pytest.raises(ChartMismatchError):
        ChartDecl(1, names=("t", "x"))
    with pytest.raises(ValueError):
        ChartDecl(1, names=("t", "x", "x"))
    with pytest.raises(ValueError):
        ChartDecl(0)


def test_vector_field_component_count():
    with pytest.raises(ChartMismatchError):
        VectorField(chart, [ONE, ZERO])


def test_mixing_charts_is_rejected():
    other = ChartDecl(1, names=("t", "u", "v"))
    with pytest.raises(ChartMismatchError):
        VectorField.coordinate(chart, 0) + VectorField.coordinate(other, 0)


def test_bracket_of_coordinate_fields_vanishes():
    d = [VectorField.coordinate(chart, k) for k in range(3)]
    for a in d:
        for b in d:
            assert all(is_zero(c) for c in lie_bracket(a, b).components)


def test_bracket_of_rotation_fields():
    # [x∂y − y∂x, ∂x] = −∂y
    rotation = VectorField(chart, [ZERO, mul(-1, y), x])
    bracket = lie_bracket(rotation, VectorField.coordinate(chart, 1))
    np.testing.assert_allclose(bracket.evaluate(points), np.tile([0, 0, -1], (len(points), 1)))


def _polynomial_fields():
    coefficients = st.lists(st.floats(min_value=-1, max_value=1, allow_nan=False), min_size=9, max_size=9)

    def build(c):
        monomials = [ONE, t, mul(x, y)]
        return VectorField(chart, [add(*[mul(c[3 * k + m], monomials[m]) for m in range(3)]) for k in range(3)])

    return coefficients.map(build)


@given(_polynomial_fields(), _polynomial_fields(), _polynomial_fields())
@settings(max_examples=30, deadline=None)
def test_jacobi_identity(X, Y, Z):
    total = lie_bracket(X, lie_bracket(Y, Z)) + lie_bracket(Y, lie_bracket(Z, X)) + lie_bracket(Z, lie_bracket(X, Y))
    np.testing.assert_allclose(total.evaluate(points), 0, atol=1e-12)


def test_form_storage_is_antisymmetric():
    form = KForm(chart, 2, {(1, 0): x})
    assert form.component(0, 1).arg is x
    assert form.component(1, 1) is ZERO
    values = form.evaluate(points)
    np.testing.assert_allclose(values[:, 0, 1], -points[:, 1])
    np.testing.assert_allclose(values[:, 1, 0], points[:, 1])


def test_form_degree_limits():
    with pytest.raises(UnsupportedDegreeError):
        KForm(chart, 4)
    with pytest.raises(UnsupportedDegreeError):
        exterior_derivative(KForm(chart, 3, {(0, 1, 2): x}))


def test_exterior_derivative_convention():
    # dη(X, Y) = ½(Xη(Y) − Yη(X) − η([X, Y])) for η = dt − y dx
    eta = KForm.one_form(chart, [ONE, mul(-1, y), ZERO])
    d_eta = exterior_derivative(eta)
    X, Y = VectorField.coordinate(chart, 1), VectorField.coordinate(chart, 2)
    value = evaluate_batch(d_eta.apply(X, Y), points)
    np.testing.assert_allclose(value, 0.5)


def test_d_squared_vanishes():
    f = mul(exp(t), sin(mul(x, y)))
    ddf = exterior_derivative(differential(f, chart))
    assert all(np.allclose(evaluate_batch(c, points), 0, atol=1e-12) for c in ddf.components.values())
    alpha = KForm.one_form(chart, [mul(x, y), cos(t), mul(t, x, y)])
    dd_alpha = exterior_derivative(exterior_derivative(alpha))
    np.testing.assert_allclose(dd_alpha.evaluate(points), 0, atol=1e-12)


def test_wedge_convention():
    dt = differential(t, chart)
    dx = differential(x, chart)
    form = wedge(dt, dx)
    T, X = VectorField.coordinate(chart, 0), VectorField.coordinate(chart, 1)
    assert evaluate_batch(form.apply(T, X), points[:1])[0] == 0.5
    assert not wedge(dt, dt).components


def test_tensor_apply_and_compose():
    J = Tensor11(chart, [[ZERO, ZERO, ZERO], [ZERO, ZERO, Const(-1.0)], [ZERO, ONE, ZERO]])
    square = J.compose(J).evaluate(points)
    np.testing.assert_allclose(square[0], np.diag([0, -1, -1]))
    image = J.apply(VectorField.coordinate(chart, 1))
    np.testing.assert_allclose(image.evaluate(points[:1])[0], [0, 0, 1])
    outer = Tensor11.outer(VectorField.coordinate(chart, 0), differential(t, chart))
    np.testing.assert_allclose(outer.evaluate(points[:1])[0], np.diag([1, 0, 0]))


def test_lie_derivative_matches_bracket_formula():
    xi = VectorField(chart, [ONE, mul(-1, x), y])
    T = Tensor11(chart, [[ONE, ZERO, t], [x, ZERO, mul(-1, ONE)], [ZERO, ONE, mul(x, y)]])
    L = lie_derivative_tensor11(xi, T)
    for k in range(3):
        e = VectorField.coordinate(chart, k)
        expected = lie_bracket(xi, T.apply(e)) - T.apply(lie_bracket(xi, e))
        np.testing.assert_allclose(L.apply(e).evaluate(points), expected.evaluate(points), atol=1e-13)


def test_metric_is_symmetrised_and_checked():
    g = MetricField(chart, [[ONE, x, ZERO], [ZERO, ONE, ZERO], [ZERO, ZERO, ONE]])
    assert g[1, 0] is x
    assert g.check_positive_definite(chart.sample(10, seed=2) * 0.5)
    bad = MetricField(chart, [[ONE, ZERO, ZERO], [ZERO, Const(-1.0), ZERO], [ZERO, ZERO, ONE]])
    with pytest.raises(NotPositiveDefiniteError) as info:
        bad.check_positive_definite(points)
    assert info.value.point is not None


def test_complexified_frame():
    frame = complexify_frame(chart)
    assert len(frame) == 3
    Z, Zbar = frame[1], frame[2]
    np.testing.assert_allclose(Z.evaluate(points[:1])[0], [0, 0.5, -0.5j])
    np.testing.assert_allclose(Zbar.evaluate(points[:1])[0], [0, 0.5, 0.5j])


def test_symmetric_product_of_one_forms():
    dt = differential(t, chart)
    dx = differential(x, chart)
    product = MetricField.symmetric_product(dt, dx)
    assert product[0, 1].value == 0.5 and product[1, 0].value == 0.5
    assert is_zero(product[0, 0])
    square = MetricField.symmetric_product(dt, dt)
    assert square[0, 0].value == 1

"""
The model zoo: (−1, μ, 0)-spaces in frame and global CR realizations, the flat
cosymplectic baseline, and negative controls.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from cosymcr.config import BOX_HALF_WIDTH, IDENTITY_TOLERANCE
from cosymcr.accs.report import residual_report
from cosymcr.accs.structure import ChartStructure
from cosymcr.cr.chart_builder import CRChartData
from cosymcr.errors import ModelSpecError
from cosymcr.expr.evaluation import evaluate_array
from cosymcr.expr.expression import I, ONE, ZERO, add, conj, exp, mul, neg, sub
from cosymcr.fields.calculus import lie_bracket
from cosymcr.fields.chart import ChartDecl
from cosymcr.fields.tensors import KForm, MetricField, Tensor11, VectorField
from cosymcr.models.frames import (
    FrameBlock,
    block_frame,
    frame_structure,
    hyperbolic_block,
    linear_block,
    trigonometric_block,
)

logger = logging.getLogger(__name__)

FLAT = "flat"
MODEL_FRAME = "model-frame"
MODEL_GLOBAL_CR = "model-global-cr"
CONTROL_TWISTED = "control-twisted"
CONTROL_CONTACT = "control-contact"

MODELS = {
    FLAT: "Flat cosymplectic structure on ℝ^{2n+1}",
    MODEL_FRAME: "(−1, μ, 0) model space from its left-invariant frame (case chosen by |μ| against 2)",
    MODEL_GLOBAL_CR: "(−1, μ, 0) model space in its global CR realization",
    CONTROL_TWISTED: "Almost cosymplectic control with non-integrable leaf complex structure (n ≥ 2)",
    CONTROL_CONTACT: "Contact-type control η = dt − y dx with non-vanishing Levi form (n = 1)",
}

HYPERBOLIC, LINEAR, TRIGONOMETRIC = "hyperbolic", "linear", "trigonometric"


@dataclass(frozen=True)
class ModelSpec:
    name: str
    n: int = 1
    mu: float = 0.0

    def __post_init__(self):
        if self.name not in MODELS:
            raise ModelSpecError(f"Unknown model '{self.name}'; known models: {', '.join(sorted(MODELS))}")
        if self.n < 1:
            raise ModelSpecError("n must be at least 1")
        if self.name == CONTROL_TWISTED and self.n < 2:
            raise ModelSpecError("The twisted control needs n ≥ 2")
        if self.name == CONTROL_CONTACT and self.n != 1:
            raise ModelSpecError("The contact control is three-dimensional (n = 1)")
        object.__setattr__(self, "mu", float(self.mu))

    @property
    def is_model_space(self):
        return self.name in (MODEL_FRAME, MODEL_GLOBAL_CR)

    @property
    def frame_case(self):
        """hyperbolic for |μ| < 2, linear for |μ| = 2 exactly, trigonometric for |μ| > 2."""
        if abs(self.mu) == 2.0:
            return LINEAR
        return HYPERBOLIC if abs(self.mu) < 2.0 else TRIGONOMETRIC

    @property
    def omega(self):
        if self.frame_case == HYPERBOLIC:
            return math.sqrt(1.0 - self.mu ** 2 / 4.0)
        if self.frame_case == TRIGONOMETRIC:
            return math.sqrt(self.mu ** 2 / 4.0 - 1.0)
        return None

    @property
    def params(self):
        if self.name in (FLAT, CONTROL_TWISTED, CONTROL_CONTACT):
            return {}
        params = {"mu": self.mu}
        if self.name == MODEL_FRAME and self.omega is not None:
            params["w"] = self.omega
        return params

    def chart(self):
        return ChartDecl(self.n, parameters=tuple(self.params))

    @property
    def label(self):
        if self.is_model_space:
            return f"{self.name}(n={self.n}, mu={self.mu:g})"
        return f"{self.name}(n={self.n})"


def list_models():
    return [{"name": name, "description": description} for name, description in MODELS.items()]


def model_frame(spec, chart=None):
    """The frame (ξ, X_i, Y_i) of a model space."""
    if not spec.is_model_space:
        raise ModelSpecError(f"{spec.name} is not a (−1, μ, 0) model space")
    chart = chart or spec.chart()
    t = chart.var(0)
    if spec.name == MODEL_GLOBAL_CR:
        return block_frame(chart, [_unit_block() for _ in range(chart.n)], _global_shift(chart))
    make = {HYPERBOLIC: hyperbolic_block, LINEAR: linear_block, TRIGONOMETRIC: trigonometric_block}[spec.frame_case]
    return block_frame(chart, [make(t) for _ in range(chart.n)])


def _unit_block():
    return FrameBlock(ONE, ZERO, ZERO, ONE, True)


def _global_shift(chart):
    """ξ = ∂_t + Σ (−xⁱ − (μ/2)yⁱ)∂_{xⁱ} + ((μ/2)xⁱ + yⁱ)∂_{yⁱ}."""
    half_mu = mul(0.5, chart.parameter_nodes["mu"])
    shift = []
    for i in range(1, chart.n + 1):
        x, y = chart.var(chart.x_index(i)), chart.var(chart.y_index(i))
        shift.append((sub(neg(x), mul(half_mu, y)), add(mul(half_mu, x), y)))
    return shift


def build_model(spec):
    """ChartStructure of a registered model."""
    chart = spec.chart()
    if spec.name == FLAT:
        structure = flat_structure(chart)
    elif spec.name == CONTROL_TWISTED:
        structure = twisted_control(chart)
    elif spec.name == CONTROL_CONTACT:
        structure = contact_control(chart)
    else:
        structure = frame_structure(model_frame(spec, chart), spec.params, spec.label)
    logger.info("Built model %s", spec.label)
    return structure


def model_kmn(spec):
    """Known (κ, μ, ν) of a model, or None for the controls."""
    if spec.is_model_space:
        return (-1.0, spec.mu, 0.0)
    if spec.name == FLAT:
        return (0.0, 0.0, 0.0)
    return None


def flat_structure(chart, name="flat"):
    dim = chart.dimension
    phi = [[ZERO] * dim for _ in range(dim)]
    for i in range(1, chart.n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        phi[y][x] = ONE
        phi[x][y] = neg(ONE)
    eta = [ONE] + [ZERO] * (dim - 1)
    return ChartStructure(
        chart=chart,
        phi=Tensor11(chart, phi),
        xi=VectorField.coordinate(chart, 0),
        eta=KForm.one_form(chart, eta),
        g=MetricField.euclidean(chart),
        name=name,
        g_inverse=MetricField(chart, MetricField.euclidean(chart).matrix, contravariant=True),
    )


def twisted_control(chart, name="control-twisted"):
    """
    φ stretched by λ = exp(x¹) in the second complex direction:
    φ∂_{x²} = λ²∂_{y²}, φ∂_{y²} = −λ⁻²∂_{x²}, g = flat except g_{x²x²} = λ², g_{y²y²} = λ⁻².
    Φ stays constant, so the structure is almost cosymplectic, but the leaf complex
    structure is not integrable.
    """
    base = flat_structure(chart)
    lam_sq = exp(mul(2.0, chart.var(chart.x_index(1))))
    lam_sq_inv = exp(mul(-2.0, chart.var(chart.x_index(1))))
    x2, y2 = chart.x_index(2), chart.y_index(2)
    phi = [list(row) for row in base.phi.matrix]
    phi[y2][x2] = lam_sq
    phi[x2][y2] = neg(lam_sq_inv)
    g = [list(row) for row in base.g.matrix]
    g[x2][x2] = lam_sq
    g[y2][y2] = lam_sq_inv
    g_inverse = [list(row) for row in base.g.matrix]
    g_inverse[x2][x2] = lam_sq_inv
    g_inverse[y2][y2] = lam_sq
    return ChartStructure(
        chart=chart,
        phi=Tensor11(chart, phi),
        xi=base.xi,
        eta=base.eta,
        g=MetricField(chart, g),
        name=name,
        g_inverse=MetricField(chart, g_inverse, contravariant=True),
    )


def contact_control(chart, name="control-contact"):
    """
    η = dt − y dx, ξ = ∂_t, φ∂_x = ∂_y, φ∂_y = −∂_x − y∂_t, with (ξ, ∂_x + y∂_t, ∂_y)
    orthonormal. A contact-type structure: dη ≠ 0 and the Levi form is −2.
    """
    y = chart.var(chart.y_index(1))
    t, x, yi = 0, chart.x_index(1), chart.y_index(1)
    dim = chart.dimension
    phi = [[ZERO] * dim for _ in range(dim)]
    phi[yi][x] = ONE
    phi[x][yi] = neg(ONE)
    phi[t][yi] = neg(y)
    eta = [ZERO] * dim
    eta[t] = ONE
    eta[x] = neg(y)
    g = [[ZERO] * dim for _ in range(dim)]
    g[t][t] = ONE
    g[t][x] = g[x][t] = neg(y)
    g[x][x] = add(ONE, mul(y, y))
    g[yi][yi] = ONE
    return ChartStructure(
        chart=chart,
        phi=Tensor11(chart, phi),
        xi=VectorField.coordinate(chart, 0),
        eta=KForm.one_form(chart, eta),
        g=MetricField(chart, g),
        name=name,
    )


def check_commutators(spec, sample, tolerance=IDENTITY_TOLERANCE):
    """
    [ξ, X_i] = X_i − (μ/2)Y_i, [ξ, Y_i] = (μ/2)X_i − Y_i, and every other frame
    commutator vanishes.
    """
    frame = model_frame(spec)
    points = sample.points
    params = spec.params
    n = spec.n
    half_mu = 0.5 * spec.mu
    brackets_xi = []
    for i in range(n):
        brackets_xi.append(lie_bracket(frame.xi, frame.X[i]) - (frame.X[i] - frame.Y[i].scale(half_mu)))
        brackets_xi.append(lie_bracket(frame.xi, frame.Y[i]) - (frame.X[i].scale(half_mu) - frame.Y[i]))
    others = []
    horizontal = list(frame.X) + list(frame.Y)
    for a in range(len(horizontal)):
        for b in range(a + 1, len(horizontal)):
            others.append(lie_bracket(horizontal[a], horizontal[b]))
    residuals = {
        "xi_brackets": evaluate_array([list(v.components) for v in brackets_xi], points, params),
        "vanishing_brackets": evaluate_array([list(v.components) for v in others], points, params)
        if others
        else np.zeros((len(points), 1)),
    }
    return residual_report("commutators", residuals, tolerance, sample.seed)


def frame_component_values(spec, t_values, n=1):
    """Frame block components (X^x, X^y, Y^x, Y^y) of the first direction at the given t."""
    chart = ChartDecl(n, parameters=("mu", "w"))
    frame = model_frame(spec, chart)
    points = np.zeros((len(t_values), chart.dimension))
    points[:, 0] = t_values
    x, y = chart.x_index(1), chart.y_index(1)
    exprs = [frame.X[0][x], frame.X[0][y], frame.Y[0][x], frame.Y[0][y]]
    params = dict(spec.params)
    params.setdefault("w", 1.0)
    return evaluate_array(exprs, points, params).real


def check_limit_at_two(n, delta, tolerance=None, grid=201, half_width=None):
    """
    Frames of the hyperbolic and trigonometric cases at μ = ±(2 ∓ δ) and μ = ±(2 ± δ)
    against the linear case at μ = ±2, on a t grid across the sampling box.
    """
    half_width = BOX_HALF_WIDTH if half_width is None else half_width
    tolerance = 10.0 * delta if tolerance is None else tolerance
    t_values = np.linspace(-half_width, half_width, grid)
    residuals = {}
    for sign, label in ((1.0, "plus"), (-1.0, "minus")):
        limit = frame_component_values(ModelSpec(MODEL_FRAME, n, 2.0 * sign), t_values, n)
        inner = frame_component_values(ModelSpec(MODEL_FRAME, n, sign * (2.0 - delta)), t_values, n)
        outer = frame_component_values(ModelSpec(MODEL_FRAME, n, sign * (2.0 + delta)), t_values, n)
        residuals[f"{label}_from_below"] = inner - limit
        residuals[f"{label}_from_above"] = outer - limit
    return residual_report("limit_at_two", residuals, tolerance, notes={"delta": delta})


def limit_convergence(n, deltas=(1e-2, 1e-4, 1e-6)):
    """Deviation from the |μ| = 2 frame for a decreasing sequence of δ."""
    deviations = {delta: check_limit_at_two(n, delta).max_residual for delta in deltas}
    ordered = [deviations[d] for d in sorted(deltas, reverse=True)]
    decreasing = all(b < a for a, b in zip(ordered, ordered[1:]))
    return deviations, decreasing


def _complex_coordinate_terms(chart, mu):
    """zⁱ + (iμ/2) z̄ⁱ for each direction."""
    return [add(chart.z(i), mul(0.5j, mu, chart.zbar(i))) for i in range(1, chart.n + 1)]


def display_formula_r(spec):
    """
    r written as 1 + 2Σ|zⁱ + (iμ/2)z̄ⁱ|². It differs from the r that the
    orthonormal-frame metric produces (1 + Σ|aⁱ|²); kept to document the discrepancy.
    """
    chart = spec.chart()
    mu = chart.parameter_nodes["mu"]
    terms = [mul(w, conj(w)) for w in _complex_coordinate_terms(chart, mu)]
    return add(ONE, mul(2.0, add(*terms)))


def model_cr_data(spec):
    """CR-chart data of the global realization: aⁱ = −z̄ⁱ + (iμ/2)zⁱ, g_{i j̄} = ½δ_{ij}."""
    if spec.name != MODEL_GLOBAL_CR:
        raise ModelSpecError(f"CR-chart data are only available for '{MODEL_GLOBAL_CR}', not '{spec.name}'")
    chart = spec.chart()
    mu = chart.parameter_nodes["mu"]
    a = [add(neg(chart.zbar(i)), mul(0.5, I, mu, chart.z(i))) for i in range(1, chart.n + 1)]
    gh = [[mul(0.5, ONE) if i == j else ZERO for j in range(chart.n)] for i in range(chart.n)]
    return CRChartData(chart, tuple(a), tuple(tuple(row) for row in gh), spec.params, f"{spec.label}-cr")

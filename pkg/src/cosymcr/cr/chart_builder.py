"""
Structures in CR-chart form on ℝ × ℂⁿ with coordinates (t, z¹…zⁿ), η = dt:

    ξ = ∂_t + Σ (aⁱ ∂_{zⁱ} + āⁱ ∂_{z̄ⁱ}),   φ∂_t = −i Σ (aⁱ ∂_{zⁱ} − āⁱ ∂_{z̄ⁱ}),   φ∂_{zⁱ} = i ∂_{zⁱ},

and g given in the frame (Z₀, Z_i, Z_ī) by g₀₀ = r, g(Z₀, Z_i) = b_i, g(Z_i, Z_j̄) = g_{i j̄},
g(Z_i, Z_j) = 0 with

    r = 1 + 2 Σ aⁱ āʲ g_{i j̄},   b_i = −Σ āʲ g_{i j̄}.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE
from cosymcr.accs.structure import ChartStructure
from cosymcr.errors import CRChartDataError
from cosymcr.accs.report import residual_report
from cosymcr.expr.evaluation import evaluate_batch
from cosymcr.expr.expression import I, ONE, ZERO, add, as_expr, conj, imag_part, is_zero, mul, neg, real_part
from cosymcr.fields.calculus import complexify_frame
from cosymcr.fields.tensors import KForm, MetricField, Tensor11, VectorField

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CRChartData:
    chart: object
    a: tuple
    gh: tuple
    params: dict = field(default_factory=dict)
    name: str = "cr-chart"

    def __post_init__(self):
        n = self.chart.n
        a = tuple(as_expr(c) for c in self.a)
        gh = tuple(tuple(as_expr(c) for c in row) for row in self.gh)
        if len(a) != n:
            raise CRChartDataError(f"Expected {n} coefficient functions aⁱ, got {len(a)}")
        if len(gh) != n or any(len(row) != n for row in gh):
            raise CRChartDataError(f"g_(i j̄) must be an {n}x{n} matrix")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "gh", gh)

    @property
    def n(self):
        return self.chart.n

    @cached_property
    def a_bar(self):
        return tuple(conj(c) for c in self.a)

    @cached_property
    def b(self):
        """b_i = −Σ_j āʲ g_{i j̄}."""
        return tuple(neg(add(*[mul(self.a_bar[j], self.gh[i][j]) for j in range(self.n)])) for i in range(self.n))

    @cached_property
    def r(self):
        """r = 1 + 2 Σ aⁱ āʲ g_{i j̄}."""
        terms = [mul(self.a[i], self.a_bar[j], self.gh[i][j]) for i in range(self.n) for j in range(self.n)]
        return add(ONE, mul(2.0, add(*terms)))

    def validate(self, sample=None, tolerance=IDENTITY_TOLERANCE):
        """Hermitian symmetry and positivity of g_{i j̄} on the sample."""
        points = self.chart.sample(DEFAULT_POINTS, DEFAULT_SEED) if sample is None else sample.points
        n = self.n
        values = np.stack(
            [np.stack([evaluate_batch(self.gh[i][j], points, self.params) for j in range(n)], axis=-1) for i in range(n)],
            axis=-2,
        )
        hermitian_defect = np.max(np.abs(values - np.conj(np.swapaxes(values, -1, -2))))
        if hermitian_defect > tolerance:
            raise CRChartDataError(f"g_(i j̄) is not Hermitian (defect {hermitian_defect:.3e})")
        for k, matrix in enumerate(values):
            if np.min(np.linalg.eigvalsh(matrix)) <= 0:
                raise CRChartDataError(f"g_(i j̄) is not positive definite at point {tuple(points[k])}")
        return True


def complex_gram(data):
    """Gram matrix of g in the frame (Z₀, Z₁…Zₙ, Z_1̄…Z_n̄)."""
    n = data.n
    dim = 2 * n + 1
    G = [[ZERO] * dim for _ in range(dim)]
    G[0][0] = data.r
    for i in range(n):
        G[0][1 + i] = G[1 + i][0] = data.b[i]
        G[0][1 + n + i] = G[1 + n + i][0] = conj(data.b[i])
        for j in range(n):
            G[1 + i][1 + n + j] = data.gh[i][j]
            G[1 + n + j][1 + i] = data.gh[i][j]
    return G


def _real_to_complex(chart):
    """T[c][a]: component on the complex frame vector c of the real basis vector ∂_a."""
    n = chart.n
    dim = chart.dimension
    T = [[ZERO] * dim for _ in range(dim)]
    T[0][0] = ONE
    for i in range(1, n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        # ∂x = Z_i + Z_ī,  ∂y = i(Z_i − Z_ī)
        T[i][x] = ONE
        T[n + i][x] = ONE
        T[i][y] = I
        T[n + i][y] = neg(I)
    return T


def build_from_cr_chart(data, validate=True):
    """Real-chart ChartStructure of the CR-chart data."""
    if validate:
        data.validate()
    chart = data.chart
    dim = chart.dimension
    n = chart.n

    xi = [ZERO] * dim
    xi[0] = ONE
    phi = [[ZERO] * dim for _ in range(dim)]
    for i in range(1, n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        a = data.a[i - 1]
        xi[x] = real_part(a)
        xi[y] = imag_part(a)
        phi[x][0] = imag_part(a)
        phi[y][0] = neg(real_part(a))
        phi[y][x] = ONE
        phi[x][y] = neg(ONE)

    G = complex_gram(data)
    T = _real_to_complex(chart)
    g = [[None] * dim for _ in range(dim)]
    for p in range(dim):
        for q in range(p, dim):
            terms = [
                mul(T[c][p], T[d][q], G[c][d])
                for c in range(dim)
                for d in range(dim)
                if not (is_zero(T[c][p]) or is_zero(T[d][q]) or is_zero(G[c][d]))
            ]
            g[p][q] = g[q][p] = add(*terms)

    eta = [ZERO] * dim
    eta[0] = ONE
    structure = ChartStructure(
        chart=chart,
        phi=Tensor11(chart, phi),
        xi=VectorField(chart, xi),
        eta=KForm.one_form(chart, eta),
        g=MetricField(chart, g),
        params=dict(data.params),
        name=data.name,
    )
    logger.info("Built %s from CR-chart data (n=%d)", data.name, n)
    return structure


def extract_cr_chart_data(structure, sample=None, tolerance=IDENTITY_TOLERANCE):
    """
    Read (aⁱ, g_{i j̄}) back from a structure already in CR-chart form:
    η = dt, ξ^t = 1, φ∂_{xⁱ} = ∂_{yⁱ} and φ∂_{yⁱ} = −∂_{xⁱ}.
    """
    chart = structure.chart
    n = chart.n
    dim = chart.dimension
    points = chart.sample(DEFAULT_POINTS, DEFAULT_SEED) if sample is None else sample.points
    expected_phi = [[ZERO] * dim for _ in range(dim)]
    for i in range(1, n + 1):
        x, y = chart.x_index(i), chart.y_index(i)
        expected_phi[y][x] = ONE
        expected_phi[x][y] = neg(ONE)
    phi_values = structure.evaluate(structure.phi, points)[:, :, 1:]
    expected = np.array([[complex(e.value) for e in row[1:]] for row in expected_phi])
    eta_values = structure.evaluate(structure.eta, points)
    xi_t = structure.evaluate([structure.xi[0]], points)[:, 0]
    dt = np.zeros(dim)
    dt[0] = 1.0
    if np.max(np.abs(phi_values - expected)) > tolerance:
        raise CRChartDataError("φ is not in CR-chart form (φ∂x ≠ ∂y)")
    if np.max(np.abs(eta_values - dt)) > tolerance or np.max(np.abs(xi_t - 1.0)) > tolerance:
        raise CRChartDataError("The structure is not normalised to η = dt")

    a = []
    for i in range(1, n + 1):
        a.append(add(structure.xi[chart.x_index(i)], mul(I, structure.xi[chart.y_index(i)])))
    g = structure.g
    gh = []
    for i in range(1, n + 1):
        row = []
        xi_, yi = chart.x_index(i), chart.y_index(i)
        for j in range(1, n + 1):
            xj, yj = chart.x_index(j), chart.y_index(j)
            # g(Z_i, Z_j̄) = ¼(g_xx + i g_xy − i g_yx + g_yy)
            value = add(g[xi_, xj], mul(I, g[xi_, yj]), mul(neg(I), g[yi, xj]), g[yi, yj])
            row.append(mul(0.25, value))
        gh.append(row)
    return CRChartData(chart, tuple(a), tuple(tuple(r) for r in gh), dict(structure.params), f"{structure.name}-cr")


def check_theorem_relations(data, structure, sample, tolerance=IDENTITY_TOLERANCE):
    """
    Recompute r, b_i and g(Z_i, Z_j), g(Z_ī, Z_j̄) from the real metric of ``structure`` and
    compare with the stored values.
    """
    points = sample.points
    frame = complexify_frame(structure.chart)
    n = data.n
    Z0 = frame[0]
    g = structure.g
    r_measured = g.inner(Z0, Z0)
    residuals = {"r": structure.evaluate([add(r_measured, neg(data.r))], points)}
    b_diff = [add(g.inner(Z0, frame[1 + i]), neg(data.b[i])) for i in range(n)]
    residuals["b"] = structure.evaluate(b_diff, points)
    isotropic = [g.inner(frame[1 + i], frame[1 + j]) for i in range(n) for j in range(n)]
    isotropic += [g.inner(frame[1 + n + i], frame[1 + n + j]) for i in range(n) for j in range(n)]
    residuals["isotropy"] = structure.evaluate(isotropic, points)
    return residual_report("cr_chart_relations", residuals, tolerance, sample.seed)

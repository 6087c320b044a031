"""
Almost contact metric structures (φ, ξ, η, g) on a chart, with the derived
connection, curvature and structure tensors built lazily and cached.
"""
import logging
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from cosymcr.config import FINITE_DIFFERENCE_STEP, SYMBOLIC_MAX_DIMENSION
from cosymcr.errors import UnsupportedDimensionError
from cosymcr.expr.differentiation import differentiate
from cosymcr.expr.evaluation import evaluate_array
from cosymcr.expr.expression import add, is_zero, mul, neg
from cosymcr.fields.calculus import lie_bracket, lie_derivative_tensor11
from cosymcr.fields.tensors import KForm, Tensor11, VectorField
from cosymcr.riemann.connection import christoffel, inverse_metric, nabla_t11_components
from cosymcr.riemann.curvature import CurvatureData, NumericConnection

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChartStructure:
    chart: object
    phi: Tensor11
    xi: VectorField
    eta: KForm
    g: object
    params: dict = field(default_factory=dict)
    name: str = "structure"
    g_inverse: object = None

    def __post_init__(self):
        for part in (self.phi, self.xi, self.eta, self.g):
            self.chart.require_same(part.chart)
        if self.eta.degree != 1:
            raise ValueError("η must be a 1-form")

    def evaluate(self, value, points):
        """Evaluate any field (or nested list of expressions) with this structure's parameters."""
        if hasattr(value, "evaluate"):
            return value.evaluate(points, self.params)
        return evaluate_array(value, points, self.params)

    @cached_property
    def inverse(self):
        if self.g_inverse is not None:
            return self.g_inverse
        return inverse_metric(self.g)

    @property
    def numeric_only(self):
        """Above the symbolic limit Γ and R exist only as values at points."""
        return self.chart.dimension > SYMBOLIC_MAX_DIMENSION

    @property
    def mode(self):
        return "numeric-only" if self.numeric_only else "symbolic"

    @cached_property
    def connection(self):
        """ConnectionData, or a NumericConnection in numeric-only mode."""
        if self.numeric_only:
            logger.info("%s has dimension %d; using the numeric-only connection", self.name, self.chart.dimension)
            return NumericConnection(self.g, self.params)
        logger.debug("Building Levi-Civita connection of %s", self.name)
        return christoffel(self.g, self.inverse)

    def require_symbolic(self, what):
        if self.numeric_only:
            raise UnsupportedDimensionError(
                f"{what} of {self.name} needs dimension ≤ {SYMBOLIC_MAX_DIMENSION} (n ≤ 3); "
                f"this structure has dimension {self.chart.dimension}"
            )

    @cached_property
    def curvature(self):
        self.require_symbolic("The symbolic curvature")
        logger.debug("Building curvature of %s", self.name)
        return CurvatureData(self.connection)

    def gamma_values(self, points):
        """Γ^k_{ij} at the points, shape (N, k, i, j)."""
        if self.numeric_only:
            return self.connection.gamma_at(points)
        return self.connection.components_at(points, self.params)

    def curvature_values(self, points):
        """R^l_{ijk} at the points, shape (N, l, i, j, k)."""
        if self.numeric_only:
            return self.connection.curvature_at(points)
        return self.curvature.evaluate(points, self.params)

    def tensor_A_values(self, points):
        """A^k_i at the points, shape (N, k, i)."""
        if not self.numeric_only:
            return self.evaluate(self.tensor_A, points)
        dim = self.chart.dimension
        dxi = evaluate_array([[differentiate(self.xi[k], i) for i in range(dim)] for k in range(dim)], points, self.params)
        xi = self.evaluate(self.xi, points)
        return -(dxi + np.einsum("nkij,nj->nki", self.gamma_values(points), xi))

    def nabla_phi_values(self, points):
        """(∇_i φ)^a_b at the points, shape (N, i, a, b)."""
        if not self.numeric_only:
            return self.evaluate(self.nabla_phi, points)
        dim = self.chart.dimension
        dphi = evaluate_array(
            [[[differentiate(self.phi.matrix[a][b], i) for b in range(dim)] for a in range(dim)] for i in range(dim)],
            points,
            self.params,
        )
        return _nabla_values(self.evaluate(self.phi, points), dphi, self.gamma_values(points))

    def nabla_A_values(self, points, step=FINITE_DIFFERENCE_STEP):
        """(∇_i A)^a_b at the points; ∂A by central differences in numeric-only mode."""
        if not self.numeric_only:
            return self.evaluate(self.nabla_A, points)
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dim = self.chart.dimension
        dA = np.zeros((points.shape[0], dim, dim, dim), dtype=complex)
        for i in range(dim):
            shift = np.zeros(dim)
            shift[i] = step
            dA[:, i] = (self.tensor_A_values(points + shift) - self.tensor_A_values(points - shift)) / (2 * step)
        return _nabla_values(self.tensor_A_values(points), dA, self.gamma_values(points))

    @cached_property
    def fundamental_form(self):
        """Φ(X, Y) = g(φX, Y), components Φ_{AB} = g(φ∂_A, ∂_B)."""
        dim = self.chart.dimension
        components = {}
        for a in range(dim):
            for b in range(a + 1, dim):
                terms = [mul(self.g[c, b], self.phi.matrix[c][a]) for c in range(dim) if not is_zero(self.phi.matrix[c][a])]
                value = add(*terms)
                if not is_zero(value):
                    components[(a, b)] = value
        return KForm(self.chart, 2, components)

    @cached_property
    def tensor_A(self):
        """AX = −∇_X ξ, i.e. A^k_i = −(∂_i ξ^k + Γ^k_{ij} ξ^j)."""
        self.require_symbolic("The symbolic tensor A")
        dim = self.chart.dimension
        gamma = self.connection.gamma
        rows = []
        for k in range(dim):
            row = []
            for i in range(dim):
                terms = [differentiate(self.xi[k], i)]
                terms += [mul(gamma[k][i][j], self.xi[j]) for j in range(dim) if not is_zero(self.xi[j]) and not is_zero(gamma[k][i][j])]
                row.append(neg(add(*terms)))
            rows.append(row)
        return Tensor11(self.chart, rows)

    @cached_property
    def tensor_h(self):
        """h = ½ 𝓛_ξ φ."""
        return lie_derivative_tensor11(self.xi, self.phi).scale(0.5)

    @cached_property
    def nabla_phi(self):
        """``nabla_phi[i][a][b]`` = (∇_i φ)^a_b."""
        self.require_symbolic("The symbolic ∇φ")
        return nabla_t11_components(self.connection, self.phi)

    @cached_property
    def nabla_A(self):
        self.require_symbolic("The symbolic ∇A")
        return nabla_t11_components(self.connection, self.tensor_A)

    def nijenhuis(self):
        return NijenhuisTorsion(self)

    def with_metric(self, g, name=None):
        return ChartStructure(self.chart, self.phi, self.xi, self.eta, g, self.params, name or self.name)

    def values(self, points):
        """Numeric snapshot (φ, ξ, η, g) at the points."""
        return StructureValues(
            phi=self.phi.evaluate(points, self.params),
            xi=self.xi.evaluate(points, self.params),
            eta=self.eta.evaluate(points, self.params),
            g=self.g.evaluate(points, self.params),
        )


def _nabla_values(T, dT, gamma):
    """(∇_i T)^a_b = ∂_i T^a_b + Γ^a_{ic} T^c_b − T^a_c Γ^c_{ib} from values; dT is [n, i, a, b]."""
    return dT + np.einsum("naic,ncb->niab", gamma, T) - np.einsum("nac,ncib->niab", T, gamma)


@dataclass(frozen=True)
class StructureValues:
    phi: np.ndarray
    xi: np.ndarray
    eta: np.ndarray
    g: np.ndarray


class NijenhuisTorsion:
    """N_φ(X, Y) = φ²[X, Y] + [φX, φY] − φ[φX, Y] − φ[X, φY]."""

    def __init__(self, structure):
        self.structure = structure
        self.phi = structure.phi
        self.phi_squared = structure.phi.compose(structure.phi)

    def __call__(self, X, Y):
        phi = self.phi
        phi_x, phi_y = phi.apply(X), phi.apply(Y)
        result = self.phi_squared.apply(lie_bracket(X, Y))
        result = result + lie_bracket(phi_x, phi_y)
        result = result - phi.apply(lie_bracket(phi_x, Y))
        return result - phi.apply(lie_bracket(X, phi_y))

    def on_basis(self):
        """N_φ(∂_i, ∂_j) for i < j as a dict keyed by (i, j)."""
        chart = self.structure.chart
        basis = [VectorField.coordinate(chart, k) for k in range(chart.dimension)]
        return {(i, j): self(basis[i], basis[j]) for i in range(chart.dimension) for j in range(i + 1, chart.dimension)}

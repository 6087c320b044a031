import logging

import numpy as np

from cosymcr.config import FINITE_DIFFERENCE_STEP
from cosymcr.expr.differentiation import differentiate
from cosymcr.expr.evaluation import as_points, evaluate_array
from cosymcr.expr.expression import ZERO, add, is_zero, mul, neg
from cosymcr.fields.calculus import lie_bracket
from cosymcr.riemann.connection import covariant_derivative_vf

logger = logging.getLogger(__name__)


class CurvatureData:
    """
    Riemann tensor R^l_{ijk} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik},
    so that R(∂_i, ∂_j)∂_k = R^l_{ijk} ∂_l. Only i < j is built; the rest is
    filled by antisymmetry.
    """

    def __init__(self, connection):
        self.connection = connection
        self.chart = connection.chart
        self.components = self._build()

    def _build(self):
        conn = self.connection
        dim = self.chart.dimension
        gamma = conn.gamma
        R = [[[[None] * dim for _ in range(dim)] for _ in range(dim)] for _ in range(dim)]
        for l in range(dim):
            for i in range(dim):
                R[l][i][i] = [ZERO] * dim
                for j in range(i + 1, dim):
                    for k in range(dim):
                        terms = [differentiate(gamma[l][j][k], i), neg(differentiate(gamma[l][i][k], j))]
                        for m in range(dim):
                            if not is_zero(gamma[l][i][m]) and not is_zero(gamma[m][j][k]):
                                terms.append(mul(gamma[l][i][m], gamma[m][j][k]))
                            if not is_zero(gamma[l][j][m]) and not is_zero(gamma[m][i][k]):
                                terms.append(neg(mul(gamma[l][j][m], gamma[m][i][k])))
                        value = add(*terms)
                        R[l][i][j][k] = value
                        R[l][j][i][k] = neg(value)
        logger.debug("Curvature components built for dimension %d", dim)
        return R

    def component(self, l, i, j, k):
        return self.components[l][i][j][k]

    def evaluate(self, points, params=None):
        """R values, shape (N, dim, dim, dim, dim) indexed [n, l, i, j, k]."""
        return evaluate_array(self.components, points, params)


def curvature_apply(curv, X, Y, Z, p, params=None):
    """R(X, Y)Z at a single point, as a complex vector."""
    return curvature_apply_batch(curv, X, Y, Z, p, params)[0]


def curvature_apply_batch(curv, X, Y, Z, points, params=None):
    points = as_points(points)
    R = curv.evaluate(points, params)
    x, y, z = (v.evaluate(points, params) for v in (X, Y, Z))
    return np.einsum("nlijk,ni,nj,nk->nl", R, x, y, z)


def curvature_nested(conn, X, Y, Z):
    """R(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z as a vector field."""
    first = covariant_derivative_vf(conn, X, covariant_derivative_vf(conn, Y, Z))
    second = covariant_derivative_vf(conn, Y, covariant_derivative_vf(conn, X, Z))
    third = covariant_derivative_vf(conn, lie_bracket(X, Y), Z)
    return first - second - third


def bianchi_residual(curv, points, params=None):
    """max |R^l_{ijk} + R^l_{jki} + R^l_{kij}|."""
    R = curv.evaluate(points, params)
    cyclic = R + np.einsum("nljki->nlijk", R) + np.einsum("nlkij->nlijk", R)
    return float(np.max(np.abs(cyclic)))


class NumericConnection:
    """
    Pointwise Levi-Civita data without symbolic inversion: g⁻¹ by linear solves,
    ∂g from the exact symbolic derivatives of g, and ∂Γ by central differences.

    Works in any dimension; also serves as an independent oracle for CurvatureData.
    """

    def __init__(self, g, params=None, step=FINITE_DIFFERENCE_STEP):
        self.metric = g
        self.chart = g.chart
        self.params = params
        self.step = step
        dim = self.chart.dimension
        self._dg = [[[differentiate(g[i, j], l) for l in range(dim)] for j in range(dim)] for i in range(dim)]

    def gamma_at(self, points):
        """Γ values at the points, shape (N, dim, dim, dim) indexed [n, k, i, j]."""
        points = as_points(points)
        g = self.metric.evaluate(points, self.params).real
        dg = evaluate_array(self._dg, points, self.params).real  # [n, i, j, l] = ∂_l g_ij
        first = 0.5 * (np.einsum("njli->nlij", dg) + np.einsum("nilj->nlij", dg) - dg.transpose(0, 3, 1, 2))
        dim = self.chart.dimension
        flat = first.reshape(points.shape[0], dim, dim * dim)
        solved = np.linalg.solve(g, flat)
        return solved.reshape(points.shape[0], dim, dim, dim)

    def curvature_at(self, points):
        """R values shape (N, dim, dim, dim, dim) with Γ differentiated numerically."""
        points = as_points(points)
        dim = self.chart.dimension
        gamma = self.gamma_at(points)
        dgamma = np.zeros((points.shape[0], dim) + gamma.shape[1:])  # [n, i, l, j, k] = ∂_i Γ^l_jk
        for i in range(dim):
            shift = np.zeros(dim)
            shift[i] = self.step
            dgamma[:, i] = (self.gamma_at(points + shift) - self.gamma_at(points - shift)) / (2 * self.step)
        derivative = np.einsum("niljk->nlijk", dgamma)
        R = derivative - np.einsum("nlijk->nljik", derivative)
        quadratic = np.einsum("nlim,nmjk->nlijk", gamma, gamma)
        R = R + quadratic - np.einsum("nlijk->nljik", quadratic)
        return R

import logging

import numpy as np

from cosymcr.config import SYMBOLIC_MAX_DIMENSION
from cosymcr.errors import SingularMetricError, UnsupportedDimensionError
from cosymcr.expr.differentiation import differentiate
from cosymcr.expr.evaluation import as_points, evaluate_array, evaluate_batch
from cosymcr.expr.expression import add, div, is_zero, mul, neg, sub
from cosymcr.fields.tensors import MetricField, Tensor11, VectorField

logger = logging.getLogger(__name__)


class _MinorTable:
    """Memoised Laplace expansion of determinants of sub-matrices."""

    def __init__(self, matrix):
        self.matrix = matrix
        self.memo = {}

    def det(self, rows, cols):
        key = (rows, cols)
        if key in self.memo:
            return self.memo[key]
        if len(rows) == 1:
            result = self.matrix[rows[0]][cols[0]]
        else:
            first, rest = rows[0], rows[1:]
            terms = []
            for a, c in enumerate(cols):
                entry = self.matrix[first][c]
                if is_zero(entry):
                    continue
                minor = self.det(rest, cols[:a] + cols[a + 1:])
                if is_zero(minor):
                    continue
                term = mul(entry, minor)
                terms.append(term if a % 2 == 0 else neg(term))
            result = add(*terms)
        self.memo[key] = result
        return result


def determinant(matrix):
    dim = len(matrix)
    return _MinorTable(matrix).det(tuple(range(dim)), tuple(range(dim)))


def inverse_metric(g, points=None, params=None):
    """
    Symbolic inverse g^{ij} by the adjugate formula.

    When ``points`` are given the determinant is checked there and a
    SingularMetricError names the first point where it vanishes.
    """
    dim = g.chart.dimension
    if dim > SYMBOLIC_MAX_DIMENSION:
        raise UnsupportedDimensionError(
            f"Symbolic inversion is limited to dimension {SYMBOLIC_MAX_DIMENSION}; got dimension {dim}"
        )
    table = _MinorTable(g.matrix)
    everything = tuple(range(dim))
    det = table.det(everything, everything)
    if is_zero(det):
        raise SingularMetricError("Metric determinant vanishes identically")
    if points is not None:
        _check_determinant(det, points, params)
    rows = []
    for i in range(dim):
        row = []
        for j in range(dim):
            # (g⁻¹)_{ij} = (−1)^{i+j} M_{ji} / det
            minor = table.det(everything[:j] + everything[j + 1:], everything[:i] + everything[i + 1:])
            cofactor = minor if (i + j) % 2 == 0 else neg(minor)
            row.append(div(cofactor, det))
        rows.append(row)
    return MetricField(g.chart, rows, contravariant=True)


def _check_determinant(det, points, params):
    points = as_points(points)
    values = np.abs(evaluate_batch(det, points, params))
    singular = np.flatnonzero(values < 1e-14)
    if singular.size:
        raise SingularMetricError("Metric is singular", point=points[singular[0]])


def inverse_residual(g, g_inverse, points, params=None):
    """max |g·g⁻¹ − Id| over the sample."""
    product = np.einsum("nij,njk->nik", g.evaluate(points, params), g_inverse.evaluate(points, params))
    return float(np.max(np.abs(product - np.eye(g.chart.dimension))))


class ConnectionData:
    """
    Levi-Civita connection of a metric. ``gamma[k][i][j]`` is Γ^k_{ij}.
    """

    def __init__(self, metric, inverse, gamma):
        self.chart = metric.chart
        self.metric = metric
        self.inverse = inverse
        self.gamma = gamma

    def symbol(self, k, i, j):
        return self.gamma[k][i][j]

    def components_at(self, points, params=None):
        """Γ values, shape (N, dim, dim, dim) indexed [n, k, i, j]."""
        return evaluate_array(self.gamma, points, params)


def christoffel(g, inverse=None):
    """Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})."""
    if inverse is None:
        inverse = inverse_metric(g)
    dim = g.chart.dimension
    dg = [[[differentiate(g[i, j], l) for l in range(dim)] for j in range(dim)] for i in range(dim)]
    # Christoffel symbols of the first kind, Γ_{lij}
    first = [[[None] * dim for _ in range(dim)] for _ in range(dim)]
    for l in range(dim):
        for i in range(dim):
            for j in range(i, dim):
                value = mul(0.5, sub(add(dg[j][l][i], dg[i][l][j]), dg[i][j][l]))
                first[l][i][j] = first[l][j][i] = value
    gamma = [[[None] * dim for _ in range(dim)] for _ in range(dim)]
    for k in range(dim):
        for i in range(dim):
            for j in range(i, dim):
                terms = [
                    mul(inverse[k, l], first[l][i][j])
                    for l in range(dim)
                    if not is_zero(inverse[k, l]) and not is_zero(first[l][i][j])
                ]
                gamma[k][i][j] = gamma[k][j][i] = add(*terms)
    logger.debug("Christoffel symbols built for a %d-dimensional metric", dim)
    return ConnectionData(g, inverse, gamma)


def covariant_derivative_vf(conn, X, Y):
    """(∇_X Y)^k = X^i(∂_i Y^k + Γ^k_{ij} Y^j); complex-linear in Y."""
    conn.chart.require_same(X.chart)
    conn.chart.require_same(Y.chart)
    dim = conn.chart.dimension
    components = []
    for k in range(dim):
        terms = [X.derivative(Y[k])]
        for i in range(dim):
            if is_zero(X[i]):
                continue
            for j in range(dim):
                if is_zero(Y[j]) or is_zero(conn.gamma[k][i][j]):
                    continue
                terms.append(mul(X[i], conn.gamma[k][i][j], Y[j]))
        components.append(add(*terms))
    return VectorField(conn.chart, components)


def covariant_derivative_t11(conn, X, T):
    """(∇_X T)Y = ∇_X(TY) − T(∇_X Y), column by column on coordinate fields."""
    conn.chart.require_same(T.chart)
    dim = conn.chart.dimension
    columns = []
    for b in range(dim):
        column = covariant_derivative_vf(conn, X, T.column(b))
        correction = T.apply(covariant_derivative_vf(conn, X, VectorField.coordinate(conn.chart, b)))
        columns.append(column - correction)
    return Tensor11.from_columns(conn.chart, columns)


def nabla_t11_components(conn, T):
    """
    All of ∇T at once: ``out[i][a][b]`` is (∇_i T)^a_b
    = ∂_i T^a_b + Γ^a_{ic} T^c_b − T^a_c Γ^c_{ib}.
    """
    dim = conn.chart.dimension
    out = []
    for i in range(dim):
        rows = []
        for a in range(dim):
            row = []
            for b in range(dim):
                terms = [differentiate(T.matrix[a][b], i)]
                for c in range(dim):
                    if not is_zero(conn.gamma[a][i][c]) and not is_zero(T.matrix[c][b]):
                        terms.append(mul(conn.gamma[a][i][c], T.matrix[c][b]))
                    if not is_zero(T.matrix[a][c]) and not is_zero(conn.gamma[c][i][b]):
                        terms.append(neg(mul(T.matrix[a][c], conn.gamma[c][i][b])))
                row.append(add(*terms))
            rows.append(row)
        out.append(rows)
    return out


def metric_compatibility_residual(conn, points, params=None):
    """max |(∇_i g)_{jk}| over the sample."""
    dim = conn.chart.dimension
    g = conn.metric
    dg = [[[differentiate(g[j, k], i) for k in range(dim)] for j in range(dim)] for i in range(dim)]
    dg_val = evaluate_array(dg, points, params)
    g_val = g.evaluate(points, params)
    gamma = conn.components_at(points, params)
    nabla = dg_val - np.einsum("nlij,nlk->nijk", gamma, g_val) - np.einsum("nlik,njl->nijk", gamma, g_val)
    return float(np.max(np.abs(nabla)))

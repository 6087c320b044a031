"""
Tensor fields on a chart with expression components in the coordinate frame.

Conventions:
  * ``Tensor11.matrix[i][j]`` is the i-th component of T(∂_j);
  * a ``KForm`` stores the components ω_{i₁…i_k} of the fully antisymmetric tensor for
    strictly increasing index tuples, and ω(X₁, …, X_k) = Σ ω_{i₁…i_k} X₁^{i₁}…X_k^{i_k}
    over all index tuples.
"""
import itertools
import logging

import numpy as np

from cosymcr.errors import ChartMismatchError, NotPositiveDefiniteError, UnsupportedDegreeError
from cosymcr.expr.differentiation import differentiate
from cosymcr.expr.evaluation import as_points, evaluate_array
from cosymcr.expr.expression import ONE, ZERO, add, as_expr, conj, is_zero, mul, neg, sub

logger = logging.getLogger(__name__)

MAX_FORM_DEGREE = 3


def _check_chart(a, b):
    a.chart.require_same(b.chart)


class VectorField:
    """Vector field X = Σ X^k ∂_k; components may be complex."""

    __slots__ = ("chart", "components")

    def __init__(self, chart, components):
        components = tuple(as_expr(c) for c in components)
        if len(components) != chart.dimension:
            raise ChartMismatchError(
                f"A vector field on a {chart.dimension}-dimensional chart needs {chart.dimension} components, got {len(components)}"
            )
        self.chart = chart
        self.components = components

    @classmethod
    def zero(cls, chart):
        return cls(chart, [ZERO] * chart.dimension)

    @classmethod
    def coordinate(cls, chart, k):
        """The coordinate field ∂_k."""
        if isinstance(k, str):
            k = chart.index(k)
        return cls(chart, [ONE if j == k else ZERO for j in range(chart.dimension)])

    def __getitem__(self, k):
        return self.components[k]

    def __iter__(self):
        return iter(self.components)

    def __add__(self, other):
        _check_chart(self, other)
        return VectorField(self.chart, [add(a, b) for a, b in zip(self.components, other.components)])

    def __sub__(self, other):
        _check_chart(self, other)
        return VectorField(self.chart, [sub(a, b) for a, b in zip(self.components, other.components)])

    def __neg__(self):
        return VectorField(self.chart, [neg(c) for c in self.components])

    def scale(self, f):
        """Multiply by a scalar expression or number."""
        return VectorField(self.chart, [mul(f, c) for c in self.components])

    def conjugate(self):
        return VectorField(self.chart, [conj(c) for c in self.components])

    def derivative(self, f):
        """X(f) = Σ X^k ∂_k f."""
        return add(*[mul(c, differentiate(f, k)) for k, c in enumerate(self.components) if not is_zero(c)])

    def evaluate(self, points, params=None):
        """Complex array of shape (N, dim)."""
        return evaluate_array(list(self.components), points, params)

    def __repr__(self):
        return f"VectorField({[str(c) for c in self.components]})"


class KForm:
    """Differential form of degree 1 ≤ k ≤ 3."""

    __slots__ = ("chart", "degree", "components")

    def __init__(self, chart, degree, components=None):
        if not 1 <= degree <= MAX_FORM_DEGREE:
            raise UnsupportedDegreeError(f"Forms of degree {degree} are not supported")
        self.chart = chart
        self.degree = degree
        self.components = {}
        for indices, value in (components or {}).items():
            indices = (indices,) if isinstance(indices, int) else tuple(indices)
            if len(indices) != degree:
                raise ChartMismatchError(f"Index tuple {indices} does not match degree {degree}")
            if any(not 0 <= i < chart.dimension for i in indices):
                raise ChartMismatchError(f"Index tuple {indices} outside the chart")
            sign, ordered = _sort_indices(indices)
            if sign == 0:
                continue
            value = as_expr(value)
            if sign < 0:
                value = neg(value)
            if ordered in self.components:
                value = add(self.components[ordered], value)
            self.components[ordered] = value

    @classmethod
    def one_form(cls, chart, components):
        """1-form from its full list of components ω_i."""
        if len(components) != chart.dimension:
            raise ChartMismatchError("A 1-form needs one component per coordinate")
        return cls(chart, 1, {(i,): c for i, c in enumerate(components)})

    def component(self, *indices):
        """ω_{i₁…i_k} for any index order (antisymmetry applied)."""
        sign, ordered = _sort_indices(indices)
        if sign == 0:
            return ZERO
        value = self.components.get(ordered, ZERO)
        return value if sign > 0 else neg(value)

    def __add__(self, other):
        _check_chart(self, other)
        if self.degree != other.degree:
            raise UnsupportedDegreeError("Cannot add forms of different degree")
        merged = dict(self.components)
        for key, value in other.components.items():
            merged[key] = add(merged[key], value) if key in merged else value
        return KForm(self.chart, self.degree, merged)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, f):
        return KForm(self.chart, self.degree, {k: mul(f, v) for k, v in self.components.items()})

    def apply(self, *vectors):
        """ω(X₁, …, X_k) as an expression."""
        if len(vectors) != self.degree:
            raise UnsupportedDegreeError(f"A {self.degree}-form takes {self.degree} arguments")
        for v in vectors:
            self.chart.require_same(v.chart)
        terms = []
        for ordered, value in self.components.items():
            if is_zero(value):
                continue
            for perm in itertools.permutations(range(self.degree)):
                indices = [ordered[p] for p in perm]
                factors = [vectors[a][indices[a]] for a in range(self.degree)]
                if any(is_zero(f) for f in factors):
                    continue
                term = mul(value, *factors)
                terms.append(term if _parity(perm) > 0 else neg(term))
        return add(*terms)

    def evaluate(self, points, params=None):
        """Full antisymmetric component array of shape (N, dim, ..., dim)."""
        dim = self.chart.dimension
        count = as_points(points).shape[0]
        out = np.zeros((count,) + (dim,) * self.degree, dtype=complex)
        keys = list(self.components)
        if not keys:
            return out
        values = evaluate_array([self.components[k] for k in keys], points, params)
        for column, ordered in enumerate(keys):
            for perm in itertools.permutations(range(self.degree)):
                index = tuple(ordered[p] for p in perm)
                out[(slice(None),) + index] = _parity(perm) * values[:, column]
        return out

    def __repr__(self):
        body = ", ".join(f"{k}: {v}" for k, v in sorted(self.components.items()))
        return f"KForm(degree={self.degree}, {{{body}}})"


class Tensor11:
    """(1,1)-tensor field; ``matrix[i][j]`` is the i-th component of T(∂_j)."""

    __slots__ = ("chart", "matrix")

    def __init__(self, chart, matrix):
        dim = chart.dimension
        rows = [tuple(as_expr(c) for c in row) for row in matrix]
        if len(rows) != dim or any(len(row) != dim for row in rows):
            raise ChartMismatchError(f"A (1,1)-tensor on this chart must be {dim}x{dim}")
        self.chart = chart
        self.matrix = tuple(rows)

    @classmethod
    def identity(cls, chart):
        dim = chart.dimension
        return cls(chart, [[ONE if i == j else ZERO for j in range(dim)] for i in range(dim)])

    @classmethod
    def zero(cls, chart):
        dim = chart.dimension
        return cls(chart, [[ZERO] * dim for _ in range(dim)])

    @classmethod
    def from_columns(cls, chart, columns):
        """Build T from the images T(∂_j) given as vector fields."""
        dim = chart.dimension
        return cls(chart, [[columns[j][i] for j in range(dim)] for i in range(dim)])

    @classmethod
    def outer(cls, vector, form):
        """v ⊗ ω, i.e. X ↦ ω(X) v."""
        if form.degree != 1:
            raise UnsupportedDegreeError("The outer product takes a 1-form")
        vector.chart.require_same(form.chart)
        dim = vector.chart.dimension
        return cls(vector.chart, [[mul(vector[i], form.component(j)) for j in range(dim)] for i in range(dim)])

    def column(self, j):
        return VectorField(self.chart, [self.matrix[i][j] for i in range(self.chart.dimension)])

    def apply(self, vector):
        self.chart.require_same(vector.chart)
        dim = self.chart.dimension
        return VectorField(
            self.chart,
            [add(*[mul(self.matrix[i][j], vector[j]) for j in range(dim) if not is_zero(vector[j])]) for i in range(dim)],
        )

    def compose(self, other):
        """self ∘ other."""
        _check_chart(self, other)
        dim = self.chart.dimension
        return Tensor11(
            self.chart,
            [
                [add(*[mul(self.matrix[i][k], other.matrix[k][j]) for k in range(dim)]) for j in range(dim)]
                for i in range(dim)
            ],
        )

    def __add__(self, other):
        _check_chart(self, other)
        return Tensor11(self.chart, [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __sub__(self, other):
        _check_chart(self, other)
        return Tensor11(self.chart, [[sub(a, b) for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def __neg__(self):
        return self.scale(-1)

    def scale(self, f):
        return Tensor11(self.chart, [[mul(f, c) for c in row] for row in self.matrix])

    def evaluate(self, points, params=None):
        """Complex array of shape (N, dim, dim)."""
        return evaluate_array([list(row) for row in self.matrix], points, params)


class MetricField:
    """
    Symmetric (0,2) tensor g_{ij}, or its contravariant inverse g^{ij} when
    ``contravariant`` is set. Symmetry is enforced by reading the upper triangle.
    """

    __slots__ = ("chart", "matrix", "contravariant")

    def __init__(self, chart, matrix, contravariant=False):
        dim = chart.dimension
        rows = [[as_expr(c) for c in row] for row in matrix]
        if len(rows) != dim or any(len(row) != dim for row in rows):
            raise ChartMismatchError(f"A metric on this chart must be {dim}x{dim}")
        for i in range(dim):
            for j in range(i):
                rows[i][j] = rows[j][i]
        self.chart = chart
        self.matrix = tuple(tuple(row) for row in rows)
        self.contravariant = contravariant

    @classmethod
    def euclidean(cls, chart):
        return cls(chart, Tensor11.identity(chart).matrix)

    def __getitem__(self, key):
        i, j = key
        return self.matrix[i][j]

    def inner(self, X, Y):
        """g(X, Y), complex-bilinear (no conjugation)."""
        self.chart.require_same(X.chart)
        self.chart.require_same(Y.chart)
        dim = self.chart.dimension
        terms = []
        for i in range(dim):
            if is_zero(X[i]):
                continue
            for j in range(dim):
                if is_zero(Y[j]) or is_zero(self.matrix[i][j]):
                    continue
                terms.append(mul(self.matrix[i][j], X[i], Y[j]))
        return add(*terms)

    def lower(self, X):
        """The 1-form g(X, ·)."""
        dim = self.chart.dimension
        return KForm.one_form(self.chart, [add(*[mul(self.matrix[i][j], X[i]) for i in range(dim)]) for j in range(dim)])

    def __add__(self, other):
        _check_chart(self, other)
        return MetricField(self.chart, [[add(a, b) for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)])

    def scale(self, f):
        return MetricField(self.chart, [[mul(f, c) for c in row] for row in self.matrix], self.contravariant)

    @classmethod
    def symmetric_product(cls, alpha, beta):
        """The symmetric product α⊙β = ½(α⊗β + β⊗α) of two 1-forms."""
        chart = alpha.chart
        dim = chart.dimension
        return cls(
            chart,
            [
                [mul(0.5, add(mul(alpha.component(i), beta.component(j)), mul(beta.component(i), alpha.component(j)))) for j in range(dim)]
                for i in range(dim)
            ],
        )

    def evaluate(self, points, params=None):
        return evaluate_array([list(row) for row in self.matrix], points, params)

    def check_positive_definite(self, points, params=None):
        """Raise NotPositiveDefiniteError at the first sampled point where g is not SPD."""
        points = as_points(points)
        values = self.evaluate(points, params)
        for k, value in enumerate(values):
            if np.max(np.abs(value.imag)) > 1e-10:
                raise NotPositiveDefiniteError("Metric is not real-valued", point=points[k])
            try:
                np.linalg.cholesky(value.real)
            except np.linalg.LinAlgError:
                raise NotPositiveDefiniteError("Metric is not positive definite", point=points[k]) from None
        logger.debug("Metric positive definite at %d points", len(points))
        return True


def _sort_indices(indices):
    """Sign of the sorting permutation (0 on a repeated index) and the sorted tuple."""
    indices = list(indices)
    if len(set(indices)) != len(indices):
        return 0, tuple(sorted(indices))
    sign = 1
    for a in range(len(indices)):
        for b in range(a + 1, len(indices)):
            if indices[a] > indices[b]:
                sign = -sign
    return sign, tuple(sorted(indices))


def _parity(perm):
    sign, _ = _sort_indices(perm)
    return sign

"""Lie brackets, exterior derivatives and Lie derivatives in the coordinate frame."""
from cosymcr.errors import UnsupportedDegreeError
from cosymcr.expr.differentiation import differentiate
from cosymcr.expr.expression import I, ONE, ZERO, add, is_zero, mul, neg, sub
from cosymcr.fields.tensors import KForm, Tensor11, VectorField


def lie_bracket(X, Y):
    """[X, Y]^k = X^j ∂_j Y^k − Y^j ∂_j X^k."""
    X.chart.require_same(Y.chart)
    return VectorField(X.chart, [sub(X.derivative(Y[k]), Y.derivative(X[k])) for k in range(X.chart.dimension)])


def differential(f, chart):
    """df, with components ∂_i f."""
    return KForm.one_form(chart, [differentiate(f, i) for i in range(chart.dimension)])


def exterior_derivative(form):
    """
    dω for forms of degree 1 and 2, normalised so that
    dη(X, Y) = ½(Xη(Y) − Yη(X) − η([X, Y])):

        (dω)_{i₀…i_k} = 1/(k+1) Σ_a (−1)^a ∂_{i_a} ω_{i₀…î_a…i_k}
    """
    k = form.degree
    if k > 2:
        raise UnsupportedDegreeError(f"d is only implemented up to degree 2 (got degree {k})")
    dim = form.chart.dimension
    weight = 1.0 / (k + 1)
    components = {}
    for indices in _increasing(dim, k + 1):
        terms = []
        for a, i in enumerate(indices):
            rest = indices[:a] + indices[a + 1:]
            d = differentiate(form.component(*rest), i)
            if is_zero(d):
                continue
            terms.append(d if a % 2 == 0 else neg(d))
        value = mul(weight, add(*terms))
        if not is_zero(value):
            components[indices] = value
    return KForm(form.chart, k + 1, components)


def wedge(alpha, beta):
    """(α∧β)(X, Y) = ½(α(X)β(Y) − α(Y)β(X)) for 1-forms."""
    if alpha.degree != 1 or beta.degree != 1:
        raise UnsupportedDegreeError("wedge is implemented for pairs of 1-forms")
    alpha.chart.require_same(beta.chart)
    dim = alpha.chart.dimension
    components = {}
    for i, j in _increasing(dim, 2):
        value = mul(0.5, sub(mul(alpha.component(i), beta.component(j)), mul(alpha.component(j), beta.component(i))))
        if not is_zero(value):
            components[(i, j)] = value
    return KForm(alpha.chart, 2, components)


def lie_derivative_tensor11(xi, T):
    """
    (𝓛_ξT)X = [ξ, TX] − T[ξ, X]; in components
    (𝓛_ξT)^a_b = ξ^c ∂_c T^a_b − T^c_b ∂_c ξ^a + T^a_c ∂_b ξ^c.
    """
    xi.chart.require_same(T.chart)
    dim = xi.chart.dimension
    grad_xi = [[differentiate(xi[a], c) for c in range(dim)] for a in range(dim)]
    rows = []
    for a in range(dim):
        row = []
        for b in range(dim):
            terms = [xi.derivative(T.matrix[a][b])]
            for c in range(dim):
                if not is_zero(grad_xi[a][c]) and not is_zero(T.matrix[c][b]):
                    terms.append(neg(mul(T.matrix[c][b], grad_xi[a][c])))
                if not is_zero(grad_xi[c][b]) and not is_zero(T.matrix[a][c]):
                    terms.append(mul(T.matrix[a][c], grad_xi[c][b]))
            row.append(add(*terms))
        rows.append(row)
    return Tensor11(xi.chart, rows)


def complexify_frame(chart):
    """
    (Z₀, Z₁…Zₙ, Z_1̄…Z_n̄) with Z₀ = ∂_t, Z_i = ½(∂_{xⁱ} − i∂_{yⁱ}) and Z_ī the conjugate of Z_i.
    """
    dim = chart.dimension
    frame = [VectorField.coordinate(chart, 0)]
    for sign in (-1, 1):
        for i in range(1, chart.n + 1):
            components = [ZERO] * dim
            components[chart.x_index(i)] = mul(0.5, ONE)
            components[chart.y_index(i)] = mul(0.5 * sign, I)
            frame.append(VectorField(chart, components))
    return tuple(frame)


def _increasing(dim, k):
    if k == 1:
        return [(i,) for i in range(dim)]
    return [(i,) + rest for i in range(dim) for rest in _increasing(dim, k - 1) if rest[0] > i]

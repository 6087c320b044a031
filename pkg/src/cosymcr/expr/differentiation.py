from cosymcr.expr.expression import (
    I,
    ONE,
    ZERO,
    Conj,
    Const,
    Func,
    ImaginaryUnit,
    Neg,
    Param,
    Power,
    Product,
    Quotient,
    Sum,
    Var,
    add,
    as_expr,
    conj,
    cos,
    cosh,
    div,
    is_zero,
    mul,
    neg,
    power,
    sin,
    sinh,
    sub,
)


def differentiate(e, coordinate):
    """
    Exact partial derivative of ``e`` with respect to the chart coordinate
    with index ``coordinate``.

    Results are cached on the nodes, so differentiating many expressions that
    share subtrees (inverse metrics, Christoffel symbols) stays linear in the
    size of the DAG.
    """
    e = as_expr(e)
    cached = e._derivatives.get(coordinate)
    if cached is not None:
        return cached
    result = _derive(e, coordinate)
    e._derivatives[coordinate] = result
    return result


def _derive(e, k):
    if isinstance(e, (Const, ImaginaryUnit, Param)):
        return ZERO
    if isinstance(e, Var):
        return ONE if e.index == k else ZERO
    if isinstance(e, Sum):
        return add(*[differentiate(t, k) for t in e.terms])
    if isinstance(e, Product):
        terms = []
        for j, factor in enumerate(e.factors):
            d = differentiate(factor, k)
            if is_zero(d):
                continue
            others = e.factors[:j] + e.factors[j + 1:]
            terms.append(mul(*others, d))
        return add(*terms)
    if isinstance(e, Quotient):
        dn = differentiate(e.numerator, k)
        dd = differentiate(e.denominator, k)
        first = div(dn, e.denominator)
        if is_zero(dd):
            return first
        second = div(mul(e.numerator, dd), power(e.denominator, 2))
        return sub(first, second)
    if isinstance(e, Power):
        d = differentiate(e.base, k)
        if is_zero(d):
            return ZERO
        return mul(e.exponent, power(e.base, e.exponent - 1), d)
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, k))
    if isinstance(e, Func):
        d = differentiate(e.arg, k)
        if is_zero(d):
            return ZERO
        if e.name == "sin":
            outer = cos(e.arg)
        elif e.name == "cos":
            outer = neg(sin(e.arg))
        elif e.name == "sinh":
            outer = cosh(e.arg)
        elif e.name == "cosh":
            outer = sinh(e.arg)
        else:
            outer = e
        return mul(outer, d)
    if isinstance(e, Conj):
        # chart coordinates are real, so ∂ commutes with conjugation
        return conj(differentiate(e.arg, k))
    raise TypeError(f"Cannot differentiate a {type(e).__name__}")


def gradient(e, dimension):
    return tuple(differentiate(e, k) for k in range(dimension))


def wirtinger_z(e, chart, i):
    """∂/∂zⁱ = ½(∂/∂xⁱ − √−1 ∂/∂yⁱ), with ``i`` counted from 1."""
    dx = differentiate(e, chart.x_index(i))
    dy = differentiate(e, chart.y_index(i))
    return mul(0.5, sub(dx, mul(I, dy)))


def wirtinger_zbar(e, chart, i):
    """∂/∂z̄ⁱ = ½(∂/∂xⁱ + √−1 ∂/∂yⁱ)."""
    dx = differentiate(e, chart.x_index(i))
    dy = differentiate(e, chart.y_index(i))
    return mul(0.5, add(dx, mul(I, dy)))

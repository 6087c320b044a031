
import numpy as np

from cosymcr.errors import EvaluationError
from cosymcr.expr.expression import (
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
    as_expr,
)


_NUMPY = {
    "sin": np.sin,
    "cos": np.cos,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "exp": np.exp,
}


def as_points(points):
    """Coerce a point or a batch of points to a float array of shape (N, dim)."""
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        array = array[np.newaxis, :]
    if array.ndim != 2:
        raise ValueError("Points must be a vector or a 2-d array")
    return array


def evaluate_many(exprs, points, params=None):
    """
    Evaluate several expressions over a batch of points.

    One memo is shared by all expressions so common subtrees are computed once.
    Returns a list of complex arrays of shape (N,).
    """
    points = as_points(points)
    params = params or {}
    count = points.shape[0]
    memo = {}
    results = []
    for e in exprs:
        value = _evaluate(as_expr(e), points, params, memo)
        results.append(np.broadcast_to(np.asarray(value, dtype=complex), (count,)).copy())
    return results


def evaluate_batch(e, points, params=None):
    return evaluate_many([e], points, params)[0]


def evaluate(e, point, params=None):
    """Complex value of ``e`` at a single point."""
    return complex(evaluate_batch(e, point, params)[0])


def evaluate_array(nested, points, params=None):
    """
    Evaluate a nested list (matrix, 3-index table ...) of expressions.

    The result has shape (N,) + shape(nested).
    """
    flat, shape = _flatten(nested)
    values = evaluate_many(flat, points, params)
    count = as_points(points).shape[0]
    if not values:
        return np.zeros((count,) + shape, dtype=complex)
    return np.stack(values, axis=-1).reshape((count,) + shape)


def _flatten(nested):
    if isinstance(nested, (list, tuple)):
        if not nested:
            return [], (0,)
        parts = [_flatten(item) for item in nested]
        inner = parts[0][1]
        flat = [e for items, _ in parts for e in items]
        return flat, (len(nested),) + inner
    return [nested], ()


def _evaluate(root, points, params, memo):
    # Post-order traversal with an explicit stack; deep DAGs never hit the recursion limit.
    stack = [(root, False)]
    while stack:
        node, children_done = stack.pop()
        key = id(node)
        if key in memo:
            continue
        if not children_done:
            stack.append((node, True))
            for child in node.children:
                if id(child) not in memo:
                    stack.append((child, False))
            continue
        memo[key] = _apply(node, points, params, memo)
    return memo[id(root)]


def _apply(node, points, params, memo):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, ImaginaryUnit):
        return 1j
    if isinstance(node, Var):
        return points[:, node.index].astype(complex)
    if isinstance(node, Param):
        if node.name not in params:
            raise EvaluationError(f"Unbound parameter '{node.name}'")
        return complex(params[node.name])
    if isinstance(node, Sum):
        total = 0j
        for term in node.terms:
            total = total + memo[id(term)]
        return total
    if isinstance(node, Product):
        total = 1 + 0j
        for factor in node.factors:
            total = total * memo[id(factor)]
        return total
    if isinstance(node, Quotient):
        denominator = memo[id(node.denominator)]
        _check_nonzero(denominator, points)
        return memo[id(node.numerator)] / denominator
    if isinstance(node, Power):
        base = memo[id(node.base)]
        if node.exponent < 0:
            _check_nonzero(base, points)
            return 1 / (base ** (-node.exponent))
        return base ** node.exponent
    if isinstance(node, Neg):
        return -memo[id(node.arg)]
    if isinstance(node, Func):
        return _NUMPY[node.name](memo[id(node.arg)])
    if isinstance(node, Conj):
        return np.conj(memo[id(node.arg)])
    raise TypeError(f"Cannot evaluate a {type(node).__name__}")


def _check_nonzero(values, points):
    values = np.broadcast_to(np.asarray(values), (points.shape[0],))
    zero = np.flatnonzero(values == 0)
    if zero.size:
        raise EvaluationError("Division by zero", point=points[zero[0]])

import numpy as np

from cosymcr.errors import NotPositiveDefiniteError
from cosymcr.expr.evaluation import as_points


def orthonormal_basis(g_value, order=None, point=None):
    """
    Gram–Schmidt on the coordinate basis taken in ``order`` (default: t first).

    ``g_value`` is the metric matrix at one point; returns the basis vectors as the
    columns of a real matrix.
    """
    g_value = np.asarray(g_value).real
    dim = g_value.shape[0]
    order = list(range(dim)) if order is None else list(order)
    basis = []
    for k in order:
        v = np.zeros(dim)
        v[k] = 1.0
        for e in basis:
            v = v - (e @ g_value @ v) * e
        norm_sq = v @ g_value @ v
        if norm_sq <= 1e-14:
            raise NotPositiveDefiniteError("Gram–Schmidt met a non-positive vector", point=point)
        basis.append(v / np.sqrt(norm_sq))
    return np.stack(basis, axis=1)


def restricted_orthonormal_basis(g_value, vectors, point=None):
    """Gram–Schmidt on the given spanning vectors (columns), dropping dependent ones."""
    g_value = np.asarray(g_value).real
    basis = []
    for v in np.asarray(vectors).T.real:
        for e in basis:
            v = v - (e @ g_value @ v) * e
        norm_sq = v @ g_value @ v
        if norm_sq < -1e-12:
            raise NotPositiveDefiniteError("Metric is not positive definite", point=point)
        if norm_sq > 1e-12:
            basis.append(v / np.sqrt(norm_sq))
    return np.stack(basis, axis=1)


def tensor_norm_value(g_value, t_value, point=None, order=None):
    """‖T‖ = sqrt(Σ_a g(Te_a, Te_a)) for numeric g and T at one point."""
    g_value = np.asarray(g_value)
    basis = orthonormal_basis(g_value, order=order, point=point)
    images = np.asarray(t_value) @ basis
    # images may be complex for complexified tensors; use the Hermitian pairing
    total = np.einsum("ia,ij,ja->", images.conj(), g_value.real, images).real
    return float(np.sqrt(max(total, 0.0)))


def tensor_norm(g, T, p, params=None, order=None):
    """‖T‖ at the point ``p`` over a g-orthonormal basis."""
    point = as_points(p)
    return tensor_norm_value(g.evaluate(point, params)[0], T.evaluate(point, params)[0], point=point[0], order=order)

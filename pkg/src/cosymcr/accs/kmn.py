"""
(κ, μ, ν)-nullity: verification, pointwise estimation, derived relations and the
p invariant of three-dimensional model spaces.
"""
import logging
from dataclasses import dataclass, field

import numpy as np

from cosymcr.config import IDENTITY_TOLERANCE, RANK_TOLERANCE
from cosymcr.accs.checks import tag_mode
from cosymcr.accs.report import residual_report
from cosymcr.errors import UnsupportedDimensionError
from cosymcr.expr.expression import as_expr, mul, sub
from cosymcr.fields.calculus import differential, lie_derivative_tensor11, wedge
from cosymcr.riemann.norms import restricted_orthonormal_basis, tensor_norm_value

logger = logging.getLogger(__name__)

COMPONENTS = ("kappa", "mu", "nu")

# A null-space direction touching a component by more than this leaves it undetermined.
NULL_SPACE_THRESHOLD = 1e-6


def _scalar_values(structure, value, points):
    return structure.evaluate([as_expr(value)], points)[:, 0]


def kmn_tensor_values(structure, kappa, mu, nu, points):
    """P = κ Id + μ h + ν A at the points, shape (N, a, b)."""
    k_val, m_val, n_val = (_scalar_values(structure, f, points) for f in (kappa, mu, nu))
    identity = np.eye(structure.chart.dimension)
    h = structure.evaluate(structure.tensor_h, points)
    A = structure.tensor_A_values(points)
    return k_val[:, None, None] * identity + m_val[:, None, None] * h + n_val[:, None, None] * A


def check_kmn(structure, kappa, mu, nu, sample, tolerance=IDENTITY_TOLERANCE):
    """
    R(X, Y)ξ = η(Y)PX − η(X)PY with P = κ Id + μ h + ν A, plus
    dκ∧η = dμ∧η = dν∧η = 0.
    """
    points = sample.points
    kappa, mu, nu = as_expr(kappa), as_expr(mu), as_expr(nu)
    R = structure.curvature_values(points)
    xi = structure.evaluate(structure.xi, points)
    eta = structure.evaluate(structure.eta, points)
    P = kmn_tensor_values(structure, kappa, mu, nu, points)
    lhs = np.einsum("nlijk,nk->nijl", R, xi)
    rhs = np.einsum("nj,nli->nijl", eta, P) - np.einsum("ni,nlj->nijl", eta, P)
    residuals = {"curvature_condition": lhs - rhs}
    for label, function in zip(COMPONENTS, (kappa, mu, nu)):
        form = wedge(differential(function, structure.chart), structure.eta)
        if form.components:
            residuals[f"d{label}_wedge_eta"] = structure.evaluate(form, points)
        else:
            residuals[f"d{label}_wedge_eta"] = np.zeros((points.shape[0], 1))
    return tag_mode(residual_report("kmn", residuals, tolerance, sample.seed), structure)


def check_kmn_relations(structure, kappa, mu, nu, sample, tolerance=IDENTITY_TOLERANCE):
    """A² = −κ(Id − η⊗ξ), ∇_ξA = μh + νA and dκ(ξ) = 2νκ."""
    points = sample.points
    kappa, mu, nu = as_expr(kappa), as_expr(mu), as_expr(nu)
    A = structure.tensor_A_values(points)
    h = structure.evaluate(structure.tensor_h, points)
    xi = structure.evaluate(structure.xi, points)
    eta = structure.evaluate(structure.eta, points)
    k_val, m_val, n_val = (_scalar_values(structure, f, points) for f in (kappa, mu, nu))
    dim = structure.chart.dimension
    projector = np.eye(dim) - np.einsum("na,nb->nab", xi, eta)
    nabla_A = structure.nabla_A_values(points)
    nabla_xi_A = np.einsum("ni,niab->nab", xi, nabla_A)
    dkappa_xi = structure.evaluate([structure.xi.derivative(kappa)], points)[:, 0]
    residuals = {
        "A_squared": np.einsum("nac,ncb->nab", A, A) + k_val[:, None, None] * projector,
        "nabla_xi_A": nabla_xi_A - m_val[:, None, None] * h - n_val[:, None, None] * A,
        "dkappa_xi": dkappa_xi - 2.0 * n_val * k_val,
    }
    return tag_mode(residual_report("kmn_relations", residuals, tolerance, sample.seed), structure)


@dataclass
class KMNResult:
    """
    Pointwise least-squares fit of (κ, μ, ν). Components that the data cannot
    determine are reported as None, never as numbers.
    """

    points: np.ndarray
    kappa: list
    mu: list
    nu: list
    residuals: list
    underdetermined: list
    undetermined_components: list = field(default_factory=list)

    @property
    def residual(self):
        return max(self.residuals) if self.residuals else 0.0

    @property
    def any_underdetermined(self):
        return any(self.underdetermined)

    def triple(self, k=0):
        return (self.kappa[k], self.mu[k], self.nu[k])

    def to_records(self):
        records = []
        for k, point in enumerate(self.points):
            records.append(
                {
                    "point": [float(c) for c in point],
                    "kappa": self.kappa[k],
                    "mu": self.mu[k],
                    "nu": self.nu[k],
                    "residual": self.residuals[k],
                    "underdetermined": self.underdetermined[k],
                    "undetermined": list(self.undetermined_components[k]),
                }
            )
        return records


def kernel_basis(g_value, xi_value, eta_value, order=None, point=None):
    """g-orthonormal basis of ker η at one point, from the projected coordinate fields."""
    dim = g_value.shape[0]
    order = list(range(dim)) if order is None else list(order)
    projector = np.eye(dim) - np.outer(xi_value, eta_value)
    return restricted_orthonormal_basis(g_value, projector.real[:, order], point=point)


def estimate_kmn(structure, points, order=None):
    """
    Fit P e_a = κ e_a + μ h e_a + ν A e_a on an orthonormal basis e_a of ker η,
    where P e_a = −R(ξ, e_a)ξ. The residual is measured in the g-norm.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    R = structure.curvature_values(points).real
    v = structure.values(points)
    h = structure.evaluate(structure.tensor_h, points).real
    A = structure.tensor_A_values(points).real
    result = KMNResult(points, [], [], [], [], [], [])
    for k in range(points.shape[0]):
        g, xi, eta = v.g[k].real, v.xi[k].real, v.eta[k].real
        basis = kernel_basis(g, xi, eta, order=order, point=points[k])
        chol = np.linalg.cholesky(g).T
        rows, rhs = [], []
        for e in basis.T:
            pe = -np.einsum("lijk,i,j,k->l", R[k], xi, e, xi)
            columns = np.stack([e, h[k] @ e, A[k] @ e], axis=1)
            rows.append(chol @ columns)
            rhs.append(chol @ pe)
        design = np.concatenate(rows, axis=0)
        target = np.concatenate(rhs, axis=0)
        solution, _, rank, singular = np.linalg.lstsq(design, target, rcond=None)
        scale = singular[0] if singular.size else 0.0
        rank = int(np.sum(singular > RANK_TOLERANCE * scale)) if scale > 0 else 0
        _, _, vt = np.linalg.svd(design)
        null_space = vt[rank:]
        undetermined = [
            name for c, name in enumerate(COMPONENTS) if null_space.size and np.any(np.abs(null_space[:, c]) > NULL_SPACE_THRESHOLD)
        ]
        residual = float(np.linalg.norm(design @ solution - target))
        values = [None if name in undetermined else float(solution[c]) for c, name in enumerate(COMPONENTS)]
        result.kappa.append(values[0])
        result.mu.append(values[1])
        result.nu.append(values[2])
        result.residuals.append(residual)
        result.underdetermined.append(bool(undetermined))
        result.undetermined_components.append(undetermined)
    logger.info("(κ, μ, ν) fitted at %d points of %s", points.shape[0], structure.name)
    return result


def perrone_values(structure, points):
    """‖𝓛_ξh‖ and ‖h‖ at each point (dimension 3 only)."""
    if structure.chart.n != 1:
        raise UnsupportedDimensionError("The p invariant is defined for three-dimensional structures (n = 1)")
    points = np.atleast_2d(np.asarray(points, dtype=float))
    h_tensor = structure.tensor_h
    lie_h = lie_derivative_tensor11(structure.xi, h_tensor)
    g = structure.evaluate(structure.g, points)
    h = structure.evaluate(h_tensor, points)
    lh = structure.evaluate(lie_h, points)
    lie_norms = np.array([tensor_norm_value(g[k], lh[k], point=points[k]) for k in range(points.shape[0])])
    h_norms = np.array([tensor_norm_value(g[k], h[k], point=points[k]) for k in range(points.shape[0])])
    return lie_norms, h_norms


def perrone_p(structure, p, squared=False):
    """
    p = ‖𝓛_ξh‖ − 2‖h‖², first term unsquared. ``squared=True`` gives the
    diagnostic reading ‖𝓛_ξh‖² − 2‖h‖².
    """
    lie_norms, h_norms = perrone_values(structure, p)
    first = lie_norms[0] ** 2 if squared else lie_norms[0]
    return float(first - 2.0 * h_norms[0] ** 2)


def perrone_report(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """p over a sample with both readings; passes when p is constant over the sample."""
    lie_norms, h_norms = perrone_values(structure, sample.points)
    literal = lie_norms - 2.0 * h_norms ** 2
    squared = lie_norms ** 2 - 2.0 * h_norms ** 2
    spread = literal - literal.mean()
    report = residual_report("perrone_p", {"p_spread": spread}, tolerance, sample.seed)
    value = float(literal.mean())
    report.notes = {
        "p": value,
        "p_squared_reading": float(squared.mean()),
        "sign": perrone_sign(value, tolerance),
        "type": perrone_type(value, tolerance),
    }
    return report


def perrone_sign(value, tolerance=IDENTITY_TOLERANCE):
    if abs(value) <= tolerance:
        return 0
    return 1 if value > 0 else -1


def perrone_type(value, tolerance=IDENTITY_TOLERANCE):
    """Model group label by the sign of p: E(1,1) for p < 0, H3 for p = 0, Ẽ(2) for p > 0."""
    return {-1: "E(1,1)", 0: "H3", 1: "Ẽ(2)"}[perrone_sign(value, tolerance)]


def expected_deformed_kmn(structure, beta, kappa, mu, nu):
    """κ′ = κ/β², μ′ = μ/β, ν′ = (νβ − dβ(ξ))/β²."""
    beta = as_expr(beta)
    beta_squared = mul(beta, beta)
    kappa_prime = as_expr(kappa) / beta_squared
    mu_prime = as_expr(mu) / beta
    nu_prime = sub(mul(nu, beta), structure.xi.derivative(beta)) / beta_squared
    return kappa_prime, mu_prime, nu_prime

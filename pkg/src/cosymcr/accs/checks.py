"""
Pointwise identity checks for almost contact metric structures.

All identities are evaluated on the coordinate basis at each sample point; by
multilinearity that is exhaustive.
"""
import logging

import numpy as np

from cosymcr.config import IDENTITY_TOLERANCE
from cosymcr.accs.report import residual_report
from cosymcr.fields.calculus import exterior_derivative

logger = logging.getLogger(__name__)


def fundamental_form(structure):
    return structure.fundamental_form


def tensor_A(structure):
    return structure.tensor_A


def tensor_h(structure):
    return structure.tensor_h


def nijenhuis(structure):
    return structure.nijenhuis()


def tag_mode(report, structure):
    """Mark reports whose connection data were computed pointwise."""
    if structure.numeric_only:
        report.notes = dict(report.notes, mode=structure.mode)
    return report


def _form_values(structure, form, points):
    if not form.components:
        return np.zeros((points.shape[0], 1))
    return structure.evaluate(form, points)


def check_acm_axioms(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """φ² = −I + η⊗ξ, η(ξ) = 1, g(φX, φY) = g(X, Y) − η(X)η(Y) and η(X) = g(X, ξ)."""
    points = sample.points
    v = structure.values(points)
    dim = structure.chart.dimension
    identity = np.eye(dim)
    eta_xi = np.einsum("na,nb->nab", v.xi, v.eta)
    residuals = {
        "phi_squared": np.einsum("nac,ncb->nab", v.phi, v.phi) + identity - eta_xi,
        "eta_of_xi": np.einsum("na,na->n", v.eta, v.xi) - 1.0,
        "metric_compatibility": np.einsum("nca,ncd,ndb->nab", v.phi, v.g, v.phi)
        - v.g
        + np.einsum("na,nb->nab", v.eta, v.eta),
        "eta_metric_dual": np.einsum("nab,nb->na", v.g, v.xi) - v.eta,
    }
    return residual_report("acm_axioms", residuals, tolerance, sample.seed)


def check_almost_cosymplectic(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """dη = 0 and dΦ = 0."""
    points = sample.points
    d_eta = exterior_derivative(structure.eta)
    d_phi = exterior_derivative(structure.fundamental_form)
    residuals = {
        "d_eta": _form_values(structure, d_eta, points),
        "d_Phi": _form_values(structure, d_phi, points),
    }
    return residual_report("almost_cosymplectic", residuals, tolerance, sample.seed)


def normality_residual(structure, points):
    """N_φ(∂_i, ∂_j) + 2dη(∂_i, ∂_j)ξ for every i < j, shape (N, pairs, dim)."""
    torsion = structure.nijenhuis().on_basis()
    if not torsion:
        return np.zeros((points.shape[0], 1))
    d_eta = exterior_derivative(structure.eta)
    xi = structure.evaluate(structure.xi, points)
    d_eta_values = _full_two_form(structure, d_eta, points)
    out = []
    for (i, j), vector in torsion.items():
        out.append(structure.evaluate(vector, points) + 2.0 * d_eta_values[:, i, j, None] * xi)
    return np.stack(out, axis=1)


def _full_two_form(structure, form, points):
    dim = structure.chart.dimension
    if not form.components:
        return np.zeros((points.shape[0], dim, dim))
    return structure.evaluate(form, points)


def check_normal(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """N_φ + 2dη⊗ξ = 0."""
    residuals = {"normality": normality_residual(structure, sample.points)}
    return residual_report("normal", residuals, tolerance, sample.seed)


def nabla_phi_values(structure, points):
    """(∇_i φ)^a_b, shape (N, i, a, b)."""
    return structure.nabla_phi_values(points)


def goldberg_yano_residual(structure, points):
    """R(∂_i, ∂_j)φ − φR(∂_i, ∂_j) as matrices, shape (N, i, j, dim, dim)."""
    R = structure.curvature_values(points)
    phi = structure.evaluate(structure.phi, points)
    # (R_ij)^l_k = R^l_{ijk}
    left = np.einsum("nlijc,nck->nijlk", R, phi)
    right = np.einsum("nlc,ncijk->nijlk", phi, R)
    return left - right


def check_goldberg_yano(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """R(X, Y)φZ = φR(X, Y)Z."""
    residuals = {"goldberg_yano": goldberg_yano_residual(structure, sample.points)}
    return tag_mode(residual_report("goldberg_yano", residuals, tolerance, sample.seed), structure)


def check_cosymplectic(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """
    The three equivalent characterisations of cosymplectic structures among almost
    cosymplectic ones: normality, ∇φ = 0 and R∘φ = φ∘R.

    The report passes when all three pass; ``notes`` records each verdict and
    whether the three verdicts agree.
    """
    points = sample.points
    residuals = {
        "normality": normality_residual(structure, points),
        "nabla_phi": nabla_phi_values(structure, points),
        "goldberg_yano": goldberg_yano_residual(structure, points),
    }
    report = residual_report("cosymplectic", residuals, tolerance, sample.seed)
    verdicts = {family: stats["passed"] for family, stats in report.families.items()}
    agree = len(set(verdicts.values())) == 1
    report.notes = {"verdicts": verdicts, "verdicts_agree": agree}
    tag_mode(report, structure)
    if not agree:
        logger.warning("Cosymplectic characterisations disagree on %s: %s", structure.name, verdicts)
    return report


def check_cosymplectic_equivalences(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """Passes when the three cosymplectic characterisations reach the same verdict."""
    report = check_cosymplectic(structure, sample, tolerance)
    report.name = "cosymplectic_equivalences"
    report.notes = dict(report.notes, cosymplectic=report.passed)
    report.passed = report.notes["verdicts_agree"]
    return report


def kahler_leaves_residual(structure, points):
    """(∇_iφ)∂_j + g(φA∂_i, ∂_j)ξ − η_j φA∂_i, shape (N, i, j, dim)."""
    nabla_phi = nabla_phi_values(structure, points)
    phi = structure.evaluate(structure.phi, points)
    A = structure.tensor_A_values(points)
    g = structure.evaluate(structure.g, points)
    xi = structure.evaluate(structure.xi, points)
    eta = structure.evaluate(structure.eta, points)
    phi_a = np.einsum("nac,nci->nai", phi, A)
    lhs = np.einsum("niaj->nija", nabla_phi)
    g_phi_a = np.einsum("njc,nci->nij", g, phi_a)
    rhs = -np.einsum("nij,na->nija", g_phi_a, xi) + np.einsum("nj,nai->nija", eta, phi_a)
    return lhs - rhs


def check_kahler_leaves(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """(∇_Xφ)Y = −g(φAX, Y)ξ + η(Y)φAX."""
    residuals = {"kahler_leaves": kahler_leaves_residual(structure, sample.points)}
    return tag_mode(residual_report("kahler_leaves", residuals, tolerance, sample.seed), structure)

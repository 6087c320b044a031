import logging

import numpy as np

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE
from cosymcr.accs.kmn import check_kmn, expected_deformed_kmn
from cosymcr.accs.report import Sample, residual_report
from cosymcr.accs.structure import ChartStructure
from cosymcr.errors import DeformationError
from cosymcr.expr.expression import as_expr, div, mul, sub
from cosymcr.expr.parser import parse_expression
from cosymcr.fields.calculus import differential, wedge
from cosymcr.fields.tensors import MetricField

logger = logging.getLogger(__name__)


def _beta_expression(structure, beta):
    if isinstance(beta, str):
        return parse_expression(beta, structure.chart)
    return as_expr(beta)


def check_deformation_admissible(structure, alpha, beta, sample, tolerance=IDENTITY_TOLERANCE):
    """α > 0 constant, β > 0 and dβ∧η = 0 on the sample."""
    beta = _beta_expression(structure, beta)
    points = sample.points
    form = wedge(differential(beta, structure.chart), structure.eta)
    residuals = {"dbeta_wedge_eta": structure.evaluate(form, points) if form.components else np.zeros((len(points), 1))}
    beta_values = structure.evaluate([beta], points)[:, 0]
    positive = bool(np.all(beta_values.real > 0) and np.all(np.abs(beta_values.imag) <= tolerance))
    report = residual_report("deformation_admissible", residuals, tolerance, sample.seed)
    report.notes = {"alpha_positive": alpha > 0, "beta_positive": positive}
    report.passed = report.passed and alpha > 0 and positive
    return report


def d_conformal_deform(structure, alpha, beta, sample=None, tolerance=IDENTITY_TOLERANCE):
    """
    φ′ = φ, ξ′ = ξ/β, η′ = βη, g′ = αg + (β² − α)η⊗η.

    The admissibility conditions are checked first, on ``sample`` or on the default
    seeded sample, and a DeformationError carrying the report is raised when they fail.
    β may be an expression, a number or expression text on the structure's chart.
    """
    alpha = float(alpha)
    if alpha <= 0:
        raise DeformationError(f"α must be a positive constant, got {alpha}")
    beta = _beta_expression(structure, beta)
    if sample is None:
        sample = Sample.draw(structure.chart, DEFAULT_POINTS, DEFAULT_SEED)
    report = check_deformation_admissible(structure, alpha, beta, sample, tolerance)
    if not report.passed:
        error = DeformationError(
            f"β is not admissible: dβ∧η residual {report.max_residual:.3e}, β positive: {report.notes['beta_positive']}"
        )
        error.report = report
        raise error
    chart = structure.chart
    dim = chart.dimension
    eta = structure.eta
    coefficient = sub(mul(beta, beta), alpha)
    g = structure.g
    g_new = MetricField(
        chart,
        [[mul(alpha, g[i, j]) + mul(coefficient, eta.component(i), eta.component(j)) for j in range(dim)] for i in range(dim)],
    )
    g_inverse = None if structure.numeric_only else _deformed_inverse(structure, alpha, beta)
    deformed = ChartStructure(
        chart=chart,
        phi=structure.phi,
        xi=structure.xi.scale(div(1.0, beta)),
        eta=eta.scale(beta),
        g=g_new,
        params=structure.params,
        name=f"{structure.name}-deformed",
        g_inverse=g_inverse,
    )
    logger.info("D-conformal deformation of %s with α=%s, β=%s", structure.name, alpha, beta)
    return deformed


def _deformed_inverse(structure, alpha, beta):
    """g′⁻¹ = g⁻¹/α + (1/β² − 1/α)ξ⊗ξ, valid when η = g(ξ, ·) and g(ξ, ξ) = 1."""
    dim = structure.chart.dimension
    inverse = structure.inverse
    coefficient = sub(div(1.0, mul(beta, beta)), 1.0 / alpha)
    return MetricField(
        structure.chart,
        [[mul(1.0 / alpha, inverse[i, j]) + mul(coefficient, structure.xi[i], structure.xi[j]) for j in range(dim)] for i in range(dim)],
        contravariant=True,
    )


def check_deformation_law(structure, alpha, beta, kappa, mu, nu, sample, tolerance=IDENTITY_TOLERANCE):
    """The deformed structure is a (κ′, μ′, ν′)-space with the transformed functions."""
    beta = _beta_expression(structure, beta)
    deformed = d_conformal_deform(structure, alpha, beta, sample, tolerance)
    kappa_prime, mu_prime, nu_prime = expected_deformed_kmn(structure, beta, kappa, mu, nu)
    report = check_kmn(deformed, kappa_prime, mu_prime, nu_prime, sample, tolerance)
    report.name = "deformation_law"
    report.notes = dict(report.notes, kappa=str(kappa_prime), mu=str(mu_prime), nu=str(nu_prime))
    return report

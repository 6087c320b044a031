import logging

import numpy as np

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE
from cosymcr.accs.checks import check_kahler_leaves
from cosymcr.accs.report import Sample, residual_report
from cosymcr.cr.sections import dprime_defect, spanning_sections
from cosymcr.errors import NotCRIntegrableError
from cosymcr.expr.expression import sub
from cosymcr.fields.tensors import VectorField
from cosymcr.riemann.connection import covariant_derivative_vf

logger = logging.getLogger(__name__)


def hermitian_metric(structure, Z, W):
    """H(Z, W) = g(Z, W̄)."""
    return structure.g.inner(Z, W.conjugate())


class HermitianConnectionEval:
    """
    ∇′_X Z = ∇_X Z − g(X, AZ)ξ on sections of 𝒟′.

    For η(Z) = 0 the ξ-component of ∇_X Z is exactly g(AX, Z), so this is the
    correction that keeps ∇′ inside 𝒟′. ``conjugate_argument=True`` uses g(X, AZ̄)
    instead; that variant is still H-compatible but leaves a ξ-component.
    """

    def __init__(self, structure, conjugate_argument=False):
        structure.require_symbolic("The Hermitian connection")
        self.structure = structure
        self.conjugate_argument = conjugate_argument
        self.connection = structure.connection
        self.A = structure.tensor_A

    def covariant(self, X, Z):
        s = self.structure
        argument = Z.conjugate() if self.conjugate_argument else Z
        correction = s.g.inner(X, self.A.apply(argument))
        return covariant_derivative_vf(self.connection, X, Z) - s.xi.scale(correction)

    def metric(self, Z, W):
        return hermitian_metric(self.structure, Z, W)

    def compatibility_defect(self, X, Z1, Z2):
        """X H(Z₁, Z₂) − H(∇′_X Z₁, Z₂) − H(Z₁, ∇′_X Z₂)."""
        h = self.metric(Z1, Z2)
        return sub(sub(X.derivative(h), self.metric(self.covariant(X, Z1), Z2)), self.metric(Z1, self.covariant(X, Z2)))


def hermitian_connection(structure, sample=None, tolerance=IDENTITY_TOLERANCE):
    """The Hermitian connection; only defined on CR-integrable structures."""
    structure.require_symbolic("The Hermitian connection")
    if sample is None:
        sample = Sample.draw(structure.chart, DEFAULT_POINTS, DEFAULT_SEED)
    report = check_kahler_leaves(structure, sample, tolerance)
    if not report.passed:
        raise NotCRIntegrableError(
            f"{structure.name} does not have Kählerian leaves (residual {report.max_residual:.3e}); ∇′ is undefined"
        )
    return HermitianConnectionEval(structure)


def check_hermitian_connection(structure, sample, tolerance=IDENTITY_TOLERANCE, connection=None):
    """∇′ is 𝒟′-valued and compatible with H along every coordinate direction."""
    connection = connection or HermitianConnectionEval(structure)
    points = sample.points
    chart = structure.chart
    directions = [VectorField.coordinate(chart, k) for k in range(chart.dimension)]
    sections = [Z for _, _, Z in spanning_sections(structure)]
    xi_parts, dbar_parts, compatibility = [], [], []
    for X in directions:
        for Z in sections:
            eta_w, dbar = dprime_defect(structure, connection.covariant(X, Z), points)
            xi_parts.append(eta_w[:, None])
            dbar_parts.append(dbar)
        defects = [connection.compatibility_defect(X, Z1, Z2) for Z1 in sections for Z2 in sections]
        if defects:
            compatibility.append(structure.evaluate(defects, points))
    zeros = np.zeros((len(points), 1))
    residuals = {
        "xi_component": np.concatenate(xi_parts, axis=1) if xi_parts else zeros,
        "dbar_component": np.concatenate(dbar_parts, axis=1) if dbar_parts else zeros,
        "hermitian_compatibility": np.concatenate(compatibility, axis=1) if compatibility else zeros,
    }
    return residual_report("hermitian_connection", residuals, tolerance, sample.seed)

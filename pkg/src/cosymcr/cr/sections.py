"""
Sections of the CR bundle 𝒟′ (the +i eigenbundle of φ on ker η), CR integrability
and the Levi form.
"""
import logging
from dataclasses import dataclass

import numpy as np

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE, LEVI_TOLERANCE, SECTION_TOLERANCE
from cosymcr.accs.report import residual_report
from cosymcr.errors import LeviFormInconsistencyError, SectionError
from cosymcr.expr.expression import I, ZERO, is_zero, mul
from cosymcr.fields.calculus import exterior_derivative, lie_bracket
from cosymcr.fields.tensors import VectorField

logger = logging.getLogger(__name__)

# Agreement demanded between the bracket and the dη expressions of the Levi form.
LEVI_CONSISTENCY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CRSection:
    """Z = X − iφX for a real field X with η(X) = 0."""

    structure: object
    X: VectorField
    Z: VectorField
    eta_residual: float
    eigen_residual: float

    @property
    def conjugate(self):
        return self.Z.conjugate()


def horizontal_part(structure, V):
    """V − η(V)ξ, the projection onto ker η."""
    return V - structure.xi.scale(structure.eta.apply(V))


def dprime_section(structure, X, sample=None, tolerance=SECTION_TOLERANCE):
    """Build Z = X − iφX, rejecting X unless η(X) vanishes on the sample."""
    if sample is None:
        points = structure.chart.sample(DEFAULT_POINTS, DEFAULT_SEED)
    else:
        points = sample.points
    eta_x = structure.evaluate([structure.eta.apply(X)], points)[:, 0]
    eta_residual = float(np.max(np.abs(eta_x)))
    if eta_residual > tolerance:
        worst = int(np.argmax(np.abs(eta_x)))
        raise SectionError(f"η(X) = {eta_x[worst]:.3e} at point {tuple(points[worst])}; X is not a section of ker η")
    Z = X - structure.phi.apply(X).scale(I)
    residual = structure.phi.apply(Z) - Z.scale(I)
    eigen_residual = float(np.max(np.abs(structure.evaluate(residual, points))))
    if eigen_residual > tolerance:
        raise SectionError(f"φZ − iZ residual {eigen_residual:.3e} exceeds {tolerance:.1e}")
    return CRSection(structure, X, Z, eta_residual, eigen_residual)


def spanning_sections(structure):
    """
    Sections Z_k = X_k − iφX_k built from the projected coordinate fields
    X_k = ∂_k − η(∂_k)ξ; identically vanishing ones are skipped.
    """
    chart = structure.chart
    sections = []
    for k in range(chart.dimension):
        X = horizontal_part(structure, VectorField.coordinate(chart, k))
        if all(is_zero(c) for c in X.components):
            continue
        Z = X - structure.phi.apply(X).scale(I)
        sections.append((k, X, Z))
    return sections


def dprime_defect(structure, W, points):
    """
    Components of W outside 𝒟′: η(W) and ½(I + iφ)(W − η(W)ξ).
    Returns arrays shaped (N,) and (N, dim).
    """
    eta_w = structure.eta.apply(W)
    horizontal = W - structure.xi.scale(eta_w)
    dbar = (horizontal + structure.phi.apply(horizontal).scale(I)).scale(0.5)
    return structure.evaluate([eta_w], points)[:, 0], structure.evaluate(dbar, points)


def check_cr_integrability(structure, sample, tolerance=IDENTITY_TOLERANCE):
    """[𝒟′, 𝒟′] ⊂ 𝒟′ on the spanning sections."""
    points = sample.points
    sections = spanning_sections(structure)
    eta_parts, dbar_parts = [], []
    for a in range(len(sections)):
        for b in range(a + 1, len(sections)):
            bracket = lie_bracket(sections[a][2], sections[b][2])
            eta_w, dbar = dprime_defect(structure, bracket, points)
            eta_parts.append(eta_w[:, None])
            dbar_parts.append(dbar)
    if not eta_parts:
        zeros = np.zeros((len(points), 1))
        eta_parts, dbar_parts = [zeros], [zeros]
    residuals = {
        "xi_component": np.concatenate(eta_parts, axis=1),
        "dbar_component": np.concatenate(dbar_parts, axis=1),
    }
    return residual_report("cr_integrability", residuals, tolerance, sample.seed)


def levi_form_values(structure, X, points):
    """
    The Levi form of Z = X − iφX evaluated two ways: −iη([Z, Z̄]) and
    −4dη(X, φX). Returns the two complex arrays.
    """
    phi_x = structure.phi.apply(X)
    Z = X - phi_x.scale(I)
    bracket = lie_bracket(Z, Z.conjugate())
    from_bracket = mul(-1j, structure.eta.apply(bracket))
    d_eta = exterior_derivative(structure.eta)
    from_d_eta = mul(-4.0, d_eta.apply(X, phi_x)) if d_eta.components else ZERO
    values = structure.evaluate([from_bracket, from_d_eta], points)
    return values[:, 0], values[:, 1]


def levi_form(structure, section, p):
    """L_p(Z) = −iη([Z, Z̄]_p) = 2η([X, φX]_p) = −4dη(X_p, φX_p)."""
    points = np.atleast_2d(np.asarray(p, dtype=float))
    bracket, d_eta = levi_form_values(structure, section.X, points)
    difference = abs(bracket[0] - d_eta[0])
    if difference > LEVI_CONSISTENCY_TOLERANCE:
        raise LeviFormInconsistencyError(
            f"Levi form expressions disagree by {difference:.3e} at {tuple(points[0])}: bracket {bracket[0]}, dη {d_eta[0]}"
        )
    return float(bracket[0].real)


def check_levi_flat(structure, sample, tolerance=LEVI_TOLERANCE, combinations=3):
    """
    |L| on the spanning sections and on seeded real combinations of them, together
    with the agreement of the two Levi-form expressions.
    """
    points = sample.points
    sections = spanning_sections(structure)
    base = [X for _, X, _ in sections]
    fields = list(base)
    rng = np.random.default_rng(sample.seed if sample.seed is not None else DEFAULT_SEED)
    for _ in range(combinations if base else 0):
        weights = rng.uniform(-1.0, 1.0, len(base))
        combined = base[0].scale(float(weights[0]))
        for weight, X in zip(weights[1:], base[1:]):
            combined = combined + X.scale(float(weight))
        fields.append(combined)
    values, differences = [], []
    for X in fields:
        bracket, d_eta = levi_form_values(structure, X, points)
        values.append(np.abs(bracket)[:, None])
        differences.append(np.abs(bracket - d_eta)[:, None])
    if not values:
        values = differences = [np.zeros((len(points), 1))]
    residuals = {
        "levi_form": np.concatenate(values, axis=1),
        "expression_agreement": np.concatenate(differences, axis=1),
    }
    return residual_report("levi_flat", residuals, tolerance, sample.seed)

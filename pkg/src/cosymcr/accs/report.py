import logging
from dataclasses import dataclass, field

import numpy as np

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Sample:
    """Seeded point sample on a chart."""

    points: np.ndarray
    seed: int = DEFAULT_SEED

    @classmethod
    def draw(cls, chart, count=DEFAULT_POINTS, seed=DEFAULT_SEED):
        return cls(chart.sample(count, seed), seed)

    @classmethod
    def at(cls, points, seed=None):
        points = np.atleast_2d(np.asarray(points, dtype=float))
        return cls(points, seed)

    def __len__(self):
        return self.points.shape[0]


@dataclass
class VerificationReport:
    """Residual statistics of one identity (or a family of identities) over a sample."""

    name: str
    points: int
    max_residual: float
    mean_residual: float
    tolerance: float
    passed: bool
    seed: int = None
    families: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "name": self.name,
            "points": self.points,
            "max_residual": _json_float(self.max_residual),
            "mean_residual": _json_float(self.mean_residual),
            "tolerance": self.tolerance,
            "passed": self.passed,
            "seed": self.seed,
            "families": {key: dict(value) for key, value in sorted(self.families.items())},
            "notes": self.notes,
        }

    def summary_line(self):
        marker = "✅" if self.passed else "❌"
        return f"{marker} {self.name}: max residual {self.max_residual:.3e} (tol {self.tolerance:.1e}, {self.points} points)"


def per_point_max(values):
    """Largest absolute entry per point of an array shaped (N, ...)."""
    values = np.abs(np.asarray(values))
    if values.ndim == 1:
        return values.astype(float)
    flat = values.reshape(values.shape[0], -1)
    if flat.shape[1] == 0:
        return np.zeros(values.shape[0])
    return flat.max(axis=1).astype(float)


def residual_report(name, residuals, tolerance=IDENTITY_TOLERANCE, seed=None, notes=None, passed=None):
    """
    Build a report from per-family residual arrays shaped (N, ...).

    NaN or infinite residuals count as failures. ``passed`` may be supplied by
    checks whose verdict is not the plain tolerance comparison.
    """
    families = {}
    combined = None
    for family, values in residuals.items():
        per_point = per_point_max(values)
        per_point = np.where(np.isfinite(per_point), per_point, np.inf)
        family_max = float(per_point.max()) if per_point.size else 0.0
        families[family] = {
            "max_residual": _json_float(family_max),
            "mean_residual": _json_float(float(per_point.mean()) if per_point.size else 0.0),
            "passed": bool(family_max <= tolerance),
        }
        combined = per_point if combined is None else np.maximum(combined, per_point)
    if combined is None or combined.size == 0:
        max_residual, mean_residual, count = 0.0, 0.0, 0 if combined is None else combined.size
    else:
        max_residual, mean_residual, count = float(combined.max()), float(combined.mean()), combined.size
    if passed is None:
        passed = max_residual <= tolerance
    report = VerificationReport(
        name=name,
        points=int(count),
        max_residual=max_residual,
        mean_residual=mean_residual,
        tolerance=tolerance,
        passed=bool(passed),
        seed=seed,
        families=families,
        notes=notes or {},
    )
    logger.info("%s: max residual %.3e (%s)", name, max_residual, "pass" if report.passed else "fail")
    return report


def _json_float(value):
    if value is None or np.isfinite(value):
        return value
    return "inf" if value > 0 else "-inf"

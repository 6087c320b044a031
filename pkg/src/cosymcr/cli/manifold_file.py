"""
Manifold files: versioned JSON documents naming a chart and exactly one structure
source (a registered model, explicit components, or CR-chart data), optionally with
(κ, μ, ν) expressions and a D-conformal deformation.

    {
      "schema": 1,
      "chart": {"n": 1, "coordinates": ["t", "x", "y"], "box": [[-0.8, 0.8], ...],
                "parameters": {"mu": 1.0}},
      "model": {"name": "model-frame", "n": 1, "mu": 1.0},
      "kmn": {"kappa": "-1", "mu": "mu", "nu": "0"},
      "deformation": {"alpha": 1.0, "beta": "2"}
    }

``structure`` holds ``phi`` (row i, column j = component i of φ∂_j), ``xi``, ``eta`` and
``g``; ``cr_chart`` holds ``a`` (one entry per direction) and ``gh`` (n x n).
"""
import json
import logging
import numbers
from dataclasses import dataclass, field

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE, SCHEMA_VERSION
from cosymcr.accs.kmn import expected_deformed_kmn
from cosymcr.accs.report import Sample
from cosymcr.accs.structure import ChartStructure
from cosymcr.cr.chart_builder import CRChartData, build_from_cr_chart
from cosymcr.errors import Error, ExpressionSyntaxError, ManifoldFileError
from cosymcr.expr.expression import as_expr, to_source
from cosymcr.expr.parser import parse_expression
from cosymcr.fields.chart import ChartDecl
from cosymcr.fields.tensors import KForm, MetricField, Tensor11, VectorField
from cosymcr.models.registry import ModelSpec, build_model, model_kmn

logger = logging.getLogger(__name__)

SOURCES = ("model", "structure", "cr_chart")
OUTPUT_FORMATS = ("text", "json")


@dataclass(frozen=True)
class RunConfig:
    seed: int = DEFAULT_SEED
    points: int = DEFAULT_POINTS
    tolerance: float = IDENTITY_TOLERANCE
    checks: tuple = None
    output_format: str = "text"

    def __post_init__(self):
        if self.points < 1:
            raise ManifoldFileError(f"--points must be at least 1, got {self.points}")
        if not self.tolerance > 0:
            raise ManifoldFileError(f"--tol must be positive, got {self.tolerance}")
        if not 0 <= self.seed < 2 ** 64:
            raise ManifoldFileError("--seed must fit in 64 unsigned bits")
        if self.output_format not in OUTPUT_FORMATS:
            raise ManifoldFileError(f"Unknown output format '{self.output_format}'")
        if self.checks is not None:
            object.__setattr__(self, "checks", tuple(self.checks))

    def sample(self, chart):
        return Sample.draw(chart, self.points, self.seed)

    def to_dict(self):
        return {
            "seed": self.seed,
            "points": self.points,
            "tolerance": self.tolerance,
            "checks": list(self.checks) if self.checks is not None else None,
        }


@dataclass
class Deformation:
    alpha: float
    beta: object


@dataclass
class ManifoldFile:
    chart: ChartDecl
    params: dict
    source: str
    origin: str = "<input>"
    model: ModelSpec = None
    components: dict = None
    cr_data: CRChartData = None
    kmn: tuple = None
    deformation: Deformation = None
    _structure: ChartStructure = field(default=None, repr=False)

    def structure(self):
        """The structure as declared, before any deformation."""
        if self._structure is None:
            if self.source == "model":
                self._structure = build_model(self.model)
            elif self.source == "cr_chart":
                self._structure = build_from_cr_chart(self.cr_data)
            else:
                c = self.components
                self._structure = ChartStructure(
                    chart=self.chart,
                    phi=Tensor11(self.chart, c["phi"]),
                    xi=VectorField(self.chart, c["xi"]),
                    eta=KForm.one_form(self.chart, c["eta"]),
                    g=MetricField(self.chart, c["g"]),
                    params=dict(self.params),
                    name=c.get("name", "structure"),
                )
        return self._structure

    def declared_kmn(self):
        """(κ, μ, ν) of the undeformed structure: explicit, or known for registered models."""
        if self.kmn is not None:
            return self.kmn
        if self.model is not None:
            return model_kmn(self.model)
        return None


def _load_json(path):
    """Loads JSON data from a file."""
    with open(path, "r") as file:
        return json.load(file)


def load_manifold_file(path):
    try:
        data = _load_json(path)
    except json.JSONDecodeError as error:
        raise ManifoldFileError(f"{path}: invalid JSON ({error.msg} at line {error.lineno}, column {error.colno})") from None
    except OSError as error:
        raise ManifoldFileError(f"{path}: {error.strerror}") from None
    return parse_manifold(data, path)


def _require(mapping, key, where):
    if not isinstance(mapping, dict):
        raise ManifoldFileError(f"{where} must be an object")
    if key not in mapping:
        raise ManifoldFileError(f"{where} is missing '{key}'")
    return mapping[key]


class _ExpressionReader:
    """Parses expression entries against one chart, prefixing errors with their location."""

    def __init__(self, chart, origin):
        self.chart = chart
        self.origin = origin

    def __call__(self, value, where):
        if isinstance(value, bool):
            raise ManifoldFileError(f"{self.origin}: {where} must be an expression, got a boolean")
        if isinstance(value, numbers.Number):
            return as_expr(value)
        if not isinstance(value, str):
            raise ManifoldFileError(f"{self.origin}: {where} must be an expression string or a number")
        try:
            return parse_expression(value, self.chart)
        except ExpressionSyntaxError as error:
            error.location = where
            error.args = (f"{self.origin}: {where}: {error.args[0]}",)
            raise

    def vector(self, values, where, length):
        if not isinstance(values, list) or len(values) != length:
            raise ManifoldFileError(f"{self.origin}: {where} must be a list of {length} expressions")
        return [self(v, f"{where}[{k}]") for k, v in enumerate(values)]

    def matrix(self, rows, where, size):
        if not isinstance(rows, list) or len(rows) != size:
            raise ManifoldFileError(f"{self.origin}: {where} must be a {size}x{size} matrix")
        return [self.vector(row, f"{where}[{k}]", size) for k, row in enumerate(rows)]


def _parse_chart(section, origin, n=None):
    if section is None:
        return None, {}
    n_value = _require(section, "n", f"{origin}: chart")
    if n is not None and n_value != n:
        raise ManifoldFileError(f"{origin}: chart.n = {n_value} does not match the model's n = {n}")
    parameters = section.get("parameters", {})
    if not isinstance(parameters, dict) or not all(isinstance(v, numbers.Number) for v in parameters.values()):
        raise ManifoldFileError(f"{origin}: chart.parameters must map names to numbers")
    try:
        chart = ChartDecl(
            int(n_value),
            names=section.get("coordinates"),
            box=section.get("box"),
            parameters=tuple(parameters),
        )
    except (ValueError, TypeError, Error) as error:
        raise ManifoldFileError(f"{origin}: invalid chart ({error})") from None
    return chart, {name: float(value) for name, value in parameters.items()}


def parse_manifold(data, origin="<input>"):
    if not isinstance(data, dict):
        raise ManifoldFileError(f"{origin}: a manifold file is a JSON object")
    schema = data.get("schema")
    if schema != SCHEMA_VERSION:
        raise ManifoldFileError(f"{origin}: unsupported schema {schema!r} (expected {SCHEMA_VERSION})")
    present = [key for key in SOURCES if key in data]
    if len(present) != 1:
        found = ", ".join(present) or "none"
        raise ManifoldFileError(f"{origin}: exactly one of {', '.join(SOURCES)} is required (found {found})")
    source = present[0]

    if source == "model":
        section = data["model"]
        name = _require(section, "name", f"{origin}: model")
        spec = ModelSpec(name, int(section.get("n", 1)), float(section.get("mu", 0.0)))
        declared, _ = _parse_chart(data.get("chart"), origin, spec.n)
        base = spec.chart()
        chart = base if declared is None else ChartDecl(base.n, base.names, declared.box, base.parameters)
        manifold = ManifoldFile(chart, dict(spec.params), source, origin, model=spec)
    else:
        chart, params = _parse_chart(_require(data, "chart", origin), origin)
        read = _ExpressionReader(chart, origin)
        if source == "structure":
            section = data["structure"]
            dim = chart.dimension
            components = {
                "phi": read.matrix(_require(section, "phi", f"{origin}: structure"), "structure.phi", dim),
                "xi": read.vector(_require(section, "xi", f"{origin}: structure"), "structure.xi", dim),
                "eta": read.vector(_require(section, "eta", f"{origin}: structure"), "structure.eta", dim),
                "g": read.matrix(_require(section, "g", f"{origin}: structure"), "structure.g", dim),
                "name": str(section.get("name", "structure")),
            }
            manifold = ManifoldFile(chart, params, source, origin, components=components)
        else:
            section = data["cr_chart"]
            a = read.vector(_require(section, "a", f"{origin}: cr_chart"), "cr_chart.a", chart.n)
            gh = read.matrix(_require(section, "gh", f"{origin}: cr_chart"), "cr_chart.gh", chart.n)
            name = str(section.get("name", "cr-chart"))
            manifold = ManifoldFile(chart, params, source, origin, cr_data=CRChartData(chart, tuple(a), tuple(map(tuple, gh)), params, name))

    read = _ExpressionReader(manifold.chart, origin)
    if "kmn" in data:
        section = data["kmn"]
        manifold.kmn = tuple(read(_require(section, key, f"{origin}: kmn"), f"kmn.{key}") for key in ("kappa", "mu", "nu"))
    if "deformation" in data:
        section = data["deformation"]
        alpha = section.get("alpha", 1.0) if isinstance(section, dict) else None
        if not isinstance(alpha, numbers.Number) or isinstance(alpha, bool):
            raise ManifoldFileError(f"{origin}: deformation.alpha must be a number")
        beta = read(_require(section, "beta", f"{origin}: deformation"), "deformation.beta")
        manifold.deformation = Deformation(float(alpha), beta)
    logger.debug("Loaded %s (%s source, n=%d)", origin, source, manifold.chart.n)
    return manifold


def structure_to_dict(structure, kmn=None):
    """Manifold-file document with explicit component expressions."""
    chart = structure.chart
    dim = chart.dimension
    document = {
        "schema": SCHEMA_VERSION,
        "chart": {
            "n": chart.n,
            "coordinates": list(chart.names),
            "box": [list(interval) for interval in chart.box],
            "parameters": {name: structure.params[name] for name in sorted(structure.params)},
        },
        "structure": {
            "name": structure.name,
            "phi": [[to_source(structure.phi.matrix[i][j]) for j in range(dim)] for i in range(dim)],
            "xi": [to_source(c) for c in structure.xi.components],
            "eta": [to_source(structure.eta.component(i)) for i in range(dim)],
            "g": [[to_source(structure.g[i, j]) for j in range(dim)] for i in range(dim)],
        },
    }
    if kmn is not None:
        document["kmn"] = {key: to_source(as_expr(value)) for key, value in zip(("kappa", "mu", "nu"), kmn)}
    return document


def dump_document(document):
    return json.dumps(document, indent=2, sort_keys=True, ensure_ascii=False)


def deformed_kmn(structure, deformation, kmn):
    if kmn is None:
        return None
    return expected_deformed_kmn(structure, deformation.beta, *kmn)

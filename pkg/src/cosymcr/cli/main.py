"""
Command-line front end.

    cosymcr verify [FILE] [--model NAME --n N --mu MU] [--checks a,b] [--format json]
    cosymcr estimate-kmn [FILE] ...
    cosymcr deform [FILE] --alpha A --beta EXPR [--output PATH]
    cosymcr list-models
    cosymcr report REPORT.json ... [--output-format csv|parquet|jsonl] [--output-dir DIR]

Exit codes: 0 when every selected check passes, 1 when a check fails, 2 on input errors.
"""
import argparse
import logging
import sys

import pandas as pd

from cosymcr.config import DEFAULT_POINTS, DEFAULT_SEED, IDENTITY_TOLERANCE, LEVI_TOLERANCE
from cosymcr.accs.checks import (
    check_acm_axioms,
    check_almost_cosymplectic,
    check_cosymplectic,
    check_cosymplectic_equivalences,
    check_kahler_leaves,
)
from cosymcr.accs.deformation import check_deformation_admissible, d_conformal_deform
from cosymcr.accs.kmn import check_kmn, check_kmn_relations, estimate_kmn, perrone_report
from cosymcr.accs.report import VerificationReport
from cosymcr.cli.manifold_file import (
    Deformation,
    ManifoldFile,
    RunConfig,
    deformed_kmn,
    dump_document,
    load_manifold_file,
    structure_to_dict,
)
from cosymcr.cli.tabular import OUTPUT_FORMATS, ReportTabulator
from cosymcr.cr.chart_builder import check_theorem_relations, extract_cr_chart_data
from cosymcr.cr.hermitian import check_hermitian_connection, hermitian_connection
from cosymcr.cr.sections import check_cr_integrability, check_levi_flat
from cosymcr.errors import DeformationError, Error, ManifoldFileError, NotCRIntegrableError, UnsupportedDimensionError
from cosymcr.expr.parser import parse_expression
from cosymcr.models.registry import ModelSpec, check_commutators, list_models

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2

DEFAULT_CHECKS = (
    "acm-axioms",
    "almost-cosymplectic",
    "kahler-leaves",
    "cr-integrability",
    "levi-flat",
    "cosymplectic-equivalences",
    "kmn",
    "kmn-relations",
    "hermitian",
)
EXTRA_CHECKS = ("cosymplectic", "perrone", "commutators", "cr-chart-relations", "deformation-admissible")
ALL_CHECKS = DEFAULT_CHECKS + EXTRA_CHECKS


class Skipped(Exception):
    """A selected check that does not apply to the input."""


class VerifyRun:
    """The structure under test together with everything the checks need."""

    def __init__(self, manifold, config, levi_tolerance):
        self.manifold = manifold
        self.config = config
        self.levi_tolerance = levi_tolerance
        base = manifold.structure()
        self.sample = config.sample(manifold.chart)
        kmn = manifold.declared_kmn()
        if manifold.deformation is not None:
            d = manifold.deformation
            self.structure = d_conformal_deform(base, d.alpha, d.beta, self.sample, config.tolerance)
            self.kmn = deformed_kmn(base, d, kmn)
        else:
            self.structure = base
            self.kmn = kmn
        self.base = base

    def run(self, name):
        tol = self.config.tolerance
        s, sample = self.structure, self.sample
        if name == "acm-axioms":
            return check_acm_axioms(s, sample, tol)
        if name == "almost-cosymplectic":
            return check_almost_cosymplectic(s, sample, tol)
        if name == "kahler-leaves":
            return check_kahler_leaves(s, sample, tol)
        if name == "cr-integrability":
            return check_cr_integrability(s, sample, tol)
        if name == "levi-flat":
            return check_levi_flat(s, sample, self.levi_tolerance)
        if name == "cosymplectic-equivalences":
            return check_cosymplectic_equivalences(s, sample, tol)
        if name == "cosymplectic":
            return check_cosymplectic(s, sample, tol)
        if name in ("kmn", "kmn-relations"):
            if self.kmn is None:
                raise Skipped("no (κ, μ, ν) declared")
            check = check_kmn if name == "kmn" else check_kmn_relations
            return check(s, *self.kmn, sample, tol)
        if name == "hermitian":
            try:
                connection = hermitian_connection(s, sample, tol)
            except (NotCRIntegrableError, UnsupportedDimensionError) as error:
                raise Skipped(str(error)) from None
            return check_hermitian_connection(s, sample, tol, connection)
        if name == "perrone":
            if s.chart.n != 1:
                raise Skipped("p is defined for n = 1 only")
            return perrone_report(s, sample, tol)
        if name == "commutators":
            model = self.manifold.model
            if model is None or not model.is_model_space or self.manifold.deformation is not None:
                raise Skipped("commutator table applies to undeformed model spaces")
            return check_commutators(model, sample, tol)
        if name == "cr-chart-relations":
            try:
                data = self.manifold.cr_data or extract_cr_chart_data(s, sample, tol)
            except Error as error:
                raise Skipped(str(error)) from None
            return check_theorem_relations(data, s, sample, tol)
        if name == "deformation-admissible":
            d = self.manifold.deformation
            if d is None:
                raise Skipped("no deformation declared")
            return check_deformation_admissible(self.base, d.alpha, d.beta, sample, tol)
        raise ManifoldFileError(f"Unknown check '{name}'")


def build_parser():
    parser = argparse.ArgumentParser(prog="cosymcr", description="Verify almost cosymplectic and CR structure identities.")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    commands = parser.add_subparsers(dest="command", required=True)

    def structure_arguments(sub):
        sub.add_argument("file", nargs="?", help="manifold file (JSON, schema 1)")
        sub.add_argument("--model", help="registered model name (see list-models)")
        sub.add_argument("--n", type=int, default=1, help="CR dimension n (default 1)")
        sub.add_argument("--mu", type=float, default=0.0, help="μ of the model space (default 0)")
        sub.add_argument("--points", type=int, default=DEFAULT_POINTS)
        sub.add_argument("--tol", type=float, default=IDENTITY_TOLERANCE)
        sub.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sub.add_argument("--format", choices=("text", "json"), default="text")
        sub.add_argument("--alpha", type=float, help="D-conformal α (positive constant)")
        sub.add_argument("--beta", help="D-conformal β expression")
        sub.add_argument("--verbose", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)

    verify = commands.add_parser("verify", help="run the identity checks")
    structure_arguments(verify)
    verify.add_argument("--checks", help=f"comma list from: {', '.join(ALL_CHECKS)}")
    verify.add_argument("--levi-tol", type=float, default=LEVI_TOLERANCE)

    estimate = commands.add_parser("estimate-kmn", help="fit (κ, μ, ν) pointwise")
    structure_arguments(estimate)

    deform = commands.add_parser("deform", help="apply a D-conformal deformation and print the new manifold file")
    structure_arguments(deform)
    deform.add_argument("--output", help="write the manifold file here instead of stdout")

    commands.add_parser("list-models", help="list the registered models")

    report = commands.add_parser("report", help="convert JSON reports into a table")
    report.add_argument("reports", nargs="+")
    report.add_argument("--output-format", choices=OUTPUT_FORMATS, default="csv")
    report.add_argument("--output-dir", default="data")
    report.add_argument("--depth-cutoff", type=int, default=3)
    return parser


def _manifold_from_args(args):
    if args.file and args.model:
        raise ManifoldFileError("Give either a manifold file or --model, not both")
    if args.file:
        manifold = load_manifold_file(args.file)
    elif args.model:
        spec = ModelSpec(args.model, args.n, args.mu)
        manifold = ManifoldFile(spec.chart(), dict(spec.params), "model", spec.label, model=spec)
    else:
        raise ManifoldFileError("A manifold file or --model is required")
    if args.beta is not None or args.alpha is not None:
        beta = parse_expression(args.beta, manifold.chart) if args.beta is not None else parse_expression("1", manifold.chart)
        manifold.deformation = Deformation(1.0 if args.alpha is None else args.alpha, beta)
    return manifold


def _config_from_args(args, checks=None):
    return RunConfig(seed=args.seed, points=args.points, tolerance=args.tol, checks=checks, output_format=args.format)


def _selected_checks(args):
    if not args.checks:
        return DEFAULT_CHECKS
    names = tuple(name.strip() for name in args.checks.split(",") if name.strip())
    unknown = [name for name in names if name not in ALL_CHECKS]
    if unknown:
        raise ManifoldFileError(f"Unknown check(s): {', '.join(unknown)}")
    return names


def _emit(document, args, text_lines):
    if args.format == "json":
        print(dump_document(document))
    else:
        for line in text_lines:
            print(line)


def cmd_verify(args):
    checks = _selected_checks(args)
    config = _config_from_args(args, checks)
    manifold = _manifold_from_args(args)
    try:
        run = VerifyRun(manifold, config, args.levi_tol)
    except DeformationError as error:
        report = getattr(error, "report", None)
        return _deformation_rejected(args, manifold, error, report)

    reports, skipped = [], {}
    for name in checks:
        try:
            reports.append(run.run(name))
        except Skipped as reason:
            logger.info("Skipping %s: %s", name, reason)
            skipped[name] = str(reason)
    passed = all(report.passed for report in reports)
    document = {
        "command": "verify",
        "source": manifold.origin,
        "structure": run.structure.name,
        "mode": run.structure.mode,
        "config": config.to_dict(),
        "checks": [report.to_dict() for report in reports],
        "skipped": skipped,
        "passed": passed,
    }
    lines = [f"Verifying {run.structure.name} on {len(run.sample)} points (seed {config.seed})"]
    if run.structure.numeric_only:
        lines.append(f"numeric-only: Γ and R are computed pointwise in dimension {run.structure.chart.dimension}")
    lines += [report.summary_line() for report in reports]
    lines += [f"⏭️ {name}: skipped ({reason})" for name, reason in skipped.items()]
    lines.append("✅ all checks passed" if passed else "❌ some checks failed")
    _emit(document, args, lines)
    return EXIT_OK if passed else EXIT_FAILED


def _deformation_rejected(args, manifold, error, report):
    document = {
        "command": args.command,
        "source": manifold.origin,
        "error": str(error),
        "checks": [report.to_dict()] if isinstance(report, VerificationReport) else [],
        "passed": False,
    }
    _emit(document, args, [f"❌ {error}"])
    return EXIT_FAILED


def cmd_estimate_kmn(args):
    config = _config_from_args(args)
    manifold = _manifold_from_args(args)
    try:
        run = VerifyRun(manifold, config, LEVI_TOLERANCE)
    except DeformationError as error:
        return _deformation_rejected(args, manifold, error, getattr(error, "report", None))
    result = estimate_kmn(run.structure, run.sample.points)
    records = result.to_records()
    document = {
        "command": "estimate-kmn",
        "source": manifold.origin,
        "structure": run.structure.name,
        "mode": run.structure.mode,
        "config": config.to_dict(),
        "points": records,
        "max_residual": result.residual,
        "underdetermined": result.any_underdetermined,
    }
    table = pd.DataFrame(records, columns=["kappa", "mu", "nu", "residual", "undetermined"])
    table["undetermined"] = table["undetermined"].map(lambda names: ",".join(names) or "-")
    lines = [f"(κ, μ, ν) of {run.structure.name} at {len(records)} points", table.to_string(na_rep="underdetermined")]
    _emit(document, args, lines)
    return EXIT_OK


def cmd_deform(args):
    config = _config_from_args(args)
    manifold = _manifold_from_args(args)
    if manifold.deformation is None:
        raise ManifoldFileError("deform needs --beta (and optionally --alpha) or a deformation in the file")
    try:
        run = VerifyRun(manifold, config, LEVI_TOLERANCE)
    except DeformationError as error:
        return _deformation_rejected(args, manifold, error, getattr(error, "report", None))
    text = dump_document(structure_to_dict(run.structure, run.kmn))
    if args.output:
        with open(args.output, "w") as file:
            file.write(text + "\n")
        logger.info("Wrote deformed structure to %s", args.output)
    else:
        print(text)
    return EXIT_OK


def cmd_list_models(args):
    for model in list_models():
        print(f"{model['name']:<18} {model['description']}")
    return EXIT_OK


def cmd_report(args):
    tabulator = ReportTabulator(args.depth_cutoff, args.output_format, args.output_dir)
    try:
        path = tabulator.convert(args.reports)
    except (ValueError, OSError) as error:
        raise ManifoldFileError(str(error)) from None
    print(f"✅ Report table written to {path}")
    return EXIT_OK


COMMANDS = {
    "verify": cmd_verify,
    "estimate-kmn": cmd_estimate_kmn,
    "deform": cmd_deform,
    "list-models": cmd_list_models,
    "report": cmd_report,
}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return EXIT_INPUT if exit_.code else EXIT_OK
    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except (Error, ValueError) as error:
        print(f"❌ {error}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

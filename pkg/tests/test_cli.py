import json

import numpy as np
import pandas as pd
import pytest

from cosymcr.cli.main import DEFAULT_CHECKS, EXIT_FAILED, EXIT_INPUT, EXIT_OK, main
from cosymcr.cli.manifold_file import RunConfig, load_manifold_file, parse_manifold
from cosymcr.cli.tabular import ReportTabulator
from cosymcr.errors import ExpressionSyntaxError, ManifoldFileError

FAST = ["--points", "6", "--seed", "3"]


def _run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_verify_model_space_passes(capsys):
    code, document = _run_json(capsys, ["verify", "--model", "model-frame", "--mu", "1"] + FAST)
    assert code == EXIT_OK
    assert document["passed"]
    assert [check["name"] for check in document["checks"]][0] == "acm_axioms"
    assert document["skipped"] == {}
    assert document["config"] == {"seed": 3, "points": 6, "tolerance": 1e-8, "checks": list(DEFAULT_CHECKS)}


def test_verify_beyond_the_symbolic_limit(capsys):
    code, document = _run_json(capsys, ["verify", "--model", "flat", "--n", "4"] + FAST)
    assert code == EXIT_OK
    assert document["passed"]
    assert document["mode"] == "numeric-only"
    assert set(document["skipped"]) == {"hermitian"}
    notes = {check["name"]: check["notes"] for check in document["checks"]}
    assert notes["kahler_leaves"]["mode"] == "numeric-only"
    assert notes["kmn"]["mode"] == "numeric-only"

    argv = ["verify", "--model", "flat", "--n", "4", "--checks", "acm-axioms,almost-cosymplectic,kahler-leaves"]
    code, document = _run_json(capsys, argv + FAST)
    assert code == EXIT_OK
    assert [check["name"] for check in document["checks"]] == ["acm_axioms", "almost_cosymplectic", "kahler_leaves"]

    assert main(["verify", "--model", "flat", "--n", "4", "--checks", "kahler-leaves"] + FAST) == EXIT_OK
    assert "numeric-only: Γ and R are computed pointwise in dimension 9" in capsys.readouterr().out


def test_verify_reports_symbolic_mode(capsys):
    code, document = _run_json(capsys, ["verify", "--model", "model-frame", "--n", "2", "--mu", "3", "--checks", "kahler-leaves,kmn"] + FAST)
    assert code == EXIT_OK
    assert document["mode"] == "symbolic"
    assert all("mode" not in check["notes"] for check in document["checks"])


def test_verify_output_is_deterministic(capsys):
    argv = ["verify", "--model", "flat", "--checks", "acm-axioms,kmn", "--format", "json"] + FAST
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_twisted_control_fails(capsys):
    code, document = _run_json(capsys, ["verify", "--model", "control-twisted", "--n", "2", "--points", "4"])
    assert code == EXIT_FAILED
    assert not document["passed"]
    verdicts = {check["name"]: check["passed"] for check in document["checks"]}
    assert verdicts["almost_cosymplectic"]
    assert not verdicts["kahler_leaves"]
    assert not verdicts["cr_integrability"]
    assert set(document["skipped"]) == {"kmn", "kmn-relations", "hermitian"}


def test_extra_checks_and_skips(capsys):
    code, document = _run_json(
        capsys,
        ["verify", "--model", "model-frame", "--mu", "1", "--checks", "perrone,commutators,cr-chart-relations,deformation-admissible"] + FAST,
    )
    assert code == EXIT_OK
    assert [check["name"] for check in document["checks"]] == ["perrone_p", "commutators"]
    assert set(document["skipped"]) == {"cr-chart-relations", "deformation-admissible"}

    code, document = _run_json(capsys, ["verify", "--model", "model-global-cr", "--mu", "1", "--checks", "cr-chart-relations"] + FAST)
    assert code == EXIT_OK
    assert document["checks"][0]["name"] == "cr_chart_relations"


def test_text_output(capsys):
    code = main(["verify", "--model", "control-contact", "--checks", "levi-flat,almost-cosymplectic"] + FAST)
    out = capsys.readouterr().out
    assert code == EXIT_FAILED
    assert "❌ levi_flat" in out
    assert out.strip().endswith("❌ some checks failed")


def test_input_errors(tmp_path, capsys):
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["verify", str(broken)]) == EXIT_INPUT
    assert main(["verify"]) == EXIT_INPUT
    assert main(["verify", "--model", "model-frame", "--checks", "everything"]) == EXIT_INPUT
    assert main(["verify", "--model", "sphere"]) == EXIT_INPUT
    assert main(["verify", "--model", "flat", "--points", "0"]) == EXIT_INPUT
    assert main(["no-such-command"]) == EXIT_INPUT
    assert "❌" in capsys.readouterr().err


def test_estimate_kmn(capsys):
    code, document = _run_json(capsys, ["estimate-kmn", "--model", "model-frame", "--mu", "1", "--points", "3"])
    assert code == EXIT_OK
    assert len(document["points"]) == 3
    for record in document["points"]:
        assert record["kappa"] == pytest.approx(-1.0, abs=1e-8)
        assert record["mu"] == pytest.approx(1.0, abs=1e-8)
    main(["estimate-kmn", "--model", "flat", "--points", "2"])
    assert "mu,nu" in capsys.readouterr().out


def test_deform_round_trip(tmp_path, capsys):
    first = tmp_path / "deformed.json"
    assert main(["deform", "--model", "model-frame", "--mu", "1", "--beta", "2", "--output", str(first)]) == EXIT_OK
    document = json.loads(first.read_text())
    assert document["kmn"]["kappa"] == "(-0.25)"
    assert document["chart"]["parameters"]["mu"] == 1.0

    second = tmp_path / "again.json"
    assert main(["deform", str(first), "--alpha", "1", "--beta", "1", "--output", str(second)]) == EXIT_OK
    a, b = load_manifold_file(str(first)), load_manifold_file(str(second))
    points = a.chart.sample(5, seed=1)
    for name in ("g", "phi", "xi", "eta"):
        np.testing.assert_allclose(
            getattr(a.structure(), name).evaluate(points, a.params),
            getattr(b.structure(), name).evaluate(points, b.params),
            atol=1e-12,
        )

    assert main(["verify", str(first), "--checks", "acm-axioms,almost-cosymplectic,kmn"] + FAST) == EXIT_OK


def test_deform_prints_to_stdout(capsys):
    assert main(["deform", "--model", "flat", "--beta", "3"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["structure"]["g"][0][0] == "9.0"


def test_rejected_deformation(capsys):
    code, document = _run_json(capsys, ["deform", "--model", "model-frame", "--beta", "x1"] + FAST)
    assert code == EXIT_FAILED
    assert not document["passed"]
    assert document["checks"][0]["name"] == "deformation_admissible"
    assert main(["deform", "--model", "flat"]) == EXIT_INPUT


def test_list_models(capsys):
    assert main(["list-models"]) == EXIT_OK
    out = capsys.readouterr().out
    for name in ("flat", "model-frame", "model-global-cr", "control-twisted", "control-contact"):
        assert name in out


def test_manifold_file_sources():
    chart = {"n": 1, "coordinates": ["t", "x", "y"], "parameters": {"mu": 0.5}}
    structure = parse_manifold(
        {
            "schema": 1,
            "chart": chart,
            "structure": {
                "phi": [[0, 0, 0], [0, 0, -1], [0, 1, 0]],
                "xi": ["1", 0, 0],
                "eta": [1, 0, 0],
                "g": [[1, 0, 0], [0, "exp(mu*t)", 0], [0, 0, "exp(-mu*t)"]],
            },
            "kmn": {"kappa": "0", "mu": "mu", "nu": "0"},
        }
    )
    assert structure.source == "structure"
    assert structure.params == {"mu": 0.5}
    assert structure.declared_kmn()[1].name == "mu"
    cr = parse_manifold({"schema": 1, "chart": chart, "cr_chart": {"a": ["-zb + 0.5*i*mu*z"], "gh": [["0.5"]]}})
    assert cr.structure().name == "cr-chart"
    model = parse_manifold({"schema": 1, "model": {"name": "model-frame", "mu": 3}, "deformation": {"beta": "exp(t)"}})
    assert model.deformation.alpha == 1.0
    assert model.declared_kmn() == (-1.0, 3.0, 0.0)


def test_manifold_file_errors():
    with pytest.raises(ManifoldFileError, match="schema"):
        parse_manifold({"schema": 2, "model": {"name": "flat"}})
    with pytest.raises(ManifoldFileError, match="exactly one"):
        parse_manifold({"schema": 1, "model": {"name": "flat"}, "cr_chart": {}})
    with pytest.raises(ManifoldFileError, match="does not match"):
        parse_manifold({"schema": 1, "model": {"name": "flat", "n": 2}, "chart": {"n": 1}})
    with pytest.raises(ManifoldFileError, match="list of 1 expressions"):
        parse_manifold({"schema": 1, "chart": {"n": 1}, "cr_chart": {"a": [], "gh": [[1]]}})
    with pytest.raises(ExpressionSyntaxError) as info:
        parse_manifold({"schema": 1, "chart": {"n": 1}, "cr_chart": {"a": ["x1 +"], "gh": [[1]]}}, "m.json")
    assert str(info.value).startswith("m.json: cr_chart.a[0]: ")
    assert info.value.location == "cr_chart.a[0]"


def test_run_config_validation():
    with pytest.raises(ManifoldFileError):
        RunConfig(tolerance=0)
    with pytest.raises(ManifoldFileError):
        RunConfig(output_format="yaml")
    assert RunConfig(checks=["kmn"]).to_dict()["checks"] == ["kmn"]


def test_report_tables(tmp_path, capsys):
    report = tmp_path / "verify.json"
    main(["verify", "--model", "flat", "--checks", "acm-axioms,levi-flat", "--format", "json"] + FAST)
    report.write_text(capsys.readouterr().out)
    estimate = tmp_path / "estimate.json"
    main(["estimate-kmn", "--model", "model-frame", "--points", "2", "--format", "json"])
    estimate.write_text(capsys.readouterr().out)

    code = main(["report", str(report), str(estimate), "--output-dir", str(tmp_path)])
    assert code == EXIT_OK
    tables = list((tmp_path / "tabular").glob("report_*.csv"))
    assert len(tables) == 1
    frame = pd.read_csv(tables[0])
    assert len(frame) == 4
    assert {"command", "structure", "name", "max_residual", "point.0", "kappa"} <= set(frame.columns)
    assert main(["report", str(tmp_path / "missing.json"), "--output-dir", str(tmp_path)]) == EXIT_INPUT


def test_tabulator_flattening():
    tabulator = ReportTabulator(depth_cutoff=2)
    row = tabulator.flatten({"point": [0.1, 0.2], "undetermined": ["mu", "nu"], "families": {"a": {"max": 1}}, "nested": {"x": [{"y": 1}]}})
    assert row["point.0"] == 0.1
    assert row["undetermined"] == "mu,nu"
    assert row["families.a"] == json.dumps({"max": 1}, sort_keys=True)
    assert row["nested.x"] == json.dumps([{"y": 1}], sort_keys=True)
    with pytest.raises(ValueError):
        ReportTabulator(output_format="xlsx")


def test_table_name_follows_the_report_rows():
    tabulator = ReportTabulator(output_format="parquet")
    passing = {"structure": "flat", "checks": [{"name": "acm_axioms", "passed": True, "max_residual": 0.0}]}
    failing = {"structure": "flat", "checks": [{"name": "acm_axioms", "passed": False, "max_residual": 0.5}]}
    name = tabulator.table_name([passing])
    assert name.startswith("report_flat_") and name.endswith(".parquet")
    assert tabulator.table_name([dict(passing)]) == name
    assert tabulator.table_name([failing]) != name
    assert tabulator.table_name([{"structure": "model-frame(n=1, mu=1)", "points": []}]).startswith("report_model-frame-n-1-mu-1_")

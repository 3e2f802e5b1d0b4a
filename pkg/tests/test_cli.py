"""End-to-end runs of the command-line interface via main(argv)."""

import csv
import json

import numpy as np
import pytest
from numpy.random import default_rng

from rigidity3d import fileio, generators, shapes, suspensions
from rigidity3d.cli import main
from rigidity3d.hessian import lambda_matrix


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def octa_path(tmp_path):
    path = tmp_path / "octa.json"
    fileio.save(path, shapes.octahedron())
    return str(path)


@pytest.fixture
def star_path(tmp_path):
    path = tmp_path / "star.json"
    fileio.save(path, generators.star_suspension(default_rng(4), 6))
    return str(path)


def square_bipyramid():
    return suspensions.build_suspension(
        (0, 0, 1.0),
        (0, 0, -1.0),
        [(np.cos(t), np.sin(t), 0.0) for t in np.linspace(0, 2 * np.pi, 5)[:-1]],
    )


# ---------------------------------------------------------------------------
# exit codes and usage
# ---------------------------------------------------------------------------


def test_help_exits_zero(capsys):
    assert run(capsys, "--help")[0] == 0


def test_missing_subcommand_is_usage_error(capsys):
    assert run(capsys)[0] == 1


def test_bad_edge_syntax_is_usage_error(capsys, octa_path):
    code, _, _ = run(capsys, "dent", octa_path, "--edge", "9", "--out", "x")
    assert code == 1


def test_missing_file_exits_one(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.json"))
    assert code == 1 and "error" in err


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def test_analyze_octahedron_text(capsys, octa_path):
    code, out, _ = run(capsys, "analyze", octa_path)
    assert code == 0
    assert "rigid" in out and "strongly_strictly_convex" in out


def test_analyze_json_deterministic(capsys, octa_path):
    code, out1, _ = run(capsys, "analyze", octa_path, "--json", "--seed", "9")
    code2, out2, _ = run(capsys, "analyze", octa_path, "--json", "--seed", "9")
    assert code == code2 == 0
    a, b = json.loads(out1), json.loads(out2)
    a.pop("timings"), b.pop("timings")
    assert a == b
    assert a["seed"] == 9


def test_analyze_respects_rank_tol(capsys, octa_path):
    code, out, _ = run(capsys, "analyze", octa_path, "--json", "--rank-tol", "5e-4")
    assert code == 0
    assert json.loads(out)["tolerances"]["rank_tol"] == 5e-4


def test_out_of_range_tolerance_exits_one(capsys, octa_path):
    code, _, err = run(capsys, "analyze", octa_path, "--rank-tol", "10.0")
    assert code == 1 and "rank_tol" in err


# ---------------------------------------------------------------------------
# suspend / lambda / stress
# ---------------------------------------------------------------------------


def test_suspend_deterministic_and_analyzable(capsys, tmp_path):
    p1, p2 = str(tmp_path / "a.json"), str(tmp_path / "b.json")
    assert run(capsys, "suspend", "--n", "5", "--profile", "convex",
               "--seed", "7", "--out", p1)[0] == 0
    assert run(capsys, "suspend", "--n", "5", "--profile", "convex",
               "--seed", "7", "--out", p2)[0] == 0
    d1, d2 = fileio.load(p1).document, fileio.load(p2).document
    assert fileio.instance_hash(d1) == fileio.instance_hash(d2)
    assert d1["metadata"]["profile"] == "convex"

    code, out, _ = run(capsys, "analyze", p1, "--json")
    verdicts = json.loads(out)["verdicts"]
    assert code == 0
    assert verdicts["ns_decomposable"] is True
    assert verdicts["lambda"] > 0
    assert verdicts["rigid"] is True


def test_lambda_scalar_csv_sums_to_total(capsys, tmp_path):
    path = tmp_path / "square.json"
    fileio.save(path, square_bipyramid())
    code, out, _ = run(capsys, "lambda", str(path), "--csv")
    assert code == 0
    rows = list(csv.DictReader(out.splitlines()))
    assert len(rows) == 4
    total = sum(float(r["simplex_term"]) for r in rows)
    assert total == pytest.approx(8.0, abs=1e-9)


def test_lambda_matrix_on_decomposition(capsys, tmp_path, star_path):
    s = fileio.load(star_path).suspension
    path = tmp_path / "axis.json"
    fileio.save(path, suspensions.axis_decomposition(s))
    code, out, _ = run(capsys, "lambda", str(path), "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["kind"] == "lambda_matrix"
    assert len(payload["eigenvalues"]) == 1
    assert payload["rigid"] is True


def test_lambda_needs_structure(capsys, tmp_path):
    fw_doc = fileio.to_document(shapes.octahedron())
    del fw_doc["faces"]
    path = tmp_path / "bare.json"
    fileio.save(path, fw_doc)
    code, _, err = run(capsys, "lambda", str(path))
    assert code == 1 and "suspension" in err


def test_stress_inductive_is_proper_equilibrium(capsys, star_path):
    code, out, _ = run(capsys, "stress", star_path, "--inductive", "--json")
    assert code == 0
    payload = json.loads(out)
    assert payload["residual"] < 1e-9
    for rec in payload["edges"]:
        if rec["kind"] == "cable":
            assert rec["omega"] >= -1e-12
        if rec["kind"] == "strut":
            assert rec["omega"] <= 1e-12


def test_stress_space_trivial_on_octahedron(capsys, octa_path):
    code, out, _ = run(capsys, "stress", octa_path)
    assert code == 0 and "dimension 0" in out


# ---------------------------------------------------------------------------
# dent
# ---------------------------------------------------------------------------


def test_dent_pipeline(capsys, octa_path, tmp_path):
    out_path = str(tmp_path / "dented.json")
    code, out, _ = run(capsys, "dent", octa_path, "--edge", "2,3",
                       "--out", out_path)
    assert code == 0 and "(0, 1)" in out
    code, out, _ = run(capsys, "analyze", out_path, "--json")
    verdicts = json.loads(out)["verdicts"]
    assert verdicts["convexity"] == "weakly_strictly_convex"
    assert verdicts["reflex_edges"] == [[0, 1]]
    assert fileio.load(out_path).metadata["dented_edges"] == [[2, 3]]


def test_dent_rejects_non_edge(capsys, octa_path, tmp_path):
    code, _, err = run(capsys, "dent", octa_path, "--edge", "0,1",
                       "--out", str(tmp_path / "x.json"))
    assert code == 1 and "not an edge" in err


def test_dent_rejects_flat_edge(capsys, tmp_path):
    path = tmp_path / "pyramid.json"
    fileio.save(path, shapes.square_pyramid())
    code, _, err = run(capsys, "dent", str(path), "--edge", "0,2",
                       "--out", str(tmp_path / "x.json"))
    assert code == 1 and "coplanar" in err


# ---------------------------------------------------------------------------
# signs
# ---------------------------------------------------------------------------


def test_signs_rigid_framework(capsys, octa_path):
    code, out, _ = run(capsys, "signs", octa_path)
    assert code == 0 and "no nontrivial flex" in out


def test_signs_trivial_flex_index(capsys, octa_path):
    code, out, _ = run(capsys, "signs", octa_path, "--flex-index", "0")
    assert code == 0 and "all dihedral rates vanish" in out


def test_signs_flex_index_out_of_range(capsys, octa_path):
    code, _, err = run(capsys, "signs", octa_path, "--flex-index", "99")
    assert code == 1 and "--flex-index" in err


def test_signs_on_flexible_fixture(capsys, tmp_path):
    fixture = generators.flexible_suspension_fixture()
    path = tmp_path / "flex.json"
    fileio.save(path, fixture.suspension)
    code, out, _ = run(capsys, "signs", str(path), "--json")
    assert code == 0
    payload = json.loads(out)
    totals = payload["totals"]
    assert totals["sign_changes"] == 16
    assert totals["bounds_contradict"] is True
    bad = [v for v in payload["vertices"] if not v["ok"]]
    assert bad and all(not v["convex"] for v in bad)


# ---------------------------------------------------------------------------
# probe-pd
# ---------------------------------------------------------------------------


def test_probe_pd_report_deterministic_and_replayable(capsys, tmp_path):
    out1, out2 = tmp_path / "p1", tmp_path / "p2"
    code, text, _ = run(capsys, "probe-pd", "--trials", "4", "--seed", "3",
                        "--out", str(out1))
    assert code == 0 and "trials 4" in text
    assert run(capsys, "probe-pd", "--trials", "4", "--seed", "3",
               "--out", str(out2))[0] == 0
    r1 = (out1 / "report.json").read_text()
    r2 = (out2 / "report.json").read_text()
    assert r1 == r2
    report = json.loads(r1)
    assert report["summary"]["non_pd_weakly_convex"] == 0
    with open(out1 / "trials.csv") as fh:
        assert len(list(csv.DictReader(fh))) == report["summary"]["trials"]

    # every recorded trial regenerates from its seed alone
    trial = report["trials"][0]
    rng = default_rng(tuple(trial["seed"]))
    d = generators.probe_decomposition(trial["kind"], rng)
    lam = lambda_matrix(d)
    assert lam.min_eigenvalue == pytest.approx(trial["min_eigenvalue"], abs=1e-9)

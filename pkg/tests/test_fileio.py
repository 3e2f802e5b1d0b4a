"""Document round trips, validation pointers, reports, CSV, and OFF."""

import csv
import io
import json

import numpy as np
import pytest
from numpy.random import default_rng

from rigidity3d import fileio, generators, shapes, suspensions
from rigidity3d.fileio import FileFormatError
from rigidity3d.frameworks import EdgeKind, Framework

OCTA_HASH_PREFIX = "07fd2dd1f34f"


def octa_doc(**extra):
    doc = fileio.to_document(shapes.octahedron())
    doc.update(extra)
    return json.loads(json.dumps(doc))


# ---------------------------------------------------------------------------
# round trips
# ---------------------------------------------------------------------------


def test_surface_round_trip_is_bitwise(tmp_path):
    surface = generators.random_convex_hull_surface(default_rng(11), 12)
    path = tmp_path / "hull.json"
    fileio.save(path, surface)
    loaded = fileio.load(path)
    assert np.array_equal(loaded.surface.vertices, surface.vertices)
    assert loaded.surface.edges == surface.edges
    assert set(map(tuple, loaded.surface.faces)) == set(map(tuple, surface.faces))
    assert loaded.framework.edge_pairs == surface.edges


def test_framework_round_trip_keeps_edge_kinds(tmp_path):
    fw = Framework(
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [
            (0, 1, EdgeKind.CABLE),
            (0, 2, EdgeKind.STRUT),
            (0, 3, EdgeKind.BAR),
            (1, 2, EdgeKind.BAR),
            (1, 3, EdgeKind.CABLE),
            (2, 3, EdgeKind.STRUT),
        ],
    )
    path = tmp_path / "tensegrity.json"
    fileio.save(path, fw)
    loaded = fileio.load(path)
    assert loaded.framework.edges == fw.edges
    assert loaded.surface is None and loaded.suspension is None


def test_suspension_round_trip(tmp_path):
    s = generators.star_suspension(default_rng(3), 6)
    path = tmp_path / "star.json"
    doc = fileio.save(path, s, metadata={"origin": "star"})
    assert doc["poles"] == {"north": 0, "south": 1}
    assert doc["equator"] == list(range(2, 8))
    loaded = fileio.load(path)
    assert loaded.suspension is not None
    assert np.array_equal(loaded.suspension.surface.vertices, s.surface.vertices)
    assert loaded.metadata == {"origin": "star"}


def test_decomposition_round_trip(tmp_path):
    s = generators.star_suspension(default_rng(5), 7)
    d = suspensions.axis_decomposition(s)
    path = tmp_path / "axis.json"
    fileio.save(path, d)
    loaded = fileio.load(path)
    assert loaded.decomposition is not None
    assert loaded.decomposition.tetrahedra == d.tetrahedra
    assert loaded.decomposition.interior_edges == d.interior_edges
    assert loaded.decomposition.surface is not None


def test_octahedron_document_counts():
    doc = octa_doc()
    assert len(doc["vertices"]) == 6
    assert len(doc["edges"]) == 12
    assert len(doc["faces"]) == 8


def test_save_accepts_raw_document(tmp_path):
    doc = octa_doc()
    path = tmp_path / "raw.json"
    fileio.save(path, doc)
    assert fileio.load(path).document == doc


def test_edge_kind_defaults_to_bar():
    doc = octa_doc()
    for e in doc["edges"]:
        del e["kind"]
    loaded = fileio.from_document(doc)
    assert all(kind is EdgeKind.BAR for _, _, kind in loaded.framework.edges)


# ---------------------------------------------------------------------------
# validation errors carry JSON pointers
# ---------------------------------------------------------------------------


def test_edge_index_out_of_range():
    doc = octa_doc()
    doc["edges"][3]["j"] = 99
    with pytest.raises(FileFormatError, match=r"/edges/3/j"):
        fileio.validate_document(doc)


def test_unknown_edge_kind_rejected():
    doc = octa_doc()
    doc["edges"][0]["kind"] = "rope"
    with pytest.raises(FileFormatError, match=r"/edges/0/kind"):
        fileio.validate_document(doc)


def test_loop_edge_rejected():
    doc = octa_doc()
    doc["edges"][0] = {"i": 2, "j": 2}
    with pytest.raises(FileFormatError, match="loop"):
        fileio.validate_document(doc)


def test_poles_require_equator():
    doc = octa_doc(poles={"north": 0, "south": 1})
    with pytest.raises(FileFormatError, match="together"):
        fileio.validate_document(doc)


def test_face_edges_must_match_edge_list():
    doc = octa_doc()
    doc["edges"].append({"i": 0, "j": 1, "kind": "bar"})
    with pytest.raises(FileFormatError, match="do not match"):
        fileio.from_document(doc)


def test_inconsistent_faces_rejected_with_pointer():
    doc = octa_doc()
    doc["faces"][0] = [0, 2, 5]
    with pytest.raises(FileFormatError, match=r"/faces"):
        fileio.from_document(doc)


def test_missing_required_field():
    doc = octa_doc()
    del doc["version"]
    with pytest.raises(FileFormatError, match="version"):
        fileio.validate_document(doc)


def test_bad_json_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(FileFormatError, match="not valid JSON"):
        fileio.load(path)


# ---------------------------------------------------------------------------
# hashing and reports
# ---------------------------------------------------------------------------


def test_instance_hash_pinned_and_metadata_free():
    bare = fileio.instance_hash(octa_doc())
    tagged = fileio.instance_hash(octa_doc(metadata={"name": "x"}))
    assert bare == tagged
    assert bare.startswith(OCTA_HASH_PREFIX)


def test_instance_hash_sees_geometry():
    doc = octa_doc()
    doc["vertices"][0][0] += 1e-12
    assert fileio.instance_hash(doc) != fileio.instance_hash(octa_doc())


def test_analysis_report_deterministic_modulo_timings(tmp_path):
    path = tmp_path / "octa.json"
    fileio.save(path, shapes.octahedron())
    a = fileio.analysis_report(fileio.load(path), seed=5)
    b = fileio.analysis_report(fileio.load(path), seed=5)
    assert "timings" in a
    a = {k: v for k, v in a.items() if k != "timings"}
    b = {k: v for k, v in b.items() if k != "timings"}
    assert a == b


def test_analysis_report_octahedron_verdicts():
    report = fileio.analysis_report(fileio.from_document(octa_doc()))
    v = report["verdicts"]
    assert v["rigid"] is True
    assert v["flex_dimension"] == 6
    assert v["trivial_dimension"] == 6
    assert v["stress_space_dimension"] == 0
    assert v["convexity"] == "strongly_strictly_convex"
    assert v["reflex_edges"] == []
    assert report["tolerances"] == {"rank_tol": 1e-9, "geom_tol": 1e-9}


def test_analysis_report_square_bipyramid_lambda():
    s = suspensions.build_suspension(
        (0, 0, 1.0),
        (0, 0, -1.0),
        [(np.cos(t), np.sin(t), 0.0) for t in np.linspace(0, 2 * np.pi, 5)[:-1]],
    )
    report = fileio.analysis_report(fileio.from_document(fileio.to_document(s)))
    v = report["verdicts"]
    assert v["ns_decomposable"] is True
    assert v["lambda"] == pytest.approx(8.0, abs=1e-9)


def test_analysis_report_decomposition_verdicts():
    s = generators.star_suspension(default_rng(8), 6)
    d = suspensions.axis_decomposition(s)
    report = fileio.analysis_report(fileio.from_document(fileio.to_document(d)))
    v = report["verdicts"]
    assert v["interior_edges"] == 1
    assert len(v["lambda_eigenvalues"]) == 1
    assert v["rigid_by_lambda"] == v["rigid"]


# ---------------------------------------------------------------------------
# CSV and tables
# ---------------------------------------------------------------------------


def test_csv_floats_parse_back_bitwise():
    rows = [(0, 0.1 + 0.2, -1e-17), (1, np.pi / 3, 2.0 / 3.0)]
    buf = io.StringIO()
    fileio.write_csv(buf, ("k", "x", "y"), rows)
    buf.seek(0)
    parsed = list(csv.reader(buf))
    assert parsed[0] == ["k", "x", "y"]
    for raw, row in zip(parsed[1:], rows):
        assert int(raw[0]) == row[0]
        assert float(raw[1]) == row[1] and float(raw[2]) == row[2]


def test_lambda_breakdown_table_square_bipyramid():
    s = suspensions.build_suspension(
        (0, 0, 1.0),
        (0, 0, -1.0),
        [(np.cos(t), np.sin(t), 0.0) for t in np.linspace(0, 2 * np.pi, 5)[:-1]],
    )
    header, rows = fileio.lambda_breakdown_table(suspensions.lambda_scalar(s))
    assert header[0] == "simplex" and len(rows) == 4
    for k, term, a, b, height, vertex in rows:
        assert term == pytest.approx(2.0, abs=1e-12)
        assert a == pytest.approx(0.25, abs=1e-12)
        assert b == pytest.approx(0.5, abs=1e-12)
        assert height == pytest.approx(0.0, abs=1e-12)
        assert vertex == pytest.approx(2.0, abs=1e-12)


def test_matrix_table_shapes():
    header, rows = fileio.matrix_table(np.arange(6.0).reshape(2, 3))
    assert header == ("row", "col0", "col1", "col2")
    assert rows[1] == (1, 3.0, 4.0, 5.0)


# ---------------------------------------------------------------------------
# OFF import/export
# ---------------------------------------------------------------------------


def test_off_round_trip(tmp_path):
    octa = shapes.octahedron()
    path = tmp_path / "octa.off"
    path.write_text(fileio.dump_off(octa))
    surface = fileio.load_off(path)
    assert np.allclose(surface.vertices, octa.vertices)
    assert surface.edges == octa.edges
    assert set(map(tuple, surface.faces)) == set(map(tuple, octa.faces))


def test_off_skips_comments(tmp_path):
    path = tmp_path / "tet.off"
    path.write_text(
        "OFF\n# a comment line\n4 4 6\n"
        "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
        "3 0 2 1\n3 0 1 3\n3 1 2 3\n3 0 3 2\n"
    )
    surface = fileio.load_off(path)
    assert len(surface.faces) == 4


def test_off_rejects_non_triangles(tmp_path):
    path = tmp_path / "quad.off"
    path.write_text(
        "OFF\n5 1 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n1 1 1\n4 0 1 2 3\n"
    )
    with pytest.raises(FileFormatError, match="only triangles"):
        fileio.load_off(path)


def test_off_rejects_missing_header(tmp_path):
    path = tmp_path / "x.off"
    path.write_text("4 4 6\n0 0 0\n")
    with pytest.raises(FileFormatError, match="OFF"):
        fileio.load_off(path)


def test_off_truncated(tmp_path):
    path = tmp_path / "short.off"
    path.write_text("OFF\n4 4 6\n0 0 0\n1 0 0\n")
    with pytest.raises(FileFormatError, match="truncated"):
        fileio.load_off(path)

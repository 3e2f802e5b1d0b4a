"""Serialization: one JSON document format for all the library's objects,
analysis reports, CSV tables, and a minimal OFF importer.

A document is a vertex set plus optional views of it -- an edge list
(framework), a face list (closed surface), poles and an equator order
(suspension), and tetrahedra (decomposition).  Floats are written with
`repr`, so a save/load round trip reproduces the in-memory values
bitwise.
"""

import csv
import hashlib
import io
import json
import time
from dataclasses import dataclass
from importlib import resources

import jsonschema
import numpy as np

from .frameworks import EdgeKind, Framework
from .geometry import DEFAULT_TOL, GeometryError, PolyhedralSurface, Tolerances
from .hessian import Decomposition, DecompositionError
from .suspensions import Suspension, SuspensionError, build_suspension

VERSION = 1


class FileFormatError(Exception):
    pass


def _schema():
    text = resources.files("rigidity3d.schema").joinpath(
        "framework.schema.json"
    ).read_text()
    return json.loads(text)


_VALIDATOR = jsonschema.Draft202012Validator(_schema())


def _pointer(path):
    return "/" + "/".join(str(p) for p in path)


def validate_document(doc):
    """Schema plus index-range validation; errors carry a JSON pointer."""
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise FileFormatError(f"{_pointer(e.absolute_path)}: {e.message}")

    n = len(doc["vertices"])

    def check_index(value, path):
        if not 0 <= value < n:
            raise FileFormatError(
                f"{_pointer(path)}: vertex index {value} out of range for {n} vertices"
            )

    for k, e in enumerate(doc["edges"]):
        check_index(e["i"], ("edges", k, "i"))
        check_index(e["j"], ("edges", k, "j"))
        if e["i"] == e["j"]:
            raise FileFormatError(f"{_pointer(('edges', k))}: edge is a loop")
    for k, face in enumerate(doc.get("faces", [])):
        for m, v in enumerate(face):
            check_index(v, ("faces", k, m))
    if "poles" in doc:
        check_index(doc["poles"]["north"], ("poles", "north"))
        check_index(doc["poles"]["south"], ("poles", "south"))
    for k, v in enumerate(doc.get("equator", [])):
        check_index(v, ("equator", k))
    for k, tet in enumerate(doc.get("tetrahedra", [])):
        for m, v in enumerate(tet):
            check_index(v, ("tetrahedra", k, m))
    if ("poles" in doc) != ("equator" in doc):
        raise FileFormatError("/poles: poles and equator must be given together")
    return doc


# ---------------------------------------------------------------------------
# object -> document
# ---------------------------------------------------------------------------


def _edge_records(framework):
    return [
        {"i": i, "j": j, "kind": kind.value} for i, j, kind in framework.edges
    ]


def to_document(obj, metadata=None):
    """JSON document for a Framework, PolyhedralSurface, Suspension or
    Decomposition."""
    doc = {"version": VERSION}
    if isinstance(obj, Framework):
        doc["vertices"] = [list(map(float, p)) for p in obj.vertices]
        doc["edges"] = _edge_records(obj)
    elif isinstance(obj, PolyhedralSurface):
        doc["vertices"] = [list(map(float, p)) for p in obj.vertices]
        doc["edges"] = [{"i": i, "j": j, "kind": "bar"} for i, j in obj.edges]
        doc["faces"] = [list(map(int, f)) for f in obj.faces]
    elif isinstance(obj, Suspension):
        doc.update(to_document(obj.surface))
        doc["poles"] = {"north": 0, "south": 1}
        doc["equator"] = list(range(2, 2 + obj.n))
    elif isinstance(obj, Decomposition):
        if obj.surface is not None:
            doc.update(to_document(obj.surface))
        else:
            doc["vertices"] = [list(map(float, p)) for p in obj.vertices]
            doc["edges"] = [
                {"i": i, "j": j, "kind": "bar"} for i, j in obj.boundary_edges
            ]
        doc["tetrahedra"] = [list(map(int, t)) for t in obj.tetrahedra]
    else:
        raise FileFormatError(f"cannot serialize {type(obj).__name__}")
    if metadata:
        doc["metadata"] = metadata
    return validate_document(doc)


# ---------------------------------------------------------------------------
# document -> objects
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoadedInstance:
    """All the views a document supports, constructed eagerly."""

    document: dict
    framework: Framework
    surface: PolyhedralSurface | None
    suspension: Suspension | None
    decomposition: Decomposition | None

    @property
    def vertices(self):
        return self.framework.vertices

    @property
    def metadata(self):
        return self.document.get("metadata", {})


def from_document(doc, tol: Tolerances = DEFAULT_TOL):
    validate_document(doc)
    vertices = np.array(doc["vertices"], dtype=float)
    framework = Framework(
        vertices,
        [(e["i"], e["j"], EdgeKind(e.get("kind", "bar"))) for e in doc["edges"]],
        tol=tol,
    )
    surface = None
    if "faces" in doc:
        try:
            surface = PolyhedralSurface(vertices, doc["faces"], tol)
        except GeometryError as exc:
            raise FileFormatError(f"/faces: {exc}") from None
        if set(surface.edges) != set(framework.edge_pairs):
            raise FileFormatError(
                "/faces: face edges do not match the edge list"
            )
    suspension = None
    if "poles" in doc:
        poles = doc["poles"]
        try:
            suspension = build_suspension(
                vertices[poles["north"]],
                vertices[poles["south"]],
                vertices[doc["equator"]],
                tol,
            )
        except (GeometryError, SuspensionError) as exc:
            raise FileFormatError(f"/poles: {exc}") from None
    decomposition = None
    if "tetrahedra" in doc:
        tets = [tuple(t) for t in doc["tetrahedra"]]
        tet_edges = set()
        for t in tets:
            tet_edges.update(
                tuple(sorted((t[a], t[b])))
                for a in range(4)
                for b in range(a + 1, 4)
            )
        boundary = (
            set(surface.edges)
            if surface is not None
            else {tuple(sorted((e["i"], e["j"]))) for e in doc["edges"]}
        )
        try:
            decomposition = Decomposition(
                vertices, tets, sorted(tet_edges - boundary), surface=surface, tol=tol
            )
        except DecompositionError as exc:
            raise FileFormatError(f"/tetrahedra: {exc}") from None
    return LoadedInstance(doc, framework, surface, suspension, decomposition)


def save(path, obj, metadata=None, tol: Tolerances = DEFAULT_TOL):
    doc = obj if isinstance(obj, dict) else to_document(obj, metadata)
    validate_document(doc)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    return doc


def load(path, tol: Tolerances = DEFAULT_TOL):
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from None
    return from_document(doc, tol)


# ---------------------------------------------------------------------------
# analysis reports
# ---------------------------------------------------------------------------


def instance_hash(doc):
    """Hash of the geometric content (metadata excluded)."""
    body = {k: v for k, v in doc.items() if k != "metadata"}
    text = json.dumps(body, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def analysis_report(loaded: LoadedInstance, tol: Tolerances = DEFAULT_TOL, seed=None):
    """Verdict block for a loaded instance.

    Deterministic given (document, seed, tolerances) except for the
    timings section, which is informational only and excluded from the
    instance hash.
    """
    from .frameworks import bar_flex_space, equilibrium_stress_space
    from .geometry import classify_convexity
    from .hessian import lambda_matrix, rigidity_from_lambda
    from .suspensions import is_ns_decomposable, lambda_scalar

    verdicts = {}
    timings = {}

    t0 = time.perf_counter()
    space = bar_flex_space(loaded.framework, tol)
    verdicts["rigid"] = space.dimension == space.trivial_dimension
    verdicts["flex_dimension"] = space.dimension
    verdicts["trivial_dimension"] = space.trivial_dimension
    verdicts["stress_space_dimension"] = len(
        equilibrium_stress_space(loaded.framework, tol)
    )
    timings["framework"] = time.perf_counter() - t0

    if loaded.surface is not None:
        t0 = time.perf_counter()
        report = classify_convexity(loaded.surface, tol)
        verdicts["convexity"] = report.classification.value
        verdicts["reflex_edges"] = [list(e) for e in report.reflex_edges]
        timings["convexity"] = time.perf_counter() - t0

    if loaded.suspension is not None:
        t0 = time.perf_counter()
        dec = is_ns_decomposable(loaded.suspension, tol)
        verdicts["ns_decomposable"] = bool(dec)
        if dec:
            verdicts["lambda"] = lambda_scalar(loaded.suspension, tol).total
        else:
            verdicts["ns_decomposability_obstruction"] = dec.reason
        timings["suspension"] = time.perf_counter() - t0

    if loaded.decomposition is not None:
        t0 = time.perf_counter()
        lam = lambda_matrix(loaded.decomposition, tol=tol)
        verdicts["interior_edges"] = loaded.decomposition.r
        verdicts["lambda_eigenvalues"] = sorted(map(float, lam.eigenvalues))
        verdicts["rigid_by_lambda"] = rigidity_from_lambda(loaded.decomposition, tol)
        timings["decomposition"] = time.perf_counter() - t0

    return {
        "verdicts": verdicts,
        "tolerances": {"rank_tol": tol.rank_tol, "geom_tol": tol.geom_tol},
        "seed": seed,
        "instance_hash": instance_hash(loaded.document),
        "timings": timings,
    }


# ---------------------------------------------------------------------------
# CSV tables
# ---------------------------------------------------------------------------


def write_csv(fh, header, rows):
    """CSV with repr-formatted floats (lossless parse-back)."""
    writer = csv.writer(fh)
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])


def lambda_breakdown_table(breakdown):
    """(header, rows) for the per-simplex invariant breakdown."""
    header = (
        "simplex",
        "simplex_term",
        "a",
        "b",
        "height_term",
        "vertex_term",
    )
    rows = [
        (
            k,
            float(breakdown.simplex_terms[k]),
            float(breakdown.a[k]),
            float(breakdown.b[k]),
            float(breakdown.height_terms[k]),
            float(breakdown.vertex_terms[k]),
        )
        for k in range(len(breakdown.simplex_terms))
    ]
    return header, rows


def matrix_table(matrix):
    matrix = np.asarray(matrix, dtype=float)
    header = tuple(["row"] + [f"col{j}" for j in range(matrix.shape[1])])
    rows = [tuple([i] + [float(x) for x in matrix[i]]) for i in range(matrix.shape[0])]
    return header, rows


# ---------------------------------------------------------------------------
# minimal OFF import (triangles only)
# ---------------------------------------------------------------------------


def load_off(path, tol: Tolerances = DEFAULT_TOL):
    """Read a triangulated OFF file into a PolyhedralSurface."""
    if hasattr(path, "read"):
        tokens = _off_tokens(path.read())
    else:
        with open(path) as fh:
            tokens = _off_tokens(fh.read())
    if not tokens or tokens[0].upper() != "OFF":
        raise FileFormatError("not an OFF file (missing OFF header)")
    cursor = iter(tokens[1:])

    def take(count, convert):
        try:
            return [convert(next(cursor)) for _ in range(count)]
        except StopIteration:
            raise FileFormatError("truncated OFF file") from None
        except ValueError as exc:
            raise FileFormatError(f"malformed OFF token: {exc}") from None

    nv, nf, _ = take(3, int)
    vertices = np.array(take(3 * nv, float)).reshape(nv, 3)
    faces = []
    for k in range(nf):
        (size,) = take(1, int)
        if size != 3:
            raise FileFormatError(
                f"face {k} has {size} vertices; only triangles are supported"
            )
        faces.append(take(3, int))
    return PolyhedralSurface(vertices, faces, tol)


def _off_tokens(text):
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        tokens.extend(body.split())
    return tokens


def dump_off(surface):
    """OFF text for a surface (round-trip counterpart of load_off)."""
    out = io.StringIO()
    out.write("OFF\n")
    out.write(f"{surface.n_vertices} {surface.n_faces} {surface.n_edges}\n")
    for p in surface.vertices:
        out.write(" ".join(repr(float(x)) for x in p) + "\n")
    for f in surface.faces:
        out.write("3 " + " ".join(str(int(v)) for v in f) + "\n")
    return out.getvalue()

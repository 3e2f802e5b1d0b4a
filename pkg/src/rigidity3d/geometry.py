"""Low-level 3D geometry for rigidity analysis.

Polyhedral surfaces (closed, oriented, triangulated), convexity
classification, dihedral angles, vertex links, projective maps, pole
normalization for suspensions, and Cayley-Menger feasibility of edge
lengths.

Conventions:

* vertex coordinates are float64 arrays of shape (n, 3);
* faces are integer triples with consistent orientation; at construction
  the orientation is normalized so the enclosed signed volume is
  non-negative (outward normals);
* tolerance predicates rescale to unit diameter first, so ``geom_tol``
  and ``rank_tol`` are dimensionless.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, QhullError

logger = logging.getLogger(__name__)

DEFAULT_RANK_TOL = 1e-9
DEFAULT_GEOM_TOL = 1e-9


class GeometryError(Exception):
    """Invalid geometric input (degenerate, non-manifold, unexposed...)."""


@dataclass(frozen=True)
class Tolerances:
    """Numerical cutoffs shared by every predicate in the package.

    rank_tol  -- singular values below rank_tol * s_max count as zero.
    geom_tol  -- coincidence / coplanarity / strictness cutoff on
                 unit-diameter geometry.
    """

    rank_tol: float = DEFAULT_RANK_TOL
    geom_tol: float = DEFAULT_GEOM_TOL

    def __post_init__(self):
        for name in ("rank_tol", "geom_tol"):
            value = getattr(self, name)
            if not (0.0 < value < 1e-3):
                raise ValueError(f"{name} must lie in (0, 1e-3), got {value!r}")


DEFAULT_TOL = Tolerances()


@dataclass(frozen=True)
class Point3:
    """A single point in R^3. Convenience wrapper; most code uses arrays."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(np.isfinite([self.x, self.y, self.z])):
            raise GeometryError(f"non-finite coordinates: {self}")

    def as_array(self):
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, a):
        a = np.asarray(a, dtype=float).reshape(3)
        return cls(float(a[0]), float(a[1]), float(a[2]))


def as_points(obj):
    """Coerce a list of Point3 / array-like into an (n, 3) float array."""
    if isinstance(obj, np.ndarray) and obj.ndim == 2 and obj.shape[1] == 3:
        return np.array(obj, dtype=float)
    if len(obj) and isinstance(obj[0], Point3):
        return np.array([p.as_array() for p in obj])
    arr = np.asarray(obj, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise GeometryError(f"expected (n, 3) coordinates, got shape {arr.shape}")
    return arr


def diameter(points):
    """Largest pairwise distance of a point configuration."""
    points = np.asarray(points, dtype=float)
    diffs = points[:, None, :] - points[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=2)).max())


def unit(v):
    n = np.linalg.norm(v)
    if n == 0.0:
        raise GeometryError("cannot normalize the zero vector")
    return v / n


# ---------------------------------------------------------------------------
# polyhedral surfaces
# ---------------------------------------------------------------------------


@dataclass
class PolyhedralSurface:
    """Closed oriented triangulated surface.

    Invariants enforced at construction: every directed edge appears in
    exactly one face (so every undirected edge borders exactly two faces
    and the orientation is consistent), the edge graph is connected,
    v - e + f = 2 and 2e = 3f, no repeated index inside a face, and no
    two vertices coincide within tolerance.  Faces are flipped as a block
    if the signed volume comes out negative, so normals point outward.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __init__(self, vertices, faces, tol: Tolerances = DEFAULT_TOL):
        vertices = as_points(vertices)
        faces = np.array(faces, dtype=int)
        if faces.ndim != 2 or faces.shape[1] != 3:
            raise GeometryError(f"faces must be (f, 3) index triples, got {faces.shape}")
        if not np.all(np.isfinite(vertices)):
            raise GeometryError("non-finite vertex coordinates")
        n = len(vertices)
        if faces.min(initial=0) < 0 or faces.max(initial=-1) >= n:
            raise GeometryError("face index out of range")
        for f_idx, tri in enumerate(faces):
            if len(set(tri)) != 3:
                raise GeometryError(f"face {f_idx} repeats a vertex index: {tuple(tri)}")

        self._check_manifold(faces, n)
        self._check_coincidence(vertices, tol)

        if _signed_volume(vertices, faces) < 0.0:
            faces = faces[:, ::-1]

        vertices.flags.writeable = False
        faces = np.ascontiguousarray(faces)
        faces.flags.writeable = False
        self.vertices = vertices
        self.faces = faces

    @staticmethod
    def _check_manifold(faces, n_vertices):
        directed = {}
        for f_idx, (a, b, c) in enumerate(faces):
            for u, v in ((a, b), (b, c), (c, a)):
                if (u, v) in directed:
                    raise GeometryError(
                        f"directed edge ({u}, {v}) appears in faces "
                        f"{directed[(u, v)]} and {f_idx}: inconsistent orientation"
                    )
                directed[(u, v)] = f_idx
        for (u, v) in directed:
            if (v, u) not in directed:
                raise GeometryError(f"edge ({u}, {v}) borders only one face: surface not closed")

        e = len(directed) // 2
        f = len(faces)
        if 2 * e != 3 * f:
            raise GeometryError(f"2e = 3f violated: e={e}, f={f}")
        if n_vertices - e + f != 2:
            raise GeometryError(
                f"Euler count v - e + f = {n_vertices - e + f}, expected 2 "
                f"(v={n_vertices}, e={e}, f={f})"
            )

        # connectivity over the edge graph
        adj = [[] for _ in range(n_vertices)]
        for (u, v) in directed:
            adj[u].append(v)
        seen = np.zeros(n_vertices, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        if not seen.all():
            raise GeometryError("surface is not connected")

    @staticmethod
    def _check_coincidence(vertices, tol):
        diam = diameter(vertices)
        if diam == 0.0:
            raise GeometryError("all vertices coincide")
        diffs = vertices[:, None, :] - vertices[None, :, :]
        dist = np.sqrt((diffs**2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        i, j = np.unravel_index(np.argmin(dist), dist.shape)
        if dist[i, j] <= tol.geom_tol * diam:
            raise GeometryError(f"vertices {i} and {j} coincide within tolerance")

    # -- derived combinatorics ---------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_faces(self):
        return len(self.faces)

    @cached_property
    def edges(self):
        """Undirected edges as sorted (i, j) pairs, lexicographically ordered."""
        pairs = set()
        for a, b, c in map(tuple, self.faces.tolist()):
            pairs.update({tuple(sorted((a, b))), tuple(sorted((b, c))), tuple(sorted((c, a)))})
        return tuple(sorted(pairs))

    @property
    def n_edges(self):
        return len(self.edges)

    @cached_property
    def _directed_face(self):
        table = {}
        for f_idx, (a, b, c) in enumerate(self.faces):
            table[(a, b)] = f_idx
            table[(b, c)] = f_idx
            table[(c, a)] = f_idx
        return table

    def edge_faces(self, i, j):
        """Indices of the faces containing directed edges (i,j) and (j,i)."""
        try:
            return self._directed_face[(i, j)], self._directed_face[(j, i)]
        except KeyError:
            raise GeometryError(f"({i}, {j}) is not an edge of the surface") from None

    @cached_property
    def vertex_faces(self):
        incident = [[] for _ in range(self.n_vertices)]
        for f_idx, tri in enumerate(self.faces):
            for v in tri:
                incident[v].append(f_idx)
        return tuple(tuple(fs) for fs in incident)

    def neighbors_cyclic(self, v):
        """Neighbors of v in cyclic order around the vertex star."""
        succ = {}
        for f_idx in self.vertex_faces[v]:
            tri = [int(w) for w in self.faces[f_idx]]
            k = tri.index(v)
            a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
            if a in succ:
                raise GeometryError(f"non-manifold star at vertex {v}")
            succ[a] = b
        if len(succ) < 3:
            raise GeometryError(f"vertex {v} has fewer than 3 incident faces")
        start = next(iter(succ))
        cycle = [start]
        while True:
            nxt = succ.get(cycle[-1])
            if nxt is None:
                raise GeometryError(f"non-manifold star at vertex {v}")
            if nxt == start:
                break
            cycle.append(nxt)
            if len(cycle) > len(succ):
                raise GeometryError(f"non-manifold star at vertex {v}")
        if len(cycle) != len(succ):
            raise GeometryError(f"vertex star of {v} is not a single cycle")
        return cycle

    @cached_property
    def signed_volume(self):
        return _signed_volume(self.vertices, self.faces)

    @cached_property
    def diameter(self):
        return diameter(self.vertices)

    def face_normal(self, f_idx, tol: Tolerances = DEFAULT_TOL):
        """Outward unit normal of face f_idx; error if the face is degenerate."""
        a, b, c = self.faces[f_idx]
        p = self.vertices
        cross = np.cross(p[b] - p[a], p[c] - p[a])
        area2 = np.linalg.norm(cross)
        if area2 <= tol.geom_tol * self.diameter**2:
            raise GeometryError(f"face {f_idx} = {(a, b, c)} is degenerate (zero area)")
        return cross / area2

    def _replace_vertices(self, new_vertices, tol: Tolerances = DEFAULT_TOL):
        return PolyhedralSurface(new_vertices, np.array(self.faces), tol=tol)


def _signed_volume(vertices, faces):
    v = vertices[faces]
    return float(np.einsum("ij,ij->i", v[:, 0], np.cross(v[:, 1], v[:, 2])).sum() / 6.0)


# ---------------------------------------------------------------------------
# dihedral angles and convexity
# ---------------------------------------------------------------------------


def dihedral_angle(surface, edge, tol: Tolerances = DEFAULT_TOL):
    """Interior dihedral angle along an edge, in (0, 2*pi).

    Measured inside the solid bounded by the surface: a convex edge gives
    an angle below pi, a reflex ("non-convex") edge gives one above pi.
    """
    i, j = edge
    f1, f2 = surface.edge_faces(i, j)
    n1 = surface.face_normal(f1, tol)
    n2 = surface.face_normal(f2, tol)
    u = unit(surface.vertices[j] - surface.vertices[i])
    angle = np.pi - np.arctan2(np.dot(np.cross(n1, n2), u), np.dot(n1, n2))
    if angle <= 0.0:
        angle += 2.0 * np.pi
    return float(angle)


class Convexity(Enum):
    STRONGLY_STRICTLY_CONVEX = "strongly_strictly_convex"
    WEAKLY_STRICTLY_CONVEX = "weakly_strictly_convex"
    NOT_WEAKLY_CONVEX = "not_weakly_convex"


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of classify_convexity.

    edge_flags maps each undirected edge to "convex", "reflex" or "flat"
    according to its dihedral angle; unexposed_edges lists edges that are
    locally convex but admit no support plane touching the surface at
    exactly that edge.
    """

    classification: Convexity
    edge_flags: dict
    nonexposed_vertices: tuple
    unexposed_edges: tuple
    notes: tuple = ()

    @property
    def reflex_edges(self):
        return tuple(e for e, flag in self.edge_flags.items() if flag == "reflex")

    @property
    def is_weakly_convex(self):
        return self.classification is not Convexity.NOT_WEAKLY_CONVEX


def _edge_flags(surface, tol):
    flags = {}
    for e in surface.edges:
        try:
            a = dihedral_angle(surface, e, tol)
        except GeometryError:
            flags[e] = "flat"
            continue
        if a > np.pi + tol.geom_tol:
            flags[e] = "reflex"
        elif a < np.pi - tol.geom_tol:
            flags[e] = "convex"
        else:
            flags[e] = "flat"
    return flags


def support_functional(points, touching, tol: Tolerances = DEFAULT_TOL):
    """Best support plane touching the hull exactly at `touching`.

    Maximizes delta subject to u . p_t = c for t in touching,
    u . p_k <= c - delta otherwise, |u|_inf <= 1.  Returns (u, c, delta)
    with delta in the same length units as the points; the touching set
    is exposed iff delta > geom_tol * diameter.
    """
    points = np.asarray(points, dtype=float)
    touching = sorted(set(int(t) for t in touching))
    others = [k for k in range(len(points)) if k not in touching]
    # variables: u(3), c, delta
    c_obj = np.array([0.0, 0.0, 0.0, 0.0, -1.0])
    a_eq = np.hstack([points[touching], -np.ones((len(touching), 1)), np.zeros((len(touching), 1))])
    b_eq = np.zeros(len(touching))
    a_ub = np.hstack([points[others], -np.ones((len(others), 1)), np.ones((len(others), 1))])
    b_ub = np.zeros(len(others))
    bounds = [(-1, 1)] * 3 + [(None, None), (0, None)]
    res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if not res.success:
        return np.zeros(3), 0.0, 0.0
    u = res.x[:3]
    return u, float(res.x[3]), float(res.x[4])


def _is_exposed_edge(points, i, j, tol):
    _, _, delta = support_functional(points, (i, j), tol)
    return delta > tol.geom_tol * diameter(points)


def classify_convexity(surface, tol: Tolerances = DEFAULT_TOL):
    """Classify a closed surface by strict convexity of vertices and edges.

    Strongly strictly convex: every vertex and every edge is exposed on
    the convex hull.  Weakly strictly convex: every vertex is exposed.
    Vertices lying on the hull boundary without being hull vertices count
    as not strictly convex (noted in the report).
    """
    pts = surface.vertices / surface.diameter
    flags = _edge_flags(surface, tol)
    notes = []
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return ConvexityReport(
            Convexity.NOT_WEAKLY_CONVEX,
            flags,
            tuple(range(surface.n_vertices)),
            (),
            ("degenerate vertex set: convex hull is not full-dimensional",),
        )

    exposed = set(int(v) for v in hull.vertices)
    nonexposed = tuple(v for v in range(surface.n_vertices) if v not in exposed)
    if nonexposed:
        # distinguish interior points from points on the hull boundary
        gaps = pts[list(nonexposed)] @ hull.equations[:, :3].T + hull.equations[:, 3]
        for v, gap in zip(nonexposed, gaps.max(axis=1)):
            where = "on the hull boundary" if gap >= -tol.geom_tol else "inside the hull"
            notes.append(f"vertex {v} is {where} but not a hull vertex")
        return ConvexityReport(Convexity.NOT_WEAKLY_CONVEX, flags, nonexposed, (), tuple(notes))

    unexposed_edges = []
    for e, flag in flags.items():
        if flag != "convex" or not _is_exposed_edge(pts, *e, tol=tol):
            unexposed_edges.append(e)
    if unexposed_edges:
        return ConvexityReport(
            Convexity.WEAKLY_STRICTLY_CONVEX, flags, (), tuple(unexposed_edges), tuple(notes)
        )
    return ConvexityReport(Convexity.STRONGLY_STRICTLY_CONVEX, flags, (), (), tuple(notes))


# ---------------------------------------------------------------------------
# vertex links and the spherical polygon relation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SphericalPolygon:
    """Closed polygon on the unit sphere: the link of a vertex.

    vertices[i] is the unit direction to the i-th neighbor; angles[i] is
    the face angle between directions i and i+1 (cyclically) at the apex.
    """

    vertices: np.ndarray
    angles: np.ndarray

    def __post_init__(self):
        verts = np.array(self.vertices, dtype=float)
        angles = np.array(self.angles, dtype=float)
        if verts.ndim != 2 or verts.shape[1] != 3 or len(verts) != len(angles):
            raise GeometryError("link needs matching (k,3) directions and k angles")
        norms = np.linalg.norm(verts, axis=1)
        if np.abs(norms - 1.0).max() > 1e-12:
            raise GeometryError("link directions must be unit vectors (within 1e-12)")
        if np.any(angles <= 0.0) or np.any(angles >= 2.0 * np.pi):
            raise GeometryError("link angles must lie in (0, 2*pi)")
        verts.flags.writeable = False
        angles.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "angles", angles)

    def __len__(self):
        return len(self.angles)


def vertex_link(surface, v, tol: Tolerances = DEFAULT_TOL):
    """Link of a vertex: unit directions to its neighbors in cyclic order,
    with the face angle met at the apex between consecutive directions."""
    cycle = surface.neighbors_cyclic(v)
    p = surface.vertices
    dirs = np.array([unit(p[w] - p[v]) for w in cycle])
    k = len(cycle)
    angles = np.empty(k)
    for i in range(k):
        cosang = np.clip(dirs[i] @ dirs[(i + 1) % k], -1.0, 1.0)
        angles[i] = np.arccos(cosang)
    return SphericalPolygon(dirs, angles)


def hemisphere_witness(directions, tol: Tolerances = DEFAULT_TOL):
    """Direction u with u . p_i > 0 for all i, or None if no open
    hemisphere contains the given unit vectors."""
    if isinstance(directions, SphericalPolygon):
        directions = directions.vertices
    directions = np.asarray(directions, dtype=float)
    # variables: u(3), delta; maximize delta s.t. u.p_i >= delta
    c_obj = np.array([0.0, 0.0, 0.0, -1.0])
    a_ub = np.hstack([-directions, np.ones((len(directions), 1))])
    b_ub = np.zeros(len(directions))
    bounds = [(-1, 1)] * 3 + [(0, None)]
    res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
    if not res.success or res.x[3] <= tol.geom_tol:
        return None
    return unit(res.x[:3])


def spherical_polygon_relation_residual(link, angle_variations):
    """Sum of theta'_i * p_i over the link; zero (to tolerance) iff the
    given first-order angle variations are realizable by a motion of the
    polygon on the sphere."""
    theta = np.asarray(angle_variations, dtype=float)
    if theta.shape != (len(link),):
        raise GeometryError(
            f"expected {len(link)} angle variations, got shape {theta.shape}"
        )
    return theta @ link.vertices


# ---------------------------------------------------------------------------
# projective maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProjectiveMap:
    """Projective transformation of R^3, row-vector convention:
    [x, 1] @ matrix gives homogeneous output, divided by its 4th entry.

    The stored matrix is canonically scaled so its largest-magnitude
    entry equals 1.
    """

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        if m.shape != (4, 4):
            raise GeometryError(f"projective matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise GeometryError("non-finite projective matrix")
        pivot = m.flat[np.abs(m).argmax()]
        if pivot == 0.0:
            raise GeometryError("zero projective matrix")
        m = m / pivot
        if abs(np.linalg.det(m)) <= 1e-12:
            raise GeometryError("projective matrix is singular")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls):
        return cls(np.eye(4))

    @classmethod
    def affine(cls, linear, translation):
        m = np.eye(4)
        m[:3, :3] = np.asarray(linear, dtype=float).T
        m[3, :3] = np.asarray(translation, dtype=float)
        return cls(m)

    def then(self, other):
        """Composite map: apply self first, then other."""
        return ProjectiveMap(self.matrix @ other.matrix)

    @property
    def is_identity(self):
        return bool(np.allclose(self.matrix, np.eye(4), atol=1e-14))


def transform_points(pmap, points, tol: Tolerances = DEFAULT_TOL):
    points = as_points(points)
    hom = np.hstack([points, np.ones((len(points), 1))]) @ pmap.matrix
    w = hom[:, 3]
    bad = np.nonzero(np.abs(w) < tol.geom_tol)[0]
    if len(bad):
        raise GeometryError(
            f"vertex {bad[0]} maps to the plane at infinity "
            f"(homogeneous coordinate {w[bad[0]]:.2e})"
        )
    return hom[:, :3] / w[:, None]


def apply_projective(pmap, obj, tol: Tolerances = DEFAULT_TOL):
    """Apply a projective map to points, a Point3, a surface, or any
    object exposing `_replace_vertices` (frameworks, suspensions)."""
    if isinstance(obj, Point3):
        return Point3.from_array(transform_points(pmap, obj.as_array()[None, :], tol)[0])
    if isinstance(obj, PolyhedralSurface):
        return obj._replace_vertices(transform_points(pmap, obj.vertices, tol), tol=tol)
    if hasattr(obj, "_replace_vertices"):
        return obj._replace_vertices(transform_points(pmap, obj.vertices, tol))
    return transform_points(pmap, obj, tol)


# ---------------------------------------------------------------------------
# pole normalization
# ---------------------------------------------------------------------------


def pole_frame_ok(points, north, south, tol: Tolerances = DEFAULT_TOL):
    """True if south sits at the origin, north at (0,0,1), and every other
    vertex has z strictly inside (0, 1) -- i.e. the planes z=0 and z=1
    are support planes touching only the poles."""
    points = as_points(points)
    eps = tol.geom_tol
    if np.linalg.norm(points[south]) > eps:
        return False
    if np.linalg.norm(points[north] - np.array([0.0, 0.0, 1.0])) > eps:
        return False
    others = [k for k in range(len(points)) if k not in (north, south)]
    z = points[others, 2]
    return bool(np.all(z > eps) and np.all(z < 1.0 - eps))


def normalize_pole_frame(points, north, south, tol: Tolerances = DEFAULT_TOL):
    """Projective map carrying the configuration into the standard pole
    frame: south at the origin, north at (0,0,1), all other vertices with
    z in (0,1), so the planes orthogonal to the axis at the poles support
    the configuration.

    Returns (map, new_points).  If the input already satisfies the
    condition the identity map is returned.  Raises GeometryError when a
    pole is not an exposed point of the hull.
    """
    points = as_points(points)
    if pole_frame_ok(points, north, south, tol):
        return ProjectiveMap.identity(), points

    diam = diameter(points)
    u_n, c_n, delta_n = support_functional(points, (north,), tol)
    if delta_n <= tol.geom_tol * diam:
        raise GeometryError(f"north pole (vertex {north}) is not an exposed point")
    u_s, c_s, delta_s = support_functional(points, (south,), tol)
    if delta_s <= tol.geom_tol * diam:
        raise GeometryError(f"south pole (vertex {south}) is not an exposed point")

    # Homogeneous functionals F = u_n.x - c_n and G = u_s.x - c_s are zero on
    # the support planes and negative elsewhere on the configuration.  The map
    # (x, 1) -> (v1.(x - S), v2.(x - S), -G, -(F + G)) sends the southern
    # support plane to z=0, the northern one to z=1, S to the origin and N to
    # (0,0,1); -(F+G) > 0 on the configuration, so nothing hits infinity.
    axis = unit(points[north] - points[south])
    seed = np.eye(3)[np.abs(axis).argmin()]
    v1 = unit(seed - (seed @ axis) * axis)
    v2 = np.cross(axis, v1)
    s_pos = points[south]

    m = np.empty((4, 4))
    m[:3, 0] = v1
    m[3, 0] = -v1 @ s_pos
    m[:3, 1] = v2
    m[3, 1] = -v2 @ s_pos
    m[:3, 2] = -u_s
    m[3, 2] = c_s
    m[:3, 3] = -(u_n + u_s)
    m[3, 3] = c_n + c_s
    pmap = ProjectiveMap(m)

    new_points = transform_points(pmap, points, tol)
    # exact pinning of the poles against roundoff
    new_points[south] = 0.0
    new_points[north] = np.array([0.0, 0.0, 1.0])
    if not pole_frame_ok(new_points, north, south, tol):
        raise GeometryError("pole normalization failed its own support-plane check")
    return pmap, new_points


# ---------------------------------------------------------------------------
# Cayley-Menger feasibility
# ---------------------------------------------------------------------------

# index pairs for the canonical length order (d01, d02, d03, d12, d13, d23)
TETRA_EDGE_ORDER = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


def cayley_menger_feasible(lengths, tol: Tolerances = DEFAULT_TOL):
    """Whether six lengths (d01, d02, d03, d12, d13, d23) are the edge
    lengths of a nondegenerate Euclidean tetrahedron.

    Returns (feasible, volume); volume is 0.0 when infeasible.
    """
    lengths = np.asarray(lengths, dtype=float)
    if lengths.shape != (6,):
        raise GeometryError(f"expected 6 lengths, got shape {lengths.shape}")
    if np.any(lengths <= 0.0) or not np.all(np.isfinite(lengths)):
        raise GeometryError("edge lengths must be positive and finite")

    d = {}
    for (i, j), l in zip(TETRA_EDGE_ORDER, lengths):
        d[(i, j)] = d[(j, i)] = float(l)

    scale = lengths.max()
    for a, b, c in ((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)):
        for x, y, z in ((a, b, c), (b, c, a), (c, a, b)):
            if d[(x, y)] + d[(y, z)] < d[(x, z)] - tol.geom_tol * scale:
                return False, 0.0

    cm = np.ones((5, 5))
    cm[0, 0] = 0.0
    for i in range(4):
        for j in range(4):
            cm[i + 1, j + 1] = 0.0 if i == j else d[(i, j)] ** 2
    det = float(np.linalg.det(cm))
    vol_sq = det / 288.0
    if vol_sq <= tol.geom_tol**2 * scale**6:
        return False, 0.0
    return True, float(np.sqrt(vol_sq))

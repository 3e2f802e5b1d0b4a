"""Suspension frameworks: a cyclic equator joined to two poles.

The pole axis is the single interior edge of the natural decomposition of
a suspension into tetrahedra, so first-order rigidity reduces to one
scalar: the derivative of the total dihedral angle around the axis with
respect to the axis length.  This module builds suspensions, decides
axis-decomposability, labels the associated tensegrity, constructs proper
equilibrium stresses by induction on the equator size, and evaluates the
scalar invariant in two independent closed forms.

Vertex layout is shared with :mod:`rigidity3d.shapes`: north pole at
index 0, south pole at index 1, equator at 2..n+1 in cyclic order.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .frameworks import (
    EdgeKind,
    Framework,
    Stress,
    equilibrium_residual,
    equilibrium_stress_space,
    exchange_rigidity_check,
    is_infinitesimally_rigid,
    is_proper,
)
from .geometry import (
    DEFAULT_TOL,
    GeometryError,
    PolyhedralSurface,
    Tolerances,
    as_points,
    classify_convexity,
    diameter,
    normalize_pole_frame,
    unit,
)
from .hessian import Decomposition, DecompositionError
from .shapes import NORTH, SOUTH, bipyramid_faces

logger = logging.getLogger(__name__)

NS_EDGE = (NORTH, SOUTH)

# relative tolerance for the agreement of the two closed forms of the
# axis invariant
FORM_AGREEMENT_TOL = 1e-9


class SuspensionError(Exception):
    pass


class Suspension:
    """A suspension surface in the shared vertex layout.

    Stores the (n+2, 3) vertex array [north, south, equator...] together
    with the derived closed triangulated surface (two triangles per
    equator edge, one through each pole).
    """

    vertices: np.ndarray
    surface: PolyhedralSurface

    def __init__(self, vertices, tol: Tolerances = DEFAULT_TOL):
        vertices = as_points(vertices)
        if len(vertices) < 5:
            raise SuspensionError(
                f"a suspension needs at least 3 equator vertices, got {len(vertices) - 2}"
            )
        surface = PolyhedralSurface(vertices, bipyramid_faces(len(vertices) - 2), tol)
        p = surface.vertices
        diam = surface.diameter
        for a, b, c in map(tuple, surface.faces.tolist()):
            doubled_area = np.linalg.norm(np.cross(p[b] - p[a], p[c] - p[a]))
            if doubled_area <= tol.geom_tol * diam**2:
                raise SuspensionError(f"face ({a}, {b}, {c}) is degenerate (zero area)")
        self.vertices = surface.vertices
        self.surface = surface

    @property
    def n(self):
        return len(self.vertices) - 2

    @property
    def north(self):
        return self.vertices[NORTH]

    @property
    def south(self):
        return self.vertices[SOUTH]

    @property
    def equator(self):
        return self.vertices[2:]

    @property
    def axis_length(self):
        return float(np.linalg.norm(self.north - self.south))

    def equator_index(self, slot):
        """Vertex index of the equator slot (cyclic)."""
        return 2 + slot % self.n

    def _replace_vertices(self, new_vertices):
        return Suspension(new_vertices)


def build_suspension(north, south, equator, tol: Tolerances = DEFAULT_TOL):
    """Suspension from pole points and a cyclically ordered equator."""
    equator = as_points(equator)
    return Suspension(np.vstack([north, south, equator]), tol)


# ---------------------------------------------------------------------------
# cylindrical coordinates along the axis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CylindricalEquator:
    """Equator in cylindrical coordinates of the unit-axis frame.

    The frame is the similarity image with the south pole at the origin
    and the north pole at (0, 0, 1); r, alpha, z are per equator vertex,
    theta are the signed azimuth increments between consecutive vertices
    (in (-pi, pi]), with the azimuth orientation chosen so the total
    increment is non-negative.  scale is the original axis length.
    """

    r: np.ndarray
    alpha: np.ndarray
    z: np.ndarray
    theta: np.ndarray
    scale: float

    @property
    def n(self):
        return len(self.r)

    def projected(self):
        """Projected equator vertices in the (r, alpha) plane."""
        return np.stack([self.r * np.cos(self.alpha), self.r * np.sin(self.alpha)], axis=1)


def cylindrical_equator(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    axis = s.north - s.south
    scale = float(np.linalg.norm(axis))
    e3 = axis / scale
    seed = np.eye(3)[np.abs(e3).argmin()]
    v1 = unit(seed - (seed @ e3) * e3)
    v2 = np.cross(e3, v1)
    q = (s.equator - s.south) / scale
    x, y, z = q @ v1, q @ v2, q @ e3
    r = np.hypot(x, y)
    if np.any(r <= tol.geom_tol):
        k = int(np.argmin(r))
        raise SuspensionError(f"equator vertex {2 + k} lies on the pole axis")
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    theta = np.arctan2(x * yn - y * xn, x * xn + y * yn)
    alpha = np.arctan2(y, x)
    if theta.sum() < 0.0:
        alpha, theta = -alpha, -theta
    return CylindricalEquator(r, alpha, z, theta, scale)


@dataclass(frozen=True)
class NSDecomposability:
    """Verdict, with a reason when negative and the coordinates used."""

    decomposable: bool
    reason: str | None
    cylindrical: CylindricalEquator | None

    def __bool__(self):
        return self.decomposable


def is_ns_decomposable(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Whether the tetrahedra [N, S, p_i, p_i+1] tile a neighborhood of
    the open axis: every azimuth increment of the projected equator lies
    strictly in (0, pi) and they sum to one full turn.

    Equivalently the projection of the equator along the axis is a simple
    polygon traversed with strictly increasing azimuth around the
    projected poles, which therefore lie in its interior.
    """
    try:
        cyl = cylindrical_equator(s, tol)
    except SuspensionError as exc:
        return NSDecomposability(False, str(exc), None)
    theta = cyl.theta
    eps = tol.geom_tol
    if np.any(theta <= eps):
        k = int(np.argmin(theta))
        return NSDecomposability(
            False,
            f"projected equator does not advance around the axis between "
            f"slots {k} and {(k + 1) % cyl.n} (increment {theta[k]:.3e})",
            cyl,
        )
    if np.any(theta >= np.pi - eps):
        k = int(np.argmax(theta))
        return NSDecomposability(
            False,
            f"equator vertices at slots {k} and {(k + 1) % cyl.n} are "
            f"axis-coplanar or beyond (increment {theta[k]:.6f})",
            cyl,
        )
    total = float(theta.sum())
    if abs(total - 2 * np.pi) > eps * cyl.n:
        winding = total / (2 * np.pi)
        return NSDecomposability(
            False, f"projected equator winds {winding:g} times around the axis", cyl
        )
    # consistency: the tetrahedra are pairwise non-overlapping exactly when
    # their orientation signs agree
    p = s.vertices
    dets = [
        np.linalg.det(
            np.stack(
                [p[SOUTH] - p[NORTH], p[s.equator_index(k)] - p[NORTH],
                 p[s.equator_index(k + 1)] - p[NORTH]]
            )
        )
        for k in range(s.n)
    ]
    if len({d > 0 for d in dets}) != 1:
        raise SuspensionError(
            "internal: azimuth increments are consistent but tetrahedron "
            "orientations are not"
        )
    return NSDecomposability(True, None, cyl)


# ---------------------------------------------------------------------------
# tensegrity labeling and decomposition
# ---------------------------------------------------------------------------


def tensegrity_labeling(s: Suspension, include_ns=True, tol: Tolerances = DEFAULT_TOL):
    """The suspension's tensegrity: equator edges (and optionally the
    axis) as cables, lateral edges as bars."""
    edges = []
    for k in range(s.n):
        edges.append((s.equator_index(k), s.equator_index(k + 1), EdgeKind.CABLE))
    for k in range(s.n):
        edges.append((NORTH, s.equator_index(k), EdgeKind.BAR))
        edges.append((SOUTH, s.equator_index(k), EdgeKind.BAR))
    if include_ns:
        edges.append((NORTH, SOUTH, EdgeKind.CABLE))
    return Framework(s.vertices, edges, tol=tol)


def axis_decomposition(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Decomposition into the tetrahedra [N, S, p_i, p_i+1], with the
    axis as the single interior edge."""
    ns = is_ns_decomposable(s, tol)
    if not ns:
        raise SuspensionError(f"not axis-decomposable: {ns.reason}")
    tets = [
        (NORTH, SOUTH, s.equator_index(k), s.equator_index(k + 1)) for k in range(s.n)
    ]
    return Decomposition(s.vertices, tets, [NS_EDGE], surface=s.surface, tol=tol)


# ---------------------------------------------------------------------------
# the axis invariant, in both closed forms
# ---------------------------------------------------------------------------


def theta_prime(z1, r1, z2, r2, theta):
    """First-order variation of the dihedral angle at the axis edge of the
    tetrahedron [N, S, p1, p2] when the axis length grows at unit speed
    and the other five edge lengths stay fixed.

    Coordinates are in the unit-axis frame: S at the origin, N at
    (0, 0, 1), p_k at distance r_k from the axis, height z_k, and theta
    the azimuth angle between p1 and p2.
    """
    if r1 <= 0.0 or r2 <= 0.0:
        raise SuspensionError("radii must be positive")
    sin_t = np.sin(theta)
    if abs(sin_t) < 1e-12:
        raise SuspensionError(f"degenerate simplex: sin(theta) = {sin_t:.3e}")
    cos_t = np.cos(theta)
    return (
        (z1 - z2) ** 2
        + z1 * (1.0 - z1) * (1.0 - (r2 / r1) * cos_t)
        + z2 * (1.0 - z2) * (1.0 - (r1 / r2) * cos_t)
    ) / (r1 * r2 * sin_t)


@dataclass(frozen=True)
class LambdaBreakdown:
    """The axis invariant with its per-simplex and per-vertex pieces.

    simplex_terms[i] is the angle-variation of the tetrahedron over
    equator edge (i, i+1).  The projected-polygon form uses a[i] = twice
    the area of (0, u_i, u_i+1) and b[i] = twice the oriented area of
    (u_i-1, u_i, u_i+1), where u are the projected equator vertices:
    height_terms[i] = (z_i+1 - z_i)^2 / a_i and vertex_terms[i] =
    z_i (1 - z_i) b_i / (a_i-1 a_i).  Values refer to the unit-axis
    similarity frame; scale is the original axis length.
    """

    simplex_terms: np.ndarray
    a: np.ndarray
    b: np.ndarray
    height_terms: np.ndarray
    vertex_terms: np.ndarray
    theta: np.ndarray
    scale: float

    @property
    def n(self):
        return len(self.simplex_terms)

    @property
    def total_simplex(self):
        return float(self.simplex_terms.sum())

    @property
    def total_projected(self):
        return float(self.height_terms.sum() + self.vertex_terms.sum())

    @property
    def total(self):
        return self.total_simplex


def lambda_scalar(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """The axis invariant of an axis-decomposable suspension, computed as
    the simplex-term sum and independently from the projected equator;
    the two forms must agree to within FORM_AGREEMENT_TOL (relative)."""
    ns = is_ns_decomposable(s, tol)
    if not ns:
        raise SuspensionError(f"not axis-decomposable: {ns.reason}")
    cyl = ns.cylindrical
    n = cyl.n
    r, z, theta = cyl.r, cyl.z, cyl.theta

    simplex_terms = np.empty(n)
    for i in range(n):
        j = (i + 1) % n
        try:
            simplex_terms[i] = theta_prime(z[i], r[i], z[j], r[j], theta[i])
        except SuspensionError as exc:
            raise SuspensionError(f"simplex {i}: {exc}") from exc

    u = cyl.projected()
    un = np.roll(u, -1, axis=0)
    a = u[:, 0] * un[:, 1] - u[:, 1] * un[:, 0]
    fwd = un - u
    back = np.roll(fwd, 1, axis=0)
    b = back[:, 0] * fwd[:, 1] - back[:, 1] * fwd[:, 0]
    height_terms = (np.roll(z, -1) - z) ** 2 / a
    vertex_terms = z * (1.0 - z) * b / (np.roll(a, 1) * a)

    breakdown = LambdaBreakdown(simplex_terms, a, b, height_terms, vertex_terms,
                                theta, cyl.scale)
    t1, t2 = breakdown.total_simplex, breakdown.total_projected
    if abs(t1 - t2) > FORM_AGREEMENT_TOL * max(1.0, abs(t1)):
        raise SuspensionError(
            f"internal: the two closed forms disagree ({t1!r} vs {t2!r})"
        )
    return breakdown


# ---------------------------------------------------------------------------
# proper equilibrium stresses by induction on the equator
# ---------------------------------------------------------------------------


def _oriented_direct_stress(s, tol):
    """Unique-up-to-scale equilibrium stress of the full tensegrity,
    oriented so the dominant cable entry is positive."""
    fw = tensegrity_labeling(s, include_ns=True, tol=tol)
    basis = equilibrium_stress_space(fw, tol)
    if len(basis) != 1:
        raise SuspensionError(
            f"stress space of the n={s.n} suspension is {len(basis)}-dimensional, "
            f"expected 1"
        )
    omega = dict(basis[0].omega)
    cables = [(i, j) for i, j, kind in fw.edges if kind is EdgeKind.CABLE]
    lead = max(cables, key=lambda pair: abs(omega[pair]))
    if omega[lead] < 0.0:
        omega = {pair: -w for pair, w in omega.items()}
    return omega


def _small_star_stress(s, k, tol):
    """Equilibrium stress of the complete framework on the five points
    N, S, p_k-1, p_k, p_k+1, keyed by global vertex pairs.  Handles the
    coplanar case transparently: when N, p_k-1, p_k, p_k+1 are coplanar
    the stress is supported on those four points alone."""
    ids = (
        NORTH,
        SOUTH,
        s.equator_index(k - 1),
        s.equator_index(k),
        s.equator_index(k + 1),
    )
    pts = s.vertices[list(ids)]
    fw = Framework(pts, [(a, b) for a in range(5) for b in range(a + 1, 5)], tol=tol)
    basis = equilibrium_stress_space(fw, tol)
    if len(basis) != 1:
        raise SuspensionError(
            f"five-point star around equator slot {k} has a "
            f"{len(basis)}-dimensional stress space, expected 1"
        )
    return {
        tuple(sorted((ids[a], ids[b]))): w for (a, b), w in basis[0].omega.items()
    }


def _stress_by_induction(s, tol, trace):
    report = classify_convexity(s.surface, tol)
    reflex = [
        (pole, 2 + k)
        for pole in (NORTH, SOUTH)
        for k in range(s.n)
        if report.edge_flags[tuple(sorted((pole, 2 + k)))] == "reflex"
    ]
    if s.n == 3 or not reflex:
        trace.append(f"direct solve at n={s.n}")
        return _oriented_direct_stress(s, tol)

    pole, pv = reflex[0]
    k = pv - 2
    trace.append(
        f"peel equator vertex {pv} (reflex lateral at the "
        f"{'north' if pole == NORTH else 'south'} pole)"
    )
    keep = [slot for slot in range(s.n) if slot != k]
    child_ok = True
    why = ""
    try:
        child = build_suspension(s.north, s.south, s.equator[keep], tol)
        child_ns = is_ns_decomposable(child, tol)
        if not child_ns:
            child_ok, why = False, child_ns.reason
        elif not classify_convexity(child.surface, tol).is_weakly_convex:
            child_ok, why = False, "reduced suspension is not weakly strictly convex"
    except (SuspensionError, GeometryError) as exc:
        child_ok, why = False, str(exc)
    if not child_ok:
        logger.warning(
            "induction hypotheses fail after removing vertex %d (%s); "
            "falling back to the direct solver", pv, why,
        )
        trace.append(f"fallback to direct solve at n={s.n}: {why}")
        return _oriented_direct_stress(s, tol)

    child_omega = _stress_by_induction(child, tol, trace)

    # lift child edge keys into the parent indexing
    def lift(idx):
        if idx < 2:
            return idx
        slot = idx - 2
        return 2 + (slot if slot < k else slot + 1)

    omega = {
        tuple(sorted((lift(i), lift(j)))): w for (i, j), w in child_omega.items()
    }

    chord = tuple(sorted((s.equator_index(k - 1), s.equator_index(k + 1))))
    small = _small_star_stress(s, k, tol)
    small_scale = max(abs(w) for w in small.values())
    if abs(small[chord]) <= tol.rank_tol * small_scale:
        raise SuspensionError(
            f"five-point star stress vanishes on the chord {chord}; "
            f"cannot cancel (trace: {trace})"
        )
    factor = -omega[chord] / small[chord]
    for pair, w in small.items():
        omega[pair] = omega.get(pair, 0.0) + factor * w
    leftover = omega.pop(chord)
    scale = max(abs(w) for w in omega.values())
    if abs(leftover) > 1e-9 * scale:
        raise SuspensionError(
            f"chord stress failed to cancel (leftover {leftover:.2e}, trace: {trace})"
        )
    return omega


def inductive_proper_stress(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Proper equilibrium stress on the full tensegrity (axis included)
    of an axis-decomposable, weakly strictly convex suspension.

    Built by peeling equator vertices at reflex lateral edges: each peel
    adds the unique stress of the five-point star around the removed
    vertex, scaled so the stresses on the chord joining its neighbors
    cancel.  The convex remainder is solved directly.
    """
    ns = is_ns_decomposable(s, tol)
    if not ns:
        raise SuspensionError(f"hypothesis failed: {ns.reason}")
    if not classify_convexity(s.surface, tol).is_weakly_convex:
        raise SuspensionError(
            "hypothesis failed: suspension is not weakly strictly convex"
        )
    trace = []
    omega = _stress_by_induction(s, tol, trace)
    fw = tensegrity_labeling(s, include_ns=True, tol=tol)
    stress = Stress(omega)
    scale = max(abs(w) for w in omega.values())
    resid = equilibrium_residual(fw, stress)
    if resid > 1e-9 * scale * diameter(fw.vertices):
        raise SuspensionError(
            f"induction produced a non-equilibrium stress "
            f"(residual {resid:.2e}); trace: {trace}"
        )
    if not is_proper(fw, stress, slack=1e-12 * scale):
        raise SuspensionError(
            f"induction produced an improper stress; trace: {trace}; "
            f"stress: {omega}"
        )
    return stress


def suspension_rigidity(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Rigidity verdict for the suspension surface (all edges bars, no
    axis edge).

    When the suspension is axis-decomposable and weakly strictly convex,
    the verdict is cross-checked through the stress construction: the
    axis edge is added, the inductive proper stress (nonzero on the axis)
    is fed to the exchange argument, and the two verdicts must agree.
    """
    verdict = is_infinitesimally_rigid(Framework.from_surface(s.surface, tol=tol), tol)
    if is_ns_decomposable(s, tol) and classify_convexity(s.surface, tol).is_weakly_convex:
        stress = inductive_proper_stress(s, tol)
        fw = tensegrity_labeling(s, include_ns=True, tol=tol)
        exchanged = exchange_rigidity_check(fw, stress, NS_EDGE, tol)
        if exchanged != verdict:
            raise SuspensionError(
                f"exchange argument disagrees with the direct verdict "
                f"({exchanged} vs {verdict})"
            )
    return verdict


# ---------------------------------------------------------------------------
# certificates and reductions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConvexProfileReport:
    """Positivity certificate for suspensions whose projected equator is
    a convex polygon with the axis through its interior."""

    in_scope: bool
    reason: str | None
    breakdown: LambdaBreakdown | None
    rigid: bool | None


def convex_profile_certificate(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Certify rigidity of a suspension over a convex projected equator
    by elementary positivity.

    Normalizes the poles projectively (support planes orthogonal to the
    axis at both poles), so every equator height lies in (0, 1); then
    every summand of the projected form of the invariant is non-negative
    and the total is positive, forcing rigidity.  Returns an out-of-scope
    report when the hypothesis (or the pole normalization) fails.
    """
    try:
        s_norm, _ = normalize_poles(s, tol)
    except GeometryError as exc:
        return ConvexProfileReport(False, f"pole normalization failed: {exc}", None, None)
    ns = is_ns_decomposable(s_norm, tol)
    if not ns:
        return ConvexProfileReport(False, ns.reason, None, None)
    breakdown = lambda_scalar(s_norm, tol)
    if breakdown.b.min() <= tol.geom_tol:
        k = int(np.argmin(breakdown.b))
        return ConvexProfileReport(
            False, f"projected equator is not strictly convex at slot {k}", None, None
        )
    if breakdown.height_terms.min() < -1e-12 or breakdown.vertex_terms.min() < -1e-12:
        raise SuspensionError(
            f"positivity violated in scope: height {breakdown.height_terms.min():.3e}, "
            f"vertex {breakdown.vertex_terms.min():.3e}"
        )
    if not breakdown.total > 1e-12:
        raise SuspensionError(f"total invariant not positive: {breakdown.total!r}")
    rigid = is_infinitesimally_rigid(Framework.from_surface(s.surface, tol=tol), tol)
    if not rigid:
        raise SuspensionError(
            "positive invariant but the rigidity verdict is negative"
        )
    return ConvexProfileReport(True, None, breakdown, rigid)


def interior_edge_star(d: Decomposition, tol: Tolerances = DEFAULT_TOL):
    """The suspension formed by the tetrahedra around the single interior
    edge of a decomposition: poles are the edge endpoints, the equator is
    the cycle of flank vertices."""
    if d.r != 1:
        raise SuspensionError(
            f"decomposition has {d.r} interior edges; need exactly one"
        )
    edge = d.interior_edges[0]
    try:
        order = Decomposition._incident_cycle(d.tetrahedra, edge)
    except DecompositionError as exc:
        raise SuspensionError(str(exc)) from exc
    m = len(order)
    link = []
    for a in range(m):
        shared = (
            set(d.tetrahedra[order[a]])
            & set(d.tetrahedra[order[(a + 1) % m]])
        ) - set(edge)
        if len(shared) != 1:
            raise SuspensionError(
                "tetrahedra around the interior edge do not chain through shared faces"
            )
        link.append(shared.pop())
    if len(set(link)) != m:
        raise SuspensionError("flank vertices around the interior edge repeat")
    return build_suspension(
        d.vertices[edge[0]], d.vertices[edge[1]], d.vertices[link], tol
    )


def normalize_poles(s: Suspension, tol: Tolerances = DEFAULT_TOL):
    """Projectively move the suspension into the standard pole frame
    (south at the origin, north at (0,0,1), equator heights in (0,1)).
    Returns the normalized suspension and the map used."""
    pmap, new_points = normalize_pole_frame(s.vertices, NORTH, SOUTH, tol)
    return Suspension(new_points, tol), pmap

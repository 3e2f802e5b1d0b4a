"""Randomized instance factories.

Everything downstream of the core library that needs "a random convex
hull", "a random suspension with a reflex lateral edge", or "a length
fixture tuned until the axis invariant vanishes" gets it from here, so
the sampling conventions (and their seeds) live in one place.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull

from .cauchy import CauchyError, dent
from .frameworks import Framework
from .geometry import (
    DEFAULT_TOL,
    GeometryError,
    PolyhedralSurface,
    ProjectiveMap,
    Tolerances,
    dihedral_angle,
    transform_points,
)
from .hessian import DecompositionError, decompose_star, lambda_matrix
from .suspensions import (
    NS_EDGE,
    SuspensionError,
    axis_decomposition,
    build_suspension,
    is_ns_decomposable,
    lambda_scalar,
)

logger = logging.getLogger(__name__)

# adjacent hull facets closer than this to coplanar get the sample rejected
FLAT_EDGE_MARGIN = 1e-3


class GenerationError(Exception):
    pass


# ---------------------------------------------------------------------------
# convex hulls
# ---------------------------------------------------------------------------


def _oriented_hull_faces(points, hull):
    centroid = points.mean(axis=0)
    faces = []
    for a, b, c in hull.simplices:
        n = np.cross(points[b] - points[a], points[c] - points[a])
        if n @ (points[a] - centroid) < 0:
            a, b, c = a, c, b
        faces.append((int(a), int(b), int(c)))
    return faces


def random_convex_hull_surface(rng, n, tol: Tolerances = DEFAULT_TOL, max_tries=60):
    """Boundary surface of the convex hull of n random points on the unit
    sphere.  Samples are rejected until every point is a hull vertex and
    no two adjacent facets are within FLAT_EDGE_MARGIN of coplanar, so the
    result is strongly strictly convex with a simplicial face lattice."""
    if n < 4:
        raise GenerationError("need at least 4 points for a hull surface")
    for _ in range(max_tries):
        x = rng.normal(size=(n, 3))
        norms = np.linalg.norm(x, axis=1)
        if norms.min() < 1e-9:
            continue
        pts = x / norms[:, None]
        hull = ConvexHull(pts)
        if len(hull.vertices) != n:
            continue
        try:
            surface = PolyhedralSurface(pts, _oriented_hull_faces(pts, hull), tol)
        except GeometryError:
            continue
        if max(dihedral_angle(surface, e, tol) for e in surface.edges) > (
            np.pi - FLAT_EDGE_MARGIN
        ):
            continue
        return surface
    raise GenerationError(
        f"no usable hull of {n} sphere points in {max_tries} attempts"
    )


# ---------------------------------------------------------------------------
# suspension profiles
# ---------------------------------------------------------------------------


def _azimuths(rng, n, max_tries=100):
    """n sorted azimuths with every cyclic gap strictly inside (0, pi)."""
    for _ in range(max_tries):
        gaps = rng.uniform(0.15, 2.9, n)
        gaps *= 2.0 * np.pi / gaps.sum()
        if gaps.max() < np.pi - 0.05 and gaps.min() > 0.05:
            return np.concatenate([[0.0], np.cumsum(gaps)[:-1]])
    raise GenerationError("could not draw azimuth gaps below pi")


def random_convex_polygon(rng, n, max_tries=200):
    """Radii and azimuths of a convex n-gon winding once around the
    origin (so the origin is strictly interior)."""
    for attempt in range(max_tries):
        az = _azimuths(rng, n)
        spread = 0.3 * 0.5 ** (attempt // 20)  # tighten until convex
        radii = rng.uniform(1.0 - spread, 1.0 + spread, n)
        u = np.stack([radii * np.cos(az), radii * np.sin(az)], axis=1)
        edges = np.roll(u, -1, axis=0) - u
        nxt = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * nxt[:, 1] - edges[:, 1] * nxt[:, 0]
        if cross.min() > 1e-6:
            return radii, az
    raise GenerationError("could not draw a convex polygon")


def convex_suspension(rng, n, tol: Tolerances = DEFAULT_TOL, max_tries=40):
    """Strongly strictly convex suspension: the bipyramid over a convex
    polygon, with pole offsets and out-of-plane jitter accepted only when
    the convex hull of the vertices has exactly the bipyramid's faces.

    Jitter is halved towards the guaranteed planar equator; if that never
    converges (a pole offset outside a small polygon can make the hull
    skip equator vertices entirely), the whole instance is redrawn."""
    for _ in range(max_tries):
        radii, az = random_convex_polygon(rng, n)
        base = np.stack([radii * np.cos(az), radii * np.sin(az), np.zeros(n)], axis=1)
        h_n = rng.uniform(0.6, 1.6)
        h_s = rng.uniform(0.6, 1.6)
        north = np.array([rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), h_n])
        south = np.array([rng.uniform(-0.15, 0.15), rng.uniform(-0.15, 0.15), -h_s])
        jitter = rng.uniform(-0.1, 0.1, n)
        for _ in range(8):
            eq = base.copy()
            eq[:, 2] = jitter
            s = build_suspension(north, south, eq, tol)
            pts = s.surface.vertices
            hull = ConvexHull(pts)
            hull_faces = {tuple(sorted(f)) for f in hull.simplices.tolist()}
            surf_faces = {tuple(sorted(f)) for f in s.surface.faces.tolist()}
            flat = max(dihedral_angle(s.surface, e, tol) for e in s.surface.edges)
            if hull_faces == surf_faces and flat < np.pi - FLAT_EDGE_MARGIN:
                return s
            jitter *= 0.5
    raise GenerationError("convex suspension generation did not converge")


def star_suspension(rng, n, require_reflex=False, tol: Tolerances = DEFAULT_TOL, max_tries=120):
    """Axis-decomposable, weakly strictly convex suspension whose equator
    sits on a cylinder around the axis (so every vertex is exposed) with
    random heights.  With require_reflex, resamples until at least one
    lateral edge is reflex."""
    for _ in range(max_tries):
        az = _azimuths(rng, n)
        radius = rng.uniform(0.6, 1.4)
        z = rng.uniform(-0.55, 0.55, n)
        eq = np.stack([radius * np.cos(az), radius * np.sin(az), z], axis=1)
        h = rng.uniform(1.0, 1.6)
        try:
            s = build_suspension((0.0, 0.0, h), (0.0, 0.0, -h), eq, tol)
        except (SuspensionError, GeometryError):
            continue
        if not is_ns_decomposable(s, tol):
            continue
        if require_reflex:
            laterals = [
                e
                for pole in NS_EDGE
                for e in (tuple(sorted((pole, s.equator_index(k)))) for k in range(n))
            ]
            if not any(
                dihedral_angle(s.surface, e, tol) > np.pi + tol.geom_tol
                for e in laterals
            ):
                continue
        return s
    raise GenerationError("no suitable cylinder suspension found")


def random_suspension(rng, n, tol: Tolerances = DEFAULT_TOL, max_tries=60):
    """Unconstrained suspension: random radii and heights, and with
    probability ~0.3 a shuffled azimuth order (so the equator may be
    knotted around the axis and fail decomposability)."""
    for _ in range(max_tries):
        az = _azimuths(rng, n)
        if rng.uniform() < 0.3:
            az = az[rng.permutation(n)]
        radii = rng.uniform(0.3, 1.5, n)
        z = rng.uniform(-0.6, 0.6, n)
        eq = np.stack([radii * np.cos(az), radii * np.sin(az), z], axis=1)
        h = rng.uniform(0.9, 1.5)
        try:
            return build_suspension((0.0, 0.0, h), (0.0, 0.0, -h), eq, tol)
        except (SuspensionError, GeometryError):
            continue
    raise GenerationError("no valid random suspension found")


SUSPENSION_PROFILES = ("convex", "star", "random")


def suspension_profile(profile, rng, n, tol: Tolerances = DEFAULT_TOL):
    if profile == "convex":
        return convex_suspension(rng, n, tol)
    if profile == "star":
        return star_suspension(rng, n, require_reflex=True, tol=tol)
    if profile == "random":
        return random_suspension(rng, n, tol)
    raise GenerationError(
        f"unknown profile {profile!r}; choose from {SUSPENSION_PROFILES}"
    )


# ---------------------------------------------------------------------------
# a suspension tuned to the rigidity threshold
# ---------------------------------------------------------------------------


def _notched_equator(notch_radius, notch_height):
    third = 2.0 * np.pi / 3.0
    return [
        [1.0, 0.0, 0.5],
        [
            notch_radius * np.cos(third / 2.0),
            notch_radius * np.sin(third / 2.0),
            notch_height,
        ],
        [np.cos(third), np.sin(third), 0.5],
        [np.cos(2 * third), np.sin(2 * third), 0.5],
    ]


@dataclass(frozen=True)
class ThresholdSuspension:
    suspension: object
    notch_height: float
    lam: float


def flexible_suspension_fixture(
    tol: Tolerances = DEFAULT_TOL, target=1e-10, notch_radius=0.18
):
    """A suspension with axis invariant tuned to zero: a triangle-plus-notch
    equator whose notch height is bisected until |lambda| <= target.

    The notch vertex sits well inside the hull, so the result is not
    weakly convex -- as it must not be, since it carries a nontrivial
    flex."""

    def lam_at(t):
        s = build_suspension(
            (0.0, 0.0, 1.0), (0.0, 0.0, 0.0), _notched_equator(notch_radius, t), tol
        )
        return s, lambda_scalar(s, tol).total

    grid = np.linspace(0.05, 0.95, 37)
    values = [lam_at(t)[1] for t in grid]
    bracket = None
    for a, b, fa, fb in zip(grid, grid[1:], values, values[1:]):
        if fa == 0.0 or fa * fb < 0.0:
            bracket = (a, b, fa, fb)
            break
    if bracket is None:
        raise GenerationError(
            "the notch-height family never crosses zero; invariant range "
            f"[{min(values):.4g}, {max(values):.4g}]"
        )
    lo, hi, flo, fhi = bracket
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        s, fmid = lam_at(mid)
        if abs(fmid) <= target:
            return ThresholdSuspension(s, mid, fmid)
        if flo * fmid < 0.0:
            hi, fhi = mid, fmid
        else:
            lo, flo = mid, fmid
    raise GenerationError(
        f"bisection stalled: |lambda| = {abs(fmid):.3g} > {target:.3g}"
    )


# ---------------------------------------------------------------------------
# decomposition sampling for the spectrum probe
# ---------------------------------------------------------------------------


def dented_hull_star(rng, n, tol: Tolerances = DEFAULT_TOL, max_tries=20):
    """Dent a random hull at one edge and cone it from an end of the new
    reflex edge (from which the dented solid is star-shaped).

    Decompositions with a tetrahedron too flat for the analytic angle
    Jacobian are rejected and the hull redrawn, so the result always
    supports lambda_matrix."""
    for _ in range(max_tries):
        surface = random_convex_hull_surface(rng, n, tol)
        edges = list(surface.edges)
        for k in rng.permutation(len(edges)):
            try:
                dented = dent(surface, edges[k], tol)
            except CauchyError:
                continue
            for apex in dented.new_edge:
                try:
                    d = decompose_star(dented.surface, apex, tol)
                    lambda_matrix(d, tol=tol)
                except DecompositionError:
                    continue
                return d
    raise GenerationError("no star decomposition of a dented hull found")


def probe_decomposition(kind, rng, tol: Tolerances = DEFAULT_TOL):
    """One decomposition instance for the positive-definiteness probe."""
    if kind == "dented_hull_star":
        return dented_hull_star(rng, int(rng.integers(8, 15)), tol)
    if kind == "suspension_axis":
        s = star_suspension(rng, int(rng.integers(3, 9)), tol=tol)
        return axis_decomposition(s, tol)
    if kind == "control_nonconvex":
        # pull one cylinder vertex far inside the hull: still decomposable,
        # no longer weakly convex
        from .geometry import classify_convexity

        for _ in range(40):
            n = int(rng.integers(4, 9))
            az = _azimuths(rng, n)
            radii = np.full(n, rng.uniform(0.9, 1.3))
            notch = int(rng.integers(n))
            radii[notch] *= rng.uniform(0.2, 0.35)
            z = rng.uniform(-0.4, 0.4, n)
            z[notch] = 0.5 * (z[(notch - 1) % n] + z[(notch + 1) % n])
            eq = np.stack([radii * np.cos(az), radii * np.sin(az), z], axis=1)
            s = build_suspension((0.0, 0.0, 1.3), (0.0, 0.0, -1.3), eq, tol)
            if not classify_convexity(s.surface, tol).is_weakly_convex:
                return axis_decomposition(s, tol)
        raise GenerationError("control instance stayed weakly convex")
    raise GenerationError(f"unknown probe kind {kind!r}")


# ---------------------------------------------------------------------------
# frameworks and projective maps
# ---------------------------------------------------------------------------


def random_framework(rng, n, edge_prob=0.55, tol: Tolerances = DEFAULT_TOL):
    """Random bar framework: n Gaussian points, each pair joined with the
    given probability, plus a path so the result is connected."""
    if n < 2:
        raise GenerationError("need at least 2 vertices")
    pts = rng.normal(size=(n, 3))
    edges = {(i, i + 1) for i in range(n - 1)}
    for i in range(n):
        for j in range(i + 1, n):
            if rng.uniform() < edge_prob:
                edges.add((i, j))
    return Framework(pts, sorted(edges), tol)


def random_projective_map(rng, points, strength=0.15, max_tries=50):
    """A random projective map keeping every given point finite (all
    homogeneous denominators bounded away from zero)."""
    points = np.asarray(points, dtype=float)
    span = max(1.0, np.abs(points).max())
    for _ in range(max_tries):
        linear = np.eye(3) + rng.uniform(-0.4, 0.4, (3, 3))
        if abs(np.linalg.det(linear)) < 1e-3:
            continue
        m = np.eye(4)
        m[:3, :3] = linear
        m[3, :3] = rng.uniform(-0.5, 0.5, 3)
        m[:3, 3] = rng.uniform(-strength, strength, 3) / span
        m[3, 3] = 1.0
        w = points @ m[:3, 3] + m[3, 3]
        if np.abs(w).min() < 0.2:
            continue
        try:
            pmap = ProjectiveMap(m)
            transform_points(pmap, points)
        except GeometryError:
            continue
        return pmap
    raise GenerationError("no admissible projective map found")

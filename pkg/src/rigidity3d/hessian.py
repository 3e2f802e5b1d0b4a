"""Interior-edge length coordinates on tetrahedral decompositions.

A polyhedron decomposed into tetrahedra with no extra vertices is
described, up to congruence, by the lengths of its interior edges once
the boundary lengths are fixed.  The cone-angle map sends those interior
lengths to the total dihedral angle collected around each interior edge;
at the embedded lengths every such angle is exactly 2*pi.  The Jacobian
of that map (here: the lambda matrix) is symmetric (it is the Hessian of
the total mean curvature, by the Schlafli formula) and is singular
precisely when the boundary framework has a nontrivial infinitesimal
flex.

All dihedral angles here are computed from edge lengths alone via the
Gram-matrix route, never from an embedding, together with their analytic
partial derivatives with respect to the lengths.
"""

import logging
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .frameworks import Framework, is_infinitesimally_rigid
from .geometry import (
    DEFAULT_TOL,
    TETRA_EDGE_ORDER,
    Tolerances,
    as_points,
    cayley_menger_feasible,
    diameter,
)

logger = logging.getLogger(__name__)

SYM_TOL = 1e-7
VOL_TOL = 1e-12
# squared-volume margin (relative to longest-edge^6) below which the
# Jacobian of the angles is refused: derivatives blow up at degeneracy
E_INTERIOR_MARGIN = 1e-10


class DecompositionError(Exception):
    """Invalid decomposition, infeasible lengths, or verdict mismatch."""


# ---------------------------------------------------------------------------
# single-tetrahedron angle/derivative engine (pure length arithmetic)
# ---------------------------------------------------------------------------


def _tet_gram_entries(q, a, b, c, d):
    """Entries of the Gram matrix of (b-a, c-a, d-a) from squared lengths."""
    m00 = q[(a, b)]
    m11 = q[(a, c)]
    m22 = q[(a, d)]
    m01 = 0.5 * (q[(a, b)] + q[(a, c)] - q[(b, c)])
    m02 = 0.5 * (q[(a, b)] + q[(a, d)] - q[(b, d)])
    m12 = 0.5 * (q[(a, c)] + q[(a, d)] - q[(c, d)])
    return m00, m11, m22, m01, m02, m12


def tetra_angles_and_jacobian(lengths):
    """Six dihedral angles of a tetrahedron and their length derivatives.

    lengths follow TETRA_EDGE_ORDER = (01, 02, 03, 12, 13, 23); the k-th
    angle sits at the k-th edge.  Returns (angles, jacobian) with
    jacobian[k, m] = d alpha_k / d length_m.

    The angle at edge (a, b) comes from the Gram matrix M of the frame
    based at a: with G = det M = 36 V^2 and c = M00*M12 - M01*M02
    (= (u x v).(u x w) by Lagrange), alpha = atan2(sqrt(G * M00), c).
    Derivatives are assembled by the chain rule through the (linear)
    map squared-lengths -> Gram entries.
    """
    lengths = np.asarray(lengths, dtype=float)
    feasible, _ = cayley_menger_feasible(lengths)
    if not feasible:
        raise DecompositionError(f"lengths {lengths.tolist()} are not a tetrahedron")
    q = {}
    for (i, j), l in zip(TETRA_EDGE_ORDER, lengths):
        q[(i, j)] = q[(j, i)] = l * l

    pair_index = {pair: k for k, pair in enumerate(TETRA_EDGE_ORDER)}
    angles = np.empty(6)
    jac_q = np.zeros((6, 6))  # d alpha_k / d q_m

    for k, (a, b) in enumerate(TETRA_EDGE_ORDER):
        c_v, d_v = sorted(set(range(4)) - {a, b})
        m00, m11, m22, m01, m02, m12 = _tet_gram_entries(q, a, b, c_v, d_v)

        big_g = (
            m00 * m11 * m22
            - m00 * m12**2
            - m01**2 * m22
            + 2.0 * m01 * m02 * m12
            - m02**2 * m11
        )
        cos_part = m00 * m12 - m01 * m02
        sin_part = np.sqrt(max(big_g * m00, 0.0))
        angles[k] = np.arctan2(sin_part, cos_part)

        # gradients with respect to the six independent Gram entries
        dg = np.array(
            [
                m11 * m22 - m12**2,
                m00 * m22 - m02**2,
                m00 * m11 - m01**2,
                2.0 * (m02 * m12 - m01 * m22),
                2.0 * (m01 * m12 - m02 * m11),
                2.0 * (m01 * m02 - m00 * m12),
            ]
        )
        dc = np.array([m12, 0.0, 0.0, -m02, -m01, m00])
        if sin_part <= 0.0:
            raise DecompositionError("degenerate tetrahedron: angle derivative undefined")
        ds = (m00 * dg + big_g * np.array([1.0, 0, 0, 0, 0, 0])) / (2.0 * sin_part)
        dalpha_dm = (cos_part * ds - sin_part * dc) / (sin_part**2 + cos_part**2)

        # chain through the linear map q -> Gram entries
        rows = (
            ((a, b), 1.0, 0),
            ((a, c_v), 1.0, 1),
            ((a, d_v), 1.0, 2),
            ((a, b), 0.5, 3), ((a, c_v), 0.5, 3), ((b, c_v), -0.5, 3),
            ((a, b), 0.5, 4), ((a, d_v), 0.5, 4), ((b, d_v), -0.5, 4),
            ((a, c_v), 0.5, 5), ((a, d_v), 0.5, 5), ((c_v, d_v), -0.5, 5),
        )
        for pair, weight, m_idx in rows:
            jac_q[k, pair_index[tuple(sorted(pair))]] += weight * dalpha_dm[m_idx]

    jacobian = jac_q * (2.0 * lengths)[None, :]
    return angles, jacobian


def schlafli_residual(lengths, direction):
    """Sum over edges of l_e * (d alpha_e in the given length direction);
    identically zero for a Euclidean tetrahedron."""
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (6,):
        raise DecompositionError(f"direction must have 6 entries, got {direction.shape}")
    lengths = np.asarray(lengths, dtype=float)
    _, jac = tetra_angles_and_jacobian(lengths)
    return float(lengths @ (jac @ direction))


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


def _tet_edges(tet):
    return [tuple(sorted(p)) for p in combinations(tet, 2)]


def _tet_volume(points, tet):
    a, b, c, d = (points[v] for v in tet)
    return abs(float(np.dot(b - a, np.cross(c - a, d - a)))) / 6.0


@dataclass
class Decomposition:
    """Tetrahedralization of a polyhedron without added vertices.

    The edge set of the tetrahedra splits exactly into boundary edges
    (edges of the boundary surface, lengths pinned) and interior edges
    e_1..e_r (the coordinates of the cone-angle map).  Unless
    closed_stars=False, every interior edge must be surrounded by a
    closed cycle of tetrahedra, so its total angle is well defined and
    equals 2*pi at the embedded lengths.
    """

    vertices: np.ndarray
    tetrahedra: tuple
    interior_edges: tuple
    boundary_edges: tuple
    surface: object = None

    def __init__(
        self,
        vertices,
        tetrahedra,
        interior_edges,
        surface=None,
        closed_stars=True,
        tol: Tolerances = DEFAULT_TOL,
    ):
        vertices = as_points(vertices)
        tets = tuple(tuple(int(v) for v in t) for t in tetrahedra)
        interior = tuple(tuple(sorted(int(v) for v in e)) for e in interior_edges)
        if len(set(interior)) != len(interior):
            raise DecompositionError("duplicate interior edge")
        diam = diameter(vertices)

        for t_idx, tet in enumerate(tets):
            if len(set(tet)) != 4:
                raise DecompositionError(f"tetrahedron {t_idx} repeats a vertex: {tet}")
            if _tet_volume(vertices, tet) < VOL_TOL * diam**3:
                raise DecompositionError(f"tetrahedron {t_idx} = {tet} is degenerate")

        all_edges = set()
        for tet in tets:
            all_edges.update(_tet_edges(tet))
        missing = set(interior) - all_edges
        if missing:
            raise DecompositionError(f"interior edges {sorted(missing)} not in any tetrahedron")
        boundary = tuple(sorted(all_edges - set(interior)))

        if surface is not None:
            surf_edges = set(surface.edges)
            if set(boundary) != surf_edges:
                raise DecompositionError(
                    "boundary edges do not match the surface edge set: "
                    f"extra {sorted(set(boundary) - surf_edges)}, "
                    f"missing {sorted(surf_edges - set(boundary))}"
                )
            if set(interior) & surf_edges:
                raise DecompositionError("an interior edge is a surface edge")
            total = sum(_tet_volume(vertices, tet) for tet in tets)
            if abs(total - abs(surface.signed_volume)) > 1e-9 * diam**3:
                raise DecompositionError(
                    f"tetrahedra volumes sum to {total:.12g} but the surface bounds "
                    f"{abs(surface.signed_volume):.12g}: overlap or gap"
                )

        self._check_face_gluing(vertices, tets, surface)
        if closed_stars:
            for e in interior:
                self._incident_cycle(tets, e)

        vertices.flags.writeable = False
        self.vertices = vertices
        self.tetrahedra = tets
        self.interior_edges = interior
        self.boundary_edges = boundary
        self.surface = surface

    @staticmethod
    def _check_face_gluing(vertices, tets, surface):
        """Each face is shared by at most two tetrahedra, which must then
        lie on opposite sides of it (local non-overlap)."""
        face_owners = {}
        for t_idx, tet in enumerate(tets):
            for skip in range(4):
                face = tuple(sorted(tet[k] for k in range(4) if k != skip))
                face_owners.setdefault(face, []).append((t_idx, tet[skip]))
        for face, owners in face_owners.items():
            if len(owners) > 2:
                raise DecompositionError(f"face {face} is shared by {len(owners)} tetrahedra")
            if len(owners) == 2:
                a, b, c = (vertices[v] for v in face)
                n = np.cross(b - a, c - a)
                s0 = float(np.dot(vertices[owners[0][1]] - a, n))
                s1 = float(np.dot(vertices[owners[1][1]] - a, n))
                if s0 * s1 >= 0.0:
                    raise DecompositionError(
                        f"tetrahedra {owners[0][0]} and {owners[1][0]} lie on the same "
                        f"side of their shared face {face}"
                    )
            elif surface is not None:
                surf_faces = {tuple(sorted(f)) for f in surface.faces.tolist()}
                if face not in surf_faces:
                    raise DecompositionError(
                        f"face {face} borders one tetrahedron but is not a surface face"
                    )

    @staticmethod
    def _incident_cycle(tets, edge):
        """Tetrahedra around an interior edge, in cyclic gluing order."""
        i, j = edge
        flank = {}  # vertex -> list of (tet index, other flank vertex)
        incident = []
        for t_idx, tet in enumerate(tets):
            if i in tet and j in tet:
                c, d = sorted(set(tet) - {i, j})
                incident.append(t_idx)
                flank.setdefault(c, []).append((t_idx, d))
                flank.setdefault(d, []).append((t_idx, c))
        if len(incident) < 2:
            raise DecompositionError(
                f"interior edge {edge} lies in {len(incident)} tetrahedra; need >= 2"
            )
        if any(len(v) != 2 for v in flank.values()):
            raise DecompositionError(f"star of interior edge {edge} does not close up")
        # walk the cycle
        start = incident[0]
        _, current = sorted(set(tets[start]) - {i, j})
        order = [start]
        while True:
            nxt = [(t, other) for t, other in flank[current] if t != order[-1]]
            if len(nxt) != 1:
                raise DecompositionError(f"star of interior edge {edge} branches")
            if nxt[0][0] == start:
                break
            order.append(nxt[0][0])
            current = nxt[0][1]
            if len(order) > len(incident):
                raise DecompositionError(f"star of interior edge {edge} does not close up")
        if len(order) != len(incident):
            raise DecompositionError(
                f"star of interior edge {edge} splits into several cycles"
            )
        return tuple(order)

    # -- derived data -------------------------------------------------------

    @property
    def r(self):
        return len(self.interior_edges)

    def edge_length(self, edge):
        i, j = edge
        return float(np.linalg.norm(self.vertices[i] - self.vertices[j]))

    @property
    def embedded_interior_lengths(self):
        """The special length vector realized by the embedding."""
        return np.array([self.edge_length(e) for e in self.interior_edges])

    @property
    def boundary_lengths(self):
        return np.array([self.edge_length(e) for e in self.boundary_edges])

    def tet_lengths(self, t_idx, interior_l=None):
        """Six edge lengths of a tetrahedron in TETRA_EDGE_ORDER, taking
        interior-edge lengths from interior_l when given."""
        if interior_l is None:
            interior_l = self.embedded_interior_lengths
        index = {e: k for k, e in enumerate(self.interior_edges)}
        tet = self.tetrahedra[t_idx]
        out = np.empty(6)
        for m, (a, b) in enumerate(TETRA_EDGE_ORDER):
            pair = tuple(sorted((tet[a], tet[b])))
            out[m] = interior_l[index[pair]] if pair in index else self.edge_length(pair)
        return out


def decompose_star(surface, apex, tol: Tolerances = DEFAULT_TOL):
    """Cone a star-shaped surface from one of its vertices.

    One tetrahedron per face not containing the apex; fails (listing the
    blocked faces) when some face is not fully visible from the apex.
    Interior edges are the cone edges that are not surface edges.
    """
    apex = int(apex)
    p = surface.vertices
    blocked = []
    tets = []
    cone_partners = set()
    for face in map(tuple, surface.faces.tolist()):
        if apex in face:
            continue
        a, b, c = face
        n = np.cross(p[b] - p[a], p[c] - p[a])
        side = float(np.dot(p[apex] - p[a], n))
        if side >= -tol.geom_tol * surface.diameter**3:
            blocked.append(face)
            continue
        tets.append((apex, a, b, c))
        cone_partners.update(face)
    if blocked:
        raise DecompositionError(
            f"surface is not star-shaped from vertex {apex}; blocked faces: {blocked}"
        )
    surf_edges = set(surface.edges)
    interior = sorted(
        tuple(sorted((apex, w))) for w in cone_partners
        if tuple(sorted((apex, w))) not in surf_edges
    )
    return Decomposition(p, tets, interior, surface=surface, tol=tol)


# ---------------------------------------------------------------------------
# cone angles, mean curvature, lambda matrix
# ---------------------------------------------------------------------------


def _per_tet_angles(d, interior_l, want_jacobian=False):
    """Angles (and optionally Jacobians) for every tetrahedron at the
    given interior lengths; raises naming the first infeasible one."""
    out = []
    for t_idx in range(len(d.tetrahedra)):
        lengths = d.tet_lengths(t_idx, interior_l)
        feasible, _ = cayley_menger_feasible(lengths)
        if not feasible:
            raise DecompositionError(
                f"lengths are infeasible for tetrahedron {t_idx} = "
                f"{d.tetrahedra[t_idx]}: {lengths.tolist()}"
            )
        if want_jacobian:
            out.append(tetra_angles_and_jacobian(lengths))
        else:
            angles, _ = _angles_only(lengths)
            out.append((angles, None))
    return out


def _angles_only(lengths):
    """Cheaper angle evaluation reusing the same Gram-matrix route."""
    q = {}
    for (i, j), l in zip(TETRA_EDGE_ORDER, lengths):
        q[(i, j)] = q[(j, i)] = l * l
    angles = np.empty(6)
    for k, (a, b) in enumerate(TETRA_EDGE_ORDER):
        c_v, d_v = sorted(set(range(4)) - {a, b})
        m00, m11, m22, m01, m02, m12 = _tet_gram_entries(q, a, b, c_v, d_v)
        big_g = (
            m00 * m11 * m22 - m00 * m12**2 - m01**2 * m22
            + 2.0 * m01 * m02 * m12 - m02**2 * m11
        )
        angles[k] = np.arctan2(np.sqrt(max(big_g * m00, 0.0)), m00 * m12 - m01 * m02)
    return angles, None


def cone_angles(d, interior_l=None):
    """Total dihedral angle collected around each interior edge at the
    given interior lengths (default: the embedded lengths, where every
    entry is 2*pi for closed stars)."""
    if interior_l is None:
        interior_l = d.embedded_interior_lengths
    interior_l = np.asarray(interior_l, dtype=float)
    if interior_l.shape != (d.r,):
        raise DecompositionError(f"expected {d.r} interior lengths")
    index = {e: k for k, e in enumerate(d.interior_edges)}
    theta = np.zeros(d.r)
    per_tet = _per_tet_angles(d, interior_l)
    for t_idx, (angles, _) in enumerate(per_tet):
        tet = d.tetrahedra[t_idx]
        for m, (a, b) in enumerate(TETRA_EDGE_ORDER):
            pair = tuple(sorted((tet[a], tet[b])))
            if pair in index:
                theta[index[pair]] += angles[m]
    return theta


def mean_curvature_H(d, interior_l=None):
    """Sum over (tetrahedron, edge) incidences of length times dihedral
    angle; its gradient in the interior lengths is the cone-angle vector."""
    if interior_l is None:
        interior_l = d.embedded_interior_lengths
    interior_l = np.asarray(interior_l, dtype=float)
    total = 0.0
    for t_idx, (angles, _) in enumerate(_per_tet_angles(d, interior_l)):
        total += float(d.tet_lengths(t_idx, interior_l) @ angles)
    return total


@dataclass(frozen=True)
class LambdaMatrix:
    """Jacobian of the cone-angle map in the interior-edge lengths."""

    matrix: np.ndarray
    eigenvalues: np.ndarray
    rank: int

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.size:
            scale = np.abs(m).max()
            if scale > 0 and np.abs(m - m.T).max() > SYM_TOL * scale:
                raise DecompositionError(
                    f"lambda matrix asymmetric beyond tolerance: "
                    f"{np.abs(m - m.T).max():.3e} vs scale {scale:.3e}"
                )
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "eigenvalues", np.array(self.eigenvalues, dtype=float))

    @property
    def r(self):
        return len(self.matrix)

    @property
    def min_eigenvalue(self):
        return float(self.eigenvalues.min()) if self.eigenvalues.size else np.inf

    @property
    def is_positive_definite(self):
        return self.r == 0 or self.min_eigenvalue > 0.0

    @property
    def is_singular(self):
        return self.rank < self.r

    @property
    def diagonal_positive(self):
        return bool(np.all(np.diag(self.matrix) > 0.0)) if self.r else True


def lambda_matrix(d, interior_l=None, tol: Tolerances = DEFAULT_TOL):
    """Assemble the r x r Jacobian (d theta_i / d l_j) analytically.

    Refuses near-degenerate tetrahedra (squared volume below the interior
    margin relative to the longest edge), where the derivatives blow up.
    """
    if interior_l is None:
        interior_l = d.embedded_interior_lengths
    interior_l = np.asarray(interior_l, dtype=float)
    index = {e: k for k, e in enumerate(d.interior_edges)}
    lam = np.zeros((d.r, d.r))
    for t_idx in range(len(d.tetrahedra)):
        lengths = d.tet_lengths(t_idx, interior_l)
        feasible, vol = cayley_menger_feasible(lengths)
        if not feasible or vol**2 < E_INTERIOR_MARGIN * lengths.max() ** 6:
            raise DecompositionError(
                f"tetrahedron {t_idx} = {d.tetrahedra[t_idx]} is degenerate or too "
                f"close to the boundary of the feasible length domain"
            )
        _, jac = tetra_angles_and_jacobian(lengths)
        tet = d.tetrahedra[t_idx]
        local = [tuple(sorted((tet[a], tet[b]))) for a, b in TETRA_EDGE_ORDER]
        for row, pair_r in enumerate(local):
            if pair_r not in index:
                continue
            for col, pair_c in enumerate(local):
                if pair_c in index:
                    lam[index[pair_r], index[pair_c]] += jac[row, col]
    if d.r == 0:
        return LambdaMatrix(lam, np.zeros(0), 0)
    eigenvalues = np.linalg.eigvalsh(0.5 * (lam + lam.T))
    smax = np.abs(eigenvalues).max()
    rank = int((np.abs(eigenvalues) > tol.rank_tol * smax).sum()) if smax > 0 else 0
    return LambdaMatrix(lam, eigenvalues, rank)


def dihedral_table(d, interior_l=None):
    """Angle per (tetrahedron, edge) incidence, with a per-tetrahedron
    Gram consistency check on the four outward face normals."""
    if interior_l is None:
        interior_l = d.embedded_interior_lengths
    table = {}
    for t_idx, (angles, _) in enumerate(_per_tet_angles(d, interior_l)):
        tet = d.tetrahedra[t_idx]
        gram = np.eye(4)
        for m, (a, b) in enumerate(TETRA_EDGE_ORDER):
            pair = tuple(sorted((tet[a], tet[b])))
            table[(t_idx, pair)] = float(angles[m])
            # faces are indexed by their opposite vertex: the edge (a, b)
            # is shared by the faces opposite the *other* two vertices
            c_v, d_v = sorted(set(range(4)) - {a, b})
            gram[c_v, d_v] = gram[d_v, c_v] = -np.cos(angles[m])
        if np.linalg.det(gram) < -1e-9:
            raise DecompositionError(
                f"dihedral angles of tetrahedron {t_idx} fail the Gram check"
            )
    return table


def rigidity_from_lambda(d, tol: Tolerances = DEFAULT_TOL):
    """Rigidity verdict from the lambda matrix: rigid iff nonsingular
    (r = 0 counts as rigid).  When the decomposition carries its boundary
    surface, the verdict is cross-checked against the rigidity matrix of
    the boundary bar framework; disagreement is a hard error.
    """
    if d.r == 0:
        verdict = True
    else:
        lam = lambda_matrix(d, tol=tol)
        s = np.linalg.svd(lam.matrix, compute_uv=False)
        verdict = bool(s[-1] > tol.rank_tol * s[0])
    if d.surface is not None:
        fw = Framework.from_surface(d.surface)
        other = is_infinitesimally_rigid(fw, tol)
        if other != verdict:
            raise DecompositionError(
                "rigidity verdicts disagree: lambda matrix says "
                f"{'rigid' if verdict else 'flexible'}, rigidity matrix says "
                f"{'rigid' if other else 'flexible'}.\nvertices=\n{d.vertices!r}\n"
                f"tetrahedra={d.tetrahedra!r}\ninterior={d.interior_edges!r}"
            )
    return verdict


# ---------------------------------------------------------------------------
# positive-definiteness probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProbeTrial:
    kind: str
    seed: tuple
    r: int
    min_eigenvalue: float
    diagonal_positive: bool
    weakly_convex: bool
    rigid: bool

    def to_dict(self):
        return {
            "kind": self.kind,
            "seed": list(self.seed),
            "r": self.r,
            "min_eigenvalue": self.min_eigenvalue,
            "diagonal_positive": self.diagonal_positive,
            "weakly_convex": self.weakly_convex,
            "rigid": self.rigid,
        }


@dataclass(frozen=True)
class ProbeReport:
    trials: tuple
    failures: int
    counterexamples: tuple  # weakly convex, non-PD instances, dumped verbatim

    @property
    def n_trials(self):
        return len(self.trials)

    @property
    def min_eigenvalues(self):
        return np.array([t.min_eigenvalue for t in self.trials])

    @property
    def diagonal_positive_rate(self):
        if not self.trials:
            return float("nan")
        return sum(t.diagonal_positive for t in self.trials) / len(self.trials)

    def to_dict(self):
        eigs = self.min_eigenvalues
        weakly = [t for t in self.trials if t.weakly_convex]
        summary = {
            "trials": len(self.trials),
            "generation_failures": self.failures,
            "weakly_convex_trials": len(weakly),
            "diagonal_positive_rate": self.diagonal_positive_rate,
            "non_pd_weakly_convex": len(self.counterexamples),
        }
        if len(eigs):
            summary["min_eigenvalue"] = {
                "min": float(eigs.min()),
                "median": float(np.median(eigs)),
                "max": float(eigs.max()),
            }
        return {
            "summary": summary,
            "trials": [t.to_dict() for t in self.trials],
            "counterexamples": list(self.counterexamples),
        }


def pd_probe(trials=500, seed=0, include_controls=False, tol: Tolerances = DEFAULT_TOL):
    """Empirical scan of lambda-matrix spectra over random weakly convex
    decomposable polyhedra (star decompositions of dented hulls and
    axis-decomposable suspensions, in equal parts).

    Purely observational: reports the minimum-eigenvalue distribution,
    the diagonal-positivity rate, and dumps any weakly convex instance
    whose matrix fails positive definiteness.  Per-trial seeds derive
    from the probe seed, so every instance can be regenerated.
    """
    from . import generators  # deferred: generators sits above this module

    from .geometry import classify_convexity

    records = []
    failures = 0
    counterexamples = []
    kinds = ["dented_hull_star", "suspension_axis"]
    if include_controls:
        kinds.append("control_nonconvex")
    for k in range(trials):
        kind = kinds[k % len(kinds)]
        trial_seed = (int(seed), k)
        rng = np.random.default_rng(trial_seed)
        try:
            decomposition = generators.probe_decomposition(kind, rng, tol=tol)
            lam = lambda_matrix(decomposition, tol=tol)
            rigid = rigidity_from_lambda(decomposition, tol=tol)
            weakly = classify_convexity(decomposition.surface, tol).is_weakly_convex
        except Exception as exc:  # generation failures are counted, not fatal
            logger.debug("probe trial %d (%s) failed: %s", k, kind, exc)
            failures += 1
            continue
        trial = ProbeTrial(
            kind=kind,
            seed=trial_seed,
            r=lam.r,
            min_eigenvalue=lam.min_eigenvalue if lam.r else float("inf"),
            diagonal_positive=lam.diagonal_positive,
            weakly_convex=weakly,
            rigid=rigid,
        )
        records.append(trial)
        if weakly and lam.r and not lam.is_positive_definite:
            counterexamples.append(
                {
                    "trial": trial.to_dict(),
                    "vertices": decomposition.vertices.tolist(),
                    "tetrahedra": [list(t) for t in decomposition.tetrahedra],
                    "interior_edges": [list(e) for e in decomposition.interior_edges],
                    "matrix": lam.matrix.tolist(),
                    "eigenvalues": lam.eigenvalues.tolist(),
                }
            )
    return ProbeReport(tuple(records), failures, tuple(counterexamples))

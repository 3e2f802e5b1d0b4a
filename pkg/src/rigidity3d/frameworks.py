"""Rigidity matrix, flex spaces, equilibrium stresses, tensegrity checks.

The rigidity matrix R of a framework has one row per edge {i, j}: the
block of columns for vertex i holds p_i - p_j, the block for j holds
p_j - p_i.  For a velocity field m (flattened), (R m) at row {i, j} is
(p_i - p_j) . (m_i - m_j): zero on bars, <= 0 on cables, >= 0 on struts
for a tensegrity flex.  Infinitesimal flexes span the null space of R;
equilibrium stresses span its left null space.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import DEFAULT_TOL, GeometryError, Tolerances, as_points, diameter

__all__ = [
    "EdgeKind",
    "Framework",
    "FrameworkError",
    "Motion",
    "Stress",
    "FlexSpace",
    "TensegrityFlexReport",
    "rigidity_matrix",
    "rigidity_rank",
    "bar_flex_space",
    "trivial_motion_basis",
    "is_infinitesimally_rigid",
    "tensegrity_flex_test",
    "equilibrium_stress_space",
    "equilibrium_residual",
    "is_proper",
    "stress_energy",
    "exchange_rigidity_check",
]


class FrameworkError(Exception):
    """Invalid framework input or violated operation precondition."""


class EdgeKind(Enum):
    BAR = "bar"
    CABLE = "cable"
    STRUT = "strut"

    @classmethod
    def coerce(cls, value):
        if isinstance(value, cls):
            return value
        return cls(str(value).lower())


@dataclass
class Framework:
    """Tensegrity framework: points plus edges labeled bar/cable/strut.

    Edges may be given as (i, j) pairs (labeled bars) or (i, j, kind)
    triples; they are stored with i < j, in the given order.
    """

    vertices: np.ndarray
    edges: tuple

    def __init__(self, vertices, edges, tol: Tolerances = DEFAULT_TOL):
        vertices = as_points(vertices)
        if not np.all(np.isfinite(vertices)):
            raise FrameworkError("non-finite vertex coordinates")
        n = len(vertices)
        norm_edges = []
        seen = set()
        for item in edges:
            if len(item) == 2:
                i, j = item
                kind = EdgeKind.BAR
            else:
                i, j, kind = item
                kind = EdgeKind.coerce(kind)
            i, j = int(i), int(j)
            if i == j:
                raise FrameworkError(f"edge ({i}, {j}) is a loop")
            if not (0 <= i < n and 0 <= j < n):
                raise FrameworkError(f"edge ({i}, {j}) out of range for {n} vertices")
            if i > j:
                i, j = j, i
            if (i, j) in seen:
                raise FrameworkError(f"duplicate edge ({i}, {j})")
            seen.add((i, j))
            norm_edges.append((i, j, kind))

        if norm_edges:
            diam = diameter(vertices)
            for i, j, _ in norm_edges:
                if np.linalg.norm(vertices[i] - vertices[j]) < tol.geom_tol * diam:
                    raise FrameworkError(f"edge ({i}, {j}) has (near-)zero length")

        vertices.flags.writeable = False
        self.vertices = vertices
        self.edges = tuple(norm_edges)

    @classmethod
    def from_surface(cls, surface, kind=EdgeKind.BAR, tol: Tolerances = DEFAULT_TOL):
        """Bar framework (by default) on the edge skeleton of a surface."""
        return cls(surface.vertices, [(i, j, kind) for i, j in surface.edges], tol=tol)

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    @property
    def edge_pairs(self):
        return tuple((i, j) for i, j, _ in self.edges)

    def kind_of(self, pair):
        i, j = sorted(pair)
        for a, b, kind in self.edges:
            if (a, b) == (i, j):
                return kind
        raise FrameworkError(f"({i}, {j}) is not an edge of the framework")

    def without_edge(self, pair):
        i, j = sorted(pair)
        if (i, j) not in self.edge_pairs:
            raise FrameworkError(f"({i}, {j}) is not an edge of the framework")
        return Framework(
            np.array(self.vertices), [e for e in self.edges if (e[0], e[1]) != (i, j)]
        )

    def with_edge(self, i, j, kind=EdgeKind.BAR):
        return Framework(np.array(self.vertices), list(self.edges) + [(i, j, kind)])

    def _replace_vertices(self, new_vertices):
        return Framework(new_vertices, list(self.edges))


@dataclass(frozen=True)
class Motion:
    """Velocity field: one 3-vector per vertex."""

    velocities: np.ndarray

    def __post_init__(self):
        v = np.array(self.velocities, dtype=float)
        if v.ndim != 2 or v.shape[1] != 3:
            raise FrameworkError(f"velocities must be (n, 3), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise FrameworkError("non-finite velocities")
        v.flags.writeable = False
        object.__setattr__(self, "velocities", v)

    @property
    def flat(self):
        return self.velocities.ravel()

    @classmethod
    def from_flat(cls, vec):
        return cls(np.asarray(vec, dtype=float).reshape(-1, 3))


@dataclass(frozen=True)
class Stress:
    """Self-stress candidate: scalar omega per edge, keyed by (i, j), i<j."""

    omega: dict

    def __post_init__(self):
        clean = {}
        for pair, w in self.omega.items():
            i, j = sorted(int(x) for x in pair)
            clean[(i, j)] = float(w)
        object.__setattr__(self, "omega", clean)

    def as_vector(self, fw):
        _check_stress_keys(fw, self)
        return np.array([self.omega[pair] for pair in fw.edge_pairs])

    @classmethod
    def from_vector(cls, fw, vec):
        vec = np.asarray(vec, dtype=float)
        if vec.shape != (fw.n_edges,):
            raise FrameworkError(f"stress vector must have {fw.n_edges} entries")
        return cls(dict(zip(fw.edge_pairs, vec)))

    def __getitem__(self, pair):
        i, j = sorted(int(x) for x in pair)
        return self.omega[(i, j)]


def _check_stress_keys(fw, stress):
    if set(stress.omega) != set(fw.edge_pairs):
        raise FrameworkError("stress is not keyed exactly by the framework's edge set")


@dataclass(frozen=True)
class FlexSpace:
    """Orthonormal basis of the infinitesimal flex space of a bar framework."""

    basis: tuple
    dimension: int
    trivial_dimension: int

    def __post_init__(self):
        if self.trivial_dimension > self.dimension:
            raise FrameworkError("trivial_dimension exceeds dimension")
        if self.basis:
            mat = np.array([m.flat for m in self.basis])
            gram = mat @ mat.T
            if np.abs(gram - np.eye(len(mat))).max() > 1e-10:
                raise FrameworkError("flex basis is not orthonormal")

    @property
    def nontrivial_dimension(self):
        return self.dimension - self.trivial_dimension


# ---------------------------------------------------------------------------
# core linear algebra
# ---------------------------------------------------------------------------


def rigidity_matrix(fw):
    """The (edge count) x (3 * vertex count) rigidity matrix."""
    r = np.zeros((fw.n_edges, 3 * fw.n_vertices))
    p = fw.vertices
    for row, (i, j, _) in enumerate(fw.edges):
        d = p[i] - p[j]
        r[row, 3 * i : 3 * i + 3] = d
        r[row, 3 * j : 3 * j + 3] = -d
    return r


def _svd_rank(matrix, rank_tol):
    if matrix.size == 0:
        return 0, np.zeros(0)
    s = np.linalg.svd(matrix, compute_uv=False)
    if s[0] == 0.0:
        return 0, s
    return int((s > rank_tol * s[0]).sum()), s


def rigidity_rank(fw, tol: Tolerances = DEFAULT_TOL):
    rank, _ = _svd_rank(rigidity_matrix(fw), tol.rank_tol)
    return rank


def _sign_fix(vec):
    """Flip sign so the entry of largest magnitude is positive."""
    pivot = vec[np.abs(vec).argmax()]
    return -vec if pivot < 0 else vec


def trivial_motion_basis(fw, tol: Tolerances = DEFAULT_TOL):
    """Orthonormal basis of the restrictions of ambient infinitesimal
    isometries (3 translations + 3 rotations), as rows of shape (k, 3n)."""
    p = fw.vertices
    gens = []
    for t in np.eye(3):
        gens.append(np.tile(t, fw.n_vertices))
    for a in np.eye(3):
        gens.append(np.cross(a, p).ravel())
    gens = np.array(gens)
    u, s, vt = np.linalg.svd(gens, full_matrices=False)
    rank = int((s > tol.rank_tol * s[0]).sum())
    return vt[:rank]


def bar_flex_space(fw, tol: Tolerances = DEFAULT_TOL):
    """Null space of the rigidity matrix (every edge treated as a bar)."""
    n3 = 3 * fw.n_vertices
    r = rigidity_matrix(fw)
    if fw.n_edges == 0:
        basis = np.eye(n3)
    else:
        _, s, vt = np.linalg.svd(r)
        rank = int((s > tol.rank_tol * s[0]).sum()) if s[0] > 0 else 0
        basis = vt[rank:]
    motions = tuple(Motion.from_flat(_sign_fix(row)) for row in basis)
    trivial = trivial_motion_basis(fw, tol)
    return FlexSpace(motions, len(basis), len(trivial))


def _spans_3space(points, rank_tol):
    centered = points - points.mean(axis=0)
    rank, _ = _svd_rank(centered, rank_tol)
    return rank == 3


def is_infinitesimally_rigid(fw, tol: Tolerances = DEFAULT_TOL):
    """True iff the only infinitesimal flexes are the trivial ones.

    Requires a configuration that affinely spans 3-space; degenerate
    (planar/collinear) configurations raise, since their rigidity theory
    is lower-dimensional and out of scope here.
    """
    if fw.n_vertices < 3:
        raise FrameworkError("need at least 3 vertices")
    if not _spans_3space(fw.vertices, tol.rank_tol):
        raise FrameworkError(
            "configuration does not span 3-space; lower-dimensional rigidity "
            "analysis is out of scope"
        )
    space = bar_flex_space(fw, tol)
    return space.dimension == space.trivial_dimension


def nontrivial_flex(fw, tol: Tolerances = DEFAULT_TOL):
    """A unit flex orthogonal to all trivial motions, or None if the
    framework is infinitesimally rigid."""
    space = bar_flex_space(fw, tol)
    if space.dimension == space.trivial_dimension:
        return None
    flexes = np.array([m.flat for m in space.basis])
    trivial = trivial_motion_basis(fw, tol)
    residual = flexes - (flexes @ trivial.T) @ trivial
    norms = np.linalg.norm(residual, axis=1)
    best = residual[norms.argmax()]
    return Motion.from_flat(_sign_fix(best / np.linalg.norm(best)))


# ---------------------------------------------------------------------------
# tensegrity sign conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TensegrityFlexReport:
    """Per-edge outcome of the first-order cable/bar/strut conditions."""

    values: dict  # edge pair -> (p_i - p_j) . (m_i - m_j)
    violations: tuple

    @property
    def satisfied(self):
        return not self.violations


def tensegrity_flex_test(fw, motion, slack=1e-10):
    """Evaluate (p_i - p_j) . (m_i - m_j) on every edge and check the
    sign condition for its kind: = 0 bars, <= 0 cables, >= 0 struts."""
    m = motion.velocities
    if m.shape != fw.vertices.shape:
        raise FrameworkError("motion size does not match framework")
    rates = rigidity_matrix(fw) @ m.ravel()
    values = {}
    violations = []
    for (i, j, kind), value in zip(fw.edges, rates):
        values[(i, j)] = float(value)
        bad = (
            (kind is EdgeKind.BAR and abs(value) > slack)
            or (kind is EdgeKind.CABLE and value > slack)
            or (kind is EdgeKind.STRUT and value < -slack)
        )
        if bad:
            violations.append((i, j))
    return TensegrityFlexReport(values, tuple(violations))


# ---------------------------------------------------------------------------
# equilibrium stresses
# ---------------------------------------------------------------------------


def equilibrium_stress_space(fw, tol: Tolerances = DEFAULT_TOL):
    """Orthonormal basis of the space of equilibrium stresses (left null
    space of the rigidity matrix), sign-fixed so each basis vector's
    largest-magnitude entry is positive.  Empty list if only zero."""
    if fw.n_edges == 0:
        return []
    r = rigidity_matrix(fw)
    u, s, vt = np.linalg.svd(r)
    rank = int((s > tol.rank_tol * s[0]).sum()) if s.size and s[0] > 0 else 0
    basis = u[:, rank:].T
    return [Stress.from_vector(fw, _sign_fix(row)) for row in basis]


def equilibrium_residual(fw, stress):
    """Largest vertex residual |sum_j omega_ij (p_i - p_j)| of a stress."""
    w = stress.as_vector(fw)
    load = (rigidity_matrix(fw).T @ w).reshape(-1, 3)
    return float(np.linalg.norm(load, axis=1).max())


def is_proper(fw, stress, slack=1e-12):
    """Sign conditions for a proper stress: omega >= 0 on cables,
    omega <= 0 on struts, unrestricted on bars."""
    _check_stress_keys(fw, stress)
    for i, j, kind in fw.edges:
        w = stress.omega[(i, j)]
        if kind is EdgeKind.CABLE and w < -slack:
            return False
        if kind is EdgeKind.STRUT and w > slack:
            return False
    return True


def stress_energy(fw, stress, motion):
    """Contraction sum_ij omega_ij (p_i - p_j) . (m_i - m_j); identically
    zero in the motion whenever the stress is an equilibrium stress."""
    w = stress.as_vector(fw)
    return float(w @ (rigidity_matrix(fw) @ motion.flat))


def exchange_rigidity_check(fw, stress, removed_edge, tol: Tolerances = DEFAULT_TOL):
    """Rigidity verdict after deleting an edge carrying nonzero stress.

    Preconditions (each reported distinctly on violation): the framework
    (as all bars) is infinitesimally rigid, the stress is proper and in
    equilibrium, and the removed edge carries nonzero stress.  When they
    hold, the deleted framework is rigid again; this is verified by rank
    rather than assumed.
    """
    _check_stress_keys(fw, stress)
    pair = tuple(sorted(removed_edge))
    if pair not in fw.edge_pairs:
        raise FrameworkError(f"{pair} is not an edge of the framework")
    if not is_proper(fw, stress):
        raise FrameworkError("precondition violated: stress is not proper")
    w = stress.as_vector(fw)
    scale = np.abs(w).max()
    resid = equilibrium_residual(fw, stress)
    if scale == 0.0 or resid > 1e-9 * scale * diameter(fw.vertices):
        raise FrameworkError(
            f"precondition violated: stress is not an equilibrium stress "
            f"(residual {resid:.2e})"
        )
    if not is_infinitesimally_rigid(fw, tol):
        raise FrameworkError("precondition violated: framework is not rigid")
    if abs(stress.omega[pair]) <= tol.rank_tol * scale:
        raise FrameworkError(
            f"precondition violated: stress vanishes on removed edge {pair}"
        )
    return is_infinitesimally_rigid(fw.without_edge(pair), tol)

"""rigidity3d: infinitesimal rigidity of polyhedral frameworks.

Rigidity and equilibrium-stress analysis for bar/cable/strut frameworks,
suspension (bipyramid) surfaces and their scalar/matrix rigidity
invariants, plus the sign-counting machinery behind convexity-based
rigidity arguments.
"""

__version__ = "0.1.0"

from .geometry import (  # noqa: F401
    DEFAULT_TOL,
    Convexity,
    ConvexityReport,
    GeometryError,
    Point3,
    PolyhedralSurface,
    ProjectiveMap,
    SphericalPolygon,
    Tolerances,
    apply_projective,
    cayley_menger_feasible,
    classify_convexity,
    dihedral_angle,
    hemisphere_witness,
    normalize_pole_frame,
    spherical_polygon_relation_residual,
    vertex_link,
)

from .frameworks import (  # noqa: F401
    EdgeKind,
    FlexSpace,
    Framework,
    FrameworkError,
    Motion,
    Stress,
    TensegrityFlexReport,
    bar_flex_space,
    equilibrium_residual,
    equilibrium_stress_space,
    exchange_rigidity_check,
    is_infinitesimally_rigid,
    is_proper,
    nontrivial_flex,
    rigidity_matrix,
    rigidity_rank,
    stress_energy,
    tensegrity_flex_test,
    trivial_motion_basis,
)

from .cauchy import (  # noqa: F401
    CauchyError,
    DentHarnessReport,
    DentResult,
    DentTrial,
    SignChangeStats,
    SignVector,
    SignedPlanarGraph,
    VertexSignReport,
    count_sign_changes,
    cyclic_sign_changes,
    dent,
    dent_rigidity_harness,
    dihedral_rates,
    impossible_labeling_search,
    rotation_system,
    sign_subgraph,
    sign_vector_from_flex,
    vertex_sign_change_check,
)

from .suspensions import (  # noqa: F401
    ConvexProfileReport,
    LambdaBreakdown,
    NSDecomposability,
    Suspension,
    SuspensionError,
    axis_decomposition,
    build_suspension,
    convex_profile_certificate,
    cylindrical_equator,
    inductive_proper_stress,
    interior_edge_star,
    is_ns_decomposable,
    lambda_scalar,
    normalize_poles,
    suspension_rigidity,
    tensegrity_labeling,
    theta_prime,
)

from .hessian import (  # noqa: F401
    Decomposition,
    DecompositionError,
    LambdaMatrix,
    ProbeReport,
    ProbeTrial,
    cone_angles,
    decompose_star,
    dihedral_table,
    lambda_matrix,
    mean_curvature_H,
    pd_probe,
    rigidity_from_lambda,
    schlafli_residual,
    tetra_angles_and_jacobian,
)

from .generators import (  # noqa: F401
    GenerationError,
    convex_suspension,
    dented_hull_star,
    flexible_suspension_fixture,
    probe_decomposition,
    random_convex_hull_surface,
    random_framework,
    random_projective_map,
    random_suspension,
    star_suspension,
    suspension_profile,
)

from .fileio import (  # noqa: F401
    FileFormatError,
    LoadedInstance,
    analysis_report,
    dump_off,
    from_document,
    instance_hash,
    load,
    load_off,
    save,
    to_document,
    validate_document,
)

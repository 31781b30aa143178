"""Supporting functions, max-affine extremal functions and product formulas.

Extremal functions V^S_K with convex-body growth S are computed exactly
(as max-affine functions of Log z) for toric compacta and approximately
(via orthonormal polynomials) otherwise.
"""

from ._kernels import BACKEND
from .bodies import (
    TAU_MEM,
    TAU_NUM,
    ConvexBody,
    ProductStructure,
    axis_extents,
    build_product_body,
    canonicalize,
    contains,
    contains_many,
    cube,
    diameter_and_witness,
    gauge,
    interval,
    lower_hull,
    point,
    probe_union_convexity,
    product_support,
    same_body,
    simplex,
    simplex_report,
    simplex_x,
    support,
)
from .closed_forms import (
    CompactFactorSpec,
    ProductCompact,
    unit_polydisc,
    v_block,
    v_disc,
    v_interval,
    v_polydisc_body,
)
from .counterexamples import (
    intro_counterexample,
    nonmaximality_note,
    sublevel_nonconvexity,
    weighted_counterexample,
)
from .errors import (
    ConvexGreenError,
    DegenerateBodyError,
    InvalidArgumentError,
    NotApplicableError,
    NoWitnessError,
    QuadratureError,
    ResourceError,
    SolverError,
    UnsupportedConfigurationError,
)
from .log_support import (
    LelongCertificate,
    MaxAffine,
    canonical_form,
    check_lelong,
    check_lelong_plus,
    compose_support,
    eval_extended,
    h_of_body,
    same_function,
)
from .product import (
    GridSpec,
    TheoremInstance,
    corollary_suite,
    lhs_exact,
    rhs_eval,
    rhs_exact,
    verify_theorem,
)
from .siciak import (
    ApproxConfig,
    approx_v,
    bernstein_walsh_check,
    build_basis,
    convergence_sweep,
    enumerate_lattice,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

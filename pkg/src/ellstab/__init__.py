"""Semistability and splitting types of degree-zero bundles on elliptic curves.

Exact computation over small finite fields: section bases of twisted bundles,
spectral divisors, the fully-split test, and the general splitting-type engine,
plus a line-oriented job format and CLI (`ellstab`).
"""

__version__ = "0.1.0"

from .galois import (  # noqa: F401
    ExtensionField,
    FieldElement,
    Poly,
    PrimeField,
    canonical_field,
    field_arith,
    find_irreducible,
    poly_factor,
)
from .elliptic import (  # noqa: F401
    Curve,
    Divisor,
    MarkedCurve,
    Place,
    Point,
    base_change,
    chord_tangent_add,
    divisor_class_point,
    is_r_torsion,
    linearly_equivalent,
    marked_sum,
)
from .funcspace import (  # noqa: F401
    CurveFunction,
    LocalExpansion,
    RRBasis,
    expand_local,
    fn_arith,
    principal_divisor,
    rr_basis,
    valuation,
)
from .bundles import (  # noqa: F401
    DirectSumPresentation,
    KernelPresentation,
    MonadPresentation,
    SectionSystem,
    evaluate,
    sections_direct_sum,
    sections_kernel,
    sections_monad,
)
from .stability import (  # noqa: F401
    KernelData,
    SplittingType,
    StabilityReport,
    WedgeProfile,
    fully_split_test,
    general_twist_spectral,
    incidence_order,
    kernel_dimension,
    spectral_divisor,
    splitting_type,
    wedge_valuation,
)
from .cli import JobDescription, Report, parse_job  # noqa: F401

"""Numerical toolkit for pairs of orthogonal projections on C^d."""

from .errors import (
    BadGrid,
    CertificateFailure,
    DegenerateGenericPart,
    DimensionMismatch,
    GridMismatch,
    InvalidForm,
    InvalidSpec,
    IoError,
    NoConvergence,
    NonOrthonormalBasis,
    NotPositive,
    SchemaError,
    TPKError,
    UnknownSuite,
)
from .friedrichs import (
    AngleReport,
    friedrichs_angle,
    friedrichs_c,
    friedrichs_c_oracle,
    pq_norm_predicates,
    verify_norm_equation,
)
from .halmos import HalmosForm, build_intertwiner, halmos_decompose, reconstruct
from .linalg import DEFAULT_POLICY, RankPolicy, SubspaceBasis, gap, numerical_rank, pinv
from .resolvent import (
    abc_sequences,
    angle_operators,
    intersection_projector_iterative,
    resolvent_tn,
    strict_limit_norm_check,
)
from .sampling import PairSpec, generate_pair, haar_unitary
from .subspaces import (
    Projector,
    SixSpaceDecomposition,
    intersect_ranges,
    projection_onto_range_qp,
    range_sum,
    six_space_decomposition,
)
from .suites import SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [
    "AngleReport",
    "BadGrid",
    "CertificateFailure",
    "DEFAULT_POLICY",
    "DegenerateGenericPart",
    "DimensionMismatch",
    "GridMismatch",
    "HalmosForm",
    "InvalidForm",
    "InvalidSpec",
    "IoError",
    "NoConvergence",
    "NonOrthonormalBasis",
    "NotPositive",
    "PairSpec",
    "Projector",
    "RankPolicy",
    "SchemaError",
    "SixSpaceDecomposition",
    "SubspaceBasis",
    "SuiteReport",
    "TPKError",
    "UnknownSuite",
    "abc_sequences",
    "angle_operators",
    "build_intertwiner",
    "friedrichs_angle",
    "friedrichs_c",
    "friedrichs_c_oracle",
    "gap",
    "generate_pair",
    "haar_unitary",
    "halmos_decompose",
    "intersect_ranges",
    "intersection_projector_iterative",
    "numerical_rank",
    "pinv",
    "pq_norm_predicates",
    "projection_onto_range_qp",
    "range_sum",
    "reconstruct",
    "resolvent_tn",
    "run_suite",
    "six_space_decomposition",
    "strict_limit_norm_check",
    "verify_norm_equation",
]

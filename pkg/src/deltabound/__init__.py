"""Bound states of 1D Schrödinger models with a delta interface between a
constant half-line and a graded (linear, parabolic, exponential) half-line."""

from .errors import (
    DeltaBoundError,
    InvalidParameterError,
    NotBoundStateError,
    OracleError,
    PoleError,
    SpecialFunctionRangeError,
    WindowTooSmallError,
)
from .logderiv import LogDerivativeEvaluator, Method, RightProfile, alpha, right_logderiv
from .oracle import (
    Grid,
    OracleSpectrum,
    RichardsonResult,
    assemble,
    default_grid,
    discretize,
    eigen_below,
    eigenpairs_below,
    richardson,
    sturm_count,
)
from .quantize import (
    BoundState,
    GraphicalSolutionData,
    QuantizationProblem,
    derivative_jump,
    eigenfunction,
    find_roots,
    graphical_data,
)
from .specfun import (
    AiryPair,
    airy_ai,
    airy_ai_logderiv,
    airy_bi,
    airy_zeros,
    bessel_k,
    bessel_k_logderiv,
)
from .units import (
    DimensionlessModel,
    PhysicalParameters,
    ProfileKind,
    length_scale,
    reduce,
    restore_energy,
)

__version__ = "0.1.0"

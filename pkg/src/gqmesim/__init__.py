"""Open quantum dynamics from generalized quantum master equations on emulated circuits."""

from .dilation import contraction_normalize, defect, dilate_1, dilate_2, embed_pow2
from .errors import (
    ConvergenceError,
    DimensionError,
    GqmeError,
    NonUniformGridError,
    SeriesFormatError,
    SingularSystemError,
    ValidationError,
)
from .gqme import propagate_gqme, sigma_z_curve, solve_volterra
from .liouville import devectorize, frobenius_norm, liouvillian_of, operator_norm, vectorize
from .oracle import compute_pfis, exact_reduced_propagator
from .series import MemoryKernelSeries, PfiSeries, PropagatorSeries, UnitarySeries, read_series, write_series
from .spinboson import (
    PRESETS,
    SpinBosonParams,
    TruncatedBathSpace,
    build_hamiltonians,
    discretize_spectral_density,
    preset,
    projected_liouvillian,
    thermal_bath_state,
)

__version__ = "0.1.0"

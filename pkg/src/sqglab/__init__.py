"""Pseudo-spectral lab for the dissipative SQG equation with Gevrey-regularity diagnostics."""

from .inequalities import (
    Family,
    HypothesisError,
    InequalityReport,
    TrialSpec,
    random_band_field,
    run_family,
    sweep_uniformity,
)
from .littlewood_paley import (
    band_range,
    bony_residual,
    gevrey_commutator,
    interior_bands,
    lp_lowpass,
    lp_project,
    paraproduct_R,
    paraproduct_T,
)
from .norms import (
    FitError,
    NonDecayingSpectrumError,
    RadiusFit,
    derivative_decay_table,
    fit_gevrey_radius,
    gevrey_norm,
    path_norm,
    sobolev_norm,
)
from .solver import (
    InitialData,
    PicardReport,
    Scheme,
    SolverConfig,
    gevrey_track,
    picard_iterate,
    solve,
    step,
)
from .spectral import (
    GevreyOverflowError,
    GevreyParams,
    GridSpec,
    SpectralField,
    dealiased_product,
    gevrey_multiplier,
    make_grid,
    to_physical,
    to_spectral,
)
from .trajectory import Trajectory

__version__ = "0.1.0"

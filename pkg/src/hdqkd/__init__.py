"""Finite-key secret-key-rate engine for time-energy high-dimensional QKD.

The package evaluates the extractable secret-key length of a
dispersive-optics HD-QKD session in the finite-key regime: the
time/conjugate-time measurement-overlap numerics, three-intensity
decoy-state bounds with Hoeffding deviations, and the key-length formula
with its threshold and fluctuation terms, plus parameter-sweep tooling.
"""

from .channel import (
    ChannelObservation,
    TimingModel,
    TrueFrameCounts,
    frame_statistics,
    mutual_information_bits,
    sample_frame_statistics,
    sigma_w_expected,
    transmittance,
    true_frame_counts,
)
from .config import (
    ConfigBundle,
    ConfigError,
    IntensityProfile,
    ProtocolParams,
    SecurityBudget,
    SessionSpec,
    beta_from_dispersion,
    load_config,
    load_config_file,
)
from .decoy import (
    DecoyBounds,
    DegenerateProfileError,
    EstimationImpossibleError,
    conditional_intensity,
    estimate_bounds,
    intensity_bounds,
    l1_distance_upper,
    sigma_single_upper,
    single_bound,
    tau,
    vacuum_bound,
    zeta,
)
from .overlap import (
    OverlapResult,
    QuadratureError,
    VacuousOverlapError,
    cbar_infinity,
    compute_overlap,
    fresnel_tail,
    overlap_dilated,
    overlap_discrete,
    overshoot_argmax,
    overshoot_constant,
)
from .pipeline import PipelineResult, evaluate
from .security import (
    InfeasiblePAlphaError,
    KeyRateReport,
    d_min,
    delta_fluctuation,
    gamma,
    key_length,
    key_rate_report,
    leak_ec,
)
from .sweep import (
    BetaScanResult,
    NoFeasiblePointError,
    SweepRow,
    SweepSpec,
    grid_values,
    optimize_beta,
    rows_to_csv,
    run_sweep,
)

__version__ = "1.0.0"

"""Photon ladder-operator pipelines on truncated Fock spaces."""

from .errors import (
    ConfigError,
    InvalidParameter,
    NoSignChange,
    TruncationOverflow,
    ZeroNormState,
    ZeroSuccessProbability,
)
from .fock import (
    DiagonalState,
    FieldState,
    LadderOp,
    LadderPipeline,
    PureState,
    apply_ac,
    apply_annihilate,
    apply_ca,
    apply_create,
    apply_pipeline,
    normalize,
)
from .observables import (
    GridSpec,
    MomentSummary,
    WignerGrid,
    fidelity,
    moments,
    thermal_ack_moments,
    thermal_cak_moments,
    wigner_at,
    wigner_grid,
)
from .special import assoc_laguerre, laguerre, polylog_neg
from .states import CoherentSpec, ThermalSpec, make_coherent, make_coherent_mean, make_number, make_thermal
from .cavity import (
    CavityConfig,
    CavityOutcome,
    conditional_map,
    conditional_map_repeated,
    fig9_sweep,
    pi_half_times,
    short_time_scaling_probe,
)

__version__ = "0.1.0"

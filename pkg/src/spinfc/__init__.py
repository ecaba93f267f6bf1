"""Collective-spin Franck-Condon toolkit.

Exact and bosonic-limit overlap factors between the environment eigenbases
of a driven central spin, the absorption spectra they produce, and the
sudden-switch precession dynamics that explain the favored transition.
"""

__version__ = "0.1.0"

from .collective_spin import (
    CollectiveOperators,
    DickeBasis,
    RotatedDickeState,
    WignerDMatrix,
    build_basis,
    rotate_dicke,
    rotation_oracle,
    wigner_d,
    wigner_d_column_zero,
)
from .dynamics import (
    PropagationResult,
    TrajectoryState,
    drive_propagation,
    measure_period,
    precession_closed_form,
    precession_numerical,
)
from .franck_condon import (
    FavoredLevel,
    FcTable,
    HpFcParams,
    favored_level_exact,
    favored_level_hp,
    fc_ground_column,
    fc_table,
    hp_fc_factor,
    hp_ground_probabilities,
)
from .model import (
    DriveStrengthWarning,
    DriveTerm,
    EffectiveEnvironment,
    ModelParams,
    effective_environment,
    franck_condon_angle,
    nv_default,
    resonance_detuning,
    rotated_eigenstate,
    rotating_frame_hamiltonian,
    rwa_drive,
    temperature_ratio_from_kelvin,
    transition_energy,
)
from .spectroscopy import (
    BlockadeMetric,
    Channel,
    GridSupportWarning,
    SpectrumGrid,
    ThermalWeights,
    blockade_metric,
    default_grid,
    local_maxima,
    rate,
    spectrum_thermal,
    spectrum_zero_t,
    thermal_weights,
    transition_probability,
    window,
)

__all__ = [
    "__version__",
    "BlockadeMetric",
    "Channel",
    "CollectiveOperators",
    "DickeBasis",
    "DriveStrengthWarning",
    "DriveTerm",
    "EffectiveEnvironment",
    "FavoredLevel",
    "FcTable",
    "GridSupportWarning",
    "HpFcParams",
    "ModelParams",
    "PropagationResult",
    "RotatedDickeState",
    "SpectrumGrid",
    "ThermalWeights",
    "TrajectoryState",
    "WignerDMatrix",
    "blockade_metric",
    "build_basis",
    "default_grid",
    "drive_propagation",
    "effective_environment",
    "favored_level_exact",
    "favored_level_hp",
    "fc_ground_column",
    "fc_table",
    "franck_condon_angle",
    "hp_fc_factor",
    "hp_ground_probabilities",
    "local_maxima",
    "measure_period",
    "nv_default",
    "precession_closed_form",
    "precession_numerical",
    "rate",
    "resonance_detuning",
    "rotate_dicke",
    "rotated_eigenstate",
    "rotating_frame_hamiltonian",
    "rotation_oracle",
    "rwa_drive",
    "spectrum_thermal",
    "spectrum_zero_t",
    "temperature_ratio_from_kelvin",
    "thermal_weights",
    "transition_energy",
    "transition_probability",
    "wigner_d",
    "wigner_d_column_zero",
    "window",
]

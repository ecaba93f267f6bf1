"""Central electronic spin coupled longitudinally to a collective nuclear spin.

The electronic triplet (levels s = -1, 0, +1 split by a zero-field term
D S_z^2) couples to N polarized nuclei through a uniform longitudinal
hyperfine constant A, while a transverse nuclear Zeeman term omega_nu J_x
mixes the ladder.  Within each electronic sector s the nuclear Hamiltonian

    H(s) = s A J_z + omega_nu J_x + s^2 D

is a tilted collective Zeeman term: its eigenstates are Dicke ladder states
rotated about y by the sector mixing angle, with level spacing
omega_tilde(s) = sqrt(omega_nu^2 + (s A)^2).

All frequencies are expressed in units of omega_nu unless stated otherwise;
the zero-field splitting only shifts the optical transition and is kept for
bookkeeping, spectra being reported against the detuning from it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from .collective_spin import (
    MAX_SPINS,
    CollectiveOperators,
    RotatedDickeState,
    wigner_d,
)

# Exact SI values (2019 redefinition).
BOLTZMANN_J_PER_K = 1.380649e-23
PLANCK_J_S = 6.62607015e-34

# Nitrogen-vacancy style defaults.  The quoted lab frequencies are taken as
# authoritative: nuclear Zeeman 0.15 MHz sets the unit, electronic Zeeman
# 211.35 MHz, zero-field splitting 2.87 GHz, drive D/20.
NV_NUCLEAR_FREQ_HZ = 0.15e6
NV_ELECTRON_ZEEMAN = 211.35e6 / NV_NUCLEAR_FREQ_HZ
NV_ZERO_FIELD = 2.87e9 / NV_NUCLEAR_FREQ_HZ


class DriveStrengthWarning(UserWarning):
    """Drive amplitude large enough to strain the rotating-wave picture."""


@dataclass(frozen=True)
class ModelParams:
    """Physical configuration; defaults reproduce the nv-default preset."""

    n_spins: int = 50
    hyperfine: float = 0.2
    omega_nu: float = 1.0
    omega_el: float = NV_ELECTRON_ZEEMAN
    zfs: float = NV_ZERO_FIELD
    rabi: float = NV_ZERO_FIELD / 20.0
    window_time: float = 10.0
    temperature: float = math.inf

    def __post_init__(self) -> None:
        if not isinstance(self.n_spins, (int, np.integer)):
            raise ValueError("n_spins must be an integer")
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ValueError(f"n_spins must be in 1..{MAX_SPINS}")
        # hyperfine = 0 and rabi = 0 are kept as valid degenerate limits
        # (bare line, switched-off drive).
        if self.hyperfine < 0:
            raise ValueError("hyperfine coupling must be >= 0")
        if self.rabi < 0:
            raise ValueError("rabi amplitude must be >= 0")
        if self.omega_nu <= 0:
            raise ValueError("omega_nu must be > 0")
        if self.omega_el < 0 or self.zfs < 0:
            raise ValueError("omega_el and zfs must be >= 0")
        if self.window_time <= 0:
            raise ValueError("window_time must be > 0")
        if not self.temperature > 0:
            raise ValueError("temperature ratio must be > 0 (inf allowed)")

    def with_updates(self, **changes) -> "ModelParams":
        return replace(self, **changes)


def nv_default() -> ModelParams:
    """Room-temperature NV-style preset: N = 50, A = 0.2 omega_nu."""
    return ModelParams()


@dataclass(frozen=True)
class EffectiveEnvironment:
    """Nuclear sector Hamiltonian for one electronic level."""

    n_spins: int
    sector: int
    hyperfine: float
    omega_nu: float
    energy_offset: float

    @property
    def precession(self) -> float:
        """Level spacing omega_tilde(s) = sqrt(omega_nu^2 + (s A)^2)."""
        return math.hypot(self.omega_nu, self.sector * self.hyperfine)

    @property
    def mixing_angle(self) -> float:
        """Tilt of the effective field from z; pi/2 for the bare sector."""
        return math.atan2(self.omega_nu, self.sector * self.hyperfine)

    def level_energies(self) -> np.ndarray:
        m = np.arange(self.n_spins + 1)
        return self.energy_offset + (m - self.n_spins / 2.0) * self.precession

    def hamiltonian(self, ops: CollectiveOperators) -> np.ndarray:
        if ops.n_spins != self.n_spins:
            raise ValueError("operator set built for a different n_spins")
        dim = self.n_spins + 1
        h = self.sector * self.hyperfine * ops.j_z + self.omega_nu * ops.j_x
        return h + self.energy_offset * np.eye(dim)


def effective_environment(params: ModelParams, sector: int) -> EffectiveEnvironment:
    if sector not in (-1, 0, 1):
        raise ValueError("electronic sector must be -1, 0 or +1")
    return EffectiveEnvironment(
        n_spins=params.n_spins,
        sector=sector,
        hyperfine=params.hyperfine,
        omega_nu=params.omega_nu,
        energy_offset=sector * sector * params.zfs,
    )


def rotated_eigenstate(params: ModelParams, sector: int, m: int) -> RotatedDickeState:
    """Eigenstate m of the sector Hamiltonian, as a rotated ladder state."""
    env = effective_environment(params, sector)
    if not 0 <= m <= params.n_spins:
        raise ValueError(f"level m={m} outside 0..{params.n_spins}")
    column = wigner_d(params.n_spins, env.mixing_angle).column(m)
    return RotatedDickeState(params.n_spins, env.mixing_angle, m, column)


def franck_condon_angle(params: ModelParams) -> float:
    """Mixing-angle difference theta between the s = 0 and s = 1 sectors.

    theta = pi/2 - atan2(omega_nu, A) = atan(A / omega_nu); the overlap
    table between the two eigenbases is the y rotation by this angle.
    """
    return math.atan2(params.hyperfine, params.omega_nu)


def transition_energy(params: ModelParams, m: int, n: int) -> float:
    """E(1, n) - E(0, m), the bare optical frequency of channel m -> n."""
    env0 = effective_environment(params, 0)
    env1 = effective_environment(params, 1)
    half = params.n_spins / 2.0
    return (env1.energy_offset + (n - half) * env1.precession) - (
        (m - half) * env0.precession
    )


def resonance_detuning(params: ModelParams, m: int, n: int) -> float:
    """Detuning from the electronic line at which channel m -> n peaks.

    Computed directly from the two level ladders so the electronic gap
    cancels exactly instead of through a large-number subtraction.
    """
    env0 = effective_environment(params, 0)
    env1 = effective_environment(params, 1)
    half = params.n_spins / 2.0
    return (n - half) * env1.precession - (m - half) * env0.precession


@dataclass(frozen=True)
class DriveTerm:
    """Rotating-wave drive between the s = 0 and s = 1 sectors.

    In the frame rotating at the drive frequency omega the Hamiltonian is
    block structured over (s=0, s=1): the diagonal blocks are the sector
    environments (the upper one shifted by -omega) and the off-diagonal
    block couples identical nuclear states with amplitude rabi / sqrt(2).
    """

    rabi: float

    @property
    def amplitude(self) -> float:
        return self.rabi / math.sqrt(2.0)


def rwa_drive(params: ModelParams) -> DriveTerm:
    if params.rabi > params.zfs / 10.0:
        warnings.warn(
            "drive amplitude exceeds zfs/10; rotating-wave treatment is "
            "questionable",
            DriveStrengthWarning,
            stacklevel=2,
        )
    return DriveTerm(rabi=params.rabi)


def rotating_frame_hamiltonian(
    params: ModelParams, delta: float, ops: CollectiveOperators
) -> np.ndarray:
    """Full drive Hamiltonian on the doubled space, drive detuned by delta.

    Basis ordering stacks the s = 0 nuclear block before the s = 1 block.
    The zero-field splitting cancels against the frame shift, leaving -delta
    on the upper block.
    """
    if ops.n_spins != params.n_spins:
        raise ValueError("operator set built for a different n_spins")
    dim = params.n_spins + 1
    drive = rwa_drive(params)
    h = np.zeros((2 * dim, 2 * dim), dtype=complex)
    h[:dim, :dim] = params.omega_nu * ops.j_x
    h[dim:, dim:] = (
        params.hyperfine * ops.j_z
        + params.omega_nu * ops.j_x
        - delta * np.eye(dim)
    )
    h[:dim, dim:] = drive.amplitude * np.eye(dim)
    h[dim:, :dim] = drive.amplitude * np.eye(dim)
    return h


def temperature_ratio_from_kelvin(
    kelvin: float, nuclear_freq_hz: float = NV_NUCLEAR_FREQ_HZ
) -> float:
    """Convert a lab temperature to the dimensionless k_B T / (hbar omega_nu)."""
    if kelvin <= 0:
        raise ValueError("temperature must be > 0 K")
    if nuclear_freq_hz <= 0:
        raise ValueError("nuclear frequency must be > 0 Hz")
    return BOLTZMANN_J_PER_K * kelvin / (PLANCK_J_S * nuclear_freq_hz)

"""Finite-time absorption spectra of the weakly driven central spin.

A drive of amplitude rabi / sqrt(2) probed for a finite window excites the
electronic transition with probability (rabi^2 / 2) F(offset / 2, t) |f|^2
per environment channel m -> n, where F(x, t) = sin(x t)^2 / x^2 is the
finite-time spectral window and f the channel overlap.  Rates are the
probabilities divided by the window duration; the spectrum is the rate
versus detuning from the electronic line.  No extra line broadening is
added — the window width is the only regularizer.

Conventions: the detuning axis and all frequencies are in the same units
as ``ModelParams.omega_nu``; rates carry an overall rabi^2 factor and can
be rescaled to multiples of rabi^2 / (2 omega_nu) via
``SpectrumGrid.rate_unit``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .franck_condon import fc_table
from .model import ModelParams, effective_environment, resonance_detuning

# Channels below this squared-overlap weight contribute nothing visible and
# are dropped; initial levels below the same occupancy floor are skipped.
WEIGHT_FLOOR = 1e-12
# A channel at least this strong peaking outside the grid is worth a warning.
_SUPPORT_WARN_WEIGHT = 1e-4
DEFAULT_GRID_POINTS = 4001


class GridSupportWarning(UserWarning):
    """A non-negligible channel resonance falls outside the detuning grid."""


def window(omega, duration: float):
    """Spectral weight F(omega, t) = sin(omega t)^2 / omega^2 of a finite
    probe window; F(0, t) = t^2 and the integral over omega is pi t."""
    if duration <= 0:
        raise ValueError("window duration must be positive")
    x = np.asarray(omega, dtype=float) * (duration / math.pi)
    out = duration**2 * np.sinc(x) ** 2
    return float(out) if out.ndim == 0 else out


def transition_probability(
    params: ModelParams, m: int, n: int, omega: float, duration: float | None = None
) -> float:
    """Excitation probability of channel m -> n after probing at frequency
    ``omega`` (absolute, same origin as the electronic gap) for ``duration``.

    Perturbative in the drive: meaningful only while the result is << 1.
    Defaults to the window duration implied by ``params.window_time``.
    """
    if duration is None:
        duration = params.window_time / params.omega_nu
    delta = omega - params.zfs
    offset = resonance_detuning(params, m, n) - delta
    overlap = fc_table(params).factor(m, n)
    return 0.5 * params.rabi**2 * overlap**2 * window(0.5 * offset, duration)


def rate(params: ModelParams, m: int, n: int, omega: float) -> float:
    """Finite-window excitation rate: probability over window duration."""
    duration = params.window_time / params.omega_nu
    return transition_probability(params, m, n, omega, duration) / duration


class Channel(NamedTuple):
    """One absorption line: initial level, final level, its strength and
    where it peaks on the detuning axis."""

    initial: int
    final: int
    fc_weight: float
    occupancy: float
    resonance: float


class BlockadeMetric(NamedTuple):
    """Suppression of one spectrum relative to another."""

    peak_ratio: float
    integrated_ratio: float


@dataclass(frozen=True)
class ThermalWeights:
    """Boltzmann occupancies of the bare-sector levels m = 0..N."""

    temperature: float
    weights: np.ndarray = field(repr=False)
    partition: float

    def __post_init__(self) -> None:
        total = float(np.sum(self.weights))
        if not math.isclose(total, 1.0, rel_tol=0, abs_tol=1e-12):
            raise ValueError("occupancies must be normalized")


def thermal_weights(params: ModelParams) -> ThermalWeights:
    """Occupancies p_m proportional to exp(-m / temperature); an infinite
    temperature ratio gives the uniform distribution."""
    levels = np.arange(params.n_spins + 1, dtype=float)
    if math.isinf(params.temperature):
        raw = np.ones_like(levels)
    else:
        raw = np.exp(-levels / params.temperature)
    partition = float(raw.sum())
    return ThermalWeights(params.temperature, raw / partition, partition)


@dataclass(frozen=True)
class SpectrumGrid:
    """Absorption intensity versus detuning, with its channel decomposition.

    ``intensity`` carries the same rabi^2 / 2 prefactor as the rates; divide
    by ``rate_unit`` to express it in multiples of rabi^2 / (2 omega_nu).
    Per-channel curves are recomputed on demand rather than stored.
    """

    detunings: np.ndarray = field(repr=False)
    intensity: np.ndarray = field(repr=False)
    channels: tuple[Channel, ...]
    window_time: float
    rabi: float
    omega_nu: float

    @property
    def duration(self) -> float:
        return self.window_time / self.omega_nu

    @property
    def rate_unit(self) -> float:
        """One unit of rabi^2 / (2 omega_nu) in the intensity's scale."""
        return 0.5 * self.rabi**2 / self.omega_nu

    def channel_rate(self, index: int) -> np.ndarray:
        """Bare rate curve of one channel (no occupancy factor)."""
        ch = self.channels[index]
        return _rate_curve(
            self.detunings, ch.resonance, ch.fc_weight, self.duration, self.rabi
        )

    def channel_contribution(self, index: int) -> np.ndarray:
        """Occupancy-weighted share of ``intensity`` from one channel."""
        return self.channels[index].occupancy * self.channel_rate(index)

    def peak(self) -> tuple[float, float]:
        """(detuning, intensity) of the global maximum."""
        i = int(np.argmax(self.intensity))
        return float(self.detunings[i]), float(self.intensity[i])

    def integrated(self) -> float:
        """Total intensity integrated over the detuning grid."""
        return float(np.trapezoid(self.intensity, self.detunings))


def default_grid(params: ModelParams, n_points: int = DEFAULT_GRID_POINTS):
    """Symmetric detuning grid wide enough for every visible channel.

    Half-width 1.2 (N/2)(omega_tilde - omega_nu) + 5 omega_nu covers the
    fan-out of the shifted ladder plus a few bare linewidths of margin.
    """
    if n_points < 2:
        raise ValueError("need at least two grid points")
    spread = effective_environment(params, 1).precession - params.omega_nu
    half_width = 1.2 * (params.n_spins / 2.0) * spread + 5.0 * params.omega_nu
    return np.linspace(-half_width, half_width, n_points)


def spectrum_zero_t(params: ModelParams, detunings=None) -> SpectrumGrid:
    """Absorption spectrum from the environment ground level m = 0."""
    return _spectrum(params, detunings, occupancies={0: 1.0})


def spectrum_thermal(params: ModelParams, detunings=None) -> SpectrumGrid:
    """Absorption spectrum from a thermal mixture of initial levels."""
    wts = thermal_weights(params)
    occupancies = {
        m: float(p) for m, p in enumerate(wts.weights) if p > WEIGHT_FLOOR
    }
    return _spectrum(params, detunings, occupancies)


def blockade_metric(spectrum_a: SpectrumGrid, spectrum_b: SpectrumGrid) -> BlockadeMetric:
    """How suppressed spectrum_a is relative to spectrum_b: ratios of peak
    heights and of grid-integrated intensities."""
    if spectrum_a.detunings.shape != spectrum_b.detunings.shape or not np.array_equal(
        spectrum_a.detunings, spectrum_b.detunings
    ):
        raise ValueError("spectra must share one detuning grid")
    peak = spectrum_a.intensity.max() / spectrum_b.intensity.max()
    integral = spectrum_a.integrated() / spectrum_b.integrated()
    return BlockadeMetric(float(peak), float(integral))


def local_maxima(
    detunings: np.ndarray, intensity: np.ndarray, floor_fraction: float = 1e-3
) -> list[tuple[float, float]]:
    """Interior local maxima of an intensity curve, low-amplitude wiggles
    below floor_fraction * max excluded; ascending in detuning."""
    y = np.asarray(intensity, dtype=float)
    x = np.asarray(detunings, dtype=float)
    if y.size < 3:
        return []
    floor = floor_fraction * y.max()
    inner = (y[1:-1] > y[:-2]) & (y[1:-1] >= y[2:]) & (y[1:-1] >= floor)
    idx = np.flatnonzero(inner) + 1
    return [(float(x[i]), float(y[i])) for i in idx]


def _rate_curve(
    detunings: np.ndarray,
    resonance: float,
    fc_weight: float,
    duration: float,
    rabi: float,
) -> np.ndarray:
    offsets = 0.5 * (resonance - detunings)
    return 0.5 * rabi**2 * fc_weight * window(offsets, duration) / duration


def _spectrum(
    params: ModelParams, detunings, occupancies: dict[int, float]
) -> SpectrumGrid:
    if detunings is None:
        detunings = default_grid(params)
    grid = np.asarray(detunings, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("detuning grid must be a non-empty 1-D array")
    if grid.size > 1 and not np.all(np.diff(grid) > 0):
        raise ValueError("detuning grid must be strictly increasing")

    table = fc_table(params)
    duration = params.window_time / params.omega_nu
    env0 = effective_environment(params, 0)
    env1 = effective_environment(params, 1)
    half = params.n_spins / 2.0

    intensity = np.zeros_like(grid)
    channels: list[Channel] = []
    for m, occupancy in sorted(occupancies.items()):
        column = table.column(m)
        weights = column**2
        for n in np.flatnonzero(weights >= WEIGHT_FLOOR):
            n = int(n)
            res = (n - half) * env1.precession - (m - half) * env0.precession
            ch = Channel(m, n, float(weights[n]), occupancy, res)
            channels.append(ch)
            if (
                occupancy * ch.fc_weight > _SUPPORT_WARN_WEIGHT
                and not grid[0] <= res <= grid[-1]
            ):
                warnings.warn(
                    f"channel {m}->{n} (weight {occupancy * ch.fc_weight:.2e}) "
                    f"peaks at detuning {res:.4g}, outside the grid",
                    GridSupportWarning,
                    stacklevel=3,
                )
            intensity += occupancy * _rate_curve(
                grid, res, ch.fc_weight, duration, params.rabi
            )
    return SpectrumGrid(
        detunings=grid,
        intensity=intensity,
        channels=tuple(channels),
        window_time=params.window_time,
        rabi=params.rabi,
        omega_nu=params.omega_nu,
    )

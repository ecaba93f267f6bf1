"""Spin Franck-Condon factors between electronic sectors.

An optical transition changes the electronic level suddenly, so the nuclear
state is projected from one sector eigenbasis onto the other.  The overlap
f(m -> n) = <tilted, n | bare, m> is a Wigner rotation element at the
mixing-angle difference theta = atan(A / omega_nu); its square is the
vibronic-style weight of absorption channel m -> n.

The bosonic limit treats the collective spin as a displaced oscillator
(Holstein-Primakoff): overlaps become displaced Fock-state matrix elements
with displacement sqrt(N) A / (2 omega_nu), and the ground-row weights tend
to a Poisson distribution of mean lam = N A^2 / (4 omega_nu^2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .collective_spin import wigner_d, wigner_d_column_zero
from .model import ModelParams, franck_condon_angle

# Boundary ties are detected against this relative slack; exact integer
# boundaries are a measure-zero configuration reached only by construction.
_TIE_REL_TOL = 1e-9


@dataclass(frozen=True)
class FcTable:
    """Overlap table; entry [n, m] is f(m -> n), column m an initial level."""

    n_spins: int
    hyperfine: float
    angle: float
    factors: np.ndarray = field(repr=False)

    def factor(self, m: int, n: int) -> float:
        return float(self.factors[n, m])

    def column(self, m: int) -> np.ndarray:
        return self.factors[:, m]


class FavoredLevel(NamedTuple):
    """Most favored final level; ``tied`` marks an exact two-way tie with
    level - 1."""

    level: int
    tied: bool


def fc_table(params: ModelParams) -> FcTable:
    """All sector overlaps for the given coupling; columns have unit norm."""
    angle = franck_condon_angle(params)
    matrix = wigner_d(params.n_spins, angle)
    return FcTable(params.n_spins, params.hyperfine, angle, matrix.elements)


def fc_ground_column(
    n_spins: int, hyperfine: float, omega_nu: float = 1.0
) -> np.ndarray:
    """Closed-form overlaps from the bare ground level, f(0 -> n).

    Equals sqrt(C(N, n)) cos(theta/2)^(N-n) (-sin(theta/2))^n; the squares
    are a binomial distribution in n with success probability
    sin^2(theta/2).  Works for N far beyond the full-table cap.
    """
    if hyperfine < 0 or omega_nu <= 0:
        raise ValueError("need hyperfine >= 0 and omega_nu > 0")
    angle = math.atan2(hyperfine, omega_nu)
    return wigner_d_column_zero(n_spins, angle)


@dataclass(frozen=True)
class HpFcParams:
    """Bosonic-limit description of the sector displacement."""

    n_spins: int
    hyperfine: float
    omega_nu: float = 1.0

    def __post_init__(self) -> None:
        if self.n_spins < 1:
            raise ValueError("n_spins must be >= 1")
        if self.hyperfine < 0 or self.omega_nu <= 0:
            raise ValueError("need hyperfine >= 0 and omega_nu > 0")

    @classmethod
    def from_model(cls, params: ModelParams) -> "HpFcParams":
        return cls(params.n_spins, params.hyperfine, params.omega_nu)

    @property
    def displacement(self) -> float:
        """Relative oscillator displacement between the two sectors."""
        return math.sqrt(self.n_spins) * self.hyperfine / (2.0 * self.omega_nu)

    @property
    def lam(self) -> float:
        """Mean of the limiting Poisson channel distribution."""
        return self.displacement**2

    @property
    def delta_x(self) -> float:
        """Displacement in oscillator position units, sqrt(2) |xi|."""
        return math.sqrt(2.0) * self.displacement


def hp_fc_factor(hp: HpFcParams, m: int, n: int) -> float:
    """Displaced Fock-state overlap <n| D(xi) |m> with real xi > 0.

    For n >= m this is exp(-lam/2) sqrt(m!/n!) xi^(n-m) L_m^(n-m)(lam);
    the n < m branch follows from D(xi)^dagger = D(-xi), which swaps the
    roles and contributes (-1)^(m-n), keeping every Laguerre upper index
    non-negative.  The overall sign tracks the displacement direction and
    so differs from the rotation-matrix sign pattern; magnitudes are the
    physically comparable quantity.
    """
    if m < 0 or n < 0:
        raise ValueError("levels must be non-negative")
    lam = hp.lam
    lo, hi = (m, n) if n >= m else (n, m)
    gap = hi - lo
    sign = 1.0 if n >= m or gap % 2 == 0 else -1.0
    if gap == 0:
        return sign * math.exp(-lam / 2.0) * _laguerre(lo, 0, lam)
    if hp.displacement == 0.0:
        return 0.0
    log_pref = (
        -lam / 2.0
        + 0.5 * (math.lgamma(lo + 1.0) - math.lgamma(hi + 1.0))
        + gap * math.log(hp.displacement)
    )
    lag = _laguerre(lo, gap, lam)
    if lag == 0.0:
        return 0.0
    return sign * math.copysign(math.exp(log_pref + math.log(abs(lag))), lag)


def hp_ground_probabilities(hp: HpFcParams, max_level: int) -> np.ndarray:
    """Poisson weights exp(-lam) lam^n / n! for channels 0 -> n."""
    n = np.arange(max_level + 1)
    lam = hp.lam
    if lam == 0.0:
        out = np.zeros(max_level + 1)
        out[0] = 1.0
        return out
    log_p = -lam + n * math.log(lam) - np.array(
        [math.lgamma(i + 1.0) for i in n]
    )
    return np.exp(log_p)


def favored_level_exact(params: ModelParams) -> FavoredLevel:
    """Mode of the ground-row weights |f(0 -> n)|^2.

    The weights are binomial, so the mode is floor((N + 1) p) with
    p = sin^2(theta / 2); at an exact integer boundary the probability is
    shared equally with the level below, which is flagged as a tie.
    """
    cos_theta = params.omega_nu / math.hypot(params.omega_nu, params.hyperfine)
    x = (params.n_spins + 1) * 0.5 * (1.0 - cos_theta)
    return _binomial_style_mode(x, params.n_spins)


def favored_level_hp(hp: HpFcParams) -> FavoredLevel:
    """Poisson mode floor(lam); integer lam >= 1 ties with lam - 1."""
    return _binomial_style_mode(hp.lam, None)


def _binomial_style_mode(x: float, cap: int | None) -> FavoredLevel:
    nearest = round(x)
    tied = nearest >= 1 and math.isclose(
        x, nearest, rel_tol=_TIE_REL_TOL, abs_tol=1e-12
    )
    level = int(nearest) if tied else int(math.floor(x))
    if cap is not None:
        level = min(level, cap)
    return FavoredLevel(level, tied)


def _laguerre(order: int, alpha: int, x: float) -> float:
    """Generalized Laguerre L_order^alpha(x) by upward recurrence in order."""
    if order == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + alpha - x
    for k in range(1, order):
        prev, cur = cur, ((2 * k + 1 + alpha - x) * cur - (k + alpha) * prev) / (
            k + 1.0
        )
    return cur

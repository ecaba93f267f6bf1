"""Self-validation battery: every structural property the package relies on,
packaged as named pass/fail checks for the command-line ``validate`` scenario.

Each check exercises one documented invariant at small-to-moderate sizes so
the whole battery stays interactive (a few seconds).  The pytest suite covers
the same ground in more depth; this module exists so a deployed copy can
certify itself without a test harness installed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import collective_spin as cs
from . import dynamics, franck_condon, model, spectroscopy


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def run_all() -> list[CheckResult]:
    """Run every registered check; never raises, failures are reported."""
    results = []
    for name, check in _CHECKS:
        try:
            passed, detail = check()
        except Exception as exc:  # noqa: BLE001 - must report, not crash
            passed, detail = False, f"raised {type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(passed), detail))
    return results


def _check_operator_algebra() -> tuple[bool, str]:
    _, ops = cs.build_basis(50)
    comm = ops.j_x @ ops.j_y - ops.j_y @ ops.j_x - 1j * ops.j_z
    comm2 = ops.j_y @ ops.j_z - ops.j_z @ ops.j_y - 1j * ops.j_x
    comm3 = ops.j_z @ ops.j_x - ops.j_x @ ops.j_z - 1j * ops.j_y
    worst = max(np.abs(c).max() for c in (comm, comm2, comm3))
    casimir = (
        ops.j_x @ ops.j_x + ops.j_y @ ops.j_y + ops.j_z @ ops.j_z
        - ops.casimir_eigenvalue * np.eye(51)
    )
    worst = max(worst, np.abs(casimir).max())
    return worst < 1e-12, f"worst residual {worst:.2e} (tol 1e-12)"


def _check_ladder_elements() -> tuple[bool, str]:
    n = 50
    _, ops = cs.build_basis(n)
    m = np.arange(n)
    up = ops.j_plus[m + 1, m].real
    expected = np.sqrt((n - m) * (m + 1))
    err = np.abs(up - expected).max()
    return err == 0.0, f"raising elements exact to {err:.2e}"


def _check_rotation_oracle_agreement() -> tuple[bool, str]:
    worst = 0.0
    for n in (4, 10):
        basis, _ = cs.build_basis(n)
        for angle in (0.3, 1.0, math.pi / 2):
            exact = cs.wigner_d(n, angle).elements
            oracle = cs.rotation_oracle(basis, angle)
            worst = max(worst, float(np.abs(exact - oracle).max()))
    return worst < 1e-8, f"max |table - matrix exponential| {worst:.2e} (tol 1e-8)"


def _check_rotation_orthogonality() -> tuple[bool, str]:
    worst = 0.0
    for angle in (0.19739555984988078, 1.1071487177940904):
        d = cs.wigner_d(100, angle).elements
        worst = max(worst, float(np.abs(d.T @ d - np.eye(101)).max()))
    return worst < 1e-10, f"max |d^T d - 1| {worst:.2e} at N=100 (tol 1e-10)"


def _check_rotation_composition() -> tuple[bool, str]:
    n = 30
    a, b = 0.35, 0.85
    combined = cs.wigner_d(n, a).elements @ cs.wigner_d(n, b).elements
    direct = cs.wigner_d(n, a + b).elements
    err = float(np.abs(combined - direct).max())
    transpose = float(
        np.abs(cs.wigner_d(n, -a).elements - cs.wigner_d(n, a).elements.T).max()
    )
    ok = err < 1e-9 and transpose < 1e-10
    return ok, f"composition {err:.2e} (tol 1e-9), reversal {transpose:.2e} (tol 1e-10)"


def _check_fc_columns() -> tuple[bool, str]:
    worst_norm = 0.0
    worst_closed = 0.0
    for coupling in (0.2, 2.0):
        params = model.ModelParams(n_spins=50, hyperfine=coupling)
        table = franck_condon.fc_table(params)
        norms = np.sum(table.factors**2, axis=0)
        worst_norm = max(worst_norm, float(np.abs(norms - 1.0).max()))
        closed = franck_condon.fc_ground_column(50, coupling)
        worst_closed = max(
            worst_closed, float(np.abs(table.column(0) - closed).max())
        )
    ok = worst_norm < 1e-10 and worst_closed < 1e-10
    return ok, (
        f"column norms off by {worst_norm:.2e}, closed-form gap "
        f"{worst_closed:.2e} (tol 1e-10)"
    )


def _check_favored_predictor() -> tuple[bool, str]:
    for n_spins in (10, 50, 100):
        for coupling in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0):
            params = model.ModelParams(n_spins=n_spins, hyperfine=coupling)
            predicted = franck_condon.favored_level_exact(params)
            column = np.abs(franck_condon.fc_table(params).column(0))
            brute = int(np.argmax(column))
            candidates = {predicted.level}
            if predicted.tied:
                candidates.add(predicted.level - 1)
            if brute not in candidates:
                return False, (
                    f"N={n_spins} A={coupling}: predicted {predicted} "
                    f"but argmax {brute}"
                )
    return True, "mode formula matches brute-force argmax on the full sweep"


def _check_window_shape() -> tuple[bool, str]:
    t = 10.0
    at_zero = spectroscopy.window(0.0, t)
    even = abs(
        spectroscopy.window(0.37, t) - spectroscopy.window(-0.37, t)
    )
    grid = np.linspace(-20.0, 20.0, 40001)
    integral = float(np.trapezoid(spectroscopy.window(grid, t), grid))
    ok = (
        at_zero == t * t
        and even == 0.0
        and abs(integral - math.pi * t) < 0.01 * math.pi * t
    )
    return ok, (
        f"F(0,t)={at_zero:.1f}, asymmetry {even:.1e}, "
        f"integral {integral:.4f} vs pi*t {math.pi * t:.4f}"
    )


def _check_peak_calibration() -> tuple[bool, str]:
    params = model.ModelParams(n_spins=10, hyperfine=0.5)
    duration = params.window_time / params.omega_nu
    worst = 0.0
    table = franck_condon.fc_table(params)
    for n in range(3):
        omega = model.transition_energy(params, 0, n)
        got = spectroscopy.rate(params, 0, n, omega)
        expected = 0.5 * params.rabi**2 * duration * table.factor(0, n) ** 2
        worst = max(worst, abs(got - expected))
    scale = 0.5 * params.rabi**2 * duration
    return worst < 1e-12 * scale, (
        f"resonant peak height off by {worst:.2e} (tol 1e-12 relative)"
    )


def _check_spectrum_peak_positions() -> tuple[bool, str]:
    params = model.ModelParams(n_spins=10, hyperfine=0.5)
    spectrum = spectroscopy.spectrum_zero_t(params)
    step = spectrum.detunings[1] - spectrum.detunings[0]
    worst = 0.0
    lo, hi = spectrum.detunings[0], spectrum.detunings[-1]
    for i, ch in enumerate(spectrum.channels):
        if ch.fc_weight < 1e-6 or not lo <= ch.resonance <= hi:
            continue
        curve = spectrum.channel_rate(i)
        top = spectrum.detunings[int(np.argmax(curve))]
        worst = max(worst, abs(top - ch.resonance))
    return worst <= step, f"worst peak offset {worst:.2e} vs grid step {step:.2e}"


def _check_thermal_weights() -> tuple[bool, str]:
    tau = model.temperature_ratio_from_kelvin(300.0)
    params = model.ModelParams(n_spins=50, temperature=tau)
    wts = spectroscopy.thermal_weights(params)
    total = float(wts.weights.sum())
    monotone = bool(np.all(np.diff(wts.weights) <= 0))
    steps = wts.weights[1:] / wts.weights[:-1]
    adjacent = float(np.abs(steps - 1.0).max())
    ok = abs(total - 1.0) < 1e-12 and monotone and adjacent < 1e-7
    return ok, (
        f"sum {total:.15f}, monotone {monotone}, "
        f"adjacent-level relative step {adjacent:.2e} (tol 1e-7)"
    )


def _check_thermal_zero_limit() -> tuple[bool, str]:
    cold = model.ModelParams(n_spins=12, hyperfine=0.5, temperature=1e-6)
    base = model.ModelParams(n_spins=12, hyperfine=0.5)
    grid = spectroscopy.default_grid(base, 801)
    thermal = spectroscopy.spectrum_thermal(cold, grid)
    zero = spectroscopy.spectrum_zero_t(base, grid)
    gap = float(np.abs(thermal.intensity - zero.intensity).max())
    scale = float(zero.intensity.max())
    return gap <= 1e-10 * scale, f"cold-limit gap {gap:.2e} (tol 1e-10 relative)"


def _check_sum_rule() -> tuple[bool, str]:
    base = model.ModelParams(n_spins=20, hyperfine=0.2)
    naked = base.with_updates(hyperfine=0.0)
    grid = np.linspace(-30.0, 30.0, 6001)
    a = spectroscopy.spectrum_zero_t(base, grid).integrated()
    b = spectroscopy.spectrum_zero_t(naked, grid).integrated()
    gap = abs(a - b) / b
    return gap < 0.02, f"integrated intensities differ by {100 * gap:.3f}% (tol 2%)"


def _check_precession_oracle() -> tuple[bool, str]:
    params = model.ModelParams(n_spins=10, hyperfine=0.2)
    times = np.linspace(0.0, 20.0, 2001)
    numeric = dynamics.precession_numerical(params, times)
    closed = dynamics.precession_closed_form(params, times)
    gap = max(
        float(np.abs(numeric.jx_rot - closed.jx_rot).max()),
        float(np.abs(numeric.jy_rot - closed.jy_rot).max()),
        float(np.abs(numeric.jz_rot - closed.jz_rot).max()),
    )
    drift = float(np.abs(numeric.jx_rot - numeric.jx_rot[0]).max())
    period = dynamics.measure_period(numeric)
    expected = 2.0 * math.pi / model.effective_environment(params, 1).precession
    period_err = abs(period - expected) / expected
    ok = gap < 1e-8 and drift < 1e-9 and period_err < 1e-6
    return ok, (
        f"closed-form gap {gap:.2e} (tol 1e-8), axis drift {drift:.2e} "
        f"(tol 1e-9), period error {period_err:.2e} (tol 1e-6)"
    )


def _check_drive_oracle() -> tuple[bool, str]:
    params = model.ModelParams(n_spins=4, hyperfine=0.5, rabi=0.05)
    omega = model.transition_energy(params, 0, 0)
    times = np.linspace(0.0, 2.0, 41)
    result = dynamics.drive_propagation(params, omega, times)
    norms = result.populations.sum(axis=(1, 2))
    norm_err = float(np.abs(norms - 1.0).max())
    exact = result.excited_population(0)[1:]
    predicted = np.array(
        [
            spectroscopy.transition_probability(params, 0, 0, omega, t)
            for t in times[1:]
        ]
    )
    rel = float(np.abs(exact - predicted).max() / predicted.max())
    ok = rel < 0.05 and norm_err < 1e-10
    return ok, (
        f"perturbative vs exact within {100 * rel:.2f}% (tol 5%), "
        f"norm error {norm_err:.2e} (tol 1e-10)"
    )


def _check_vertical_transition() -> tuple[bool, str]:
    worst = 0.0
    for coupling in (0.1, 0.2, 0.5, 1.0, 2.0, 5.0):
        params = model.ModelParams(n_spins=50, hyperfine=coupling)
        level = franck_condon.favored_level_exact(params).level
        cos_theta = math.cos(model.franck_condon_angle(params))
        gap = abs((level - 25.0) + 25.0 * cos_theta)
        worst = max(worst, gap)
    return worst <= 1.0, (
        f"favored level vs conserved axis projection off by {worst:.3f} "
        "levels (tol 1)"
    )


_CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("operator-algebra", _check_operator_algebra),
    ("ladder-elements", _check_ladder_elements),
    ("rotation-oracle-agreement", _check_rotation_oracle_agreement),
    ("rotation-orthogonality", _check_rotation_orthogonality),
    ("rotation-composition", _check_rotation_composition),
    ("fc-column-norms-and-closed-form", _check_fc_columns),
    ("favored-level-predictor", _check_favored_predictor),
    ("window-shape", _check_window_shape),
    ("resonant-peak-calibration", _check_peak_calibration),
    ("spectrum-peak-positions", _check_spectrum_peak_positions),
    ("thermal-weights", _check_thermal_weights),
    ("thermal-zero-temperature-limit", _check_thermal_zero_limit),
    ("spectral-sum-rule", _check_sum_rule),
    ("precession-oracle", _check_precession_oracle),
    ("drive-oracle", _check_drive_oracle),
    ("vertical-transition-consistency", _check_vertical_transition),
]

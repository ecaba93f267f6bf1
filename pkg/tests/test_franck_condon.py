"""Overlap tables between sector eigenbases and their bosonic limit."""

import math

import numpy as np
import pytest
import scipy.special

from spinfc.franck_condon import (
    FavoredLevel,
    HpFcParams,
    favored_level_exact,
    favored_level_hp,
    fc_ground_column,
    fc_table,
    hp_fc_factor,
    hp_ground_probabilities,
)
from spinfc.model import ModelParams

# Ground-channel overlap at fifty spins, weak coupling (cos(theta/2)^50,
# theta = atan(0.2)), frozen from an exact big-integer evaluation.
GROUND_OVERLAP_WEAK = 0.7835442766305217
# |f(0 -> 1) / f(0 -> 0)| = sqrt(50) tan(theta / 2) for the same coupling.
FIRST_LEVEL_RATIO_WEAK = 0.7001736953125168
# Poisson weights exp(-1/2) (1/2)^n / n! for n = 0..3.
POISSON_HALF = (
    0.6065306597126334,
    0.3032653298563167,
    0.07581633246407918,
    0.012636055410679864,
)


def _params(n_spins, hyperfine):
    return ModelParams(n_spins=n_spins, hyperfine=hyperfine)


class TestExactTable:
    def test_zero_coupling_table_is_identity(self):
        table = fc_table(_params(6, 0.0))
        assert table.angle == 0.0
        np.testing.assert_array_equal(table.factors, np.eye(7))

    def test_ground_overlap_matches_frozen_value(self):
        table = fc_table(_params(50, 0.2))
        assert table.factor(0, 0) == pytest.approx(GROUND_OVERLAP_WEAK, rel=1e-13)

    def test_first_level_ratio_matches_frozen_value(self):
        table = fc_table(_params(50, 0.2))
        ratio = abs(table.factor(0, 1) / table.factor(0, 0))
        assert ratio == pytest.approx(FIRST_LEVEL_RATIO_WEAK, rel=1e-12)

    @pytest.mark.parametrize("hyperfine", [0.2, 2.0])
    def test_columns_have_unit_norm(self, hyperfine):
        table = fc_table(_params(50, hyperfine))
        norms = np.sum(table.factors**2, axis=0)
        assert np.max(np.abs(norms - 1.0)) < 1e-10

    @pytest.mark.parametrize("hyperfine", [0.2, 2.0])
    def test_ground_column_matches_closed_form(self, hyperfine):
        table = fc_table(_params(50, hyperfine))
        closed = fc_ground_column(50, hyperfine)
        np.testing.assert_allclose(table.column(0), closed, rtol=0, atol=1e-12)

    @pytest.mark.parametrize("hyperfine", [0.2, 2.0])
    def test_ground_weights_follow_binomial_law(self, hyperfine):
        n_spins = 50
        column = fc_ground_column(n_spins, hyperfine)
        p = 0.5 * (1.0 - 1.0 / math.hypot(1.0, hyperfine))
        expected = np.array(
            [
                math.comb(n_spins, n) * p**n * (1.0 - p) ** (n_spins - n)
                for n in range(n_spins + 1)
            ]
        )
        np.testing.assert_allclose(column**2, expected, rtol=0, atol=1e-12)

    def test_magnitudes_are_symmetric_under_channel_reversal(self):
        table = fc_table(_params(6, 0.7))
        np.testing.assert_allclose(
            np.abs(table.factors), np.abs(table.factors.T), rtol=0, atol=1e-13
        )
        assert abs(table.factor(1, 3)) == pytest.approx(
            abs(table.factor(3, 1)), rel=1e-12
        )

    def test_factor_and_column_agree(self):
        table = fc_table(_params(5, 1.3))
        for m in range(6):
            np.testing.assert_array_equal(
                table.column(m), [table.factor(m, n) for n in range(6)]
            )

    def test_ground_column_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            fc_ground_column(5, -0.1)
        with pytest.raises(ValueError):
            fc_ground_column(5, 0.2, omega_nu=0.0)


class TestFavoredLevel:
    def test_weak_coupling_favors_ground_channel(self):
        favored = favored_level_exact(_params(50, 0.2))
        assert favored == FavoredLevel(0, False)
        column = fc_ground_column(50, 0.2)
        assert int(np.argmax(column**2)) == 0

    def test_strong_coupling_favored_level_matches_argmax(self):
        favored = favored_level_exact(_params(50, 2.0))
        assert favored == FavoredLevel(14, False)
        column = fc_ground_column(50, 2.0)
        assert int(np.argmax(column**2)) == 14

    @pytest.mark.parametrize("n_spins", [5, 20, 50])
    @pytest.mark.parametrize("hyperfine", [0.3, 1.0, 2.5])
    def test_predictor_agrees_with_weight_argmax(self, n_spins, hyperfine):
        favored = favored_level_exact(_params(n_spins, hyperfine))
        assert not favored.tied
        column = fc_ground_column(n_spins, hyperfine)
        assert favored.level == int(np.argmax(column**2))

    def test_exact_tie_at_integer_boundary(self):
        # cos(theta) = 1/2 puts (N + 1) sin^2(theta/2) exactly at 1 for N=3.
        favored = favored_level_exact(_params(3, math.sqrt(3.0)))
        assert favored == FavoredLevel(1, True)
        weights = fc_ground_column(3, math.sqrt(3.0)) ** 2
        assert weights[0] == pytest.approx(weights[1], rel=1e-12)
        assert weights[0] == pytest.approx(27.0 / 64.0, rel=1e-12)

    def test_poisson_tie_when_mean_is_integer(self):
        hp = HpFcParams(4, 1.0)
        assert hp.lam == pytest.approx(1.0, rel=1e-15)
        assert favored_level_hp(hp) == FavoredLevel(1, True)

    def test_poisson_mode_is_floor_of_mean(self):
        hp = HpFcParams(200, 0.1)  # lam = 0.5
        assert favored_level_hp(hp) == FavoredLevel(0, False)
        strong = HpFcParams(50, 2.1)  # lam = 55.125
        assert favored_level_hp(strong) == FavoredLevel(55, False)
        # An integer mean >= 1 shares probability with the level below.
        assert favored_level_hp(HpFcParams(50, 2.0)) == FavoredLevel(50, True)


class TestBosonicLimit:
    def test_parameter_map(self):
        hp = HpFcParams(200, 0.1)
        assert hp.displacement == pytest.approx(math.sqrt(0.5), rel=1e-15)
        assert hp.lam == pytest.approx(0.5, rel=1e-14)
        assert hp.delta_x == pytest.approx(1.0, rel=1e-14)

    def test_from_model_copies_fields(self):
        hp = HpFcParams.from_model(_params(50, 0.2))
        assert hp == HpFcParams(50, 0.2, 1.0)

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            HpFcParams(0, 0.2)
        with pytest.raises(ValueError):
            HpFcParams(5, -1.0)
        with pytest.raises(ValueError):
            HpFcParams(5, 0.2, omega_nu=0.0)
        with pytest.raises(ValueError):
            hp_fc_factor(HpFcParams(5, 0.2), -1, 0)

    def test_zero_displacement_is_kronecker(self):
        hp = HpFcParams(10, 0.0)
        for m in range(4):
            for n in range(4):
                assert hp_fc_factor(hp, m, n) == (1.0 if m == n else 0.0)
        np.testing.assert_array_equal(
            hp_ground_probabilities(hp, 3), [1.0, 0.0, 0.0, 0.0]
        )

    def test_ground_row_is_poisson(self):
        hp = HpFcParams(200, 0.1)  # lam = 0.5
        probs = hp_ground_probabilities(hp, 3)
        np.testing.assert_allclose(probs, POISSON_HALF, rtol=1e-12)
        for n in range(4):
            assert hp_fc_factor(hp, 0, n) ** 2 == pytest.approx(
                POISSON_HALF[n], rel=1e-12
            )

    def test_ground_overlap_frozen_value(self):
        hp = HpFcParams(200, 0.1)
        assert hp_fc_factor(hp, 0, 0) == pytest.approx(
            0.7788007830714049, rel=1e-14
        )

    def test_magnitude_symmetry_and_odd_gap_sign(self):
        hp = HpFcParams(200, 0.1)
        for m, n in [(0, 1), (0, 2), (1, 2), (1, 3), (2, 5)]:
            forward = hp_fc_factor(hp, m, n)
            backward = hp_fc_factor(hp, n, m)
            assert abs(forward) == pytest.approx(abs(backward), rel=1e-12)
            expected_sign = -1.0 if (n - m) % 2 else 1.0
            assert backward == pytest.approx(expected_sign * forward, rel=1e-12)

    def test_matches_displaced_fock_formula(self):
        hp = HpFcParams(80, 0.4)
        xi = hp.displacement
        for m in range(5):
            for n in range(m, 7):
                expected = (
                    math.exp(-hp.lam / 2.0)
                    * math.sqrt(math.factorial(m) / math.factorial(n))
                    * xi ** (n - m)
                    * float(scipy.special.eval_genlaguerre(m, n - m, hp.lam))
                )
                assert hp_fc_factor(hp, m, n) == pytest.approx(
                    expected, rel=1e-11, abs=1e-15
                )

    def test_converges_to_exact_magnitudes_for_low_channels(self):
        # Fixed displacement (lam = 1/2) while N grows; measured gaps at
        # N = 200 are all below 2.8e-3.
        n_spins, hyperfine = 200, 0.1
        table = fc_table(_params(n_spins, hyperfine))
        hp = HpFcParams(n_spins, hyperfine)
        for m, n in [(1, 0), (2, 0), (2, 1), (1, 3), (3, 1)]:
            gap = abs(abs(table.factor(m, n)) - abs(hp_fc_factor(hp, m, n)))
            assert gap < 5e-3

    def test_probabilities_sum_to_poisson_tail(self):
        hp = HpFcParams(200, 0.1)
        probs = hp_ground_probabilities(hp, 12)
        assert probs.sum() == pytest.approx(1.0, abs=1e-9)
        assert np.all(probs > 0)

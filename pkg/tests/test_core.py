"""Per-spin algebra against an independent matrix-exponential oracle."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from centralspin.core import (
    FlipPattern,
    ModelParams,
    SystemAmplitudes,
    branch_axis,
    branch_flip_profile,
    dispersed_couplings,
    log_branch_weight,
    spin_amplitude,
    spin_spectral,
)

SZ = np.array([[1.0, 0.0], [0.0, -1.0]])
SX = np.array([[0.0, 1.0], [1.0, 0.0]])


def expm_amplitude(a, b, tau, s, flipped):
    """Independent 2x2 oracle: matrix element of expm(-i tau (a sz + b sx))."""
    u = expm(-1j * tau * (a * SZ + b * SX))
    row = 0 if ((-s if flipped else s) == 1) else 1
    col = 0 if s == 1 else 1
    return complex(u[row, col])


finite_floats = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)


class TestModelParams:
    def test_dispersed_couplings_rule(self):
        h = dispersed_couplings(0.01, 0.02, 10)
        assert h == pytest.approx(tuple(0.01 + (j - 1) * 0.002 for j in range(1, 11)))

    def test_mu_nu_sum_to_one(self):
        for delta in (0.0, 0.3, -0.77, 1.0):
            p = ModelParams(delta=delta, h=(0.1,))
            assert p.mu + p.nu == pytest.approx(1.0, abs=1e-15)
            assert p.mu - p.nu == pytest.approx(delta, abs=1e-15)

    def test_rejects_empty_bath(self):
        with pytest.raises(ValueError):
            ModelParams(delta=0.0, h=())

    def test_rejects_negative_beta(self):
        with pytest.raises(ValueError):
            ModelParams(delta=0.0, h=(0.1,), beta=-1.0)

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            ModelParams(delta=float("nan"), h=(0.1,))
        with pytest.raises(ValueError):
            ModelParams(delta=0.0, h=(float("inf"),))

    def test_elapsed_rejects_past(self):
        p = ModelParams(delta=0.0, h=(0.1,), t0=2.0)
        with pytest.raises(ValueError):
            p.elapsed(1.0)


class TestSystemAmplitudes:
    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            SystemAmplitudes(1.0, 1.0)

    def test_from_up_weight(self):
        a = SystemAmplitudes.from_up_weight(0.4, 0.9)
        assert a.w_up == pytest.approx(0.4, abs=1e-15)
        assert a.w_down == pytest.approx(0.6, abs=1e-15)
        assert cmath.phase(a.a_down) == pytest.approx(0.9)

    def test_up_weight_range(self):
        with pytest.raises(ValueError):
            SystemAmplitudes.from_up_weight(1.5)


class TestSpinSpectral:
    def test_down_branch_at_zero_detuning(self):
        p = ModelParams(delta=0.0, h=(0.01,))
        s = spin_spectral(p, "down", 1)
        assert s.omega == pytest.approx(0.01, abs=1e-15)
        assert s.ratio == 0.0

    def test_up_branch_zero_coupling(self):
        for delta in (0.0, 0.5, -0.2):
            p = ModelParams(delta=delta, h=(0.0,))
            s = spin_spectral(p, "up", 1)
            assert s.omega == 1.0
            assert s.ratio == 1.0

    def test_symmetric_case(self):
        p = ModelParams(delta=0.1, h=(0.1,))
        s = spin_spectral(p, "down", 1)
        assert s.omega == pytest.approx(math.sqrt(0.02), rel=1e-14)
        assert s.ratio == pytest.approx(0.5, rel=1e-14)

    def test_ratio_times_omega_squared(self):
        p = ModelParams(delta=-0.35, h=(0.7, 0.0))
        for branch in ("up", "down"):
            a, _ = branch_axis(p, branch)
            for j in (1, 2):
                s = spin_spectral(p, branch, j)
                assert s.ratio * s.omega**2 == pytest.approx(a**2, abs=1e-14)

    def test_index_out_of_range(self):
        p = ModelParams(delta=0.0, h=(0.1,))
        with pytest.raises(IndexError):
            spin_spectral(p, "up", 2)
        with pytest.raises(IndexError):
            spin_spectral(p, "up", 0)

    def test_unknown_branch(self):
        p = ModelParams(delta=0.0, h=(0.1,))
        with pytest.raises(ValueError):
            spin_spectral(p, "sideways", 1)


class TestSpinAmplitude:
    def test_identity_at_initial_time(self):
        p = ModelParams(delta=0.2, h=(0.4,))
        assert spin_amplitude(p, "up", 1, 0.0, 1, flipped=False) == 1.0
        assert spin_amplitude(p, "up", 1, 0.0, 1, flipped=True) == 0.0

    def test_zero_coupling_pure_phase(self):
        p = ModelParams(delta=0.6, h=(0.0,))
        for t in (0.3, 2.0, 17.5):
            g = spin_amplitude(p, "up", 1, t, 1, flipped=False)
            assert g == pytest.approx(cmath.exp(-1j * t), abs=1e-14)

    def test_against_matrix_exponential_oracle(self):
        # 1000 random (delta, h, t) draws, both branches, both spins, to 1e-12.
        rng = np.random.default_rng(20260809)
        worst = 0.0
        for _ in range(1000):
            p = ModelParams(delta=float(rng.uniform(-1, 1)), h=(float(rng.uniform(-3, 3)),))
            t = float(rng.uniform(0, 80))
            branch = ("up", "down")[int(rng.integers(2))]
            s = int(rng.choice([1, -1]))
            flipped = bool(rng.integers(2))
            a, b_sign = branch_axis(p, branch)
            got = spin_amplitude(p, branch, 1, t, s, flipped)
            want = expm_amplitude(a, b_sign * p.h[0], t, s, flipped)
            worst = max(worst, abs(got - want))
        assert worst <= 1e-12

    def test_modulus_matches_flip_profile(self):
        rng = np.random.default_rng(5)
        worst = 0.0
        for _ in range(1000):
            p = ModelParams(delta=float(rng.uniform(-1, 1)), h=tuple(rng.uniform(-2, 2, 3)))
            t = float(rng.uniform(0, 50))
            branch = ("up", "down")[int(rng.integers(2))]
            prof = branch_flip_profile(p, branch, t)
            for j in (1, 2, 3):
                s = int(rng.choice([1, -1]))
                kept = abs(spin_amplitude(p, branch, j, t, s, flipped=False)) ** 2
                flip = abs(spin_amplitude(p, branch, j, t, s, flipped=True)) ** 2
                worst = max(worst, abs(kept - prof.keep[j - 1]), abs(flip - prof.flip[j - 1]))
        assert worst <= 1e-12

    def test_rejects_bad_spin(self):
        p = ModelParams(delta=0.0, h=(0.1,))
        with pytest.raises(ValueError):
            spin_amplitude(p, "up", 1, 1.0, 0, flipped=False)


@settings(max_examples=60, deadline=None)
@given(
    delta=finite_floats,
    h=st.lists(st.floats(-3, 3, allow_nan=False), min_size=1, max_size=6),
    t=st.floats(0, 200, allow_nan=False),
)
def test_per_spin_pair_sum_rule(delta, h, t):
    p = ModelParams(delta=delta, h=tuple(h))
    for branch in ("up", "down"):
        prof = branch_flip_profile(p, branch, t)
        assert np.max(np.abs(prof.keep + prof.flip - 1.0)) <= 1e-12


class TestLogBranchWeight:
    def test_no_flips_at_initial_time(self):
        p = ModelParams(delta=0.0, h=(0.3, 0.1))
        assert log_branch_weight(p, "up", 0.0, FlipPattern.none(2)) == 0.0

    def test_flip_at_initial_time_is_impossible(self):
        p = ModelParams(delta=0.0, h=(0.3, 0.1))
        assert log_branch_weight(p, "down", 0.0, FlipPattern([1, -1])) == -math.inf

    def test_matches_naive_product(self):
        # Two kept spins and one flipped: 2 log(keep) + log(flip).
        p = ModelParams(delta=0.0, h=(0.01, 0.01, 0.01))
        t = 100.0
        s = spin_spectral(p, "up", 1)
        keep = math.cos(s.omega * t) ** 2 + s.ratio * math.sin(s.omega * t) ** 2
        flip = (1 - s.ratio) * math.sin(s.omega * t) ** 2
        want = 2 * math.log(keep) + math.log(flip)
        got = log_branch_weight(p, "up", t, FlipPattern([1, 1, -1]))
        assert got == pytest.approx(want, rel=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(11)
        h = rng.uniform(-1, 1, 6)
        d = rng.choice([1, -1], 6)
        t = 23.7
        base = log_branch_weight(
            ModelParams(delta=0.25, h=tuple(h)), "down", t, FlipPattern(d)
        )
        for _ in range(10):
            perm = rng.permutation(6)
            shuffled = log_branch_weight(
                ModelParams(delta=0.25, h=tuple(h[perm])), "down", t, FlipPattern(d[perm])
            )
            assert shuffled == pytest.approx(base, abs=1e-12)

    def test_pattern_length_checked(self):
        p = ModelParams(delta=0.0, h=(0.3,))
        with pytest.raises(ValueError):
            log_branch_weight(p, "up", 1.0, FlipPattern([1, 1]))


class TestFlipPattern:
    def test_code_roundtrip(self):
        for code in (0, 1, 5, 12, 31):
            assert FlipPattern.from_code(code, 5).code() == code

    def test_rejects_bad_entries(self):
        with pytest.raises(ValueError):
            FlipPattern([1, 0, -1])

    def test_flip_count(self):
        assert FlipPattern([1, -1, -1, 1]).flip_count == 2

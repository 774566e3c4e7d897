"""Tests for the error-propagation sensitivity, ideal and lossy."""

import math

import numpy as np
import pytest

from su11.errors import DarkFringeError, StationaryPointError
from su11.fock import numeric_moments_multi
from su11.model import Params, kernels
from su11.sensitivity import (
    d_mean_dphi_fd,
    optimal_phase,
    sensitivity_ideal,
    sensitivity_lossy,
)

# Fock-oracle values, frozen (converged n_cut ladder, central step 1e-4):
# g=1, beta=1, phi=0.4, m=2, T1=0.8, T2=1
ORACLE_LOSSY_M2 = dict(delta_phi=0.179886822096, mean=2.43356047197, second=9.92854563051)
# g=1, beta=1, phi=0.4, m=1, ideal
ORACLE_IDEAL_M1 = dict(delta_phi=0.196332454362, mean=1.81715253091, second=6.39957999626)


class TestIdeal:
    def test_m0_normalization_is_exactly_one(self):
        r = sensitivity_ideal(Params(g=1.0, beta=1.0, phi=0.4, m=0))
        assert r.norm == 1.0

    def test_m0_mean_closed_form(self):
        p = Params(g=1.0, beta=0.7, phi=0.9, m=0)
        r = sensitivity_ideal(p)
        w1 = kernels(p).w1.val
        assert r.mean_n == pytest.approx(abs(w1) ** 2 * (1 + p.beta**2), rel=1e-12)

    def test_dark_fringe_raises(self):
        with pytest.raises(DarkFringeError):
            sensitivity_ideal(Params(g=1.0, beta=1.0, phi=0.0, m=1))

    def test_m0_zero_phase_is_stationary(self):
        with pytest.raises(StationaryPointError):
            sensitivity_ideal(Params(g=1.0, beta=1.0, phi=0.0, m=0))

    def test_monotone_improvement_in_m(self):
        deltas = [
            sensitivity_ideal(Params(g=1.0, beta=1.0, phi=0.4, m=m)).delta_phi
            for m in range(4)
        ]
        assert all(a > b for a, b in zip(deltas, deltas[1:]))

    def test_frozen_oracle_point_m1(self):
        r = sensitivity_ideal(Params(g=1.0, beta=1.0, phi=0.4, m=1))
        assert r.delta_phi == pytest.approx(ORACLE_IDEAL_M1["delta_phi"], rel=1e-6)
        assert r.mean_n == pytest.approx(ORACLE_IDEAL_M1["mean"], rel=1e-6)
        assert r.mean_n2 == pytest.approx(ORACLE_IDEAL_M1["second"], rel=1e-6)

    def test_monotone_improvement_in_beta_and_g(self):
        for m in range(4):
            db = [
                sensitivity_ideal(Params(g=1.0, beta=float(b), phi=0.4, m=m)).delta_phi
                for b in np.linspace(0.5, 2.0, 16)
            ]
            assert all(x > y for x, y in zip(db, db[1:])), f"beta ordering at m={m}"
            dg = [
                sensitivity_ideal(Params(g=float(g), beta=1.0, phi=0.4, m=m)).delta_phi
                for g in np.linspace(0.5, 2.0, 16)
            ]
            assert all(x > y for x, y in zip(dg, dg[1:])), f"g ordering at m={m}"

    def test_variance_nonnegative_on_sweep(self):
        for m in range(4):
            for phi in np.linspace(0.1, 3.0, 12):
                r = sensitivity_ideal(Params(g=1.0, beta=1.0, phi=float(phi), m=m))
                assert r.mean_n2 - r.mean_n**2 >= -1e-10 * r.mean_n2
                assert r.delta_phi > 0


class TestLossy:
    def test_reduces_to_ideal_bit_for_bit(self):
        for m in (0, 1, 3):
            p = Params(g=1.0, beta=1.0, phi=0.7, m=m, T1=1.0, T2=1.0)
            ri = sensitivity_ideal(p)
            rl = sensitivity_lossy(p)
            assert rl == ri

    def test_internal_loss_hurts_more_than_external(self):
        base = dict(g=1.0, beta=1.0, phi=0.4, m=1)
        internal = sensitivity_lossy(Params(T1=0.7, T2=1.0, **base)).delta_phi
        external = sensitivity_lossy(Params(T1=1.0, T2=0.7, **base)).delta_phi
        assert internal > external

    def test_frozen_oracle_point_m2_internal_loss(self):
        r = sensitivity_lossy(Params(g=1.0, beta=1.0, phi=0.4, m=2, T1=0.8))
        assert r.delta_phi == pytest.approx(ORACLE_LOSSY_M2["delta_phi"], rel=1e-6)
        assert r.mean_n == pytest.approx(ORACLE_LOSSY_M2["mean"], rel=1e-6)
        assert r.mean_n2 == pytest.approx(ORACLE_LOSSY_M2["second"], rel=1e-6)

    def test_oracle_equivalence_spot_checks(self):
        # the full grid runs in the acceptance suite; spot-check both loss
        # placements here
        for kw in (
            dict(g=0.5, beta=1.0, phi=0.4, m=1, T1=1.0, T2=0.8),
            dict(g=1.0, beta=0.5, phi=1.0, m=2, T1=0.8, T2=1.0),
        ):
            p = Params(**kw)
            got = sensitivity_lossy(p)
            want = numeric_moments_multi(p, [p.m])[p.m]
            assert got.delta_phi == pytest.approx(want["delta_phi"], rel=1e-6)
            assert got.mean_n == pytest.approx(want["mean"], rel=1e-6)
            assert got.mean_n2 == pytest.approx(want["second"], rel=1e-6)


class TestDualChannel:
    def test_matches_finite_difference(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            p = Params(
                g=float(rng.uniform(0.3, 1.4)),
                beta=float(rng.uniform(0.2, 1.4)),
                phi=float(rng.uniform(0.15, 2.8)),
                m=int(rng.integers(0, 4)),
                T1=float(rng.uniform(0.6, 1.0)),
                T2=float(rng.uniform(0.6, 1.0)),
            )
            r = sensitivity_lossy(p)
            fd = d_mean_dphi_fd(p, lossy=True)
            assert r.d_mean_dphi == pytest.approx(fd, rel=1e-6)


class TestOptimalPhase:
    def test_optimum_near_zero_for_m0(self):
        p = Params(g=1.0, beta=1.0, m=0)
        phi_star, delta_star = optimal_phase(p, (0.01, math.pi))
        assert phi_star < 0.01 + 0.1 * (math.pi - 0.01)
        assert delta_star > 0

    def test_mirror_symmetry(self):
        p = Params(g=1.0, beta=1.0, m=1)
        # delta(phi) = delta(-phi), verified directly, then through the optimizer
        for phi in (0.3, 0.9):
            dp = sensitivity_ideal(p.replace(phi=phi)).delta_phi
            dm = sensitivity_ideal(p.replace(phi=-phi)).delta_phi
            assert dp == pytest.approx(dm, rel=1e-12)
        right = optimal_phase(p, (0.01, 1.0))
        left = optimal_phase(p, (-1.0, -0.01))
        assert left[1] == pytest.approx(right[1], rel=1e-6)
        assert left[0] == pytest.approx(-right[0], rel=1e-3)

    def test_all_samples_dark_raises(self):
        # zero gain keeps mode a dark at every phase, so m >= 1 never succeeds
        p = Params(g=0.0, beta=1.0, m=1)
        with pytest.raises(DarkFringeError):
            optimal_phase(p, (0.1, 1.0), n_grid=5)

"""Two-slit ring candidates: construction, calibration, and the q-sweep."""

import math

import numpy as np
import pytest

from tubeflux import (
    EllipticParams,
    FamilyBalanceError,
    a0,
    boundary_reality,
    calibrate_candidate,
    conjecture_sweep,
    joukowski_family,
    joukowski_map,
    max_log_radius,
    slit_annulus_map,
    univalence_probe,
    wp,
)

# calibrated slit levels, frozen from a converged run; the huge values at
# large q are genuine (the slits run away from each other exponentially)
LAM_TABLE = {
    0.05: 0.4996531296379585,
    0.10: 0.8099709160638052,
    0.15: 1.1744408084522993,
    0.20: 1.6713721859530257,
    0.25: 2.419827038435295,
    0.30: 3.646699893298263,
    0.35: 5.834805070385512,
    0.40: 10.122693942142474,
    0.45: 19.535209126494788,
    0.50: 43.3913498993687,
    0.55: 116.44036455420601,
    0.60: 405.9010863002573,
    0.65: 2060.427854730073,
    0.70: 18435.539004354992,
    0.75: 410511.7281953496,
    0.80: 45461433.97218622,
    0.85: 126677289339.8023,
    0.90: 1.1709263532592463e18,
}


class TestRawMap:
    def test_slit_endpoints_are_reciprocal_mirrors(self):
        for q in (0.1, 0.3, 0.6):
            cand = slit_annulus_map(EllipticParams(q))
            assert cand.scale == 1.0
            assert cand.slit_neg < 0.0 < cand.slit_pos
            assert abs(cand.slit_neg * cand.slit_pos + 1.0) < 1e-13

    def test_endpoints_match_branch_value_gaps(self):
        p = EllipticParams(0.3)
        cand = slit_annulus_map(p)
        want = (p.e2 - p.e3) / (p.e1 - p.e2)
        assert abs(cand.slit_pos**2 - want) <= 1e-11 * want

    def test_quotient_equals_shifted_reciprocal_wp(self):
        # g0 * (wp(u) - e2) should be the constant pi^2 * theta2^2 * theta4^2
        for q in (0.1, 0.3):
            p = EllipticParams(q)
            cand = slit_annulus_map(p)
            t2, _, t4 = p.theta0
            beta = math.pi**2 * t2**2 * t4**2
            rng = np.random.default_rng(int(q * 100) + 2)
            R = p.ring_radius
            for _ in range(6):
                z = R ** rng.uniform(-0.8, 0.8) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                u = np.log(math.sqrt(q) * z) / (2j * math.pi)
                lhs = cand.g(z) * (wp(u, p) - p.e2)
                assert abs(lhs - beta) <= 1e-10 * beta, (q, z)

    def test_inversion_symmetry(self):
        # swapping the rims flips the map into its negative reciprocal
        for q in (0.1, 0.5, 0.9):
            cand = slit_annulus_map(EllipticParams(q))
            rng = np.random.default_rng(int(q * 10) + 5)
            R = cand.annulus.R
            for _ in range(5):
                z = R ** rng.uniform(-0.6, 0.6) * np.exp(1j * rng.uniform(0, 2 * np.pi))
                prod = cand.g(-1.0 / z) * cand.g(z)
                assert abs(prod + 1.0) < 1e-12, (q, z)

    def test_derivative_against_finite_differences(self):
        cand = slit_annulus_map(EllipticParams(0.3))
        dg = cand.g.derivative()
        h = 1e-6
        for z in (1.1 + 0.2j, 0.8j, -1.3 + 0.4j):
            fd = (cand.g(z + h) - cand.g(z - h)) / (2 * h)
            assert abs(dg(z) - fd) <= 1e-5 * (1 + abs(fd))

    @pytest.mark.parametrize("q", (0.1, 0.5, 0.9))
    def test_rim_images_are_real(self, q):
        cand = slit_annulus_map(EllipticParams(q))
        reality = boundary_reality(cand)
        assert reality["rel"] < 1e-12
        if q == 0.1:
            assert reality["abs"] < 1e-9

    def test_rim_images_land_on_the_slits(self):
        cand = slit_annulus_map(EllipticParams(0.2))
        R = cand.annulus.R
        ts = np.linspace(0.0, 2 * math.pi, 64, endpoint=False) + 1e-3
        outer = cand.g(R * 0.9999999 * np.exp(1j * ts)).real
        inner = cand.g(np.exp(1j * ts) / (R * 0.9999999)).real
        assert np.max(outer) <= cand.slit_pos * (1 + 1e-5)
        assert np.min(outer) >= -1e-4 * cand.slit_pos
        assert np.max(inner) <= cand.slit_neg * (1 - 1e-5)


class TestCalibration:
    def test_scale_is_already_balanced(self, candidate):
        cand = candidate(0.3)
        assert abs(cand.scale - 1.0) < 1e-10
        assert cand.residual < 1e-12
        assert cand.lam > 0.0

    def test_balance_conditions_hold(self, candidate):
        for q in (0.1, 0.3, 0.5):
            cand = candidate(q)
            m = a0(cand.g)
            minv = a0(1.0 / cand.g)
            assert abs(m - cand.lam) <= 1e-9 * (1.0 + cand.lam)
            assert abs(minv + cand.lam) <= 1e-9 * (1.0 + cand.lam)

    def test_frozen_level_table(self, candidate):
        for q, lam in LAM_TABLE.items():
            got = candidate(q).lam
            rtol = 1e-9 if q <= 0.65 else 1e-6
            assert got == pytest.approx(lam, rel=rtol), q

    def test_level_grows_with_nome(self, candidate):
        qs = sorted(LAM_TABLE)
        levels = [candidate(q).lam for q in qs]
        assert all(a < b for a, b in zip(levels, levels[1:]))

    def test_calibrated_map_is_injective(self, candidate):
        report = univalence_probe(candidate(0.3).g)
        assert report.univalent == "passed"
        assert report.omits_zero == "passed"


class TestSweep:
    def test_ratio_stays_below_one(self):
        result = conjecture_sweep([0.1, 0.2, 0.3])
        assert result.failures == ()
        assert [row.q for row in result.rows] == [0.1, 0.2, 0.3]
        for row in result.rows:
            assert row.ratio < 1.0
            assert row.R == pytest.approx(row.q**-0.5, rel=1e-14)
            assert row.lnR == pytest.approx(math.log(row.R), rel=1e-13)
            assert row.lnR0 == pytest.approx(max_log_radius(row.lam), rel=1e-13)
            assert row.ratio == pytest.approx(row.lnR / row.lnR0, rel=1e-13)

    def test_sweep_is_deterministic(self):
        a = conjecture_sweep([0.15, 0.45])
        b = conjecture_sweep([0.15, 0.45])
        assert a.as_table() == b.as_table()

    def test_grid_validation(self):
        with pytest.raises(ValueError, match="empty"):
            conjecture_sweep([])
        with pytest.raises(ValueError, match="outside the supported range"):
            conjecture_sweep([0.01])
        with pytest.raises(ValueError, match="outside the supported range"):
            conjecture_sweep([0.96])


class TestJoukowskiFamily:
    def test_map_mean_is_the_offset(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            lam = rng.uniform(0.2, 3.0)
            a = rng.uniform(-2.0, 2.0)
            kappa = rng.uniform(-0.24, 0.24)
            g = joukowski_map(lam, a, kappa, 2.0)
            assert abs(a0(g) - lam) < 1e-12 * (1.0 + lam)

    def test_family_cannot_balance(self):
        with pytest.raises(FamilyBalanceError, match=r"no \(a, kappa\)") as err:
            joukowski_family(1.0, 5.0)
        diag = err.value.diagnostics
        assert diag is not None
        assert diag["residual_floor"] == pytest.approx(1.0, abs=1e-9)
        assert diag["theoretical_floor"] == pytest.approx(1.0)
        assert diag["n_scanned"] > 1000

    def test_floor_tracks_the_offset(self):
        with pytest.raises(FamilyBalanceError) as err:
            joukowski_family(0.5, 3.0)
        assert err.value.diagnostics["residual_floor"] == pytest.approx(0.5, abs=1e-9)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracvalid.errors import InputError, ProfileTooShortError
from fracvalid.hrr import (
    KIND_HRR,
    KIND_K,
    DetectionParams,
    detect_regimes,
    hrr_valid,
    strain_energy_density,
    theoretical_slopes,
)
from fracvalid.materials import Material
from fracvalid.profiles import RadialProfile, synthesize_profile

HRR_01 = -1.0 / 11.0  # stress slope for N = 0.1


class TestTheoreticalSlopes:
    def test_perfectly_plastic_limit(self):
        s = theoretical_slopes(0.0)
        assert s.stress_slope == 0.0
        assert s.strain_slope == 1.0

    def test_n_01(self):
        assert theoretical_slopes(0.1).stress_slope == pytest.approx(1.0 / 11.0)

    @given(n=st.floats(0.0, 0.99))
    def test_slopes_sum_to_one(self, n):
        s = theoretical_slopes(n)
        assert s.stress_slope + s.strain_slope == pytest.approx(1.0, rel=1e-12)

    def test_out_of_range(self):
        with pytest.raises(InputError):
            theoretical_slopes(1.0)


class TestEnergyDensity:
    MAT = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=0.1)

    def test_at_yield(self):
        m = self.MAT
        assert strain_energy_density(m, m.sigma_Y) == pytest.approx(
            m.sigma_Y * m.eps_Y / 1.1, rel=1e-12
        )

    def test_doubling_stress(self):
        # exponent 1 + 1/N = 11 at N = 0.1
        m = self.MAT
        ratio = strain_energy_density(m, 2 * m.sigma_Y) / strain_energy_density(
            m, m.sigma_Y
        )
        assert ratio == pytest.approx(2.0**11, rel=1e-12)

    def test_monotone(self):
        m = self.MAT
        vals = [strain_energy_density(m, s) for s in (900.0, 1000.0, 1300.0)]
        assert vals == sorted(vals)

    def test_perfect_plasticity_unsupported(self):
        m = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=0.0)
        with pytest.raises(InputError):
            strain_energy_density(m, 900.0)


class TestDetectRegimes:
    def test_pure_hrr(self):
        prof = synthesize_profile([(HRR_01, 3.0)], r_start=1e-2)
        segs = detect_regimes(prof, 0.1)
        assert len(segs) == 1
        assert segs[0].kind == KIND_HRR
        assert segs[0].log_length == pytest.approx(3.0, abs=0.1)
        assert segs[0].fitted_slope == pytest.approx(HRR_01, abs=1e-6)

    def test_pure_elastic(self):
        prof = synthesize_profile([(-0.5, 3.0)], r_start=1e-2)
        segs = detect_regimes(prof, 0.1)
        assert len(segs) == 1
        assert segs[0].kind == KIND_K
        assert segs[0].log_length == pytest.approx(3.0, abs=0.1)

    def test_piecewise_breakpoints_recovered(self):
        # inner plateau, middle HRR decay, outer K-field
        params = DetectionParams()
        prof = synthesize_profile(
            [(0.0, 1.0), (HRR_01, 1.2), (-0.5, 1.0)], r_start=1e-3
        )
        segs = detect_regimes(prof, 0.1, params)
        kinds = [s.kind for s in segs]
        assert kinds == [KIND_HRR, KIND_K]
        hrr = segs[0]
        # planted HRR stretch spans [1e-2, 10**-0.8]
        tol = params.window_decades
        assert np.log10(hrr.r_lo) == pytest.approx(-2.0, abs=tol)
        assert np.log10(hrr.r_hi) == pytest.approx(-0.8, abs=tol)

    def test_near_tip_exclusion(self):
        prof = synthesize_profile([(HRR_01, 3.0)], r_start=1e-4)
        params = DetectionParams(r_min_frac=1e-3)
        segs = detect_regimes(prof, 0.1, params)
        assert segs[0].r_lo >= 1e-3

    def test_wrong_hardening_finds_nothing(self):
        # slope bands for N=0.1 and N=0.3 are disjoint at default tolerance
        prof = synthesize_profile([(HRR_01, 3.0)], r_start=1e-2)
        segs = detect_regimes(prof, 0.3)
        assert all(s.kind != KIND_HRR for s in segs)
        assert all(s.kind != KIND_K for s in segs)

    def test_too_short_raises(self):
        r = np.logspace(-3, -0.9, 21)
        prof = RadialProfile(r, np.ones(21) * 2.0, a_ref=0.01, j_at_load=0.0)
        with pytest.raises(ProfileTooShortError):
            detect_regimes(prof, 0.1, DetectionParams(r_min_frac=0.1))

    @settings(max_examples=25, deadline=None)
    @given(alpha=st.floats(min_value=1e-3, max_value=1e3))
    def test_vertical_scale_invariance(self, alpha):
        prof = synthesize_profile([(0.0, 0.8), (HRR_01, 1.5), (-0.5, 0.7)])
        scaled = RadialProfile(
            prof.r_over_a, prof.stress_ratio * alpha, prof.a_ref, prof.j_at_load
        )
        a = detect_regimes(prof, 0.1)
        b = detect_regimes(scaled, 0.1)
        assert [(s.kind, s.r_lo, s.r_hi) for s in a] == [
            (s.kind, s.r_lo, s.r_hi) for s in b
        ]

    @settings(max_examples=25, deadline=None)
    @given(factor=st.floats(min_value=0.2, max_value=5.0))
    def test_renormalization_preserves_log_length(self, factor):
        prof = synthesize_profile([(HRR_01, 2.5)], r_start=1e-1)
        renorm = prof.rescaled(prof.a_ref * factor)
        a = detect_regimes(prof, 0.1)
        b = detect_regimes(renorm, 0.1)
        assert len(a) == len(b) == 1
        assert b[0].log_length == pytest.approx(a[0].log_length, rel=1e-9)
        assert b[0].r_lo == pytest.approx(a[0].r_lo / factor, rel=1e-9)


class TestHrrValid:
    def test_pure_profiles(self):
        hrr = synthesize_profile([(HRR_01, 3.0)], r_start=1e-2)
        ela = synthesize_profile([(-0.5, 3.0)], r_start=1e-2)
        v1 = hrr_valid(hrr, 0.1)
        v2 = hrr_valid(ela, 0.1)
        assert v1.valid and v1.hrr_log_length == pytest.approx(3.0, abs=0.1)
        assert not v2.valid and v2.hrr_log_length == 0.0

    def test_subthreshold_planted_segment_invalid(self):
        # 0.04 planted decades < 0.05 threshold; the window (0.15 decades)
        # cannot sit inside it, so no HRR sample qualifies at all
        prof = synthesize_profile(
            [(0.0, 1.0), (HRR_01, 0.04), (-0.5, 1.2)], r_start=1e-3,
            samples_per_decade=120,
        )
        assert not hrr_valid(prof, 0.1).valid

    @pytest.mark.parametrize("planted", [0.3, 0.6, 1.0, 1.8])
    def test_monotone_in_planted_length(self, planted):
        prof = synthesize_profile(
            [(0.0, 0.9), (HRR_01, planted), (-0.5, 0.9)], r_start=1e-3
        )
        verdict = hrr_valid(prof, 0.1)
        assert verdict.valid
        assert verdict.hrr_log_length == pytest.approx(planted, abs=0.2)

    def test_threshold_parameter(self):
        prof = synthesize_profile(
            [(0.0, 0.8), (HRR_01, 0.5), (-0.5, 0.8)], r_start=1e-3
        )
        strict = DetectionParams(min_hrr_decades=0.9)
        assert hrr_valid(prof, 0.1).valid
        assert not hrr_valid(prof, 0.1, strict).valid

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracvalid.errors import InputError
from fracvalid.materials import (
    CtodCoefficient,
    Material,
    ctod_from_j,
    estimate_dn,
    flow_stress,
    hardening_modulus,
    j_from_k,
    k_from_j,
    k_j_convert,
    load_material,
)

MAT_REF = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=0.1)


def materials_strategy():
    return st.builds(
        Material,
        E=st.floats(min_value=1e3, max_value=1e6),
        nu=st.floats(min_value=0.05, max_value=0.45),
        sigma_Y=st.floats(min_value=10.0, max_value=5e3),
        N=st.floats(min_value=0.0, max_value=0.95),
    )


class TestMaterial:
    def test_eps_y_derived(self):
        assert MAT_REF.eps_Y == 900.0 / 210000.0

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(E=-1.0, nu=0.3, sigma_Y=900.0, N=0.1),
            dict(E=210e3, nu=0.0, sigma_Y=900.0, N=0.1),
            dict(E=210e3, nu=0.5, sigma_Y=900.0, N=0.1),
            dict(E=210e3, nu=0.3, sigma_Y=0.0, N=0.1),
            dict(E=210e3, nu=0.3, sigma_Y=900.0, N=1.0),
            dict(E=210e3, nu=0.3, sigma_Y=900.0, N=-0.1),
        ],
    )
    def test_invalid_parameters_rejected(self, kwargs):
        with pytest.raises(InputError):
            Material(**kwargs)


class TestFlowStress:
    def test_zero_plastic_strain(self):
        assert flow_stress(MAT_REF, 0.0) == 900.0

    def test_perfectly_plastic_constant(self):
        mat = Material(E=210000.0, nu=0.3, sigma_Y=513.0, N=0.0)
        for eps in (0.0, 1e-4, 0.02, 1.3):
            assert flow_stress(mat, eps) == 513.0

    def test_at_yield_strain(self):
        # eps_p equal to the yield strain doubles the bracket: 900 * 2**0.1
        expected = 900.0 * 2.0**0.1
        assert flow_stress(MAT_REF, 900.0 / 210000.0) == pytest.approx(
            expected, rel=1e-14
        )
        assert expected == pytest.approx(964.6, abs=0.05)

    def test_negative_strain_rejected(self):
        with pytest.raises(InputError):
            flow_stress(MAT_REF, -1e-9)

    @given(mat=materials_strategy(), e1=st.floats(0.0, 2.0), e2=st.floats(0.0, 2.0))
    def test_monotone_nondecreasing(self, mat, e1, e2):
        lo, hi = sorted((e1, e2))
        assert flow_stress(mat, lo) <= flow_stress(mat, hi) * (1 + 1e-12)

    def test_hardening_modulus_is_derivative(self):
        eps = 0.013
        h = 1e-7
        fd = (flow_stress(MAT_REF, eps + h) - flow_stress(MAT_REF, eps - h)) / (2 * h)
        assert hardening_modulus(MAT_REF, eps) == pytest.approx(fd, rel=1e-6)


class TestCtod:
    def test_zero(self):
        assert ctod_from_j(0.0, MAT_REF, CtodCoefficient(0.6)) == 0.0

    def test_reference_value(self):
        # 0.6 * 0.52 / 900 MPa -> mm via the MPa*mm == kJ/m^2 identity
        delta = ctod_from_j(0.52, MAT_REF, CtodCoefficient(0.6))
        assert delta == pytest.approx(3.4667e-4, rel=1e-3)

    def test_perfectly_plastic_unit_dn(self):
        mat = Material(E=210000.0, nu=0.3, sigma_Y=1000.0, N=0.0)
        assert ctod_from_j(1.0, mat, CtodCoefficient(1.0)) == pytest.approx(1.0e-3)

    @given(
        j=st.floats(min_value=1e-6, max_value=1e3),
        alpha=st.floats(min_value=1e-3, max_value=1e3),
    )
    def test_linear_in_j(self, j, alpha):
        d = CtodCoefficient(0.5)
        assert ctod_from_j(alpha * j, MAT_REF, d) == pytest.approx(
            alpha * ctod_from_j(j, MAT_REF, d), rel=1e-12
        )

    def test_dn_bounds(self):
        with pytest.raises(InputError):
            CtodCoefficient(0.0)
        with pytest.raises(InputError):
            CtodCoefficient(1.2)


class TestEstimateDn:
    @pytest.mark.parametrize("N,expected", [(0.0, 1.0), (0.05, 0.7), (0.33, 0.2)])
    def test_anchor_points(self, N, expected):
        mat = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=N)
        assert estimate_dn(mat).d_n == pytest.approx(expected)

    def test_clamped_beyond_anchors(self):
        mat = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=0.6)
        assert estimate_dn(mat).d_n == pytest.approx(0.2)

    @given(n1=st.floats(0.0, 0.95), n2=st.floats(0.0, 0.95))
    def test_nonincreasing_in_n(self, n1, n2):
        lo, hi = sorted((n1, n2))
        m_lo = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=lo)
        m_hi = Material(E=210000.0, nu=0.3, sigma_Y=900.0, N=hi)
        assert estimate_dn(m_lo).d_n >= estimate_dn(m_hi).d_n - 1e-12


class TestKJConversion:
    def test_zero(self):
        assert j_from_k(0.0, MAT_REF, "plane-stress") == 0.0

    def test_plane_stress_value(self):
        # K = 50 MPa*sqrt(m), E = 210 GPa: J = 2500/210000 MPa*m = 11.90 kJ/m^2
        assert j_from_k(50.0, MAT_REF, "plane-stress") == pytest.approx(
            2500.0 / 210000.0 * 1000.0, rel=1e-12
        )

    def test_round_trip(self):
        for mode in ("plane-stress", "plane-strain"):
            j = 7.31
            assert j_from_k(k_from_j(j, MAT_REF, mode), MAT_REF, mode) == pytest.approx(
                j, rel=1e-12
            )

    @given(k=st.floats(min_value=1e-3, max_value=500.0))
    def test_plane_strain_below_plane_stress(self, k):
        jps = j_from_k(k, MAT_REF, "plane-stress")
        jpe = j_from_k(k, MAT_REF, "plane-strain")
        assert jpe == pytest.approx((1 - 0.3**2) * jps, rel=1e-12)
        assert jpe < jps

    def test_dispatch(self):
        assert k_j_convert(50.0, MAT_REF, "plane-stress", target="J") == j_from_k(
            50.0, MAT_REF, "plane-stress"
        )
        with pytest.raises(InputError):
            k_j_convert(1.0, MAT_REF, "plane-stress", target="G")


class TestMaterialFile:
    def test_load(self, tmp_path):
        cfg = tmp_path / "mat.cfg"
        cfg.write_text(
            "# reference steel\nE = 210000\nnu = 0.3\nsigma_Y = 900\nN = 0.1\nd_n = 0.6\n"
        )
        mat, dn = load_material(cfg)
        assert mat == MAT_REF
        assert dn == CtodCoefficient(0.6)

    def test_optional_dn_absent(self, tmp_path):
        cfg = tmp_path / "mat.cfg"
        cfg.write_text("E=210000\nnu=0.3\nsigma_Y=900\nN=0.1\n")
        _, dn = load_material(cfg)
        assert dn is None

    def test_missing_field_named(self, tmp_path):
        cfg = tmp_path / "mat.cfg"
        cfg.write_text("E=210000\nnu=0.3\nN=0.1\n")
        with pytest.raises(InputError, match="sigma_Y"):
            load_material(cfg)

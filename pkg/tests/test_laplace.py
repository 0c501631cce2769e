import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy import special

from totpos.errors import DomainError
from totpos.kernels import Power, cosine_w, m_kernel, omega, omega_qr
from totpos.laplace import (
    closed_form_transform,
    mkernel_power_analysis,
    omega_qr_integer_power_transform,
    quadrature_transform,
    real_polynomial,
    riemann_polynomial,
    riemann_sum_function,
    root_sector_check,
    strip_zero_check,
    transform_function,
    w_power_transform,
)


def m_squared_transform(s):
    # M^2 = 4 e^{-2|t|} - 4 e^{-3|t|} + e^{-4|t|}; each term gives 2k / (k^2 - s^2)
    return sum(c * 2 * k / (k * k - s * s) for c, k in ((4, 2), (-4, 3), (1, 4)))


class TestClosedForm:
    def test_omega_at_zero_is_exact(self):
        v = closed_form_transform(omega(), 0).value
        assert v == 1 and isinstance(v, Fraction)

    def test_m_kernel_at_zero_is_exact(self):
        assert closed_form_transform(m_kernel(), 0).value == 3

    @pytest.mark.parametrize("alpha", [0.5, 1, 2, 3.5])
    def test_cosine_power_roots(self, alpha):
        for s in ((alpha + 2) * 1j, -(alpha + 2) * 1j):
            assert abs(complex(closed_form_transform(cosine_w(), s, alpha).value)) < 1e-14

    def test_cosine_against_elementary_formula(self):
        # integral of cos(t) e^{-st} over (-pi/2, pi/2)
        s = 0.7
        exact = 2 * math.cosh(math.pi * s / 2) / (1 + s * s)
        assert complex(closed_form_transform(cosine_w(), s).value) == pytest.approx(exact, rel=1e-13)

    def test_complex_gamma_matches_mpmath(self):
        rng = np.random.default_rng(42)
        z = rng.uniform(-6, 6, 40) + 1j * rng.uniform(-6, 6, 40)
        ours = special.gamma(z)
        ref = np.array([complex(mpmath.gamma(complex(v))) for v in z])
        np.testing.assert_allclose(ours, ref, rtol=1e-13)

    def test_outside_region(self):
        with pytest.raises(DomainError):
            closed_form_transform(omega(), -2)


class TestQuadrature:
    def test_cosine_at_zero(self):
        r = quadrature_transform(cosine_w(), 0)
        assert abs(r.value - 2) <= 1e-10
        assert r.error_bound < 1e-8

    def test_support_length(self):
        assert abs(quadrature_transform(cosine_w(), 0, [Power(0)]).value - math.pi) <= 1e-10

    def test_omega_at_one(self):
        assert abs(quadrature_transform(omega(), 1).value - 0.25) <= 1e-8

    def test_agrees_with_closed_forms(self):
        rng = np.random.default_rng(42)
        cases = [(omega(), 1), (omega_qr(1, 2), 1), (omega_qr(1, 2), 2), (m_kernel(), 1),
                 (cosine_w(), 0), (cosine_w(), 1), (cosine_w(), 2), (cosine_w(), 3.5)]
        for spec, alpha in cases:
            for _ in range(4):
                r, phi = rng.uniform(0, 0.9), rng.uniform(0, 2 * math.pi)
                s = complex(r * math.cos(phi), 4 * r * math.sin(phi))
                cf = closed_form_transform(spec, s, alpha)
                qd = quadrature_transform(spec, s, [Power(alpha)] if alpha != 1 else [])
                assert abs(complex(cf.value) - qd.value) <= cf.error_bound + qd.error_bound, (spec.variant, alpha, s)


class TestRiemann:
    def test_m_one(self):
        np.testing.assert_allclose(riemann_polynomial(cosine_w(), math.pi, 1).coef,
                                   [math.pi / 2 * math.cos(math.pi / 4)] * 2, rtol=1e-15)

    def test_m_two(self):
        c = math.cos(math.pi / 3)
        np.testing.assert_allclose(riemann_polynomial(cosine_w(), math.pi, 2).coef,
                                   [math.pi / 3 * c, math.pi / 3, math.pi / 3 * c], rtol=1e-15)

    def test_m_zero_is_constant(self):
        p = riemann_polynomial(cosine_w(), math.pi, 0)
        assert p.degree() == 0
        assert len(p.roots()) == 0

    def test_convergence(self):
        s = np.array([0.0, 1.5, -2.0, 2j, 1 + 1j, -0.5 - 2.5j])
        ref = np.array([quadrature_transform(cosine_w(), z).value for z in s])
        errs = [np.max(np.abs(riemann_sum_function(cosine_w(), math.pi, m)(s) - ref)) for m in (5, 10, 20, 40)]
        assert all(a > b for a, b in zip(errs, errs[1:]))
        assert all(m * e <= 5 * errs[0] for m, e in zip((5, 10, 20, 40), errs))


class TestSector:
    def test_riemann_polynomial(self):
        r = root_sector_check(riemann_polynomial(cosine_w(), math.pi, 20), 3 * math.pi / 22)
        assert r.zero_free

    @pytest.mark.parametrize("m", [5, 10, 20, 40])
    def test_sector_shrinks_no_faster(self, m):
        r = root_sector_check(riemann_polynomial(cosine_w(), math.pi, m), 3 * math.pi / (m + 2))
        assert r.min_abs_arg >= 3 * math.pi / (m + 2)

    def test_root_on_negative_axis(self):
        assert root_sector_check(real_polynomial([1, 1]), math.pi / 2).zero_free

    def test_root_on_positive_axis(self):
        r = root_sector_check(real_polynomial([-1, 1]), 0.1)
        assert not r.zero_free
        assert r.violating_root == pytest.approx(1.0)


class TestStrip:
    def test_cosine_strip(self):
        r = strip_zero_check(transform_function(cosine_w()), 3 - 1e-6)
        assert r.zero_free and r.consistent
        assert sorted(round(z.imag, 8) for z in r.zeros if abs(z.imag) < 3.5) == [-3.0, 3.0]

    def test_cosine_squared(self):
        r = strip_zero_check(transform_function(cosine_w(), 2), 4 - 1e-6)
        assert r.zero_free
        assert any(abs(z - 4j) < 1e-8 for z in r.zeros)

    @pytest.mark.parametrize("alpha", [0.5, 1, 2, 3.5])
    def test_zero_locations(self, alpha):
        h = alpha + 2
        r = strip_zero_check(transform_function(cosine_w(), alpha), h - 1e-6, box=(-5, 5, -h - 1, h + 1))
        assert len(r.zeros) == 2
        for z in r.zeros:
            assert abs(abs(z.imag) - h) <= 1e-8 and abs(z.real) <= 1e-8

    def test_omega_has_no_zeros(self):
        r = strip_zero_check(transform_function(omega()), 5)
        assert r.zeros == () and r.zero_free

    def test_riemann_sum_strip(self):
        r = strip_zero_check(riemann_sum_function(cosine_w(), math.pi, 20), 3 - 1e-6)
        assert r.zero_free

    def test_w_power_transform_vectorized(self):
        s = np.array([0.0, 1.0, 2j])
        v = w_power_transform(s, 1)
        assert v.shape == (3,)
        assert v[0] == pytest.approx(2.0)


class TestOmegaQRPower:
    def test_square(self):
        r = omega_qr_integer_power_transform(1, 2, 2)
        assert r.f_constant == 8
        assert r.g_shifts == (2, 3, 4)
        assert r.value(0) == Fraction(1, 3)
        direct = quadrature_transform(omega_qr(1, 2), 0, [Power(2)])
        assert abs(direct.value - 1 / 3) <= 1e-12

    def test_first_power(self):
        r = omega_qr_integer_power_transform(1, 2, 1)
        assert r.f_constant == 2
        assert r.g_shifts == (1, 2)

    def test_other_rates(self):
        r = omega_qr_integer_power_transform(3, 5, 1)
        assert r.f_constant == 15
        np.testing.assert_allclose(r.g.coef, [15, 8, 1])

    def test_equal_rates_rejected(self):
        with pytest.raises(DomainError):
            omega_qr_integer_power_transform(2, 2, 2)


class TestMKernelPowers:
    def test_first_power_is_pf(self):
        r = mkernel_power_analysis(1)
        assert r.pf
        for s in (0.5, 1.5j, 3.0):
            assert complex(r.transform(s)) == pytest.approx(12 / ((s * s - 1) * (s * s - 4)), rel=1e-13)

    def test_square_is_not_pf(self):
        r = mkernel_power_analysis(2)
        assert not r.pf
        assert r.ratio > 1
        assert r.p_n == (-1056, 0, 24)
        for s in (0, 0.5, 1.7j):
            assert complex(r.transform(s)) == pytest.approx(m_squared_transform(s), rel=1e-13)

    def test_cube_is_not_pf(self):
        r = mkernel_power_analysis(3)
        assert not r.pf
        assert all(v != 0 for v in r.p_values.values())

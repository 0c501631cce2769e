"""Acceptance suite: one test per criterion, each timed against its budget.

A summary line per criterion is printed at the end of the pytest run.
"""
import math
from fractions import Fraction

import numpy as np

from totpos.homotopy import homotopy_delta, homotopy_violations
from totpos.kernels import Power, jks, m_kernel, omega, omega_qr, sample_matrix
from totpos.laplace import (
    closed_form_transform,
    mkernel_power_analysis,
    omega_qr_integer_power_transform,
    quadrature_transform,
)
from totpos.loewner import jain_convexity_test, jain_monotonicity_test, jain_positivity_test
from totpos.numerics import det
from totpos.probes import tn3_power_probe
from totpos.suite import ProbeConfig, run_suite

SEED = 20240601


def run_probe(name: str, **params):
    doc = run_suite(ProbeConfig(probes=(name,), params={name: params}, seed=SEED))
    report = doc.probes[0]
    assert report.error is None, report.error
    assert not report.violations, report.violations[:3]
    return report


def test_exact_jks_determinants(acceptance):
    with acceptance(1, "exact JKS determinants", 1.0):
        a = (-2, -1, 1, 2)
        m4 = sample_matrix(jks(), [], a, [Fraction(v, 2) for v in a])
        d4 = det(m4)
        assert isinstance(d4, Fraction) and d4 == -2
        d3 = det(sample_matrix(jks(), [Power(0)], (-1, 0, 1), (-1, 0, 1)))
        assert d3 == -1


def test_homotopy_counterexamples(acceptance):
    with acceptance(2, "homotopy violation intervals", 1.0):
        (lo, hi), = homotopy_violations((-8.5, 0.1), (1, 2), 1.0).intervals[(0, 1)]
        assert abs(lo - (8 - math.sqrt(61)) / 19) <= 1e-12
        assert abs(hi - (8 + math.sqrt(61)) / 19) <= 1e-12
        assert lo <= 0.01 and hi >= 0.8321
        (lo, hi), = homotopy_violations((-199, 0), (1, 2), 1.0).intervals[(0, 1)]
        assert lo <= 0.0026 and hi >= 0.9924
        assert homotopy_delta((-199, 0), (1, 2)) == 1 / 398


def test_critical_exponent_trichotomy(acceptance):
    with acceptance(3, "critical-exponent trichotomy, 50 pairs per order", 60.0):
        r = run_probe("trichotomy", pairs=50, orders=(2, 3, 4, 5))
        # per order p: 3 exponents above p - 2, p - 1 rank exponents, p - 2 non-integers below
        assert r.checked == 50 * sum(3 + (p - 1) + (p - 2) for p in (2, 3, 4, 5))


def test_shift_and_scale_witnesses(acceptance):
    with acceptance(4, "one shift / one scale for every non-integer alpha", 30.0):
        r = run_probe("witnesses", points=8, orders=(3, 4, 5))
        assert r.checked == 6
        for key, rep in r.details.items():
            assert all(w.value < 0 for w in rep.witnesses.values()), key


def test_signature_law(acceptance):
    with acceptance(5, "observed signature equals predicted, 100 instances", 60.0):
        r = run_probe("signature", instances=100, max_n=5, alphas=(0.5, 1.0, 1.5, 2.0, 2.5, 3.7))
        assert r.checked == 100


def test_oracle_equivalence(acceptance):
    with acceptance(6, "Fekete (500) and Hankel (200) oracle equivalence", 120.0):
        f = run_probe("fekete", matrices=500, max_order=6)
        h = run_probe("hankel", matrices=200, max_order=6)
        assert f.checked == 500 and h.checked == 200
        assert len(f.details["statuses"]) >= 2 and len(h.details["statuses"]) >= 2


def test_loewner_phase_transitions(acceptance):
    with acceptance(7, "Loewner flips at n-2, n-1, n on a 0.1 grid", 60.0):
        tests = ((jain_positivity_test, 2), (jain_monotonicity_test, 1), (jain_convexity_test, 0))
        for n in (3, 4):
            xs = tuple(range(1, n + 1))
            for fn, offset in tests:
                threshold = n - offset
                for k in range(0, 10 * (n + 2) + 1):
                    alpha = k / 10
                    preserved = fn(xs, alpha).verdict == "preserved"
                    assert preserved == (alpha >= threshold or alpha.is_integer()), (n, fn.__name__, alpha)


def test_laplace_zero_locations(acceptance):
    with acceptance(8, "zeros of B{W^alpha} at +-(alpha+2)i, B{W} zero-free strip", 30.0):
        r = run_probe("laplace_zeros", alphas=(0.5, 1.0, 2.0, 3.5), grid=101)
        for alpha in (0.5, 1.0, 2.0, 3.5):
            rep = r.details[f"W^{alpha}"]
            assert len(rep.zeros) == 2
            for z in rep.zeros:
                assert abs(abs(z.imag) - (alpha + 2)) <= 1e-8 and abs(z.real) <= 1e-8
        assert r.details["W_strip"].zero_free


def test_sector_bound_and_riemann_convergence(acceptance):
    with acceptance(9, "root sector of p_m and O(1/m) Riemann convergence", 60.0):
        r = run_probe("sector", orders=(5, 10, 20, 40, 80))
        for m, arg in r.details["min_abs_arg"].items():
            assert arg >= 3 * math.pi / (m + 2)
        c = r.details["constant"]
        for m, err in r.details["riemann_error"].items():
            assert err <= c / m * (1 + 1e-9)


def test_transform_identities(acceptance):
    with acceptance(10, "transform identities and M^n PF verdicts", 10.0):
        assert closed_form_transform(omega(), 0).value == 1
        assert closed_form_transform(m_kernel(), 0).value == 3
        qr = omega_qr_integer_power_transform(1, 2, 2)
        direct = quadrature_transform(omega_qr(1, 2), 0, [Power(2)])
        assert abs(float(qr.value(0)) - direct.value) <= 1e-12
        assert abs(direct.value - 1 / 3) <= 1e-12
        assert mkernel_power_analysis(1).pf
        assert not mkernel_power_analysis(2).pf
        assert not mkernel_power_analysis(3).pf


def test_descartes_bound(acceptance):
    with acceptance(11, "Descartes zero bound, 500 instances", 30.0):
        r = run_probe("descartes", instances=500, max_n=6)
        assert r.checked == 500 and r.details["max_excess"] <= 0


def test_tn3_power_law(acceptance):
    with acceptance(12, "TN_3 power law", 1.0):
        for alpha in (0, 0.25, 0.5, 0.75, 0.99):
            res = tn3_power_probe(alpha)
            assert not res.preserves and res.determinant < 0
            np.testing.assert_allclose(res.points, (-math.pi / 4, 0, math.pi / 4))
        for alpha in (1, 1.5, 2, 3):
            assert tn3_power_probe(alpha).preserves


if __name__ == "__main__":
    import sys

    import pytest

    sys.exit(pytest.main([__file__, "-q"]))

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from totpos.errors import SignConflict, StructuralError
from totpos.kernels import evaluate, gaussian, hankel_rank_two, jks, m_kernel, omega, sample_matrix
from totpos.numerics import Sign3, as_matrix
from totpos.probes import jks_power_matrix
from totpos.tptest import (
    TPStatus,
    fekete_tp,
    hankel_tn,
    is_hankel,
    minor_scan,
    observed_signature,
    predicted_signature,
    tn2_logconcavity,
)

MIXED_XS = (-2, -1, 1, 2)
MIXED_YS = tuple(Fraction(v, 2) for v in MIXED_XS)


def mixed_sign_sample():
    return sample_matrix(jks(), [], MIXED_XS, MIXED_YS)


class TestMinorScan:
    def test_all_ones_two_by_two(self):
        c = minor_scan(np.ones((2, 2)), 2)
        assert c.status is TPStatus.TN_NOT_TP
        assert c.witness.sign is Sign3.ZERO
        assert c.witness.value == 0

    def test_mixed_sign_sample_is_not_tn4(self):
        c = minor_scan(mixed_sign_sample(), 4)
        assert c.status is TPStatus.NOT_TN
        assert c.witness.value == -2
        assert c.witness.rows == (0, 1, 2, 3)

    def test_gaussian_is_tp3(self):
        c = minor_scan(sample_matrix(gaussian(), [], (0, 1, 2), (0, 1, 2)), 3)
        assert c.status is TPStatus.TP
        assert c.is_tp and c.is_tn

    def test_order_above_size_is_rejected(self):
        with pytest.raises(StructuralError):
            minor_scan(np.array([[1.0, 2.0], [1.0, 3.0]]), 5)

    def test_diagonal_conjugation_invariance(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            a = rng.normal(size=(n, n)) if rng.random() < 0.5 else np.exp(np.outer(np.sort(rng.normal(size=n)),
                                                                                     np.sort(rng.normal(size=n))))
            d1, d2 = np.diag(rng.uniform(0.5, 2, n)), np.diag(rng.uniform(0.5, 2, n))
            assert minor_scan(a, n).status == minor_scan(d1 @ a @ d2, n).status

    def test_reversal_invariance(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            n = int(rng.integers(2, 6))
            xs = np.sort(rng.choice(np.arange(-20, 21), n, replace=False)) / 10
            ys = np.sort(rng.choice(np.arange(-20, 21), n, replace=False)) / 10
            a = np.exp(np.outer(xs, ys)) + (rng.normal(size=(n, n)) if rng.random() < 0.5 else 0)
            assert minor_scan(a, n).status == minor_scan(a[::-1, ::-1], n).status


class TestFekete:
    def test_two_by_two(self):
        assert fekete_tp(np.array([[1, 1], [1, 2]]), 2).status is TPStatus.TP

    def test_gaussian_five(self):
        xs = (0, 0.5, 1, 1.5, 2)
        m = sample_matrix(gaussian(), [], xs, xs)
        assert fekete_tp(m, 5).status is TPStatus.TP
        assert minor_scan(m, 5).status is TPStatus.TP

    def test_mixed_sign_sample_fails_on_a_contiguous_minor(self):
        c = fekete_tp(mixed_sign_sample(), 4)
        assert not c.is_tp
        rows, cols = c.witness.rows, c.witness.cols
        assert list(rows) == list(range(rows[0], rows[-1] + 1))
        assert list(cols) == list(range(cols[0], cols[-1] + 1))

    def test_agrees_with_full_scan_on_perturbed_exp(self):
        rng = np.random.default_rng(42)
        for _ in range(100):
            n = int(rng.integers(2, 6))
            xs = np.sort(rng.choice(np.arange(-10, 11), n, replace=False)) / 5
            a = as_matrix([[Fraction(int(k + 30)) ** int(j) for k in range(n)] for j in range(n)])  # Vandermonde: TP
            a[int(rng.integers(n)), int(rng.integers(n))] *= Fraction(int(rng.integers(1, 9)), 4)
            assert fekete_tp(a, n).is_tp == minor_scan(a, n).is_tp
            g = sample_matrix(gaussian(), [], xs, xs)
            assert fekete_tp(g, n).is_tp == minor_scan(g, n).is_tp


class TestHankel:
    def test_two_atom_moments(self):
        m = as_matrix([[2, 3, 5], [3, 5, 9], [5, 9, 17]])
        c = hankel_tn(m, 3)
        assert c.is_tn and not c.is_tp
        assert minor_scan(m, 3).status is c.status

    def test_all_ones(self):
        assert hankel_tn(np.ones((3, 3)), 3).status is TPStatus.TN_NOT_TP

    def test_rank_two_sample_is_tp2(self):
        m = sample_matrix(hankel_rank_two(1, 1, 2), [], (0, 1, 2), (0, 1, 2))
        assert is_hankel(as_matrix(m))
        assert hankel_tn(m, 2).status is TPStatus.TP

    def test_rejects_non_hankel(self):
        with pytest.raises(StructuralError):
            hankel_tn(np.array([[1.0, 2.0], [3.0, 4.0]]), 2)

    def test_agrees_with_full_scan(self):
        rng = np.random.default_rng(42)
        for _ in range(60):
            n = int(rng.integers(2, 6))
            t = [Fraction(int(k), 4) for k in rng.choice(np.arange(1, 9), 3, replace=False)]
            w = [Fraction(int(k), 3) for k in rng.integers(1, 4, 3)]
            mom = [sum(wi * ti ** k for wi, ti in zip(w, t)) for k in range(2 * n - 1)]
            if rng.random() < 0.5:
                mom[int(rng.integers(2 * n - 1))] *= Fraction(int(rng.integers(1, 9)), 4)
            h = as_matrix([[mom[j + k] for k in range(n)] for j in range(n)])
            assert hankel_tn(h, n).status is minor_scan(h, n).status


class TestSignature:
    def test_above_threshold(self):
        assert predicted_signature(3, 4).signs == (1, 1, 1)

    def test_integer_rank_pattern(self):
        assert predicted_signature(3, 1).signs == (1, 1, 0)

    def test_half_power(self):
        assert predicted_signature(3, 0.5).signs == (1, 1, -1)

    def test_observed_half_power(self):
        m = jks_power_matrix((0.1, 0.2, 0.3), (0.1, 0.2, 0.3), 0.5, "extended")
        assert observed_signature(m).signs == predicted_signature(3, 0.5).signs

    def test_all_ones(self):
        assert observed_signature(np.ones((3, 3))).signs == (1, 0, 0)

    def test_cube_is_tp(self):
        xs = (Fraction(-1, 2), Fraction(1, 10), Fraction(1, 2), Fraction(3, 2))
        ys = (Fraction(-1, 4), Fraction(0), Fraction(1, 3), Fraction(1, 2))
        m = jks_power_matrix(xs, ys, 3, "exact")
        assert observed_signature(m).signs == (1, 1, 1, 1)

    def test_sign_conflict(self):
        with pytest.raises(SignConflict):
            observed_signature(np.array([[1.0, 2.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]]))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 6), st.floats(0, 8))
    def test_predicted_starts_positive(self, n, alpha):
        sig = predicted_signature(n, alpha).signs
        assert sig[0] == 1 and len(sig) == n


class TestLogConcavity:
    def test_omega(self):
        xs = np.arange(0.5, 8, 0.5)
        assert tn2_logconcavity([(x, float(evaluate(omega(), [], x, 0))) for x in xs]).consistent

    def test_m_kernel(self):
        xs = np.arange(-2, 2.001, 0.25)
        assert tn2_logconcavity([(x, float(evaluate(m_kernel(), [], x, 0))) for x in xs]).consistent

    def test_disconnected_support(self):
        r = tn2_logconcavity([(-1, 1.0), (0, 0.0), (0.5, 0.0), (2, 1.0)])
        assert not r.consistent

    def test_log_convex_bump(self):
        xs = np.linspace(-2, 2, 9)
        r = tn2_logconcavity([(x, math.cosh(x)) for x in xs])
        assert not r.consistent

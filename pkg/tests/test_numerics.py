from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from totpos.errors import NumericError, StructuralError
from totpos.numerics import (
    DEFAULT_PROFILE,
    EXTENDED_PROFILE,
    Sign3,
    as_matrix,
    batch_det,
    det,
    det_with_magnitude,
    format_scalar,
    matrix_mode,
    minor_index_sets,
    parse_scalar,
    rank,
    sign3,
)

JKS_MIXED_SIGN = [[3, 2, 0, 0], [2, Fraction(3, 2), Fraction(1, 2), 0], [0, Fraction(1, 2), Fraction(3, 2), 2], [0, 0, 2, 3]]


class TestDet:
    def test_small_integer(self):
        assert det(as_matrix([[1, 1], [1, 2]])) == 1

    def test_identity(self):
        assert det(as_matrix(np.eye(4, dtype=int).tolist())) == 1

    def test_mixed_sign_display_is_exactly_minus_two(self):
        d = det(as_matrix(JKS_MIXED_SIGN))
        assert isinstance(d, Fraction)
        assert d == -2

    def test_float_matches_exact_on_random_integer_matrices(self):
        rng = np.random.default_rng(42)
        for n in range(1, 9):
            for _ in range(5):
                a = rng.integers(-9, 10, (n, n))
                exact = det(as_matrix(a.tolist(), "exact"))
                approx, mag = det_with_magnitude(a.astype(float))
                assert abs(approx - float(exact)) <= DEFAULT_PROFILE.rel_eps * max(mag, 1.0)

    def test_row_scaling(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            a = as_matrix(rng.integers(-5, 6, (5, 5)).tolist(), "exact")
            c = Fraction(int(rng.integers(1, 9)), int(rng.integers(1, 9)))
            b = a.copy()
            b[2] = b[2] * c
            assert det(b) == c * det(a)

    def test_extended_mode(self):
        with mpmath.workprec(160):
            m = as_matrix([[1, 2], [3, 4]], "extended")
        assert matrix_mode(m) == "extended"
        assert abs(det(m) + 2) < 1e-40

    def test_batch_det_matches_numpy(self):
        rng = np.random.default_rng(42)
        stack = rng.normal(size=(50, 4, 4))
        d, _ = batch_det(stack)
        np.testing.assert_allclose(d, np.linalg.det(stack), rtol=1e-10, atol=1e-12)

    def test_non_square(self):
        with pytest.raises(StructuralError):
            det(as_matrix([[1, 2, 3], [4, 5, 6]]))

    def test_nan(self):
        with pytest.raises(NumericError):
            det(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestSign3:
    def test_exact_negative(self):
        assert sign3(Fraction(-2), 3) is Sign3.NEGATIVE

    def test_float_below_band(self):
        assert sign3(1e-15, 1.0) is Sign3.ZERO

    def test_exact_zero(self):
        assert sign3(Fraction(0), 0) is Sign3.ZERO

    def test_exact_tiny_is_never_zero(self):
        assert sign3(Fraction(1, 10 ** 40), 1) is Sign3.POSITIVE

    def test_extended_profile_is_tighter(self):
        assert sign3(1e-20, 1.0, EXTENDED_PROFILE) is Sign3.POSITIVE


class TestRank:
    def test_all_ones(self):
        assert rank(np.ones((3, 3))) == 1

    def test_rank_two_outer(self):
        j = np.arange(1, 5)
        assert rank(1 + np.outer(j, j)) == 2
        assert rank(as_matrix((1 + np.outer(j, j)).tolist(), "exact")) == 2

    def test_squared_gram_has_rank_three(self):
        x = np.array([0.1, 0.4, 0.7, 1.3])
        y = np.array([0.2, 0.5, 0.9, 1.1])
        assert rank((1 + np.outer(x, y)) ** 2) == 3

    def test_transpose_invariant(self):
        rng = np.random.default_rng(42)
        for _ in range(20):
            k = int(rng.integers(1, 4))
            a = rng.integers(-3, 4, (5, k)) @ rng.integers(-3, 4, (k, 6))
            assert rank(a.astype(float)) == rank(a.T.astype(float))
            assert rank(as_matrix(a.tolist(), "exact")) == rank(as_matrix(a.T.tolist(), "exact"))


class TestScalars:
    @given(st.fractions(max_denominator=10 ** 6))
    def test_format_round_trip(self, f):
        assert parse_scalar(format_scalar(f)) == f

    def test_format_integer(self):
        assert format_scalar(Fraction(4, 2)) == "2"
        assert format_scalar(Fraction(-1, 2)) == "-1/2"

    def test_minor_index_sets_count(self):
        assert len(list(minor_index_sets(5, 5, 2))) == 100


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(-20, 20), min_size=9, max_size=9))
def test_exact_and_float_det_agree_3x3(entries):
    a = np.array(entries).reshape(3, 3)
    np.testing.assert_allclose(float(det(as_matrix(a.tolist(), "exact"))), np.linalg.det(a), atol=1e-8)

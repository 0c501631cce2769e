import math
from fractions import Fraction

import numpy as np
import pytest

from totpos.errors import DomainError
from totpos.kernels import custom, omega, omega_qr, two_sided_exp
from totpos.probes import (
    PowerClass,
    classify_power,
    cosine_scale_witness,
    jain_matrix_probe,
    largest_minor_characterization_check,
    omega_shift_witness,
    tn3_power_probe,
)
from totpos.suite import random_admissible_pair
from totpos.tptest import TPStatus


class TestClassifyPower:
    def test_tp_above_threshold(self):
        assert classify_power(4, 2.5).kind is PowerClass.TP

    def test_rank_for_small_integers(self):
        pred = classify_power(4, 1)
        assert pred.kind is PowerClass.TN_RANK
        assert pred.rank == 2

    def test_not_tn_below_threshold(self):
        assert classify_power(4, 0.5).kind is PowerClass.NOT_TN


class TestJainMatrixProbe:
    def test_half_power_has_negative_principal_minor(self):
        rep = jain_matrix_probe((0.1, 0.2, 0.3), (0.1, 0.2, 0.3), 0.5)
        assert rep.agrees
        assert rep.classification.status is TPStatus.NOT_TN
        assert rep.classification.witness.value < 0

    def test_cube_is_tp(self):
        rep = jain_matrix_probe((0.1, 0.2, 0.3, 0.4), (0.1, 0.2, 0.3, 0.4), 3)
        assert rep.agrees
        assert rep.classification.status is TPStatus.TP

    def test_linear_has_rank_two(self):
        rep = jain_matrix_probe((1, 2, 3), (1, 2, 3), 1)
        assert rep.agrees
        assert rep.rank == 2
        assert rep.classification.status is TPStatus.TN_NOT_TP

    def test_random_trichotomy(self):
        rng = np.random.default_rng(42)
        for p in (2, 3, 4):
            for _ in range(5):
                xs, ys = random_admissible_pair(rng, p)
                for alpha in [p - 1.5, p - 1, p + 0.3] + list(range(p - 1)) + [0.5 + k for k in range(p - 2)]:
                    assert jain_matrix_probe(xs, ys, alpha).agrees, (p, alpha, xs, ys)


class TestShiftWitness:
    def test_single_alpha(self):
        rep = omega_shift_witness(range(1, 7), range(1, 7), 3, [0.5])
        assert rep.constant == -6
        # oracle: 160-bit determinant of (t e^{-t})^{1/2} at t = x - y + 6
        assert float(rep.witnesses[0.5].value) == pytest.approx(-2.94826062059e-5, rel=1e-10)

    def test_one_shift_for_several_alphas(self):
        rep = omega_shift_witness(range(1, 7), range(1, 7), 4, [0.5, 1.5], variant=omega_qr(1, 2))
        assert set(rep.witnesses) == {0.5, 1.5}
        assert all(w.value < 0 for w in rep.witnesses.values())

    def test_rejects_alpha_outside_range(self):
        with pytest.raises(DomainError):
            omega_shift_witness(range(1, 7), range(1, 7), 4, [2.7])

    def test_rejects_integer_alpha(self):
        with pytest.raises(DomainError):
            omega_shift_witness(range(1, 7), range(1, 7), 3, [1])

    def test_rejects_small_sets(self):
        with pytest.raises(DomainError):
            omega_shift_witness([-1, 0, 1], [-1, 0, 1], 4, [0.5])


class TestScaleWitness:
    def test_three_points(self):
        rep = cosine_scale_witness([1, 2, 3], [1, 2, 3], 3, [0.5])
        assert rep.constant == pytest.approx(math.pi / 15, rel=1e-15)
        assert float(rep.witnesses[0.5].value) == pytest.approx(-2.20792356672e-5, rel=1e-10)

    def test_five_points(self):
        rep = cosine_scale_witness(range(1, 6), range(1, 6), 4, [1.5])
        assert rep.witnesses[1.5].value < 0

    def test_eight_points_all_orders(self):
        X = range(1, 9)
        rep = cosine_scale_witness(X, X, 5, [0.5, 1.5, 2.5])
        assert all(w.value < 0 for w in rep.witnesses.values())


class TestLargestMinor:
    def test_two_sided_exp(self):
        r = largest_minor_characterization_check(two_sided_exp(0.5, 2, 1, 0), (), 3,
                                                 window=np.arange(-6, 6.01, 0.5), samples_per_order=100)
        assert r.verdict == "consistent"

    def test_omega(self):
        assert largest_minor_characterization_check(omega(), (), 4, samples_per_order=100).verdict == "consistent"

    def test_exponential_is_exempt(self):
        spec = custom(lambda t: math.exp(0.3 * t), name="exp")
        assert largest_minor_characterization_check(spec, (), 3, samples_per_order=50).verdict == "exempt_exponential"


class TestTN3Powers:
    @pytest.mark.parametrize("alpha", [0.0, 0.25, 0.5, 0.75, 0.99])
    def test_counterexample(self, alpha):
        r = tn3_power_probe(alpha)
        assert not r.preserves
        # det [[1, c, 0], [c, 1, c], [0, c, 1]] with c = cos(pi/4)^alpha
        assert float(r.determinant) == pytest.approx(1 - 2 ** (1 - alpha), rel=1e-12)

    def test_alpha_zero_pattern(self):
        r = tn3_power_probe(0)
        assert np.asarray(r.matrix, float).tolist() == [[1, 1, 0], [1, 1, 1], [0, 1, 1]]
        assert r.determinant == -1

    @pytest.mark.parametrize("alpha", [1, 1.5, 3])
    def test_preserves(self, alpha):
        assert tn3_power_probe(alpha).preserves

    def test_negative_alpha(self):
        with pytest.raises(DomainError):
            tn3_power_probe(-0.5)

    def test_exact_alpha_zero(self):
        assert tn3_power_probe(Fraction(0)).determinant == -1

import math

import numpy as np
import pytest

from bruckloops.groups import (
    SampleStream,
    SignatureForm,
    conjugate_by_phi,
    membership_residual,
    sample_phi,
    standard_boost,
)
from bruckloops.linalg import fro
from bruckloops.matrixloop import MatrixLoop, frobenius_distance


@pytest.fixture
def mloop(form321r):
    return MatrixLoop(form321r)


class TestMul:
    def test_left_identity(self, mloop):
        b, _ = mloop.sample(SampleStream(1))
        out = mloop.mul(mloop.identity(), b)
        assert frobenius_distance(out, b) <= 1e-13

    def test_square(self, mloop):
        a, _ = mloop.sample(SampleStream(2))
        out = mloop.mul(a, a)
        assert fro(out.matrix - a.matrix @ a.matrix) <= 1e-12

    def test_coaxial_boosts_add_rapidities(self, mloop, form321r):
        a = standard_boost(form321r, math.log(2))
        out = mloop.mul(a, a)
        # cosh(2 log 2) = 17/8, sinh(2 log 2) = 15/8
        expected = np.array([[1.0, 0.0, 0.0], [0.0, 2.125, 1.875], [0.0, 1.875, 2.125]])
        assert np.max(np.abs(out.matrix - expected)) <= 1e-10

    def test_closure_membership(self, mloop, form321r):
        stream = SampleStream(3)
        for _ in range(200):
            a, stream = mloop.sample(stream)
            b, stream = mloop.sample(stream)
            out = mloop.mul(a, b)
            assert membership_residual(out.matrix, "Sigma", form321r).max_residual <= 1e-9


class TestInverse:
    def test_identity(self, mloop):
        assert frobenius_distance(mloop.inverse(mloop.identity()), mloop.identity()) == 0.0

    def test_boost_inverse_flips_rapidity(self, mloop, form321r):
        t = 0.7
        inv = mloop.inverse(standard_boost(form321r, t))
        assert fro(inv.matrix - standard_boost(form321r, -t).matrix) <= 1e-12

    def test_mul_with_inverse(self, mloop):
        stream = SampleStream(4)
        for _ in range(40):
            a, stream = mloop.sample(stream)
            out = mloop.mul(a, mloop.inverse(a))
            assert frobenius_distance(out, mloop.identity()) <= 1e-9


class TestDivision:
    def test_left_divide_trivials(self, mloop):
        c, _ = mloop.sample(SampleStream(5))
        assert frobenius_distance(mloop.left_divide(mloop.identity(), c), c) <= 1e-13
        assert frobenius_distance(mloop.left_divide(c, c), mloop.identity()) <= 1e-13

    def test_right_divide_trivials(self, mloop):
        b, _ = mloop.sample(SampleStream(6))
        assert frobenius_distance(mloop.right_divide(b, mloop.identity()), b) <= 1e-13
        assert frobenius_distance(mloop.right_divide(b, b), mloop.identity()) <= 1e-13

    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_roundtrips(self, field):
        mloop = MatrixLoop(SignatureForm(3, 2, 1, field))
        form = mloop.form
        stream = SampleStream(7)
        for _ in range(60):
            a, stream = mloop.sample(stream)
            c, stream = mloop.sample(stream)
            x = mloop.left_divide(a, c)
            assert frobenius_distance(mloop.mul(a, x), c) <= 1e-8
            assert membership_residual(x.matrix, "Sigma", form).max_residual <= 1e-9
            y = mloop.right_divide(c, a)
            assert frobenius_distance(mloop.mul(y, a), c) <= 1e-8
            assert membership_residual(y.matrix, "Sigma", form).max_residual <= 1e-9


class TestConjugationEquivariance:
    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_phi_conjugation_distributes_over_mul(self, field):
        form = SignatureForm(3, 2, 1, field)
        mloop = MatrixLoop(form)
        stream = SampleStream(8)
        for _ in range(50):
            a1, stream = mloop.sample(stream)
            a2, stream = mloop.sample(stream)
            b, stream = sample_phi(form, stream)
            lhs = conjugate_by_phi(mloop.mul(a1, a2), b)
            rhs = mloop.mul(conjugate_by_phi(a1, b), conjugate_by_phi(a2, b))
            assert fro(lhs.matrix - rhs.matrix) <= 1e-8


def test_distance_properties(mloop):
    a, stream = mloop.sample(SampleStream(9))
    b, _ = mloop.sample(stream)
    assert frobenius_distance(a, a) == 0.0
    assert frobenius_distance(a, b) == frobenius_distance(b, a)

import numpy as np
import pytest

from bruckloops.errors import InversesDisagree, SamplerUnavailable
from bruckloops.extension import ext_loop_interface, extension_config
from bruckloops.groups import SampleStream, SignatureForm, standard_boost
from bruckloops.kernel import (
    Loop,
    check_aip,
    check_bol,
    check_left_a,
    check_loop_axioms,
    inverse_of,
)
from bruckloops.matrixloop import MatrixLoop


@pytest.fixture
def mloop(form321r):
    return MatrixLoop(form321r)


@pytest.fixture
def loop(mloop):
    return mloop.loop_interface()


class TestCheckers:
    def test_axioms_pass(self, loop):
        rep = check_loop_axioms(loop, SampleStream(1), 200)
        assert rep.passed and rep.max_residual <= 1e-8
        assert rep.samples == 200

    def test_division_at_identity(self, loop):
        a, _ = loop.sample(SampleStream(9))
        x = loop.left_divide(a, a)
        assert loop.distance(x, loop.identity) <= 1e-12

    def test_bol_trivial_slots(self, loop):
        e = loop.identity
        y, _ = loop.sample(SampleStream(2))
        z, _ = loop.sample(SampleStream(3))
        # x = e: both sides reduce to y*z
        lhs = loop.mul(e, loop.mul(y, loop.mul(e, z)))
        rhs = loop.mul(loop.mul(e, loop.mul(y, e)), z)
        assert loop.distance(lhs, rhs) <= 1e-13
        # z = e: both sides reduce to x*(y*x)
        x, _ = loop.sample(SampleStream(4))
        lhs = loop.mul(x, loop.mul(y, loop.mul(x, e)))
        rhs = loop.mul(loop.mul(x, loop.mul(y, x)), e)
        assert loop.distance(lhs, rhs) <= 1e-13

    def test_bol_pass(self, loop):
        rep = check_bol(loop, SampleStream(5), 200)
        assert rep.passed

    def test_aip_pass(self, loop):
        rep = check_aip(loop, SampleStream(6), 200)
        assert rep.passed

    def test_aip_commuting_boosts(self, mloop, form321r):
        s, t = 0.4, 0.9
        prod = mloop.mul(standard_boost(form321r, s), standard_boost(form321r, t))
        inv = mloop.inverse(prod)
        expected = standard_boost(form321r, -(s + t))
        assert np.max(np.abs(inv.matrix - expected.matrix)) <= 1e-12

    def test_left_a_identity_slots(self, loop):
        e = loop.identity
        u, _ = loop.sample(SampleStream(7))
        v, _ = loop.sample(SampleStream(8))
        lam_e = loop.left_divide(loop.mul(e, e), loop.mul(e, loop.mul(e, u)))
        assert loop.distance(lam_e, u) <= 1e-13

    def test_left_a_reported(self, loop):
        rep = check_left_a(loop, SampleStream(9), 100)
        assert rep.samples == 100
        assert rep.max_residual >= 0.0

    def test_monotone_in_sample_count(self, loop):
        small = check_bol(loop, SampleStream(10), 50)
        large = check_bol(loop, SampleStream(10), 150)
        assert small.max_residual <= large.max_residual

    def test_deterministic_reports(self, loop):
        a = check_aip(loop, SampleStream(11), 60)
        b = check_aip(loop, SampleStream(11), 60)
        assert a.max_residual == b.max_residual

    def test_sampler_unavailable(self, loop):
        bare = Loop(loop.mul, loop.left_divide, loop.right_divide, loop.identity, loop.distance)
        with pytest.raises(SamplerUnavailable):
            check_loop_axioms(bare, SampleStream(1), 5)


class TestTwoSidedInverses:
    @pytest.mark.parametrize("field", ["real", "complex"])
    def test_matrix_loop_two_sided(self, field):
        loop = MatrixLoop(SignatureForm(3, 2, 1, field)).loop_interface()
        stream = SampleStream(1)
        count = 500 if field == "real" else 150
        for _ in range(count):
            x, stream = loop.sample(stream)
            left = loop.left_divide(x, loop.identity)
            right = loop.right_divide(loop.identity, x)
            assert loop.distance(left, right) <= 1e-9

    def test_extension_loop_inverses_disagree(self, form321r):
        # the subspace extension has distinct left and right inverses as
        # soon as the translation part is nonzero; the AIP checker must
        # refuse rather than report a meaningless residual
        loop = ext_loop_interface(extension_config(form321r))
        with pytest.raises(InversesDisagree):
            check_aip(loop, SampleStream(1), 40)

    def test_inverse_of_matrix_loop(self, loop, mloop):
        x, _ = loop.sample(SampleStream(13))
        inv = inverse_of(loop, x)
        assert loop.distance(inv, mloop.inverse(x)) <= 1e-10


def test_report_json(loop):
    rep = check_bol(loop, SampleStream(14), 10)
    payload = rep.to_json()
    assert set(payload) == {"property", "samples", "max_residual", "tolerance", "pass"}
    assert payload["property"] == "bol"
    assert payload["pass"] is True

import json

import numpy as np
import pytest

import oracles
from conftest import DATA, kernel, random_channel, random_noncausal
from coopbc.channel import (
    AuxScheme,
    BinarySymmetricBC,
    ChannelSpec,
    assemble_joint,
    bsc,
    channel_from_json,
    channel_to_json,
    degrade_param,
    load_channel,
    save_channel,
    to_channel_spec,
    validate_degraded,
)
from coopbc.errors import DomainError, IncompatibleAlphabetsError, NotDegradableError
from coopbc.prob import mutual_information, verify_markov


class TestAssemble:
    def test_stateless_copy_chain(self):
        ch = ChannelSpec.from_arrays([1.0], [np.eye(2)], np.eye(2))
        p = assemble_joint(ch, AuxScheme.stateless(np.diag([0.5, 0.5])))
        assert verify_markov(p, ["U", "X", "Y", "Z"]).holds

    def test_constant_u(self, rng):
        ch = random_channel(rng)
        aux = AuxScheme.noncausal(np.array([[1.0, 0.0], [1.0, 0.0]]), kernel(rng, (2, 2, 2)))
        p = assemble_joint(ch, aux)
        assert mutual_information(p, "U", ["S", "X", "Y", "Z"]) == 0.0

    def test_uniform_noncausal_cellwise(self):
        half = [[0.5, 0.5], [0.5, 0.5]]
        W = [half, half]
        aux = AuxScheme.noncausal(half, [half, half])
        ch = ChannelSpec.from_arrays([0.5, 0.5], W, half)
        p = assemble_joint(ch, aux)
        ref = oracles.noncausal_joint([0.5, 0.5], half, [half, half], W, half)
        assert len(ref) == 32
        for k, v in ref.items():
            assert p.mass[k] == pytest.approx(v, abs=1e-15)

    def test_random_noncausal_cellwise(self, rng):
        ch, aux = random_channel(rng), random_noncausal(rng)
        p = assemble_joint(ch, aux)
        ref = oracles.noncausal_joint(ch.state_pmf.mass, aux.components["p_u_given_s"],
                                      aux.components["p_x_given_us"], ch.forward.kernel, ch.degrade.kernel)
        for k, v in ref.items():
            assert p.mass[k] == pytest.approx(v, abs=1e-14)

    def test_axes_per_form(self, rng):
        ch = random_channel(rng)
        assert assemble_joint(ch, random_noncausal(rng)).names == ("S", "U", "X", "Y", "Z")
        rl = AuxScheme.rate_limited(kernel(rng, (2, 8)).reshape(2, 2, 2, 2))
        assert assemble_joint(ch, rl).names == ("S", "Sd", "U", "X", "Y", "Z")
        cz = AuxScheme.causal(kernel(rng, (1, 6)).reshape(2, 3), rng.integers(0, 2, (2, 2, 3)))
        assert assemble_joint(ch, cz).names == ("S", "U", "V", "X", "Y", "Z")

    def test_causal_independent_of_state(self, rng):
        ch = random_channel(rng)
        aux = AuxScheme.causal(kernel(rng, (1, 6)).reshape(2, 3), rng.integers(0, 2, (2, 2, 3)))
        p = assemble_joint(ch, aux)
        assert mutual_information(p, ["U", "V"], "S") <= 1e-9

    def test_noncausal_degradedness(self, rng):
        for _ in range(5):
            p = assemble_joint(random_channel(rng), random_noncausal(rng))
            assert verify_markov(p, [("U", "X", "S"), "Y", "Z"]).holds
            assert mutual_information(p, "U", "Y", ["X", "S"]) <= 1e-9

    def test_shape_mismatch(self, rng):
        ch = random_channel(rng, x=3)
        with pytest.raises(IncompatibleAlphabetsError):
            assemble_joint(ch, random_noncausal(rng, x=2))
        with pytest.raises(IncompatibleAlphabetsError):
            AuxScheme.noncausal(kernel(rng, (2, 2)), kernel(rng, (2, 3, 2)))


class TestBinary:
    def test_degrade_param(self):
        q = degrade_param(0.2, 0.3)
        assert q == pytest.approx(1 / 6, abs=1e-12)
        assert oracles.conv(0.2, q) == pytest.approx(0.3, abs=1e-15)

    def test_degrade_trivial(self):
        assert degrade_param(0.25, 0.25) == 0.0
        assert degrade_param(0.0, 0.3) == pytest.approx(0.3)

    def test_not_degradable(self):
        with pytest.raises(NotDegradableError):
            degrade_param(0.3, 0.2)
        with pytest.raises(NotDegradableError):
            BinarySymmetricBC(0.1, 0.5)

    def test_composed(self):
        ch = to_channel_spec(BinarySymmetricBC(0.2, 0.3))
        np.testing.assert_allclose(ch.composed()[0], bsc(0.3), atol=1e-12)
        assert ch.is_stateless

    def test_noiseless(self):
        ch = to_channel_spec(BinarySymmetricBC(0.0, 0.0))
        np.testing.assert_array_equal(ch.composed()[0], np.eye(2))

    def test_identity_degrade(self):
        ch = to_channel_spec(BinarySymmetricBC(0.1, 0.1))
        np.testing.assert_array_equal(ch.degrade.kernel, np.eye(2))


class TestValidateDegraded:
    def test_spec_is_degraded(self, rng):
        assert validate_degraded(random_channel(rng)).ok

    def test_factorizable_table(self, rng):
        W, D = kernel(rng, (1, 2, 3)), kernel(rng, (3, 2))
        table = np.einsum("sxy,yz->sxyz", W, D)
        res = validate_degraded(table, [1.0])
        assert res.ok
        np.testing.assert_allclose(res.channel.forward.kernel, W, atol=1e-12)
        np.testing.assert_allclose(res.channel.degrade.kernel, D, atol=1e-12)

    def test_z_copies_x(self):
        table = np.zeros((1, 2, 2, 2))
        for x in range(2):
            for y in range(2):
                table[0, x, y, x] = 0.5
        res = validate_degraded(table, [1.0])
        assert not res.ok
        x, s, y, z = res.witness
        assert s == 0 and res.max_deviation == pytest.approx(0.5)


class TestJson:
    def test_round_trip(self, rng, tmp_path):
        ch, aux = random_channel(rng), random_noncausal(rng)
        save_channel(tmp_path / "c.json", ch, aux)
        ch2, aux2 = load_channel(tmp_path / "c.json")
        np.testing.assert_allclose(ch2.forward.kernel, ch.forward.kernel, atol=1e-12)
        np.testing.assert_allclose(aux2.components["p_x_given_us"], aux.components["p_x_given_us"])

    def test_renormalize_small(self, rng):
        d = channel_to_json(random_channel(rng))
        d["degrade"][0][0] += 5e-10
        ch, _ = channel_from_json(d)
        assert ch.degrade.kernel[0].sum() == pytest.approx(1.0, abs=1e-15)

    def test_reject_large(self, rng):
        d = channel_to_json(random_channel(rng))
        d["degrade"][0][0] += 1e-6
        with pytest.raises(DomainError):
            channel_from_json(d)

    def test_alphabet_mismatch(self, rng):
        d = channel_to_json(random_channel(rng))
        d["alphabets"]["Y"] = 5
        with pytest.raises(IncompatibleAlphabetsError):
            channel_from_json(d)

    def test_joint_kernel_import(self):
        table = np.zeros((1, 2, 2, 2))
        for x in range(2):
            for y in range(2):
                table[0, x, y, x] = 0.5
        with pytest.raises(NotDegradableError):
            channel_from_json({"state_pmf": [1.0], "joint_kernel": table.tolist()})

    def test_bundled_binary(self):
        ch, aux = load_channel(DATA / "binary_channel.json")
        np.testing.assert_allclose(ch.composed()[0], bsc(0.3), atol=1e-12)
        assert aux.form == "noncausal"
        json.loads((DATA / "binary_channel.json").read_text())

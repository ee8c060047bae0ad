import numpy as np
import pytest

import oracles
from conftest import kernel, random_channel, random_noncausal, random_rate_limited
from coopbc.channel import AuxScheme, ChannelSpec, assemble_joint
from coopbc.errors import DomainError, InvalidSchemeError
from coopbc.polyhedra import contains
from coopbc.prob import entropy, mutual_information
from coopbc.regions import (
    RegionKind,
    _rows_rate_splitting,
    alpha_grid,
    binary_symmetric_region,
    check_superposition_identity,
    compare_binary,
    evaluate_region,
    merge_rate_limited,
    project_rate_splitting,
    rate_splitting_expected,
)


def bound(ev, coeffs):
    """Numeric rhs of the row with the given coefficient map."""
    for cm, row in zip(ev.system.coeff_maps(), ev.bounds()):
        if cm == coeffs:
            return row[-1]
    raise KeyError(coeffs)


RZ, RY, SUM = {"R_Z": 1}, {"R_Y": 1}, {"R_Z": 1, "R_Y": 1}


class TestEvaluate:
    def test_thm1_trivial_aux(self, rng):
        W = kernel(rng, (1, 2, 2))
        ch = ChannelSpec.from_arrays([1.0], W, kernel(rng, (2, 2)))
        aux = AuxScheme.noncausal([[1.0]], [[[0.4, 0.6]]])
        ev = evaluate_region("thm1", ch, aux, 0.07)
        m = 0.4 * W[0][0] + 0.6 * W[0][1]
        ixy = oracles.h2(m[1]) - 0.4 * oracles.h2(W[0][0][1]) - 0.6 * oracles.h2(W[0][1][1])
        assert bound(ev, RZ) == pytest.approx(0.07, abs=1e-12)
        assert bound(ev, RY) == pytest.approx(ixy, abs=1e-12)
        assert bound(ev, SUM) == pytest.approx(ixy, abs=1e-12)

    def test_thm1_vs_rate_splitting(self, rng):
        for _ in range(10):
            ch, aux = random_channel(rng), random_noncausal(rng)
            a = evaluate_region("thm1", ch, aux, 0.05)
            b = evaluate_region("rate-splitting", ch, aux, 0.05)
            assert bound(a, RZ) == pytest.approx(bound(b, RZ), abs=1e-12)
            assert bound(a, RY) == pytest.approx(bound(b, RY), abs=1e-12)
            assert bound(b, SUM) <= bound(a, SUM) + 1e-9
            assert contains(a.region, b.region).holds

    def test_terms_against_oracle(self, rng):
        ch, aux = random_channel(rng), random_noncausal(rng)
        ev = evaluate_region("thm1", ch, aux, 0.0)
        p = assemble_joint(ch, aux)
        names = list(p.names)
        assert ev.terms["I(U;Z)"] == pytest.approx(oracles.I(p.mass, names, ["U"], ["Z"]), abs=1e-12)
        assert ev.terms["I(X;Y|U,S)"] == pytest.approx(
            oracles.I(p.mass, names, ["X"], ["Y"], ["U", "S"]), abs=1e-12)

    def test_thm3_perfect_description(self, rng):
        ch = random_channel(rng)
        c = np.zeros((2, 2, 2, 2))
        inner = kernel(rng, (2, 4)).reshape(2, 2, 2)
        for s in range(2):
            c[s, s] = inner[s]
        aux = AuxScheme.rate_limited(c)
        p = assemble_joint(ch, aux)
        h_s_z = entropy(p, ["S", "Z"]) - entropy(p, "Z")
        ok = evaluate_region("thm3", ch, aux, h_s_z + 1e-6)
        bad = evaluate_region("thm3", ch, aux, max(h_s_z - 1e-3, 0.0))
        assert ok.feasible and not bad.feasible
        assert bad.region.is_empty
        want = mutual_information(p, "U", "Z", "S")
        assert bound(ok, RZ) == pytest.approx(want, abs=1e-12)
        # conditional form of the same bound
        alt = mutual_information(p, "U", "Z", "Sd") - mutual_information(p, "U", "S", "Sd")
        assert bound(ok, RZ) == pytest.approx(alt, abs=1e-9)

    def test_form_mismatch(self, rng):
        with pytest.raises(InvalidSchemeError):
            evaluate_region("thm3", random_channel(rng), random_noncausal(rng), 0.1)
        with pytest.raises(DomainError):
            evaluate_region("thm1", random_channel(rng), random_noncausal(rng), -0.1)
        with pytest.raises(DomainError):
            RegionKind.parse("thm9")

    def test_negative_gp_difference_kept(self):
        # U equals S and the channel ignores both: I(U;Z) - I(U;S) = -1
        ch = ChannelSpec.from_arrays([0.5, 0.5], [[[1, 0], [1, 0]]] * 2, np.eye(2))
        aux = AuxScheme.noncausal(np.eye(2), [[[1, 0]] * 2] * 2)
        ev = evaluate_region("thm1", ch, aux, 0.25)
        assert bound(ev, RZ) == pytest.approx(-0.75)
        assert ev.region.is_empty

    def test_thm2_and_stateless_kinds(self, rng):
        ch = random_channel(rng)
        caus = AuxScheme.causal(kernel(rng, (1, 6)).reshape(2, 3), rng.integers(0, 2, (2, 2, 3)))
        ev = evaluate_region("thm2", ch, caus, 0.1)
        assert set(ev.terms) == {"C12", "I(U;Z)", "I(V;Y|U)", "I(V,U;Y)"}
        sl = random_channel(rng, s=1)
        aux = AuxScheme.stateless(kernel(rng, (1, 4)).reshape(2, 2))
        a = evaluate_region("stateless-thm1", sl, aux, 0.1)
        b = evaluate_region("dabora-servetto", sl, aux, 0.1)
        assert contains(a.region, b.region).holds
        with pytest.raises(InvalidSchemeError):
            evaluate_region("stateless-thm1", ch, aux, 0.1)

    def test_monotone_in_c12(self, rng):
        ch, aux = random_channel(rng), random_noncausal(rng)
        for kind in ("thm1", "rate-splitting"):
            lo, hi = evaluate_region(kind, ch, aux, 0.01), evaluate_region(kind, ch, aux, 0.2)
            assert contains(hi.region, lo.region).holds


class TestRateSplittingProjection:
    def test_projection_exact(self):
        assert project_rate_splitting().canonical() == rate_splitting_expected(True).canonical()

    def test_kept_rows(self):
        assert _rows_rate_splitting().canonical() == rate_splitting_expected().canonical()


class TestBinary:
    def test_separating_point(self):
        ev = binary_symmetric_region("binning", 0.2, 0.3, 0.03, 0.0)
        assert bound(ev, RZ) == pytest.approx(0.148709, abs=1e-6)
        assert bound(ev, RZ) == pytest.approx(1 - oracles.h2(0.3) + 0.03, abs=1e-15)

    @pytest.mark.parametrize("scheme", ["binning", "rate-splitting-bound"])
    def test_alpha_zero_private_rate(self, scheme):
        assert bound(binary_symmetric_region(scheme, 0.2, 0.3, 0.1, 0.0), RY) == pytest.approx(0.0, abs=1e-15)

    def test_rs_sum_bound(self):
        ev = binary_symmetric_region("rate-splitting-bound", 0.2, 0.3, 0.03, 0.0)
        assert bound(ev, SUM) == pytest.approx(0.118709, abs=1e-6)
        assert bound(ev, SUM) < 0.148709

    def test_domain(self):
        with pytest.raises(DomainError):
            binary_symmetric_region("binning", 0.3, 0.2, 0.0, 0.0)
        with pytest.raises(DomainError):
            binary_symmetric_region("binning", 0.2, 0.3, 0.0, 0.7)
        with pytest.raises(DomainError):
            binary_symmetric_region("other", 0.2, 0.3, 0.0, 0.0)

    def test_matches_general_evaluator(self):
        from coopbc.channel import BinarySymmetricBC, to_channel_spec
        from coopbc.regions import binary_noncausal_aux
        ch = to_channel_spec(BinarySymmetricBC(0.2, 0.3))
        for alpha in (0.0, 0.07, 0.3):
            a = binary_symmetric_region("binning", 0.2, 0.3, 0.05, alpha)
            b = evaluate_region("thm1", ch, binary_noncausal_aux(alpha), 0.05)
            for rows in (RZ, RY, SUM):
                assert bound(a, rows) == pytest.approx(bound(b, rows), abs=1e-12)

    def test_c12_zero_corners_coincide(self):
        b = binary_symmetric_region("binning", 0.2, 0.3, 0.0, 0.0)
        r = binary_symmetric_region("rate-splitting-bound", 0.2, 0.3, 0.0, 0.0)
        assert max(v[0] for v in b.region.vertices) == pytest.approx(1 - oracles.h2(0.3), abs=1e-12)
        assert max(v[0] for v in r.region.vertices) == pytest.approx(1 - oracles.h2(0.3), abs=1e-12)

    def test_equal_crossovers_well_formed(self):
        ev = binary_symmetric_region("binning", 0.2, 0.2, 0.1, 0.2)
        assert len(ev.region.vertices) >= 3

    def test_compare_witness(self):
        cmp = compare_binary(0.2, 0.3, 0.03, alpha_grid())
        assert cmp.inner_violation <= 1e-9
        assert cmp.witness == pytest.approx((0.148709, 0.0), abs=1e-6)
        assert "strictly contains" in cmp.verdict()

    def test_alpha_grid(self):
        g = alpha_grid(1e-3)
        assert len(g) == 501 and g[0] == 0.0 and g[-1] == 0.5


class TestIdentities:
    def test_superposition(self, rng):
        for _ in range(10):
            rep = check_superposition_identity(random_channel(rng), random_noncausal(rng))
            assert rep.passed and rep.max_deviation <= 1e-9

    def test_copy_scheme(self, rng):
        ch = random_channel(rng)
        aux = AuxScheme.noncausal(kernel(rng, (2, 2)), np.broadcast_to(np.eye(2), (2, 2, 2)))
        p = assemble_joint(ch, aux)
        assert mutual_information(p, "X", "Y", ["U", "S"]) == 0.0
        assert check_superposition_identity(ch, aux).passed

    def test_superposition_by_entropies(self, rng):
        ch, aux = random_channel(rng), random_noncausal(rng)
        p = assemble_joint(ch, aux)
        names = list(p.names)
        lhs = (oracles.H(p.mass, names, ["U", "S"]) + oracles.H(p.mass, names, ["Y", "S"])
               - oracles.H(p.mass, names, ["U", "Y", "S"]) - oracles.H(p.mass, names, ["S"])
               + oracles.H(p.mass, names, ["X", "U", "S"]) + oracles.H(p.mass, names, ["Y", "U", "S"])
               - oracles.H(p.mass, names, ["X", "Y", "U", "S"]) - oracles.H(p.mass, names, ["U", "S"]))
        rep = check_superposition_identity(ch, aux)
        assert rep.rhs["I(U;Y|S)+I(X;Y|U,S)"] == pytest.approx(lhs, abs=1e-12)
        ixy_s = (oracles.H(p.mass, names, ["X", "S"]) + oracles.H(p.mass, names, ["Y", "S"])
                 - oracles.H(p.mass, names, ["X", "Y", "S"]) - oracles.H(p.mass, names, ["S"]))
        assert rep.lhs["I(X;Y|S)"] == pytest.approx(ixy_s, abs=1e-12)

    def test_merged_auxiliary_mapping(self, rng):
        ch, aux = random_channel(rng), random_rate_limited(rng)
        merged = merge_rate_limited(aux)
        assert merged.form == "noncausal" and merged.sizes["U"] == 4
        p, q = assemble_joint(ch, aux), assemble_joint(ch, merged)
        np.testing.assert_allclose(q.marginal_array(["S", "X", "Y", "Z"]),
                                   p.marginal_array(["S", "X", "Y", "Z"]), atol=1e-14)
        assert mutual_information(q, "U", "Z") == pytest.approx(mutual_information(p, ["U", "Sd"], "Z"), abs=1e-12)

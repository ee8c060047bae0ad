"""Property-based checks across modules."""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

import oracles
from conftest import random_channel, random_noncausal, random_rate_limited
from coopbc.channel import AuxScheme, BinarySymmetricBC, assemble_joint, to_channel_spec
from coopbc.equivalence import construct_ustar
from coopbc.polyhedra import HalfspaceSystem, contains, convex_union, fourier_motzkin, point_region
from coopbc.prob import JointPmf, binary_convolve, entropy, mutual_information
from coopbc.regions import evaluate_region, merge_rate_limited
from coopbc.sim.typicality import TypicalityTest

seeds = st.integers(0, 2 ** 32 - 1)
probs = st.floats(0.0, 1.0, allow_nan=False)


def random_joint(seed, names, sizes):
    rng = np.random.default_rng(seed)
    m = rng.dirichlet(np.full(int(np.prod(sizes)), 0.7)).reshape(sizes)
    return JointPmf.from_array(names, m)


@given(seeds)
def test_chain_rule(seed):
    p = random_joint(seed, ["A", "B", "C"], (2, 3, 2))
    lhs = mutual_information(p, "A", ["B", "C"])
    rhs = mutual_information(p, "A", "B") + mutual_information(p, "A", "C", "B")
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(seeds)
def test_symmetry_and_oracle(seed):
    p = random_joint(seed, ["A", "B", "C"], (2, 2, 3))
    a = mutual_information(p, "A", "B", "C")
    assert a == pytest.approx(mutual_information(p, "B", "A", "C"), abs=1e-12)
    assert a == pytest.approx(oracles.I(p.mass, list(p.names), ["A"], ["B"], ["C"]), abs=1e-9)
    assert a >= 0.0


@given(seeds)
def test_csiszar_sum_identity(seed):
    names = ["Y1", "Y2", "Y3", "Z1", "Z2", "Z3"]
    p = random_joint(seed, names, (2,) * 6)
    lhs = mutual_information(p, ["Y2", "Y3"], "Z1") + mutual_information(p, "Y3", "Z2", "Z1")
    rhs = mutual_information(p, "Z1", "Y2", "Y3") + mutual_information(p, ["Z1", "Z2"], "Y3")
    assert lhs == pytest.approx(rhs, abs=1e-9)


@given(seeds, st.permutations(range(3)))
def test_entropy_permutation_invariant(seed, perm):
    p = random_joint(seed, ["A", "B", "C"], (2, 3, 2))
    names = [p.names[i] for i in perm]
    q = JointPmf.from_array(names, np.transpose(p.mass, perm))
    assert entropy(q) == pytest.approx(entropy(p), abs=1e-12)


@given(probs, probs, probs)
def test_convolve_algebra(a, b, c):
    assert binary_convolve(a, b) == pytest.approx(binary_convolve(b, a), abs=1e-15)
    assert binary_convolve(binary_convolve(a, b), c) == pytest.approx(
        binary_convolve(a, binary_convolve(b, c)), abs=1e-12)
    assert binary_convolve(a, b) == pytest.approx(oracles.conv(a, b), abs=1e-15)


small = st.integers(-3, 3)


@given(st.lists(st.tuples(small, small, small, st.integers(-4, 6)), min_size=1, max_size=6),
       st.integers(-4, 4), st.integers(-4, 4))
def test_fourier_motzkin_exact(rows, a, b):
    """A point is in the projection exactly when some w completes it."""
    sys = HalfspaceSystem.build(("a", "b", "w"), [({"a": ca, "b": cb, "w": cw}, "<=", r)
                                                  for ca, cb, cw, r in rows])
    proj = fourier_motzkin(sys, "w")
    in_proj = all(sum(c * v for c, v in zip(row[:-1], (a, b))) <= row[-1] for row in proj.bind({}))
    lo, hi, ok = None, None, True
    for ca, cb, cw, r in rows:
        slack = Fraction(r - ca * a - cb * b)
        if cw == 0:
            ok &= slack >= 0
        elif cw > 0:
            hi = slack / cw if hi is None else min(hi, slack / cw)
        else:
            lo = slack / cw if lo is None else max(lo, slack / cw)
    extends = ok and (lo is None or hi is None or lo <= hi)
    assert in_proj == extends


@given(seeds, st.floats(0.0, 0.3), st.floats(0.0, 0.3))
def test_region_monotone_in_c12(seed, c_lo, dc):
    rng = np.random.default_rng(seed)
    ch, aux = random_channel(rng), random_noncausal(rng)
    lo = evaluate_region("thm1", ch, aux, c_lo)
    hi = evaluate_region("thm1", ch, aux, c_lo + dc)
    assert contains(hi.region, lo.region, tol=1e-9).holds
    assert contains(hi.region, hi.region).holds


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=8),
       st.lists(st.tuples(st.floats(0, 1), st.floats(0, 1)), min_size=1, max_size=8))
def test_union_contains_members(p1, p2):
    a, b = point_region(p1), point_region(p2)
    u = convex_union([a, b])
    assert contains(u, a, tol=1e-9).holds and contains(u, b, tol=1e-9).holds


@given(seeds)
def test_rate_limited_merge(seed):
    rng = np.random.default_rng(seed)
    ch, aux = random_channel(rng), random_rate_limited(rng)
    p, q = assemble_joint(ch, aux), assemble_joint(ch, merge_rate_limited(aux))
    np.testing.assert_allclose(q.marginal_array(["S", "X", "Y", "Z"]), p.marginal_array(["S", "X", "Y", "Z"]),
                               atol=1e-13)
    assert mutual_information(q, "U", "S") == pytest.approx(mutual_information(p, ["U", "Sd"], "S"), abs=1e-9)


@given(seeds, st.floats(0.0, 1.0))
def test_mixture_identities(seed, frac):
    rng = np.random.default_rng(seed)
    ch = to_channel_spec(BinarySymmetricBC(0.1, 0.25))
    base = AuxScheme.stateless(rng.dirichlet(np.ones(6)).reshape(3, 2))
    p = assemble_joint(ch, base)
    full = mutual_information(p, "X", "Y", "U")
    assume(full > 1e-6)
    mix = construct_ustar(ch, base, frac * full)
    q = assemble_joint(ch, mix.scheme)
    assert mutual_information(q, "X", "Y", "U") == pytest.approx(mix.lam * full, abs=1e-9)
    assert mutual_information(q, "X", "Z", "U") == pytest.approx(
        mix.lam * mutual_information(p, "X", "Z", "U"), abs=1e-9)
    assert mutual_information(q, "U", "Z") >= mutual_information(p, "U", "Z") - 1e-9


@given(seeds, st.integers(1, 12))
def test_typicality_permutation_invariant(seed, n):
    rng = np.random.default_rng(seed)
    pmf = rng.dirichlet(np.ones(4)).reshape(2, 2)
    test = TypicalityTest(pmf, 0.5)
    a, b = rng.integers(0, 2, (2, n))
    perm = rng.permutation(n)
    assert test.one(a, b) == test.one(a[perm], b[perm])


def test_typicality_brute_force():
    pmf = np.array([[0.5, 0.25], [0.0, 0.25]])
    test = TypicalityTest(pmf, 0.5)
    for a in itertools.product((0, 1), repeat=4):
        for b in itertools.product((0, 1), repeat=4):
            counts = np.zeros((2, 2))
            for x, y in zip(a, b):
                counts[x, y] += 1
            want = bool(np.all(np.abs(counts / 4 - pmf) <= 0.5 * pmf + 1e-12))
            assert test.one(np.array(a), np.array(b)) == want

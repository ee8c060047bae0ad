import numpy as np
import pytest

import oracles
from coopbc.channel import ChannelSpec, assemble_joint
from coopbc.errors import DomainError
from coopbc.optimize import SearchConfig, support_value, trace_frontier
from coopbc.polyhedra import contains
from coopbc.regions import evaluate_region

SMALL = SearchConfig(aux_cardinalities={"U": 2}, grid_resolution=4, random_restarts=1, refine_iters=15,
                     directions=9)


def noiseless():
    return ChannelSpec.from_arrays([1.0], [np.eye(2)], np.eye(2))


def test_point_to_point_capacity():
    val, scheme = support_value("thm1", noiseless(), 0.0, (0.0, 1.0), SMALL)
    assert val == pytest.approx(1.0, abs=1e-6)
    px = assemble_joint(noiseless(), scheme).marginal_array("X")
    np.testing.assert_allclose(px, [0.5, 0.5], atol=1e-3)


def test_bsc_weak_corner(bsc_channel):
    val, _ = support_value("thm1", bsc_channel, 0.0, (1.0, 0.0), SMALL)
    assert val >= 1 - oracles.h2(0.3) - 1e-9


def test_sum_rate_ceiling():
    rng = np.random.default_rng(7)
    W = rng.dirichlet(np.ones(2), size=(2, 2))
    ch = ChannelSpec.from_arrays([0.4, 0.6], W, [[0.9, 0.1], [0.2, 0.8]])
    val, _ = support_value("thm1", ch, 0.2, (1.0, 1.0), SMALL)
    # ceiling: max over P(x|s) of I(X;Y|S) on a fine grid, per state separately
    best = 0.0
    grid = np.linspace(0, 1, 401)
    for s, ps in enumerate((0.4, 0.6)):
        vals = []
        for a in grid:
            py = (1 - a) * W[s, 0] + a * W[s, 1]
            vals.append(oracles.h2(py[1]) - (1 - a) * oracles.h2(W[s, 0, 1]) - a * oracles.h2(W[s, 1, 1]))
        best += ps * max(vals)
    assert val <= best + 1e-6


def test_frontier_witnesses(bsc_channel):
    res = trace_frontier("thm1", bsc_channel, 0.03, SMALL)
    assert res.evaluations > 0
    for v, scheme in res.vertex_schemes.items():
        ev = evaluate_region("thm1", bsc_channel, scheme, 0.03)
        assert max(a1 * v[0] + a2 * v[1] - b for a1, a2, b in ev.region.halfspaces) <= 1e-6


def test_monotone_in_cooperation(bsc_channel):
    lo = trace_frontier("thm1", bsc_channel, 0.0, SMALL)
    hi = trace_frontier("thm1", bsc_channel, 0.1, SMALL)
    assert contains(hi.region, lo.region, tol=1e-6).holds


def test_degenerate_channel():
    ch = ChannelSpec.from_arrays([1.0], [[[0.5, 0.5], [0.5, 0.5]]], np.eye(2))
    res = trace_frontier("thm1", ch, 0.0, SMALL)
    assert res.region.vertices
    assert max(abs(c) for v in res.region.vertices for c in v) <= 1e-12


def test_more_effort_inner_approximation(bsc_channel):
    small = trace_frontier("thm1", bsc_channel, 0.05, SMALL)
    bigger = SearchConfig(aux_cardinalities={"U": 2}, grid_resolution=6, random_restarts=2,
                          refine_iters=25, directions=9)
    large = trace_frontier("thm1", bsc_channel, 0.05, bigger)
    assert contains(large.region, small.region, tol=1e-6).holds


def test_deterministic(bsc_channel):
    a = support_value("thm1", bsc_channel, 0.03, (0.6, 0.8), SMALL)
    b = support_value("thm1", bsc_channel, 0.03, (0.6, 0.8), SMALL)
    assert a[0] == b[0]


def test_config_validation():
    with pytest.raises(DomainError):
        SearchConfig(grid_resolution=1)
    with pytest.raises(DomainError):
        SearchConfig(aux_cardinalities={"U": 0})
    dirs = SearchConfig().direction_list()
    assert len(dirs) == 33 and dirs[0] == (1.0, 0.0) and dirs[-1] == (0.0, 1.0)


def test_rate_limited_search_runs():
    rng = np.random.default_rng(3)
    ch = ChannelSpec.from_arrays([0.5, 0.5], rng.dirichlet(np.ones(2), size=(2, 2)), [[0.9, 0.1], [0.1, 0.9]])
    cfg = SearchConfig(aux_cardinalities={"U": 2, "Sd": 2}, grid_resolution=2, random_restarts=1,
                       refine_iters=5, directions=3)
    res = trace_frontier("thm3", ch, 0.5, cfg)
    assert not res.region.is_empty

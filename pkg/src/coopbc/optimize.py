"""Inner approximations of theorem regions by search over auxiliary schemes.

The search is heuristic: a coarse simplex grid seeds a local refinement
(multiplicative perturbation of one probability block at a time, with a
shrinking step) along each support direction.  Every scheme that is
evaluated contributes its full polygon to a convex hull, so the result is
always an achievable inner approximation.
"""

from __future__ import annotations

import itertools
import math
import sys
from dataclasses import dataclass, field
from math import comb
from typing import Callable, Mapping

import numpy as np

from .channel import AuxScheme, ChannelSpec
from .errors import DomainError
from .polyhedra import RateRegion2D, hull_2d, point_region
from .regions import FORM_OF_KIND, RegionKind, evaluate_region

MAX_BLOCK_GRID = 512


@dataclass(frozen=True)
class SearchConfig:
    aux_cardinalities: Mapping[str, int] = field(default_factory=dict)
    grid_resolution: int = 8
    random_restarts: int = 2
    refine_iters: int = 40
    seed: int = 0
    directions: int = 33
    max_grid_seeds: int = 256

    def __post_init__(self):
        if self.grid_resolution < 2:
            raise DomainError("grid_resolution must be at least 2")
        if any(int(v) < 1 for v in self.aux_cardinalities.values()):
            raise DomainError("auxiliary cardinalities must be at least 1")
        if self.directions < 1 or self.random_restarts < 0 or self.refine_iters < 0:
            raise DomainError("directions >= 1, restarts >= 0 and refine_iters >= 0 required")

    def cardinalities(self, ch: ChannelSpec) -> dict[str, int]:
        s, x = ch.sizes["S"], ch.sizes["X"]
        out = {"U": x * s + 2, "V": x + 1, "Sd": s + 1}
        out.update({k: int(v) for k, v in self.aux_cardinalities.items()})
        return out

    def direction_list(self) -> list[tuple[float, float]]:
        if self.directions == 1:
            return [(math.cos(math.pi / 4), math.sin(math.pi / 4))]
        angles = np.linspace(0.0, math.pi / 2, self.directions)
        # exact axis directions so that single-rate corners are hit cleanly
        return [(0.0 if abs(math.cos(a)) < 1e-15 else float(math.cos(a)),
                 0.0 if abs(math.sin(a)) < 1e-15 else float(math.sin(a))) for a in angles]


@dataclass(frozen=True)
class FrontierResult:
    region: RateRegion2D
    best_schemes: dict
    evaluations: int
    vertex_schemes: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict)


class _Space:
    """Probability blocks (plus an optional discrete map) that define a scheme."""

    def __init__(self, kind: RegionKind, ch: ChannelSpec, card: Mapping[str, int]):
        self.form = FORM_OF_KIND[kind]
        s, x = ch.sizes["S"], ch.sizes["X"]
        u = card["U"]
        self.s, self.x, self.u = s, x, u
        if self.form == "noncausal":
            self.blocks = [u] * s + [x] * (s * u)
            self.map_shape = None
        elif self.form == "stateless":
            self.blocks = [u * x]
            self.map_shape = None
        elif self.form == "rate-limited":
            self.sd = card["Sd"]
            self.blocks = [self.sd * u * x] * s
            self.map_shape = None
        else:
            self.v = card["V"]
            self.blocks = [u * self.v]
            self.map_shape = (s, u, self.v)

    def scheme(self, theta) -> AuxScheme:
        blocks, xmap = theta
        if self.form == "noncausal":
            pu = np.array(blocks[:self.s])
            px = np.array(blocks[self.s:]).reshape(self.s, self.u, self.x)
            return AuxScheme.noncausal(pu, px)
        if self.form == "stateless":
            return AuxScheme.stateless(blocks[0].reshape(self.u, self.x))
        if self.form == "rate-limited":
            return AuxScheme.rate_limited(np.array(blocks).reshape(self.s, self.sd, self.u, self.x))
        return AuxScheme.causal(blocks[0].reshape(self.u, self.v), xmap)

    def random(self, rng: np.random.Generator):
        blocks = [rng.dirichlet(np.ones(k)) for k in self.blocks]
        xmap = rng.integers(0, self.x, size=self.map_shape) if self.map_shape else None
        return blocks, xmap

    def block_grid(self, k: int, r: int, rng) -> list[np.ndarray]:
        if comb(r + k - 1, k - 1) <= MAX_BLOCK_GRID:
            pts = []
            for bars in itertools.combinations(range(r + k - 1), k - 1):
                edges = (-1,) + bars + (r + k - 1,)
                pts.append(np.array([edges[i + 1] - edges[i] - 1 for i in range(k)], float) / r)
            return pts
        return [rng.multinomial(r, np.ones(k) / k) / r for _ in range(MAX_BLOCK_GRID)]

    def grid(self, cfg: SearchConfig, rng):
        per_block = [self.block_grid(k, cfg.grid_resolution, rng) for k in self.blocks]
        total = math.prod(len(g) for g in per_block)
        if total <= cfg.max_grid_seeds:
            combos = itertools.product(*[range(len(g)) for g in per_block])
        else:
            combos = (tuple(int(rng.integers(len(g))) for g in per_block)
                      for _ in range(cfg.max_grid_seeds))
        out = []
        for c in combos:
            blocks = [per_block[i][j] for i, j in enumerate(c)]
            xmap = rng.integers(0, self.x, size=self.map_shape) if self.map_shape else None
            out.append((blocks, xmap))
        if self.map_shape:
            # deterministic maps ignoring (u, v) only through s are common optima; seed x = u mod |X|
            base = np.indices(self.map_shape)[1] % self.x
            out.append(([np.ones(k) / k for k in self.blocks], base))
        return out

    def perturb(self, theta, step: float, it: int, rng):
        blocks, xmap = theta
        nb = len(blocks) + (1 if self.map_shape else 0)
        b = it % nb
        blocks = list(blocks)
        if b < len(blocks):
            p = blocks[b] * np.exp(step * rng.standard_normal(blocks[b].shape))
            # occasionally snap a small coordinate to zero so boundary optima are reachable
            if rng.random() < 0.2:
                p[int(np.argmin(p))] = 0.0
            p = p / p.sum() if p.sum() > 0 else np.ones_like(p) / p.size
            blocks[b] = p
        else:
            xmap = xmap.copy()
            idx = tuple(int(rng.integers(n)) for n in self.map_shape)
            xmap[idx] = int(rng.integers(self.x))
        return blocks, xmap


class _Evaluator:
    def __init__(self, kind, ch, c12, space: _Space):
        self.kind, self.ch, self.c12, self.space = kind, ch, c12, space
        self.count = 0
        self.points: dict[tuple, AuxScheme] = {}

    def __call__(self, theta):
        scheme = self.space.scheme(theta)
        ev = evaluate_region(self.kind, self.ch, scheme, self.c12)
        self.count += 1
        for v in ev.region.vertices:
            self.points.setdefault((float(v[0]), float(v[1])), scheme)
        return ev.region, scheme


def _value(region: RateRegion2D, w) -> float:
    return region.support(w[0], w[1])


def _refine(evaluate, space, start, w, cfg, rng):
    region, scheme = evaluate(start)
    best, best_val, best_scheme = start, _value(region, w), scheme
    step = 0.5
    for it in range(cfg.refine_iters):
        cand = space.perturb(best, step, it, rng)
        region, scheme = evaluate(cand)
        val = _value(region, w)
        if val >= best_val:
            best, best_val, best_scheme = cand, val, scheme
        else:
            step = max(step * 0.93, 1e-3)
    return best, best_val, best_scheme


def _search(kind, ch, c12, cfg: SearchConfig, directions, progress: Callable[[str], None] | None):
    kind = RegionKind.parse(kind)
    space = _Space(kind, ch, cfg.cardinalities(ch))
    evaluate = _Evaluator(kind, ch, c12, space)
    grid_rng = np.random.default_rng([cfg.seed, 0])
    seeds = []
    for theta in space.grid(cfg, grid_rng):
        region, _ = evaluate(theta)
        seeds.append((theta, region))
    best_schemes, values = {}, {}
    warm = None
    for d, w in enumerate(directions):
        top = max(seeds, key=lambda t: _value(t[1], w))[0]
        starts = [top] + ([warm] if warm is not None else [])
        for r in range(cfg.random_restarts):
            starts.append(space.random(np.random.default_rng([cfg.seed, 1, d, r])))
        best = (None, float("-inf"), None)
        for i, st in enumerate(starts):
            rng = np.random.default_rng([cfg.seed, 2, d, i])
            res = _refine(evaluate, space, st, w, cfg, rng)
            if res[1] > best[1]:
                best = res
        warm = best[0]
        best_schemes[w], values[w] = best[2], best[1]
        if progress:
            progress(f"direction {d + 1}/{len(directions)} w=({w[0]:.4f},{w[1]:.4f}) "
                     f"value={best[1]:.6f} evaluations={evaluate.count}")
    return evaluate, best_schemes, values


def support_value(kind, ch: ChannelSpec, c12: float, direction, cfg: SearchConfig = SearchConfig(),
                  progress=None) -> tuple[float, AuxScheme]:
    """Best weighted rate w_z R_Z + w_y R_Y found (a lower bound on the true support)."""
    w = (float(direction[0]), float(direction[1]))
    if w[0] < 0 or w[1] < 0 or (w[0] == 0 and w[1] == 0):
        raise DomainError(f"direction must be nonnegative and nonzero, got {direction}")
    _, schemes, values = _search(kind, ch, c12, cfg, [w], progress)
    return values[w], schemes[w]


def trace_frontier(kind, ch: ChannelSpec, c12: float, cfg: SearchConfig = SearchConfig(),
                   progress=None) -> FrontierResult:
    """Convex hull of every evaluated scheme's region along cfg.directions."""
    evaluate, schemes, values = _search(kind, ch, c12, cfg, cfg.direction_list(), progress)
    pts = list(evaluate.points)
    if not pts:
        return FrontierResult(point_region([]), schemes, evaluate.count, {}, values)
    hull = hull_2d(pts)
    region = point_region(hull)
    witness = {v: evaluate.points[v] for v in region.vertices}
    return FrontierResult(region, schemes, evaluate.count, witness, values)


def stderr_progress(line: str):
    print(line, file=sys.stderr, flush=True)

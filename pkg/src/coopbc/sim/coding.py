"""Encoder and decoders of the binning schemes (joint-typicality searches)."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..channel import assemble_joint
from ..errors import DomainError
from .codebook import Codebook
from .config import SimConfig
from .typicality import TypicalityTest


class Tests:
    """Typicality tests of one configuration, keyed by the variables involved."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.p = assemble_joint(cfg.ch, cfg.aux)
        self._cache: dict = {}

    def get(self, names: tuple[str, ...], strict: bool) -> TypicalityTest:
        key = (names, strict)
        if key not in self._cache:
            eps = self.cfg.eps if strict else self.cfg.eps_prime
            self._cache[key] = TypicalityTest(self.p.marginal_array(names), eps)
        return self._cache[key]


class StateEncoding(NamedTuple):
    l: int
    t: int
    failed: bool


class Encoding(NamedTuple):
    x: np.ndarray
    j: int
    k: int
    e_u: bool  # no typical cloud center in the bin
    e_x: bool  # no typical satellite codeword


class DecodeY(NamedTuple):
    m_z: int | None
    m_y: int | None
    matches: frozenset  # distinct (m_z, m_y) pairs with a typical candidate


class DecodeZ(NamedTuple):
    m_z: int | None
    matches: frozenset
    l: int | None = None
    sd_matches: frozenset = frozenset()


def _first(mask: np.ndarray) -> int | None:
    hits = np.flatnonzero(mask)
    return int(hits[0]) if hits.size else None


def state_encode(cfg: SimConfig, cb: Codebook, s: np.ndarray, tests: Tests | None = None) -> StateEncoding:
    """Smallest l with (sd(l), s) typical; index 0 when none is."""
    tests = tests or Tests(cfg)
    ok = tests.get(("Sd", "S"), strict=False)([cb.sd, s[None]])
    l = _first(ok)
    failed = l is None
    l = 0 if failed else l
    return StateEncoding(l, l // cb.sd_per_bin, failed)


def split_message(cfg: SimConfig, m_z: int, m_y: int) -> tuple[int, int]:
    """(cloud-center bin, satellite bin) carrying the message pair."""
    if cfg.scheme == "rate-splitting":
        m1, m2 = divmod(m_z, cfg.m_z2)
        return m1, m_y * cfg.m_z2 + m2
    return m_z, m_y


def join_message(cfg: SimConfig, bin_: int, sat: int) -> tuple[int, int]:
    if cfg.scheme == "rate-splitting":
        m_y, m2 = divmod(sat, cfg.m_z2)
        return bin_ * cfg.m_z2 + m2, m_y
    return bin_, sat


def encode(cfg: SimConfig, cb: Codebook, m_z: int, m_y: int, s: np.ndarray,
           sd_index: int | None = None, tests: Tests | None = None) -> Encoding:
    """Two-stage typicality search with smallest-index tie breaking."""
    if not (0 <= m_z < cfg.m_z and 0 <= m_y < cfg.m_y):
        raise DomainError(f"message pair ({m_z}, {m_y}) outside [0, {cfg.m_z}) x [0, {cfg.m_y})")
    tests = tests or Tests(cfg)
    b, sat = split_message(cfg, m_z, m_y)
    u_cands = cb.u[b]
    if cfg.scheme == "rate-limited-state":
        sd = cb.sd[sd_index][None]
        ok_u = tests.get(("U", "S", "Sd"), False)([u_cands, s[None], sd])
    else:
        ok_u = tests.get(("U", "S"), False)([u_cands, s[None]])
    j = _first(ok_u)
    e_u = j is None
    j = 0 if e_u else j
    x_cands = cb.x[b, j, sat]
    u = cb.u[b, j][None]
    if cfg.scheme == "rate-limited-state":
        ok_x = tests.get(("X", "U", "S", "Sd"), False)([x_cands, u, s[None], sd])
    else:
        ok_x = tests.get(("X", "U", "S"), False)([x_cands, u, s[None]])
    k = _first(ok_x)
    e_x = k is None
    k = 0 if e_x else k
    return Encoding(cb.x[b, j, sat, k], j, k, e_u, e_x)


def transmit(cfg: SimConfig, x: np.ndarray, s: np.ndarray, rng: np.random.Generator):
    """Memoryless channel: y ~ P(y|x,s) letter by letter, then z ~ P(z|y)."""
    W = cfg.ch.forward.kernel
    D = cfg.ch.degrade.kernel
    cw = np.cumsum(W[s, x], axis=1)
    y = (rng.random(len(x))[:, None] >= cw[:, :-1]).sum(axis=1)
    cd = np.cumsum(D[y], axis=1)
    z = (rng.random(len(x))[:, None] >= cd[:, :-1]).sum(axis=1)
    return y.astype(np.int8), z.astype(np.int8)


def _y_candidates_ok(cfg, cb, y, s, sd, tests) -> np.ndarray:
    """Boolean array over (bin, j, satellite, k)."""
    B, J, SAT, K, n = cb.x.shape
    xs = cb.x.reshape(-1, n)
    us = np.broadcast_to(cb.u[:, :, None, None, :], cb.x.shape).reshape(-1, n)
    if cfg.scheme == "rate-limited-state":
        ok = tests.get(("U", "X", "Sd", "S", "Y"), True)([us, xs, sd[None], s[None], y[None]])
    else:
        ok = tests.get(("U", "X", "S", "Y"), True)([us, xs, s[None], y[None]])
    return ok.reshape(B, J, SAT, K)


def decode_y(cfg: SimConfig, cb: Codebook, y: np.ndarray, s: np.ndarray,
             sd_index: int | None = None, tests: Tests | None = None,
             ok: np.ndarray | None = None) -> DecodeY:
    """Unique message pair with a typical candidate, else failure (None, None)."""
    tests = tests or Tests(cfg)
    if ok is None:
        sd = cb.sd[sd_index] if sd_index is not None else None
        ok = _y_candidates_ok(cfg, cb, y, s, sd, tests)
    hit = ok.any(axis=(1, 3))
    pairs = frozenset(join_message(cfg, int(b), int(t)) for b, t in zip(*np.nonzero(hit)))
    if len(pairs) != 1:
        return DecodeY(None, None, pairs)
    (mz, my), = pairs
    return DecodeY(mz, my, pairs)


def _z_bins_ok(cfg, cb, z, sd_word, tests, bins) -> np.ndarray:
    """Boolean array over (bin in ``bins``, j)."""
    bins = np.asarray(list(bins), dtype=int)
    if bins.size == 0:
        return np.zeros((0, cb.u.shape[1]), dtype=bool)
    u = cb.u[bins]
    n = u.shape[-1]
    flat = u.reshape(-1, n)
    if sd_word is not None:
        ok = tests.get(("U", "Z", "Sd"), True)([flat, z[None], sd_word[None]])
    else:
        ok = tests.get(("U", "Z"), True)([flat, z[None]])
    return ok.reshape(u.shape[:2])


def decode_z(cfg: SimConfig, cb: Codebook, z: np.ndarray, conference: int,
             tests: Tests | None = None) -> DecodeZ:
    """Weak decoder.

    ``conference`` is the superbin index (triple binning), the split part
    ``m_Z2`` (rate splitting) or the state-description bin ``t``
    (rate-limited state).
    """
    tests = tests or Tests(cfg)
    if cfg.scheme == "triple-binning":
        if not 0 <= conference < cb.superbins:
            return DecodeZ(None, frozenset())
        members = cb.superbin_members(conference)
        ok = _z_bins_ok(cfg, cb, z, None, tests, members)
        found = frozenset(members[i] for i in np.flatnonzero(ok.any(axis=1)))
        return DecodeZ(next(iter(found)) if len(found) == 1 else None, found)
    if cfg.scheme == "rate-splitting":
        ok = _z_bins_ok(cfg, cb, z, None, tests, range(cb.n_bins))
        found = frozenset(int(i) for i in np.flatnonzero(ok.any(axis=1)))
        if len(found) != 1 or not 0 <= conference < cfg.m_z2:
            return DecodeZ(None, frozenset(m * cfg.m_z2 + conference for m in found))
        m1 = next(iter(found))
        return DecodeZ(m1 * cfg.m_z2 + conference, frozenset({m1 * cfg.m_z2 + conference}))
    # rate-limited: recover the state description inside bin t, then the message
    members = cb.sd_bin_members(conference)
    ok_sd = tests.get(("Sd", "Z"), True)([cb.sd[members.start:members.stop], z[None]])
    sd_found = frozenset(members.start + int(i) for i in np.flatnonzero(ok_sd))
    if len(sd_found) != 1:
        return DecodeZ(None, frozenset(), None, sd_found)
    l = next(iter(sd_found))
    ok = _z_bins_ok(cfg, cb, z, cb.sd[l], tests, range(cb.n_bins))
    found = frozenset(int(i) for i in np.flatnonzero(ok.any(axis=1)))
    return DecodeZ(next(iter(found)) if len(found) == 1 else None, found, l, sd_found)

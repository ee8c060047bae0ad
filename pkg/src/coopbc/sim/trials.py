"""Monte Carlo episodes with error-event classification."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .codebook import Codebook, build_codebook
from .coding import (
    Tests,
    _y_candidates_ok,
    _z_bins_ok,
    decode_y,
    decode_z,
    encode,
    split_message,
    state_encode,
    transmit,
)
from .config import SimConfig

EVENTS = {
    "triple-binning": tuple(f"E{i}" for i in range(1, 9)),
    "rate-splitting": tuple(f"E{i}" for i in range(1, 9)),
    "rate-limited-state": tuple(f"E{i}" for i in range(1, 12)),
}
CSV_HEADER = ["scheme", "n", "trial_count", "event", "count", "rate"]


@dataclass
class TrialReport:
    scheme: str
    n: int
    trials: int = 0
    events: dict = field(default_factory=dict)
    errors: int = 0
    y_errors: int = 0
    z_errors: int = 0

    def rate(self, count: int) -> float:
        return count / self.trials if self.trials else 0.0

    @property
    def error_rate(self) -> float:
        return self.rate(self.errors)

    @property
    def y_error_rate(self) -> float:
        return self.rate(self.y_errors)

    @property
    def z_error_rate(self) -> float:
        return self.rate(self.z_errors)

    @property
    def y_accuracy(self) -> float:
        return 1.0 - self.y_error_rate

    @property
    def z_accuracy(self) -> float:
        return 1.0 - self.z_error_rate

    def rows(self) -> list[list]:
        out = [[self.scheme, self.n, self.trials, e, c, self.rate(c)] for e, c in self.events.items()]
        out.append([self.scheme, self.n, self.trials, "decoder_y", self.y_errors, self.y_error_rate])
        out.append([self.scheme, self.n, self.trials, "decoder_z", self.z_errors, self.z_error_rate])
        out.append([self.scheme, self.n, self.trials, "overall", self.errors, self.error_rate])
        return out

    def write_csv(self, path, append: bool = False):
        with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            if not append:
                w.writerow(CSV_HEADER)
            w.writerows(self.rows())

    def summary_lines(self) -> list[str]:
        return [f"{r[3]:>9}: {r[4]:6d} / {r[2]}  ({r[5]:.4f})" for r in self.rows()]


def _trial(cfg: SimConfig, cb: Codebook, tests: Tests, rng: np.random.Generator) -> dict:
    p_s = cfg.ch.state_pmf.mass
    s = rng.choice(p_s.size, size=cfg.n, p=p_s).astype(np.int8)
    m_z = int(rng.integers(cfg.m_z))
    m_y = int(rng.integers(cfg.m_y))
    b, sat = split_message(cfg, m_z, m_y)
    ev: dict[str, bool] = {}
    rl = cfg.scheme == "rate-limited-state"
    off = 1 if rl else 0
    sd_index = None
    if rl:
        st = state_encode(cfg, cb, s, tests)
        ev["E1"] = st.failed
        sd_index = st.l
    enc = encode(cfg, cb, m_z, m_y, s, sd_index, tests)
    ev[f"E{1 + off}"], ev[f"E{2 + off}"] = enc.e_u, enc.e_x
    y, z = transmit(cfg, enc.x, s, rng)

    sd_word = cb.sd[sd_index] if rl else None
    ok = _y_candidates_ok(cfg, cb, y, s, sd_word, tests)
    dy = decode_y(cfg, cb, y, s, sd_index, tests, ok=ok)
    ev[f"E{3 + off}"] = not ok[b, :, sat, :].any()
    ev[f"E{4 + off}"] = any(mz == m_z and my != m_y for mz, my in dy.matches)
    ev[f"E{5 + off}"] = any(mz != m_z and my != m_y for mz, my in dy.matches)
    ev[f"E{6 + off}"] = any(mz != m_z and my == m_y for mz, my in dy.matches)
    y_ok = dy.m_z == m_z and dy.m_y == m_y

    if cfg.scheme == "triple-binning":
        conference = cb.superbin_of(dy.m_z) if dy.m_z is not None else 0
        members = cb.superbin_members(cb.superbin_of(b))
        zok = _z_bins_ok(cfg, cb, z, None, tests, members).any(axis=1)
        ev["E7"] = not zok[b - members.start]
        ev["E8"] = any(zok[i] for i in range(len(members)) if members[i] != b)
    elif cfg.scheme == "rate-splitting":
        conference = dy.m_z % cfg.m_z2 if dy.m_z is not None else 0
        zok = _z_bins_ok(cfg, cb, z, None, tests, range(cb.n_bins)).any(axis=1)
        ev["E7"] = not zok[b]
        ev["E8"] = bool(zok.any() and (zok.sum() > 1 or not zok[b]))
    else:
        conference = sd_index // cb.sd_per_bin
        members = cb.sd_bin_members(conference)
        ok_sd = tests.get(("Sd", "Z"), True)([cb.sd[members.start:members.stop], z[None]])
        ev["E8"] = not ok_sd[sd_index - members.start]
        ev["E9"] = any(ok_sd[i] for i in range(len(members)) if members[i] != sd_index)
        zok = _z_bins_ok(cfg, cb, z, sd_word, tests, range(cb.n_bins)).any(axis=1)
        ev["E10"] = not zok[b]
        ev["E11"] = bool(zok.any() and (zok.sum() > 1 or not zok[b]))
    dz = decode_z(cfg, cb, z, conference, tests)
    z_ok = dz.m_z == m_z
    return {"events": ev, "y_ok": y_ok, "z_ok": z_ok}


def run_trials(cfg: SimConfig) -> TrialReport:
    """``cfg.trials`` independent episodes; deterministic given ``cfg.seed``.

    Streams: the shared codebook uses seed ``[seed, 0]`` (or ``[seed, 0, t]``
    per trial when ``resample_codebook``), trial ``t`` uses ``[seed, 1, t]``.
    """
    tests = Tests(cfg)
    rep = TrialReport(cfg.scheme, cfg.n, 0, {e: 0 for e in EVENTS[cfg.scheme]})
    cb = None if cfg.resample_codebook else build_codebook(cfg)
    for t in range(cfg.trials):
        book = cb if cb is not None else build_codebook(cfg, np.random.default_rng([cfg.seed, 0, t]))
        out = _trial(cfg, book, tests, np.random.default_rng([cfg.seed, 1, t]))
        rep.trials += 1
        for e, hit in out["events"].items():
            rep.events[e] += int(hit)
        rep.y_errors += int(not out["y_ok"])
        rep.z_errors += int(not out["z_ok"])
        rep.errors += int(not (out["y_ok"] and out["z_ok"]))
    return rep

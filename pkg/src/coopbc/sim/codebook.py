"""Random codebooks for the binning schemes.

Indices are 0-based throughout.  ``u[m, j]`` is a cloud center in message
bin ``m``; ``x[m, j, b, k]`` is codeword ``k`` of satellite bin ``b`` under
that center.  For triple binning ``b = m_Y``; for rate splitting
``b = m_Y * M_Z2 + m_Z2`` and ``m`` is the first part ``m_Z1`` of the weak
message.  The rate-limited scheme adds state-description words ``sd[l]``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..channel import assemble_joint
from ..errors import CapacityBudgetError, DomainError
from .config import SimConfig, word_count


@dataclass(frozen=True)
class Codebook:
    u: np.ndarray
    x: np.ndarray
    sd: np.ndarray | None
    bins_per_superbin: int
    superbins: int
    sd_per_bin: int = 1

    @property
    def n_bins(self) -> int:
        return self.u.shape[0]

    def superbin_of(self, m: int) -> int:
        return m // self.bins_per_superbin

    def superbin_members(self, l: int) -> range:
        lo = l * self.bins_per_superbin
        return range(lo, min(lo + self.bins_per_superbin, self.n_bins))

    def sd_bin_members(self, t: int) -> range:
        lo = t * self.sd_per_bin
        return range(lo, min(lo + self.sd_per_bin, self.sd.shape[0]))


def _sample(rng: np.random.Generator, p: np.ndarray, shape) -> np.ndarray:
    return rng.choice(p.size, size=shape, p=p).astype(np.int8)


def codebook_layout(cfg: SimConfig) -> dict[str, int]:
    n = cfg.n
    out = {
        "bins": cfg.m_z1 if cfg.scheme == "rate-splitting" else cfg.m_z,
        "u_per_bin": word_count(n, cfg.rt_z),
        "satellites": cfg.m_y * cfg.m_z2,
        "x_per_satellite": word_count(n, cfg.rt_y),
        "sd_words": word_count(n, cfg.rt_12) if cfg.scheme == "rate-limited-state" else 0,
    }
    if cfg.scheme == "triple-binning":
        per = word_count(n, cfg.r_z - cfg.c12) if cfg.r_z > cfg.c12 else 1
        out["bins_per_superbin"] = per
        out["superbins"] = -(-out["bins"] // per)
        if out["superbins"] > cfg.link_size:
            raise DomainError(f"{out['superbins']} superbins do not fit a link of size {cfg.link_size}")
    else:
        out["bins_per_superbin"], out["superbins"] = out["bins"], 1
    if cfg.scheme == "rate-splitting" and cfg.m_z2 > cfg.link_size:
        raise DomainError(f"split part needs {cfg.m_z2} link values, link carries {cfg.link_size}")
    if cfg.scheme == "rate-limited-state":
        t = cfg.link_size
        out["sd_per_bin"] = -(-out["sd_words"] // t)
    return out


def check_budget(cfg: SimConfig, lay: dict[str, int]):
    u_words = lay["bins"] * lay["u_per_bin"]
    x_words = u_words * lay["satellites"] * lay["x_per_satellite"]
    total = cfg.n * (u_words + x_words + lay["sd_words"])
    if total > cfg.budget:
        counts = {"u-words": u_words, "x-words": x_words, "sd-words": lay["sd_words"]}
        worst = max(counts, key=counts.get)
        raise CapacityBudgetError(
            f"codebook needs {total} symbols (> budget {cfg.budget}); largest count: "
            f"{worst} = {counts[worst]}")


def build_codebook(cfg: SimConfig, rng: np.random.Generator | None = None) -> Codebook:
    lay = codebook_layout(cfg)
    check_budget(cfg, lay)
    if rng is None:
        rng = np.random.default_rng([cfg.seed, 0])
    p = assemble_joint(cfg.ch, cfg.aux)
    n = cfg.n
    pu = p.marginal_array("U")
    pux = p.marginal_array(("U", "X"))
    with np.errstate(invalid="ignore", divide="ignore"):
        px_u = np.where(pu[:, None] > 0, pux / np.where(pu > 0, pu, 1.0)[:, None], 1.0 / pux.shape[1])
    u = _sample(rng, pu, (lay["bins"], lay["u_per_bin"], n))
    xshape = (lay["bins"], lay["u_per_bin"], lay["satellites"], lay["x_per_satellite"], n)
    # inverse-cdf draw of x given the owning u letter
    cdf = np.cumsum(px_u, axis=1)
    draws = rng.random(xshape)
    ucol = np.broadcast_to(u[:, :, None, None, :], xshape)
    x = (draws[..., None] >= cdf[ucol][..., :-1]).sum(axis=-1).astype(np.int8)
    sd = None
    if cfg.scheme == "rate-limited-state":
        sd = _sample(rng, p.marginal_array("Sd"), (lay["sd_words"], n))
    return Codebook(u, x, sd, lay["bins_per_superbin"], lay["superbins"], lay.get("sd_per_bin", 1))

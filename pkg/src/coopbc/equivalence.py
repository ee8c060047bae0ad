"""Mixture auxiliaries that move stateless rate pairs into the min-form region.

For a stateless scheme (U, X) and a rate pair with R_y = I(X;Y|U) - gamma,
the auxiliary U* equals U with probability lam and X otherwise.  It lives on
the tagged alphabet ``[("U", u) ...] + [("X", x) ...]`` so that conditioning
on U* also reveals which branch was taken.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import AuxScheme, ChannelSpec, assemble_joint
from .errors import DegenerateBaseError, DomainError, InvalidSchemeError
from .prob import IDENTITY_TOL, verify_markov
from .regions import mi_term

GAMMA_SLACK = 1e-12


@dataclass(frozen=True)
class MixtureScheme:
    base: AuxScheme
    lam: float
    ustar_alphabet: tuple[tuple[str, int], ...]
    scheme: AuxScheme


def mixture_joint(base: AuxScheme, lam: float) -> np.ndarray:
    """P(u*, x) on the tagged alphabet."""
    if not 0.0 <= lam <= 1.0:
        raise DomainError(f"lambda must lie in [0, 1], got {lam}")
    p_ux = np.asarray(base.components["p_ux"])
    p_x = p_ux.sum(axis=0)
    return np.vstack([lam * p_ux, (1.0 - lam) * np.diag(p_x)])


def mixture_from_lambda(base: AuxScheme, lam: float) -> MixtureScheme:
    if base.form != "stateless":
        raise InvalidSchemeError("the mixture construction needs a stateless scheme")
    nu, nx = base.components["p_ux"].shape
    tags = tuple(("U", u) for u in range(nu)) + tuple(("X", x) for x in range(nx))
    return MixtureScheme(base, float(lam), tags, AuxScheme.stateless(mixture_joint(base, lam)))


def construct_ustar(ch: ChannelSpec, base: AuxScheme, gamma: float) -> MixtureScheme:
    """U* with lam = (I(X;Y|U) - gamma) / I(X;Y|U)."""
    if base.form != "stateless":
        raise InvalidSchemeError("the mixture construction needs a stateless scheme")
    i_xy_u = mi_term(assemble_joint(ch, base), "X", "Y", "U")
    if gamma < 0 or gamma > i_xy_u + GAMMA_SLACK:
        raise DomainError(f"gamma={gamma} outside [0, I(X;Y|U)={i_xy_u}]")
    if gamma == 0:
        lam = 1.0
    elif i_xy_u <= 0:
        raise DegenerateBaseError("I(X;Y|U) = 0 leaves no room for gamma > 0")
    else:
        lam = min(max((i_xy_u - gamma) / i_xy_u, 0.0), 1.0)
    return mixture_from_lambda(base, lam)


class SampleResult(NamedTuple):
    sample_id: int
    gamma: float
    lam: float
    slack_ry: float  # |R_y - I(X;Y|U*)|, must vanish
    slack_y: float   # I(U*;Y) - R_z, must be >= 0
    slack_z: float   # I(U*;Z) + C12 - R_z, must be >= 0
    failures: tuple[str, ...]


@dataclass(frozen=True)
class Corollary1Report:
    c12: float
    samples: tuple[SampleResult, ...]
    tol: float

    @property
    def failures(self) -> list[tuple[int, str]]:
        return [(s.sample_id, f) for s in self.samples for f in s.failures]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        lines = [f"mixture check: {len(self.samples)} samples, c12={self.c12}, tol={self.tol:g}"]
        for s in self.samples:
            mark = "ok" if not s.failures else "FAIL " + "; ".join(s.failures)
            lines.append(f"  #{s.sample_id:03d} gamma={s.gamma:.6f} lambda={s.lam:.6f} "
                         f"slack_ry={s.slack_ry:.3e} slack_y={s.slack_y:.6f} slack_z={s.slack_z:.6f} {mark}")
        lines.append(f"failures: {len(self.failures)}")
        return "\n".join(lines)

    def write_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "gamma", "lambda", "slack_ry", "slack_y", "slack_z"])
            for s in self.samples:
                w.writerow([s.sample_id, repr(s.gamma), repr(s.lam), repr(s.slack_ry),
                            repr(s.slack_y), repr(s.slack_z)])


def check_pair(ch: ChannelSpec, base: AuxScheme, c12: float, r_y: float, r_z: float,
               sample_id: int = 0, tol: float = IDENTITY_TOL) -> SampleResult:
    """Build U* for (r_y, r_z) in the three-bound region and test the min-form bounds."""
    p = assemble_joint(ch, base)
    i_xy_u = mi_term(p, "X", "Y", "U")
    i_xz_u = mi_term(p, "X", "Z", "U")
    i_uz = mi_term(p, "U", "Z")
    gamma = max(i_xy_u - r_y, 0.0)
    mix = construct_ustar(ch, base, gamma)
    q = assemble_joint(ch, mix.scheme)
    i_xy_us = mi_term(q, "X", "Y", "U")
    i_xz_us = mi_term(q, "X", "Z", "U")
    i_usy = mi_term(q, "U", "Y")
    i_usz = mi_term(q, "U", "Z")
    fails = []
    slack_ry = abs(r_y - i_xy_us)
    if slack_ry > tol:
        fails.append(f"R_y != I(X;Y|U*) by {slack_ry:.3g}")
    if abs(i_xy_us - mix.lam * i_xy_u) > tol:
        fails.append("I(X;Y|U*) != lam I(X;Y|U)")
    if abs(i_xz_us - mix.lam * i_xz_u) > tol:
        fails.append("I(X;Z|U*) != lam I(X;Z|U)")
    if abs(i_usz - i_uz - (1 - mix.lam) * i_xz_u) > tol:
        fails.append("I(U*;Z) - I(U;Z) != (1 - lam) I(X;Z|U)")
    if i_usz < i_uz - tol:
        fails.append("I(U*;Z) < I(U;Z)")
    slack_y = i_usy - r_z
    if slack_y < -tol:
        fails.append(f"R_z exceeds I(U*;Y) by {-slack_y:.3g}")
    slack_z = i_usz + c12 - r_z
    if slack_z < -tol:
        fails.append(f"R_z exceeds I(U*;Z) + C12 by {-slack_z:.3g}")
    if not verify_markov(q, ["U", "X", "Y", "Z"]).holds:
        fails.append("U* - X - Y - Z broken")
    return SampleResult(sample_id, gamma, mix.lam, slack_ry, slack_y, slack_z, tuple(fails))


def verify_corollary1(ch: ChannelSpec, c12: float, samples: int = 50, seed: int = 0,
                      tol: float = IDENTITY_TOL, u_size: int = 2) -> Corollary1Report:
    """Random schemes and rate pairs in the three-bound region, each mapped through U*.

    Every third sample sits on the R_y = I(X;Y|U) face and every other one
    puts R_z at its largest admissible value.
    """
    if not ch.is_stateless:
        raise InvalidSchemeError("the mixture check applies to channels with a singleton state")
    nx = ch.sizes["X"]
    out = []
    for i in range(samples):
        rng = np.random.default_rng([seed, i])
        base = AuxScheme.stateless(rng.dirichlet(np.ones(u_size * nx)).reshape(u_size, nx))
        p = assemble_joint(ch, base)
        i_xy_u = mi_term(p, "X", "Y", "U")
        i_xy = mi_term(p, "X", "Y")
        i_uz = mi_term(p, "U", "Z")
        r_y = i_xy_u if i % 3 == 0 else float(rng.uniform(0.0, i_xy_u))
        rz_max = max(min(i_uz + c12, i_xy - r_y), 0.0)
        r_z = rz_max if i % 2 == 0 else float(rng.uniform(0.0, rz_max))
        out.append(check_pair(ch, base, c12, r_y, r_z, i, tol))
    return Corollary1Report(float(c12), tuple(out), tol)

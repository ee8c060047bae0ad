"""Rate regions over (R_Z, R_Y) for a fixed channel and auxiliary scheme.

Each evaluation produces a symbolic :class:`HalfspaceSystem` whose
right-hand sides name mutual-information terms, the numeric values of those
terms, and the resulting polygon.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, NamedTuple

import numpy as np

from .channel import AuxScheme, ChannelSpec, assemble_joint
from .errors import DomainError, InvalidSchemeError, NumericalConsistencyError
from .polyhedra import (
    RATE_VARS,
    HalfspaceSystem,
    LinExpr,
    RateRegion2D,
    fourier_motzkin,
    substitute,
    vertices_2d,
)
from .prob import IDENTITY_TOL, JointPmf, binary_convolve, binary_entropy, mutual_information


class RegionKind(str, enum.Enum):
    THM1 = "thm1"
    THM2 = "thm2"
    THM3 = "thm3"
    RATE_SPLITTING = "rate-splitting"
    DABORA_SERVETTO = "dabora-servetto"
    STATELESS_THM1 = "stateless-thm1"

    @classmethod
    def parse(cls, tag) -> "RegionKind":
        if isinstance(tag, cls):
            return tag
        try:
            return cls(tag)
        except ValueError:
            raise DomainError(f"unknown region kind {tag!r}") from None


FORM_OF_KIND = {
    RegionKind.THM1: "noncausal",
    RegionKind.RATE_SPLITTING: "noncausal",
    RegionKind.THM2: "causal",
    RegionKind.THM3: "rate-limited",
    RegionKind.DABORA_SERVETTO: "stateless",
    RegionKind.STATELESS_THM1: "stateless",
}


@dataclass(frozen=True)
class RegionEvaluation:
    kind: RegionKind
    c12: float
    system: HalfspaceSystem
    terms: Mapping[str, float]
    feasible: bool
    region: RateRegion2D

    @property
    def inequalities(self) -> HalfspaceSystem:
        return self.system

    def bounds(self) -> list[tuple[float, float, float]]:
        """Numeric rows ``(a_z, a_y, b)`` of the system (orthant excluded)."""
        return [tuple(float(x) for x in r) for r in self.system.bind(dict(self.terms))]


def mi_name(left: str, right: str, given: str = "") -> str:
    return f"I({left};{right}|{given})" if given else f"I({left};{right})"


def _split(group: str) -> tuple[str, ...]:
    return tuple(g for g in group.split(",") if g)


def mi_term(p: JointPmf, left: str, right: str, given: str = "") -> float:
    return mutual_information(p, _split(left), _split(right), _split(given))


T = LinExpr.term


def _rows_thm1() -> HalfspaceSystem:
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", T("I(U;Z)") - T("I(U;S)") + T("C12")),
        ({"R_Y": 1}, "<=", T("I(X;Y|U,S)")),
        ({"R_Z": 1, "R_Y": 1}, "<=", T("I(X;Y|S)")),
    ])


def rate_splitting_system() -> HalfspaceSystem:
    """Split-message system over (R_Z1, R_Z2, R_Y) before projection."""
    return HalfspaceSystem.build(("R_Z1", "R_Z2", "R_Y"), [
        ({"R_Z2": 1}, "<=", T("C12"), "c12-cap"),
        ({"R_Z2": 1}, ">=", 0, "nonneg"),
        ({"R_Z1": 1}, "<=", T("I(U;Z)") - T("I(U;S)"), "gp"),
        ({"R_Y": 1, "R_Z2": 1}, "<=", T("I(X;Y|U,S)"), "private"),
        ({"R_Z1": 1, "R_Z2": 1, "R_Y": 1}, "<=", T("I(X;Y|S)"), "sum"),
    ])


def project_rate_splitting() -> HalfspaceSystem:
    """Substitute R_Z1 = R_Z - R_Z2 and eliminate R_Z2 (all rows kept)."""
    sys = substitute(rate_splitting_system(), "R_Z1", {"R_Z": 1, "R_Z2": -1})
    return fourier_motzkin(sys, "R_Z2").reorder(RATE_VARS)


def rate_splitting_expected(include_dropped: bool = False) -> HalfspaceSystem:
    """The three rate-splitting rows; with ``include_dropped`` also the sum
    bound I(X;Y|S) and 0 <= C12 that the projection produces."""
    a = T("I(U;Z)") - T("I(U;S)")
    rows = [
        ({"R_Z": 1}, "<=", a + T("C12")),
        ({"R_Y": 1}, "<=", T("I(X;Y|U,S)")),
        ({"R_Z": 1, "R_Y": 1}, "<=", a + T("I(X;Y|U,S)")),
    ]
    if include_dropped:
        rows += [({"R_Z": 1, "R_Y": 1}, "<=", T("I(X;Y|S)")), ({}, "<=", T("C12"))]
    return HalfspaceSystem.build(RATE_VARS, rows)


RS_DROPPED = (
    (frozenset({("R_Z", 1), ("R_Y", 1)}), T("I(X;Y|S)")),
    (frozenset(), T("C12")),
)


@lru_cache(maxsize=1)
def _rows_rate_splitting() -> HalfspaceSystem:
    full = project_rate_splitting()
    rows = []
    for r in full.rows:
        cm = frozenset((v, c) for v, c in zip(full.variables, r.coeffs) if c != 0)
        if (cm, r.rhs) in RS_DROPPED:
            continue
        rows.append(r)
    return HalfspaceSystem(full.variables, tuple(rows))


def _rows_thm2() -> HalfspaceSystem:
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", T("I(U;Z)") + T("C12")),
        ({"R_Y": 1}, "<=", T("I(V;Y|U)")),
        ({"R_Z": 1, "R_Y": 1}, "<=", T("I(V,U;Y)")),
    ])


def _rows_thm3() -> HalfspaceSystem:
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", T("I(U;Z,Sd)") - T("I(U;S,Sd)")),
        ({"R_Y": 1}, "<=", T("I(X;Y|U,S,Sd)")),
        ({}, "<=", T("C12") - T("I(S;Sd)") + T("I(Z;Sd)"), "state-link"),
    ])


def _rows_dabora_servetto() -> HalfspaceSystem:
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", T("I(U;Z)") + T("C12")),
        ({"R_Z": 1}, "<=", T("I(U;Y)")),
        ({"R_Y": 1}, "<=", T("I(X;Y|U)")),
    ])


def _rows_stateless_thm1() -> HalfspaceSystem:
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", T("I(U;Z)") + T("C12")),
        ({"R_Y": 1}, "<=", T("I(X;Y|U)")),
        ({"R_Z": 1, "R_Y": 1}, "<=", T("I(X;Y)")),
    ])


ROWS = {
    RegionKind.THM1: _rows_thm1,
    RegionKind.RATE_SPLITTING: _rows_rate_splitting,
    RegionKind.THM2: _rows_thm2,
    RegionKind.THM3: _rows_thm3,
    RegionKind.DABORA_SERVETTO: _rows_dabora_servetto,
    RegionKind.STATELESS_THM1: _rows_stateless_thm1,
}


def _parse_term(name: str) -> tuple[str, str, str]:
    body = name[2:-1]
    lr, _, given = body.partition("|")
    left, right = lr.split(";")
    return left, right, given


def region_terms(kind: RegionKind, p: JointPmf, c12: float) -> dict[str, float]:
    """Numeric values of every term the kind's system refers to."""
    out = {"C12": float(c12)}
    for name in sorted(ROWS[kind]().terms() - {"C12"}):
        out[name] = mi_term(p, *_parse_term(name))
    return out


def evaluate_region(kind, ch: ChannelSpec, aux: AuxScheme, c12: float,
                    tol: float = IDENTITY_TOL) -> RegionEvaluation:
    kind = RegionKind.parse(kind)
    if c12 < 0:
        raise DomainError(f"c12 must be nonnegative, got {c12}")
    if aux.form != FORM_OF_KIND[kind]:
        raise InvalidSchemeError(f"kind {kind.value} needs a {FORM_OF_KIND[kind]} scheme, got {aux.form}")
    if FORM_OF_KIND[kind] == "stateless" and not ch.is_stateless:
        raise InvalidSchemeError(f"kind {kind.value} needs a channel with a singleton state alphabet")
    p = assemble_joint(ch, aux)
    terms = region_terms(kind, p, c12)
    feasible = True
    if kind is RegionKind.RATE_SPLITTING:
        # the projected sum bound I(X;Y|S) is implied by the kept one
        full = mi_term(p, "X", "Y", "S")
        kept = terms["I(U;Z)"] - terms["I(U;S)"] + terms["I(X;Y|U,S)"]
        if full < kept - tol:
            raise NumericalConsistencyError(f"sum bound {full} below projected bound {kept}")
    if kind is RegionKind.THM3:
        alt = (mi_term(p, "U", "Z", "Sd") - mi_term(p, "U", "S", "Sd"))
        direct = terms["I(U;Z,Sd)"] - terms["I(U;S,Sd)"]
        if abs(alt - direct) > tol:
            raise NumericalConsistencyError(f"conditional and joint R_Z forms differ: {direct} vs {alt}")
        feasible = c12 - terms["I(S;Sd)"] + terms["I(Z;Sd)"] >= -tol
    sys = ROWS[kind]()
    region = vertices_2d(sys, terms)
    if kind is RegionKind.THM3 and not feasible:
        region = RateRegion2D((), region.halfspaces, sys)
    return RegionEvaluation(kind, float(c12), sys, terms, feasible, region)


# -- binary symmetric example -------------------------------------------------

BINARY_SCHEMES = ("binning", "rate-splitting-bound")


def binary_symmetric_region(scheme: str, p1: float, p2: float, c12: float,
                            alpha: float) -> RegionEvaluation:
    """Closed-form regions for X = U + V (mod 2), U ~ Ber(1/2), V ~ Ber(alpha)."""
    if scheme not in BINARY_SCHEMES:
        raise DomainError(f"scheme must be one of {BINARY_SCHEMES}, got {scheme!r}")
    if not 0.0 <= p1 <= p2 < 0.5:
        raise DomainError(f"need 0 <= p1 <= p2 < 1/2, got ({p1}, {p2})")
    if not 0.0 <= alpha <= 0.5:
        raise DomainError(f"alpha must lie in [0, 1/2], got {alpha}")
    if c12 < 0:
        raise DomainError(f"c12 must be nonnegative, got {c12}")
    terms = {
        "H(a*p1)": binary_entropy(binary_convolve(alpha, p1)),
        "H(a*p2)": binary_entropy(binary_convolve(alpha, p2)),
        "H(p1)": binary_entropy(p1),
        "C12": float(c12),
    }
    sys = binary_system(scheme)
    kind = RegionKind.THM1 if scheme == "binning" else RegionKind.RATE_SPLITTING
    return RegionEvaluation(kind, float(c12), sys, terms, True, vertices_2d(sys, terms))


@lru_cache(maxsize=2)
def binary_system(scheme: str) -> HalfspaceSystem:
    z = 1 - T("H(a*p2)")
    y = T("H(a*p1)") - T("H(p1)")
    total = 1 - T("H(p1)") if scheme == "binning" else z + y
    return HalfspaceSystem.build(RATE_VARS, [
        ({"R_Z": 1}, "<=", z + T("C12")),
        ({"R_Y": 1}, "<=", y),
        ({"R_Z": 1, "R_Y": 1}, "<=", total),
    ])


def binary_alpha_union(scheme: str, p1: float, p2: float, c12: float, alphas) -> RateRegion2D:
    from .polyhedra import convex_union
    return convex_union([binary_symmetric_region(scheme, p1, p2, c12, float(a)).region for a in alphas])


def alpha_grid(step: float = 1e-3) -> np.ndarray:
    """Uniform grid on [0, 1/2] including both ends."""
    if not 0 < step <= 0.5:
        raise DomainError(f"alpha step must lie in (0, 1/2], got {step}")
    k = int(round(0.5 / step))
    return np.linspace(0.0, 0.5, k + 1)


class BinaryComparison(NamedTuple):
    c12: float
    binning: RateRegion2D
    rate_splitting: RateRegion2D
    inner_violation: float  # how far the rate-splitting union leaves the binning union
    strict_margin: float    # largest excess of a binning vertex over a rate-splitting row
    witness: tuple | None   # binning vertex outside the rate-splitting union

    def verdict(self, tol: float = 1e-9, strict_tol: float = 1e-3) -> str:
        if self.inner_violation > tol:
            return f"c12={self.c12:g}: containment FAILS (violation {self.inner_violation:.3g})"
        if self.strict_margin >= strict_tol:
            w = self.witness
            return (f"c12={self.c12:g}: binning strictly contains rate-splitting; "
                    f"witness ({w[0]:.6f}, {w[1]:.6f}) exceeds a rate-splitting bound by "
                    f"{self.strict_margin:.6f}")
        return f"c12={self.c12:g}: regions coincide up to {self.strict_margin:.3g}"


def _excess(region: RateRegion2D, pt) -> float:
    return max(float(a1 * pt[0] + a2 * pt[1] - b) for a1, a2, b in region.halfspaces)


def compare_binary(p1: float, p2: float, c12: float, alphas) -> BinaryComparison:
    """alpha-unions of both binary regions and a separation witness.

    The witness is the binning corner on the R_Y = 0 axis when it is outside
    the rate-splitting union, otherwise the binning vertex farthest outside.
    """
    b = binary_alpha_union("binning", p1, p2, c12, alphas)
    r = binary_alpha_union("rate-splitting-bound", p1, p2, c12, alphas)
    inner = max(0.0, max((_excess(b, v) for v in r.vertices), default=0.0))
    scored = [(_excess(r, v), v) for v in b.vertices]
    margin, worst = max(scored, default=(0.0, None))
    axis = max((v for v in b.vertices if abs(v[1]) <= 1e-12), default=None, key=lambda v: v[0])
    witness = worst
    if axis is not None and _excess(r, axis) > 0:
        witness = axis
    if margin <= 0:
        margin, witness = 0.0, None
    return BinaryComparison(float(c12), b, r, inner, margin, witness)


def binary_aux(alpha: float) -> AuxScheme:
    """Stateless scheme X = U + V (mod 2) with U ~ Ber(1/2), V ~ Ber(alpha)."""
    p_ux = 0.5 * np.array([[1 - alpha, alpha], [alpha, 1 - alpha]])
    return AuxScheme.stateless(p_ux)


def binary_noncausal_aux(alpha: float) -> AuxScheme:
    """The same scheme written in noncausal form over a singleton state."""
    return AuxScheme.noncausal(np.array([[0.5, 0.5]]),
                               np.array([[[1 - alpha, alpha], [alpha, 1 - alpha]]]))


# -- identities ---------------------------------------------------------------

class IdentityReport(NamedTuple):
    lhs: dict[str, float]
    rhs: dict[str, float]
    max_deviation: float
    passed: bool


def check_superposition_identity(ch: ChannelSpec, aux: AuxScheme,
                                 tol: float = IDENTITY_TOL) -> IdentityReport:
    """I(X;Y|S) = I(U,X;Y|S) = I(U;Y|S) + I(X;Y|U,S) on the assembled joint."""
    if aux.form != "noncausal":
        raise InvalidSchemeError("superposition identity needs a noncausal scheme")
    p = assemble_joint(ch, aux)
    a = mi_term(p, "X", "Y", "S")
    b = mi_term(p, "U,X", "Y", "S")
    c = mi_term(p, "U", "Y", "S") + mi_term(p, "X", "Y", "U,S")
    dev = max(abs(a - b), abs(b - c), abs(a - c))
    return IdentityReport({"I(X;Y|S)": a, "I(U,X;Y|S)": b},
                          {"I(U,X;Y|S)": b, "I(U;Y|S)+I(X;Y|U,S)": c}, dev, dev <= tol)


def merge_rate_limited(aux: AuxScheme) -> AuxScheme:
    """Noncausal scheme with auxiliary (U, Sd), index ``sd * |U| + u``."""
    if aux.form != "rate-limited":
        raise InvalidSchemeError("merge_rate_limited needs a rate-limited scheme")
    p = np.asarray(aux.components["p_sdux_given_s"])
    ns, nsd, nu, nx = p.shape
    joint = p.reshape(ns, nsd * nu, nx)
    pu = joint.sum(axis=2)
    with np.errstate(invalid="ignore", divide="ignore"):
        px = np.where(pu[..., None] > 0, joint / np.where(pu > 0, pu, 1.0)[..., None], 1.0 / nx)
    return AuxScheme.noncausal(pu, px)

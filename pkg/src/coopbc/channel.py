"""Physically degraded state-dependent broadcast channels and auxiliary schemes.

A channel is always held as two kernels, ``P(y | x, s)`` and ``P(z | y)``,
so the degradation ``(X, S) - Y - Z`` is structural.  A raw
``P(y, z | x, s)`` table is only accepted at the file boundary, through
:func:`validate_degraded`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, NamedTuple

import numpy as np

from .errors import DomainError, IncompatibleAlphabetsError, NotDegradableError
from .prob import NORM_TOL, Alphabet, ConditionalPmf, JointPmf, Pmf, binary_convolve

FORMS = ("noncausal", "causal", "rate-limited", "stateless")
LOAD_TOL = 1e-9

# axis order of the table returned by assemble_joint, per form
JOINT_AXES = {
    "noncausal": ("S", "U", "X", "Y", "Z"),
    "causal": ("S", "U", "V", "X", "Y", "Z"),
    "rate-limited": ("S", "Sd", "U", "X", "Y", "Z"),
    "stateless": ("S", "U", "X", "Y", "Z"),
}


@dataclass(frozen=True)
class ChannelSpec:
    state_pmf: Pmf
    forward: ConditionalPmf  # (S, X) -> Y
    degrade: ConditionalPmf  # Y -> Z

    def __post_init__(self):
        f, d = self.forward, self.degrade
        if [a.name for a in f.from_axes] != ["S", "X"] or [a.name for a in f.to_axes] != ["Y"]:
            raise IncompatibleAlphabetsError("forward kernel must map (S, X) -> Y")
        if [a.name for a in d.from_axes] != ["Y"] or [a.name for a in d.to_axes] != ["Z"]:
            raise IncompatibleAlphabetsError("degrade kernel must map Y -> Z")
        if f.from_axes[0].size != self.state_pmf.alphabet.size:
            raise IncompatibleAlphabetsError("state pmf and forward kernel disagree on |S|")
        if f.to_axes[0].size != d.from_axes[0].size:
            raise IncompatibleAlphabetsError("forward output and degrade input disagree on |Y|")

    @classmethod
    def from_arrays(cls, state_pmf, forward, degrade, *, atol: float = NORM_TOL) -> "ChannelSpec":
        """Build from ``state_pmf[s]``, ``forward[s][x][y]`` and ``degrade[y][z]``."""
        forward = np.asarray(forward, dtype=float)
        degrade = np.asarray(degrade, dtype=float)
        if forward.ndim != 3 or degrade.ndim != 2:
            raise IncompatibleAlphabetsError("forward must be [s][x][y] and degrade [y][z]")
        ns, nx, ny = forward.shape
        S, X, Y, Z = (Alphabet("S", ns), Alphabet("X", nx), Alphabet("Y", ny),
                      Alphabet("Z", degrade.shape[1]))
        if degrade.shape[0] != ny:
            raise IncompatibleAlphabetsError(f"degrade has {degrade.shape[0]} rows, |Y| = {ny}")
        return cls(
            Pmf(S, state_pmf, atol=atol),
            ConditionalPmf([S, X], [Y], forward, atol=atol),
            ConditionalPmf([Y], [Z], degrade, atol=atol),
        )

    @property
    def sizes(self) -> dict[str, int]:
        return {
            "S": self.state_pmf.alphabet.size,
            "X": self.forward.from_axes[1].size,
            "Y": self.forward.to_axes[0].size,
            "Z": self.degrade.to_axes[0].size,
        }

    @property
    def is_stateless(self) -> bool:
        return self.sizes["S"] == 1

    def composed(self) -> np.ndarray:
        """P(z | x, s) as an [s][x][z] table."""
        return np.einsum("sxy,yz->sxz", self.forward.kernel, self.degrade.kernel)


def _ro(a, dtype=float) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


def _check_rows(table: np.ndarray, nto: int, what: str, atol: float = NORM_TOL):
    if not np.all(np.isfinite(table)) or table.min(initial=0) < -atol:
        raise DomainError(f"{what} has invalid entries")
    sums = table.sum(axis=tuple(range(table.ndim - nto, table.ndim)))
    if np.any(np.abs(sums - 1.0) > atol):
        raise DomainError(f"{what} rows do not sum to 1 (max deviation {np.abs(sums - 1).max():.3g})")


@dataclass(frozen=True)
class AuxScheme:
    """Auxiliary-variable components for one of the four joint forms.

    Component arrays (axis order in brackets):

    * noncausal: ``p_u_given_s`` [s, u], ``p_x_given_us`` [s, u, x]
    * causal: ``p_uv`` [u, v], ``x_map`` [s, u, v] (integer symbols of X)
    * rate-limited: ``p_sdux_given_s`` [s, sd, u, x]
    * stateless: ``p_ux`` [u, x]
    """

    form: str
    components: Mapping[str, np.ndarray]

    def __post_init__(self):
        c = self.components
        if self.form == "noncausal":
            pu, px = c["p_u_given_s"], c["p_x_given_us"]
            if pu.ndim != 2 or px.ndim != 3 or px.shape[:2] != pu.shape:
                raise IncompatibleAlphabetsError("noncausal components need shapes [s,u] and [s,u,x]")
            _check_rows(pu, 1, "P(u|s)")
            _check_rows(px, 1, "P(x|u,s)")
        elif self.form == "causal":
            puv, xm = c["p_uv"], c["x_map"]
            if puv.ndim != 2 or xm.ndim != 3 or xm.shape[1:] != puv.shape:
                raise IncompatibleAlphabetsError("causal components need shapes [u,v] and [s,u,v]")
            _check_rows(puv, 2, "P(u,v)")
            if xm.min(initial=0) < 0:
                raise DomainError("x_map has negative symbols")
        elif self.form == "rate-limited":
            p = c["p_sdux_given_s"]
            if p.ndim != 4:
                raise IncompatibleAlphabetsError("rate-limited component needs shape [s,sd,u,x]")
            _check_rows(p, 3, "P(sd,u,x|s)")
        elif self.form == "stateless":
            p = c["p_ux"]
            if p.ndim != 2:
                raise IncompatibleAlphabetsError("stateless component needs shape [u,x]")
            _check_rows(p, 2, "P(u,x)")
        else:
            raise DomainError(f"unknown auxiliary form {self.form!r}")

    @classmethod
    def noncausal(cls, p_u_given_s, p_x_given_us) -> "AuxScheme":
        return cls("noncausal", {"p_u_given_s": _ro(p_u_given_s), "p_x_given_us": _ro(p_x_given_us)})

    @classmethod
    def causal(cls, p_uv, x_map) -> "AuxScheme":
        return cls("causal", {"p_uv": _ro(p_uv), "x_map": _ro(x_map, dtype=np.int64)})

    @classmethod
    def rate_limited(cls, p_sdux_given_s) -> "AuxScheme":
        return cls("rate-limited", {"p_sdux_given_s": _ro(p_sdux_given_s)})

    @classmethod
    def stateless(cls, p_ux) -> "AuxScheme":
        return cls("stateless", {"p_ux": _ro(p_ux)})

    @property
    def sizes(self) -> dict[str, int]:
        c = self.components
        if self.form == "noncausal":
            s, u, x = c["p_x_given_us"].shape
            return {"S": s, "U": u, "X": x}
        if self.form == "causal":
            s, u, v = c["x_map"].shape
            return {"S": s, "U": u, "V": v, "X": int(c["x_map"].max()) + 1}
        if self.form == "rate-limited":
            s, sd, u, x = c["p_sdux_given_s"].shape
            return {"S": s, "Sd": sd, "U": u, "X": x}
        u, x = c["p_ux"].shape
        return {"U": u, "X": x}

    def to_json(self) -> dict:
        out = {"form": self.form}
        out.update({k: np.asarray(v).tolist() for k, v in self.components.items()})
        return out


def _compatible(ch: ChannelSpec, aux: AuxScheme):
    cs, asz = ch.sizes, aux.sizes
    if aux.form == "causal":
        if asz["S"] != cs["S"]:
            raise IncompatibleAlphabetsError(f"x_map covers |S|={asz['S']}, channel has {cs['S']}")
        if asz["X"] > cs["X"]:
            raise IncompatibleAlphabetsError("x_map emits symbols outside the channel input alphabet")
        return
    if asz["X"] != cs["X"]:
        raise IncompatibleAlphabetsError(f"scheme has |X|={asz['X']}, channel has {cs['X']}")
    if "S" in asz and asz["S"] != cs["S"]:
        raise IncompatibleAlphabetsError(f"scheme has |S|={asz['S']}, channel has {cs['S']}")


def assemble_joint(ch: ChannelSpec, aux: AuxScheme) -> JointPmf:
    """Full joint law of all variables under the scheme's factorization.

    Axis order is given by ``JOINT_AXES[aux.form]``.
    """
    _compatible(ch, aux)
    ps = ch.state_pmf.mass
    W = ch.forward.kernel
    D = ch.degrade.kernel
    c = aux.components
    if aux.form == "noncausal":
        m = np.einsum("s,su,sux,sxy,yz->suxyz", ps, c["p_u_given_s"], c["p_x_given_us"], W, D)
    elif aux.form == "causal":
        xm = c["x_map"]
        onehot = np.zeros(xm.shape + (ch.sizes["X"],))
        np.put_along_axis(onehot, xm[..., None], 1.0, axis=-1)
        m = np.einsum("s,uv,suvx,sxy,yz->suvxyz", ps, c["p_uv"], onehot, W, D)
    elif aux.form == "rate-limited":
        m = np.einsum("s,saux,sxy,yz->sauxyz", ps, c["p_sdux_given_s"], W, D)
    else:
        m = np.einsum("s,ux,sxy,yz->suxyz", ps, c["p_ux"], W, D)
    # einsum of normalized factors sums to 1 up to rounding; absorb it
    m = m / m.sum()
    return JointPmf.from_array(JOINT_AXES[aux.form], m)


@dataclass(frozen=True)
class BinarySymmetricBC:
    """Y = X + W1, Z = X + W2 (mod 2) with W1 ~ Ber(p1), W2 ~ Ber(p2)."""

    p1: float
    p2: float

    def __post_init__(self):
        if not (0.0 <= self.p1 <= self.p2 < 0.5):
            raise NotDegradableError(f"need 0 <= p1 <= p2 < 1/2, got p1={self.p1}, p2={self.p2}")


def bsc(p: float) -> np.ndarray:
    return np.array([[1 - p, p], [p, 1 - p]])


def degrade_param(p1: float, p2: float) -> float:
    """Crossover q of the Y -> Z link, i.e. the solution of p1 * q = p2."""
    if p1 > p2 or p2 >= 0.5 or p1 < 0:
        raise NotDegradableError(f"BSC({p2}) is not a degraded version of BSC({p1})")
    q = (p2 - p1) / (1 - 2 * p1)
    if abs(binary_convolve(p1, q) - p2) > 1e-12:
        raise NotDegradableError("degradation parameter failed its defining equation")
    return q


def to_channel_spec(b: BinarySymmetricBC) -> ChannelSpec:
    q = degrade_param(b.p1, b.p2)
    return ChannelSpec.from_arrays([1.0], bsc(b.p1)[None], bsc(q))


class DegradationResult(NamedTuple):
    ok: bool
    channel: ChannelSpec | None
    witness: tuple[int, int, int, int] | None  # (x, s, y, z) cell that breaks P(z|y)
    max_deviation: float


def validate_degraded(ch_or_table, state_pmf=None, tol: float = LOAD_TOL) -> DegradationResult:
    """Check (X, S) - Y - Z.

    A :class:`ChannelSpec` is degraded by construction.  A raw table
    ``P[s][x][y][z]`` (with ``state_pmf``) is factored as ``P(y|x,s) P(z|y)``;
    on failure the (x, s, y, z) cell with the largest mismatch is returned.
    """
    if isinstance(ch_or_table, ChannelSpec):
        return DegradationResult(True, ch_or_table, None, 0.0)
    P = np.asarray(ch_or_table, dtype=float)
    if P.ndim != 4:
        raise IncompatibleAlphabetsError("raw channel table must be [s][x][y][z]")
    ns, nx, ny, nz = P.shape
    if state_pmf is None:
        state_pmf = np.full(ns, 1.0 / ns)
    fwd = P.sum(axis=3)
    with np.errstate(invalid="ignore", divide="ignore"):
        cond = np.where(fwd[..., None] > 0, P / np.where(fwd > 0, fwd, 1.0)[..., None], np.nan)
    # reference P(z|y): average over (s, x) cells that reach y
    weight = fwd * np.asarray(state_pmf)[:, None, None]
    wy = weight.sum(axis=(0, 1))
    deg = np.full((ny, nz), 1.0 / nz)
    for y in range(ny):
        if wy[y] > 0:
            deg[y] = np.einsum("sx,sxz->z", weight[:, :, y], np.nan_to_num(cond[:, :, y, :])) / wy[y]
    dev = np.where(np.isnan(cond), 0.0, np.abs(cond - deg[None, None]))
    worst = float(dev.max(initial=0.0))
    if worst > tol:
        s, x, y, z = np.unravel_index(int(np.argmax(dev)), dev.shape)
        return DegradationResult(False, None, (int(x), int(s), int(y), int(z)), worst)
    fwd = np.where(fwd.sum(axis=2, keepdims=True) > 0, fwd, 1.0 / ny)
    return DegradationResult(True, ChannelSpec.from_arrays(state_pmf, fwd, deg, atol=tol), None, worst)


# -- JSON boundary ---------------------------------------------------------

def _renorm(a, nto: int, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(a)) or a.min(initial=0) < -LOAD_TOL:
        raise DomainError(f"{what}: invalid probabilities")
    a = np.clip(a, 0.0, None)
    axes = tuple(range(a.ndim - nto, a.ndim))
    s = a.sum(axis=axes, keepdims=True)
    if np.any(np.abs(s - 1.0) > LOAD_TOL):
        raise DomainError(f"{what}: rows deviate from 1 by {np.abs(s - 1).max():.3g} (> {LOAD_TOL})")
    return a / s


def aux_from_json(d: Mapping) -> AuxScheme:
    form = d.get("form")
    if form == "noncausal":
        return AuxScheme.noncausal(_renorm(d["p_u_given_s"], 1, "p_u_given_s"),
                                   _renorm(d["p_x_given_us"], 1, "p_x_given_us"))
    if form == "causal":
        return AuxScheme.causal(_renorm(d["p_uv"], 2, "p_uv"), np.asarray(d["x_map"], dtype=np.int64))
    if form == "rate-limited":
        return AuxScheme.rate_limited(_renorm(d["p_sdux_given_s"], 3, "p_sdux_given_s"))
    if form == "stateless":
        return AuxScheme.stateless(_renorm(d["p_ux"], 2, "p_ux"))
    raise DomainError(f"unknown aux form {form!r}")


def channel_from_json(d: Mapping) -> tuple[ChannelSpec, AuxScheme | None]:
    state = _renorm(d["state_pmf"], 1, "state_pmf")
    if "joint_kernel" in d:
        res = validate_degraded(_renorm(d["joint_kernel"], 2, "joint_kernel"), state)
        if not res.ok:
            x, s, y, z = res.witness
            raise NotDegradableError(
                f"joint_kernel does not factor through Y: cell x={x}, s={s}, y={y}, z={z} "
                f"deviates by {res.max_deviation:.3g}")
        ch = res.channel
    else:
        ch = ChannelSpec.from_arrays(state, _renorm(d["forward"], 1, "forward"),
                                     _renorm(d["degrade"], 1, "degrade"), atol=LOAD_TOL)
    declared = d.get("alphabets", {})
    sizes = dict(ch.sizes)
    aux = aux_from_json(d["aux"]) if d.get("aux") else None
    if aux is not None:
        _compatible(ch, aux)
        sizes.update({k: v for k, v in aux.sizes.items() if k not in sizes})
    for name, size in declared.items():
        if name in sizes and sizes[name] != size:
            raise IncompatibleAlphabetsError(f"alphabet {name} declared size {size}, data has {sizes[name]}")
    return ch, aux


def channel_to_json(ch: ChannelSpec, aux: AuxScheme | None = None) -> dict:
    sizes = dict(ch.sizes)
    out = {
        "alphabets": sizes,
        "state_pmf": ch.state_pmf.mass.tolist(),
        "forward": ch.forward.kernel.tolist(),
        "degrade": ch.degrade.kernel.tolist(),
    }
    if aux is not None:
        for k, v in aux.sizes.items():
            sizes.setdefault(k, v)
        out["aux"] = aux.to_json()
    return out


def load_channel(path) -> tuple[ChannelSpec, AuxScheme | None]:
    with open(Path(path), encoding="utf-8") as fh:
        return channel_from_json(json.load(fh))


def save_channel(path, ch: ChannelSpec, aux: AuxScheme | None = None):
    with open(Path(path), "w", encoding="utf-8") as fh:
        json.dump(channel_to_json(ch, aux), fh, indent=2)

"""Finite probability tables and information measures (in bits).

A :class:`JointPmf` is a numpy table whose axes carry named finite
alphabets; every information quantity in the toolkit is computed on one of
these. Symbols of an alphabet of size ``k`` are the integers ``0..k-1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    AxisNotFoundError,
    DomainError,
    InvalidPartitionError,
    NumericalConsistencyError,
)

NORM_TOL = 1e-12
IDENTITY_TOL = 1e-9
MI_CLAMP = 1e-10

AxisSpec = Union[str, Sequence[str]]


def _names(axes: AxisSpec | None) -> tuple[str, ...]:
    if axes is None:
        return ()
    if isinstance(axes, str):
        return (axes,)
    return tuple(axes)


@dataclass(frozen=True)
class Alphabet:
    name: str
    size: int

    def __post_init__(self):
        if int(self.size) != self.size or self.size < 1:
            raise DomainError(f"alphabet {self.name!r} needs a positive integer size, got {self.size}")


def _check_mass(mass: np.ndarray, atol: float, what: str) -> np.ndarray:
    if not np.all(np.isfinite(mass)):
        raise DomainError(f"{what} contains non-finite entries")
    if mass.min(initial=0.0) < -atol:
        raise DomainError(f"{what} has negative mass {mass.min():.3g}")
    return np.clip(mass, 0.0, None)


@dataclass(frozen=True)
class JointPmf:
    """Joint probability table over an ordered list of named alphabets."""

    axes: tuple[Alphabet, ...]
    mass: np.ndarray
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __init__(self, axes: Iterable[Alphabet], mass, *, atol: float = NORM_TOL):
        axes = tuple(axes)
        names = [a.name for a in axes]
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate axis names in {names}")
        mass = np.asarray(mass, dtype=float)
        shape = tuple(a.size for a in axes)
        if mass.shape != shape:
            raise DomainError(f"mass shape {mass.shape} does not match alphabets {shape}")
        mass = _check_mass(mass, atol, "joint pmf")
        total = mass.sum()
        if abs(total - 1.0) > atol:
            raise DomainError(f"joint pmf sums to {total!r}, not 1")
        mass = mass.copy()
        mass.setflags(write=False)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "mass", mass)
        object.__setattr__(self, "_cache", {})

    @classmethod
    def from_array(cls, names: Sequence[str], mass, **kw) -> "JointPmf":
        mass = np.asarray(mass, dtype=float)
        if len(names) != mass.ndim:
            raise DomainError(f"{len(names)} names for a {mass.ndim}-d table")
        return cls([Alphabet(n, s) for n, s in zip(names, mass.shape)], mass, **kw)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.axes)

    def axis_index(self, name: str) -> int:
        for i, a in enumerate(self.axes):
            if a.name == name:
                return i
        raise AxisNotFoundError(f"axis {name!r} not in {self.names}")

    def alphabet(self, name: str) -> Alphabet:
        return self.axes[self.axis_index(name)]

    def marginal_array(self, names: AxisSpec) -> np.ndarray:
        """Raw marginal table with axes in the requested order."""
        names = _names(names)
        idx = [self.axis_index(n) for n in names]
        if len(set(idx)) != len(idx):
            raise InvalidPartitionError(f"repeated axis in {names}")
        drop = tuple(i for i in range(len(self.axes)) if i not in idx)
        m = self.mass.sum(axis=drop) if drop else self.mass
        kept = sorted(idx)
        return np.transpose(m, [kept.index(i) for i in idx])

    def marginal(self, names: AxisSpec) -> "JointPmf":
        names = _names(names)
        m = self.marginal_array(names)
        return JointPmf([self.alphabet(n) for n in names], m / m.sum())

    def conditional(self, to: AxisSpec, given: AxisSpec) -> "ConditionalPmf":
        """P(to | given); zero-probability conditioning cells become uniform."""
        to, given = _names(to), _names(given)
        table = self.marginal_array(given + to)
        return ConditionalPmf.normalized(
            [self.alphabet(n) for n in given], [self.alphabet(n) for n in to], table
        )


@dataclass(frozen=True)
class Pmf:
    alphabet: Alphabet
    mass: np.ndarray

    def __init__(self, alphabet: Alphabet, mass, *, atol: float = NORM_TOL):
        mass = np.asarray(mass, dtype=float)
        if mass.shape != (alphabet.size,):
            raise DomainError(f"pmf over {alphabet.name} needs {alphabet.size} entries")
        mass = _check_mass(mass, atol, f"pmf over {alphabet.name}")
        if abs(mass.sum() - 1.0) > atol:
            raise DomainError(f"pmf over {alphabet.name} sums to {mass.sum()!r}")
        mass = mass.copy()
        mass.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "mass", mass)

    def joint(self) -> JointPmf:
        return JointPmf([self.alphabet], self.mass)


@dataclass(frozen=True)
class ConditionalPmf:
    """Kernel P(to | from) stored with shape ``from_sizes + to_sizes``."""

    from_axes: tuple[Alphabet, ...]
    to_axes: tuple[Alphabet, ...]
    kernel: np.ndarray

    def __init__(self, from_axes, to_axes, kernel, *, atol: float = NORM_TOL):
        from_axes, to_axes = tuple(from_axes), tuple(to_axes)
        kernel = np.asarray(kernel, dtype=float)
        shape = tuple(a.size for a in from_axes + to_axes)
        if kernel.shape != shape:
            raise DomainError(f"kernel shape {kernel.shape} does not match {shape}")
        kernel = _check_mass(kernel, atol, "kernel")
        nt = len(to_axes)
        sums = kernel.sum(axis=tuple(range(kernel.ndim - nt, kernel.ndim))) if nt else None
        if sums is not None and np.any(np.abs(sums - 1.0) > atol):
            raise DomainError(f"kernel slice sums deviate from 1 by {np.abs(sums - 1.0).max():.3g}")
        kernel = kernel.copy()
        kernel.setflags(write=False)
        object.__setattr__(self, "from_axes", from_axes)
        object.__setattr__(self, "to_axes", to_axes)
        object.__setattr__(self, "kernel", kernel)

    @classmethod
    def normalized(cls, from_axes, to_axes, table) -> "ConditionalPmf":
        table = np.asarray(table, dtype=float)
        nt = len(tuple(to_axes))
        to_dims = tuple(range(table.ndim - nt, table.ndim))
        sums = table.sum(axis=to_dims, keepdims=True)
        width = int(np.prod(table.shape[table.ndim - nt:]))
        with np.errstate(invalid="ignore", divide="ignore"):
            k = np.where(sums > 0, table / np.where(sums > 0, sums, 1.0), 1.0 / width)
        return cls(from_axes, to_axes, k)


def _as_joint(p) -> JointPmf:
    return p.joint() if isinstance(p, Pmf) else p


def _plogp(m: np.ndarray) -> float:
    nz = m[m > 0]
    return float(-(nz * np.log2(nz)).sum())


def entropy(p: JointPmf | Pmf, axes: AxisSpec | None = None) -> float:
    """Entropy in bits of the marginal on ``axes`` (all axes if omitted)."""
    p = _as_joint(p)
    names = _names(axes) or p.names
    key = frozenset(names)
    if len(key) != len(names):
        raise InvalidPartitionError(f"repeated axis in {names}")
    cached = p._cache.get(key)
    if cached is None:
        cached = _plogp(p.marginal_array(names))
        p._cache[key] = cached
    return cached


def mutual_information(
    p: JointPmf, left: AxisSpec, right: AxisSpec, given: AxisSpec = ()
) -> float:
    """I(left; right | given) in bits."""
    L, R, G = _names(left), _names(right), _names(given)
    if not L or not R:
        raise InvalidPartitionError("left and right must be nonempty")
    for a, b in ((L, R), (L, G), (R, G)):
        if set(a) & set(b):
            raise InvalidPartitionError(f"axis groups overlap: {sorted(set(a) & set(b))}")
    for n in L + R + G:
        p.axis_index(n)

    def h(names):
        return entropy(p, names) if names else 0.0

    val = h(L + G) + h(R + G) - h(L + R + G) - h(G)
    if val < 0:
        if val < -MI_CLAMP:
            raise NumericalConsistencyError(f"I({L};{R}|{G}) = {val:.3g} < 0")
        val = 0.0
    return val


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary entropy argument {p} outside [0,1]")
    if p == 0.0 or p == 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def binary_convolve(a: float, p: float) -> float:
    """a * p = a(1-p) + (1-a)p, the crossover of two cascaded BSCs."""
    if not (0.0 <= a <= 1.0 and 0.0 <= p <= 1.0):
        raise DomainError(f"binary_convolve arguments ({a}, {p}) outside [0,1]")
    return a * (1 - p) + (1 - a) * p


class MarkovCheck(NamedTuple):
    holds: bool
    max_violation: float


def verify_markov(
    p: JointPmf, chain: Sequence[AxisSpec], tol: float = IDENTITY_TOL
) -> MarkovCheck:
    """Check that ``p`` factorizes as G1 - G2 - ... - Gk.

    The marginal on the chain variables is compared cell-wise against
    P(G1, G2) * prod_i P(G_i | G_{i-1}).
    """
    groups = [_names(g) for g in chain]
    if len(groups) < 3 or any(not g for g in groups):
        raise InvalidPartitionError("a Markov chain needs at least three nonempty groups")
    flat = [n for g in groups for n in g]
    if len(set(flat)) != len(flat):
        raise InvalidPartitionError(f"chain groups overlap: {groups}")
    m = p.marginal_array(flat)
    dims = [int(np.prod([p.alphabet(n).size for n in g])) for g in groups]
    m = m.reshape(dims)
    k = len(dims)

    def pair(i):
        drop = tuple(j for j in range(k) if j not in (i, i + 1))
        return m.sum(axis=drop)

    recon = pair(0)
    for i in range(1, k - 1):
        pj = pair(i)
        sums = pj.sum(axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            cond = np.where(sums > 0, pj / np.where(sums > 0, sums, 1.0), 1.0 / dims[i + 1])
        recon = recon[..., None] * cond.reshape((1,) * i + cond.shape)
    viol = float(np.abs(recon - m).max())
    return MarkovCheck(viol <= tol, viol)

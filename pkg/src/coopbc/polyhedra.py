"""Exact inequality systems, Fourier-Motzkin projection and 2-D rate polygons.

Right-hand sides are :class:`LinExpr` values: a rational constant plus a
rational combination of named terms such as ``I(U;Z)`` or ``C12``.  Variable
coefficients are rationals.  Every row reads ``sum_v coef[v] * v <= rhs``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import DomainError, UnboundedRegionError

VERTEX_TOL = 1e-9
RATE_VARS = ("R_Z", "R_Y")


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot make an exact rational from {x!r}")


@dataclass(frozen=True)
class LinExpr:
    """Rational constant plus a rational combination of named terms."""

    const: Fraction = Fraction(0)
    terms: tuple[tuple[str, Fraction], ...] = ()

    @classmethod
    def of(cls, const=0, terms: Mapping[str, object] | None = None) -> "LinExpr":
        acc: dict[str, Fraction] = {}
        for k, v in (terms or {}).items():
            acc[k] = acc.get(k, Fraction(0)) + _frac(v)
        return cls(_frac(const), tuple(sorted((k, v) for k, v in acc.items() if v != 0)))

    @classmethod
    def term(cls, name: str) -> "LinExpr":
        return cls.of(0, {name: 1})

    @classmethod
    def coerce(cls, x) -> "LinExpr":
        if isinstance(x, LinExpr):
            return x
        if isinstance(x, str):
            return cls.term(x)
        return cls.of(x)

    def __add__(self, other) -> "LinExpr":
        other = LinExpr.coerce(other)
        d = dict(self.terms)
        for k, v in other.terms:
            d[k] = d.get(k, Fraction(0)) + v
        return LinExpr.of(self.const + other.const, d)

    __radd__ = __add__

    def __neg__(self) -> "LinExpr":
        return LinExpr(-self.const, tuple((k, -v) for k, v in self.terms))

    def __sub__(self, other) -> "LinExpr":
        return self + (-LinExpr.coerce(other))

    def __rsub__(self, other) -> "LinExpr":
        return LinExpr.coerce(other) - self

    def __mul__(self, k) -> "LinExpr":
        k = _frac(k)
        return LinExpr.of(self.const * k, {n: v * k for n, v in self.terms})

    __rmul__ = __mul__

    @property
    def is_constant(self) -> bool:
        return not self.terms

    def names(self) -> set[str]:
        return {k for k, _ in self.terms}

    def bind(self, bindings: Mapping[str, object]):
        """Numeric value; exact Fraction if every binding is rational."""
        missing = self.names() - set(bindings)
        if missing:
            raise KeyError(f"unbound terms {sorted(missing)}")
        exact = all(not isinstance(bindings[k], float) for k in self.names())
        if exact:
            return self.const + sum((v * _frac(bindings[k]) for k, v in self.terms), Fraction(0))
        return float(self.const) + sum(float(v) * float(bindings[k]) for k, v in self.terms)

    def __str__(self) -> str:
        parts = []
        for name, v in self.terms:
            parts.append(_signed(v, name, first=not parts))
        if self.const != 0 or not parts:
            parts.append(_signed(self.const, None, first=not parts))
        return " ".join(parts)


def _signed(v: Fraction, name: str | None, first: bool) -> str:
    sign = "-" if v < 0 else "+"
    mag = abs(v)
    if name is None:
        body = str(mag)
    elif mag == 1:
        body = name
    else:
        body = f"{mag} {name}"
    if first:
        return body if sign == "+" else f"-{body}" if name is None else f"- {body}"
    return f"{sign} {body}"


@dataclass(frozen=True)
class Row:
    coeffs: tuple[Fraction, ...]
    rhs: LinExpr
    label: str = field(default="", compare=False)


@dataclass(frozen=True)
class HalfspaceSystem:
    variables: tuple[str, ...]
    rows: tuple[Row, ...]

    def __post_init__(self):
        for r in self.rows:
            if len(r.coeffs) != len(self.variables):
                raise DomainError(f"row has {len(r.coeffs)} coefficients for {len(self.variables)} variables")

    @classmethod
    def build(cls, variables: Sequence[str], rows: Iterable[tuple]) -> "HalfspaceSystem":
        """Rows as ``(coeffs_by_name, relation, rhs[, label])``; relation '<=' or '>='."""
        variables = tuple(variables)
        out = []
        for spec in rows:
            coeffs, rel, rhs = spec[:3]
            label = spec[3] if len(spec) > 3 else ""
            unknown = set(coeffs) - set(variables)
            if unknown:
                raise DomainError(f"unknown variables {sorted(unknown)}")
            vec = tuple(_frac(coeffs.get(v, 0)) for v in variables)
            rhs = LinExpr.coerce(rhs)
            if rel == ">=":
                vec, rhs = tuple(-c for c in vec), -rhs
            elif rel != "<=":
                raise DomainError(f"relation must be '<=' or '>=', got {rel!r}")
            out.append(Row(vec, rhs, label))
        return cls(variables, tuple(out))

    def terms(self) -> set[str]:
        return set().union(*(r.rhs.names() for r in self.rows)) if self.rows else set()

    def coeff_maps(self) -> list[dict[str, Fraction]]:
        return [{v: c for v, c in zip(self.variables, r.coeffs) if c != 0} for r in self.rows]

    def canonical(self) -> frozenset:
        """Order-insensitive identity of the normalized row set."""
        out = set()
        for r in simplify(self).rows:
            cm = tuple(sorted((v, c) for v, c in zip(self.variables, r.coeffs) if c != 0))
            out.add((cm, r.rhs))
        return frozenset(out)

    def reorder(self, variables: Sequence[str]) -> "HalfspaceSystem":
        variables = tuple(variables)
        extra = [v for v in self.variables if v not in variables]
        for v, r in ((v, r) for r in self.rows for v in extra):
            if r.coeffs[self.variables.index(v)] != 0:
                raise DomainError(f"cannot drop variable {v} that still appears")
        idx = [self.variables.index(v) if v in self.variables else None for v in variables]
        rows = tuple(
            Row(tuple(r.coeffs[i] if i is not None else Fraction(0) for i in idx), r.rhs, r.label)
            for r in self.rows
        )
        return HalfspaceSystem(variables, rows)

    def bind(self, bindings: Mapping[str, object]) -> list[tuple]:
        """Numeric rows ``(*coeffs, rhs)``."""
        exact = all(not isinstance(v, float) for v in bindings.values())
        out = []
        for r in self.rows:
            b = r.rhs.bind(bindings)
            cs = tuple(c if exact else float(c) for c in r.coeffs)
            out.append(cs + (b,))
        return out

    def __str__(self) -> str:
        return format_system(self)


def format_row(variables: Sequence[str], r: Row) -> str:
    parts = []
    for v, c in zip(variables, r.coeffs):
        if c != 0:
            parts.append(_signed(c, v, first=not parts))
    lhs = " ".join(parts) if parts else "0"
    return f"{lhs} <= {r.rhs}"


def format_system(sys: HalfspaceSystem) -> str:
    return "\n".join(format_row(sys.variables, r) for r in sys.rows)


def _normalize(r: Row) -> Row:
    lead = next((c for c in r.coeffs if c != 0), None)
    if lead is None or abs(lead) == 1:
        return r
    k = 1 / abs(lead)
    return Row(tuple(c * k for c in r.coeffs), r.rhs * k, r.label)


def simplify(sys: HalfspaceSystem) -> HalfspaceSystem:
    """Drop duplicates, vacuous rows and rows dominated by a constant margin.

    Only syntactic facts are used: a row is dominated when another row has the
    same coefficient vector and a right-hand side smaller by a constant.
    """
    kept: list[Row] = []
    for r in map(_normalize, sys.rows):
        if all(c == 0 for c in r.coeffs) and r.rhs.is_constant and r.rhs.const >= 0:
            continue
        replaced = False
        for i, k in enumerate(kept):
            if k.coeffs != r.coeffs:
                continue
            diff = r.rhs - k.rhs
            if diff.is_constant:
                if diff.const < 0:
                    kept[i] = r
                replaced = True
                break
        if not replaced:
            kept.append(r)
    return HalfspaceSystem(sys.variables, tuple(kept))


def substitute(sys: HalfspaceSystem, var: str, replacement: Mapping[str, object]) -> HalfspaceSystem:
    """Replace ``var`` by ``sum_v replacement[v] * v`` (new variables appended)."""
    if var not in sys.variables:
        raise DomainError(f"{var} is not a variable of the system")
    if var in replacement:
        raise DomainError("replacement may not reference the substituted variable")
    rest = [v for v in sys.variables if v != var]
    new_vars = tuple(rest + [v for v in replacement if v not in rest])
    i = sys.variables.index(var)
    rows = []
    for r in sys.rows:
        cm = {v: c for v, c in zip(sys.variables, r.coeffs) if v != var}
        k = r.coeffs[i]
        for v, c in replacement.items():
            cm[v] = cm.get(v, Fraction(0)) + k * _frac(c)
        rows.append(Row(tuple(cm.get(v, Fraction(0)) for v in new_vars), r.rhs, r.label))
    return HalfspaceSystem(new_vars, tuple(rows))


def fourier_motzkin(sys: HalfspaceSystem, eliminate: str) -> HalfspaceSystem:
    """Project ``eliminate`` out of the system exactly."""
    i = sys.variables.index(eliminate)
    new_vars = sys.variables[:i] + sys.variables[i + 1:]

    def drop(coeffs):
        return coeffs[:i] + coeffs[i + 1:]

    upper = [r for r in sys.rows if r.coeffs[i] > 0]
    lower = [r for r in sys.rows if r.coeffs[i] < 0]
    rows = [Row(drop(r.coeffs), r.rhs, r.label) for r in sys.rows if r.coeffs[i] == 0]
    for p in upper:
        for q in lower:
            a, b = -q.coeffs[i], p.coeffs[i]
            coeffs = tuple(a * x + b * y for x, y in zip(p.coeffs, q.coeffs))
            label = f"{p.label}+{q.label}" if p.label and q.label else ""
            rows.append(Row(drop(coeffs), p.rhs * a + q.rhs * b, label))
    return simplify(HalfspaceSystem(new_vars, tuple(rows)))


# -- 2-D geometry ------------------------------------------------------------

def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def hull_2d(points: Iterable[tuple]) -> list[tuple]:
    """Counterclockwise convex hull (monotone chain); collinear points dropped."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts
    lower: list = []
    for p in pts:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    return hull


@dataclass(frozen=True)
class RateRegion2D:
    """Convex polygon in the (R_Z, R_Y) plane.

    ``halfspaces`` holds numeric rows ``(a_z, a_y, b)`` meaning
    ``a_z R_Z + a_y R_Y <= b``, orthant rows included.  Zero, one or two
    vertices denote the empty set, a point and a segment.
    """

    vertices: tuple[tuple[float, float], ...]
    halfspaces: tuple[tuple, ...]
    source: HalfspaceSystem | None = field(default=None, compare=False)

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def support(self, w_z: float, w_y: float) -> float:
        if not self.vertices:
            return float("-inf")
        return max(float(w_z * v[0] + w_y * v[1]) for v in self.vertices)


ORTHANT = ((-1, 0, 0), (0, -1, 0))


def vertices_from_rows(rows: Sequence[tuple], tol: float = VERTEX_TOL) -> list[tuple]:
    """Vertices of {r >= 0 : a . r <= b for all rows}, counterclockwise."""
    exact = all(not isinstance(x, float) for row in rows for x in row)
    if exact:
        tol = 0
        rows = [tuple(Fraction(x) for x in row) for row in rows]
    all_rows = list(rows) + [tuple(Fraction(x) if exact else float(x) for x in o) for o in ORTHANT]
    lines = []
    for a1, a2, b in all_rows:
        if a1 == 0 and a2 == 0:
            if b < -tol:
                return []
            continue
        lines.append((a1, a2, b))

    def feasible(p):
        return all(a1 * p[0] + a2 * p[1] <= b + tol * max(1.0, abs(a1) + abs(a2)) for a1, a2, b in lines)

    pts = []
    for i in range(len(lines)):
        a1, a2, b = lines[i]
        for j in range(i + 1, len(lines)):
            c1, c2, d = lines[j]
            det = a1 * c2 - a2 * c1
            if det == 0 or (not exact and abs(det) < 1e-14):
                continue
            p = ((b * c2 - a2 * d) / det, (a1 * d - b * c1) / det)
            if feasible(p):
                pts.append(p)
    if not pts:
        return []
    rays = [(1, 0), (0, 1)] + [d for a1, a2, _ in lines for d in ((a2, -a1), (-a2, a1))
                               if d[0] >= 0 and d[1] >= 0 and (d[0] != 0 or d[1] != 0)]
    for d in rays:
        scale = max(abs(d[0]), abs(d[1]))
        if all(a1 * d[0] + a2 * d[1] <= tol * scale for a1, a2, _ in lines):
            raise UnboundedRegionError(f"region is unbounded along direction {d}")
    if not exact:
        # rounding can leave orthant vertices a few ulps below zero
        pts = [(max(p[0], 0.0) + 0.0, max(p[1], 0.0) + 0.0) for p in _dedupe(pts, tol)]
    return hull_2d(pts)


def _dedupe(pts, tol):
    out = []
    for p in pts:
        if not any(abs(p[0] - q[0]) <= tol and abs(p[1] - q[1]) <= tol for q in out):
            out.append(p)
    return out


def vertices_2d(sys: HalfspaceSystem, bindings: Mapping[str, object] | None = None,
                tol: float = VERTEX_TOL) -> RateRegion2D:
    """Polygon of a two-variable system (intersected with the nonnegative orthant)."""
    if len(sys.variables) != 2:
        raise DomainError(f"need exactly two variables, got {sys.variables}")
    rows = sys.bind(bindings or {})
    verts = vertices_from_rows(rows, tol)
    exact = all(not isinstance(x, float) for row in rows for x in row)
    rows = [tuple(row) for row in rows] + [
        tuple(Fraction(x) if exact else float(x) for x in o) for o in ORTHANT]
    return RateRegion2D(tuple(verts), tuple(rows), sys)


class ContainmentCheck(NamedTuple):
    holds: bool
    max_violation: float
    worst_vertex: tuple | None


def contains(outer: RateRegion2D, inner: RateRegion2D, tol: float = VERTEX_TOL) -> ContainmentCheck:
    """Vertex-wise test of ``inner`` against every inequality of ``outer``."""
    worst, where = 0.0, None
    for v in inner.vertices:
        for a1, a2, b in outer.halfspaces:
            viol = float(a1 * v[0] + a2 * v[1] - b)
            if viol > worst:
                worst, where = viol, v
    return ContainmentCheck(worst <= tol, worst, where)


def point_region(points: Sequence[tuple]) -> RateRegion2D:
    """Convex hull of ``points`` with halfspaces read off its edges."""
    hull = hull_2d(tuple(float(x) for x in p) for p in points)
    return RateRegion2D(tuple(hull), tuple(_hull_rows(hull)))


def _linf(a1, a2, b):
    s = max(abs(a1), abs(a2))
    return (a1 / s, a2 / s, b / s)


def _hull_rows(h: list[tuple]) -> list[tuple]:
    if not h:
        return [(0.0, 0.0, -1.0)]
    if len(h) == 1:
        (x, y), = h
        return [(1.0, 0.0, x), (-1.0, 0.0, -x), (0.0, 1.0, y), (0.0, -1.0, -y)]
    if len(h) == 2:
        p, q = h
        dx, dy = q[0] - p[0], q[1] - p[1]
        n = (dy, -dx)
        return [
            _linf(n[0], n[1], n[0] * p[0] + n[1] * p[1]),
            _linf(-n[0], -n[1], -(n[0] * p[0] + n[1] * p[1])),
            _linf(dx, dy, dx * q[0] + dy * q[1]),
            _linf(-dx, -dy, -(dx * p[0] + dy * p[1])),
        ]
    rows = []
    for i, p in enumerate(h):
        q = h[(i + 1) % len(h)]
        n = (q[1] - p[1], p[0] - q[0])
        rows.append(_linf(n[0], n[1], n[0] * p[0] + n[1] * p[1]))
    return rows


def convex_union(regions: Sequence[RateRegion2D]) -> RateRegion2D:
    """Time-sharing closure: convex hull of the union of the regions."""
    if not regions:
        raise DomainError("convex_union needs at least one region")
    return point_region([v for r in regions for v in r.vertices])


# -- CSV ---------------------------------------------------------------------

INEQ_HEADER = ["kind", "c12", "ineq_id", "coef_Rz", "coef_Ry", "rhs"]
VERTEX_HEADER = ["kind", "c12", "vertex_Rz", "vertex_Ry"]


def write_region_csv(ineq_path, vertex_path, kind: str, c12: float, region: RateRegion2D,
                     append: bool = False):
    mode = "a" if append else "w"
    with open(ineq_path, mode, newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if not append:
            w.writerow(INEQ_HEADER)
        for i, (a1, a2, b) in enumerate(region.halfspaces):
            w.writerow([kind, repr(float(c12)), i, repr(float(a1)), repr(float(a2)), repr(float(b))])
    write_vertex_csv(vertex_path, kind, c12, region, append=append)


def write_vertex_csv(path, kind: str, c12: float, region: RateRegion2D, append: bool = False):
    with open(path, "a" if append else "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        if not append:
            w.writerow(VERTEX_HEADER)
        for v in region.vertices:
            w.writerow([kind, repr(float(c12)), repr(float(v[0])), repr(float(v[1]))])


def read_region_csv(ineq_path, vertex_path) -> dict[tuple[str, float], RateRegion2D]:
    """Regions keyed by ``(kind, c12)``."""
    rows: dict = {}
    verts: dict = {}
    with open(ineq_path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            key = (rec["kind"], float(rec["c12"]))
            rows.setdefault(key, []).append(
                (float(rec["coef_Rz"]), float(rec["coef_Ry"]), float(rec["rhs"])))
    with open(vertex_path, newline="", encoding="utf-8") as fh:
        for rec in csv.DictReader(fh):
            key = (rec["kind"], float(rec["c12"]))
            verts.setdefault(key, []).append((float(rec["vertex_Rz"]), float(rec["vertex_Ry"])))
    return {k: RateRegion2D(tuple(verts.get(k, ())), tuple(r)) for k, r in rows.items()}

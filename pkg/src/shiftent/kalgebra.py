"""Exact arithmetic in K^Lambda for a finite abelian group K.

K is a product of cyclic groups Z/m_1 x ... x Z/m_r.  Vectors are sparse
maps from arbitrary-precision integer indices to group elements; only
nonzero entries are stored.  Subgroups of the big product are represented
by generator lists plus a canonical reduced form computed per prime-power
component, which gives exact cardinalities without ever materialising the
ambient group.

Two engines coexist on purpose.  The canonical engine splits every cyclic
factor into its prime-power parts (CRT) and keeps a Howell-style echelon
form over each Z/p^e.  The enumeration engine is a deliberately dumb
breadth-first closure under addition, used as an independent oracle for
cardinalities and membership.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

__all__ = [
    "GroupSpec",
    "SparseVector",
    "SubgroupSpan",
    "EnumeratedSpan",
    "OverCap",
    "GroupMismatchError",
    "EmptyIndexSetError",
    "vector",
    "zero_vector",
    "unit_vector",
    "delta_vector",
    "delta_subgroup",
    "span",
    "span_sum",
    "enumerate_span",
    "is_direct",
    "membership",
]


class GroupMismatchError(ValueError):
    """Raised when vectors or spans over different group specs are mixed."""


class EmptyIndexSetError(ValueError):
    """Raised for the diagonal over an empty index set (it is just {0})."""


def _factorize(n: int) -> dict[int, int]:
    factors: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        factors[n] = factors.get(n, 0) + 1
    return factors


@dataclass(frozen=True)
class GroupSpec:
    """Finite abelian coefficient group Z/m_1 x ... x Z/m_r, every m_i >= 2."""

    orders: tuple[int, ...]

    def __init__(self, orders: Iterable[int]):
        object.__setattr__(self, "orders", tuple(int(m) for m in orders))
        if not self.orders:
            raise ValueError("group spec needs at least one cyclic factor")
        for i, m in enumerate(self.orders):
            if m < 2:
                raise ValueError(f"orders[{i}] = {m}: every cyclic order must be >= 2")

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def order(self) -> int:
        return math.prod(self.orders)

    @property
    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, residues: Sequence[int]) -> tuple[int, ...]:
        if len(residues) != self.rank:
            raise ValueError(f"element needs {self.rank} residues, got {len(residues)}")
        return tuple(int(x) % m for x, m in zip(residues, self.orders))

    def add(self, a: Sequence[int], b: Sequence[int]) -> tuple[int, ...]:
        return tuple((x + y) % m for x, y, m in zip(a, b, self.orders))

    def neg(self, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((-x) % m for x, m in zip(a, self.orders))

    def scale(self, c: int, a: Sequence[int]) -> tuple[int, ...]:
        return tuple((c * x) % m for x, m in zip(a, self.orders))

    def generators(self) -> tuple[tuple[int, ...], ...]:
        """One unit generator per cyclic factor."""
        eye = []
        for i in range(self.rank):
            g = [0] * self.rank
            g[i] = 1
            eye.append(tuple(g))
        return tuple(eye)

    def elements(self) -> Iterator[tuple[int, ...]]:
        return itertools.product(*(range(m) for m in self.orders))

    def prime_layout(self) -> tuple[tuple[int, int, tuple[int, ...]], ...]:
        """CRT layout: (p, max exponent E, per-component exponent of p)."""
        primes: dict[int, list[int]] = {}
        for m in self.orders:
            for p in _factorize(m):
                primes.setdefault(p, [])
        for p, exps in primes.items():
            for m in self.orders:
                e = 0
                while m % p == 0:
                    e += 1
                    m //= p
                exps.append(e)
        return tuple((p, max(exps), tuple(exps)) for p, exps in sorted(primes.items()))

    def to_json(self) -> dict:
        return {"orders": list(self.orders)}

    @classmethod
    def from_json(cls, data: Mapping) -> "GroupSpec":
        return cls(data["orders"])


# Prime layouts are tiny; memoise by spec identity-equivalent key.
_LAYOUT_CACHE: dict[tuple[int, ...], tuple] = {}


def _layout(group: GroupSpec) -> tuple[tuple[int, int, tuple[int, ...]], ...]:
    key = group.orders
    if key not in _LAYOUT_CACHE:
        _LAYOUT_CACHE[key] = group.prime_layout()
    return _LAYOUT_CACHE[key]


@dataclass(frozen=True)
class SparseVector:
    """Finitely supported element of K^Lambda, entries sorted by index.

    Indices are arbitrary-precision integers; zero entries are never stored.
    """

    group: GroupSpec
    items: tuple[tuple[int, tuple[int, ...]], ...]

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.items)

    def get(self, index: int) -> tuple[int, ...]:
        for i, v in self.items:
            if i == index:
                return v
        return self.group.zero

    def as_dict(self) -> dict[int, tuple[int, ...]]:
        return dict(self.items)

    def is_zero(self) -> bool:
        return not self.items

    def add(self, other: "SparseVector") -> "SparseVector":
        if other.group != self.group:
            raise GroupMismatchError("cannot add vectors over different groups")
        acc = dict(self.items)
        for i, v in other.items:
            cur = acc.get(i)
            s = self.group.add(cur, v) if cur is not None else v
            if any(s):
                acc[i] = s
            elif cur is not None:
                del acc[i]
        return SparseVector(self.group, tuple(sorted(acc.items())))

    def neg(self) -> "SparseVector":
        return SparseVector(
            self.group, tuple((i, self.group.neg(v)) for i, v in self.items)
        )

    def sub(self, other: "SparseVector") -> "SparseVector":
        return self.add(other.neg())

    def scale(self, c: int) -> "SparseVector":
        acc = []
        for i, v in self.items:
            s = self.group.scale(c, v)
            if any(s):
                acc.append((i, s))
        return SparseVector(self.group, tuple(acc))

    def to_json(self) -> dict:
        return {"entries": {str(i): list(v) for i, v in self.items}}

    @classmethod
    def from_json(cls, group: GroupSpec, data: Mapping) -> "SparseVector":
        return vector(group, {int(k): v for k, v in data["entries"].items()})


def vector(group: GroupSpec, entries: Mapping[int, Sequence[int] | int]) -> SparseVector:
    """Build a sparse vector, reducing residues and dropping zero entries.

    A bare int value is shorthand for an element of a rank-1 group.
    """
    acc = {}
    for i, val in entries.items():
        if isinstance(val, int):
            if group.rank != 1:
                raise ValueError("int entry shorthand needs a rank-1 group")
            val = (val,)
        v = group.reduce(val)
        if any(v):
            acc[int(i)] = v
    return SparseVector(group, tuple(sorted(acc.items())))


def zero_vector(group: GroupSpec) -> SparseVector:
    return SparseVector(group, ())


def unit_vector(group: GroupSpec, index: int, element: Sequence[int] | None = None) -> SparseVector:
    """Singleton-support vector; defaults to the first unit generator of K."""
    if element is None:
        element = group.generators()[0]
    return vector(group, {index: element})


def delta_vector(group: GroupSpec, element: Sequence[int], index_set: Iterable[int]) -> SparseVector:
    """Diagonal vector: the same element a at every index of S."""
    a = group.reduce(element)
    return vector(group, {i: a for i in index_set})


# ---------------------------------------------------------------------------
# Canonical engine: Howell-style echelon forms over Z/p^e per prime.
# ---------------------------------------------------------------------------

Col = tuple[int, int]  # (big index, component position); tuple order = column order


def _p_valuation(v: int, p: int) -> int:
    a = 0
    while v % p == 0:
        v //= p
        a += 1
    return a


class _HowellForm:
    """Row module over Z/q, q = p^E, maintained in reduced echelon shape.

    Kept rows have strictly increasing pivot columns; pivot entries are
    normalised to exact powers of p; stabiliser rows (q/pivot times a row)
    are folded in so that leading coefficients at each column form the full
    ideal, which is what makes cardinalities and membership exact.
    """

    def __init__(self, p: int, q: int):
        self.p = p
        self.q = q
        self.rows: dict[Col, dict[Col, int]] = {}  # pivot column -> row

    def _scale(self, row: dict[Col, int], c: int) -> dict[Col, int]:
        out = {}
        for col, v in row.items():
            s = (v * c) % self.q
            if s:
                out[col] = s
        return out

    def _subtract(self, row: dict[Col, int], c: int, other: dict[Col, int]) -> dict[Col, int]:
        out = dict(row)
        for col, v in other.items():
            s = (out.get(col, 0) - c * v) % self.q
            if s:
                out[col] = s
            else:
                out.pop(col, None)
        return out

    def insert(self, row: dict[Col, int]) -> None:
        row = {c: v % self.q for c, v in row.items() if v % self.q}
        while row:
            col = min(row)
            v = row[col]
            b = _p_valuation(v, self.p)
            kept = self.rows.get(col)
            if kept is None:
                # Normalise so the pivot entry is exactly p^b.
                unit = v // (self.p ** b)
                inv = pow(unit, -1, self.q)
                row = self._scale(row, inv)
                self.rows[col] = row
                stab = self.q // (self.p ** b)
                if stab != self.q:  # q * row = 0, nothing to fold in
                    self.insert(self._scale(row, stab))
                return
            h = kept[col]  # p^a by construction
            a = _p_valuation(h, self.p)
            if b >= a:
                t = (self.p ** (b - a)) * (v // (self.p ** b))
                row = self._subtract(row, t % self.q, kept)
            else:
                # Incoming row has the smaller valuation: it becomes the pivot.
                unit = v // (self.p ** b)
                inv = pow(unit, -1, self.q)
                row = self._scale(row, inv)
                del self.rows[col]
                self.rows[col] = row
                stab = self.q // (self.p ** b)
                if stab != self.q:
                    self.insert(self._scale(row, stab))
                row = kept  # re-insert the displaced row

    def finalize(self) -> tuple[tuple[tuple[Col, int], ...], ...]:
        """Reduce entries above each pivot modulo the pivot; emit sorted rows."""
        pivots = sorted(self.rows)
        for ci, c in enumerate(pivots):
            for later in pivots[ci + 1:]:
                h = self.rows[later][later]
                v = self.rows[c].get(later, 0)
                if v >= h:
                    self.rows[c] = self._subtract(self.rows[c], v // h, self.rows[later])
        out = []
        for c in sorted(self.rows):
            row = self.rows[c]
            out.append(tuple(sorted(row.items())))
        return tuple(out)

    def cardinality(self) -> int:
        n = 1
        for c, row in self.rows.items():
            n *= self.q // row[c]
        return n


def _prime_rows(vec: SparseVector, p: int, big_e: int, exps: tuple[int, ...]) -> dict[Col, int]:
    """Project a vector into the Sylow p-part, aligned inside Z/p^E.

    A residue x mod m with p-part Z/p^e embeds as (x mod p^e) * p^(E-e)
    mod p^E; spans and cardinalities are preserved component by component.
    """
    q = p ** big_e
    row: dict[Col, int] = {}
    for i, residues in vec.items:
        for comp, (x, e) in enumerate(zip(residues, exps)):
            if e == 0:
                continue
            val = (x % (p ** e)) * (p ** (big_e - e)) % q
            if val:
                row[(i, comp)] = val
    return row


@dataclass(frozen=True)
class SubgroupSpan:
    """Subgroup of K^Lambda: generators plus canonical form and exact size.

    `canonical` is a tuple of per-prime Howell forms; two spans are equal
    exactly when they describe the same subgroup.
    """

    group: GroupSpec
    generators: tuple[SparseVector, ...]
    canonical: tuple
    cardinality: int

    def __eq__(self, other) -> bool:
        if not isinstance(other, SubgroupSpan):
            return NotImplemented
        return self.group == other.group and self.canonical == other.canonical

    def __hash__(self) -> int:
        return hash((self.group, self.canonical))


def span(group: GroupSpec, gens: Iterable[SparseVector]) -> SubgroupSpan:
    """Subgroup generated by the given vectors, with canonical form and size."""
    gens = tuple(gens)
    for g in gens:
        if g.group != group:
            raise GroupMismatchError("generator over a different group spec")
    forms = []
    cardinality = 1
    for p, big_e, exps in _layout(group):
        hw = _HowellForm(p, p ** big_e)
        for g in gens:
            row = _prime_rows(g, p, big_e, exps)
            if row:
                hw.insert(row)
        rows = hw.finalize()
        if rows:
            forms.append((p, big_e, rows))
        cardinality *= hw.cardinality()
    return SubgroupSpan(group, gens, tuple(forms), cardinality)


def span_sum(spans: Sequence[SubgroupSpan]) -> SubgroupSpan:
    """Sum of subgroups (the span of the pooled generators)."""
    if not spans:
        raise ValueError("need at least one span")
    group = spans[0].group
    pooled: list[SparseVector] = []
    for s in spans:
        if s.group != group:
            raise GroupMismatchError("cannot sum spans over different groups")
        pooled.extend(s.generators)
    return span(group, pooled)


def delta_subgroup(group: GroupSpec, index_set: Iterable[int]) -> SubgroupSpan:
    """Diagonal copy of K spread over the index set S; S must be nonempty."""
    s = sorted(set(index_set))
    if not s:
        raise EmptyIndexSetError("diagonal subgroup over an empty index set")
    return span(group, [delta_vector(group, g, s) for g in group.generators()])


def membership(x: SparseVector, sub: SubgroupSpan) -> bool:
    """Exact membership test against the canonical form."""
    if x.group != sub.group:
        raise GroupMismatchError("vector and span over different groups")
    layout = {p: (big_e, exps) for p, big_e, exps in _layout(sub.group)}
    residual = {p: _prime_rows(x, p, big_e, exps) for p, (big_e, exps) in layout.items()}
    forms = {p: rows for p, _, rows in sub.canonical}
    for p, (big_e, _) in layout.items():
        q = p ** big_e
        rem = residual[p]
        for row_items in forms.get(p, ()):
            row = dict(row_items)
            col = row_items[0][0]
            v = rem.get(col, 0)
            if v == 0:
                continue
            h = row[col]
            if v % h:
                return False
            t = v // h
            for c2, w in row.items():
                s = (rem.get(c2, 0) - t * w) % q
                if s:
                    rem[c2] = s
                else:
                    rem.pop(c2, None)
        if rem:
            return False
    return True


# ---------------------------------------------------------------------------
# Enumeration engine: breadth-first closure, the independent dumb oracle.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OverCap:
    """Signal that a closure exceeded the enumeration cap (not an error)."""

    cap: int
    reached: int


@dataclass
class EnumeratedSpan:
    """Materialised closure of a span: exact element count plus the elements.

    Elements are held densely over the touched columns and converted back to
    sparse vectors lazily, so counting stays cheap even when supports are
    wide.
    """

    group: GroupSpec
    columns: tuple[Col, ...]
    _mods: np.ndarray
    _rows: set[bytes]

    @property
    def count(self) -> int:
        return len(self._rows)

    def contains(self, x: SparseVector) -> bool:
        if x.group != self.group:
            raise GroupMismatchError("vector over a different group spec")
        row = _densify(x, self.columns)
        if row is None:
            return False
        return row.tobytes() in self._rows

    def vectors(self) -> Iterator[SparseVector]:
        for raw in sorted(self._rows):
            arr = np.frombuffer(raw, dtype=np.uint16)
            entries: dict[int, list[int]] = {}
            for (idx, comp), val in zip(self.columns, arr.tolist()):
                if val:
                    entries.setdefault(idx, [0] * self.group.rank)[comp] = val
            yield vector(self.group, {i: tuple(v) for i, v in entries.items()})

    def __iter__(self) -> Iterator[SparseVector]:
        return self.vectors()

    def __len__(self) -> int:
        return self.count


def _densify(x: SparseVector, columns: tuple[Col, ...]) -> np.ndarray | None:
    pos = {c: k for k, c in enumerate(columns)}
    row = np.zeros(len(columns), dtype=np.uint16)
    for i, residues in x.items:
        for comp, val in enumerate(residues):
            if val:
                k = pos.get((i, comp))
                if k is None:
                    return None  # support outside the enumerated columns
                row[k] = val
    return row


DEFAULT_ENUM_CAP = 2 ** 20


def enumerate_span(sub: SubgroupSpan, cap: int = DEFAULT_ENUM_CAP) -> EnumeratedSpan | OverCap:
    """Breadth-first closure of the generators under addition.

    Kept deliberately independent of the canonical engine: no echelon data
    is consulted, elements are just added until the set closes or the cap
    is exceeded.
    """
    group = sub.group
    cols = sorted({(i, comp) for g in sub.generators for i, _ in g.items for comp in range(group.rank)})
    columns = tuple(cols)
    mods = np.array([group.orders[comp] for _, comp in columns], dtype=np.uint16)
    gens = []
    for g in sub.generators:
        row = _densify(g, columns)
        if row is not None and row.any():
            gens.append(row)
    zero = np.zeros(len(columns), dtype=np.uint16)
    seen: set[bytes] = {zero.tobytes()}
    frontier = [zero]
    while frontier:
        nxt = []
        for cur in frontier:
            for g in gens:
                new = (cur + g) % mods if len(columns) else cur
                key = new.tobytes()
                if key not in seen:
                    seen.add(key)
                    if len(seen) > cap:
                        return OverCap(cap=cap, reached=len(seen))
                    nxt.append(new)
        frontier = nxt
    return EnumeratedSpan(group, columns, mods, seen)


def is_direct(group: GroupSpec, spans: Sequence[SubgroupSpan]) -> bool:
    """Incremental independence: each span meets the sum so far only in 0.

    For finite abelian groups |A + B| = |A| * |B| / |A /\\ B|, so the prefix
    sums multiply exactly when every intersection is trivial.
    """
    if not spans:
        raise ValueError("need at least one span")
    pooled: list[SparseVector] = []
    running = 1
    for s in spans:
        if s.group != group:
            raise GroupMismatchError("span over a different group spec")
        pooled.extend(s.generators)
        combined = span(group, pooled)
        if combined.cardinality != running * s.cardinality:
            return False
        running = combined.cardinality
    return True

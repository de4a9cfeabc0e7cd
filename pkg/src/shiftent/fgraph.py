"""Finitely presented self-maps of countable index sets.

A map spec is a finite functional graph (the core) plus a list of infinite
attachments of four shapes: backward chains ("string": s_t -> s_{t-1}, the
bottom feeding a core vertex), forward rays ("orbit": a_t -> a_{t+1}),
families of finite backward chains of strictly growing heights anchored at
one core vertex ("ladder"), and families of disjoint cycles of strictly
growing lengths ("periodic_ladder").  Everything the entropy dichotomy
needs -- iteration, fibers, periodic points, boundedness, the eventual
image, finite truncations -- is computed exactly on this presentation.

Element addressing: core vertices are plain ints.  Attachment elements are
tuples led by the attachment index; a copy coordinate may be omitted when
the copy is 0.  Canonical forms are (i, copy, t) for strings and orbits and
(i, copy, chain, rung) / (i, copy, cycle, position) for the ladder kinds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

__all__ = [
    "OMEGA",
    "CardinalCount",
    "AffineRule",
    "Attachment",
    "FiniteMap",
    "MapSpec",
    "Invariants",
    "FiberResult",
    "InfiniteFamily",
    "PeriodicPoints",
    "Bounded",
    "Unbounded",
    "UnboundedWitness",
    "EventualImage",
    "Truncation",
    "UnknownElementError",
    "STRING",
    "ORBIT",
    "LADDER",
    "PERIODIC_LADDER",
    "compose",
    "power",
    "quasi_period",
    "iterate",
    "preimage",
    "periodic_points",
    "invariants",
    "is_bounded",
    "has_finite_fibers",
    "eventual_image",
    "truncate",
    "element_label",
]

STRING = "string"
ORBIT = "orbit"
LADDER = "ladder"
PERIODIC_LADDER = "periodic_ladder"

KINDS = (STRING, ORBIT, LADDER, PERIODIC_LADDER)


class UnknownElementError(ValueError):
    """Raised when an element address does not resolve in the spec."""


@dataclass(frozen=True)
class CardinalCount:
    """Natural number saturating at omega.

    Addition and order treat omega as the absorbing top element.  Anything
    genuinely infinite in this library is only ever counted as 'omega'; the
    dichotomy needs no finer cardinal arithmetic.
    """

    finite: bool
    value: int = 0

    @classmethod
    def of(cls, raw: Union[int, str, "CardinalCount"]) -> "CardinalCount":
        if isinstance(raw, CardinalCount):
            return raw
        if raw == "omega":
            return OMEGA
        n = int(raw)
        if n < 0:
            raise ValueError("cardinal counts are nonnegative")
        return cls(True, n)

    def __add__(self, other: "CardinalCount") -> "CardinalCount":
        if self.finite and other.finite:
            return CardinalCount(True, self.value + other.value)
        return OMEGA

    def __lt__(self, other: "CardinalCount") -> bool:
        if self.is_omega:
            return False
        return other.is_omega or self.value < other.value

    def __le__(self, other: "CardinalCount") -> bool:
        return self == other or self < other

    def __bool__(self) -> bool:
        return not self.finite or self.value > 0

    @property
    def is_omega(self) -> bool:
        return not self.finite

    def to_json(self) -> Union[int, str]:
        return "omega" if self.is_omega else self.value

    def __repr__(self) -> str:
        return "omega" if self.is_omega else str(self.value)


OMEGA = CardinalCount(False)


@dataclass(frozen=True)
class AffineRule:
    """Affine progression a*n + b used for chain heights and cycle lengths."""

    a: int
    b: int

    def __call__(self, n: int) -> int:
        return self.a * n + self.b

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b}


@dataclass(frozen=True)
class Attachment:
    """One infinite attachment hanging off the core.

    kind         one of string | orbit | ladder | periodic_ladder
    multiplicity how many disjoint copies (finite or omega)
    anchor       core vertex receiving the chain bottoms; required for
                 string and ladder, forbidden for the self-contained kinds
    height       chain-height rule b_m = a*m + b for ladders (a >= 1, b >= 0)
    length       cycle-length rule |P_n| = a*n + b for periodic ladders
                 (a >= 1 and a + b >= 1, so |P_n| >= n for all n >= 1)
    """

    kind: str
    multiplicity: CardinalCount = CardinalCount(True, 1)
    anchor: int | None = None
    height: AffineRule | None = None
    length: AffineRule | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown attachment kind {self.kind!r}")
        if not self.multiplicity:
            raise ValueError("attachment multiplicity must be positive")
        if self.kind in (STRING, LADDER):
            if self.anchor is None:
                raise ValueError(f"{self.kind} attachment needs an anchor")
        else:
            if self.anchor is not None:
                raise ValueError(f"{self.kind} attachment is self-contained, anchor forbidden")
        if self.kind == LADDER:
            if self.height is None:
                raise ValueError("ladder attachment needs a height rule")
            if self.height.a < 1 or self.height.b < 0:
                raise ValueError("ladder heights need a >= 1 and b >= 0")
        elif self.height is not None:
            raise ValueError("height rule only applies to ladders")
        if self.kind == PERIODIC_LADDER:
            if self.length is None:
                raise ValueError("periodic ladder needs a length rule")
            if self.length.a < 1 or self.length.a + self.length.b < 1:
                raise ValueError("cycle lengths need a >= 1 and a + b >= 1")
        elif self.length is not None:
            raise ValueError("length rule only applies to periodic ladders")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "multiplicity": self.multiplicity.to_json()}
        if self.anchor is not None:
            out["anchor"] = self.anchor
        if self.height is not None:
            out["height"] = self.height.to_json()
        if self.length is not None:
            out["length"] = self.length.to_json()
        return out


@dataclass(frozen=True)
class FiniteMap:
    """Total self-map of {0, ..., size-1} given by its value table."""

    size: int
    next: tuple[int, ...]

    def __init__(self, size: int, next: Iterable[int]):
        object.__setattr__(self, "size", int(size))
        object.__setattr__(self, "next", tuple(int(v) for v in next))
        if self.size < 0:
            raise ValueError("size must be nonnegative")
        if len(self.next) != self.size:
            raise ValueError(f"next table has {len(self.next)} entries for size {self.size}")
        for i, v in enumerate(self.next):
            if not 0 <= v < self.size:
                raise ValueError(f"next[{i}] = {v} out of range")

    def __call__(self, v: int) -> int:
        return self.next[v]

    def is_permutation(self) -> bool:
        return len(set(self.next)) == self.size

    def to_json(self) -> dict:
        return {"size": self.size, "next": list(self.next)}

    @classmethod
    def from_json(cls, data: Mapping) -> "FiniteMap":
        return cls(data["size"], data["next"])


def compose(outer: FiniteMap, inner: FiniteMap) -> FiniteMap:
    """(outer o inner)(i) = outer(inner(i)); both maps on the same vertex set."""
    if outer.size != inner.size:
        raise ValueError("cannot compose maps of different sizes")
    return FiniteMap(outer.size, tuple(outer.next[inner.next[i]] for i in range(inner.size)))


def power(fmap: FiniteMap, k: int) -> FiniteMap:
    """k-fold composition via binary powering; k = 0 is the identity."""
    if k < 0:
        raise ValueError("negative power of a non-invertible map")
    result = FiniteMap(fmap.size, tuple(range(fmap.size)))
    base = fmap
    while k:
        if k & 1:
            result = compose(base, result)
        base = compose(base, base)
        k >>= 1
    return result


def _cycle_analysis(fmap: FiniteMap) -> tuple[list[bool], list[int], list[int]]:
    """Returns (on_cycle flags, tail depth to the cycle set, cycle lengths).

    Tail depth is 0 on cycle vertices; cycle lengths lists each cycle once.
    """
    n = fmap.size
    indeg = [0] * n
    for v in fmap.next:
        indeg[v] += 1
    queue = [v for v in range(n) if indeg[v] == 0]
    removed = [False] * n
    while queue:
        v = queue.pop()
        removed[v] = True
        w = fmap.next[v]
        indeg[w] -= 1
        if indeg[w] == 0:
            queue.append(w)
    on_cycle = [not r for r in removed]
    lengths = []
    seen = [False] * n
    for v in range(n):
        if on_cycle[v] and not seen[v]:
            length = 0
            w = v
            while not seen[w]:
                seen[w] = True
                length += 1
                w = fmap.next[w]
            lengths.append(length)
    depth = [0] * n
    children: list[list[int]] = [[] for _ in range(n)]
    for v in range(n):
        if not on_cycle[v]:
            children[fmap.next[v]].append(v)
    stack = [v for v in range(n) if on_cycle[v]]
    while stack:
        v = stack.pop()
        for c in children[v]:
            depth[c] = depth[v] + 1
            stack.append(c)
    return on_cycle, depth, lengths


def quasi_period(fmap: FiniteMap) -> tuple[int, int]:
    """Least (n, m), n < m, with the n-th and m-th iterates equal as tables.

    Minimising n first and then m gives n = the longest tail and
    m = n + lcm of the cycle lengths; the empty map gets (0, 1).
    """
    if fmap.size == 0:
        return (0, 1)
    _, depth, lengths = _cycle_analysis(fmap)
    n = max(depth)
    m = n + math.lcm(*lengths)
    return (n, m)


@dataclass(frozen=True)
class MapSpec:
    """Core functional graph plus infinite attachments."""

    core: FiniteMap
    attachments: tuple[Attachment, ...] = ()

    def __init__(self, core: FiniteMap, attachments: Iterable[Attachment] = ()):
        object.__setattr__(self, "core", core)
        object.__setattr__(self, "attachments", tuple(attachments))
        for i, att in enumerate(self.attachments):
            if att.anchor is not None and not 0 <= att.anchor < core.size:
                raise ValueError(f"attachments[{i}].anchor = {att.anchor} not a core vertex")

    def to_json(self) -> dict:
        return {
            "core": self.core.to_json(),
            "attachments": [a.to_json() for a in self.attachments],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "MapSpec":
        atts = []
        for raw in data.get("attachments", ()):
            atts.append(
                Attachment(
                    kind=raw["kind"],
                    multiplicity=CardinalCount.of(raw.get("multiplicity", 1)),
                    anchor=raw.get("anchor"),
                    height=AffineRule(**raw["height"]) if "height" in raw else None,
                    length=AffineRule(**raw["length"]) if "length" in raw else None,
                )
            )
        return cls(FiniteMap.from_json(data["core"]), atts)


ElementId = Union[int, tuple]


def _resolve(spec: MapSpec, v: ElementId) -> ElementId:
    """Validate an element address and return its canonical form."""
    if isinstance(v, int):
        if not 0 <= v < spec.core.size:
            raise UnknownElementError(f"core vertex {v} out of range")
        return v
    if not isinstance(v, tuple) or not v or not isinstance(v[0], int):
        raise UnknownElementError(f"bad element address {v!r}")
    i = v[0]
    if not 0 <= i < len(spec.attachments):
        raise UnknownElementError(f"attachment index {i} out of range")
    att = spec.attachments[i]
    rest = v[1:]
    if att.kind in (STRING, ORBIT):
        if len(rest) == 1:
            copy, t = 0, rest[0]
        elif len(rest) == 2:
            copy, t = rest
        else:
            raise UnknownElementError(f"{att.kind} elements are (i, t) or (i, copy, t): {v!r}")
        _check_copy(att, copy, v)
        if t < 0:
            raise UnknownElementError(f"position {t} negative in {v!r}")
        return (i, copy, t)
    if len(rest) == 2:
        copy, (m, r) = 0, rest
    elif len(rest) == 3:
        copy, m, r = rest
    else:
        raise UnknownElementError(f"{att.kind} elements are (i, m, r) or (i, copy, m, r): {v!r}")
    _check_copy(att, copy, v)
    if att.kind == LADDER:
        if m < 0 or not 0 <= r <= att.height(m):
            raise UnknownElementError(f"rung {r} outside chain {m} (height {att.height(m)})")
    else:
        if m < 1 or not 0 <= r < att.length(m):
            raise UnknownElementError(f"position {r} outside cycle {m} (length {att.length(m)})")
    return (i, copy, m, r)


def _check_copy(att: Attachment, copy: int, v) -> None:
    if copy < 0:
        raise UnknownElementError(f"copy index negative in {v!r}")
    if att.multiplicity.finite and copy >= att.multiplicity.value:
        raise UnknownElementError(
            f"copy {copy} exceeds multiplicity {att.multiplicity.value} in {v!r}"
        )


def _step(spec: MapSpec, cv: ElementId) -> ElementId:
    """One application of the map to a canonical element."""
    if isinstance(cv, int):
        return spec.core.next[cv]
    att = spec.attachments[cv[0]]
    if att.kind == STRING:
        i, c, t = cv
        return (i, c, t - 1) if t > 0 else att.anchor
    if att.kind == ORBIT:
        i, c, t = cv
        return (i, c, t + 1)
    if att.kind == LADDER:
        i, c, m, r = cv
        return (i, c, m, r - 1) if r > 0 else att.anchor
    i, c, m, r = cv
    return (i, c, m, (r - 1) % att.length(m))


def iterate(spec: MapSpec, v: ElementId, k: int) -> ElementId:
    """k-fold application of the map to element v."""
    if k < 0:
        raise ValueError("iteration count must be nonnegative")
    cur = _resolve(spec, v)
    seen: dict[ElementId, int] = {}
    steps = 0
    while steps < k:
        if isinstance(cur, tuple) and spec.attachments[cur[0]].kind == ORBIT:
            i, c, t = cur
            return (i, c, t + (k - steps))  # forward rays never revisit
        if cur in seen:
            cycle = steps - seen[cur]
            for _ in range((k - steps) % cycle):
                cur = _step(spec, cur)
            return cur
        seen[cur] = steps
        cur = _step(spec, cur)
        steps += 1
    return cur


@dataclass(frozen=True)
class InfiniteFamily:
    """Description of an infinite batch of elements contributed by one attachment."""

    attachment: int
    kind: str
    description: str


@dataclass(frozen=True)
class FiberResult:
    """Preimage of a single element: exact when finite, flagged otherwise."""

    finite: bool
    elements: tuple[ElementId, ...]
    infinite_families: tuple[InfiniteFamily, ...] = ()


def _finite_copies(att: Attachment) -> range | None:
    return range(att.multiplicity.value) if att.multiplicity.finite else None


def preimage(spec: MapSpec, v: ElementId) -> FiberResult:
    """The full fiber of v, including chain bottoms feeding core anchors."""
    cv = _resolve(spec, v)
    if isinstance(cv, int):
        elems: list[ElementId] = [u for u in range(spec.core.size) if spec.core.next[u] == cv]
        families: list[InfiniteFamily] = []
        for i, att in enumerate(spec.attachments):
            if att.anchor != cv:
                continue
            if att.kind == STRING:
                copies = _finite_copies(att)
                if copies is None:
                    families.append(
                        InfiniteFamily(i, STRING, "bottom of every copy of the chain")
                    )
                else:
                    elems.extend((i, c, 0) for c in copies)
            elif att.kind == LADDER:
                # every chain bottom of every copy maps to the anchor
                families.append(
                    InfiniteFamily(i, LADDER, "bottom rung of every chain, all copies")
                )
        return FiberResult(not families, tuple(elems), tuple(families))
    att = spec.attachments[cv[0]]
    if att.kind == STRING:
        i, c, t = cv
        return FiberResult(True, ((i, c, t + 1),))
    if att.kind == ORBIT:
        i, c, t = cv
        return FiberResult(True, ((i, c, t - 1),) if t > 0 else ())
    if att.kind == LADDER:
        i, c, m, r = cv
        if r < att.height(m):
            return FiberResult(True, ((i, c, m, r + 1),))
        return FiberResult(True, ())  # chain tops have empty fibers
    i, c, m, r = cv
    return FiberResult(True, ((i, c, m, (r + 1) % att.length(m)),))


def has_finite_fibers(spec: MapSpec) -> bool:
    """True unless some anchor receives infinitely many chain bottoms.

    A ladder always pours the bottoms of infinitely many chains onto its
    anchor; a string does so only with omega many copies.  The other kinds
    keep every fiber at size <= core size + finitely many bottoms.
    """
    for att in spec.attachments:
        if att.kind == LADDER:
            return False
        if att.kind == STRING and att.multiplicity.is_omega:
            return False
    return True


@dataclass(frozen=True)
class PeriodicPoints:
    """Elements of period <= n, plus whether that already exhausts Per."""

    n: int
    elements: tuple[ElementId, ...]
    omega_families: tuple[InfiniteFamily, ...]
    complete: bool  # Per = Per_n


def periodic_points(spec: MapSpec, n: int) -> PeriodicPoints:
    """Per_n: core cycle vertices of length <= n plus short enough cycles."""
    if n < 1:
        raise ValueError("period bound must be >= 1")
    on_cycle, _, _ = _cycle_analysis(spec.core)
    elems: list[ElementId] = []
    max_core_cycle = 0
    seen = set()
    for v in range(spec.core.size):
        if on_cycle[v] and v not in seen:
            cyc = [v]
            w = spec.core.next[v]
            while w != v:
                cyc.append(w)
                w = spec.core.next[w]
            seen.update(cyc)
            max_core_cycle = max(max_core_cycle, len(cyc))
            if len(cyc) <= n:
                elems.extend(cyc)
    families: list[InfiniteFamily] = []
    has_pladder = False
    for i, att in enumerate(spec.attachments):
        if att.kind != PERIODIC_LADDER:
            continue
        has_pladder = True
        short = [m for m in range(1, n + 1) if att.length(m) <= n]
        if not short:
            continue
        copies = _finite_copies(att)
        if copies is None:
            families.append(
                InfiniteFamily(i, PERIODIC_LADDER, f"cycles {short} of omega many copies")
            )
            continue
        for c in copies:
            for m in short:
                elems.extend((i, c, m, r) for r in range(att.length(m)))
    complete = not has_pladder and max_core_cycle <= n
    return PeriodicPoints(n, tuple(sorted(elems, key=_sort_key)), tuple(families), complete)


def _sort_key(e: ElementId):
    return (0, e, ()) if isinstance(e, int) else (1, e[0], e)


@dataclass(frozen=True)
class Invariants:
    """The four structure counts deciding boundedness."""

    s: CardinalCount  # disjoint backward chains
    o: CardinalCount  # disjoint forward rays
    l: CardinalCount  # 0 or omega: ladders come only in infinite supply
    p: CardinalCount  # 0 or omega: same for periodic ladders

    def to_json(self) -> dict:
        return {k: getattr(self, k).to_json() for k in ("s", "o", "l", "p")}


def invariants(spec: MapSpec) -> Invariants:
    """Count the unbounded structures; any single (periodic) ladder already
    contains infinitely many disjoint ones, so l and p jump straight to omega."""
    s = CardinalCount.of(0)
    o = CardinalCount.of(0)
    l = CardinalCount.of(0)
    p = CardinalCount.of(0)
    for att in spec.attachments:
        if att.kind == STRING:
            s = s + att.multiplicity
        elif att.kind == ORBIT:
            o = o + att.multiplicity
        elif att.kind == LADDER:
            l = OMEGA
        else:
            p = OMEGA
    return Invariants(s, o, l, p)


LEMMA_TAGS = {
    STRING: "string",
    ORBIT: "orbit",
    LADDER: "ladder",
    PERIODIC_LADDER: "periodic-ladder",
}


@dataclass(frozen=True)
class UnboundedWitness:
    """Names the structure breaking boundedness and shows its first elements."""

    kind: str
    attachment: int
    lemma: str
    first_elements: tuple[ElementId, ...]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lemma": self.lemma,
            "attachment": self.attachment,
            "first_elements": [list(e) if isinstance(e, tuple) else e for e in self.first_elements],
        }


@dataclass(frozen=True)
class Bounded:
    """lambda^{-N}(Gamma \\ Per) is empty and Per = Per_N; qp repeats tables."""

    n: int
    qp: tuple[int, int]


@dataclass(frozen=True)
class Unbounded:
    witness: UnboundedWitness


BoundednessVerdict = Union[Bounded, Unbounded]


def _witness_for(spec: MapSpec, i: int) -> UnboundedWitness:
    att = spec.attachments[i]
    if att.kind in (STRING, ORBIT):
        first: tuple[ElementId, ...] = ((i, 0, 0), (i, 0, 1), (i, 0, 2))
    elif att.kind == LADDER:
        first = tuple((i, 0, m, 0) for m in range(3))
    else:
        first = tuple((i, 0, m, 0) for m in range(1, 4))
    return UnboundedWitness(att.kind, i, LEMMA_TAGS[att.kind], first)


def is_bounded(spec: MapSpec) -> BoundednessVerdict:
    """Bounded exactly when no attachment is present.

    A bare core gives N = max(1, longest tail, longest cycle): after N
    steps everything sits on a cycle whose length divides into Per_N, which
    is the finite-map face of the dichotomy.  Any attachment produces one
    of the four unbounded structures, reported with a witness.
    """
    if spec.attachments:
        return Unbounded(_witness_for(spec, 0))
    if spec.core.size == 0:
        return Bounded(1, quasi_period(spec.core))
    _, depth, lengths = _cycle_analysis(spec.core)
    n = max(1, max(depth), max(lengths))
    return Bounded(n, quasi_period(spec.core))


@dataclass(frozen=True)
class EventualImage:
    """Intersection of all forward images, described piecewise.

    Core vertices are listed exactly.  Strings survive whole (every element
    has arbitrarily deep preimages along its own chain) and periodic-ladder
    cycles survive whole; orbits and ladder chains die out, but anchors of
    strings and ladders keep their forward paths alive through the core.
    """

    core_vertices: frozenset[int]
    whole_attachments: tuple[int, ...]
    image_core: frozenset[int]
    restriction_surjective: bool

    def to_json(self) -> dict:
        return {
            "core_vertices": sorted(self.core_vertices),
            "whole_attachments": list(self.whole_attachments),
            "image_core": sorted(self.image_core),
            "restriction_surjective": self.restriction_surjective,
        }


def eventual_image(spec: MapSpec) -> EventualImage:
    on_cycle, _, _ = _cycle_analysis(spec.core)
    core_part = {v for v in range(spec.core.size) if on_cycle[v]}
    whole: list[int] = []
    string_anchors = set()
    for i, att in enumerate(spec.attachments):
        if att.kind in (STRING, LADDER):
            # anchor gains arbitrarily deep preimages through the chains,
            # hence so does its whole forward path
            v = att.anchor
            while v not in core_part:
                core_part.add(v)
                v = spec.core.next[v]
        if att.kind == STRING:
            whole.append(i)
            string_anchors.add(att.anchor)
        elif att.kind == PERIODIC_LADDER:
            whole.append(i)
    image_core = {spec.core.next[v] for v in core_part} | string_anchors
    surjective = core_part <= image_core
    # orbit attachments contribute nothing and break nothing: their elements
    # run out of deep preimages, and none of them is in the eventual image
    return EventualImage(
        frozenset(core_part), tuple(whole), frozenset(image_core), surjective
    )


@dataclass(frozen=True)
class Truncation:
    """Finite window of a spec: a FiniteMap plus the id <-> element table.

    Core vertices keep their ids.  For each attachment all copies are
    included when the multiplicity is finite, and `depth` many when it is
    omega.  The last element of each truncated orbit has its image
    redirected to itself; those artificial fixed points are listed so that
    support-based arguments can avoid them.
    """

    map: FiniteMap
    elements: tuple[ElementId, ...]
    artificial_fixed_points: tuple[int, ...]

    def id_of(self, element: ElementId) -> int:
        return self._index[element]

    def original(self, vid: int) -> ElementId:
        return self.elements[vid]

    @cached_property
    def _index(self) -> dict[ElementId, int]:
        return {e: i for i, e in enumerate(self.elements)}

    def to_json(self) -> dict:
        return {
            "map": self.map.to_json(),
            "elements": [list(e) if isinstance(e, tuple) else e for e in self.elements],
            "artificial_fixed_points": list(self.artificial_fixed_points),
        }


def truncate(spec: MapSpec, depth: int) -> Truncation:
    """Forward-closed window: the core, the first `depth` elements of each
    chain and ray, ladder chains 0..depth, and periodic cycles 1..depth."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    elements: list[ElementId] = list(range(spec.core.size))
    for i, att in enumerate(spec.attachments):
        copies = _finite_copies(att)
        span = copies if copies is not None else range(depth)
        for c in span:
            if att.kind in (STRING, ORBIT):
                elements.extend((i, c, t) for t in range(depth))
            elif att.kind == LADDER:
                for m in range(depth + 1):
                    elements.extend((i, c, m, r) for r in range(att.height(m) + 1))
            else:
                for m in range(1, depth + 1):
                    elements.extend((i, c, m, r) for r in range(att.length(m)))
    index = {e: k for k, e in enumerate(elements)}
    next_table = []
    artificial = []
    for k, e in enumerate(elements):
        if isinstance(e, int):
            next_table.append(spec.core.next[e])
            continue
        att = spec.attachments[e[0]]
        if att.kind == ORBIT and e[2] == depth - 1:
            next_table.append(k)  # ray leaves the window; pin it in place
            artificial.append(k)
            continue
        next_table.append(index[_step(spec, e)])
    return Truncation(FiniteMap(len(elements), next_table), tuple(elements), tuple(artificial))


def element_label(e: ElementId) -> str:
    """Short printable name for reports."""
    if isinstance(e, int):
        return f"core/{e}"
    if len(e) == 3:
        return f"att{e[0]}/c{e[1]}/t{e[2]}"
    return f"att{e[0]}/c{e[1]}/chain{e[2]}:{e[3]}"

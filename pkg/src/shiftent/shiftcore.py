"""Coordinate-shift operators on finite windows.

A self-map f of a finite index window Lambda induces the shift
S_f(x)[i] = x[f(i)] on the group K^Lambda.  The functions here apply
such shifts to sparse vectors, measure span growth along shift
trajectories, classify the entropy of the full shift from the map
structure, and check the basic operator laws on sampled inputs.
"""

import itertools
import math
import random
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from shiftent.fgraph import (
    LADDER,
    LEMMA_TAGS,
    ORBIT,
    PERIODIC_LADDER,
    STRING,
    Bounded,
    FiniteMap,
    MapSpec,
    Truncation,
    UnboundedWitness,
    compose,
    element_label,
    has_finite_fibers,
    invariants,
    is_bounded,
    iterate,
    power,
    truncate,
)
from shiftent.kalgebra import (
    GroupSpec,
    SparseVector,
    _factorize,
    span,
    unit_vector,
    vector,
    zero_vector,
)


class WindowSupportError(ValueError):
    """Vector support leaves the window where the shift is faithful."""


class FiniteFibersError(ValueError):
    """Restricted-sum entropy needs every fiber of the map to be finite."""


class BoundedMapError(ValueError):
    """Raised when a witness of unbounded behaviour is requested for a
    map whose powers repeat."""


@dataclass(frozen=True)
class ShiftWindow:
    """A finite window together with the group the coordinates live in.

    `forbidden` lists window indices whose true image lies outside the
    window (redirected to self-loops by truncation).  Vectors supported
    there cannot be shifted faithfully.
    """

    map: FiniteMap
    group: GroupSpec
    forbidden: frozenset
    truncation: Truncation | None = None

    @classmethod
    def from_map(cls, fmap: FiniteMap, group: GroupSpec) -> "ShiftWindow":
        return cls(fmap, group, frozenset())

    @classmethod
    def from_spec(cls, spec: MapSpec, group: GroupSpec, depth: int) -> "ShiftWindow":
        tr = truncate(spec, depth)
        return cls(tr.map, group, frozenset(tr.artificial_fixed_points), tr)

    @cached_property
    def fibers(self) -> tuple[tuple[int, ...], ...]:
        buckets: list[list[int]] = [[] for _ in range(self.map.size)]
        for j, target in enumerate(self.map.next):
            buckets[target].append(j)
        return tuple(tuple(b) for b in buckets)

    def unit(self, vid: int, element: Sequence[int] | None = None) -> SparseVector:
        if not 0 <= vid < self.map.size:
            raise WindowSupportError(f"index {vid} outside window of size {self.map.size}")
        return unit_vector(self.group, vid, element)

    def label(self, vid: int) -> str:
        if self.truncation is None:
            return str(vid)
        return element_label(self.truncation.original(vid))


def _check_support(window: ShiftWindow, x: SparseVector) -> None:
    if x.group != window.group:
        raise WindowSupportError("vector group does not match the window group")
    for i in x.support:
        if not 0 <= i < window.map.size:
            raise WindowSupportError(f"support index {i} outside the window")
        if i in window.forbidden:
            raise WindowSupportError(
                f"support touches index {i} whose image leaves the window"
            )


def apply_shift(window: ShiftWindow, x: SparseVector) -> SparseVector:
    """One shift step: result[j] = x[f(j)].  Support moves to f^-1(supp x)."""
    _check_support(window, x)
    entries = {}
    for idx, val in x.items:
        for j in window.fibers[idx]:
            entries[j] = val
    return vector(window.group, entries)


def shift_power(window: ShiftWindow, x: SparseVector, m: int) -> SparseVector:
    """m-fold shift via the composed window table."""
    if m < 0:
        raise ValueError("exponent must be >= 0")
    _check_support(window, x)
    if m == 0:
        return x
    table = power(window.map, m).next
    wanted = dict(x.items)
    entries = {j: wanted[t] for j, t in enumerate(table) if t in wanted}
    return vector(window.group, entries)


# ---------------------------------------------------------------------------
# Trajectory growth.
# ---------------------------------------------------------------------------


def canonical_power(r: int) -> tuple[int, int]:
    """Write r >= 1 as b**e with e maximal; 1 becomes (0, 1)."""
    if r < 1:
        raise ValueError("ratio must be >= 1")
    if r == 1:
        return (0, 1)
    factors = _factorize(r)
    e = 0
    for a in factors.values():
        e = math.gcd(e, a)
    b = 1
    for p, a in factors.items():
        b *= p ** (a // e)
    return (e, b)


@dataclass(frozen=True)
class TrajectoryProfile:
    """Trajectory span sizes: sizes[j] = |F + SF + ... + S^j F| with j+1 terms."""

    steps: int
    depth: int
    sizes: tuple[int, ...]
    ratios: tuple[int, ...]
    stabilized: bool
    slope: tuple[int, int] | None
    stabilization_window: int
    start_labels: tuple[str, ...]

    def to_json(self) -> dict:
        return {
            "steps": self.steps,
            "depth": self.depth,
            "sizes": [str(n) for n in self.sizes],
            "ratios": [str(r) for r in self.ratios],
            "stabilized": self.stabilized,
            "slope": {"k": self.slope[0], "base": self.slope[1]}
            if self.slope is not None
            else "not_stabilized",
            "stabilization_window": self.stabilization_window,
            "start": list(self.start_labels),
        }


def _default_start_elements(spec: MapSpec, depth: int) -> list:
    """Core units plus a unit at the first element of every attachment copy.

    A single start cannot separate chains that share an anchor (their
    pullbacks stay tied inside one vector), so each copy contributes its
    own start and the span ratio reflects the chain count.
    """
    starts: list = list(range(spec.core.size))
    for i, att in enumerate(spec.attachments):
        copies = att.multiplicity.value if att.multiplicity.finite else depth
        for c in range(copies):
            if att.kind in (STRING, ORBIT):
                starts.append((i, c, 0))
            elif att.kind == LADDER:
                starts.append((i, c, 0, 0))
            else:
                starts.append((i, c, 1, 0))
    return starts


def trajectory(
    spec: MapSpec,
    group: GroupSpec,
    steps: int,
    *,
    stabilization: int = 3,
    depth: int | None = None,
    start: Iterable | None = None,
) -> TrajectoryProfile:
    """Exact trajectory sizes |F + SF + ... + S^(n-1)F| for n = 1..steps.

    F is spanned by unit vectors at the starts, defaulting to every core
    vertex plus the first element of each attachment copy.  Ratios between
    consecutive sizes are exact integers; when the trailing `stabilization`
    many ratios agree the common value is reported as a slope b**e.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if stabilization < 1:
        raise ValueError("stabilization window must be >= 1")
    if depth is None:
        depth = max(steps + 2, 2)
    window = ShiftWindow.from_spec(spec, group, depth)
    elements = list(start) if start is not None else _default_start_elements(spec, depth)
    starts = []
    labels = []
    for e in elements:
        canon = iterate(spec, e, 0)
        assert window.truncation is not None
        starts.append(window.unit(window.truncation.id_of(canon)))
        labels.append(element_label(canon))

    gens: list[SparseVector] = list(starts)
    frontier = list(starts)
    sizes = [span(group, gens).cardinality]
    for _ in range(steps - 1):
        frontier = [apply_shift(window, v) for v in frontier]
        gens.extend(frontier)
        sizes.append(span(group, gens).cardinality)

    ratios = []
    for a, b in zip(sizes, sizes[1:]):
        if b % a:
            raise AssertionError("span sizes must divide along the chain")
        ratios.append(b // a)

    stabilized = len(ratios) >= stabilization and len(set(ratios[-stabilization:])) == 1
    slope = canonical_power(ratios[-1]) if stabilized else None
    return TrajectoryProfile(
        steps=steps,
        depth=depth,
        sizes=tuple(sizes),
        ratios=tuple(ratios),
        stabilized=stabilized,
        slope=slope,
        stabilization_window=stabilization,
        start_labels=tuple(labels),
    )


# ---------------------------------------------------------------------------
# Entropy classification.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroEntropy:
    """The shift is quasi-periodic: S^n = S^m with n < m."""

    bound: int
    qp: tuple[int, int]

    def to_json(self) -> dict:
        return {"verdict": "zero", "qp": [self.qp[0], self.qp[1]], "bound": self.bound}


@dataclass(frozen=True)
class InfiniteEntropy:
    witness: UnboundedWitness

    def to_json(self) -> dict:
        return {"verdict": "infinite", "witness": self.witness.to_json()}


def classify_entropy(spec: MapSpec) -> ZeroEntropy | InfiniteEntropy:
    """Dichotomy for the full shift: zero iff the map is bounded."""
    verdict = is_bounded(spec)
    if isinstance(verdict, Bounded):
        return ZeroEntropy(bound=verdict.n, qp=verdict.qp)
    return InfiniteEntropy(witness=verdict.witness)


@dataclass(frozen=True)
class EntropySum:
    """Entropy of the shift restricted to finitely supported vectors,
    written symbolically as coefficient * log(base)."""

    coefficient: int
    base: int

    @property
    def is_zero(self) -> bool:
        return self.coefficient == 0

    @property
    def canonical(self) -> tuple[int, int]:
        if self.coefficient == 0:
            return (0, 1)
        e, b = canonical_power(self.base)
        return (self.coefficient * e, b)

    def to_json(self) -> dict:
        e, b = self.canonical
        return {
            "coefficient": self.coefficient,
            "base": self.base,
            "canonical": {"exponent": e, "base": b},
            "zero": self.is_zero,
        }


def entropy_direct_sum(spec: MapSpec, group: GroupSpec) -> EntropySum:
    """Restricted-sum entropy: (chain count) * log|K|.

    Only maps with finite fibers keep finitely supported vectors finitely
    supported under pullback, so anything else is rejected.
    """
    if not has_finite_fibers(spec):
        raise FiniteFibersError(
            "some fiber is infinite; the restricted shift does not preserve "
            "finitely supported vectors"
        )
    s = invariants(spec).s
    if s.is_omega:
        raise AssertionError("chain count cannot saturate when fibers are finite")
    return EntropySum(coefficient=s.value, base=group.order)


# ---------------------------------------------------------------------------
# Witness that shift powers stay pairwise distinct.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NonQPWitness:
    """A vector whose shift iterates are pairwise distinct up to a horizon.

    Powers of the shift agreeing would force the iterates of any vector to
    agree, so this certifies S^s != S^t for all s < t <= horizon.
    """

    kind: str
    lemma: str
    horizon: int
    depth: int
    start_label: str
    supports: tuple[tuple[str, ...], ...]
    pairwise_distinct: bool
    disjoint_supports: bool
    separating: tuple[tuple[int, int, str], ...]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "lemma": self.lemma,
            "horizon": self.horizon,
            "depth": self.depth,
            "start": self.start_label,
            "iterates": [
                {"exponent": s, "support": list(sup)}
                for s, sup in enumerate(self.supports)
            ],
            "pairwise_distinct": self.pairwise_distinct,
            "disjoint_supports": self.disjoint_supports,
            "separating": [
                {"s": s, "t": t, "index": lab} for s, t, lab in self.separating
            ],
        }


def _smallest_factorial_above(n: int) -> int:
    f, k = 1, 1
    while f <= n:
        k += 1
        f *= k
    return f


def _witness_start(spec: MapSpec, witness: UnboundedWitness, horizon: int, f: int):
    i = witness.attachment
    att = spec.attachments[i]
    if witness.kind == STRING:
        return (i, 0, 1)
    if witness.kind == ORBIT:
        return (i, 0, f)
    if witness.kind == LADDER:
        j = 0
        while att.height(j) < horizon:
            j += 1
        return (i, 0, j, 0)
    m = 1
    while att.length(m) <= horizon:
        m += 1
    return (i, 0, m, 0)


def nonqp_witness(spec: MapSpec, group: GroupSpec, horizon: int = 12) -> NonQPWitness:
    """Build and verify a vector separating all shift powers up to `horizon`.

    The start sits far enough out that every pullback through `horizon`
    steps stays inside a window of depth horizon + f + 1, where f is the
    smallest factorial beyond the horizon.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    verdict = is_bounded(spec)
    if isinstance(verdict, Bounded):
        raise BoundedMapError(
            f"map powers repeat ({verdict.qp[0]}, {verdict.qp[1]}); "
            "no separating vector exists beyond that"
        )
    witness = verdict.witness
    f = _smallest_factorial_above(horizon)
    depth = horizon + f + 1
    window = ShiftWindow.from_spec(spec, group, depth)
    assert window.truncation is not None
    start_elem = iterate(spec, _witness_start(spec, witness, horizon, f), 0)
    x = window.unit(window.truncation.id_of(start_elem))

    iterates = [shift_power(window, x, s) for s in range(horizon + 1)]
    supports = tuple(
        tuple(window.label(i) for i in v.support) for v in iterates
    )
    distinct = True
    separating = []
    for s in range(len(iterates)):
        for t in range(s + 1, len(iterates)):
            diff = iterates[s].sub(iterates[t])
            if diff.is_zero():
                distinct = False
            else:
                separating.append((s, t, window.label(diff.support[0])))
    support_sets = [set(v.support) for v in iterates]
    disjoint = all(
        not (support_sets[s] & support_sets[t])
        for s in range(len(support_sets))
        for t in range(s + 1, len(support_sets))
    )
    return NonQPWitness(
        kind=witness.kind,
        lemma=LEMMA_TAGS[witness.kind],
        horizon=horizon,
        depth=depth,
        start_label=element_label(start_elem),
        supports=supports,
        pairwise_distinct=distinct,
        disjoint_supports=disjoint,
        separating=tuple(separating),
    )


# ---------------------------------------------------------------------------
# Operator laws on sampled windows.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LawCheck:
    law: str
    holds: bool
    detail: str

    def to_json(self) -> dict:
        return {"law": self.law, "holds": self.holds, "detail": self.detail}


BRUTE_IMAGE_CAP = 4096


def _sample_vectors(window: ShiftWindow, rng: random.Random, count: int) -> list[SparseVector]:
    group, size = window.group, window.map.size
    out = [zero_vector(group), unit_vector(group, 0)]
    for _ in range(count):
        k = rng.randint(0, min(size, 4))
        idxs = rng.sample(range(size), k)
        entries = {
            i: tuple(rng.randrange(m) for m in group.orders) for i in idxs
        }
        out.append(vector(group, entries))
    return out


def _image_cardinality(window: ShiftWindow) -> int:
    group, fmap = window.group, window.map
    total = group.order ** fmap.size
    if total <= BRUTE_IMAGE_CAP:
        seen = set()
        for assignment in itertools.product(group.elements(), repeat=fmap.size):
            seen.add(tuple(assignment[fmap.next[j]] for j in range(fmap.size)))
        return len(seen)
    gens = []
    for i in range(fmap.size):
        for g in group.generators():
            gens.append(apply_shift(window, unit_vector(group, i, g)))
    return span(group, gens).cardinality


def verify_shift_laws(
    f: FiniteMap,
    g: FiniteMap,
    group: GroupSpec,
    *,
    seed: int = 0,
    samples: int = 6,
) -> tuple[LawCheck, ...]:
    """Check the operator laws for the pair (f, g) on their window.

    Laws: composing shifts reverses map composition; a shift is bijective
    exactly when its map is, with the inverse map giving the inverse
    shift; supports pull back through iterated fibers; distinct maps give
    distinct shifts, separated by a single unit vector.
    """
    if f.size != g.size:
        raise ValueError("law checks need maps on the same window")
    rng = random.Random(seed)
    wf = ShiftWindow.from_map(f, group)
    wg = ShiftWindow.from_map(g, group)
    size = f.size
    checks = []

    if size == 0:
        return (
            LawCheck("composition", True, "empty window"),
            LawCheck("bijectivity", True, "empty window"),
            LawCheck("support-pullback", True, "empty window"),
            LawCheck("separation", True, "empty window"),
        )

    xs = _sample_vectors(wf, rng, samples)

    # S_f(S_g(x)) = S_{g after f}(x)
    wfg = ShiftWindow.from_map(compose(g, f), group)
    ok = all(
        apply_shift(wf, apply_shift(wg, x)) == apply_shift(wfg, x) for x in xs
    )
    checks.append(
        LawCheck("composition", ok, f"checked on {len(xs)} vectors")
    )

    img = _image_cardinality(wf)
    expected = group.order ** len(set(f.next))
    full = group.order ** size
    ok = img == expected and (img == full) == f.is_permutation()
    detail = f"image size {img}, window size {full}"
    if f.is_permutation():
        finv = [0] * size
        for j, t in enumerate(f.next):
            finv[t] = j
        winv = ShiftWindow.from_map(FiniteMap(size, finv), group)
        ok = ok and all(
            apply_shift(winv, apply_shift(wf, x)) == x
            and apply_shift(wf, apply_shift(winv, x)) == x
            for x in xs
        )
        detail += "; inverse map inverts the shift"
    checks.append(LawCheck("bijectivity", ok, detail))

    ok = True
    for x in xs:
        expected_supp = set(x.support)
        y = x
        for m in range(1, 4):
            expected_supp = {j for j in range(size) if f.next[j] in expected_supp}
            y = apply_shift(wf, y)
            if set(y.support) != expected_supp:
                ok = False
    checks.append(
        LawCheck("support-pullback", ok, "supports match iterated fibers up to power 3")
    )

    if f.next == g.next:
        ok = all(apply_shift(wf, x) == apply_shift(wg, x) for x in xs)
        checks.append(LawCheck("separation", ok, "identical maps, identical shifts"))
    else:
        j = next(j for j in range(size) if f.next[j] != g.next[j])
        x = unit_vector(group, f.next[j])
        ok = apply_shift(wf, x) != apply_shift(wg, x)
        checks.append(
            LawCheck(
                "separation",
                ok,
                f"maps differ at {j}; unit vector at {f.next[j]} separates",
            )
        )
    return tuple(checks)


def sample_law_inputs(
    seed: int, count: int, max_vertices: int = 16
) -> list[tuple[FiniteMap, FiniteMap]]:
    """Seeded map pairs for law checking: a mix of permutations, arbitrary
    tables, and identical pairs."""
    rng = random.Random(seed)
    pairs = []
    for _ in range(count):
        size = rng.randint(1, max_vertices)
        f = _random_map(rng, size)
        roll = rng.random()
        if roll < 0.15:
            g = f
        else:
            g = _random_map(rng, size)
        pairs.append((f, g))
    return pairs


def _random_map(rng: random.Random, size: int) -> FiniteMap:
    if rng.random() < 0.3:
        table = list(range(size))
        rng.shuffle(table)
        return FiniteMap(size, table)
    return FiniteMap(size, [rng.randrange(size) for _ in range(size)])

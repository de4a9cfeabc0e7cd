"""Iterated-factorial index sets and exact independence checks.

The index sets are truncations of {f(n) : n >= 1} where f iterates the
factorial m times, optionally shifted by a constant.  Diagonal subgroups
supported on such sets are checked for directness with the exact span
engine, and their growth under coordinate shifts is reproduced with both
set arithmetic and a concrete finite window.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from shiftent.fgraph import FiniteMap
from shiftent.kalgebra import (
    GroupSpec,
    OverCap,
    SubgroupSpan,
    delta_vector,
    enumerate_span,
    is_direct,
    span,
    span_sum,
)
from shiftent.shiftcore import ShiftWindow, shift_power

DEFAULT_DIGIT_CAP = 10000
ENGINE_AGREEMENT_CAP = 4096
PLAIN_FACTORIAL_REFUSAL = 10 ** 6

LN10 = math.log(10.0)


class DigitCapError(ValueError):
    """An exact value would not fit in the configured decimal-digit budget."""


def _digits(n: int) -> int:
    if n <= 0:
        return 1
    return len(str(n))


def _factorial_digit_estimate(n: int) -> float:
    # digits of n! without computing it
    if n < 2:
        return 1.0
    return math.lgamma(n + 1) / LN10 + 1.0


def _factorial_leq(n: int, bound: int) -> int | None:
    """n! if n! <= bound, else None; the estimate avoids huge products."""
    est = _factorial_digit_estimate(n)
    bd = _digits(bound)
    if est > bd + 2:
        return None
    if n > PLAIN_FACTORIAL_REFUSAL:
        return None
    value = math.factorial(n)
    return value if value <= bound else None


def iterated_factorial(n: int, m: int, digit_cap: int = DEFAULT_DIGIT_CAP) -> int:
    """Apply the factorial m times to n, refusing past the digit budget."""
    if n < 1 or m < 0:
        raise ValueError("need n >= 1 and m >= 0")
    v = n
    for _ in range(m):
        if v > PLAIN_FACTORIAL_REFUSAL:
            raise DigitCapError(f"refusing factorial of {v} > 10**6")
        est = _factorial_digit_estimate(v)
        if est > digit_cap:
            raise DigitCapError(
                f"factorial of {v} needs about {int(est)} digits, cap is {digit_cap}"
            )
        v = math.factorial(v)
    return v


def factorial_values(level: int, bound: int, digit_cap: int = DEFAULT_DIGIT_CAP) -> tuple[int, ...]:
    """All m-fold factorials f(n) <= bound, for n = 1, 2, ... in order."""
    if level < 1:
        raise ValueError("level must be >= 1")
    if bound < 1:
        return ()
    if _digits(bound) > digit_cap:
        raise DigitCapError(
            f"bound has {_digits(bound)} digits, cap is {digit_cap}"
        )
    out = []
    n = 1
    while True:
        if n > PLAIN_FACTORIAL_REFUSAL:
            raise DigitCapError("set enumeration ran past n = 10**6")
        v = n
        ok = True
        for _ in range(level):
            nxt = _factorial_leq(v, bound)
            if nxt is None:
                ok = False
                break
            v = nxt
        if not ok:
            # f(n) grows with n, so the first overflow ends the set
            return tuple(out)
        out.append(v)
        n += 1


@dataclass(frozen=True)
class FactorialSet:
    """A truncated, shifted iterated-factorial set."""

    level: int
    shift: int
    sign: str  # "+" or "-"
    bound: int
    values: tuple[int, ...]

    def label(self) -> str:
        if self.shift == 0:
            return f"F{self.level}"
        return f"F{self.level}{self.sign}{self.shift}"

    def to_json(self) -> dict:
        return {
            "level": self.level,
            "shift": self.shift,
            "sign": self.sign,
            "bound": str(self.bound),
            "values": [str(v) for v in self.values],
        }


def truncated_set(
    level: int,
    shift: int,
    sign: str,
    bound: int,
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> FactorialSet:
    """Shifted set {f(n) +- shift} cut at the bound.

    The minus sign keeps only values strictly above the shift, so every
    member stays positive.
    """
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if shift < 0:
        raise ValueError("shift must be >= 0")
    base = factorial_values(level, bound + shift, digit_cap)
    if sign == "+":
        values = tuple(v + shift for v in base if v + shift <= bound)
    else:
        values = tuple(v - shift for v in base if v > shift and v - shift <= bound)
    return FactorialSet(level, shift, sign, bound, values)


def pullback_shift(values: Sequence[int], steps: int) -> tuple[int, ...]:
    """Support of a right-shifted set under the successor map: x -> x - steps,
    keeping every nonnegative result (position zero included)."""
    return tuple(v - steps for v in values if v >= steps)


def is_plain_factorial(v: int) -> bool:
    if v < 1:
        return False
    f, j = 1, 1
    while f < v:
        j += 1
        f *= j
    return f == v


def factorial_escape_index(
    level: int,
    shift: int,
    search_bound: int,
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> int | None:
    """Least n <= search_bound, itself not a plain factorial, whose m-fold
    factorial misses the plain factorials under every offset 1..shift in
    both directions.  None when no such n exists in range."""
    if shift < 1:
        raise ValueError("shift must be >= 1")
    for n in range(1, search_bound + 1):
        if is_plain_factorial(n):
            continue
        v = iterated_factorial(n, level, digit_cap)
        good = True
        for h in range(1, shift + 1):
            if is_plain_factorial(v + h) or is_plain_factorial(v - h):
                good = False
                break
        if good:
            return n
    return None


# ---------------------------------------------------------------------------
# Diagonal families and independence.
# ---------------------------------------------------------------------------


def delta_family(group: GroupSpec, values: Iterable[int]) -> SubgroupSpan:
    """The diagonal subgroup {a * indicator(S) : a in K} as a span."""
    vals = tuple(values)
    gens = [delta_vector(group, g, vals) for g in group.generators()]
    return span(group, gens)


def _peel_order(sets: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], tuple[int, ...]] | None:
    """Ordering where each set holds an element missing from all later sets.

    Such an ordering makes a zero sum of diagonal vectors collapse front
    to back, so it is a sufficient (not necessary) directness certificate.
    """
    remaining = list(range(len(sets)))
    order: list[int] = []
    witnesses: list[int] = []
    while remaining:
        found = None
        for idx in remaining:
            others = set()
            for jdx in remaining:
                if jdx != idx:
                    others.update(sets[jdx])
            private = [v for v in sets[idx] if v not in others]
            if private:
                found = (idx, private[0])
                break
        if found is None:
            return None
        order.append(found[0])
        witnesses.append(found[1])
        remaining.remove(found[0])
    return tuple(order), tuple(witnesses)


@dataclass(frozen=True)
class IndependenceReport:
    """Directness verdict for a family of diagonal subgroups."""

    family: tuple[FactorialSet, ...]
    set_sizes: tuple[int, ...]
    peel_order: tuple[int, ...] | None
    peel_witnesses: tuple[int, ...] | None
    direct: bool
    cardinality: int
    expected: int
    enumeration_agrees: bool | None

    @property
    def ok(self) -> bool:
        return (
            self.direct
            and self.cardinality == self.expected
            and self.enumeration_agrees in (None, True)
        )

    def to_json(self) -> dict:
        return {
            "sets": [s.to_json() for s in self.family],
            "set_sizes": list(self.set_sizes),
            "peel_order": None if self.peel_order is None else list(self.peel_order),
            "peel_witnesses": None
            if self.peel_witnesses is None
            else [str(w) for w in self.peel_witnesses],
            "direct": self.direct,
            "cardinality": str(self.cardinality),
            "expected": str(self.expected),
            "enumeration_agrees": self.enumeration_agrees,
            "ok": self.ok,
        }


def _independence_report(group: GroupSpec, family: Sequence[FactorialSet]) -> IndependenceReport:
    for fset in family:
        if not fset.values:
            raise ValueError(f"set {fset.label()} is empty inside the bound")
    spans = [delta_family(group, fset.values) for fset in family]
    direct = is_direct(group, spans)
    total = span_sum(spans)
    expected = group.order ** len(family)
    enum_agrees = None
    if expected <= ENGINE_AGREEMENT_CAP:
        enum = enumerate_span(total)
        if isinstance(enum, OverCap):
            enum_agrees = None
        else:
            enum_agrees = enum.count == total.cardinality
    peel = _peel_order([fset.values for fset in family])
    return IndependenceReport(
        family=tuple(family),
        set_sizes=tuple(len(fset.values) for fset in family),
        peel_order=None if peel is None else peel[0],
        peel_witnesses=None if peel is None else peel[1],
        direct=direct,
        cardinality=total.cardinality,
        expected=expected,
        enumeration_agrees=enum_agrees,
    )


def verify_independence_level1(
    group: GroupSpec, t: int, bound: int, digit_cap: int = DEFAULT_DIGIT_CAP
) -> IndependenceReport:
    """Directness of the diagonal subgroups on levels 1..t, unshifted."""
    if t < 1:
        raise ValueError("t must be >= 1")
    family = [truncated_set(i, 0, "+", bound, digit_cap) for i in range(1, t + 1)]
    return _independence_report(group, family)


def verify_independence_level2(
    group: GroupSpec,
    t: int,
    k: int,
    sign: str,
    bound: int,
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> IndependenceReport:
    """Directness across levels 1..t and shifts 0..k with one sign."""
    if t < 1 or k < 0:
        raise ValueError("need t >= 1 and k >= 0")
    family = [
        truncated_set(i, l, sign, bound, digit_cap)
        for l in range(k + 1)
        for i in range(1, t + 1)
    ]
    return _independence_report(group, family)


# ---------------------------------------------------------------------------
# Shift growth along factorial supports.
# ---------------------------------------------------------------------------

STEPPING_WINDOW = 140


def _verify_stepping(group: GroupSpec, kind: str, k_max: int) -> bool:
    """Replay the set arithmetic on a concrete window and compare supports."""
    cap = STEPPING_WINDOW
    small = factorial_values(1, cap - k_max - 1)
    if kind == "string":
        table = [0] + [i - 1 for i in range(1, cap)]
        window = ShiftWindow.from_map(FiniteMap(cap, table), group)
    else:
        table = [i + 1 for i in range(cap - 1)] + [cap - 1]
        window = ShiftWindow(FiniteMap(cap, table), group, frozenset({cap - 1}))
    x = delta_vector(group, group.generators()[0], small)
    for l in range(k_max):
        y = shift_power(window, x, l)
        if kind == "string":
            expected = tuple(v + l for v in small)
        else:
            expected = pullback_shift(small, l)
        if y.support != expected:
            return False
    return True


@dataclass(frozen=True)
class GrowthReport:
    """Trajectory sizes of shifted diagonal families: sizes[k-1] uses the
    shifts 0..k-1, so a direct family of t levels gives |K|**(k*t)."""

    kind: str  # "string" or "orbit"
    t: int
    k_max: int
    bound: int
    sizes: tuple[int, ...]
    expected: tuple[int, ...]
    ratios: tuple[int, ...]
    direct: bool
    stepping_verified: bool

    @property
    def ok(self) -> bool:
        return self.sizes == self.expected and self.direct and self.stepping_verified

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "t": self.t,
            "k_max": self.k_max,
            "bound": str(self.bound),
            "sizes": [str(n) for n in self.sizes],
            "expected": [str(n) for n in self.expected],
            "ratios": [str(r) for r in self.ratios],
            "direct": self.direct,
            "stepping_verified": self.stepping_verified,
            "ok": self.ok,
        }


def string_trajectory_check(
    group: GroupSpec,
    t: int,
    k_max: int,
    bound: int,
    kind: str = "string",
    digit_cap: int = DEFAULT_DIGIT_CAP,
) -> GrowthReport:
    """Exact span growth of diagonal vectors under iterated shifting.

    A chain pulls supports upward (set plus l), a ray pulls them downward
    (set minus l, keeping position zero).  The k-term trajectory of a
    direct family of t levels has exactly |K|**(k*t) elements; the set
    arithmetic is also replayed on a concrete finite window.
    """
    if kind not in ("string", "orbit"):
        raise ValueError("kind must be 'string' or 'orbit'")
    if t < 1 or k_max < 1:
        raise ValueError("need t >= 1 and k_max >= 1")
    base = [factorial_values(i, bound, digit_cap) for i in range(1, t + 1)]
    spans = []
    sizes = []
    for l in range(k_max):
        for vals in base:
            if kind == "string":
                shifted = tuple(v + l for v in vals)
            else:
                shifted = pullback_shift(vals, l)
            if not shifted:
                raise ValueError(f"a level set empties after {l} steps")
            spans.append(delta_family(group, shifted))
        sizes.append(span_sum(spans).cardinality)
    expected = tuple(group.order ** (t * k) for k in range(1, k_max + 1))
    ratios = tuple(b // a for a, b in zip(sizes, sizes[1:]))
    return GrowthReport(
        kind=kind,
        t=t,
        k_max=k_max,
        bound=bound,
        sizes=tuple(sizes),
        expected=expected,
        ratios=ratios,
        direct=is_direct(group, spans),
        stepping_verified=_verify_stepping(group, kind, k_max),
    )

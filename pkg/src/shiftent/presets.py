"""Bundled example maps, one per structural flavour.

lambda1, lambda2, lambda3 are the classic one-line shifts: the forward
ray (one-sided shift losing the first coordinate), the two-sided shift,
and the one-sided shift that parks at a fixed point.  The remaining
presets exercise ladders: one anchored at a fixed point with chain
heights 0, 1, 2, ..., one anchored at a vertex that itself steps onto a
fixed point, and a purely periodic one with cycle lengths 1, 2, 3, ...
"""

from shiftent.fgraph import (
    LADDER,
    ORBIT,
    PERIODIC_LADDER,
    STRING,
    AffineRule,
    Attachment,
    FiniteMap,
    MapSpec,
)


def lambda1() -> MapSpec:
    """Forward ray: index n steps to n + 1, nothing maps to the base."""
    return MapSpec(FiniteMap(0, []), [Attachment(ORBIT)])


def lambda2() -> MapSpec:
    """Two-sided line folded at a fixed point: one chain in, one ray out."""
    return MapSpec(
        FiniteMap(1, [0]),
        [Attachment(STRING, anchor=0), Attachment(ORBIT)],
    )


def lambda3() -> MapSpec:
    """Backward ray with a fixed origin: n steps to n - 1, 0 stays put."""
    return MapSpec(FiniteMap(1, [0]), [Attachment(STRING, anchor=0)])


def ladder() -> MapSpec:
    """Chains of heights 0, 1, 2, ... dropping onto a fixed point."""
    return MapSpec(
        FiniteMap(1, [0]),
        [Attachment(LADDER, anchor=0, height=AffineRule(1, 0))],
    )


def tail_ladder() -> MapSpec:
    """Chains anchored at a non-periodic vertex that feeds a fixed point.

    The eventual image keeps both core vertices but the restricted map is
    no longer onto: the anchor has left the image.
    """
    return MapSpec(
        FiniteMap(2, [1, 1]),
        [Attachment(LADDER, anchor=0, height=AffineRule(1, 0))],
    )


def periodic_ladder() -> MapSpec:
    """Disjoint cycles of lengths 1, 2, 3, ...; a bijective unbounded map."""
    return MapSpec(
        FiniteMap(0, []),
        [Attachment(PERIODIC_LADDER, length=AffineRule(1, 0))],
    )


PRESETS = {
    "lambda1": lambda1,
    "lambda2": lambda2,
    "lambda3": lambda3,
    "ladder": ladder,
    "tail-ladder": tail_ladder,
    "periodic-ladder": periodic_ladder,
}

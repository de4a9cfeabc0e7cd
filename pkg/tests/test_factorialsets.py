"""Factorial index sets: frozen values, independence, growth, digit caps."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shiftent.factorialsets import (
    DigitCapError,
    delta_family,
    factorial_escape_index,
    factorial_values,
    iterated_factorial,
    is_plain_factorial,
    pullback_shift,
    string_trajectory_check,
    truncated_set,
    verify_independence_level1,
    verify_independence_level2,
    _peel_order,
)
from shiftent.kalgebra import GroupSpec, is_direct, span_sum

Z2 = GroupSpec((2,))
Z3 = GroupSpec((3,))

F720 = math.factorial(720)


# --- value enumeration -------------------------------------------------------

def test_level1_values_frozen():
    assert factorial_values(1, 1000) == (1, 2, 6, 24, 120, 720)
    assert factorial_values(1, 130) == (1, 2, 6, 24, 120)
    assert factorial_values(1, 1) == (1,)
    assert factorial_values(1, 0) == ()


def test_level2_values_frozen():
    assert factorial_values(2, 1000) == (1, 2, 720)
    big = factorial_values(2, F720)
    assert big == (1, 2, 720, math.factorial(24), math.factorial(120), F720)


def test_level3_values_frozen():
    assert factorial_values(3, F720) == (1, 2, F720)


def test_iterated_factorial_examples():
    assert iterated_factorial(3, 1) == 6
    assert iterated_factorial(3, 2) == 720
    assert iterated_factorial(3, 3) == F720
    assert iterated_factorial(5, 2) == math.factorial(120)


def test_iterated_factorial_digit_cap():
    with pytest.raises(DigitCapError):
        iterated_factorial(7, 2)  # factorial of 5040 needs ~16000 digits
    with pytest.raises(DigitCapError):
        iterated_factorial(4, 3)  # factorial of 24! refused outright
    assert iterated_factorial(7, 2, digit_cap=20000) == math.factorial(5040)


def test_factorial_values_bound_must_fit_cap():
    with pytest.raises(DigitCapError):
        factorial_values(1, F720, digit_cap=1000)


# --- shifted truncations -------------------------------------------------------

def test_truncated_set_plus_frozen():
    assert truncated_set(1, 2, "+", 30).values == (3, 4, 8, 26)
    assert truncated_set(1, 0, "+", 130).values == (1, 2, 6, 24, 120)


def test_truncated_set_minus_drops_small_values():
    assert truncated_set(1, 2, "-", 1000).values == (4, 22, 118, 718)
    assert truncated_set(1, 1, "-", 1000).values == (1, 5, 23, 119, 719)


def test_truncated_set_labels():
    assert truncated_set(2, 0, "+", 1000).label() == "F2"
    assert truncated_set(1, 3, "-", 1000).label() == "F1-3"


def test_pullback_shift_keeps_zero():
    assert pullback_shift((1, 2, 6, 24), 1) == (0, 1, 5, 23)
    assert pullback_shift((1, 2, 6), 3) == (3,)
    assert pullback_shift((1, 2), 5) == ()


def test_is_plain_factorial():
    hits = [v for v in range(1, 1000) if is_plain_factorial(v)]
    assert hits == [1, 2, 6, 24, 120, 720]
    assert is_plain_factorial(F720)
    assert not is_plain_factorial(F720 + 1)


# --- escape indices ---------------------------------------------------------------

def test_factorial_escape_index_frozen():
    assert factorial_escape_index(1, 1, 100) == 3
    assert factorial_escape_index(1, 2, 100) == 3
    assert factorial_escape_index(2, 1, 100) == 3


def test_factorial_escape_index_exhausted():
    assert factorial_escape_index(1, 1, 2) is None


def test_factorial_escape_index_checks_both_signs():
    n = factorial_escape_index(1, 1, 100)
    v = iterated_factorial(n, 1)
    assert not is_plain_factorial(v + 1)
    assert not is_plain_factorial(v - 1)


# --- independence ------------------------------------------------------------------

def test_level1_independence_two_sets():
    rep = verify_independence_level1(Z2, 2, 1000)
    assert rep.direct
    assert rep.cardinality == 4
    assert rep.expected == 4
    assert rep.enumeration_agrees is True
    assert rep.peel_order is not None
    assert rep.ok


def test_level1_independence_three_sets_needs_big_bound():
    rep = verify_independence_level1(Z2, 3, F720)
    assert rep.set_sizes == (720, 6, 3)
    assert rep.direct
    assert rep.cardinality == 8
    assert rep.ok


def test_level1_small_bound_degenerates():
    # levels 2 and 3 truncate to the same set {1, 2}, so directness fails
    rep = verify_independence_level1(Z2, 3, 700)
    assert rep.set_sizes == (5, 2, 2)
    assert not rep.direct
    assert not rep.ok
    with pytest.raises(ValueError):
        verify_independence_level1(Z2, 1, 0)  # empty window


def test_level2_independence_plus():
    rep = verify_independence_level2(Z2, 2, 2, "+", 1002)
    assert len(rep.family) == 6
    assert rep.direct
    assert rep.cardinality == 64
    assert rep.enumeration_agrees is True
    assert rep.ok


def test_level2_independence_minus():
    rep = verify_independence_level2(Z3, 2, 1, "-", 1000)
    assert len(rep.family) == 4
    assert rep.direct
    assert rep.cardinality == 81
    assert rep.ok


def test_peel_order_failure_case():
    # pairwise overlapping triangle with no private elements anywhere
    assert _peel_order([(1, 2), (1, 3), (2, 3)]) is None


def test_peel_order_nested_chain():
    order, wits = _peel_order([(1, 2, 6, 24), (1, 2, 6), (1, 2)])
    assert order == (0, 1, 2)
    assert wits[0] == 24 and wits[1] == 6


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_peel_order_implies_direct(data):
    group = data.draw(st.sampled_from([Z2, Z3, GroupSpec((4,)), GroupSpec((2, 2))]))
    n_sets = data.draw(st.integers(1, 4))
    sets = [
        tuple(sorted(data.draw(st.sets(st.integers(0, 11), min_size=1, max_size=5))))
        for _ in range(n_sets)
    ]
    spans = [delta_family(group, s) for s in sets]
    direct = is_direct(group, spans)
    total = span_sum(spans).cardinality
    assert total <= group.order ** n_sets
    assert direct == (total == group.order ** n_sets)
    if _peel_order(sets) is not None:
        assert direct


# --- growth ---------------------------------------------------------------------

def test_growth_string_single_level():
    rep = string_trajectory_check(Z2, 1, 5, 1000, "string")
    assert rep.sizes == (2, 4, 8, 16, 32)
    assert rep.ratios == (2, 2, 2, 2)
    assert rep.direct
    assert rep.stepping_verified
    assert rep.ok


def test_growth_string_two_levels_base_three():
    rep = string_trajectory_check(Z3, 2, 4, 1000, "string")
    assert rep.sizes == (9, 81, 729, 6561)
    assert rep.ok


def test_growth_orbit_single_level():
    rep = string_trajectory_check(Z2, 1, 4, 1000, "orbit")
    assert rep.sizes == (2, 4, 8, 16)
    assert rep.ok


def test_growth_three_levels_huge_bound():
    rep = string_trajectory_check(Z2, 3, 2, F720, "string")
    assert rep.sizes == (8, 64)
    assert rep.ok


def test_growth_rejects_emptied_sets():
    with pytest.raises(ValueError):
        string_trajectory_check(Z2, 1, 4, 2, "orbit")  # {1, 2} empties fast

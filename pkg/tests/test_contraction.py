import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from slsat.contraction import (
    ContractionError, choose_locations, contract, frontier_sets, restrict, segment, size_bound,
)
from slsat.gen import random_structure
from slsat.structures import SLStructure

CHAIN = SLStructure.of_size(4, {"x": 0}, {0: 1, 1: 2, 2: 3})


def test_frontier_sets_examples():
    s = frontier_sets(CHAIN, ["x"], [])
    assert (s.V, s.Vbar, s.W) == ({0}, {0, 1, 2, 3}, {0})
    joined = SLStructure(frozenset({0, 1, 2, 3, 9}), {"x": 0}, {0: 1, 1: 2, 2: 3, 9: 2})
    assert frontier_sets(joined, ["x"], [9]).W == {0, 9, 2}
    empty = frontier_sets(CHAIN, [], [])
    assert not empty.V and not empty.Vbar and not empty.W
    with pytest.raises(ContractionError):
        frontier_sets(CHAIN, ["y"], [])
    with pytest.raises(ContractionError):
        frontier_sets(CHAIN, [], [7])


def test_segment_examples():
    sets = frontier_sets(CHAIN, ["x"], [])
    assert segment(CHAIN, 0, sets) == (0, 1, 2)
    assert segment(CHAIN, 0, sets, 1) == (0, 1)
    loop = SLStructure.of_size(1, {"x": 0}, {0: 0})
    assert segment(loop, 0, frontier_sets(loop, ["x"], [])) == (0,)
    with pytest.raises(ContractionError):
        segment(CHAIN, 3, sets)


def test_contract_worked_chain():
    out = contract(CHAIN, 1, ["x"], [])
    # the retarget target 3 stays in the universe
    assert out.universe == {0, 1, 3}
    assert out.h == {0: 1, 1: 3}
    assert size_bound(CHAIN, 1, ["x"], []) == 2


def test_contract_inert_for_long_bounds():
    out = contract(CHAIN, 5, ["x"], [])
    assert out == CHAIN


def test_contract_empty_heap():
    i = SLStructure.of_size(3, {"x": 1})
    assert contract(i, 1, ["x"], []) == i


def test_contract_rejects_bad_bounds():
    for n in (0, -1, 1.5, math.inf):
        with pytest.raises(ContractionError):
            contract(CHAIN, n, ["x"], [])


def test_contract_undefined_when_outside_cell_points_into_cut():
    i = SLStructure.of_size(6, {"x": 0}, {0: 1, 1: 2, 2: 3, 3: 4, 5: 3})
    with pytest.raises(ContractionError):
        contract(i, 1, ["x"], [])


def test_restrict_examples():
    i = SLStructure(frozenset({0, 1, 2, 9}), {"x": 0}, {0: 1})
    assert restrict(i, ["x"], []) == SLStructure(frozenset({0, 1}), {"x": 0}, {0: 1})
    assert restrict(CHAIN, ["x"], range(4)) == CHAIN
    with pytest.raises(ContractionError):
        restrict(SLStructure.of_size(2), [], [])


def _random_case(seed):
    rng = random.Random(seed)
    i = random_structure(rng, rng.randint(1, 10), ["x", "y"])
    locs = [loc for loc in range(i.size) if rng.random() < 0.2]
    xs = ["x", "y"][:rng.randint(1, 2)]
    return i, xs, locs


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_restrict_is_closed(seed):
    i, xs, locs = _random_case(seed)
    out = restrict(i, xs, locs)
    assert out.dom() | set(out.h.values()) <= out.universe
    assert restrict(out, xs, locs) == out


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 9))
def test_contract_is_idempotent_for_long_bounds(seed):
    i, xs, locs = _random_case(seed)
    big = i.size + 1
    try:
        once = contract(i, big, xs, locs)
    except ContractionError:
        return
    assert contract(once, big, xs, locs) == once


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 10 ** 9), st.integers(1, 3))
def test_contraction_keeps_heap_inside_universe(seed, n):
    i, xs, locs = _random_case(seed)
    try:
        out = contract(i, n, xs, locs)
    except ContractionError:
        return
    assert set(out.h.values()) <= out.universe
    assert out.size <= i.size


def test_choose_locations():
    i = SLStructure.of_size(8, {"x": 0}, {0: 1, 1: 2, 2: 3, 3: 0})
    chosen = choose_locations(i, ["x"], 2)
    assert chosen == {1, 2, 4, 5, 6}
    assert choose_locations(SLStructure.of_size(3, {"x": 0}), ["x"], 1) is None
    full = SLStructure.of_size(3, {"x": 0}, {0: 1, 1: 2, 2: 0})
    assert choose_locations(full, ["x"], 2) == {1, 2}


def test_choose_locations_gives_up_when_variables_fill_the_gap():
    i = SLStructure.of_size(6, {"a": 3, "b": 4, "c": 5}, {0: 0, 1: 0, 2: 0})
    assert choose_locations(i, ["a", "b", "c"], 0) is None

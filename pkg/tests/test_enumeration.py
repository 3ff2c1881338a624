"""Generation of floor diagrams, cross-checked by a brute-force oracle.

The oracle enumerates every directed weighted multigraph on k labeled floors
without any topological-order assumption, filters by the definition
(acyclicity, connectivity, divergences, sink counts), and collapses classes
with canonical_form.  It shares no search logic with the production
enumerator.
"""

import itertools

import pytest

from floorcount import FloorDiagram, canonical_form, enumerate_floor_diagrams, validate


def nonneg_compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in nonneg_compositions(total - first, parts - 1):
            yield (first,) + rest


def brute_force_classes(d, g):
    keys = {}
    for k in range(1, d + 1):
        m = k - 1 + g
        pairs = [(i, j) for i in range(k) for j in range(k) if i != j]
        alphabet = [(i, j, w) for i, j in pairs for w in range(1, d + 1)]
        for combo in itertools.combinations_with_replacement(alphabet, m):
            flow = [0] * k
            for t, h, w in combo:
                flow[t] += w
                flow[h] -= w
            for sinks in nonneg_compositions(d, k):
                divs = tuple(flow[v] + sinks[v] for v in range(k))
                if any(dv < 1 for dv in divs):
                    continue
                diagram = FloorDiagram(divs, tuple(combo), tuple(sinks))
                if validate(diagram, d, g):
                    continue
                keys.setdefault(canonical_form(diagram), diagram)
    return keys


@pytest.mark.parametrize(
    "d,g", [(1, 0), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2), (4, 0)]
)
def test_matches_brute_force(d, g):
    produced = {canonical_form(D): D for D in enumerate_floor_diagrams(d, g)}
    expected = brute_force_classes(d, g)
    assert set(produced) == set(expected)


def test_smallest_degrees():
    assert len(list(enumerate_floor_diagrams(1, 0))) == 1
    # hand enumeration over divergence splits and tree shapes
    assert len(list(enumerate_floor_diagrams(2, 0))) == 2
    # brute-force count; the three nonzero plane types appear among these
    assert len(list(enumerate_floor_diagrams(3, 0))) == 7


def test_figure_shapes_present(chain_11, chain_12, vee):
    keys = {canonical_form(D) for D in enumerate_floor_diagrams(3, 0)}
    for known in (chain_11, chain_12, vee):
        assert canonical_form(known) in keys


@pytest.mark.parametrize("d,g", [(2, 0), (3, 0), (3, 1), (4, 0), (4, 2), (5, 0)])
def test_emitted_diagrams_are_valid(d, g):
    diagrams = list(enumerate_floor_diagrams(d, g))
    keys = [canonical_form(D) for D in diagrams]
    assert len(set(keys)) == len(keys)
    assert keys == sorted(keys)
    for D in diagrams:
        assert validate(D, d, g) == []
        assert D.num_floors <= d
        assert all(1 <= w <= d for _, _, w in D.internal_edges)
        # flow conservation: divergences balance against the sinks
        assert sum(D.divergences) == D.degree == d


def test_deterministic_repetition():
    first = list(enumerate_floor_diagrams(4, 1))
    second = list(enumerate_floor_diagrams(4, 1))
    assert first == second


def test_degree_cap():
    with pytest.raises(ValueError):
        list(enumerate_floor_diagrams(11, 0))
    with pytest.raises(ValueError):
        list(enumerate_floor_diagrams(3, 0, max_degree=2))


def test_bad_arguments():
    with pytest.raises(ValueError):
        list(enumerate_floor_diagrams(0, 0))
    with pytest.raises(ValueError):
        list(enumerate_floor_diagrams(2, -1))

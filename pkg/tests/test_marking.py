"""Markings: constraint specs, enumeration up to equivalence, type counts.

The brute-force oracle enumerates every raw assignment (target choice per
constraint plus a slot order on every edge), keeps the ones passing the
definition checks of check_marking, and collapses equivalence classes with
the full automorphism group.  It shares nothing with the production search.
"""

import itertools

import pytest

from floorcount import (
    DimensionMismatch,
    EdgeSlot,
    FloorDiagram,
    FloorPoint,
    MarkedDiagram,
    UnsupportedGenus,
    automorphisms,
    build_constraints,
    check_marking,
    complex_multiplicity,
    count_marked_by_type,
    enumerate_floor_diagrams,
    enumerate_markings,
    format_marked_diagram,
    parse_marked_diagram,
    precedes,
)
from floorcount.diagram import relabel
from floorcount.multiplicity import is_degenerate


class TestBuildConstraints:
    def test_plane_points(self):
        spec = build_constraints(2, 3, 0, (8,))
        assert spec.size == 8
        assert set(spec.dims) == {0}

    def test_space_lines(self):
        spec = build_constraints(3, 2, 0, (0, 8))
        assert spec.size == 8
        assert set(spec.dims) == {1}
        assert spec.label(0) == (1, 1)
        assert spec.label(7) == (1, 8)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            build_constraints(2, 3, 0, (7,))

    def test_unsupported_genus(self):
        with pytest.raises(UnsupportedGenus):
            build_constraints(3, 3, 1, (2, 4))

    def test_wrong_shape(self):
        with pytest.raises(DimensionMismatch):
            build_constraints(3, 2, 0, (8,))
        with pytest.raises(DimensionMismatch):
            build_constraints(2, 3, 0, (9, -1))

    def test_order_is_by_ascending_dimension(self):
        spec = build_constraints(3, 3, 0, (4, 4))
        assert spec.dims == (0, 0, 0, 0, 1, 1, 1, 1)


def orbit_representative(diagram, assignment, autos):
    def encode(a):
        return tuple(
            (0, p.floor, 0) if isinstance(p, FloorPoint) else (1, p.edge, p.slot)
            for p in a
        )

    best = None
    for fp, ep in autos:
        mapped = tuple(
            FloorPoint(fp[p.floor])
            if isinstance(p, FloorPoint)
            else EdgeSlot(ep[p.edge], p.slot)
            for p in assignment
        )
        if best is None or encode(mapped) < best:
            best = encode(mapped)
    return best


def brute_force_classes(diagram, spec):
    """All marking classes by raw search over targets and slot orders."""
    autos = automorphisms(diagram)
    targets = [("f", v) for v in range(diagram.num_floors)]
    targets += [("e", e) for e in range(diagram.num_edges)]
    classes = {}
    for located in itertools.product(targets, repeat=spec.size):
        by_edge = {}
        for rank, (kind, ident) in enumerate(located):
            if kind == "e":
                by_edge.setdefault(ident, []).append(rank)
        slot_choices = [
            itertools.permutations(range(len(ranks))) for ranks in by_edge.values()
        ]
        for slots in itertools.product(*slot_choices):
            assignment = [None] * spec.size
            for rank, (kind, ident) in enumerate(located):
                if kind == "f":
                    assignment[rank] = FloorPoint(ident)
            for (edge, ranks), perm in zip(by_edge.items(), slots):
                for rank, slot in zip(ranks, perm):
                    assignment[rank] = EdgeSlot(edge, slot)
            marked = MarkedDiagram(diagram, spec, tuple(assignment))
            if check_marking(marked):
                continue
            classes.setdefault(orbit_representative(diagram, assignment, autos), marked)
    return list(classes.values())


BRUTE_CASES = [
    (2, 1, 0, (2,)),
    (2, 2, 0, (5,)),
    (3, 1, 0, (2, 0)),
    (3, 1, 0, (0, 4)),
    (3, 2, 0, (4, 0)),
]


@pytest.mark.parametrize("n,d,g,l", BRUTE_CASES)
def test_matches_brute_force(n, d, g, l):
    spec = build_constraints(n, d, g, l)
    for diagram in enumerate_floor_diagrams(d, g):
        expected = brute_force_classes(diagram, spec)
        produced = enumerate_markings(diagram, spec)
        assert len(produced) == len(expected)
        nondeg = enumerate_markings(diagram, spec, nondegenerate_only=True)
        expected_nondeg = [m for m in expected if not is_degenerate(m, n)]
        assert len(nondeg) == len(expected_nondeg)


class TestKnownCounts:
    def test_single_line_through_two_points(self, single_floor):
        spec = build_constraints(2, 1, 0, (2,))
        marks = enumerate_markings(single_floor, spec)
        assert len(marks) == 1
        (m,) = marks
        assert m.assignment == (FloorPoint(0), EdgeSlot(0, 0))

    def test_plane_cubic_chain_weights_11(self, chain_11):
        spec = build_constraints(2, 3, 0, (8,))
        nondeg = enumerate_markings(chain_11, spec, nondegenerate_only=True)
        assert len(nondeg) == 5

    def test_plane_cubic_chain_weights_12(self, chain_12):
        spec = build_constraints(2, 3, 0, (8,))
        assert len(enumerate_markings(chain_12, spec, nondegenerate_only=True)) == 1

    def test_plane_cubic_vee(self, vee):
        spec = build_constraints(2, 3, 0, (8,))
        assert len(enumerate_markings(vee, spec, nondegenerate_only=True)) == 3

    def test_genus_one_single_class(self, double_edge):
        spec = build_constraints(2, 3, 1, (9,))
        assert len(enumerate_markings(double_edge, spec, nondegenerate_only=True)) == 1


class TestMarkingRules:
    @pytest.mark.parametrize("n,d,g,l", BRUTE_CASES + [(2, 3, 0, (8,)), (3, 2, 0, (0, 8))])
    def test_every_emitted_marking_is_valid(self, n, d, g, l):
        spec = build_constraints(n, d, g, l)
        for diagram in enumerate_floor_diagrams(d, g):
            for marked in enumerate_markings(diagram, spec):
                assert check_marking(marked) == []

    def test_nondegenerate_stream_is_subset(self, vee):
        spec = build_constraints(2, 3, 0, (8,))
        all_sigs = {m.assignment for m in enumerate_markings(vee, spec)}
        sub_sigs = {
            m.assignment
            for m in enumerate_markings(vee, spec, nondegenerate_only=True)
        }
        assert sub_sigs < all_sigs

    def test_plane_markings_injective_order_preserving(self):
        # with point constraints a marking hits every floor once and never
        # decreases along the diagram order
        spec = build_constraints(2, 3, 0, (8,))
        for diagram in enumerate_floor_diagrams(3, 0):
            for marked in enumerate_markings(diagram, spec):
                points = marked.assignment
                assert len(set(points)) == len(points)
                floors = {p.floor for p in points if isinstance(p, FloorPoint)}
                assert floors == set(range(diagram.num_floors))
                for i in range(len(points)):
                    for j in range(i + 1, len(points)):
                        assert not precedes(diagram, points[j], points[i])

    def test_class_count_stable_under_relabeling(self, chain_12, vee):
        spec = build_constraints(2, 3, 0, (8,))
        for diagram in (chain_12, vee):
            twisted = relabel(diagram, (2, 0, 1))
            assert len(enumerate_markings(twisted, spec)) == len(
                enumerate_markings(diagram, spec)
            )

    def test_deterministic_order(self, vee):
        spec = build_constraints(2, 3, 0, (8,))
        assert enumerate_markings(vee, spec) == enumerate_markings(vee, spec)

    def test_spec_diagram_mismatch_rejected(self, chain_11):
        spec = build_constraints(2, 2, 0, (5,))
        with pytest.raises(ValueError):
            enumerate_markings(chain_11, spec)


class TestTypeCounts:
    def test_plane_cubics(self, engine):
        # one type of 5 markings, one of 3, one of 1 with multiplicity four
        spec = build_constraints(2, 3, 0, (8,))
        found = []
        for diagram in enumerate_floor_diagrams(3, 0):
            for rep, count in count_marked_by_type(diagram, spec, True):
                mu = complex_multiplicity(rep, 2, engine._gw_or_zero)
                if mu:
                    found.append((count, mu))
        assert sorted(found) == [(1, 4), (3, 1), (5, 1)]

    def test_degree_two_space_lines(self, engine):
        spec = build_constraints(3, 2, 0, (0, 8))
        found = []
        for diagram in enumerate_floor_diagrams(2, 0):
            for rep, count in count_marked_by_type(diagram, spec, True):
                mu = complex_multiplicity(rep, 3, engine._gw_or_zero)
                if mu:
                    found.append((count, mu))
        assert sorted(found) == sorted(
            [(5, 1), (3, 1), (10, 1), (12, 1), (3, 1)]
            + [(5, 1), (3, 1), (10, 1), (12, 1), (3, 1)]
            + [(1, 8), (3, 4), (3, 2)]
        )
        assert sum(c * mu for c, mu in found) == 92

    def test_types_partition_the_markings(self, vee):
        spec = build_constraints(2, 3, 0, (8,))
        per_type = count_marked_by_type(vee, spec)
        assert sum(count for _, count in per_type) == len(
            enumerate_markings(vee, spec)
        )


class TestTextFormat:
    def test_round_trip(self, chain_12):
        spec = build_constraints(2, 3, 0, (8,))
        for marked in enumerate_markings(chain_12, spec):
            text = format_marked_diagram(marked)
            assert parse_marked_diagram(text, 2) == marked

    def test_round_trip_with_lines(self):
        diagram = FloorDiagram((2,), (), (2,))
        spec = build_constraints(3, 2, 0, (0, 8))
        for marked in enumerate_markings(diagram, spec, nondegenerate_only=True):
            text = format_marked_diagram(marked)
            assert parse_marked_diagram(text, 3) == marked

    def test_mark_lines_shape(self, single_floor):
        spec = build_constraints(2, 1, 0, (2,))
        (marked,) = enumerate_markings(single_floor, spec)
        text = format_marked_diagram(marked)
        assert "mark dim=0 idx=1 at=floor:0" in text
        assert "mark dim=0 idx=2 at=edge:0:slot:0" in text

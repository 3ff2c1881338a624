"""Exhaustive generation of floor diagrams of a given degree and genus.

Strategy: pick the number of floors k and an ordered composition of the
degree into k positive divergences, then grow the internal edge structure
floor by floor.  Floors are processed in a fixed label order and internal
edges only run from lower to higher labels; every acyclic orientation admits
such a labeling, so together with the composition choice every isomorphism
class is hit at least once.  Duplicates are removed through the canonical
form.

Weight bound: for an internal edge e, the set S of vertices reachable from
its head is closed under outgoing edges, so the total weight entering S
equals #sinks(S) - sum of div over floors of S <= d.  Since e enters S,
w(e) <= d.  The per-floor budget used below is sharper: when floor v picks
its outgoing edges, all incoming weight in_w(v) is already fixed, and
attaching a nonnegative number of sink edges forces
out_w(v) <= div(v) + in_w(v).
"""

from __future__ import annotations

from typing import Iterator

from .diagram import FloorDiagram, canonical_form, canonicalize, is_connected

DEFAULT_DEGREE_CAP = 10


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Ordered compositions of ``total`` into ``parts`` positive integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_floor_diagrams(
    d: int, g: int, max_degree: int = DEFAULT_DEGREE_CAP
) -> Iterator[FloorDiagram]:
    """All floor diagrams of degree d and genus g, one per isomorphism class.

    The stream is sorted by canonical key, hence deterministic.  Diagrams
    that admit no marking, or only zero-multiplicity markings, are emitted
    all the same; multiplicity filtering happens downstream.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if g < 0:
        raise ValueError("genus must be >= 0")
    if d > max_degree:
        raise ValueError(
            f"degree {d} above the configured cap {max_degree}; "
            "raise max_degree explicitly for bigger searches"
        )
    found: dict[bytes, FloorDiagram] = {}
    for diagram in _generate(d, g):
        key = canonical_form(diagram)
        if key not in found:
            found[key] = canonicalize(diagram)
    for key in sorted(found):
        yield found[key]


def _generate(d: int, g: int) -> Iterator[FloorDiagram]:
    """Raw generation; may produce several representatives per class."""
    for k in range(1, d + 1):
        n_edges = k - 1 + g
        if k == 1 and n_edges > 0:
            continue  # would need self-loops
        for divs in _compositions(d, k):
            yield from _grow(divs, n_edges)


def _grow(divs: tuple[int, ...], n_edges: int) -> Iterator[FloorDiagram]:
    k = len(divs)
    edges: list[tuple[int, int, int]] = []
    in_w = [0] * k

    def outgoing_bundles(v: int, left: int):
        """Choose the outgoing edges of floor v as a sorted (head, weight)
        multiset within the divergence budget, then move on."""
        budget = divs[v] + in_w[v]

        def extend(min_pair, used, count):
            yield from descend(v + 1, left - count)
            if count == left:
                return
            for head in range(v + 1, k):
                for w in range(1, budget - used + 1):
                    if (head, w) < min_pair:
                        continue
                    edges.append((v, head, w))
                    in_w[head] += w
                    yield from extend((head, w), used + w, count + 1)
                    in_w[head] -= w
                    edges.pop()

        yield from extend((0, 0), 0, 0)

    def descend(v: int, left: int):
        if v == k:
            if left == 0:
                sinks = []
                for u in range(k):
                    out_w = sum(w for t, _, w in edges if t == u)
                    sinks.append(divs[u] + in_w[u] - out_w)
                diagram = FloorDiagram(divs, tuple(edges), tuple(sinks))
                if is_connected(diagram):
                    yield diagram
            return
        yield from outgoing_bundles(v, left)

    yield from descend(0, n_edges)

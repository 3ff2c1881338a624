"""Complex and real multiplicities of marked floor diagrams.

For a marked diagram in ambient dimension n, every floor collects a list of
constraint dimensions: the P-maximal mark at the floor keeps its own
dimension j, every other mark contributes j-1, each incoming edge e
contributes its height h(e), and each outgoing edge e contributes

    n - 1 - h(e) - sum over marks q on the open e of (n - 1 - dim(q)).

The height of an edge is 0 for positive genus and otherwise

    h(e) = sum_{marks q above e} (n - 1 - dim(q)) + 1 - w(e)
           - (n + 1) * sum_{floors above e} div(v),

where "above e" means the component of the diagram minus the open edge e
that contains the head of e.  If any collected dimension leaves the range
0..n-2 the marking is degenerate and both multiplicities vanish.  Otherwise,
with l^v_j counting the collected dimensions equal to j,

    muC(v)   = div(v)^(l^v_{n-2}) * N(n-1, div(v), 0, (l^v_0..l^v_{n-3}))
    muC(D,m) = prod_v muC(v) * prod_e w(e)^(1 + #marks on e)

with the one-dimensional seed N(1, 1, 0, ()) = 1 and zero otherwise.  The
real multiplicity is defined for genus 0 and point constraints only: it is
zero for degenerate markings or when some edge weight is even, and the
product over floors of the one-lower-dimensional Welschinger numbers of the
divergences otherwise, seeded at dimension one by W(1) = 1, W(d>1) = 0.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Callable

from .diagram import FloorDiagram, FloorPoint
from .marking import MarkedDiagram


class _Degenerate:
    """Sentinel: some collected dimension fell outside 0..n-2."""

    def __repr__(self):
        return "Degenerate"

    def __bool__(self):
        return False


DEGENERATE = _Degenerate()

# engine(n, d, g, l) -> N with zero on dimension-condition failure
GromovWittenEngine = Callable[[int, int, int, tuple], int]
# engine(n, d) -> W
WelschingerEngine = Callable[[int, int], int]


@lru_cache(maxsize=None)
def _head_side_floors(diagram: FloorDiagram, edge_id: int) -> frozenset[int]:
    """Floors in the component of D minus the open edge that holds its head."""
    tail, head, _ = diagram.edge_record(edge_id)
    if head is None:
        return frozenset()  # the component is the bare sink
    comp = {head}
    stack = [head]
    while stack:
        v = stack.pop()
        for j, (t, h, _) in enumerate(diagram.internal_edges):
            if j == edge_id:
                continue
            if t == v and h not in comp:
                comp.add(h)
                stack.append(h)
            elif h == v and t not in comp:
                comp.add(t)
                stack.append(t)
    return frozenset(comp)


def _mark_contribution(spec, rank: int, n: int) -> int:
    return n - 1 - spec.dims[rank]


def _edge_tail(diagram: FloorDiagram, edge_id: int) -> int:
    return diagram.edge_record(edge_id)[0]


def height(marked: MarkedDiagram, edge_id: int, n: int) -> int:
    """Height of an edge: the constraint dimension that rigidifies the part
    of the diagram past the edge.  Zero for positive genus."""
    D = marked.diagram
    if D.genus > 0:
        return 0
    comp = _head_side_floors(D, edge_id)
    spec = marked.spec
    total = 0
    for rank, p in enumerate(marked.assignment):
        if isinstance(p, FloorPoint):
            inside = p.floor in comp
        else:
            inside = p.edge != edge_id and _edge_tail(D, p.edge) in comp
        if inside:
            total += _mark_contribution(spec, rank, n)
    weight = D.edge_record(edge_id)[2]
    return total + 1 - weight - (n + 1) * sum(D.divergences[v] for v in comp)


def _collect_dims(marked: MarkedDiagram, floor: int, n: int, heights, marks_on):
    """Raw collected dimension list at a floor (may be out of range)."""
    D, spec = marked.diagram, marked.spec
    marks = marked.marks_at_floor(floor)
    if not marks:
        raise ValueError(f"floor {floor} carries no constraint (coverage violated)")
    collected = [spec.dims[marks[-1]]]
    collected.extend(spec.dims[q] - 1 for q in marks[:-1])
    for e in range(D.num_edges):
        tail, head, _ = D.edge_record(e)
        if head == floor:
            collected.append(heights[e])
        if tail == floor:
            onto = sum(_mark_contribution(spec, q, n) for q in marks_on[e])
            collected.append(n - 1 - heights[e] - onto)
    return collected


def _marking_tables(marked: MarkedDiagram, n: int):
    heights = [height(marked, e, n) for e in range(marked.diagram.num_edges)]
    marks_on = [marked.marks_on_edge(e) for e in range(marked.diagram.num_edges)]
    return heights, marks_on


def floor_constraint_dims(marked: MarkedDiagram, floor: int, n: int):
    """Collected constraint dimensions at a floor, or DEGENERATE.

    Raises ValueError for an unmarked floor: that marking violates the
    coverage rule and should never reach multiplicity evaluation.
    """
    heights, marks_on = _marking_tables(marked, n)
    collected = _collect_dims(marked, floor, n, heights, marks_on)
    if any(not 0 <= c <= n - 2 for c in collected):
        return DEGENERATE
    return tuple(sorted(collected))


def is_degenerate(marked: MarkedDiagram, n: int) -> bool:
    heights, marks_on = _marking_tables(marked, n)
    for v in range(marked.diagram.num_floors):
        collected = _collect_dims(marked, v, n, heights, marks_on)
        if any(not 0 <= c <= n - 2 for c in collected):
            return True
    return False


def complex_multiplicity(
    marked: MarkedDiagram, n: int, engine: GromovWittenEngine
) -> int:
    """Number of complex curves encoded by the marked diagram.

    ``engine`` answers curve counts one dimension down; calls whose
    constraint counts fail the dimension condition must return 0.
    """
    D = marked.diagram
    heights, marks_on = _marking_tables(marked, n)
    result = 1
    for v in range(D.num_floors):
        collected = _collect_dims(marked, v, n, heights, marks_on)
        if any(not 0 <= c <= n - 2 for c in collected):
            return 0
        local = [0] * (n - 1)
        for c in collected:
            local[c] += 1
        dv = D.divergences[v]
        result *= dv ** local[n - 2] * engine(n - 1, dv, 0, tuple(local[: n - 2]))
        if result == 0:
            return 0
    for e in range(D.num_edges):
        w = D.edge_record(e)[2]
        if w != 1:
            result *= w ** (1 + len(marks_on[e]))
    return result


def real_multiplicity(
    marked: MarkedDiagram, n: int, engine: WelschingerEngine
) -> int:
    """Number of real curves encoded, counted through the signed invariants
    one dimension down.  Only defined for genus 0 and point constraints."""
    spec = marked.spec
    if marked.diagram.genus != 0 or any(spec.counts[1:]):
        raise ValueError(
            "real multiplicity needs genus 0 and point constraints only"
        )
    if is_degenerate(marked, n):
        return 0
    if any(w % 2 == 0 for _, _, w in marked.diagram.internal_edges):
        return 0
    result = 1
    for dv in marked.diagram.divergences:
        result *= engine(n - 1, dv)
        if result == 0:
            return 0
    return result


def seed_gromov_witten(n: int, d: int, g: int, counts: tuple) -> int:
    """Dimension-one base of the recursion: a single line, nothing else."""
    if n != 1:
        raise ValueError("seed only answers dimension 1")
    return 1 if (d, g) == (1, 0) and not counts else 0


def seed_welschinger(n: int, d: int) -> int:
    if n != 1:
        raise ValueError("seed only answers dimension 1")
    return 1 if d == 1 else 0


class MultiplicityResult:
    """Pair of multiplicities; ``mu_real`` is None when undefined."""

    __slots__ = ("mu_complex", "mu_real")

    def __init__(self, mu_complex: int, mu_real: int | None):
        if mu_complex < 0 or (mu_real is not None and mu_real < 0):
            raise ValueError("multiplicities are nonnegative")
        self.mu_complex = mu_complex
        self.mu_real = mu_real

    def __eq__(self, other):
        return (
            isinstance(other, MultiplicityResult)
            and self.mu_complex == other.mu_complex
            and self.mu_real == other.mu_real
        )

    def __repr__(self):
        return f"MultiplicityResult(mu_complex={self.mu_complex}, mu_real={self.mu_real})"


def multiplicities(
    marked: MarkedDiagram,
    n: int,
    gw_engine: GromovWittenEngine,
    w_engine: WelschingerEngine,
) -> MultiplicityResult:
    """Evaluate both multiplicities; the real one only where defined."""
    mu_c = complex_multiplicity(marked, n, gw_engine)
    spec = marked.spec
    if marked.diagram.genus == 0 and not any(spec.counts[1:]):
        mu_r = real_multiplicity(marked, n, w_engine)
    else:
        mu_r = None
    return MultiplicityResult(mu_c, mu_r)

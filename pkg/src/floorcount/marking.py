"""Constraint specifications and markings of floor diagrams.

A constraint configuration for ambient dimension n is an ordered list P of
linear-space conditions: l_j constraints of dimension j for j = 0..n-2,
listed in ascending dimension.  The counts must satisfy the dimension
condition

    sum_j l_j (n-1-j) == (n+1) d + (n-3)(1-g).

A marking assigns every constraint to a floor or to a slot on an open edge
(sinks themselves are excluded) subject to three rules:

  * sharing: two constraints may share a point only if the point is a floor
    and the earlier constraint has positive dimension;
  * coverage: every floor receives at least one constraint;
  * order: when a later constraint lands strictly below an earlier one (in
    the orientation order of the diagram), the earlier one's point must be
    hit again by some constraint later still.

Consequences used by the enumerator: marks on a single edge appear in
P-ascending order along the orientation (a rescue on an edge point is
impossible), and a floor holding a dimension-0 constraint can never receive
another mark.

Two markings are equivalent when an automorphism of the diagram carries one
assignment to the other preserving slot order along each edge;
``enumerate_markings`` emits one representative per equivalence class.  Two
markings have the same combinatorial type when additionally the constraints
may be permuted within each dimension class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagram import (
    DiagramPoint,
    EdgeSlot,
    FloorDiagram,
    FloorPoint,
    core_automorphisms,
    precedes,
)


class DimensionMismatch(ValueError):
    """The constraint counts do not satisfy the dimension condition."""


class UnsupportedGenus(ValueError):
    """Positive genus requested for ambient dimension above 2."""


@dataclass(frozen=True)
class ConstraintSpec:
    """Ordered constraint list for invariant computations.

    ``dims[i]`` is the dimension of the i-th constraint (0-based rank in P);
    constraints are ordered by ascending dimension, ties by their 1-based
    index within the dimension class.
    """

    n: int
    degree: int
    genus: int
    counts: tuple[int, ...]
    dims: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.dims)

    def label(self, rank: int) -> tuple[int, int]:
        """(dimension, 1-based index within its dimension class)."""
        j = self.dims[rank]
        before = sum(1 for i in range(rank) if self.dims[i] == j)
        return j, before + 1


def dimension_condition_holds(n: int, d: int, g: int, counts: Sequence[int]) -> bool:
    return sum(counts[j] * (n - 1 - j) for j in range(len(counts))) == (n + 1) * d + (
        n - 3
    ) * (1 - g)


def build_constraints(n: int, d: int, g: int, counts: Sequence[int]) -> ConstraintSpec:
    """Validate and build the ordered constraint list.

    Raises DimensionMismatch when the counts fail the dimension condition
    (or have the wrong shape), UnsupportedGenus for g > 0 with n > 2.
    """
    if n < 2:
        raise DimensionMismatch(f"ambient dimension must be >= 2, got {n}")
    if d < 1:
        raise DimensionMismatch(f"degree must be >= 1, got {d}")
    if g < 0:
        raise DimensionMismatch(f"genus must be >= 0, got {g}")
    if g > 0 and n > 2:
        raise UnsupportedGenus(f"genus {g} > 0 is only supported for n=2, got n={n}")
    counts = tuple(int(c) for c in counts)
    if len(counts) != n - 1:
        raise DimensionMismatch(
            f"need constraint counts (l_0,...,l_{n-2}), got {len(counts)} entries"
        )
    if any(c < 0 for c in counts):
        raise DimensionMismatch("constraint counts must be nonnegative")
    if not dimension_condition_holds(n, d, g, counts):
        lhs = sum(counts[j] * (n - 1 - j) for j in range(n - 1))
        rhs = (n + 1) * d + (n - 3) * (1 - g)
        raise DimensionMismatch(
            "dimension condition sum l_j*(n-1-j) == (n+1)d + (n-3)(1-g) fails: "
            f"{lhs} != {rhs}"
        )
    dims = tuple(j for j in range(n - 1) for _ in range(counts[j]))
    return ConstraintSpec(n, d, g, counts, dims)


@dataclass(frozen=True)
class MarkedDiagram:
    """A floor diagram together with a constraint assignment.

    ``assignment[rank]`` is the DiagramPoint of the rank-th constraint.
    Slots on each edge are 0-based consecutive along the orientation.
    """

    diagram: FloorDiagram
    spec: ConstraintSpec
    assignment: tuple[DiagramPoint, ...]

    def marks_at_floor(self, v: int) -> list[int]:
        return [
            i
            for i, p in enumerate(self.assignment)
            if isinstance(p, FloorPoint) and p.floor == v
        ]

    def marks_on_edge(self, edge_id: int) -> list[int]:
        """Ranks marking the open edge, in slot order."""
        slots = [
            (p.slot, i)
            for i, p in enumerate(self.assignment)
            if isinstance(p, EdgeSlot) and p.edge == edge_id
        ]
        return [i for _, i in sorted(slots)]


def check_marking(marked: MarkedDiagram) -> list[str]:
    """Independent validation of the marking rules; returns violations.

    Used by tests to re-check enumerator output; deliberately written
    directly from the definitions, without sharing the search machinery.
    """
    D, spec, m = marked.diagram, marked.spec, marked.assignment
    problems = []
    if len(m) != spec.size:
        problems.append("assignment length differs from constraint count")
        return problems
    # sharing rule
    for i in range(len(m)):
        for j in range(i + 1, len(m)):
            if m[i] == m[j]:
                if not isinstance(m[i], FloorPoint):
                    problems.append(f"constraints {i},{j} share a non-vertex point")
                elif spec.dims[i] == 0:
                    problems.append(
                        f"constraints {i},{j} share a floor but dim({i}) = 0"
                    )
    # coverage rule
    covered = {p.floor for p in m if isinstance(p, FloorPoint)}
    for v in range(D.num_floors):
        if v not in covered:
            problems.append(f"floor {v} receives no constraint")
    # order rule
    for q in range(len(m)):
        for qq in range(q + 1, len(m)):
            if precedes(D, m[qq], m[q]):
                rescued = any(m[r] == m[q] for r in range(qq + 1, len(m)))
                if not rescued:
                    problems.append(
                        f"constraint {qq} sits below {q} with no later constraint "
                        f"at the point of {q}"
                    )
    # slot consistency
    by_edge: dict[int, list[int]] = {}
    for p in m:
        if isinstance(p, EdgeSlot):
            by_edge.setdefault(p.edge, []).append(p.slot)
    for e, slots in by_edge.items():
        if sorted(slots) != list(range(len(slots))):
            problems.append(f"slots on edge {e} are not 0..{len(slots) - 1}")
    return problems


# ---------------------------------------------------------------------------
# enumeration up to equivalence
#
# Internally a partial marking tracks, per constraint rank, a target group:
# a floor, an internal edge, or one sink-edge block of a floor.  Sink edges
# attached to one floor are interchangeable, so block contents are generated
# set-partition style (a new block only opens in first-free position), which
# yields exactly one representative per sink-edge relabeling.  The remaining
# symmetry (floor and parallel-edge automorphisms) is quotiented by keeping
# the lexicographically smallest image of the rank signature.


class _Search:
    def __init__(self, diagram: FloorDiagram, spec: ConstraintSpec, nondegenerate: bool):
        self.D = diagram
        self.spec = spec
        self.nondeg = nondegenerate
        self.n = spec.n
        self.k = diagram.num_floors
        self.edges = diagram.internal_edges
        self.E = len(self.edges)
        self.P = spec.size
        self.dims = spec.dims
        self.genus = diagram.genus
        self.sinks = diagram.sink_counts

        k, E = self.k, self.E
        out = [[] for _ in range(k)]
        for t, h, _ in self.edges:
            out[t].append(h)
        reach = []
        for v in range(k):
            seen = set()
            stack = list(out[v])
            while stack:
                u = stack.pop()
                if u not in seen:
                    seen.add(u)
                    stack.extend(out[u])
            reach.append(seen)
        self.reach = reach

        # head-side floor component of each internal edge (trees only)
        if self.genus == 0:
            above = []
            for i, (_, h, _) in enumerate(self.edges):
                comp = {h}
                stack = [h]
                while stack:
                    v = stack.pop()
                    for j, (t2, h2, _) in enumerate(self.edges):
                        if j == i:
                            continue
                        if t2 == v and h2 not in comp:
                            comp.add(h2)
                            stack.append(h2)
                        elif h2 == v and t2 not in comp:
                            comp.add(t2)
                            stack.append(t2)
                above.append(comp)
            self.above = above
            self.V_above = [
                sum(self.D.divergences[v] for v in comp) for comp in above
            ]
            self.edges_over_floor = [
                [e for e in range(E) if v in above[e]] for v in range(k)
            ]
        else:
            self.above = [set()] * E
            self.V_above = [0] * E
            self.edges_over_floor = [[] for _ in range(k)]

        # group precedence: groups are floors 0..k-1, edges k..k+E-1,
        # sink-edge families k+E..k+E+k-1; prec[a][b] means a mark placed in
        # group a strictly precedes existing marks of group b.
        G = k + E + k
        prec = [[False] * G for _ in range(G)]

        def le_floor(u, v):
            return u == v or v in reach[u]

        for u in range(k):
            for v in range(k):
                if u != v:
                    prec[u][v] = v in reach[u]
                prec[u][k + E + v] = le_floor(u, v)
            for e in range(E):
                prec[u][k + e] = le_floor(u, self.edges[e][0])
        for e in range(E):
            he = self.edges[e][1]
            for v in range(k):
                prec[k + e][v] = le_floor(he, v)
                prec[k + e][k + E + v] = le_floor(he, v)
            for f in range(E):
                if f != e:
                    prec[k + e][k + f] = le_floor(he, self.edges[f][0])
        self.prec = prec
        self.G = G

        self.suffix = [0] * (self.P + 1)
        for i in range(self.P - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] + (self.n - 1 - self.dims[i])

        self.autos = core_automorphisms(diagram)

    def run(self) -> dict[tuple, bool]:
        """Map canonical rank signature -> degenerate flag, one per class."""
        self.results: dict[tuple, bool] = {}
        k, E = self.k, self.E
        self.group_count = [0] * self.G
        self.floor_marks = [[] for _ in range(k)]
        self.edge_marks = [[] for _ in range(E)]
        self.blocks = [[] for _ in range(k)]
        self.block_load = [[] for _ in range(k)]
        self.S = [0] * E
        self.M = [0] * E
        self.obligated = set()
        self.unmarked = k
        self.trail: list[tuple] = []
        self._place(0)
        return self.results

    # -- helpers ----------------------------------------------------------

    def _enter(self, i: int, group: int) -> bool:
        """Obligation and order-rule bookkeeping after mark i joins group;
        returns False when the branch is dead.  Appends an undo record."""
        added = []
        cleared = None
        if group < self.k and group in self.obligated:
            self.obligated.discard(group)
            cleared = group
        prow = self.prec[group]
        ok = True
        for g in range(self.G):
            if self.group_count[g] == 0 or not prow[g]:
                continue
            if g >= self.k:
                ok = False  # an edge or sink point can never be re-marked
                break
            if g in self.obligated:
                continue
            if self.floor_marks[g] and self.dims[self.floor_marks[g][0]] == 0:
                ok = False  # floor closed by a dimension-0 mark
                break
            self.obligated.add(g)
            added.append(g)
        self.trail.append((added, cleared))
        if not ok:
            return False
        remaining = self.P - i - 1
        demand = self.unmarked + len(self.obligated)
        if self.nondeg:
            for v in range(self.k):
                demand += self.sinks[v] - len(self.blocks[v])
            if self.n == 2 or self.genus > 0:
                demand += sum(1 for e in range(self.E) if self.M[e] == 0)
        if demand > remaining:
            return False
        if self.nondeg and self.genus == 0:
            n, rem = self.n, self.suffix[i + 1]
            for e in range(self.E):
                hmin = self.S[e] + 1 - self.edges[e][2] - (n + 1) * self.V_above[e]
                if (
                    hmin > n - 2
                    or hmin + rem < 0
                    or n - 1 - hmin - self.M[e] < 0
                    or hmin + self.M[e] + rem < 1
                ):
                    return False
        return True

    def _leave(self):
        added, cleared = self.trail.pop()
        for g in added:
            self.obligated.discard(g)
        if cleared is not None:
            self.obligated.add(cleared)

    # -- search -----------------------------------------------------------

    def _place(self, i: int):
        if i == self.P:
            if not self.obligated and self.unmarked == 0:
                self._finish()
            return
        contrib = self.n - 1 - self.dims[i]
        k, E = self.k, self.E

        for v in range(k):
            fm = self.floor_marks[v]
            if fm and self.dims[fm[0]] == 0:
                continue  # sharing rule: a dimension-0 mark closes the floor
            group = v
            fm.append(i)
            was_new = len(fm) == 1
            if was_new:
                self.unmarked -= 1
            self.group_count[group] += 1
            aff = self.edges_over_floor[v]
            for e in aff:
                self.S[e] += contrib
            if self._enter(i, group):
                self._place(i + 1)
            self._leave()
            for e in aff:
                self.S[e] -= contrib
            self.group_count[group] -= 1
            if was_new:
                self.unmarked += 1
            fm.pop()

        for e in range(E):
            if self.nondeg and self.M[e] + contrib > self.n - 1:
                continue
            group = k + e
            self.edge_marks[e].append(i)
            self.M[e] += contrib
            self.group_count[group] += 1
            aff = self.edges_over_floor[self.edges[e][0]]
            for f in aff:
                self.S[f] += contrib
            if self._enter(i, group):
                self._place(i + 1)
            self._leave()
            for f in aff:
                self.S[f] -= contrib
            self.group_count[group] -= 1
            self.M[e] -= contrib
            self.edge_marks[e].pop()

        for v in range(k):
            if self.sinks[v] == 0:
                continue
            group = k + E + v
            nblocks = len(self.blocks[v])
            options = range(nblocks + 1) if nblocks < self.sinks[v] else range(nblocks)
            aff = self.edges_over_floor[v]
            for b in options:
                fresh = b == nblocks
                if self.nondeg:
                    load = 0 if fresh else self.block_load[v][b]
                    if load + contrib > self.n - 1:
                        continue
                if fresh:
                    self.blocks[v].append([i])
                    self.block_load[v].append(contrib)
                else:
                    self.blocks[v][b].append(i)
                    self.block_load[v][b] += contrib
                self.group_count[group] += 1
                for e in aff:
                    self.S[e] += contrib
                if self._enter(i, group):
                    self._place(i + 1)
                self._leave()
                for e in aff:
                    self.S[e] -= contrib
                self.group_count[group] -= 1
                if fresh:
                    self.blocks[v].pop()
                    self.block_load[v].pop()
                else:
                    self.blocks[v][b].pop()
                    self.block_load[v][b] -= contrib

    # -- completion --------------------------------------------------------

    def _heights(self) -> list[int]:
        if self.genus > 0:
            return [0] * self.E
        # S holds the exact mark contributions above each edge once all
        # constraints are placed
        return [
            self.S[e] + 1 - self.edges[e][2] - (self.n + 1) * self.V_above[e]
            for e in range(self.E)
        ]

    def _degenerate(self, heights) -> bool:
        n = self.n
        for e in range(self.E):
            if not 0 <= heights[e] <= n - 2:  # incoming dim at the head floor
                return True
            if not 0 <= n - 1 - heights[e] - self.M[e] <= n - 2:
                return True
        for v in range(self.k):
            fm = self.floor_marks[v]
            if any(self.dims[q] - 1 < 0 for q in fm[:-1]):
                return True
            for b in range(len(self.blocks[v])):
                if not 0 <= n - 1 - self.block_load[v][b] <= n - 2:
                    return True
            if len(self.blocks[v]) < self.sinks[v]:
                return True  # an unmarked sink edge has outgoing dim n-1
        return False

    def _finish(self):
        degenerate = self._degenerate(self._heights())
        if degenerate and self.nondeg:
            return
        point_of: list = [None] * self.P
        for v in range(self.k):
            for q in self.floor_marks[v]:
                point_of[q] = (0, v, 0)
            for b, block in enumerate(self.blocks[v]):
                for q in block:
                    point_of[q] = (2, v, b)
        for e in range(self.E):
            for q in self.edge_marks[e]:
                point_of[q] = (1, e, 0)
        sig = self._min_signature(point_of)
        if sig not in self.results:
            self.results[sig] = degenerate

    def _min_signature(self, point_of) -> tuple:
        best = None
        for floor_perm, edge_perm in self.autos:
            image_blocks = {}
            for v in range(self.k):
                blocks = sorted(tuple(b) for b in self.blocks[v])
                image_blocks[floor_perm[v]] = {b: i for i, b in enumerate(blocks)}
            sig = []
            for q in range(self.P):
                kind, a, b = point_of[q]
                if kind == 0:
                    sig.append((0, floor_perm[a], 0))
                elif kind == 1:
                    sig.append((1, edge_perm[a], 0))
                else:
                    v2 = floor_perm[a]
                    sig.append((2, v2, image_blocks[v2][tuple(self.blocks[a][b])]))
            sig = tuple(sig)
            if best is None or sig < best:
                best = sig
        return best


def _signature_to_assignment(
    diagram: FloorDiagram, sig: Sequence[tuple]
) -> tuple[DiagramPoint, ...]:
    """Convert a rank signature to explicit diagram points.

    Sink blocks are laid out on the floor's sink edges in block order; slots
    on every edge follow the order of appearance, which is P order.
    """
    assignment: list[DiagramPoint] = []
    edge_fill: dict[int, int] = {}
    block_edge: dict[tuple[int, int], int] = {}
    for rank, (kind, a, b) in enumerate(sig):
        if kind == 0:
            assignment.append(FloorPoint(a))
            continue
        if kind == 1:
            edge_id = a
        else:
            key = (a, b)
            if key not in block_edge:
                used = sum(1 for (v, _) in block_edge if v == a)
                block_edge[key] = diagram.sink_edge_ids(a)[used]
            edge_id = block_edge[key]
        slot = edge_fill.get(edge_id, 0)
        edge_fill[edge_id] = slot + 1
        assignment.append(EdgeSlot(edge_id, slot))
    return tuple(assignment)


def enumerate_markings(
    diagram: FloorDiagram,
    spec: ConstraintSpec,
    nondegenerate_only: bool = False,
) -> list[MarkedDiagram]:
    """All markings of the diagram, one per equivalence class.

    With ``nondegenerate_only`` the stream is restricted to markings whose
    multiplicity data stays in range (the others carry zero complex and real
    multiplicity); this is the mode invariant sums run in.
    """
    if diagram.degree != spec.degree or diagram.genus != spec.genus:
        raise ValueError(
            f"diagram has (d,g)=({diagram.degree},{diagram.genus}), "
            f"spec was built for ({spec.degree},{spec.genus})"
        )
    if nondegenerate_only and not any(spec.counts[1:]):
        sigs = _point_signatures(diagram, spec)
    else:
        sigs = _Search(diagram, spec, nondegenerate_only).run()
    return [
        MarkedDiagram(diagram, spec, _signature_to_assignment(diagram, sig))
        for sig in sorted(sigs)
    ]


def _point_signatures(diagram: FloorDiagram, spec: ConstraintSpec) -> dict:
    """Nondegenerate point markings, enumerated shape first.

    A nondegenerate point marking covers every floor and every sink edge
    exactly once and a subset of the internal edges (the shape) whose
    heights work out; its classes are the linear extensions of the occupied
    targets.  Sink edges of one floor are forced into id order, which picks
    one representative per sink relabeling; the leftover core symmetry is
    quotiented as in the general search.
    """
    from .invariants import _PointShapeSummer, _subset_indicators

    n, l0 = spec.n, spec.counts[0]
    summer = _PointShapeSummer(diagram, n, l0)
    k, E = summer.k, summer.E
    spare = l0 - k - diagram.degree
    results: dict[tuple, bool] = {}
    if spare < 0 or spare > E:
        return results
    autos = core_automorphisms(diagram)
    sink_of = [v for v in range(k) for _ in range(diagram.sink_counts[v])]
    sink_index = []  # per sink target: its position among the floor's sinks
    seen: dict[int, int] = {}
    for v in sink_of:
        sink_index.append(seen.get(v, 0))
        seen[v] = seen.get(v, 0) + 1

    for marked in _subset_indicators(E, spare):
        if summer._heights(marked) is None:
            continue
        edge_list = [e for e in range(E) if marked[e]]
        preds = _point_poset(summer, sink_of, edge_list)
        total = len(preds)
        order: list[int] = []

        def emit():
            point_sig = []
            for el in order:
                if el < k:
                    point_sig.append((0, el, 0))
                elif el < k + len(sink_of):
                    s = el - k
                    point_sig.append((2, sink_of[s], sink_index[s]))
                else:
                    point_sig.append((1, edge_list[el - k - len(sink_of)], 0))
            best = None
            for floor_perm, edge_perm in autos:
                sig = tuple(
                    (kind, floor_perm[a] if kind != 1 else edge_perm[a], b)
                    for kind, a, b in point_sig
                )
                if best is None or sig < best:
                    best = sig
            if best not in results:
                results[best] = False

        def extend(placed_mask):
            if len(order) == total:
                emit()
                return
            for el in range(total):
                bit = 1 << el
                if placed_mask & bit or preds[el] & ~placed_mask:
                    continue
                order.append(el)
                extend(placed_mask | bit)
                order.pop()

        extend(0)
    return results


def _point_poset(summer, sink_of, edge_list) -> list[int]:
    """Predecessor bitmasks for the occupied targets of one shape; sink
    targets at one floor are chained in id order."""
    k = summer.k
    reach = summer.reach
    edges = summer.edges
    nsink = len(sink_of)
    base_e = k + nsink

    def le_floor(u, v):
        return u == v or v in reach[u]

    below = []
    for v in range(k):
        mask = 0
        for u in range(k):
            if u != v and v in reach[u]:
                mask |= 1 << u
        for j, e in enumerate(edge_list):
            if le_floor(edges[e][1], v):
                mask |= 1 << (base_e + j)
        below.append(mask)
    prev_sink: dict[int, int] = {}
    for s, v in enumerate(sink_of):
        mask = below[v] | (1 << v)
        if v in prev_sink:
            mask |= 1 << (k + prev_sink[v])  # id-order chain within the floor
        prev_sink[v] = s
        below.append(mask)
    for e in edge_list:
        t = edges[e][0]
        mask = below[t] | (1 << t)
        below.append(mask)
    return below


def _type_key(marked: MarkedDiagram) -> tuple:
    """Canonical dimension-decorated structure; equal keys exactly for
    markings related by a dimension-preserving constraint permutation."""
    D, spec = marked.diagram, marked.spec
    k, E = D.num_floors, len(D.internal_edges)
    floor_dims = [[] for _ in range(k)]
    edge_dims = [[] for _ in range(E)]
    sink_dims: list[dict[int, list[int]]] = [dict() for _ in range(k)]
    for rank, p in enumerate(marked.assignment):
        if isinstance(p, FloorPoint):
            floor_dims[p.floor].append(spec.dims[rank])
        elif p.edge < E:
            edge_dims[p.edge].append(spec.dims[rank])
        else:
            tail = D.edge_record(p.edge)[0]
            sink_dims[tail].setdefault(p.edge, []).append(spec.dims[rank])
    best = None
    for floor_perm, edge_perm in core_automorphisms(D):
        fd: list = [None] * k
        bd: list = [None] * k
        ed: list = [None] * E
        for v in range(k):
            fd[floor_perm[v]] = tuple(floor_dims[v])
            bd[floor_perm[v]] = tuple(sorted(tuple(x) for x in sink_dims[v].values()))
        for e in range(E):
            ed[edge_perm[e]] = tuple(edge_dims[e])
        cand = (tuple(fd), tuple(ed), tuple(bd))
        if best is None or cand < best:
            best = cand
    return best


def count_marked_by_type(
    diagram: FloorDiagram,
    spec: ConstraintSpec,
    nondegenerate_only: bool = False,
) -> list[tuple[MarkedDiagram, int]]:
    """Partition the markings into combinatorial types.

    Returns (representative, class count) pairs in a deterministic order.
    """
    groups: dict[tuple, list[MarkedDiagram]] = {}
    for marked in enumerate_markings(diagram, spec, nondegenerate_only):
        groups.setdefault(_type_key(marked), []).append(marked)
    return [(members[0], len(members)) for _, members in sorted(groups.items())]


# ---------------------------------------------------------------------------
# text format


def format_marked_diagram(marked: MarkedDiagram) -> str:
    """Diagram text followed by one mark line per constraint in P order."""
    from .diagram import format_diagram  # local import to keep module load light

    lines = [format_diagram(marked.diagram).rstrip("\n")]
    for rank, p in enumerate(marked.assignment):
        j, idx = marked.spec.label(rank)
        if isinstance(p, FloorPoint):
            where = f"floor:{p.floor}"
        else:
            where = f"edge:{p.edge}:slot:{p.slot}"
        lines.append(f"mark dim={j} idx={idx} at={where}")
    return "\n".join(lines) + "\n"


def parse_marked_diagram(text: str, n: int) -> MarkedDiagram:
    """Parse the marked text form; ``n`` fixes the ambient dimension (the
    mark lines alone cannot distinguish trailing zero constraint counts)."""
    from .diagram import parse_diagram

    diagram_lines = []
    mark_lines = []
    for line in text.splitlines():
        if line.startswith("mark "):
            mark_lines.append(line.strip())
        elif line.strip():
            diagram_lines.append(line)
    diagram = parse_diagram("\n".join(diagram_lines) + "\n")
    counts = [0] * (n - 1)
    dims = []
    points = []
    for line in mark_lines:
        fields = line.split()
        j = int(fields[1].removeprefix("dim="))
        at = fields[3].removeprefix("at=")
        if not 0 <= j <= n - 2:
            raise ValueError(f"mark dimension {j} outside 0..{n - 2}")
        counts[j] += 1
        dims.append(j)
        if at.startswith("floor:"):
            points.append(FloorPoint(int(at.removeprefix("floor:"))))
        else:
            _, edge, _, slot = at.split(":")
            points.append(EdgeSlot(int(edge), int(slot)))
    spec = build_constraints(n, diagram.degree, diagram.genus, counts)
    order = sorted(range(len(points)), key=lambda i: dims[i])  # stable: P order
    return MarkedDiagram(diagram, spec, tuple(points[i] for i in order))

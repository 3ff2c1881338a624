"""Floor diagrams: weighted oriented acyclic multigraphs with floors and sinks.

A floor diagram of degree d and genus g is a connected weighted oriented
multigraph without oriented cycles whose vertices split into *floors*
(divergence > 0) and d *sinks* (divergence -1).  The divergence of a vertex
is the total weight of its outgoing edges minus the total weight of its
incoming edges.  The first Betti number of the graph equals g.

Because a sink has divergence -1 and only incoming edges, it carries exactly
one incoming edge of weight 1 and nothing else.  Sinks are therefore stored
implicitly: a diagram is a list of floor divergences, a list of weighted
internal edges between floors, and a per-floor count of attached sink edges.

Edge identifiers used throughout the package index the full edge table:
internal edges first (in storage order), then sink edges grouped by floor in
ascending floor order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache


class DiagramError(ValueError):
    """Raised for structurally invalid diagrams or invalid point references."""


@dataclass(frozen=True)
class FloorPoint:
    """A point of the diagram sitting at a floor vertex."""

    floor: int


@dataclass(frozen=True)
class EdgeSlot:
    """A point in the interior of an (open) edge.

    ``slot`` is a 0-based position along the edge's orientation; slot i
    precedes slot j on the same edge whenever i < j.
    """

    edge: int
    slot: int


DiagramPoint = FloorPoint | EdgeSlot


@dataclass(frozen=True)
class FloorDiagram:
    """Immutable floor diagram.

    Attributes:
        divergences: cached divergence of each floor; floor ids are
            0..len(divergences)-1.
        internal_edges: directed weighted edges (tail, head, weight) between
            floors.  Parallel edges are allowed, self-loops are not.
        sink_counts: number of sink edges attached to each floor.  Every sink
            edge has weight 1 and points from its floor to a private sink.
    """

    divergences: tuple[int, ...]
    internal_edges: tuple[tuple[int, int, int], ...]
    sink_counts: tuple[int, ...]

    def __post_init__(self):
        k = len(self.divergences)
        if k == 0:
            raise DiagramError("a diagram needs at least one floor")
        if len(self.sink_counts) != k:
            raise DiagramError("sink_counts must have one entry per floor")
        for t, h, w in self.internal_edges:
            if not (0 <= t < k and 0 <= h < k):
                raise DiagramError(f"edge ({t},{h}) references unknown floor")
            if t == h:
                raise DiagramError("self-loops are forbidden")
            if w < 1:
                raise DiagramError("edge weights must be positive")
        if any(s < 0 for s in self.sink_counts):
            raise DiagramError("sink counts must be nonnegative")

    @classmethod
    def from_flows(cls, internal_edges, sink_counts) -> "FloorDiagram":
        """Build a diagram computing floor divergences from the edge data."""
        internal_edges = tuple(tuple(e) for e in internal_edges)
        sink_counts = tuple(sink_counts)
        k = len(sink_counts)
        divs = [0] * k
        for v in range(k):
            divs[v] += sink_counts[v]
        for t, h, w in internal_edges:
            divs[t] += w
            divs[h] -= w
        return cls(tuple(divs), internal_edges, sink_counts)

    @property
    def num_floors(self) -> int:
        return len(self.divergences)

    @property
    def degree(self) -> int:
        return sum(self.sink_counts)

    @property
    def genus(self) -> int:
        # b1 of the full graph; sinks are leaves so only the core contributes
        return len(self.internal_edges) - self.num_floors + 1

    @property
    def num_edges(self) -> int:
        return len(self.internal_edges) + self.degree

    def edge_record(self, edge_id: int):
        """(tail, head-or-None, weight) for a full-table edge id.

        ``head`` is None for sink edges (the sink vertex is implicit).
        """
        ni = len(self.internal_edges)
        if 0 <= edge_id < ni:
            return self.internal_edges[edge_id]
        j = edge_id - ni
        if not 0 <= j < self.degree:
            raise DiagramError(f"unknown edge id {edge_id}")
        for v, s in enumerate(self.sink_counts):
            if j < s:
                return (v, None, 1)
            j -= s
        raise AssertionError("unreachable")

    def sink_edge_ids(self, floor: int) -> range:
        """Full-table ids of the sink edges attached to ``floor``."""
        base = len(self.internal_edges) + sum(self.sink_counts[:floor])
        return range(base, base + self.sink_counts[floor])

    def is_sink_edge(self, edge_id: int) -> bool:
        return edge_id >= len(self.internal_edges)

    def edge_weight(self, edge_id: int) -> int:
        return self.edge_record(edge_id)[2]


def divergence(diagram: FloorDiagram, floor: int) -> int:
    """Total outgoing edge weight minus total incoming edge weight at a floor."""
    if not 0 <= floor < diagram.num_floors:
        raise DiagramError(f"unknown floor id {floor}")
    out_w = diagram.sink_counts[floor]
    in_w = 0
    for t, h, w in diagram.internal_edges:
        if t == floor:
            out_w += w
        if h == floor:
            in_w += w
    return out_w - in_w


def is_connected(diagram: FloorDiagram) -> bool:
    """Connectivity of the underlying graph; sinks are leaves, so the core
    (floors plus internal edges) decides."""
    k = diagram.num_floors
    adj = [set() for _ in range(k)]
    for t, h, _ in diagram.internal_edges:
        adj[t].add(h)
        adj[h].add(t)
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == k


def is_acyclic(diagram: FloorDiagram) -> bool:
    """No oriented cycle among the internal edges (sink edges cannot close one)."""
    k = diagram.num_floors
    out = [[] for _ in range(k)]
    indeg = [0] * k
    for t, h, _ in diagram.internal_edges:
        out[t].append(h)
        indeg[h] += 1
    queue = [v for v in range(k) if indeg[v] == 0]
    removed = 0
    while queue:
        v = queue.pop()
        removed += 1
        for u in out[v]:
            indeg[u] -= 1
            if indeg[u] == 0:
                queue.append(u)
    return removed == k


def first_betti(diagram: FloorDiagram) -> int:
    """#edges - #vertices + 1 of the full graph; requires connectivity."""
    if not is_connected(diagram):
        raise DiagramError("first Betti number of a disconnected diagram")
    d = diagram.degree
    return (len(diagram.internal_edges) + d) - (diagram.num_floors + d) + 1


def validate(diagram: FloorDiagram, degree: int, genus: int) -> list[str]:
    """Check every floor-diagram invariant; return all violated clauses.

    An empty list means the diagram is a valid floor diagram of the given
    degree and genus.  Violations are returned, not raised.
    """
    problems = []
    if not is_connected(diagram):
        problems.append("diagram is not connected")
    if not is_acyclic(diagram):
        problems.append("diagram contains an oriented cycle")
    for v in range(diagram.num_floors):
        dv = divergence(diagram, v)
        if dv != diagram.divergences[v]:
            problems.append(
                f"cached divergence of floor {v} is {diagram.divergences[v]}, "
                f"recomputed {dv}"
            )
        if dv <= 0:
            problems.append(f"div(v)>0 violated at floor {v} (div={dv})")
    total_div = sum(divergence(diagram, v) for v in range(diagram.num_floors))
    if total_div != diagram.degree:
        problems.append(
            f"flow conservation violated: sum of divergences {total_div} != "
            f"#sinks {diagram.degree}"
        )
    if diagram.degree != degree:
        problems.append(f"#sinks is {diagram.degree}, expected degree {degree}")
    if is_connected(diagram):
        b1 = first_betti(diagram)
        if b1 != genus:
            problems.append(f"first Betti number is {b1}, expected genus {genus}")
    for t, h, w in diagram.internal_edges:
        if not 1 <= w <= degree:
            problems.append(f"edge weight {w} outside 1..{degree}")
    return problems


# ---------------------------------------------------------------------------
# order structure


@lru_cache(maxsize=None)
def _strict_reach(diagram: FloorDiagram) -> tuple[frozenset, ...]:
    """strict_reach[v] = floors reachable from v by a nonempty oriented path."""
    k = diagram.num_floors
    out = [[] for _ in range(k)]
    for t, h, _ in diagram.internal_edges:
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
        reach.append(frozenset(seen))
    return tuple(reach)


def _check_point(diagram: FloorDiagram, p: DiagramPoint) -> None:
    if isinstance(p, FloorPoint):
        if not 0 <= p.floor < diagram.num_floors:
            raise DiagramError(f"invalid point: unknown floor {p.floor}")
    elif isinstance(p, EdgeSlot):
        diagram.edge_record(p.edge)
        if p.slot < 0:
            raise DiagramError("invalid point: negative slot index")
    else:
        raise DiagramError(f"not a diagram point: {p!r}")


def _floor_before(diagram, reach, v: int, u: int) -> bool:
    # reflexive comparison v <= u in the orientation order of the floors
    return v == u or u in reach[v]


def precedes(diagram: FloorDiagram, p: DiagramPoint, q: DiagramPoint) -> bool:
    """Strict order induced by orientation: p comes before q along the flow.

    tail(e) < every slot of e < head(e); slots on one edge follow their
    indices; a floor precedes another iff a nonempty oriented path joins
    them.  Points on edges hanging in different branches are incomparable.
    """
    _check_point(diagram, p)
    _check_point(diagram, q)
    reach = _strict_reach(diagram)
    if isinstance(p, FloorPoint):
        if isinstance(q, FloorPoint):
            return q.floor in reach[p.floor]
        tail = diagram.edge_record(q.edge)[0]
        return _floor_before(diagram, reach, p.floor, tail)
    ptail, phead, _ = diagram.edge_record(p.edge)
    if isinstance(q, EdgeSlot) and q.edge == p.edge:
        return p.slot < q.slot
    if phead is None:
        return False  # beyond a sink edge slot there is only the sink
    if isinstance(q, FloorPoint):
        return _floor_before(diagram, reach, phead, q.floor)
    qtail = diagram.edge_record(q.edge)[0]
    return _floor_before(diagram, reach, phead, qtail)


# ---------------------------------------------------------------------------
# canonical form and automorphisms


def _refined_colors(diagram: FloorDiagram, seed=None) -> tuple[int, ...]:
    """Iterative color refinement of the floors.

    Initial colors encode (divergence, sink count) plus an optional seed used
    for individualization; rounds refine by the multiset of (direction,
    weight, neighbour color) over incident internal edges.
    """
    k = diagram.num_floors
    colors = [(diagram.divergences[v], diagram.sink_counts[v]) for v in range(k)]
    if seed:
        colors = [(colors[v], seed.get(v, -1)) for v in range(k)]
    ranks = _rank(colors)
    while True:
        sigs = []
        for v in range(k):
            nbrs = []
            for t, h, w in diagram.internal_edges:
                if t == v:
                    nbrs.append((0, w, ranks[h]))
                if h == v:
                    nbrs.append((1, w, ranks[t]))
            sigs.append((ranks[v], tuple(sorted(nbrs))))
        new = _rank(sigs)
        if new == ranks:
            return tuple(ranks)
        ranks = new


def _rank(values) -> list[int]:
    order = {val: i for i, val in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def _discrete_labelings(diagram: FloorDiagram):
    """Candidate canonical labelings: permutations old->new consistent with
    color refinement, individualizing one cell at a time when needed."""
    k = diagram.num_floors

    def explore(seed):
        ranks = _refined_colors(diagram, seed)
        cells = {}
        for v, c in enumerate(ranks):
            cells.setdefault(c, []).append(v)
        split = next((vs for _, vs in sorted(cells.items()) if len(vs) > 1), None)
        if split is None:
            perm = [0] * k
            for new_id, (_, v) in enumerate(sorted((ranks[v], v) for v in range(k))):
                perm[v] = new_id
            yield tuple(perm)
            return
        marker = max(seed.values(), default=0) + 1
        for v in split:
            child = dict(seed)
            child[v] = marker
            yield from explore(child)

    yield from explore({})


def _encode(diagram: FloorDiagram, perm) -> tuple:
    k = diagram.num_floors
    divs = [0] * k
    sinks = [0] * k
    for v in range(k):
        divs[perm[v]] = diagram.divergences[v]
        sinks[perm[v]] = diagram.sink_counts[v]
    edges = sorted((perm[t], perm[h], w) for t, h, w in diagram.internal_edges)
    return (tuple(divs), tuple(sinks), tuple(edges))


@lru_cache(maxsize=None)
def canonical_form(diagram: FloorDiagram) -> bytes:
    """Canonical key: equal byte strings exactly for isomorphic diagrams.

    Sink edges carry no structure beyond their count per floor, so the key is
    a canonical labeling of the core (floors, internal edges, per-floor sink
    counts).  Deterministic across runs: no use of builtin hashing.
    """
    best = min(_encode(diagram, perm) for perm in _discrete_labelings(diagram))
    divs, sinks, edges = best
    parts = [
        f"d={diagram.degree}",
        f"g={diagram.genus}",
        "floors=" + ",".join(f"{dv}.{s}" for dv, s in zip(divs, sinks)),
        "edges=" + ",".join(f"{t}>{h}:{w}" for t, h, w in edges),
    ]
    return ";".join(parts).encode("ascii")


def canonical_order(diagram: FloorDiagram) -> tuple[int, ...]:
    """A relabeling old->new realizing the canonical form."""
    return min(
        _discrete_labelings(diagram), key=lambda perm: _encode(diagram, perm)
    )


def relabel(diagram: FloorDiagram, perm) -> FloorDiagram:
    """Apply a floor permutation old->new, producing an isomorphic diagram."""
    k = diagram.num_floors
    divs = [0] * k
    sinks = [0] * k
    for v in range(k):
        divs[perm[v]] = diagram.divergences[v]
        sinks[perm[v]] = diagram.sink_counts[v]
    edges = tuple(sorted((perm[t], perm[h], w) for t, h, w in diagram.internal_edges))
    return FloorDiagram(tuple(divs), edges, tuple(sinks))


def canonicalize(diagram: FloorDiagram) -> FloorDiagram:
    """The canonical representative of the isomorphism class."""
    return relabel(diagram, canonical_order(diagram))


@lru_cache(maxsize=None)
def core_automorphisms(diagram: FloorDiagram):
    """Automorphisms of the core as (floor_perm, internal_edge_perm) pairs.

    Sink edges at one floor are mutually interchangeable; their permutations
    are implicit and not listed here (see :func:`automorphisms`).
    """
    k = diagram.num_floors
    ranks = _refined_colors(diagram)
    cells = {}
    for v, c in enumerate(ranks):
        cells.setdefault(c, []).append(v)
    base = sorted(diagram.internal_edges)
    result = []
    groups = [vs for _, vs in sorted(cells.items())]
    if _product_of_factorials(groups) > 1_000_000:
        raise DiagramError("automorphism search space too large for desk scale")
    for choice in itertools.product(*[itertools.permutations(vs) for vs in groups]):
        perm = [0] * k
        for vs, img in zip(groups, choice):
            for v, u in zip(vs, img):
                perm[v] = u
        if any(
            diagram.divergences[perm[v]] != diagram.divergences[v]
            or diagram.sink_counts[perm[v]] != diagram.sink_counts[v]
            for v in range(k)
        ):
            continue
        mapped = [(perm[t], perm[h], w) for t, h, w in diagram.internal_edges]
        if sorted(mapped) != base:
            continue
        for eperm in _edge_bijections(diagram.internal_edges, mapped):
            result.append((tuple(perm), eperm))
    return tuple(result)


def _product_of_factorials(groups) -> int:
    out = 1
    for g in groups:
        for i in range(2, len(g) + 1):
            out *= i
    return out


def _edge_bijections(edges, mapped):
    """All bijections i->j with mapped[i] == edges[j] (parallel-edge freedom)."""
    n = len(edges)
    slots = {}
    for j, e in enumerate(edges):
        slots.setdefault(e, []).append(j)
    by_image = {}
    for i in range(n):
        by_image.setdefault(mapped[i], []).append(i)
    # permute within each class of identical images
    class_items = sorted(by_image.items())
    choices = []
    for e, idxs in class_items:
        targets = slots[e]
        choices.append([list(zip(idxs, p)) for p in itertools.permutations(targets)])
    for combo in itertools.product(*choices):
        eperm = [0] * n
        for pairs in combo:
            for i, j in pairs:
                eperm[i] = j
        yield tuple(eperm)


def automorphisms(diagram: FloorDiagram):
    """All weight- and orientation-preserving self-maps of the diagram.

    Each automorphism is (floor_perm, edge_perm) over the full edge table;
    sink-edge permutations within a floor are expanded explicitly, so the
    group of a floor with s sinks alone already has order s!.
    """
    ni = len(diagram.internal_edges)
    result = []
    for floor_perm, internal_perm in core_automorphisms(diagram):
        sink_choices = []
        for v in range(diagram.num_floors):
            own = list(diagram.sink_edge_ids(v))
            target = list(diagram.sink_edge_ids(floor_perm[v]))
            sink_choices.append(
                [list(zip(own, p)) for p in itertools.permutations(target)]
            )
        for combo in itertools.product(*sink_choices):
            eperm = list(internal_perm) + [0] * diagram.degree
            for pairs in combo:
                for i, j in pairs:
                    eperm[i] = j
            result.append((floor_perm, tuple(eperm)))
    return result


# ---------------------------------------------------------------------------
# text formats


def format_diagram(diagram: FloorDiagram) -> str:
    """Bit-exact one-record-per-line text form, LF-terminated."""
    lines = [f"floordiagram d={diagram.degree} g={diagram.genus}"]
    for v in range(diagram.num_floors):
        lines.append(f"floor {v} div={diagram.divergences[v]}")
    sink = 0
    for t, h, w in diagram.internal_edges:
        lines.append(f"edge {t} -> {h} w={w}")
    for v in range(diagram.num_floors):
        for _ in range(diagram.sink_counts[v]):
            lines.append(f"edge {v} -> s{sink} w=1")
            sink += 1
    return "\n".join(lines) + "\n"


def parse_diagram(text: str) -> FloorDiagram:
    """Parse the text form back into a diagram; inverse of format_diagram."""
    divs = {}
    internal = []
    sinks_at = {}
    seen_sinks = set()
    header = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = line.split()
        try:
            if fields[0] == "floordiagram":
                header = line
            elif fields[0] == "floor":
                v = int(fields[1])
                divs[v] = int(fields[2].removeprefix("div="))
            elif fields[0] == "edge":
                if fields[2] != "->":
                    raise ValueError("expected '->'")
                t = int(fields[1])
                w = int(fields[4].removeprefix("w="))
                if fields[3].startswith("s"):
                    label = fields[3]
                    if label in seen_sinks:
                        raise ValueError(f"sink {label} has two incoming edges")
                    seen_sinks.add(label)
                    if w != 1:
                        raise ValueError("sink edges must have weight 1")
                    sinks_at[t] = sinks_at.get(t, 0) + 1
                else:
                    internal.append((t, int(fields[3]), w))
            else:
                raise ValueError(f"unknown record {fields[0]!r}")
        except (ValueError, IndexError) as exc:
            raise DiagramError(f"line {lineno}: cannot parse {line!r}: {exc}") from exc
    if header is None:
        raise DiagramError("missing floordiagram header line")
    if sorted(divs) != list(range(len(divs))):
        raise DiagramError("floor ids must be 0-based and ascending")
    k = len(divs)
    diagram = FloorDiagram(
        tuple(divs[v] for v in range(k)),
        tuple(internal),
        tuple(sinks_at.get(v, 0) for v in range(k)),
    )
    return diagram


def to_dot(diagram: FloorDiagram, marks=None) -> str:
    """GraphViz export: floors as ellipses labeled by divergence, sinks as
    small points, weights as edge labels (omitted when 1).

    ``marks`` may map full-table edge ids to a list of labels (drawn on the
    edge) and floor ids offset by 'f' keys to floor labels; the diagrams
    subcommand uses it to show marked diagrams.
    """
    marks = marks or {}
    out = ["digraph floordiagram {"]
    out.append("  rankdir=TB;")
    for v in range(diagram.num_floors):
        label = str(diagram.divergences[v])
        extra = marks.get(("f", v))
        if extra:
            label += "|" + ",".join(extra)
        out.append(f'  f{v} [shape=ellipse, label="{label}"];')
    sink = 0
    edge_id = 0
    for t, h, w in diagram.internal_edges:
        attrs = []
        if w != 1:
            attrs.append(f'label="{w}"')
        onedge = marks.get(("e", edge_id))
        if onedge:
            attrs.append(f'taillabel="{",".join(onedge)}"')
        suffix = f" [{', '.join(attrs)}]" if attrs else ""
        out.append(f"  f{t} -> f{h}{suffix};")
        edge_id += 1
    for v in range(diagram.num_floors):
        for _ in range(diagram.sink_counts[v]):
            out.append(f'  s{sink} [shape=point, label=""];')
            onedge = marks.get(("e", edge_id))
            suffix = f' [taillabel="{",".join(onedge)}"]' if onedge else ""
            out.append(f"  f{v} -> s{sink}{suffix};")
            sink += 1
            edge_id += 1
    out.append("}")
    return "\n".join(out) + "\n"

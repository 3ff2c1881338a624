"""Top-level curve counts with a persistent memo cache.

The count of degree-d genus-g curves in n-space through a generic
configuration is the sum of the complex multiplicity over all marked floor
diagrams of that degree and genus.  The signed real count for n = 2, 3 is
(-1)^(n(d-1)(d-2)/2) times the sum of the real multiplicity over the marked
diagrams of genus 0 through the point configuration determined by d.

Evaluating a floor of divergence a inside an n-dimensional diagram requires
counts in dimension n-1 (degree a, genus 0), so computations recurse across
dimensions down to the trivial dimension-1 seed.  Results are memoized in an
InvariantCache keyed by the query, optionally persisted as a line-oriented
text file with a trailing checksum.
"""

from __future__ import annotations

import hashlib
import multiprocessing
import threading
from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

from .diagram import FloorDiagram, core_automorphisms
from .enumeration import DEFAULT_DEGREE_CAP, enumerate_floor_diagrams
from .marking import (
    ConstraintSpec,
    DimensionMismatch,
    UnsupportedGenus,
    build_constraints,
    dimension_condition_holds,
    enumerate_markings,
)
from .multiplicity import (
    complex_multiplicity,
    seed_gromov_witten,
    seed_welschinger,
)


class UnsupportedDimension(ValueError):
    """Signed real counts exist only for ambient dimension 2 and 3."""


class CacheIntegrityError(ValueError):
    """A cache file failed its checksum or could not be parsed."""


CACHE_HEADER = "floorcount-cache 1"


@dataclass(frozen=True)
class InvariantKey:
    """Canonical identity of one invariant query."""

    kind: str  # "GW" or "W"
    n: int
    d: int
    g: int
    l: tuple[int, ...]

    def serialize(self) -> str:
        if self.kind == "W":
            return f"W:{self.n}:{self.d}"
        lpart = ",".join(str(c) for c in self.l) if self.l else "-"
        return f"GW:{self.n}:{self.d}:{self.g}:{lpart}"

    @classmethod
    def parse(cls, text: str) -> "InvariantKey":
        fields = text.split(":")
        try:
            if fields[0] == "W" and len(fields) == 3:
                return cls("W", int(fields[1]), int(fields[2]), 0, ())
            if fields[0] == "GW" and len(fields) == 5:
                l = () if fields[4] == "-" else tuple(
                    int(c) for c in fields[4].split(",")
                )
                return cls("GW", int(fields[1]), int(fields[2]), int(fields[3]), l)
        except ValueError:
            pass
        raise CacheIntegrityError(f"malformed invariant key {text!r}")

    @classmethod
    def gw(cls, n: int, d: int, g: int, l: Sequence[int]) -> "InvariantKey":
        return cls("GW", n, d, g, tuple(l))

    @classmethod
    def welschinger(cls, n: int, d: int) -> "InvariantKey":
        return cls("W", n, d, 0, ())


class InvariantCache:
    """Memo table from invariant keys to exact integers.

    Entries are immutable once written; concurrent idempotent inserts of the
    same value are harmless, a conflicting insert raises.
    """

    def __init__(self, entries: dict[str, int] | None = None):
        self._entries: dict[str, int] = dict(entries or {})
        self._lock = threading.Lock()

    def get(self, key: InvariantKey) -> int | None:
        return self._entries.get(key.serialize())

    def put(self, key: InvariantKey, value: int) -> None:
        name = key.serialize()
        with self._lock:
            old = self._entries.get(name)
            if old is not None and old != value:
                raise CacheIntegrityError(
                    f"cache entry {name} already holds {old}, refusing {value}"
                )
            self._entries[name] = value

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            return dict(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InvariantCache) and self._entries == other._entries
        )


def _cache_body(entries: dict[str, int]) -> list[str]:
    lines = [CACHE_HEADER]
    for name in sorted(entries):
        InvariantKey.parse(name)  # keys must round-trip
        lines.append(f"{name} {entries[name]}")
    return lines


def cache_store(cache: InvariantCache, path) -> None:
    """Write the cache as text: header, sorted entries, checksum line."""
    body = _cache_body(cache.snapshot())
    digest = hashlib.sha256("\n".join(body).encode("ascii")).hexdigest()
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(body) + f"\nchecksum {digest}\n")


def cache_load(path) -> InvariantCache:
    """Load a cache file, verifying the trailing checksum."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != CACHE_HEADER:
        raise CacheIntegrityError("missing or unknown cache header")
    if not lines[-1].startswith("checksum "):
        raise CacheIntegrityError("missing checksum line")
    claimed = lines[-1].removeprefix("checksum ")
    digest = hashlib.sha256("\n".join(lines[:-1]).encode("ascii")).hexdigest()
    if digest != claimed:
        raise CacheIntegrityError("cache checksum mismatch")
    entries: dict[str, int] = {}
    for line in lines[1:-1]:
        name, _, value = line.partition(" ")
        InvariantKey.parse(name)
        try:
            entries[name] = int(value)
        except ValueError as exc:
            raise CacheIntegrityError(f"bad cache value in {line!r}") from exc
    return InvariantCache(entries)


# ---------------------------------------------------------------------------
# engine


# ---------------------------------------------------------------------------
# point-configuration fast path
#
# For point constraints only, a marking of nonzero multiplicity puts exactly
# one point on every floor, every sink edge, and a subset of the internal
# edges (a second point on an edge would push its outgoing dimension below
# zero).  Fixing that subset (the "shape") determines every height, hence
# degeneracy and the multiplicity; the markings of one shape are exactly the
# linear extensions of the occupied-target order.  Summing over classes then
# reduces to counting linear extensions:
#
#   sum over classes of mu = (1/|G|) * sum over shapes of
#       ext(shape) * mu(shape) * fix(shape)
#
# where G is the full automorphism group (core automorphisms times sink-edge
# permutations) and fix(shape) counts automorphisms fixing every occupied
# target, i.e. permutations of unmarked identical parallel edges.  This is
# the orbit-counting identity: mu and the stabilizer order are constant on
# each equivalence class.


def _count_linear_extensions(preds: list[int]) -> int:
    """Number of total orders extending the partial order.

    ``preds[i]`` is a bitmask of the elements that must appear before i.
    DP over downsets, processed in layers of equal popcount.
    """
    n = len(preds)
    full = (1 << n) - 1
    layer = {0: 1}
    for _ in range(n):
        nxt: dict[int, int] = {}
        for mask, ways in layer.items():
            free = full & ~mask
            while free:
                bit = free & -free
                free ^= bit
                i = bit.bit_length() - 1
                if preds[i] & ~mask == 0:
                    key = mask | bit
                    nxt[key] = nxt.get(key, 0) + ways
        layer = nxt
    return layer.get(full, 0)


class _PointShapeSummer:
    """Per-diagram shape sums for point-only configurations."""

    def __init__(self, diagram: FloorDiagram, n: int, l0: int):
        self.D = diagram
        self.n = n
        self.l0 = l0
        self.k = diagram.num_floors
        self.edges = diagram.internal_edges
        self.E = len(self.edges)
        self.genus = diagram.genus
        self.sinks = diagram.sink_counts
        self.autos = core_automorphisms(diagram)

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

        group = 1
        for s in self.sinks:
            group *= _factorial(s)
        self.group_order = group * len(self.autos)

    def _heights(self, marked: tuple[int, ...]) -> list[int] | None:
        """Heights per internal edge for a shape, or None when degenerate.

        A marked internal edge needs height exactly 0, an unmarked one a
        height in 1..n-2 (its outgoing dimension is n-1-h).
        """
        n = self.n
        if self.genus > 0:
            return None if 0 in marked else [0] * self.E
        heights = []
        for e in range(self.E):
            comp = self.above[e]
            floors_above = len(comp)
            sinks_above = sum(self.sinks[v] for v in comp)
            marked_above = sum(
                marked[f]
                for f in range(self.E)
                if f != e and self.edges[f][0] in comp
            )
            s = (n - 1) * (floors_above + sinks_above + marked_above)
            h = s + 1 - self.edges[e][2] - (n + 1) * sum(
                self.D.divergences[v] for v in comp
            )
            if marked[e]:
                if h != 0:
                    return None
            elif not 1 <= h <= n - 2:
                return None
            heights.append(h)
        return heights

    def _shape_multiplicity(self, marked, heights, engine) -> int:
        n = self.n
        result = 1
        for v in range(self.k):
            local = [0] * (n - 1)
            local[0] += 1  # the floor's own point
            for e in range(self.E):
                t, h, _ = self.edges[e]
                if h == v:
                    local[heights[e]] += 1
                if t == v:
                    local[0 if marked[e] else n - 1 - heights[e]] += 1
            local[0] += self.sinks[v]  # each sink edge contributes dimension 0
            dv = self.D.divergences[v]
            result *= dv ** local[n - 2] * engine(n - 1, dv, 0, tuple(local[: n - 2]))
            if result == 0:
                return 0
        for e in range(self.E):
            result *= self.edges[e][2] ** (1 + marked[e])
        return result

    def _extension_count(self, marked) -> int:
        k, E = self.k, self.E
        # elements: floors 0..k-1, then sink targets, then marked edges
        sink_base = k
        ids = []
        sink_of = []
        for v in range(k):
            for _ in range(self.sinks[v]):
                sink_of.append(v)
        edge_ids = {}
        next_id = k + len(sink_of)
        for e in range(E):
            if marked[e]:
                edge_ids[e] = next_id
                next_id += 1
        total = next_id

        floor_le = [
            [u == v or v in self.reach[u] for v in range(k)] for u in range(k)
        ]
        below_floor = [0] * k  # mask of elements preceding floor v
        for v in range(k):
            mask = 0
            for u in range(k):
                if u != v and v in self.reach[u]:
                    mask |= 1 << u
            for e, eid in edge_ids.items():
                if floor_le[self.edges[e][1]][v]:
                    mask |= 1 << eid
            below_floor[v] = mask

        preds = list(below_floor)
        for i, v in enumerate(sink_of):
            mask = 1 << v
            for u in range(k):
                if u != v and v in self.reach[u]:
                    mask |= 1 << u
            for e, eid in edge_ids.items():
                if floor_le[self.edges[e][1]][v]:
                    mask |= 1 << eid
            preds.append(mask)
        for e in sorted(edge_ids, key=edge_ids.get):
            t = self.edges[e][0]
            mask = 1 << t
            for u in range(k):
                if u != t and t in self.reach[u]:
                    mask |= 1 << u
            for f, fid in edge_ids.items():
                if f != e and floor_le[self.edges[f][1]][t]:
                    mask |= 1 << fid
            preds.append(mask)
        assert len(preds) == total
        return _count_linear_extensions(preds)

    def _fixing(self, marked) -> int:
        """Automorphisms fixing every occupied target: permutations of
        unmarked edges within parallel same-weight classes."""
        classes: dict[tuple, int] = {}
        for e in range(self.E):
            if not marked[e]:
                classes[self.edges[e]] = classes.get(self.edges[e], 0) + 1
        out = 1
        for c in classes.values():
            out *= _factorial(c)
        return out

    def weighted_sum(self, engine) -> int:
        """Sum of the complex multiplicity over marking classes (engine
        callable) or the bare class count (engine None)."""
        spare = self.l0 - self.k - self.D.degree
        if spare < 0 or spare > self.E:
            return 0
        total = 0
        for marked in _subset_indicators(self.E, spare):
            heights = self._heights(marked)
            if heights is None:
                continue
            if engine is None:
                mu = 1
            else:
                mu = self._shape_multiplicity(marked, heights, engine)
                if mu == 0:
                    continue
            ext = self._extension_count(marked)
            if ext:
                total += ext * mu * self._fixing(marked)
        classes, rest = divmod(total, self.group_order)
        if rest:
            raise AssertionError("orbit count must divide the weighted sum")
        return classes


def _factorial(s: int) -> int:
    out = 1
    for i in range(2, s + 1):
        out *= i
    return out


def _subset_indicators(n: int, size: int):
    """0/1 tuples of length n with ``size`` ones."""
    import itertools

    for positions in itertools.combinations(range(n), size):
        marked = [0] * n
        for p in positions:
            marked[p] = 1
        yield tuple(marked)


class Engine:
    """Curve-count engine: memoized, optionally parallel over diagrams.

    ``jobs`` > 1 spreads the per-diagram marking sums over worker processes;
    results are reduced in the deterministic canonical diagram order, so the
    outcome is independent of the worker count.  Point-only configurations
    are evaluated by counting linear extensions per marking shape; mixed
    configurations run the general marking search.
    """

    def __init__(
        self,
        cache: InvariantCache | None = None,
        jobs: int = 1,
        max_degree: int = DEFAULT_DEGREE_CAP,
    ):
        self.cache = cache if cache is not None else InvariantCache()
        self.jobs = max(1, int(jobs))
        self.max_degree = max_degree

    # -- public queries -----------------------------------------------------

    def gromov_witten(self, n: int, d: int, g: int, l: Sequence[int]) -> int:
        """Count of complex degree-d genus-g curves through the configuration.

        Raises DimensionMismatch when the constraint counts fail the
        dimension condition and UnsupportedGenus for g > 0 with n > 2.
        """
        build_constraints(n, d, g, l)  # validates, raises on bad input
        return self._gw_value(n, d, g, tuple(int(c) for c in l))

    def welschinger(self, n: int, d: int) -> int:
        """Signed count of real rational degree-d curves through points."""
        if n not in (2, 3):
            raise UnsupportedDimension(
                f"signed real counts are defined for n in (2, 3), got {n}"
            )
        if d < 1:
            raise ValueError(f"degree must be >= 1, got {d}")
        return self._w_value(n, d)

    # -- recursion ------------------------------------------------------------

    def _gw_or_zero(self, n: int, d: int, g: int, l: tuple[int, ...]) -> int:
        """Inner engine: zero when the dimension condition fails."""
        if d < 1 or g < 0 or not dimension_condition_holds(n, d, g, l):
            return 0
        return self._gw_value(n, d, g, l)

    def _gw_value(self, n: int, d: int, g: int, l: tuple[int, ...]) -> int:
        if n == 1:
            return seed_gromov_witten(n, d, g, l)
        key = InvariantKey.gw(n, d, g, l)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        spec = build_constraints(n, d, g, l)
        diagrams = self._diagrams(d, g)
        if n == 2:
            # a floor of divergence >= 2 forces a zero factor in dimension 1
            diagrams = [D for D in diagrams if set(D.divergences) == {1}]
        value = sum(self._map(_gw_diagram_task, diagrams, spec))
        self.cache.put(key, value)
        return value

    def _w_value(self, n: int, d: int) -> int:
        if n == 1:
            return seed_welschinger(n, d)
        key = InvariantKey.welschinger(n, d)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        l0, rest = divmod((n + 1) * d + (n - 3), n - 1)
        if rest:
            raise UnsupportedDimension(
                f"no point configuration determines degree {d} in dimension {n}"
            )
        spec = build_constraints(n, d, 0, (l0,) + (0,) * (n - 2))
        candidates = []
        for D in self._diagrams(d, 0):
            if any(w % 2 == 0 for _, _, w in D.internal_edges):
                continue
            base = prod(self._w_value(n - 1, dv) for dv in D.divergences)
            if base:
                candidates.append((D, base))
        counts = self._map(_w_diagram_task, [D for D, _ in candidates], spec)
        total = sum(base * cnt for (_, base), cnt in zip(candidates, counts))
        exponent = n * (d - 1) * (d - 2) // 2
        value = -total if exponent % 2 else total
        self.cache.put(key, value)
        return value

    # -- execution ------------------------------------------------------------

    def _diagrams(self, d: int, g: int) -> list[FloorDiagram]:
        return list(enumerate_floor_diagrams(d, g, max_degree=self.max_degree))

    def _map(self, task, diagrams: list[FloorDiagram], spec: ConstraintSpec):
        if self.jobs == 1 or len(diagrams) <= 1:
            return [task((D, spec, self)) for D in diagrams]
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(
            processes=min(self.jobs, len(diagrams)),
            initializer=_pool_init,
            initargs=(self.cache.snapshot(), self.max_degree),
        ) as pool:
            results = pool.map(
                task, [(D, spec, None) for D in diagrams], chunksize=1
            )
        return results


_pool_engine: Engine | None = None


def _pool_init(entries: dict[str, int], max_degree: int) -> None:
    global _pool_engine
    _pool_engine = Engine(cache=InvariantCache(entries), max_degree=max_degree)


def _resolve_engine(engine: Engine | None) -> Engine:
    return engine if engine is not None else _pool_engine


def _gw_diagram_task(args) -> int:
    diagram, spec, engine = args
    engine = _resolve_engine(engine)
    if not any(spec.counts[1:]):
        summer = _PointShapeSummer(diagram, spec.n, spec.counts[0])
        return summer.weighted_sum(engine._gw_or_zero)
    total = 0
    for marked in enumerate_markings(diagram, spec, nondegenerate_only=True):
        total += complex_multiplicity(marked, spec.n, engine._gw_or_zero)
    return total


def _w_diagram_task(args) -> int:
    diagram, spec, _ = args
    return _PointShapeSummer(diagram, spec.n, spec.counts[0]).weighted_sum(None)


# ---------------------------------------------------------------------------
# module-level convenience


_default_engine = Engine()


def gromov_witten(
    n: int, d: int, g: int, l: Sequence[int], engine: Engine | None = None
) -> int:
    return (engine or _default_engine).gromov_witten(n, d, g, l)


def welschinger(n: int, d: int, engine: Engine | None = None) -> int:
    return (engine or _default_engine).welschinger(n, d)

import pytest

from floorcount import (
    CacheIntegrityError,
    DimensionMismatch,
    Engine,
    InvariantCache,
    InvariantKey,
    UnsupportedDimension,
    UnsupportedGenus,
    build_constraints,
    cache_load,
    cache_store,
    complex_multiplicity,
    enumerate_floor_diagrams,
    enumerate_markings,
    gromov_witten,
    real_multiplicity,
    welschinger,
)


class TestGromovWitten:
    def test_plane_values(self, engine):
        assert engine.gromov_witten(2, 3, 0, (8,)) == 12
        assert engine.gromov_witten(2, 3, 1, (9,)) == 1
        assert engine.gromov_witten(2, 1, 0, (2,)) == 1

    def test_space_values(self, engine):
        assert engine.gromov_witten(3, 5, 0, (10, 0)) == 105
        assert engine.gromov_witten(3, 2, 0, (0, 8)) == 92

    def test_line_through_two_points_any_dimension(self, engine):
        assert engine.gromov_witten(4, 1, 0, (2, 0, 0)) == 1

    def test_lines_meeting_four_lines(self, engine):
        # the classical Schubert count in the Grassmannian of lines
        assert engine.gromov_witten(3, 1, 0, (0, 4)) == 2

    def test_dimension_mismatch_raises(self, engine):
        with pytest.raises(DimensionMismatch):
            engine.gromov_witten(2, 3, 0, (7,))

    def test_unsupported_genus_raises(self, engine):
        with pytest.raises(UnsupportedGenus):
            engine.gromov_witten(3, 2, 1, (1, 6))

    def test_module_level_helpers(self):
        assert gromov_witten(2, 2, 0, (5,)) == 1
        assert welschinger(2, 3) == 8


class TestWelschinger:
    def test_table(self, engine):
        assert [engine.welschinger(3, d) for d in range(1, 6)] == [1, 0, -1, 0, 45]

    def test_plane_value(self, engine):
        assert engine.welschinger(2, 3) == 8

    def test_unsupported_dimension(self, engine):
        with pytest.raises(UnsupportedDimension):
            engine.welschinger(4, 2)
        with pytest.raises(UnsupportedDimension):
            engine.welschinger(1, 2)

    def test_bad_degree(self, engine):
        with pytest.raises(ValueError):
            engine.welschinger(3, 0)

    def test_matches_per_marking_real_multiplicities(self, engine):
        # the engine aggregates per diagram; summing the real multiplicity
        # marking by marking must give the same signed total
        for n, d in ((2, 3), (3, 3)):
            l0 = ((n + 1) * d + n - 3) // (n - 1)
            spec = build_constraints(n, d, 0, (l0,) + (0,) * (n - 2))
            total = 0
            for diagram in enumerate_floor_diagrams(d, 0):
                for marked in enumerate_markings(diagram, spec, True):
                    total += real_multiplicity(marked, n, engine._w_value)
            exponent = n * (d - 1) * (d - 2) // 2
            signed = -total if exponent % 2 else total
            assert signed == engine.welschinger(n, d)


class TestDualRoute:
    def test_engine_matches_explicit_marking_sums(self, engine):
        # the shape-counting fast path must agree with summing the complex
        # multiplicity over explicitly enumerated marking classes
        cases = [
            (2, 3, 0, (8,)),
            (2, 3, 1, (9,)),
            (2, 4, 2, (13,)),
            (3, 3, 0, (6, 0)),
            (3, 4, 0, (8, 0)),
        ]
        for n, d, g, l in cases:
            spec = build_constraints(n, d, g, l)
            total = 0
            for diagram in enumerate_floor_diagrams(d, g):
                for marked in enumerate_markings(diagram, spec, True):
                    total += complex_multiplicity(marked, n, engine._gw_or_zero)
            assert total == engine.gromov_witten(n, d, g, l)

    def test_degree_three_cross_check(self, engine):
        # ties the enumerator to the plane count: marked classes times
        # multiplicities over all degree-3 genus-0 diagrams give 12
        spec = build_constraints(2, 3, 0, (8,))
        total = 0
        for diagram in enumerate_floor_diagrams(3, 0):
            for marked in enumerate_markings(diagram, spec, True):
                total += complex_multiplicity(marked, 2, engine._gw_or_zero)
        assert total == 12


class TestRecursionStructure:
    def test_only_one_dimension_down(self):
        calls = []

        class Spy(Engine):
            def _gw_or_zero(self, n, d, g, l):
                calls.append(n)
                return super()._gw_or_zero(n, d, g, l)

        Spy().gromov_witten(3, 3, 0, (6, 0))
        assert max(calls) == 2  # a 3-space count asks only about the plane
        assert set(calls) <= {1, 2}

        calls.clear()
        Spy().gromov_witten(2, 3, 0, (8,))
        assert set(calls) == {1}


class TestParallelism:
    def test_results_independent_of_worker_count(self):
        serial = Engine(jobs=1)
        parallel = Engine(jobs=3)
        queries = [
            ("gw", (3, 4, 0, (8, 0))),
            ("gw", (2, 4, 1, (12,))),
            ("w", (3, 5)),
        ]
        for kind, args in queries:
            if kind == "gw":
                assert serial.gromov_witten(*args) == parallel.gromov_witten(*args)
            else:
                assert serial.welschinger(*args) == parallel.welschinger(*args)


class TestInvariantKey:
    @pytest.mark.parametrize(
        "key",
        [
            InvariantKey.gw(3, 5, 0, (10, 0)),
            InvariantKey.gw(1, 1, 0, ()),
            InvariantKey.welschinger(3, 7),
        ],
    )
    def test_round_trip(self, key):
        assert InvariantKey.parse(key.serialize()) == key

    def test_rejects_garbage(self):
        with pytest.raises(CacheIntegrityError):
            InvariantKey.parse("GW:not:a:key")
        with pytest.raises(CacheIntegrityError):
            InvariantKey.parse("N:2:3")


class TestCache:
    def test_empty_round_trip(self, tmp_path):
        cache = InvariantCache()
        path = tmp_path / "empty.cache"
        cache_store(cache, path)
        assert cache_load(path) == cache

    def test_value_round_trip_is_bit_exact(self, tmp_path):
        cache = InvariantCache()
        cache.put(InvariantKey.gw(3, 5, 0, (10, 0)), 105)
        cache.put(InvariantKey.welschinger(3, 7), -14589)
        path = tmp_path / "values.cache"
        cache_store(cache, path)
        loaded = cache_load(path)
        assert loaded == cache
        twice = tmp_path / "again.cache"
        cache_store(loaded, twice)
        assert path.read_bytes() == twice.read_bytes()

    def test_truncated_file_rejected(self, tmp_path):
        cache = InvariantCache()
        cache.put(InvariantKey.gw(2, 3, 0, (8,)), 12)
        path = tmp_path / "cut.cache"
        cache_store(cache, path)
        path.write_bytes(path.read_bytes()[:-10])
        with pytest.raises(CacheIntegrityError):
            cache_load(path)

    def test_tampered_value_rejected(self, tmp_path):
        cache = InvariantCache()
        cache.put(InvariantKey.gw(2, 3, 0, (8,)), 12)
        path = tmp_path / "tampered.cache"
        cache_store(cache, path)
        text = path.read_text().replace(" 12", " 13")
        path.write_text(text)
        with pytest.raises(CacheIntegrityError):
            cache_load(path)

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "noheader.cache"
        path.write_text("GW:2:3:0:8 12\n")
        with pytest.raises(CacheIntegrityError):
            cache_load(path)

    def test_idempotent_writes(self):
        cache = InvariantCache()
        key = InvariantKey.welschinger(3, 5)
        cache.put(key, 45)
        cache.put(key, 45)
        assert cache.get(key) == 45
        with pytest.raises(CacheIntegrityError):
            cache.put(key, 46)

    def test_memoization_transparency(self, tmp_path):
        queries = [
            (3, 3, 0, (6, 0)),
            (3, 4, 0, (8, 0)),
            (2, 4, 0, (11,)),
        ]
        cold = Engine()
        cold_values = [cold.gromov_witten(*q) for q in queries]
        warm_values = [cold.gromov_witten(*q) for q in queries]
        path = tmp_path / "memo.cache"
        cache_store(cold.cache, path)
        reloaded = Engine(cache=cache_load(path))
        reloaded_values = [reloaded.gromov_witten(*q) for q in queries]
        assert cold_values == warm_values == reloaded_values
        # the reloaded engine answered from the cache: keys are present
        for q in queries:
            assert reloaded.cache.get(InvariantKey.gw(*q)) is not None

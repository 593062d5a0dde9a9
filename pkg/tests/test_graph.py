"""Graph construction, metric helpers, and the distance-3 witness search."""

import numpy as np
import pytest

from snnss import (
    ConditionIIWitness,
    EdgeListParseError,
    Graph,
    GraphError,
    RegularityError,
    build_cycle,
    build_named,
    build_torus,
    check_triangle_free,
    distance_shell,
    distances_from,
    find_condition_ii,
    load_edge_list,
)


def bfs_distances(g, source):
    """Reference BFS, independent of distances_from."""
    dist = {source: 0}
    frontier = [source]
    while frontier:
        nxt = []
        for v in frontier:
            for u in g.neighbors[v]:
                u = int(u)
                if u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    return dist


class TestConstruction:
    def test_cycle_basic(self, cycle8):
        assert cycle8.n == 8
        assert cycle8.s == 2
        assert sorted(int(u) for u in cycle8.neighbors[0]) == [1, 7]
        assert sorted(int(u) for u in cycle8.neighbors[3]) == [2, 4]

    def test_cycle_minimum_size(self):
        g = build_cycle(3)
        assert g.n == 3 and g.s == 2
        with pytest.raises(GraphError):
            build_cycle(2)

    def test_torus_shape(self, torus44):
        assert torus44.n == 16
        assert torus44.s == 4

    def test_torus_one_dimensional_is_cycle(self):
        assert build_torus([6]) == build_cycle(6)

    def test_torus_rejects_small_sides(self):
        with pytest.raises(GraphError):
            build_torus([2, 4])
        with pytest.raises(GraphError):
            build_torus([])

    def test_named_graphs(self, heawood, petersen, cube):
        assert (heawood.n, heawood.s) == (14, 3)
        assert (petersen.n, petersen.s) == (10, 3)
        assert (cube.n, cube.s) == (8, 3)
        with pytest.raises(GraphError):
            build_named("kagome")

    def test_heawood_is_triangle_and_square_free(self, heawood):
        assert check_triangle_free(heawood)
        # girth 6: no vertex at distance 3 closes a 4- or 5-cycle, every
        # distance-2 shell has the full s(s-1) = 6 vertices
        for x in range(heawood.n):
            assert len(distance_shell(heawood, x, 2)) == 6

    def test_petersen_diameter_two(self, petersen):
        for x in range(petersen.n):
            assert distances_from(petersen, x).max() == 2
        assert distance_shell(petersen, 0, 3) == frozenset()

    def test_cube_antipodal(self, cube):
        d = distances_from(cube, 0)
        assert d.max() == 3
        assert distance_shell(cube, 0, 3) == frozenset({7})

    def test_self_loop_rejected(self):
        with pytest.raises(GraphError):
            Graph([(0, 0), (0, 1), (1, 2), (2, 0)])

    def test_duplicate_edge_rejected(self):
        with pytest.raises(GraphError):
            Graph([(0, 1), (1, 0), (1, 2), (2, 0)])

    def test_disconnected_rejected(self):
        two_triangles = [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
        with pytest.raises(GraphError):
            Graph(two_triangles)

    def test_irregular_rejected(self):
        with pytest.raises(RegularityError) as exc:
            Graph([(0, 1), (1, 2)])
        assert exc.value.vertex in (0, 1, 2)

    def test_negative_vertex_rejected(self):
        with pytest.raises(GraphError):
            Graph([(-1, 0), (0, 1), (1, -1)])

    def test_equality_and_hash(self):
        a = build_cycle(5)
        b = Graph([(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])
        assert a == b
        assert hash(a) == hash(b)
        assert a != build_cycle(6)


class TestEdgeList:
    def test_cycle_from_text(self, cycle8):
        lines = ["# an 8-cycle"]
        lines += [f"{i} {(i + 1) % 8}" for i in range(8)]
        assert load_edge_list("\n".join(lines) + "\n") == cycle8

    def test_triangle_from_text(self):
        g = load_edge_list("0 1\n1 2\n2 0\n")
        assert (g.n, g.s) == (3, 2)

    def test_malformed_line_reports_number(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list("0 1\n1 2 3\n")
        assert exc.value.line == 2

    def test_non_integer_token(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list("0 x\n")
        assert exc.value.line == 1

    def test_empty_text(self):
        with pytest.raises(EdgeListParseError) as exc:
            load_edge_list("# nothing here\n")
        assert exc.value.line == 0


class TestMetric:
    def test_cycle8_distances(self, cycle8):
        assert distances_from(cycle8, 0).tolist() == [0, 1, 2, 3, 4, 3, 2, 1]

    def test_cycle8_shells(self, cycle8):
        assert distance_shell(cycle8, 0, 0) == frozenset({0})
        assert distance_shell(cycle8, 0, 3) == frozenset({3, 5})

    def test_negative_radius_rejected(self, cycle8):
        with pytest.raises(GraphError):
            distance_shell(cycle8, 0, -1)

    def test_invalid_source_rejected(self, cycle8):
        with pytest.raises(GraphError):
            distances_from(cycle8, 8)

    @pytest.mark.parametrize("name", ["cycle8", "heawood", "petersen", "cube", "torus44"])
    def test_shells_partition_vertices(self, name, request):
        g = request.getfixturevalue(name)
        for x in range(g.n):
            seen = set()
            r = 0
            while True:
                shell = distance_shell(g, x, r)
                if not shell and r > 0:
                    break
                assert not (shell & seen)
                seen |= shell
                r += 1
            assert seen == set(range(g.n))

    @pytest.mark.parametrize("name", ["cycle8", "heawood", "petersen", "cube", "torus44"])
    def test_distances_match_reference_bfs(self, name, request):
        g = request.getfixturevalue(name)
        for x in range(g.n):
            ref = bfs_distances(g, x)
            got = distances_from(g, x)
            assert all(got[v] == ref[v] for v in range(g.n))


class TestStructure:
    @pytest.mark.parametrize("name", ["cycle8", "heawood", "petersen", "cube", "torus44"])
    def test_adjacency_matrix(self, name, request):
        g = request.getfixturevalue(name)
        a = g.adjacency_matrix()
        assert (a == a.T).all()
        assert (a.sum(axis=1) == g.s).all()
        assert np.trace(a) == 0

    def test_edge_count(self, heawood):
        assert len(heawood.edges()) == heawood.n * heawood.s // 2

    def test_triangle_detection(self):
        assert not check_triangle_free(build_cycle(3))
        assert check_triangle_free(build_cycle(4))


def validate_witness(g, w):
    """Re-check a witness with the reference BFS only."""
    dy = bfs_distances(g, w.y)
    dz = bfs_distances(g, w.z)
    assert dy[w.z] == 3
    e12 = {int(u) for u in g.neighbors[w.y] if dz[int(u)] == 2}
    e21 = {int(u) for u in g.neighbors[w.z] if dy[int(u)] == 2}
    assert e12 == {w.u1}
    assert e21 == {w.u2}
    assert g.adjacent(w.u1, w.u2)


class TestConditionII:
    def test_cycle7_witness(self):
        w = find_condition_ii(build_cycle(7))
        assert w == ConditionIIWitness(y=0, z=3, u1=1, u2=2)
        validate_witness(build_cycle(7), w)

    def test_torus_7x4_witness(self):
        g = build_torus([7, 4])
        w = find_condition_ii(g)
        assert (w.y, w.z, w.u1, w.u2) == (0, 3, 1, 2)
        validate_witness(g, w)

    def test_large_cycles_have_witness(self):
        for n in (7, 8, 9, 12, 20):
            g = build_cycle(n)
            w = find_condition_ii(g)
            assert w is not None
            validate_witness(g, w)

    @pytest.mark.parametrize("name", ["petersen", "heawood", "cube"])
    def test_witnessless_graphs(self, name, request):
        g = request.getfixturevalue(name)
        assert find_condition_ii(g) is None

    def test_small_cycles_have_no_distance_3_pair(self):
        # C_4, C_5, C_6: diameter < 3 or shells too large
        assert find_condition_ii(build_cycle(4)) is None
        assert find_condition_ii(build_cycle(5)) is None

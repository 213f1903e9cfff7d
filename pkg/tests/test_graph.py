import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import small_graphs
from crsf.graph import (CycleCapExceeded, CycleClass, GraphError, LatticeView, Multigraph,
                        OrientedCycle, box_graph, c4_chord, complete_graph, cycle_graph,
                        enumerate_cycle_classes, find_cycle, grid_graph, lattice_edge, linf,
                        spiral, theta_graph)


def test_self_loop_counts_two_half_edges():
    g = Multigraph([0, 1], [("a", 0, 1), ("l", 0, 0)])
    assert g.degree(0) == 3
    assert g.degree(1) == 1
    assert sorted(map(repr, g.half_edges(0))) == sorted(
        map(repr, [(1, "a"), (0, "l"), (0, "l")]))


def test_rejects_bad_input():
    with pytest.raises(GraphError, match="duplicate vertex"):
        Multigraph([0, 0], [])
    with pytest.raises(GraphError, match="duplicate edge"):
        Multigraph([0, 1], [(0, 0, 1), (0, 0, 1)])
    with pytest.raises(GraphError, match="unknown vertex"):
        Multigraph([0], [(0, 0, 5)])
    with pytest.raises(GraphError, match="not connected"):
        Multigraph([0, 1], [])


@given(small_graphs())
def test_csr_is_consistent(g):
    assert g.adj_start[-1] == 2 * g.m
    assert sum(g.degree(v) for v in g.vertices) == 2 * g.m
    for v in g.vertices:
        for w, e in g.half_edges(v):
            assert {v, w} == set(g.endpoints(e))


def test_cycle_canonical_rotation():
    a = OrientedCycle.make([2, 0, 1], ["x", "y", "z"])
    assert a.vertices == (0, 1, 2)
    assert a.edges == ("y", "z", "x")
    b = OrientedCycle.make([1, 2, 0], ["z", "x", "y"])
    assert a == b


def test_cycle_reverse_is_an_involution():
    c = OrientedCycle.make([0, 1, 2, 3], ["a", "b", "c", "d"])
    r = c.reverse()
    assert r.vertices == (0, 3, 2, 1)
    assert r.edges == ("d", "c", "b", "a")
    assert r.reverse() == c


def test_cycle_rejects_backtrack_and_repeats():
    with pytest.raises(GraphError):
        OrientedCycle.make([0, 1], ["a", "a"])
    with pytest.raises(GraphError):
        OrientedCycle.make([0, 1, 0], ["a", "b", "c"])
    # two parallel edges form a genuine 2-cycle
    OrientedCycle.make([0, 1], ["a", "b"])


def test_cycle_class_pairs_orientations():
    c = OrientedCycle.make([0, 1, 2], ["a", "b", "c"])
    k1, k2 = CycleClass(c), CycleClass(c.reverse())
    assert k1 == k2
    assert {k1.rep, k1.partner} == {c, c.reverse()}
    loop = CycleClass(OrientedCycle.make([5], ["l"]))
    assert loop.rep == loop.partner


def test_check_in():
    g = cycle_graph(3)
    OrientedCycle.make([0, 1, 2], [0, 1, 2]).check_in(g)
    with pytest.raises(GraphError):
        OrientedCycle.make([0, 2, 1], [0, 1, 2]).check_in(g)


@pytest.mark.parametrize("g,expected", [
    (theta_graph(), 3),
    (c4_chord(), 3),
    (cycle_graph(5), 1),
    (grid_graph(2, 3), 3),
    (complete_graph(4), 7),
])
def test_cycle_class_counts(g, expected):
    assert len(enumerate_cycle_classes(g, g.n)) == expected


def test_cycle_classes_with_loops():
    g = grid_graph(2, 2, self_loops=True)
    cl = enumerate_cycle_classes(g, 4)
    assert sum(1 for c in cl if len(c.rep) == 1) == 4
    assert sum(1 for c in cl if len(c.rep) == 4) == 1
    with pytest.raises(CycleCapExceeded):
        enumerate_cycle_classes(complete_graph(6), 6, cap=5)


@given(small_graphs())
def test_classes_are_distinct_simple_cycles(g):
    cl = enumerate_cycle_classes(g, g.n)
    assert len({c.rep for c in cl}) == len(cl)
    for c in cl:
        c.rep.check_in(g)
        assert c.partner == c.rep.reverse()


def test_find_cycle():
    g = c4_chord()
    c = find_cycle(g, [0, 1, 4, 3])
    assert set(c.edges) == {0, 1, 4}
    assert find_cycle(g, [0, 1, 2]) is None
    g2 = Multigraph([0, 1], [("a", 0, 1), ("l", 1, 1)])
    assert find_cycle(g2, ["a", "l"]).edges == ("l",)


def test_grid_and_box_shapes():
    g = grid_graph(3, 4)
    assert (g.n, g.m) == (12, 17)
    assert g.coords[5] == (1, 1)
    assert g.is_lattice_embedded()
    b = box_graph((-1, -1), (1, 1), self_loops=True)
    assert (b.n, b.m) == (9, 12 + 9)
    assert b.degree((0, 0)) == 6


def test_lattice_view():
    lat = LatticeView(self_loops=True)
    assert lat.degree((3, 4)) == 6
    assert len(list(lat.half_edges((0, 0)))) == 6
    assert lattice_edge((1, 0), (0, 0)) == ("e", (0, 0), (1, 0))
    assert linf((3, -5)) == 5
    with pytest.raises(GraphError):
        LatticeView("hex")


@given(st.integers(0, 4))
def test_spiral_rings(r):
    pts = []
    it = spiral((2, -1))
    for _ in range((2 * r + 1) ** 2):
        pts.append(next(it))
    assert len(set(pts)) == len(pts)
    assert max(linf(p, (2, -1)) for p in pts) == r

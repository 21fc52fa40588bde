import numpy as np
import pytest

from contperc.components import (
    UnionFind,
    components_from_edges,
    connected_components,
    largest_component_fraction,
    winding_components,
)
from contperc.geometry import TorusBox
from contperc.rgg import Graph, PointSet, build_graph, sample_binomial_points, sample_poisson_points
from oracles import bfs_partition, bfs_winding_axes


def _graph(n, edges):
    return Graph.from_edges(n, edges, 1.0, TorusBox(2, 10.0))


def test_path_is_one_component():
    lab = connected_components(_graph(5, [(0, 1), (1, 2), (2, 3), (3, 4)]))
    assert lab.sizes == {0: 5} and lab.largest_size == 5


def test_two_far_pairs():
    pts = PointSet(TorusBox(2, 10.0), np.array([[1.0, 1.0], [1.5, 1.0], [6.0, 6.0], [6.0, 6.5]]))
    lab = connected_components(build_graph(pts, 1.0))
    assert sorted(lab.sizes.values()) == [2, 2]
    assert lab.label.tolist() == [0, 0, 1, 1]


def test_fractions():
    n = 6
    full = [(i, j) for i in range(n) for j in range(i + 1, n)]
    assert largest_component_fraction(connected_components(_graph(n, full)), n) == 1.0
    assert largest_component_fraction(connected_components(_graph(n, [])), n) == pytest.approx(1 / n)
    with pytest.raises(ValueError):
        largest_component_fraction(connected_components(_graph(0, [])), 0)


def test_union_find_matches_bfs(rng):
    for _ in range(100):
        n = int(rng.integers(1, 501))
        g = build_graph(sample_binomial_points(n, TorusBox(2, float(rng.uniform(8, 30))), rng), 1.0)
        lab = connected_components(g)
        assert lab.partition() == bfs_partition(n, g.edges.tolist())
        assert sum(lab.sizes.values()) == n
        assert lab.largest_size == max(lab.sizes.values())


def test_edge_order_independence(rng):
    for _ in range(30):
        n = 80
        edges = rng.integers(0, n, size=(60, 2))
        edges = edges[edges[:, 0] != edges[:, 1]]
        a = components_from_edges(n, edges.tolist()).partition()
        b = components_from_edges(n, rng.permutation(edges)[:, ::-1].tolist()).partition()
        assert a == b


def test_monotone_under_edge_addition(rng):
    n = 200
    uf = UnionFind(n)
    last = uf.count
    for i, j in rng.integers(0, n, size=(600, 2)).tolist():
        uf.union(i, j)
        assert uf.count <= last
        last = uf.count
    assert components_from_edges(n, []).component_count == n


def test_deep_supercritical_giant(rng):
    box = TorusBox(2, 32.0)
    big = 0
    for _ in range(100):
        g = build_graph(sample_poisson_points(3.0, box, rng), 1.0)
        big += largest_component_fraction(connected_components(g), g.node_count) > 0.9
    assert big >= 95


def test_ring_around_torus_winds():
    side = 10.0
    ring = np.array([[x, 5.0] for x in np.arange(0.0, 10.0, 0.8)])
    rep = winding_components(build_graph(PointSet(TorusBox(2, side), ring), 1.0))
    assert rep.axes == (True, False) and rep.wraps
    # dropping one node breaks the cycle
    rep = winding_components(build_graph(PointSet(TorusBox(2, side), ring[1:]), 1.0))
    assert not rep.wraps and rep.labeling.component_count == 1


def test_contractible_cycle_does_not_wind():
    tri = np.array([[0.1, 0.1], [9.8, 0.3], [0.2, 9.7]])
    rep = winding_components(build_graph(PointSet(TorusBox(2, 10.0), tri), 1.0))
    assert rep.labeling.component_count == 1 and not rep.wraps


def test_winding_matches_unfolding_oracle(rng):
    for _ in range(100):
        d = int(rng.integers(2, 4))
        side = float(rng.uniform(4.0, 8.0))
        lam = float(rng.uniform(0.3, 2.5)) if d == 2 else float(rng.uniform(0.3, 1.2))
        pts = sample_poisson_points(lam, TorusBox(d, side), rng)
        g = build_graph(pts, 1.0)
        rep = winding_components(g)
        assert rep.axes == bfs_winding_axes(pts.points, side, g.edges.tolist())
        assert rep.labeling.partition() == connected_components(g).partition()

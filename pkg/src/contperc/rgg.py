"""Poisson point processes on the torus and fixed-radius geometric graphs."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import TextIO

import numpy as np
from scipy import stats

from contperc.geometry import TorusBox, minimum_image, unit_ball_volume


@dataclass(frozen=True)
class PointSet:
    box: TorusBox
    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float).reshape(-1, self.box.dimension)
        if pts.size and not (np.all(pts >= 0) and np.all(pts < self.box.side)):
            raise ValueError("all points must lie in [0, L)^d")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return self.points.shape[0]

    def with_point(self, x) -> "PointSet":
        """Return a copy with ``x`` appended as the last node."""
        x = self.box.wrap(np.asarray(x, dtype=float).reshape(1, -1))
        return PointSet(self.box, np.vstack([self.points, x]))


def sample_poisson_points(density: float, box: TorusBox, rng: np.random.Generator) -> PointSet:
    """Homogeneous Poisson process of intensity ``density`` on ``box``.

    A Poisson(density * L^d) count followed by i.i.d. uniform placement.
    """
    if not density >= 0:
        raise ValueError(f"density must be non-negative, got {density!r}")
    n = rng.poisson(density * box.volume)
    return PointSet(box, rng.random((n, box.dimension)) * box.side)


def sample_binomial_points(n: int, box: TorusBox, rng: np.random.Generator) -> PointSet:
    """Exactly ``n`` i.i.d. uniform points on ``box``."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return PointSet(box, rng.random((n, box.dimension)) * box.side)


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected graph in CSR form.

    ``indices[indptr[i]:indptr[i + 1]]`` are the sorted neighbours of node ``i``.
    """

    node_count: int
    indptr: np.ndarray
    indices: np.ndarray
    radius: float
    box: TorusBox
    positions: np.ndarray | None = None
    _edges: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        for name in ("indptr", "indices", "positions", "_edges"):
            arr = getattr(self, name)
            if arr is not None:
                arr.setflags(write=False)

    @classmethod
    def from_edges(cls, n: int, edges, radius: float, box: TorusBox, positions=None) -> "Graph":
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size:
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            lo = np.minimum(edges[:, 0], edges[:, 1])
            hi = np.maximum(edges[:, 0], edges[:, 1])
            key = np.unique(lo * n + hi)
            lo, hi = key // n, key % n
        else:
            lo = hi = np.empty(0, dtype=np.int64)
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(
            node_count=n,
            indptr=indptr,
            indices=cols.astype(np.int64),
            radius=float(radius),
            box=box,
            positions=None if positions is None else np.asarray(positions, dtype=float),
            _edges=np.column_stack([lo, hi]).astype(np.int64),
        )

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    @property
    def adjacency(self) -> list[list[int]]:
        return [self.neighbors(i).tolist() for i in range(self.node_count)]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def edges(self) -> np.ndarray:
        """Edge array of shape ``(m, 2)`` with ``i < j``, lexicographically sorted."""
        return self._edges

    @property
    def edge_count(self) -> int:
        return int(self._edges.shape[0])


def _ragged_arange(starts: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Concatenation of ``arange(s, s + c)`` for each pair."""
    total = int(counts.sum())
    if total == 0:
        return np.empty(0, dtype=np.int64)
    ends = np.cumsum(counts)
    out = np.ones(total, dtype=np.int64)
    nz = counts > 0
    first = ends[nz] - counts[nz]
    out[first] = starts[nz]
    out[first[1:]] -= starts[nz][:-1] + counts[nz][:-1] - 1
    return np.cumsum(out)


def build_graph(points: PointSet, radius: float) -> Graph:
    """Geometric graph joining pairs at torus distance ``<= radius``.

    Uses a cell list of ``m = floor(L / radius)`` cells per axis, so every
    cell side is at least ``radius`` and only the 3^d surrounding cells need
    scanning.
    """
    box = points.box
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius!r}")
    if radius > box.side / 2:
        raise ValueError(f"radius {radius} exceeds L/2 = {box.side / 2}; torus adjacency is ambiguous")

    x = points.points
    n, d = x.shape
    if n < 2:
        return Graph.from_edges(n, [], radius, box, positions=x)

    m = int(math.floor(box.side / radius))
    cell_side = box.side / m
    cell = np.minimum((x / cell_side).astype(np.int64), m - 1)
    cell_id = np.ravel_multi_index(cell.T, (m,) * d)

    order = np.argsort(cell_id, kind="stable")
    counts = np.bincount(cell_id, minlength=m**d)
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])

    # with m < 3 several offsets land on the same cell; scan each cell once
    offsets = {tuple(o % m for o in off) for off in itertools.product((-1, 0, 1), repeat=d)}

    r2 = radius * radius
    found_i, found_j = [], []
    for off in sorted(offsets):
        nb_cell = np.ravel_multi_index(((cell + np.array(off)) % m).T, (m,) * d)
        c = counts[nb_cell]
        ii = np.repeat(np.arange(n), c)
        jj = order[_ragged_arange(starts[nb_cell], c)]
        keep = ii < jj
        ii, jj = ii[keep], jj[keep]
        delta = minimum_image(x[ii] - x[jj], box.side)
        close = np.einsum("ij,ij->i", delta, delta) <= r2
        found_i.append(ii[close])
        found_j.append(jj[close])

    edges = np.column_stack([np.concatenate(found_i), np.concatenate(found_j)])
    return Graph.from_edges(n, edges, radius, box, positions=x)


def expected_link_probability(n: int, density: float, radius: float, d: int) -> float:
    """Probability that two of ``n`` uniform nodes are linked, ``density * V_d * r^d / n``."""
    if n < 2 or not density > 0 or not radius > 0:
        raise ValueError("need n >= 2, density > 0 and radius > 0")
    return density * unit_ball_volume(d) * radius**d / n


def finite_mean_degree(n: int, density: float, radius: float, d: int) -> float:
    """Mean degree ``(n - 1) * P_link`` of the n-node binomial graph."""
    return (n - 1) * expected_link_probability(n, density, radius, d)


@dataclass(frozen=True)
class DegreeSummary:
    mean_degree: float
    empirical_pmf: dict[int, float]
    tv_distance_to_poisson: float


def degree_summary(graph: Graph, density: float) -> DegreeSummary:
    if graph.node_count == 0:
        raise ValueError("degree summary of an empty graph")
    deg = graph.degrees
    counts = np.bincount(deg)
    pmf = counts / deg.size
    mu = density * unit_ball_volume(graph.box.dimension) * graph.radius**graph.box.dimension
    poisson = stats.poisson.pmf(np.arange(pmf.size), mu)
    # the Poisson mass beyond the largest observed degree counts fully
    tail = stats.poisson.sf(pmf.size - 1, mu)
    tv = 0.5 * (np.abs(pmf - poisson).sum() + tail)
    return DegreeSummary(
        mean_degree=float(deg.mean()),
        empirical_pmf={k: float(p) for k, p in enumerate(pmf) if counts[k]},
        tv_distance_to_poisson=float(tv),
    )


def write_edge_list(graph: Graph, fh: TextIO) -> None:
    """Write ``n d L r`` then one ``i j`` line per edge."""
    fh.write(f"{graph.node_count} {graph.box.dimension} {graph.box.side!r} {graph.radius!r}\n")
    for i, j in graph.edges.tolist():
        fh.write(f"{i} {j}\n")


def read_edge_list(fh: TextIO) -> Graph:
    header = fh.readline().split()
    if len(header) != 4:
        raise ValueError("edge list header must be 'n d L r'")
    n, d = int(header[0]), int(header[1])
    side, radius = float(header[2]), float(header[3])
    edges = [tuple(map(int, line.split())) for line in fh if line.strip()]
    return Graph.from_edges(n, edges, radius, TorusBox(d, side))

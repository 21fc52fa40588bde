"""Connected components by union-find, plus torus-winding detection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from contperc.rgg import Graph

# Integer image shifts are packed as sum(s_k * _BASE**k); the packing is
# linear, so shift vectors add and subtract as plain ints.
_BASE = 1 << 32


class UnionFind:
    """Disjoint sets with path halving and union by size."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n
        self.count = n

    def find(self, i: int) -> int:
        parent = self.parent
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        self.count -= 1
        return True


class WindingUnionFind:
    """Union-find that tracks each node's lattice image relative to its root.

    Joining two nodes already in one set with inconsistent images closes a
    loop that winds around the torus; the packed loop vector is recorded.
    """

    def __init__(self, n: int, d: int):
        self.d = d
        self.parent = list(range(n))
        self.size = [1] * n
        self.offset = [0] * n  # packed image of node relative to parent
        self.windings: list[int] = []

    def find(self, i: int) -> tuple[int, int]:
        parent, offset = self.parent, self.offset
        path = []
        while parent[i] != i:
            path.append(i)
            i = parent[i]
        root = i
        # full compression, accumulating offsets from the top of the path
        acc = 0
        for node in reversed(path):
            acc += offset[node]
            offset[node] = acc
            parent[node] = root
        return root, (offset[path[0]] if path else 0)

    def union(self, i: int, j: int, shift: int) -> None:
        """Join ``i`` and ``j`` where image(j) = image(i) + ``shift``."""
        ri, oi = self.find(i)
        rj, oj = self.find(j)
        if ri == rj:
            loop = oi + shift - oj
            if loop:
                self.windings.append(loop)
            return
        if self.size[ri] < self.size[rj]:
            ri, rj, oi, oj, shift = rj, ri, oj, oi, -shift
        # image(rj) relative to ri
        self.parent[rj] = ri
        self.offset[rj] = oi + shift - oj
        self.size[ri] += self.size[rj]

    def unpack(self, packed: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.d):
            digit = packed % _BASE
            if digit >= _BASE // 2:
                digit -= _BASE
            out.append(digit)
            packed = (packed - digit) // _BASE
        return tuple(out)


@dataclass(frozen=True)
class ComponentLabeling:
    label: np.ndarray
    sizes: dict[int, int]
    largest_size: int

    @property
    def component_count(self) -> int:
        return len(self.sizes)

    def partition(self) -> frozenset[frozenset[int]]:
        groups: dict[int, set[int]] = {}
        for node, lab in enumerate(self.label.tolist()):
            groups.setdefault(lab, set()).add(node)
        return frozenset(frozenset(g) for g in groups.values())

    def component_of(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.label == self.label[node])


def _labeling(uf: UnionFind | WindingUnionFind, n: int) -> ComponentLabeling:
    roots = [uf.find(i) for i in range(n)]
    if isinstance(uf, WindingUnionFind):
        roots = [r for r, _ in roots]
    # relabel roots 0, 1, ... in order of first appearance
    _, first, inverse = np.unique(np.asarray(roots, dtype=np.int64), return_index=True, return_inverse=True)
    rank = np.empty(first.size, dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(first.size)
    label = rank[inverse] if n else np.empty(0, dtype=np.int64)
    counts = np.bincount(label, minlength=first.size) if n else np.empty(0, dtype=np.int64)
    sizes = {k: int(c) for k, c in enumerate(counts)}
    return ComponentLabeling(label=label, sizes=sizes, largest_size=int(counts.max()) if n else 0)


def components_from_edges(n: int, edges) -> ComponentLabeling:
    uf = UnionFind(n)
    for i, j in edges:
        uf.union(int(i), int(j))
    return _labeling(uf, n)


def connected_components(graph: Graph) -> ComponentLabeling:
    return components_from_edges(graph.node_count, graph.edges.tolist())


def largest_component_fraction(labeling: ComponentLabeling, n: int) -> float:
    if n < 1:
        raise ValueError("n must be at least 1")
    return labeling.largest_size / n


def edge_image_shifts(graph: Graph) -> np.ndarray:
    """Integer shift ``s`` per edge with ``x_j - x_i - s*L`` the minimum image."""
    if graph.positions is None:
        raise ValueError("graph carries no node positions")
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    delta = graph.positions[j] - graph.positions[i]
    return np.rint(delta / graph.box.side).astype(np.int64)


@dataclass(frozen=True)
class WindingReport:
    labeling: ComponentLabeling
    axes: tuple[bool, ...]  # per axis: some cycle winds along it

    @property
    def wraps(self) -> bool:
        return any(self.axes)


def winding_components(graph: Graph) -> WindingReport:
    """Components together with the torus axes wound by some cycle."""
    d = graph.box.dimension
    uf = WindingUnionFind(graph.node_count, d)
    if graph.edge_count:
        shifts = edge_image_shifts(graph)
        # image(j) = image(i) - s when walking the minimum-image edge i -> j
        weights = np.array([_BASE**k for k in range(d)], dtype=object)
        packed = (-shifts.astype(object) @ weights).tolist()
        for (i, j), s in zip(graph.edges.tolist(), packed):
            uf.union(i, j, s)
    axes = [False] * d
    for w in uf.windings:
        for k, s in enumerate(uf.unpack(w)):
            if s:
                axes[k] = True
    return WindingReport(labeling=_labeling(uf, graph.node_count), axes=tuple(axes))

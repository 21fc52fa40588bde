"""Active-saturated exploration of a component and its companion tools.

The process starts with a single active node.  Each step moves one active
node ``u`` to the saturated set and activates every neighbour of ``u`` that
is neither active nor saturated; ``Y`` is the number so activated.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np

from contperc.rgg import Graph

Selection = Literal["fifo", "random"]

UNREACHABLE = math.inf


@dataclass(frozen=True)
class Step:
    node: int
    y: int
    active_size: int
    saturated_size: int


@dataclass
class ExplorationTrace:
    start_node: int
    steps: list[Step] = field(default_factory=list)
    terminated: bool = False

    @property
    def explored(self) -> list[int]:
        """Saturated nodes in the order they were saturated."""
        return [s.node for s in self.steps]

    @property
    def y_values(self) -> list[int]:
        return [s.y for s in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


def active_saturated_run(
    graph: Graph,
    start: int,
    selection: Selection = "fifo",
    rng: np.random.Generator | None = None,
) -> ExplorationTrace:
    """Run the exploration from ``start`` until no active node remains.

    ``selection="fifo"`` always saturates the oldest active node (BFS order);
    ``"random"`` picks uniformly among active nodes using ``rng``.
    """
    if not 0 <= start < graph.node_count:
        raise IndexError(f"start node {start} out of range for {graph.node_count} nodes")
    if selection == "random" and rng is None:
        raise ValueError("random selection needs an rng")
    if selection not in ("fifo", "random"):
        raise ValueError(f"unknown selection policy {selection!r}")

    seen = np.zeros(graph.node_count, dtype=bool)
    seen[start] = True
    trace = ExplorationTrace(start_node=start)
    indptr, indices = graph.indptr, graph.indices

    if selection == "fifo":
        active = deque([start])
        pop = active.popleft
    else:
        active = [start]

        def pop():
            k = int(rng.integers(len(active)))
            active[k], active[-1] = active[-1], active[k]
            return active.pop()

    saturated = 0
    while active:
        u = pop()
        saturated += 1
        nbrs = indices[indptr[u] : indptr[u + 1]]
        fresh = nbrs[~seen[nbrs]]
        seen[fresh] = True
        active.extend(fresh.tolist())
        trace.steps.append(Step(int(u), int(fresh.size), len(active), saturated))
    trace.terminated = True
    return trace


def _hop_distances(u: int, members: np.ndarray, graph: Graph) -> dict[int, int]:
    inside = set(members.tolist())
    dist = {u: 0}
    queue = deque([u])
    while queue:
        a = queue.popleft()
        for b in graph.neighbors(a).tolist():
            if b in inside and b not in dist:
                dist[b] = dist[a] + 1
                queue.append(b)
    return dist


def diameter_wrt(u: int, node_subset: Iterable[int], graph: Graph) -> float:
    """Largest hop distance from ``u`` to a node of the induced subgraph.

    Returns ``UNREACHABLE`` (infinity) when some node of the subset cannot be
    reached from ``u`` inside the subgraph.
    """
    members = np.unique(np.fromiter(node_subset, dtype=np.int64))
    if u not in set(members.tolist()):
        raise ValueError(f"node {u} is not in the subset")
    dist = _hop_distances(u, members, graph)
    if len(dist) < members.size:
        return UNREACHABLE
    return max(dist.values())


@dataclass(frozen=True)
class ChainDiagnostics:
    """First step ``k_prime`` from which every active node ``u`` has
    ``diameter_wrt(u, S_j + {u}) >= t - 2`` for all later steps, and
    ``|A ∪ S|`` at that step.  Inspection only."""

    t: int
    k_prime: int
    explored_at_k_prime: int


def chain_diagnostics(graph: Graph, trace: ExplorationTrace, t: int) -> ChainDiagnostics:
    """Replay ``trace`` and find the step from which chains are always available."""
    if t < 3:
        raise ValueError("t must be at least 3")
    order = trace.explored
    added_by_step = []
    seen = {trace.start_node}
    for u in order:
        fresh = [w for w in graph.neighbors(u).tolist() if w not in seen]
        seen.update(fresh)
        added_by_step.append(fresh)

    # state before step j (j = 0 .. len): S_j = order[:j], A_j as replayed
    active = [trace.start_node]
    holds = []
    for j in range(len(order) + 1):
        sat = order[:j]
        ok = all(diameter_wrt(u, sat + [u], graph) >= t - 2 for u in active)
        holds.append(ok)
        if j < len(order):
            active.remove(order[j])
            active.extend(added_by_step[j])

    k_prime = len(holds) - 1
    while k_prime > 0 and holds[k_prime - 1]:
        k_prime -= 1
    explored = 1 + sum(len(a) for a in added_by_step[:k_prime])
    return ChainDiagnostics(t=t, k_prime=k_prime, explored_at_k_prime=explored)


def chernoff_upper_tail(mean: float, delta: float) -> float:
    """Upper bound on ``P(Z >= E[Z] + delta)`` for a binomial ``Z``."""
    if not mean >= 0 or not delta > 0 or not math.isfinite(mean + delta):
        raise ValueError("need mean >= 0 and delta > 0")
    return math.exp(-(delta * delta) / (2.0 * mean + 2.0 * delta / 3.0))


@dataclass(frozen=True)
class DominanceReport:
    sample_count: tuple[int, int]
    max_violation: float
    worst_z: float
    tolerance: float

    @property
    def passes(self) -> bool:
        return self.max_violation <= self.tolerance


def empirical_tail(samples: np.ndarray, z: np.ndarray) -> np.ndarray:
    """``P(X >= z)`` under the empirical law of ``samples``."""
    s = np.sort(np.asarray(samples, dtype=float))
    return 1.0 - np.searchsorted(s, z, side="left") / s.size


def dominance_check(samples_x, samples_y, tolerance: float) -> DominanceReport:
    """Test whether X is stochastically upper bounded by Y.

    ``max_violation`` is the largest excess of X's empirical upper tail over
    Y's, taken over the pooled sample values.
    """
    x = np.asarray(samples_x, dtype=float).ravel()
    y = np.asarray(samples_y, dtype=float).ravel()
    if x.size == 0 or y.size == 0:
        raise ValueError("both sample lists must be nonempty")
    z = np.unique(np.concatenate([x, y]))
    gap = empirical_tail(x, z) - empirical_tail(y, z)
    k = int(np.argmax(gap))
    return DominanceReport(
        sample_count=(x.size, y.size),
        max_violation=float(gap[k]),
        worst_z=float(z[k]),
        tolerance=float(tolerance),
    )

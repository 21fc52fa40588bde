"""Cluster coefficients of Poisson random geometric graphs with unit radius.

``C_t`` is the probability that a node adjacent to the head ``v_1`` of a
chain ``v_1 ... v_{t-1}`` is also adjacent to one of ``v_2 ... v_{t-1}``.
A chain links consecutive nodes (distance <= 1) and no others (> 1).
For ``t = 3`` there are exact expressions; higher orders are estimated by
Monte Carlo over random chains.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import partial
from typing import Literal

import numpy as np
from scipy import integrate

from contperc.geometry import uniform_in_unit_ball
from contperc.seeding import run_tasks, stream

Method = Literal["closed_form", "quadrature", "series", "monte_carlo"]
ChainMeasure = Literal["sequential", "joint"]

METHODS = ("closed_form", "quadrature", "series", "monte_carlo")
MAX_PROPOSALS = 10**6
BLOCK_SIZE = 1 << 16


class RejectionCapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class CoefficientEstimate:
    value: float
    method: str
    half_width_95: float
    trials: int
    t: int
    d: int

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not 0.0 <= self.value <= 1.0 or self.half_width_95 < 0:
            raise ValueError("coefficient must lie in [0, 1] with a non-negative half width")

    @property
    def interval(self) -> tuple[float, float]:
        return (self.value - self.half_width_95, self.value + self.half_width_95)


def c3_closed_form_2d() -> float:
    return 1.0 - 3.0 * math.sqrt(3.0) / (4.0 * math.pi)


def c3_quadrature(d: int) -> float:
    """Triangle coefficient in dimension ``d`` from its angular integral."""
    if not isinstance(d, (int, np.integer)) or d < 2:
        raise ValueError(f"dimension must be an integer >= 2, got {d!r}")
    integral, _ = integrate.quad(lambda th: math.sin(th) ** d, 0.0, math.pi / 3, epsabs=1e-10, epsrel=1e-12)
    gamma_ratio = math.exp(math.lgamma((d + 2) / 2) - math.lgamma((d + 1) / 2))
    return 3.0 / math.sqrt(math.pi) * gamma_ratio * integral


def c3_series_3d() -> float:
    """Three-dimensional triangle coefficient as a finite Gamma-ratio sum (= 15/32)."""
    total = sum(math.gamma(i) / math.gamma(i + 0.5) * 0.75 ** (i + 0.5) for i in (0.5, 1.5))
    return 1.5 - total / math.sqrt(math.pi)


@dataclass(frozen=True)
class Chain:
    positions: np.ndarray  # (t - 1, d), positions[0] is the origin

    @property
    def d(self) -> int:
        return self.positions.shape[1]

    def is_valid(self) -> bool:
        p = self.positions
        dist = np.linalg.norm(p[:, None, :] - p[None, :, :], axis=-1)
        k = p.shape[0]
        gap = np.abs(np.arange(k)[:, None] - np.arange(k)[None, :])
        return bool(np.all(dist[gap == 1] <= 1.0) and np.all(dist[gap > 1] > 1.0))


def _far_from_earlier(cand: np.ndarray, earlier: np.ndarray) -> np.ndarray:
    """Rows of ``cand`` at distance > 1 from every point in ``earlier[:, k]``."""
    if earlier.shape[1] == 0:
        return np.ones(cand.shape[0], dtype=bool)
    gap = earlier - cand[:, None, :]
    return np.all(np.einsum("nkd,nkd->nk", gap, gap) > 1.0, axis=1)


def _chains_sequential(d: int, t: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    pts = np.zeros((n, t - 1, d))
    proposals = 0
    for j in range(1, t - 1):
        todo = np.arange(n)
        rounds = 0
        while todo.size:
            rounds += 1
            if rounds > MAX_PROPOSALS:
                raise RejectionCapExceeded(f"chain node {j + 1} not placed within {MAX_PROPOSALS} proposals")
            cand = pts[todo, j - 1] + uniform_in_unit_ball(todo.size, d, rng)
            proposals += todo.size
            ok = _far_from_earlier(cand, pts[todo, : j - 1])
            pts[todo[ok], j] = cand[ok]
            todo = todo[~ok]
    return pts, proposals


def _chains_joint(d: int, t: int, n: int, rng: np.random.Generator) -> tuple[np.ndarray, int]:
    pts = np.zeros((n, t - 1, d))
    todo = np.arange(n)
    proposals = 0
    rounds = 0
    while todo.size:
        rounds += 1
        if rounds > MAX_PROPOSALS:
            raise RejectionCapExceeded(f"chain not accepted within {MAX_PROPOSALS} proposals")
        steps = uniform_in_unit_ball(todo.size * (t - 2), d, rng).reshape(todo.size, t - 2, d)
        cand = np.concatenate([np.zeros((todo.size, 1, d)), np.cumsum(steps, axis=1)], axis=1)
        proposals += todo.size
        ok = np.ones(todo.size, dtype=bool)
        for j in range(2, t - 1):
            ok &= _far_from_earlier(cand[:, j], cand[:, : j - 1])
        pts[todo[ok]] = cand[ok]
        todo = todo[~ok]
    return pts, proposals


def sample_chains(d: int, t: int, n: int, rng: np.random.Generator, measure: ChainMeasure = "sequential"):
    """Draw ``n`` chains of ``t - 1`` nodes; returns ``(positions, proposals)``.

    ``"sequential"`` grows the chain one node at a time, each node uniform on
    the part of its predecessor's unit ball that keeps the chain valid.
    ``"joint"`` draws random-walk chains and rejects the whole chain, which
    gives the uniform law on the set of valid chains.
    """
    if t < 3:
        raise ValueError("t must be at least 3")
    if measure == "sequential":
        return _chains_sequential(d, t, n, rng)
    if measure == "joint":
        return _chains_joint(d, t, n, rng)
    raise ValueError(f"unknown chain measure {measure!r}")


def sample_chain(d: int, t: int, rng: np.random.Generator, measure: ChainMeasure = "sequential") -> Chain:
    pts, _ = sample_chains(d, t, 1, rng, measure)
    return Chain(pts[0])


def chain_acceptance_rate(d: int, t: int, chains: int, rng: np.random.Generator, measure: ChainMeasure = "sequential") -> float:
    """Fraction of rejection-loop proposals accepted while drawing ``chains`` chains.

    A sequential proposal is one node; a joint proposal is a whole chain.
    """
    _, proposals = sample_chains(d, t, chains, rng, measure)
    placed = chains * (t - 3) if measure == "sequential" else chains
    if placed == 0:
        return 1.0
    return placed / (proposals - (chains if measure == "sequential" else 0))


def _block_hits(args) -> int:
    d, t, n, seed, block, measure = args
    rng = stream(seed, block)
    pts, _ = sample_chains(d, t, n, rng, measure)
    tip = uniform_in_unit_ball(n, d, rng)
    gap = pts[:, 1:, :] - tip[:, None, :]
    hit = np.any(np.einsum("nkd,nkd->nk", gap, gap) <= 1.0, axis=1)
    return int(hit.sum())


def estimate_ct_monte_carlo(
    d: int,
    t: int,
    trials: int,
    seed: int,
    measure: ChainMeasure = "sequential",
    workers: int = 1,
) -> CoefficientEstimate:
    """Monte Carlo estimate of ``C_t`` in dimension ``d``.

    Trials are split into fixed blocks of ``BLOCK_SIZE``; block ``b`` draws
    from ``stream(seed, b)``, so the estimate depends only on
    ``(d, t, trials, seed, measure)``.
    """
    if t < 3:
        raise ValueError("t must be at least 3")
    if d < 1:
        raise ValueError("d must be at least 1")
    if trials <= 0:
        raise ValueError("trials must be positive")
    blocks = []
    for b, start in enumerate(range(0, trials, BLOCK_SIZE)):
        blocks.append((d, t, min(BLOCK_SIZE, trials - start), seed, b, measure))
    hits = sum(run_tasks(_block_hits, blocks, workers))
    p = hits / trials
    return CoefficientEstimate(
        value=p,
        method="monte_carlo",
        half_width_95=1.96 * math.sqrt(p * (1 - p) / trials),
        trials=trials,
        t=t,
        d=d,
    )


def coefficient(
    d: int,
    t: int,
    method: Method,
    trials: int = 10**6,
    seed: int = 0,
    measure: ChainMeasure = "sequential",
    workers: int = 1,
) -> CoefficientEstimate:
    """Compute ``C_t`` in dimension ``d`` by the named method."""
    exact_only = method in ("closed_form", "quadrature", "series")
    if exact_only and t != 3:
        raise ValueError(f"method {method!r} is only available for t = 3")
    if method == "closed_form":
        if d != 2:
            raise ValueError("closed_form is only available for d = 2")
        value = c3_closed_form_2d()
    elif method == "series":
        if d != 3:
            raise ValueError("series is only available for d = 3")
        value = c3_series_3d()
    elif method == "quadrature":
        value = c3_quadrature(d)
    elif method == "monte_carlo":
        return estimate_ct_monte_carlo(d, t, trials, seed, measure=measure, workers=workers)
    else:
        raise ValueError(f"unsupported method {method!r}; choose from {METHODS}")
    return CoefficientEstimate(value=value, method=method, half_width_95=0.0, trials=0, t=t, d=d)

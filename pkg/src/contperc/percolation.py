"""Monte Carlo percolation experiments on the torus.

Two order parameters are recorded per sampled graph: the fraction of nodes
in the largest component, and whether some cycle winds around the torus.
The wrapping probability crosses 1/2 much closer to the infinite-volume
threshold at small ``L``, so it is the default for threshold estimation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Literal, Sequence

import numpy as np

from contperc.bounds import mu_lower_bound
from contperc.cluster import c3_quadrature
from contperc.components import connected_components, winding_components
from contperc.exploration import (
    DominanceReport,
    active_saturated_run,
    chain_diagnostics,
    dominance_check,
)
from contperc.geometry import TorusBox, unit_ball_volume
from contperc.rgg import build_graph, sample_binomial_points, sample_poisson_points
from contperc.seeding import run_tasks, stream

OrderParameter = Literal["wrapping", "largest_fraction"]


@dataclass(frozen=True)
class CurveRow:
    density: float
    trials: int
    mean_fraction: float
    stderr: float
    mean_origin_size: float
    wrap_probability: float
    wrap_stderr: float


@dataclass(frozen=True)
class PercolationCurve:
    d: int
    L: float
    radius: float
    rows: tuple[CurveRow, ...]

    def __post_init__(self):
        dens = [r.density for r in self.rows]
        if any(b <= a for a, b in zip(dens, dens[1:])):
            raise ValueError("densities must be strictly increasing")

    @property
    def densities(self) -> np.ndarray:
        return np.array([r.density for r in self.rows])

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_dict(self) -> dict:
        return {"d": self.d, "L": self.L, "radius": self.radius, "rows": [asdict(r) for r in self.rows]}


def _stderr(x: np.ndarray) -> float:
    return float(x.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


def _sweep_trial(args) -> tuple[float, int, bool]:
    g, k, d, L, radius, density, seed = args
    rng = stream(seed, g, k)
    box = TorusBox(d, L)
    # the extra last node plays the role of the origin
    points = sample_poisson_points(density, box, rng).with_point(box.center)
    report = winding_components(build_graph(points, radius))
    lab = report.labeling
    n = points.points.shape[0]
    return lab.largest_size / n, lab.sizes[int(lab.label[n - 1])], report.wraps


def _validate_grid(density_grid: Sequence[float]) -> list[float]:
    grid = [float(x) for x in density_grid]
    if not grid:
        raise ValueError("density grid is empty")
    if any(x < 0 or not math.isfinite(x) for x in grid):
        raise ValueError("densities must be finite and non-negative")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("density grid must be strictly increasing")
    return grid


def percolation_sweep(
    d: int,
    density_grid: Sequence[float],
    L: float,
    trials_per_point: int,
    seed: int,
    radius: float = 1.0,
    workers: int = 1,
) -> PercolationCurve:
    """Sample ``trials_per_point`` Poisson graphs per density on a torus of side ``L``.

    Trial ``k`` at grid index ``g`` uses ``stream(seed, g, k)``.
    """
    grid = _validate_grid(density_grid)
    if not L >= 8 * radius:
        raise ValueError(f"L must be at least 8 radii, got L={L}, radius={radius}")
    if trials_per_point < 1:
        raise ValueError("trials_per_point must be at least 1")
    tasks = [(g, k, d, L, radius, lam, seed) for g, lam in enumerate(grid) for k in range(trials_per_point)]
    results = run_tasks(_sweep_trial, tasks, workers)
    rows = []
    for g, lam in enumerate(grid):
        chunk = results[g * trials_per_point : (g + 1) * trials_per_point]
        frac = np.array([c[0] for c in chunk])
        origin = np.array([c[1] for c in chunk], dtype=float)
        wraps = np.array([c[2] for c in chunk], dtype=float)
        rows.append(
            CurveRow(
                density=lam,
                trials=trials_per_point,
                mean_fraction=float(frac.mean()),
                stderr=_stderr(frac),
                mean_origin_size=float(origin.mean()),
                wrap_probability=float(wraps.mean()),
                wrap_stderr=_stderr(wraps),
            )
        )
    return PercolationCurve(d=d, L=float(L), radius=float(radius), rows=tuple(rows))


@dataclass(frozen=True)
class ThresholdEstimate:
    lambda_hat: float
    theta: float
    L: float
    method: str
    interval: tuple[float, float] | None = None


class NoCrossingError(ValueError):
    pass


def _first_crossing(x: np.ndarray, y: np.ndarray, theta: float) -> float | None:
    for i in range(len(x) - 1):
        if y[i] < theta <= y[i + 1]:
            return float(x[i] + (theta - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]))
    return None


_COLUMNS = {"wrapping": ("wrap_probability", "wrap_stderr"), "largest_fraction": ("mean_fraction", "stderr")}


def estimate_threshold(
    curve: PercolationCurve,
    theta: float = 0.5,
    order_parameter: OrderParameter = "wrapping",
) -> ThresholdEstimate:
    """Density at which the order parameter first rises through ``theta``.

    Linear interpolation between the bracketing grid points.  The interval
    is where the curves shifted by +-1.96 standard errors cross ``theta``.
    """
    if order_parameter not in _COLUMNS:
        raise ValueError(f"unknown order parameter {order_parameter!r}")
    mean_col, se_col = _COLUMNS[order_parameter]
    x = curve.densities
    y = curve.column(mean_col)
    lam = _first_crossing(x, y, theta)
    if lam is None:
        raise NoCrossingError(
            f"{order_parameter} never rises through {theta} on [{x[0]}, {x[-1]}]; widen the density grid"
        )
    se = curve.column(se_col)
    lo = _first_crossing(x, y + 1.96 * se, theta)
    hi = _first_crossing(x, y - 1.96 * se, theta)
    interval = (lo, hi) if lo is not None and hi is not None else None
    return ThresholdEstimate(lambda_hat=lam, theta=theta, L=curve.L, method=order_parameter, interval=interval)


@dataclass(frozen=True)
class GrowthRow:
    n: int
    mean_largest: float
    max_largest: int
    mean_ratio: float  # mean largest size / ln n
    max_ratio: float  # max largest size / ln n
    mean_fraction: float
    fraction_stderr: float


@dataclass(frozen=True)
class GrowthReport:
    d: int
    mu: float
    rows: tuple[GrowthRow, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {"d": self.d, "mu": self.mu, "rows": [asdict(r) for r in self.rows]}


class OutsideRegimeError(ValueError):
    pass


def subcritical_side(n: int, mu: float, d: int) -> float:
    """Torus side giving ``n`` nodes at mean degree ``mu`` with unit radius."""
    return (n * unit_ball_volume(d) / mu) ** (1.0 / d)


def _growth_trial(args) -> int:
    i, k, n, d, mu, seed = args
    rng = stream(seed, i, k)
    box = TorusBox(d, subcritical_side(n, mu, d))
    return connected_components(build_graph(sample_binomial_points(n, box, rng), 1.0)).largest_size


def subcritical_growth(
    d: int,
    mu: float,
    n_list: Sequence[int],
    trials: int,
    seed: int,
    workers: int = 1,
) -> GrowthReport:
    """Largest-component size versus ``n`` at fixed mean degree ``mu``.

    Only mean degrees below the t = 3 bound ``1 / (1 - C_3)`` are accepted;
    there the largest component should grow like ``ln n``.
    """
    if d < 2:
        raise ValueError("d must be at least 2")
    limit = mu_lower_bound(c3_quadrature(d))
    if not 0 < mu < limit:
        raise OutsideRegimeError(f"mu={mu} is outside the subcritical regime (0, {limit:.6f}) for d={d}")
    ns = [int(n) for n in n_list]
    if not ns or any(b <= a for a, b in zip(ns, ns[1:])) or ns[0] < 2:
        raise ValueError("n_list must be strictly increasing with n >= 2")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    for n in ns:
        if subcritical_side(n, mu, d) < 2.0:
            raise ValueError(f"n={n} gives a torus narrower than two radii")
    tasks = [(i, k, n, d, mu, seed) for i, n in enumerate(ns) for k in range(trials)]
    sizes = run_tasks(_growth_trial, tasks, workers)
    rows = []
    for i, n in enumerate(ns):
        s = np.array(sizes[i * trials : (i + 1) * trials], dtype=float)
        rows.append(
            GrowthRow(
                n=n,
                mean_largest=float(s.mean()),
                max_largest=int(s.max()),
                mean_ratio=float(s.mean() / math.log(n)),
                max_ratio=float(s.max() / math.log(n)),
                mean_fraction=float(s.mean() / n),
                fraction_stderr=_stderr(s / n),
            )
        )
    return GrowthReport(d=d, mu=float(mu), rows=tuple(rows))


def post_chain_increments(graph, starts: Sequence[int], t: int = 3) -> list[int]:
    """Activation counts ``Y_{j+1}`` for steps ``j >= k'`` of FIFO runs.

    ``k'`` is the step from which every active node sees a (t-2)-chain
    among saturated nodes.  For ``t = 3`` that is any step after the first.
    """
    out: list[int] = []
    for s in starts:
        trace = active_saturated_run(graph, int(s))
        k_prime = 1 if t == 3 else chain_diagnostics(graph, trace, t).k_prime
        out.extend(trace.y_values[k_prime:])
    return out


@dataclass(frozen=True)
class DominanceExperiment:
    report: DominanceReport
    q: float
    n: int
    increments: np.ndarray
    reference: np.ndarray


def exploration_dominance(
    d: int,
    mu: float,
    n: int,
    graphs: int,
    starts_per_graph: int,
    seed: int,
    tolerance: float = 0.02,
    reference_samples: int = 200_000,
    coefficient: float | None = None,
    t: int = 3,
) -> DominanceExperiment:
    """Compare exploration increments with ``Binomial(n - 1, p (1 - C_t))``.

    ``p = mu / (n - 1)`` is the link probability of the n-node graph.
    """
    ct = c3_quadrature(d) if coefficient is None else coefficient
    if t != 3 and coefficient is None:
        raise ValueError("pass the cluster coefficient explicitly for t > 3")
    box = TorusBox(d, subcritical_side(n, mu, d))
    increments: list[int] = []
    for g in range(graphs):
        rng = stream(seed, 0, g)
        graph = build_graph(sample_binomial_points(n, box, rng), 1.0)
        starts = rng.choice(n, size=min(starts_per_graph, n), replace=False)
        increments.extend(post_chain_increments(graph, starts, t))
    q = mu / (n - 1) * (1.0 - ct)
    reference = stream(seed, 1, 0).binomial(n - 1, q, size=reference_samples)
    inc = np.asarray(increments, dtype=np.int64)
    return DominanceExperiment(
        report=dominance_check(inc, reference, tolerance),
        q=q,
        n=n,
        increments=inc,
        reference=reference,
    )

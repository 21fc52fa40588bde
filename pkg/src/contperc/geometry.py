"""Points on the flat torus [0, L)^d and unit-ball primitives."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class InvalidDimensionError(ValueError):
    pass


def _check_dimension(d: int) -> None:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool) or d < 1:
        raise InvalidDimensionError(f"dimension must be a positive integer, got {d!r}")


@dataclass(frozen=True)
class TorusBox:
    """Periodic box of side ``side`` in ``dimension`` dimensions."""

    dimension: int
    side: float

    def __post_init__(self):
        _check_dimension(self.dimension)
        if not (self.side > 0 and math.isfinite(self.side)):
            raise ValueError(f"side must be positive and finite, got {self.side!r}")

    @property
    def volume(self) -> float:
        return float(self.side) ** self.dimension

    @property
    def center(self) -> np.ndarray:
        return np.full(self.dimension, 0.5 * self.side)

    def wrap(self, x) -> np.ndarray:
        """Map coordinates into [0, L) componentwise."""
        x = np.mod(np.asarray(x, dtype=float), self.side)
        # fmod can return exactly L for tiny negative inputs
        x[x >= self.side] = 0.0
        return x

    def contains(self, x) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all((x >= 0) & (x < self.side)))


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d, ``pi**(d/2) / Gamma(d/2 + 1)``."""
    _check_dimension(d)
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1)


def _as_point(p, d: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (d,):
        raise InvalidDimensionError(f"expected a point of dimension {d}, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point coordinates must be finite")
    return p


def minimum_image(delta, side: float) -> np.ndarray:
    """Shortest per-coordinate displacement on a circle of length ``side``."""
    delta = np.abs(np.asarray(delta, dtype=float))
    return np.minimum(delta, side - delta)


def torus_distance(p, q, box: TorusBox) -> float:
    """Euclidean distance between ``p`` and ``q`` under periodic wrap."""
    p = _as_point(p, box.dimension)
    q = _as_point(q, box.dimension)
    return float(np.linalg.norm(minimum_image(p - q, box.side)))


def uniform_in_unit_ball(n: int, d: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` points uniformly in the closed unit d-ball, shape ``(n, d)``.

    Direction from a normalised Gaussian, radius as ``U**(1/d)``.
    """
    _check_dimension(d)
    g = rng.standard_normal((n, d))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    # a zero Gaussian vector has probability zero; guard anyway
    norms[norms == 0] = 1.0
    r = rng.random((n, 1)) ** (1.0 / d)
    return g / norms * r


def sample_uniform_in_ball(center, radius: float, rng: np.random.Generator) -> np.ndarray:
    """One point uniform in the ball of ``radius`` about ``center``.

    No periodic wrap is applied; callers on a torus wrap the result.
    """
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius!r}")
    center = np.asarray(center, dtype=float)
    if center.ndim != 1 or center.size < 1:
        raise InvalidDimensionError("center must be a 1-d coordinate vector")
    return center + radius * uniform_in_unit_ball(1, center.size, rng)[0]

"""Lower bounds on the critical mean degree and density from a cluster coefficient.

Subcritical behaviour is guaranteed whenever the mean degree is below
``1 / (1 - C_t)``, so that quantity bounds the critical mean degree from
below, and dividing by the unit-ball volume bounds the critical density.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from contperc.cluster import ChainMeasure, Method, coefficient
from contperc.geometry import unit_ball_volume

# Published reference values, documented only (not recomputed here).
KNOWN_LAMBDA_C_2D_SIMULATED = 1.44
KNOWN_LAMBDA_C_3D_SIMULATED = 0.65
KNOWN_LAMBDA_C_2D_RIGOROUS = (0.696, 3.372)
KNOWN_LAMBDA_C_2D_NUMERICAL = (1.435, 1.437)
REPORTED_C_2D = {3: 0.5865, 4: 0.6012, 5: 0.6179}
REPORTED_HIGHER_ORDER_2D = {"mu": 2.617, "lambda": 0.883}


def mu_lower_bound(ct: float) -> float:
    if not 0.0 <= ct < 1.0:
        raise ValueError(f"cluster coefficient must lie in [0, 1), got {ct!r}")
    return 1.0 / (1.0 - ct)


def lambda_lower_bound(d: int, ct: float) -> float:
    if d < 2:
        raise ValueError("bounds apply for d >= 2")
    return mu_lower_bound(ct) / unit_ball_volume(d)


@dataclass(frozen=True)
class BoundResult:
    d: int
    t: int
    coefficient: float
    mu_lower: float
    lambda_lower: float
    coefficient_method: str
    coefficient_half_width: float = 0.0
    mu_interval: tuple[float, float] | None = None
    lambda_interval: tuple[float, float] | None = None
    reference: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def bound_report(
    d: int,
    t: int,
    method: Method,
    trials: int = 10**6,
    seed: int = 0,
    measure: ChainMeasure = "sequential",
    workers: int = 1,
) -> BoundResult:
    """Compute ``C_t`` by ``method`` and the bounds that follow from it.

    Monte Carlo coefficients carry a 95% interval, mapped through the
    (increasing) bound formulas endpoint by endpoint.
    """
    est = coefficient(d, t, method, trials=trials, seed=seed, measure=measure, workers=workers)
    mu_iv = lam_iv = None
    if est.half_width_95 > 0:
        lo = max(0.0, est.value - est.half_width_95)
        hi = min(est.value + est.half_width_95, 1.0 - 1e-15)
        mu_iv = (mu_lower_bound(lo), mu_lower_bound(hi))
        lam_iv = (lambda_lower_bound(d, lo), lambda_lower_bound(d, hi))
    reference = None
    if d == 2 and t >= 4:
        reference = {"reported_coefficient": REPORTED_C_2D.get(t), **REPORTED_HIGHER_ORDER_2D}
    return BoundResult(
        d=d,
        t=t,
        coefficient=est.value,
        mu_lower=mu_lower_bound(est.value),
        lambda_lower=lambda_lower_bound(d, est.value),
        coefficient_method=est.method,
        coefficient_half_width=est.half_width_95,
        mu_interval=mu_iv,
        lambda_interval=lam_iv,
        reference=reference,
    )

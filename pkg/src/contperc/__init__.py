"""Continuum percolation on Poisson random geometric graphs.

Cluster-coefficient lower bounds on the critical density, Monte Carlo
threshold estimation on the torus, and the active-saturated exploration
process.
"""

from contperc.bounds import BoundResult, bound_report, lambda_lower_bound, mu_lower_bound
from contperc.cluster import (
    Chain,
    CoefficientEstimate,
    c3_closed_form_2d,
    c3_quadrature,
    c3_series_3d,
    estimate_ct_monte_carlo,
    sample_chain,
)
from contperc.components import (
    ComponentLabeling,
    connected_components,
    largest_component_fraction,
)
from contperc.geometry import (
    TorusBox,
    sample_uniform_in_ball,
    torus_distance,
    unit_ball_volume,
)
from contperc.exploration import (
    DominanceReport,
    ExplorationTrace,
    active_saturated_run,
    chernoff_upper_tail,
    diameter_wrt,
    dominance_check,
)
from contperc.percolation import (
    GrowthReport,
    PercolationCurve,
    ThresholdEstimate,
    estimate_threshold,
    percolation_sweep,
    subcritical_growth,
)
from contperc.rgg import (
    DegreeSummary,
    Graph,
    PointSet,
    build_graph,
    degree_summary,
    expected_link_probability,
    sample_poisson_points,
)

__version__ = "0.1.0"

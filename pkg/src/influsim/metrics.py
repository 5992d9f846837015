"""Campaign economics and Monte Carlo aggregation.

Customer acquisition cost is hiring cost per buyer; conversion ratio is
buyers per reached agent. Both are computed trial by trial and then
averaged, never as ratios of averaged totals. Aggregation uses population
variance over the trial set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from influsim.campaign import CampaignResult

__all__ = [
    "AggregateMetrics",
    "CampaignMetrics",
    "METRICS_CSV_COLUMNS",
    "aggregate",
    "conversion_ratio",
    "customer_acquisition_cost",
]

# Fixed per-(scenario, tier) row schema for metrics CSV exports.
METRICS_CSV_COLUMNS = (
    "mu",
    "omega",
    "tier",
    "n",
    "eta",
    "mean_psi",
    "mean_chi",
    "mean_cac",
    "var_cac",
    "mean_cr",
    "var_cr",
    "excluded_trials",
)


def customer_acquisition_cost(eta: float, psi: int) -> Optional[float]:
    """Hiring cost per acquired customer, or None when there are no buyers.

    Returns ``eta / psi``; a campaign with zero buyers has no meaningful
    cost per customer, so None is returned and callers must handle it.
    """
    if eta < 0:
        raise ValueError(f"hiring cost must be >= 0, got {eta}")
    if psi < 0:
        raise ValueError(f"buyer count must be >= 0, got {psi}")
    if psi == 0:
        return None
    return eta / psi


def conversion_ratio(psi: int, chi: int) -> Optional[float]:
    """Fraction of reached agents that bought, or None when reach is zero.

    Returns ``psi / chi`` in [0, 1]. A campaign that reached nobody has no
    conversion ratio, so None is returned and callers must handle it.
    """
    if psi < 0:
        raise ValueError(f"buyer count must be >= 0, got {psi}")
    if chi < 0:
        raise ValueError(f"reach must be >= 0, got {chi}")
    if psi > chi:
        raise ValueError(f"buyers ({psi}) cannot exceed reach ({chi})")
    if chi == 0:
        return None
    return psi / chi


@dataclass(frozen=True)
class CampaignMetrics:
    """Economics of one campaign trial.

    ``cac`` is None when the trial had no buyers, ``cr`` is None
    when it had no reach.
    """

    buyers: int
    reach: int
    hiring_cost: float
    cac: Optional[float]
    cr: Optional[float]

    @classmethod
    def from_campaign(cls, result: CampaignResult) -> "CampaignMetrics":
        return cls(
            buyers=result.buyers,
            reach=result.reach,
            hiring_cost=result.seed_hiring_cost,
            cac=customer_acquisition_cost(result.seed_hiring_cost, result.buyers),
            cr=conversion_ratio(result.buyers, result.reach),
        )


@dataclass(frozen=True)
class AggregateMetrics:
    """Mean and population variance of campaign metrics across trials.

    Trials with no buyers carry no acquisition cost; they are dropped from
    the cac statistics and counted in ``excluded_trials``. Conversion
    statistics drop only the (rarer) zero-reach trials, keeping legitimate
    zero ratios. ``mean_cac``/``var_cac`` (and the cr pair) are None when
    every trial was dropped from that statistic.
    """

    trial_count: int
    mean_buyers: float
    var_buyers: float
    mean_reach: float
    var_reach: float
    mean_hiring_cost: float
    var_hiring_cost: float
    mean_cac: Optional[float]
    var_cac: Optional[float]
    mean_cr: Optional[float]
    var_cr: Optional[float]
    excluded_trials: int


def _mean_var(values: Sequence[float]) -> tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    arr = np.asarray(values, dtype=np.float64)
    return float(arr.mean()), float(arr.var())


def aggregate(results: Sequence[CampaignMetrics]) -> AggregateMetrics:
    """Aggregate per-trial metrics into means and population variances."""
    if not results:
        raise ValueError("cannot aggregate an empty trial list")
    buyers = [r.buyers for r in results]
    reach = [r.reach for r in results]
    costs = [r.hiring_cost for r in results]
    cacs = [r.cac for r in results if r.cac is not None]
    crs = [r.cr for r in results if r.cr is not None]

    mean_buyers, var_buyers = _mean_var(buyers)
    mean_reach, var_reach = _mean_var(reach)
    mean_cost, var_cost = _mean_var(costs)
    mean_cac, var_cac = _mean_var(cacs)
    mean_cr, var_cr = _mean_var(crs)
    return AggregateMetrics(
        trial_count=len(results),
        mean_buyers=mean_buyers,
        var_buyers=var_buyers,
        mean_reach=mean_reach,
        var_reach=var_reach,
        mean_hiring_cost=mean_cost,
        var_hiring_cost=var_cost,
        mean_cac=mean_cac,
        var_cac=var_cac,
        mean_cr=mean_cr,
        var_cr=var_cr,
        excluded_trials=len(results) - len(cacs),
    )


def metrics_csv_row(
    mu: float,
    omega: float,
    tier: int,
    set_size: int,
    eta: float,
    agg: AggregateMetrics,
) -> list[str]:
    """Format one per-(scenario, tier) CSV row; None statistics become ''."""

    def fmt(value: Optional[float]) -> str:
        return "" if value is None else repr(float(value))

    return [
        repr(float(mu)),
        repr(float(omega)),
        str(tier),
        str(set_size),
        repr(float(eta)),
        fmt(agg.mean_buyers),
        fmt(agg.mean_reach),
        fmt(agg.mean_cac),
        fmt(agg.var_cac),
        fmt(agg.mean_cr),
        fmt(agg.var_cr),
        str(agg.excluded_trials),
    ]

"""Per-agent attribute initialization from a scenario configuration.

Interest and willingness are random per agent; tier, engagement rate, and
hiring cost are deterministic functions of the graph's outdegrees. Interest
is the only attribute campaigns mutate, and each trial re-initializes its own
population, so trials stay independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace

import numpy as np

from influsim.graph import SocialGraph

__all__ = [
    "AgentState",
    "Population",
    "ScenarioConfig",
    "TIER_ENGAGEMENT_PCT",
    "TIER_LOWER_BOUNDS_PCT",
    "assign_tier",
    "hiring_cost",
    "init_population",
    "sample_truncated_interest",
]

# Influencer tiers by normalized outdegree percentage, largest accounts first.
# Lower bounds are inclusive; each range's upper bound is the previous tier's
# lower bound (exclusive), except tier 1 which includes 100 exactly.
TIER_LOWER_BOUNDS_PCT = (90.0, 50.0, 25.0, 12.0, 6.0, 0.0)
TIER_ENGAGEMENT_PCT = (1.0, 5.0, 12.0, 18.0, 25.0, 30.0)

COST_PER_FOLLOWER = 0.01


@dataclass(frozen=True)
class ScenarioConfig:
    """All model parameters for one simulated scenario.

    Defaults follow the constants used throughout the reference experiments:
    sigma=0.2, activeness=0.9, gamma=0.01, c=0.7, trials=10.
    """

    mu: float = 0.5
    sigma: float = 0.2
    omega: float = 0.5
    activeness: float = 0.9
    gamma: float = 0.01
    c: float = 0.7
    rho: float = 68.0
    trials: int = 10
    master_seed: int = 0

    def __post_init__(self) -> None:
        problems = []
        if not 0.0 < self.mu <= 1.0:
            problems.append(f"mu must be in (0, 1], got {self.mu}")
        if self.sigma < 0.0:
            problems.append(f"sigma must be >= 0, got {self.sigma}")
        for name in ("omega", "activeness", "gamma", "c"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                problems.append(f"{name} must be in [0, 1], got {value}")
        if self.rho < 0.0 or math.isnan(self.rho):
            problems.append(f"rho must be >= 0, got {self.rho}")
        if self.trials < 1:
            problems.append(f"trials must be >= 1, got {self.trials}")
        if problems:
            raise ValueError("invalid scenario config: " + "; ".join(problems))

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config field(s): {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        data = json.loads(text)
        if not isinstance(data, dict):
            raise ValueError("config JSON must be an object")
        return cls.from_dict(data)

    def with_overrides(self, **kwargs) -> "ScenarioConfig":
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class AgentState:
    """Point-in-time view of one agent (the arrays in Population are primary)."""

    interest: float
    willing: bool
    active_prob: float
    tier: int
    engagement_rate: float
    hiring_cost: float
    bought: bool
    exposed: bool


class Population:
    """Per-vertex agent attributes, stored as parallel arrays."""

    def __init__(
        self,
        interest: np.ndarray,
        willing: np.ndarray,
        tier: np.ndarray,
        engagement_rate: np.ndarray,
        hiring_cost: np.ndarray,
        active_prob: float,
    ) -> None:
        n = interest.shape[0]
        for name, arr in (
            ("willing", willing),
            ("tier", tier),
            ("engagement_rate", engagement_rate),
            ("hiring_cost", hiring_cost),
        ):
            if arr.shape[0] != n:
                raise ValueError(f"{name} length {arr.shape[0]} != {n}")
        self.interest = interest
        self.willing = willing
        self.tier = tier
        self.engagement_rate = engagement_rate
        self.hiring_cost = hiring_cost
        self.active_prob = active_prob
        self.bought = np.zeros(n, dtype=bool)
        self.exposed = np.zeros(n, dtype=bool)
        self.size = n

    def agent(self, v: int) -> AgentState:
        if not 0 <= v < self.size:
            raise ValueError(f"agent {v} not in population of {self.size}")
        return AgentState(
            interest=float(self.interest[v]),
            willing=bool(self.willing[v]),
            active_prob=self.active_prob,
            tier=int(self.tier[v]),
            engagement_rate=float(self.engagement_rate[v]),
            hiring_cost=float(self.hiring_cost[v]),
            bought=bool(self.bought[v]),
            exposed=bool(self.exposed[v]),
        )

    def tier_members(self, tier: int) -> np.ndarray:
        if not 1 <= tier <= 6:
            raise ValueError(f"tier must be 1..6, got {tier}")
        return np.flatnonzero(self.tier == tier)


def sample_truncated_interest(mu: float, sigma: float, rng: np.random.Generator) -> float:
    """One draw from Normal(mu, sigma^2) truncated to [0, 1] by rejection."""
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu must be in (0, 1], got {mu}")
    if sigma < 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return mu
    while True:
        x = rng.normal(mu, sigma)
        if 0.0 <= x <= 1.0:
            return float(x)


def _sample_truncated_interest_batch(
    mu: float, sigma: float, size: int, rng: np.random.Generator
) -> np.ndarray:
    """Vectorized rejection sampling, same distribution as the scalar op."""
    if sigma == 0.0:
        return np.full(size, mu, dtype=np.float64)
    out = rng.normal(mu, sigma, size)
    bad = (out < 0.0) | (out > 1.0)
    while bad.any():
        redraw = rng.normal(mu, sigma, int(bad.sum()))
        out[bad] = redraw
        bad = (out < 0.0) | (out > 1.0)
    return out


def assign_tier(nu: float) -> tuple[int, float]:
    """Map a normalized outdegree percentage to (tier, engagement rate %)."""
    if not 0.0 <= nu <= 100.0:
        raise ValueError(f"normalized outdegree must be in [0, 100], got {nu}")
    for level, lower in enumerate(TIER_LOWER_BOUNDS_PCT, start=1):
        if nu >= lower:
            return level, TIER_ENGAGEMENT_PCT[level - 1]
    raise AssertionError("unreachable: tier 6 lower bound is 0")


def hiring_cost(followers: int) -> float:
    """Cost of hiring an account, at $10 per 1000 followers."""
    if followers < 0:
        raise ValueError(f"follower count must be >= 0, got {followers}")
    return COST_PER_FOLLOWER * followers


def _tier_arrays(graph: SocialGraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Deterministic tier, engagement-rate, and hiring-cost arrays for a graph."""
    if graph.max_outdegree == 0:
        raise ValueError("degenerate graph: max outdegree is 0")
    nu = 100.0 * graph.outdegrees / graph.max_outdegree
    # Bin by the tier lower bounds; index 0 = below 6% (tier 6) up to 5 = >= 90%.
    bin_idx = np.digitize(nu, bins=[6.0, 12.0, 25.0, 50.0, 90.0], right=False)
    tier = (6 - bin_idx).astype(np.int8)
    eps = np.asarray(TIER_ENGAGEMENT_PCT, dtype=np.float64)[tier - 1]
    cost = COST_PER_FOLLOWER * graph.outdegrees.astype(np.float64)
    return tier, eps, cost


def init_population(
    graph: SocialGraph, config: ScenarioConfig, rng: np.random.Generator
) -> Population:
    """Initialize agent attributes for one trial.

    Draw order: interest (vectorized rejection rounds), then willingness.
    Tier, engagement rate, and hiring cost are deterministic in the graph.
    """
    n = graph.vertex_count
    tier, eps, cost = _tier_arrays(graph)
    interest = _sample_truncated_interest_batch(config.mu, config.sigma, n, rng)
    if config.omega >= 1.0:
        willing = np.ones(n, dtype=bool)
    else:
        willing = rng.random(n) < config.omega
    return Population(
        interest=interest,
        willing=willing,
        tier=tier,
        engagement_rate=eps,
        hiring_cost=cost,
        active_prob=config.activeness,
    )

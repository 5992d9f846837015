"""Seed-set construction within a single influencer tier.

Two constraints are supported: a hiring budget (total cost of the set may
not exceed it) and a unique-follower target (the union of the members'
follower sets must reach it). Candidates are drawn uniformly at random
from the tier so that large members do not dominate the sets; pass
``order="largest-first"`` to get the deterministic greedy variant instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from influsim.graph import SocialGraph
from influsim.population import Population

__all__ = [
    "InfluencerSet",
    "select_by_budget",
    "select_by_unique_followers",
]

_ORDERS = ("random", "largest-first")


@dataclass(frozen=True, eq=False)
class InfluencerSet:
    """A seed set whose members all belong to one tier.

    Attributes
    ----------
    members : numpy.ndarray
        Sorted vertex ids of the hired influencers.
    tier : int
        Tier shared by every member, 1 (largest) through 6 (smallest).
    total_hiring_cost : float
        Sum of the members' hiring costs.
    unique_followers : int
        Cardinality of the union of the members' follower sets, not
        counting any follower that is itself a member.
    size : int
        Number of members.
    """

    members: np.ndarray
    tier: int
    total_hiring_cost: float
    unique_followers: int
    size: int

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InfluencerSet):
            return NotImplemented
        return (
            self.tier == other.tier
            and self.total_hiring_cost == other.total_hiring_cost
            and self.unique_followers == other.unique_followers
            and self.size == other.size
            and np.array_equal(self.members, other.members)
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "members": [int(v) for v in self.members],
                "tier": self.tier,
                "total_hiring_cost": self.total_hiring_cost,
                "unique_followers": self.unique_followers,
                "size": self.size,
            },
            sort_keys=True,
        )


def _follower_union(graph: SocialGraph, members: np.ndarray) -> int:
    """Count distinct followers of ``members``, excluding the members."""
    seen = np.zeros(graph.vertex_count, dtype=bool)
    for v in members:
        seen[graph.indices[graph.indptr[v] : graph.indptr[v + 1]]] = True
    seen[members] = False
    return int(np.count_nonzero(seen))


def _build_set(
    graph: SocialGraph, population: Population, tier: int, members: list[int]
) -> InfluencerSet:
    member_arr = np.sort(np.asarray(members, dtype=np.int64))
    cost = float(population.hiring_cost[member_arr].sum())
    return InfluencerSet(
        members=member_arr,
        tier=tier,
        total_hiring_cost=cost,
        unique_followers=_follower_union(graph, member_arr),
        size=member_arr.size,
    )


def _candidate_order(
    graph: SocialGraph, members: np.ndarray, order: str, rng: np.random.Generator
) -> np.ndarray:
    if order not in _ORDERS:
        raise ValueError(f"unknown order {order!r}; expected one of {_ORDERS}")
    if order == "largest-first":
        degrees = graph.outdegrees[members]
        # stable sort so equal-degree candidates keep ascending-id order
        return members[np.argsort(-degrees, kind="stable")]
    return rng.permutation(members)


def select_by_budget(
    graph: SocialGraph,
    population: Population,
    tier: int,
    rho: float,
    rng: np.random.Generator,
    order: str = "random",
) -> InfluencerSet:
    """Fill a tier seed set greedily under a total hiring budget.

    Candidates are visited in uniform random order (or largest-first);
    each is hired if it still fits under ``rho``, otherwise skipped. The
    scan ends when no affordable candidate remains, so the returned cost
    never exceeds the budget. ``rho = math.inf`` selects the whole tier.

    Raises
    ------
    ValueError
        If the tier has no members, or the budget cannot afford even the
        cheapest member ("budget too small").
    """
    if not rho > 0:
        raise ValueError(f"budget must be positive, got {rho}")
    candidates = population.tier_members(tier)
    if candidates.size == 0:
        raise ValueError(f"tier {tier} has no members")
    if math.isinf(rho):
        return _build_set(graph, population, tier, list(candidates))

    chosen: list[int] = []
    total = 0.0
    for v in _candidate_order(graph, candidates, order, rng):
        price = float(population.hiring_cost[v])
        if total + price <= rho:
            chosen.append(int(v))
            total += price
    if not chosen:
        cheapest = float(population.hiring_cost[candidates].min())
        raise ValueError(
            f"budget too small: cheapest tier-{tier} member costs "
            f"{cheapest}, budget is {rho}"
        )
    return _build_set(graph, population, tier, chosen)


def select_by_unique_followers(
    graph: SocialGraph,
    population: Population,
    tier: int,
    target: int,
    tolerance: float,
    rng: np.random.Generator,
    order: str = "random",
) -> InfluencerSet:
    """Grow a tier seed set until its distinct-follower count hits a target.

    Members are added one at a time in uniform random order (or
    largest-first) until the union of their follower sets, members
    excluded, reaches ``target * (1 - tolerance)``. The last addition may
    overshoot the target; the achieved count is reported on the result.

    Raises
    ------
    ValueError
        If the tier has no members, or runs out of members before the
        lower tolerance bound is reached.
    """
    if target <= 0:
        raise ValueError(f"target must be positive, got {target}")
    if not 0.0 <= tolerance < 1.0:
        raise ValueError(f"tolerance must be in [0, 1), got {tolerance}")
    candidates = population.tier_members(tier)
    if candidates.size == 0:
        raise ValueError(f"tier {tier} has no members")

    floor = target * (1.0 - tolerance)
    seen = np.zeros(graph.vertex_count, dtype=bool)
    is_member = np.zeros(graph.vertex_count, dtype=bool)
    chosen: list[int] = []
    for v in _candidate_order(graph, candidates, order, rng):
        chosen.append(int(v))
        is_member[v] = True
        seen[graph.indices[graph.indptr[v] : graph.indptr[v + 1]]] = True
        covered = int(np.count_nonzero(seen & ~is_member))
        if covered >= floor:
            return _build_set(graph, population, tier, chosen)
    covered = int(np.count_nonzero(seen & ~is_member))
    raise ValueError(
        f"tier {tier} exhausted at {covered} unique followers; "
        f"needed at least {floor:.1f} (target {target}, tolerance {tolerance})"
    )

"""Campaign propagation: scalar decision rules and the BFS driver.

A campaign starts from a set of hired seed vertices. Influence travels
along follow edges in breadth-first order; each exposed follower decides
at most once whether to buy, and buyers re-broadcast one hop further with
quadratically attenuated influence. Two engines implement the same
process: a plain-Python reference (the readable semantics, built from the
scalar rules below) and a numba kernel (_kernel.propagate) that consumes
an identical uniform-draw sequence, so both produce bit-equal results for
the same kernel seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from influsim.graph import SocialGraph
from influsim.population import Population, ScenarioConfig
from influsim.seeding import spawn_kernel_seed

__all__ = [
    "CampaignResult",
    "apply_engagement",
    "attenuation",
    "propagate_interest",
    "purchase_probability",
    "run_campaign",
]

_ENGINES = ("compiled", "reference")


def attenuation(depth: int) -> float:
    """Influence damping factor at ``depth`` hops from a seed.

    Parameters
    ----------
    depth : int
        Hop count of the exposure, counted from the seed set; the first
        wave of followers sits at depth 1.

    Returns
    -------
    float
        ``depth ** -2``, in (0, 1].
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    d = float(depth)
    return 1.0 / (d * d)


def purchase_probability(interest: float, weight: float, depth: int) -> float:
    """Probability that a follower buys on one exposure.

    The product of the follower's interest, the persuasion weight of the
    edge the exposure arrived on, and the depth attenuation. All three
    factors lie in [0, 1], so the result does too.
    """
    if not 0.0 <= interest <= 1.0:
        raise ValueError(f"interest must be in [0, 1], got {interest}")
    if not 0.0 <= weight <= 1.0:
        raise ValueError(f"weight must be in [0, 1], got {weight}")
    return interest * weight * attenuation(depth)


def apply_engagement(weight: float, engagement_pct: float, boost: float, rng) -> float:
    """Broadcaster engagement step for a single follow edge.

    With probability ``engagement_pct / 100`` the broadcaster engages the
    follower directly and the edge's persuasion weight rises by ``boost``,
    clamped to 1. Consumes exactly one uniform draw from ``rng``.
    """
    if rng.random() < engagement_pct / 100.0:
        return min(1.0, weight + boost)
    return weight


def propagate_interest(
    follower_interest: float, weight: float, bought: bool, gamma: float, rng
) -> float:
    """Word-of-mouth update a deciding agent applies to one of its followers.

    A buyer always lifts the follower's interest to
    ``min(1, interest + weight * interest)`` and consumes no randomness. A
    non-buyer consumes one uniform draw and, with probability ``gamma``,
    depresses it to ``interest - weight * interest``.
    """
    if bought:
        return min(1.0, follower_interest + weight * follower_interest)
    if rng.random() < gamma:
        return follower_interest - weight * follower_interest
    return follower_interest


@dataclass(frozen=True, eq=False)
class CampaignResult:
    """Outcome of a single campaign run.

    Attributes
    ----------
    buyers : int
        Number of non-seed agents that purchased.
    buyer_ids : numpy.ndarray
        Ids of those agents in purchase order.
    reach : int
        Distinct non-seed agents exposed at least once.
    seed_hiring_cost : float
        Total price paid to hire the seed set.
    depth_histogram : dict[int, int]
        Buyer count per hop depth (seeds at depth 0 are excluded).
    steps : int
        Total vertices processed by the BFS, seeds included.
    seeds : numpy.ndarray
        The seed set, sorted ascending.
    """

    buyers: int
    buyer_ids: np.ndarray
    reach: int
    seed_hiring_cost: float
    depth_histogram: dict[int, int]
    steps: int
    seeds: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CampaignResult):
            return NotImplemented
        return (
            self.buyers == other.buyers
            and self.reach == other.reach
            and self.seed_hiring_cost == other.seed_hiring_cost
            and self.depth_histogram == other.depth_histogram
            and self.steps == other.steps
            and np.array_equal(self.buyer_ids, other.buyer_ids)
            and np.array_equal(self.seeds, other.seeds)
        )

    def to_json(self) -> str:
        payload: Mapping[str, object] = {
            "buyers": self.buyers,
            "reach": self.reach,
            "seed_hiring_cost": self.seed_hiring_cost,
            "depth_histogram": {str(k): v for k, v in sorted(self.depth_histogram.items())},
            "steps": self.steps,
            "seeds": [int(s) for s in self.seeds],
        }
        return json.dumps(payload, sort_keys=True)


def _propagate_reference(
    indptr: np.ndarray,
    indices: np.ndarray,
    weights: np.ndarray,
    interest: np.ndarray,
    willing: np.ndarray,
    bought: np.ndarray,
    exposed: np.ndarray,
    engagement_pct: np.ndarray,
    active_prob: float,
    gamma: float,
    boost: float,
    seeds: np.ndarray,
    kernel_seed: int,
) -> tuple[list[int], list[int]]:
    # Same draw order as _kernel.propagate; RandomState and numba's in-jit
    # np.random emit identical MT19937 streams for equal seeds.
    rnd = np.random.RandomState(kernel_seed)
    queue: list[int] = [int(s) for s in seeds]
    depths: list[int] = [0] * len(queue)
    head = 0
    while head < len(queue):
        x = queue[head]
        depth = depths[head]
        head += 1
        for e in range(indptr[x], indptr[x + 1]):
            f = int(indices[e])
            weights[e] = apply_engagement(weights[e], engagement_pct[x], boost, rnd)
            exposed[f] = True
            active = rnd.random() < active_prob
            if active and willing[f] and not bought[f]:
                p = purchase_probability(interest[f], weights[e], depth + 1)
                buy = rnd.random() < p
                for e2 in range(indptr[f], indptr[f + 1]):
                    g = int(indices[e2])
                    interest[g] = propagate_interest(
                        interest[g], weights[e2], buy, gamma, rnd
                    )
                if buy:
                    bought[f] = True
                    queue.append(f)
                    depths.append(depth + 1)
    return queue, depths


def run_campaign(
    graph: SocialGraph,
    population: Population,
    seeds: Iterable[int],
    config: ScenarioConfig,
    rng: np.random.Generator,
    engine: str = "compiled",
) -> CampaignResult:
    """Run one campaign from ``seeds`` and return its outcome.

    The graph's weights and the population's interests are copied before
    the run; neither input is mutated. ``rng`` supplies the single 32-bit
    seed that drives all in-run randomness, so equal inputs plus an equal
    rng state reproduce the result exactly regardless of engine.

    Parameters
    ----------
    graph : SocialGraph
        Follow graph the campaign spreads over.
    population : Population
        Agent states sized to the graph.
    seeds : iterable of int
        Hired broadcaster ids; deduplicated and sorted. Seeds never buy
        and never count toward reach.
    config : ScenarioConfig
        Scenario parameters (activeness, gamma, engagement boost).
    rng : numpy.random.Generator
        Source for the kernel seed; advanced by exactly one draw.
    engine : str
        "compiled" (numba kernel) or "reference" (pure Python).
    """
    if engine not in _ENGINES:
        raise ValueError(f"unknown engine {engine!r}; expected one of {_ENGINES}")
    if population.size != graph.vertex_count:
        raise ValueError(
            f"population size {population.size} does not match "
            f"graph vertex count {graph.vertex_count}"
        )
    seed_arr = np.unique(np.asarray(list(seeds), dtype=np.int64))
    if seed_arr.size == 0:
        raise ValueError("seed set is empty")
    if seed_arr[0] < 0 or seed_arr[-1] >= graph.vertex_count:
        raise ValueError(
            f"seed ids must be in [0, {graph.vertex_count}), "
            f"got range [{seed_arr[0]}, {seed_arr[-1]}]"
        )

    n = graph.vertex_count
    weights = graph.weights.copy()
    interest = population.interest.copy()
    willing = population.willing.copy()
    bought = np.zeros(n, dtype=np.bool_)
    exposed = np.zeros(n, dtype=np.bool_)
    bought[seed_arr] = True
    seeds32 = seed_arr.astype(np.int32)

    kernel_seed = spawn_kernel_seed(rng)
    if engine == "compiled":
        from influsim import _kernel

        queue, depth_arr, tail = _kernel.propagate(
            graph.indptr,
            graph.indices,
            weights,
            interest,
            willing,
            bought,
            exposed,
            population.engagement_rate,
            population.active_prob,
            config.gamma,
            config.c,
            seeds32,
            kernel_seed,
        )
        buyer_ids = queue[seed_arr.size : tail].copy()
        buyer_depths = depth_arr[seed_arr.size : tail]
        steps = int(tail)
    else:
        queue_list, depth_list = _propagate_reference(
            graph.indptr,
            graph.indices,
            weights,
            interest,
            willing,
            bought,
            exposed,
            population.engagement_rate,
            population.active_prob,
            config.gamma,
            config.c,
            seeds32,
            kernel_seed,
        )
        buyer_ids = np.asarray(queue_list[seed_arr.size :], dtype=np.int32)
        buyer_depths = np.asarray(depth_list[seed_arr.size :], dtype=np.int32)
        steps = len(queue_list)

    exposed[seed_arr] = False
    reach = int(np.count_nonzero(exposed))
    hist_depths, hist_counts = np.unique(buyer_depths, return_counts=True)
    depth_histogram = {int(d): int(c) for d, c in zip(hist_depths, hist_counts)}
    eta = float(population.hiring_cost[seed_arr].sum())
    return CampaignResult(
        buyers=int(buyer_ids.size),
        buyer_ids=buyer_ids,
        reach=reach,
        seed_hiring_cost=eta,
        depth_histogram=depth_histogram,
        steps=steps,
        seeds=seed_arr,
    )

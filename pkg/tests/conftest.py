"""Shared fixtures: synthetic graphs with known tier structure."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np
import pytest

from influsim.graph import SocialGraph
from influsim.population import Population, ScenarioConfig

# Outdegree plan guaranteeing members in every tier (max outdegree 100,
# so normalized outdegree equals outdegree) with enough combined follower
# coverage per tier for unique-follower selection up to the maximum.
TIER_DEGREE_PLAN = (
    [100, 95, 92],
    [85, 70, 60, 55],
    [45, 40, 35, 30, 28],
    [22, 20, 18, 16, 14, 13, 12, 12, 12, 12],
    [11, 11, 10, 10, 9, 9, 8, 8, 8, 7, 7, 7, 6, 6, 6, 6, 6, 6, 6, 6],
)


def build_tiered_edges(n: int = 400, seed: int = 42) -> list[tuple[int, int]]:
    """Directed edges over n vertices with outdegrees spanning all tiers."""
    rng = np.random.default_rng(seed)
    planned = [d for tier in TIER_DEGREE_PLAN for d in tier]
    edges = []
    for v in range(n):
        deg = planned[v] if v < len(planned) else int(rng.integers(1, 6))
        targets = rng.choice(n - 1, size=deg, replace=False)
        for t in targets:
            edges.append((v, int(t) if t < v else int(t) + 1))
    return edges


@pytest.fixture(scope="session")
def tiered_graph() -> SocialGraph:
    edges = build_tiered_edges()
    return SocialGraph.from_edges(400, edges, rng=np.random.default_rng(7))


@pytest.fixture()
def path3_graph() -> SocialGraph:
    indptr = np.array([0, 1, 2, 2], dtype=np.int64)
    indices = np.array([1, 2], dtype=np.int32)
    return SocialGraph(indptr, indices, np.array([1.0, 1.0]))


def forced_config() -> ScenarioConfig:
    """Scenario with every random gate forced: only purchase draws matter."""
    return ScenarioConfig(
        mu=1.0, sigma=0.0, omega=1.0, activeness=1.0, gamma=0.0, c=0.0
    )


def manual_population(
    graph: SocialGraph,
    interest: np.ndarray,
    active_prob: float = 1.0,
    engagement_rate: np.ndarray | None = None,
) -> Population:
    """Population with chosen interests, everyone willing, no engagement."""
    n = graph.vertex_count
    return Population(
        interest=np.asarray(interest, dtype=np.float64),
        willing=np.ones(n, dtype=bool),
        tier=np.ones(n, dtype=np.int8),
        engagement_rate=(
            np.zeros(n) if engagement_rate is None else np.asarray(engagement_rate, float)
        ),
        hiring_cost=0.01 * graph.outdegrees.astype(np.float64),
        active_prob=active_prob,
    )


def twitter_edges_path() -> Path | None:
    """Locate the SNAP ego-Twitter combined edge list, if present."""
    env = os.environ.get("INFLUSIM_TWITTER_EDGES")
    candidates = [Path(env)] if env else []
    candidates.append(Path(__file__).resolve().parent.parent / "data" / "twitter_combined.txt")
    for cand in candidates:
        if cand.is_file():
            return cand
    return None

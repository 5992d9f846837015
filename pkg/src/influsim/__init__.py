"""Agent-based simulator for influencer marketing campaigns on social graphs."""

__version__ = "0.1.0"

from influsim.campaign import CampaignResult, run_campaign
from influsim.graph import GraphStats, SocialGraph, generate_small_world, load_edge_list
from influsim.metrics import CampaignMetrics, aggregate
from influsim.population import Population, ScenarioConfig, init_population
from influsim.selection import InfluencerSet, select_by_budget, select_by_unique_followers

__all__ = [
    "CampaignMetrics",
    "CampaignResult",
    "GraphStats",
    "InfluencerSet",
    "Population",
    "ScenarioConfig",
    "SocialGraph",
    "aggregate",
    "generate_small_world",
    "init_population",
    "load_edge_list",
    "run_campaign",
    "select_by_budget",
    "select_by_unique_followers",
]

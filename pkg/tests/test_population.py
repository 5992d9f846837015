"""Scenario config validation, interest sampling, tiers, and hiring costs."""

import json

import numpy as np
import pytest
from scipy import stats

from influsim.graph import SocialGraph
from influsim.population import (
    ScenarioConfig,
    TIER_ENGAGEMENT_PCT,
    assign_tier,
    hiring_cost,
    init_population,
    sample_truncated_interest,
)


class TestScenarioConfig:
    def test_defaults(self):
        cfg = ScenarioConfig()
        assert (cfg.mu, cfg.sigma, cfg.omega) == (0.5, 0.2, 0.5)
        assert (cfg.activeness, cfg.gamma, cfg.c) == (0.9, 0.01, 0.7)
        assert (cfg.rho, cfg.trials, cfg.master_seed) == (68.0, 10, 0)

    def test_all_problems_reported_at_once(self):
        with pytest.raises(ValueError) as err:
            ScenarioConfig(mu=0.0, omega=1.5, gamma=-0.2, trials=0)
        msg = str(err.value)
        for field in ("mu", "omega", "gamma", "trials"):
            assert field in msg

    def test_unknown_fields_listed(self):
        with pytest.raises(ValueError, match="lambda_0.*omega_max"):
            ScenarioConfig.from_dict({"lambda_0": 1, "omega_max": 2})

    def test_json_round_trip(self):
        cfg = ScenarioConfig(mu=0.7, omega=0.2, trials=3)
        again = ScenarioConfig.from_json(json.dumps(cfg.to_dict()))
        assert again == cfg

    def test_json_must_be_object(self):
        with pytest.raises(ValueError, match="object"):
            ScenarioConfig.from_json("[1, 2]")

    def test_overrides_ignore_none(self):
        cfg = ScenarioConfig().with_overrides(mu=None, omega=0.25)
        assert cfg.mu == 0.5
        assert cfg.omega == 0.25

    def test_override_validation(self):
        with pytest.raises(ValueError, match="rho"):
            ScenarioConfig().with_overrides(rho=-1.0)


class TestTruncatedInterest:
    def test_sigma_zero_returns_mu(self):
        rng = np.random.default_rng(0)
        assert sample_truncated_interest(0.37, 0.0, rng) == 0.37

    def test_range(self):
        rng = np.random.default_rng(1)
        draws = [sample_truncated_interest(0.5, 0.8, rng) for _ in range(500)]
        assert all(0.0 <= d <= 1.0 for d in draws)

    def test_parameter_validation(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_truncated_interest(0.0, 0.2, rng)
        with pytest.raises(ValueError):
            sample_truncated_interest(0.5, -0.1, rng)

    def test_matches_truncated_normal_distribution(self):
        # Rejection sampling must reproduce Normal(mu, sigma) conditioned
        # on [0, 1]; compare against the analytic distribution.
        mu, sigma = 0.3, 0.4
        rng = np.random.default_rng(1234)
        dist = stats.truncnorm((0 - mu) / sigma, (1 - mu) / sigma, loc=mu, scale=sigma)
        draws = np.fromiter(
            (sample_truncated_interest(mu, sigma, rng) for _ in range(20_000)),
            dtype=np.float64,
        )
        assert abs(draws.mean() - dist.mean()) < 4 * dist.std() / np.sqrt(draws.size)
        ks = stats.kstest(draws, dist.cdf)
        assert ks.pvalue > 1e-3

    def test_batch_matches_scalar_distribution(self):
        from influsim.population import _sample_truncated_interest_batch

        mu, sigma = 0.8, 0.5
        batch = _sample_truncated_interest_batch(
            mu, sigma, 200_000, np.random.default_rng(5)
        )
        assert batch.min() >= 0.0 and batch.max() <= 1.0
        dist = stats.truncnorm((0 - mu) / sigma, (1 - mu) / sigma, loc=mu, scale=sigma)
        assert abs(batch.mean() - dist.mean()) < 4 * dist.std() / np.sqrt(batch.size)
        assert stats.kstest(batch, dist.cdf).pvalue > 1e-3


class TestTierTable:
    # (normalized outdegree, tier, engagement %) for every range boundary
    BOUNDARY_CASES = [
        (100.0, 1, 1.0),
        (90.0, 1, 1.0),
        (50.0, 2, 5.0),
        (25.0, 3, 12.0),
        (12.0, 4, 18.0),
        (6.0, 5, 25.0),
        (0.0, 6, 30.0),
    ]

    @pytest.mark.parametrize("nu,tier,eps", BOUNDARY_CASES)
    def test_lower_boundaries(self, nu, tier, eps):
        assert assign_tier(nu) == (tier, eps)

    @pytest.mark.parametrize(
        "upper,tier_below",
        [(90.0, 2), (50.0, 3), (25.0, 4), (12.0, 5), (6.0, 6)],
    )
    def test_exclusive_upper_boundaries(self, upper, tier_below):
        just_below = np.nextafter(upper, 0.0)
        tier, eps = assign_tier(just_below)
        assert tier == tier_below
        assert eps == TIER_ENGAGEMENT_PCT[tier - 1]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            assign_tier(-0.1)
        with pytest.raises(ValueError):
            assign_tier(100.1)

    def test_scalar_matches_vectorized(self, tiered_graph):
        pop = init_population(
            tiered_graph, ScenarioConfig(), np.random.default_rng(0)
        )
        nu = 100.0 * tiered_graph.outdegrees / tiered_graph.max_outdegree
        for v in range(0, tiered_graph.vertex_count, 7):
            tier, eps = assign_tier(float(nu[v]))
            assert pop.tier[v] == tier
            assert pop.engagement_rate[v] == eps


class TestHiringCost:
    def test_paper_value(self):
        assert hiring_cost(3383) == 33.83

    def test_zero(self):
        assert hiring_cost(0) == 0.0

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            hiring_cost(-1)


class TestInitPopulation:
    def test_all_tiers_present(self, tiered_graph):
        pop = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(3))
        for tier in range(1, 7):
            assert pop.tier_members(tier).size > 0, tier

    def test_willing_fraction_tracks_omega(self, tiered_graph):
        pop = init_population(
            tiered_graph, ScenarioConfig(omega=0.3), np.random.default_rng(4)
        )
        frac = pop.willing.mean()
        assert 0.2 < frac < 0.4

    def test_omega_one_everyone_willing(self, tiered_graph):
        pop = init_population(
            tiered_graph, ScenarioConfig(omega=1.0), np.random.default_rng(4)
        )
        assert pop.willing.all()

    def test_omega_zero_nobody_willing(self, tiered_graph):
        pop = init_population(
            tiered_graph, ScenarioConfig(omega=0.0), np.random.default_rng(4)
        )
        assert not pop.willing.any()

    def test_flags_start_clear(self, tiered_graph):
        pop = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(5))
        assert not pop.bought.any()
        assert not pop.exposed.any()

    def test_hiring_cost_matches_outdegree(self, tiered_graph):
        pop = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(6))
        assert np.allclose(pop.hiring_cost, 0.01 * tiered_graph.outdegrees)

    def test_deterministic_per_rng_seed(self, tiered_graph):
        a = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(8))
        b = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(8))
        assert np.array_equal(a.interest, b.interest)
        assert np.array_equal(a.willing, b.willing)

    def test_degenerate_graph_rejected(self):
        g = SocialGraph(np.array([0, 0]), np.array([], dtype=np.int32), np.array([]))
        with pytest.raises(ValueError, match="degenerate"):
            init_population(g, ScenarioConfig(), np.random.default_rng(0))

    def test_agent_view(self, tiered_graph):
        pop = init_population(tiered_graph, ScenarioConfig(), np.random.default_rng(9))
        agent = pop.agent(0)
        assert agent.tier == 1
        assert agent.hiring_cost == 1.0
        assert not agent.bought
        with pytest.raises(ValueError):
            pop.agent(400)

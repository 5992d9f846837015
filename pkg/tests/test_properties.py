"""Property-based invariants over randomized graphs, configs, and inputs.

Each property encodes a structural guarantee the simulator must keep for
every input, not a value pinned to a particular scenario: probabilities
stay in [0, 1], campaigns never mutate shared state, conservation laws
hold between buyers, reach, and depth counts.
"""

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from influsim.campaign import (
    apply_engagement,
    attenuation,
    propagate_interest,
    purchase_probability,
    run_campaign,
)
from influsim.graph import SocialGraph, generate_small_world
from influsim.population import (
    ScenarioConfig,
    assign_tier,
    init_population,
    sample_truncated_interest,
)

probs = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)
depths = st.integers(min_value=1, max_value=60)

DEFAULTS = settings(max_examples=50, deadline=None)
SLOW = settings(
    max_examples=25,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)


@st.composite
def random_graphs(draw):
    """Small digraph as (n, edges) with at least one edge, no self loops."""
    n = draw(st.integers(min_value=2, max_value=18))
    m = draw(st.integers(min_value=1, max_value=40))
    seed = draw(st.integers(min_value=0, max_value=2**31))
    rng = np.random.default_rng(seed)
    src = rng.integers(0, n, size=m)
    dst = rng.integers(0, n - 1, size=m)
    dst = np.where(dst >= src, dst + 1, dst)  # shift past the diagonal
    return n, np.column_stack([src, dst])


@st.composite
def scenario_configs(draw):
    return ScenarioConfig(
        mu=draw(st.floats(min_value=0.05, max_value=1.0)),
        sigma=draw(st.floats(min_value=0.0, max_value=0.6)),
        omega=draw(probs),
        activeness=draw(probs),
        gamma=draw(st.floats(min_value=0.0, max_value=0.5)),
        c=draw(probs),
        trials=1,
        master_seed=draw(st.integers(min_value=0, max_value=2**31)),
    )


class TestScalarRules:
    @given(probs, probs, depths)
    @DEFAULTS
    def test_purchase_probability_in_unit_interval(self, interest, weight, depth):
        p = purchase_probability(interest, weight, depth)
        assert 0.0 <= p <= 1.0

    @given(depths)
    @DEFAULTS
    def test_attenuation_bounded_and_decreasing(self, depth):
        a = attenuation(depth)
        assert 0.0 < a <= 1.0
        assert attenuation(depth + 1) < a

    @given(probs, st.floats(min_value=0.0, max_value=100.0), probs,
           st.integers(min_value=0, max_value=2**31))
    @DEFAULTS
    def test_engagement_keeps_weight_in_unit_interval(self, weight, pct, boost, seed):
        rng = np.random.default_rng(seed)
        out = apply_engagement(weight, pct, boost, rng)
        assert 0.0 <= out <= 1.0
        assert out >= weight or out == 1.0

    @given(probs, probs, st.booleans(), probs, st.integers(min_value=0, max_value=2**31))
    @DEFAULTS
    def test_interest_update_stays_in_unit_interval(
        self, interest, weight, bought, gamma, seed
    ):
        rng = np.random.default_rng(seed)
        out = propagate_interest(interest, weight, bought, gamma, rng)
        assert 0.0 <= out <= 1.0
        if bought:
            assert out >= interest
        else:
            assert out <= interest


class TestSampling:
    @given(st.floats(min_value=0.01, max_value=1.0),
           st.floats(min_value=0.0, max_value=1.0),
           st.integers(min_value=0, max_value=2**31))
    @DEFAULTS
    def test_interest_sample_in_unit_interval(self, mu, sigma, seed):
        val = sample_truncated_interest(mu, sigma, np.random.default_rng(seed))
        assert 0.0 <= val <= 1.0

    @given(st.floats(min_value=0.0, max_value=100.0, allow_nan=False))
    @DEFAULTS
    def test_tier_table_total(self, nu):
        tier, pct = assign_tier(nu)
        assert tier in (1, 2, 3, 4, 5, 6)
        assert pct in (1.0, 5.0, 12.0, 18.0, 25.0, 30.0)
        # higher reach never lands in a cheaper-engagement tier
        tier_hi, _ = assign_tier(min(100.0, nu + 5.0))
        assert tier_hi <= tier


class TestPopulationInvariants:
    @given(random_graphs(), scenario_configs())
    @SLOW
    def test_population_fields_bounded(self, graph_spec, cfg):
        n, edges = graph_spec
        graph = SocialGraph.from_edges(n, edges, rng=np.random.default_rng(1))
        pop = init_population(graph, cfg, np.random.default_rng(cfg.master_seed))
        assert pop.size == n
        assert np.all((pop.interest >= 0.0) & (pop.interest <= 1.0))
        assert np.all((pop.tier >= 1) & (pop.tier <= 6))
        assert np.all(pop.hiring_cost == 0.01 * graph.outdegrees)
        if cfg.omega >= 1.0:
            assert pop.willing.all()


class TestCampaignInvariants:
    @given(random_graphs(), scenario_configs(), st.integers(min_value=0, max_value=2**31))
    @SLOW
    def test_conservation_laws(self, graph_spec, cfg, seed):
        n, edges = graph_spec
        graph = SocialGraph.from_edges(n, edges, rng=np.random.default_rng(2))
        pop = init_population(graph, cfg, np.random.default_rng(cfg.master_seed))
        rng = np.random.default_rng(seed)
        k = int(rng.integers(1, n + 1))
        seeds = rng.choice(n, size=k, replace=False)

        weights_before = graph.weights.copy()
        interest_before = pop.interest.copy()
        result = run_campaign(graph, pop, seeds, cfg, np.random.default_rng(seed))

        assert result.buyers == len(result.buyer_ids)
        assert len(set(result.buyer_ids.tolist())) == result.buyers
        assert not set(result.buyer_ids.tolist()) & set(seeds.tolist())
        assert 0 <= result.buyers <= result.reach <= n - k
        # one dequeue per enqueued vertex: the seeds plus every buyer
        assert result.steps == result.seeds.size + result.buyers
        assert sum(result.depth_histogram.values()) == result.buyers
        assert all(d >= 1 for d in result.depth_histogram)
        assert result.seed_hiring_cost == pytest.approx(
            float(pop.hiring_cost[np.unique(seeds)].sum())
        )
        # shared inputs must come back untouched
        assert np.array_equal(graph.weights, weights_before)
        assert np.array_equal(pop.interest, interest_before)

    @given(random_graphs(), scenario_configs(), st.integers(min_value=0, max_value=2**31))
    @SLOW
    def test_engines_agree_everywhere(self, graph_spec, cfg, seed):
        n, edges = graph_spec
        graph = SocialGraph.from_edges(n, edges, rng=np.random.default_rng(3))
        pop = init_population(graph, cfg, np.random.default_rng(cfg.master_seed))
        seeds = [int(np.random.default_rng(seed).integers(0, n))]
        compiled = run_campaign(
            graph, pop, seeds, cfg, np.random.default_rng(seed), engine="compiled"
        )
        reference = run_campaign(
            graph, pop, seeds, cfg, np.random.default_rng(seed), engine="reference"
        )
        assert compiled == reference


class TestGraphInvariants:
    @given(st.integers(min_value=6, max_value=40),
           st.integers(min_value=1, max_value=4),
           st.floats(min_value=0.0, max_value=1.0),
           st.integers(min_value=0, max_value=2**31))
    @SLOW
    def test_small_world_preserves_edge_count(self, n, half_k, p, seed):
        k = 2 * half_k
        if k >= n:
            k = (n - 1) // 2 * 2
            if k < 2:
                return
        graph = generate_small_world(
            n, k, p, orientation="both-directions", rng=np.random.default_rng(seed)
        )
        assert graph.edge_count == n * k
        assert graph.self_loops_skipped == 0
        # no duplicate directed edges
        keys = graph_keys(graph)
        assert np.unique(keys).size == keys.size

    @given(random_graphs())
    @SLOW
    def test_from_edges_round_trip(self, graph_spec):
        n, edges = graph_spec
        graph = SocialGraph.from_edges(n, edges, rng=np.random.default_rng(4))
        expected = {(int(a), int(b)) for a, b in edges}
        got = set()
        for v in range(n):
            for f in graph.followers(v):
                got.add((v, int(f)))
        assert got == expected

    @given(scenario_configs())
    @DEFAULTS
    def test_config_dict_round_trip(self, cfg):
        assert ScenarioConfig.from_dict(cfg.to_dict()) == cfg


def graph_keys(graph: SocialGraph) -> np.ndarray:
    src = np.repeat(np.arange(graph.vertex_count, dtype=np.int64),
                    np.diff(graph.indptr))
    return src * graph.vertex_count + graph.indices

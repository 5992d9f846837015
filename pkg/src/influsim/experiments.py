"""Experiment families built on the campaign engine.

Four families: individual validation (one influencer per tier), set
validation (constant unique-follower sets per tier), situational
comparisons (budget-capped sets per tier, fixed scenario), and the
(mu, omega) parametric sweep comparing tier 1 against tier 6.

Every unit of work derives its own rng from the master seed plus a token
path (family, role, cell, tier, trial), so results are identical whatever
the execution order or the number of worker processes. Populations are
re-drawn per trial with tier-independent tokens, which pairs the tiers
within a trial on the same agents. Seed sets are selected once per
family (or per sweep cell) and held fixed across trials.

Parallel execution relies on the POSIX fork start method so workers
inherit the graph without pickling it.
"""

from __future__ import annotations

import csv
import multiprocessing
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from influsim.campaign import CampaignResult, run_campaign
from influsim.graph import SocialGraph
from influsim.metrics import (
    AggregateMetrics,
    CampaignMetrics,
    METRICS_CSV_COLUMNS,
    aggregate,
    metrics_csv_row,
)
from influsim.population import Population, ScenarioConfig, init_population
from influsim.seeding import derive_rng
from influsim.selection import InfluencerSet, select_by_budget, select_by_unique_followers

__all__ = [
    "STATUS_BOTH",
    "STATUS_NO_TIER1",
    "STATUS_NO_TIER6",
    "STATUS_OK",
    "IndividualTierOutcome",
    "IndividualValidationResult",
    "SetTierOutcome",
    "SetValidationResult",
    "SituationalResult",
    "SituationalTierOutcome",
    "SweepCell",
    "SweepGrid",
    "TIERS",
    "default_mu_axis",
    "default_omega_axis",
    "load_sweep_csv",
    "run_individual_validation",
    "run_set_validation",
    "run_situational",
    "run_sweep",
    "write_individual_csv",
    "write_sets_csv",
    "write_situational_csv",
    "write_sweep_csv",
]

TIERS = (1, 2, 3, 4, 5, 6)

STATUS_OK = "ok"
STATUS_NO_TIER1 = "no-customers-tier1"
STATUS_NO_TIER6 = "no-customers-tier6"
STATUS_BOTH = "both"
_STATUSES = (STATUS_OK, STATUS_NO_TIER1, STATUS_NO_TIER6, STATUS_BOTH)

SWEEP_CSV_COLUMNS = ("mu", "omega", "delta_cac", "delta_cr", "status")


def default_mu_axis() -> list[float]:
    """Mean-interest axis 0.1 to 1.0 in steps of 0.1."""
    return [float(v) for v in np.round(np.arange(1, 11) * 0.1, 2)]


def default_omega_axis() -> list[float]:
    """Willingness axis 0.05 to 1.0 in steps of 0.05."""
    return [float(v) for v in np.round(np.arange(1, 21) * 0.05, 2)]


# ---------------------------------------------------------------------------
# deterministic parallel map

_FORKED_FN: Optional[Callable] = None


def _call_forked(unit):
    return _FORKED_FN(unit)


def _parallel_map(fn: Callable, units: Sequence, jobs: int) -> list:
    """Map fn over units, preserving order; fork-based when jobs > 1."""
    if jobs <= 1 or len(units) <= 1:
        return [fn(u) for u in units]
    global _FORKED_FN
    _FORKED_FN = fn
    try:
        ctx = multiprocessing.get_context("fork")
        chunk = max(1, len(units) // (jobs * 4))
        with ProcessPoolExecutor(max_workers=jobs, mp_context=ctx) as pool:
            return list(pool.map(_call_forked, units, chunksize=chunk))
    finally:
        _FORKED_FN = None


def _warm_engine() -> None:
    """Compile the campaign kernel before forking workers."""
    indptr = np.array([0, 1, 1], dtype=np.int64)
    indices = np.array([1], dtype=np.int32)
    weights = np.array([0.5], dtype=np.float64)
    graph = SocialGraph(indptr, indices, weights)
    cfg = ScenarioConfig()
    pop = init_population(graph, cfg, np.random.default_rng(0))
    run_campaign(graph, pop, [0], cfg, np.random.default_rng(0), engine="compiled")


def _census(graph: SocialGraph, config: ScenarioConfig, family: str) -> Population:
    # Selection reads only the deterministic tier and cost arrays, so any
    # population over this graph serves; one draw per family keeps tokens tidy.
    return init_population(
        graph, config, derive_rng(config.master_seed, family, "census")
    )


def _require_all_tiers(population: Population) -> None:
    missing = [t for t in TIERS if population.tier_members(t).size == 0]
    if missing:
        raise ValueError(f"graph is missing tiers {missing}; all six are required")


# ---------------------------------------------------------------------------
# individual validation


@dataclass(frozen=True)
class IndividualTierOutcome:
    """One randomly chosen influencer of a tier and its trial outcomes."""

    tier: int
    member: int
    buyers_per_trial: tuple[int, ...]
    mean_buyers: float
    var_buyers: float


@dataclass(frozen=True)
class IndividualValidationResult:
    config: ScenarioConfig
    trials: int
    tiers: tuple[IndividualTierOutcome, ...]

    def mean_buyers(self, tier: int) -> float:
        for row in self.tiers:
            if row.tier == tier:
                return row.mean_buyers
        raise KeyError(tier)


def run_individual_validation(
    graph: SocialGraph,
    config: ScenarioConfig,
    trials: Optional[int] = None,
    jobs: int = 1,
    engine: str = "compiled",
) -> IndividualValidationResult:
    """Seed one random influencer per tier and average buyers over trials."""
    trials = config.trials if trials is None else trials
    master = config.master_seed
    census = _census(graph, config, "individual")
    _require_all_tiers(census)
    members = {
        tier: int(
            derive_rng(master, "individual", "select", tier).choice(
                census.tier_members(tier)
            )
        )
        for tier in TIERS
    }

    def unit(args: tuple[int, int]) -> int:
        tier, trial = args
        pop = init_population(
            graph, config, derive_rng(master, "individual", "pop", trial)
        )
        res = run_campaign(
            graph,
            pop,
            [members[tier]],
            config,
            derive_rng(master, "individual", "campaign", tier, trial),
            engine=engine,
        )
        return res.buyers

    units = [(tier, trial) for tier in TIERS for trial in range(trials)]
    if jobs > 1 and engine == "compiled":
        _warm_engine()
    counts = _parallel_map(unit, units, jobs)

    outcomes = []
    for i, tier in enumerate(TIERS):
        per_trial = tuple(counts[i * trials : (i + 1) * trials])
        arr = np.asarray(per_trial, dtype=np.float64)
        outcomes.append(
            IndividualTierOutcome(
                tier=tier,
                member=members[tier],
                buyers_per_trial=per_trial,
                mean_buyers=float(arr.mean()),
                var_buyers=float(arr.var()),
            )
        )
    return IndividualValidationResult(
        config=config, trials=trials, tiers=tuple(outcomes)
    )


# ---------------------------------------------------------------------------
# set validation


@dataclass(frozen=True)
class SetTierOutcome:
    """A constant-unique-follower seed set of a tier and its trial outcomes."""

    tier: int
    seed_set: InfluencerSet
    buyers_per_trial: tuple[int, ...]
    mean_buyers: float
    var_buyers: float


@dataclass(frozen=True)
class SetValidationResult:
    config: ScenarioConfig
    trials: int
    target_unique_followers: int
    tolerance: float
    tiers: tuple[SetTierOutcome, ...]


def run_set_validation(
    graph: SocialGraph,
    config: ScenarioConfig,
    target_unique_followers: Optional[int] = None,
    tolerance: float = 0.05,
    trials: Optional[int] = None,
    jobs: int = 1,
    engine: str = "compiled",
) -> SetValidationResult:
    """Build per-tier sets with equal unique-follower counts, run campaigns.

    The target defaults to the graph's maximum outdegree, the follower
    count of its single biggest influencer. Selection failures (a tier
    that cannot reach the target) propagate as ValueError.
    """
    trials = config.trials if trials is None else trials
    target = graph.max_outdegree if target_unique_followers is None else target_unique_followers
    master = config.master_seed
    census = _census(graph, config, "sets")
    _require_all_tiers(census)
    seed_sets = {
        tier: select_by_unique_followers(
            graph,
            census,
            tier,
            target,
            tolerance,
            derive_rng(master, "sets", "select", tier),
        )
        for tier in TIERS
    }

    def unit(args: tuple[int, int]) -> int:
        tier, trial = args
        pop = init_population(graph, config, derive_rng(master, "sets", "pop", trial))
        res = run_campaign(
            graph,
            pop,
            seed_sets[tier].members,
            config,
            derive_rng(master, "sets", "campaign", tier, trial),
            engine=engine,
        )
        return res.buyers

    units = [(tier, trial) for tier in TIERS for trial in range(trials)]
    if jobs > 1 and engine == "compiled":
        _warm_engine()
    counts = _parallel_map(unit, units, jobs)

    outcomes = []
    for i, tier in enumerate(TIERS):
        per_trial = tuple(counts[i * trials : (i + 1) * trials])
        arr = np.asarray(per_trial, dtype=np.float64)
        outcomes.append(
            SetTierOutcome(
                tier=tier,
                seed_set=seed_sets[tier],
                buyers_per_trial=per_trial,
                mean_buyers=float(arr.mean()),
                var_buyers=float(arr.var()),
            )
        )
    return SetValidationResult(
        config=config,
        trials=trials,
        target_unique_followers=target,
        tolerance=tolerance,
        tiers=tuple(outcomes),
    )


# ---------------------------------------------------------------------------
# situational experiments


@dataclass(frozen=True)
class SituationalTierOutcome:
    """Budget-capped seed set of one tier with aggregated economics.

    ``skipped_reason`` is set (and the other fields None) when the tier
    could not afford a single member.
    """

    tier: int
    seed_set: Optional[InfluencerSet]
    metrics: Optional[AggregateMetrics]
    skipped_reason: Optional[str]


@dataclass(frozen=True)
class SituationalResult:
    config: ScenarioConfig
    rho: float
    trials: int
    tiers: tuple[SituationalTierOutcome, ...]

    def tier_metrics(self, tier: int) -> AggregateMetrics:
        for row in self.tiers:
            if row.tier == tier:
                if row.metrics is None:
                    raise ValueError(f"tier {tier} was skipped: {row.skipped_reason}")
                return row.metrics
        raise KeyError(tier)


def run_situational(
    graph: SocialGraph,
    config: ScenarioConfig,
    omega: Optional[float] = None,
    mu: Optional[float] = None,
    rho: Optional[float] = None,
    trials: Optional[int] = None,
    jobs: int = 1,
    engine: str = "compiled",
) -> SituationalResult:
    """Budget-capped seed set per tier, acquisition and conversion stats.

    Tiers whose cheapest member exceeds the budget are reported with a
    ``skipped_reason`` instead of aborting the run.
    """
    cfg = config.with_overrides(mu=mu, omega=omega, rho=rho)
    trials = cfg.trials if trials is None else trials
    budget = cfg.rho
    master = cfg.master_seed
    census = _census(graph, cfg, "situational")
    _require_all_tiers(census)

    seed_sets: dict[int, InfluencerSet] = {}
    skipped: dict[int, str] = {}
    for tier in TIERS:
        try:
            seed_sets[tier] = select_by_budget(
                graph,
                census,
                tier,
                budget,
                derive_rng(master, "situational", "select", tier),
            )
        except ValueError as exc:
            skipped[tier] = str(exc)

    def unit(args: tuple[int, int]) -> CampaignMetrics:
        tier, trial = args
        pop = init_population(
            graph, cfg, derive_rng(master, "situational", "pop", trial)
        )
        res = run_campaign(
            graph,
            pop,
            seed_sets[tier].members,
            cfg,
            derive_rng(master, "situational", "campaign", tier, trial),
            engine=engine,
        )
        return CampaignMetrics.from_campaign(res)

    active_tiers = [t for t in TIERS if t in seed_sets]
    units = [(tier, trial) for tier in active_tiers for trial in range(trials)]
    if jobs > 1 and engine == "compiled":
        _warm_engine()
    per_unit = _parallel_map(unit, units, jobs)

    by_tier = {
        tier: per_unit[i * trials : (i + 1) * trials]
        for i, tier in enumerate(active_tiers)
    }
    outcomes = []
    for tier in TIERS:
        if tier in skipped:
            outcomes.append(
                SituationalTierOutcome(
                    tier=tier, seed_set=None, metrics=None, skipped_reason=skipped[tier]
                )
            )
        else:
            outcomes.append(
                SituationalTierOutcome(
                    tier=tier,
                    seed_set=seed_sets[tier],
                    metrics=aggregate(by_tier[tier]),
                    skipped_reason=None,
                )
            )
    return SituationalResult(
        config=cfg, rho=budget, trials=trials, tiers=tuple(outcomes)
    )


# ---------------------------------------------------------------------------
# parametric sweep


@dataclass(frozen=True)
class SweepCell:
    """Tier-1 minus tier-6 economics at one (mu, omega) point.

    Deltas are None when the corresponding side had no buyers in any
    trial; the status field records which side failed.
    """

    mu: float
    omega: float
    delta_cac: Optional[float]
    delta_cr: Optional[float]
    status: str

    def __post_init__(self) -> None:
        if self.status not in _STATUSES:
            raise ValueError(f"unknown status {self.status!r}")
        if self.status == STATUS_OK and (self.delta_cac is None or self.delta_cr is None):
            raise ValueError("ok cells must carry finite deltas")


@dataclass(frozen=True)
class SweepGrid:
    """Row-major grid of sweep cells: mu varies over rows, omega over columns."""

    mu_axis: tuple[float, ...]
    omega_axis: tuple[float, ...]
    cells: tuple[tuple[SweepCell, ...], ...]

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.mu_axis):
            raise ValueError("cell row count does not match mu axis")
        for row in self.cells:
            if len(row) != len(self.omega_axis):
                raise ValueError("cell column count does not match omega axis")

    def cell(self, mu: float, omega: float) -> SweepCell:
        i = self.mu_axis.index(mu)
        j = self.omega_axis.index(omega)
        return self.cells[i][j]

    def flat(self) -> list[SweepCell]:
        return [c for row in self.cells for c in row]


def _cell_from_aggregates(
    mu: float, omega: float, agg1: AggregateMetrics, agg6: AggregateMetrics
) -> SweepCell:
    no1 = agg1.mean_cac is None
    no6 = agg6.mean_cac is None
    if no1 and no6:
        status = STATUS_BOTH
    elif no1:
        status = STATUS_NO_TIER1
    elif no6:
        status = STATUS_NO_TIER6
    else:
        status = STATUS_OK
    delta_cac = None if (no1 or no6) else agg1.mean_cac - agg6.mean_cac
    if agg1.mean_cr is None or agg6.mean_cr is None:
        delta_cr = None
    else:
        delta_cr = agg1.mean_cr - agg6.mean_cr
    return SweepCell(
        mu=mu, omega=omega, delta_cac=delta_cac, delta_cr=delta_cr, status=status
    )


def run_sweep(
    graph: SocialGraph,
    config: ScenarioConfig,
    mu_axis: Optional[Sequence[float]] = None,
    omega_axis: Optional[Sequence[float]] = None,
    rho: Optional[float] = None,
    trials: Optional[int] = None,
    jobs: int = 1,
    engine: str = "compiled",
) -> SweepGrid:
    """Sweep (mu, omega), comparing tier-1 and tier-6 budget sets per cell.

    Each cell re-selects its seed sets, runs ``trials`` campaigns per
    tier on per-trial populations, and records the differences of mean
    acquisition cost and mean conversion ratio. Cells where a tier never
    produced a buyer carry a non-ok status instead of a delta.
    """
    mus = [float(v) for v in (default_mu_axis() if mu_axis is None else mu_axis)]
    omegas = [
        float(v) for v in (default_omega_axis() if omega_axis is None else omega_axis)
    ]
    if not mus or not omegas:
        raise ValueError("sweep axes must be non-empty")
    for v in mus:
        if not 0.0 < v <= 1.0:
            raise ValueError(f"mu axis value {v} outside (0, 1]")
    for v in omegas:
        if not 0.0 <= v <= 1.0:
            raise ValueError(f"omega axis value {v} outside [0, 1]")
    cfg = config.with_overrides(rho=rho)
    trials = cfg.trials if trials is None else trials
    budget = cfg.rho
    master = cfg.master_seed
    census = _census(graph, cfg, "sweep")
    for tier in (1, 6):
        members = census.tier_members(tier)
        if members.size == 0:
            raise ValueError(f"tier {tier} has no members")
        if float(census.hiring_cost[members].min()) > budget:
            raise ValueError(
                f"budget too small: cheapest tier-{tier} member exceeds {budget}"
            )

    def unit(args: tuple[float, float]) -> SweepCell:
        mu, omega = args
        cell_cfg = cfg.with_overrides(mu=mu, omega=omega)
        sets = {
            tier: select_by_budget(
                graph,
                census,
                tier,
                budget,
                derive_rng(master, "sweep", "select", mu, omega, tier),
            )
            for tier in (1, 6)
        }
        per_tier: dict[int, list[CampaignMetrics]] = {1: [], 6: []}
        for trial in range(trials):
            pop = init_population(
                graph, cell_cfg, derive_rng(master, "sweep", "pop", mu, omega, trial)
            )
            for tier in (1, 6):
                res = run_campaign(
                    graph,
                    pop,
                    sets[tier].members,
                    cell_cfg,
                    derive_rng(master, "sweep", "campaign", mu, omega, tier, trial),
                    engine=engine,
                )
                per_tier[tier].append(CampaignMetrics.from_campaign(res))
        return _cell_from_aggregates(
            mu, omega, aggregate(per_tier[1]), aggregate(per_tier[6])
        )

    units = [(mu, omega) for mu in mus for omega in omegas]
    if jobs > 1 and engine == "compiled":
        _warm_engine()
    flat = _parallel_map(unit, units, jobs)
    rows = tuple(
        tuple(flat[i * len(omegas) : (i + 1) * len(omegas)]) for i in range(len(mus))
    )
    return SweepGrid(mu_axis=tuple(mus), omega_axis=tuple(omegas), cells=rows)


# ---------------------------------------------------------------------------
# CSV export

def _fmt(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def write_individual_csv(result: IndividualValidationResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("tier", "member", "trials", "mean_psi", "var_psi"))
        for row in result.tiers:
            writer.writerow(
                (row.tier, row.member, result.trials, _fmt(row.mean_buyers), _fmt(row.var_buyers))
            )


def write_sets_csv(result: SetValidationResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ("tier", "n", "eta", "unique_followers", "trials", "mean_psi", "var_psi")
        )
        for row in result.tiers:
            writer.writerow(
                (
                    row.tier,
                    row.seed_set.size,
                    _fmt(row.seed_set.total_hiring_cost),
                    row.seed_set.unique_followers,
                    result.trials,
                    _fmt(row.mean_buyers),
                    _fmt(row.var_buyers),
                )
            )


def write_situational_csv(result: SituationalResult, path) -> None:
    """Write the per-tier metrics rows; skipped tiers are omitted."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(METRICS_CSV_COLUMNS)
        for row in result.tiers:
            if row.metrics is None:
                continue
            writer.writerow(
                metrics_csv_row(
                    result.config.mu,
                    result.config.omega,
                    row.tier,
                    row.seed_set.size,
                    row.seed_set.total_hiring_cost,
                    row.metrics,
                )
            )


def write_sweep_csv(grid: SweepGrid, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SWEEP_CSV_COLUMNS)
        for cell in grid.flat():
            writer.writerow(
                (
                    repr(cell.mu),
                    repr(cell.omega),
                    _fmt(cell.delta_cac),
                    _fmt(cell.delta_cr),
                    cell.status,
                )
            )


def load_sweep_csv(path) -> SweepGrid:
    """Inverse of write_sweep_csv; reconstructs the grid from the long form."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != SWEEP_CSV_COLUMNS:
            raise ValueError(f"unexpected sweep CSV header {header!r}")
        cells = []
        for rec in reader:
            mu, omega, d_cac, d_cr, status = rec
            cells.append(
                SweepCell(
                    mu=float(mu),
                    omega=float(omega),
                    delta_cac=float(d_cac) if d_cac else None,
                    delta_cr=float(d_cr) if d_cr else None,
                    status=status,
                )
            )
    mu_axis = tuple(dict.fromkeys(c.mu for c in cells))
    omega_axis = tuple(dict.fromkeys(c.omega for c in cells))
    if len(cells) != len(mu_axis) * len(omega_axis):
        raise ValueError("sweep CSV does not form a full grid")
    rows = tuple(
        tuple(cells[i * len(omega_axis) : (i + 1) * len(omega_axis)])
        for i in range(len(mu_axis))
    )
    return SweepGrid(mu_axis=mu_axis, omega_axis=omega_axis, cells=rows)

"""Expected-time estimation over seeded trials and exhaustive reachability for tiny systems."""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import networkx as nx
import numpy as np

from app.core.config import get_settings
from app.core.errors import StateSpaceCapExceeded
from app.core.logging import logger
from app.engine.kinetics import apply_event, as_ruleset, enumerate_events, run
from app.models.enums import RateConvention, StopReason
from app.models.grid import BoundingRect
from app.models.models import Configuration, ConstructionSpec


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial; identical to the `trial`-th child of SeedSequence(seed).spawn."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


@dataclass
class TrialOutcome:
    trial: int
    time: float
    events: int
    success: bool
    stop_reason: StopReason
    max_rect: BoundingRect


@dataclass
class ExpectedTime:
    mean: float
    std_error: float
    success_rate: float
    trials: int
    seed: int
    max_rect: BoundingRect = BoundingRect(0, 0)
    outcomes: list[TrialOutcome] = field(default_factory=list)

    @property
    def times(self) -> list[float]:
        return [o.time for o in self.outcomes if o.success]

    def failed_trials(self) -> list[int]:
        return [o.trial for o in self.outcomes if not o.success]


def run_trial(
    spec: ConstructionSpec,
    seed: int,
    trial: int,
    max_events: Optional[int] = None,
    convention: Optional[RateConvention] = None,
    track_space: bool = False,
) -> TrialOutcome:
    trajectory = run(
        spec.initial,
        spec.rules,
        max_events=max_events,
        seed=seed,
        record=False,
        convention=convention,
        track_space=track_space,
        rng=trial_rng(seed, trial),
    )
    success = trajectory.stop_reason == StopReason.HALTED and spec.target(trajectory.terminal)
    return TrialOutcome(
        trial=trial,
        time=trajectory.total_time,
        events=trajectory.event_count,
        success=success,
        stop_reason=trajectory.stop_reason,
        max_rect=trajectory.max_rect,
    )


def _run_trial_batch(name: str, params: dict, seed: int, trials: list[int], max_events, convention, track_space):
    from app.constructions.registry import build_construction

    spec = build_construction(name, params)
    return [run_trial(spec, seed, t, max_events, convention, track_space) for t in trials]


def summarize(outcomes: list[TrialOutcome], seed: int) -> ExpectedTime:
    outcomes = sorted(outcomes, key=lambda o: o.trial)
    times = np.array([o.time for o in outcomes if o.success], dtype=float)
    mean = float(times.mean()) if times.size else math.nan
    std_error = float(times.std(ddof=1) / math.sqrt(times.size)) if times.size > 1 else 0.0
    max_rect = BoundingRect(
        max((o.max_rect.width for o in outcomes), default=0),
        max((o.max_rect.height for o in outcomes), default=0),
    )
    return ExpectedTime(
        mean=mean,
        std_error=std_error,
        success_rate=len(times) / len(outcomes) if outcomes else 0.0,
        trials=len(outcomes),
        seed=seed,
        max_rect=max_rect,
        outcomes=outcomes,
    )


def estimate_expected_time(
    spec: ConstructionSpec,
    trials: int,
    seed: int,
    workers: int = 1,
    max_events: Optional[int] = None,
    convention: Optional[RateConvention] = None,
    track_space: bool = False,
) -> ExpectedTime:
    """Mean clock time to halt over independent trials, among trials that reach the target."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if workers > 1 and _rebuildable(spec):
        chunks = [list(range(trials))[i::workers] for i in range(workers)]
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(
                    _run_trial_batch, spec.name, spec.params, seed, chunk, max_events, convention, track_space
                )
                for chunk in chunks
                if chunk
            ]
            for future in futures:
                outcomes.extend(future.result())
    else:
        outcomes = [run_trial(spec, seed, t, max_events, convention, track_space) for t in range(trials)]

    report = summarize(outcomes, seed)
    logger.info(
        f"Estimated {spec.name}: mean={report.mean:.4f} se={report.std_error:.4f} "
        f"success={report.success_rate:.3f} over {trials} trials (seed {seed})"
    )
    return report


@dataclass
class ReachabilityReport:
    graph: nx.DiGraph
    initial: tuple
    terminals: list[tuple]
    truncated: bool = False

    @property
    def confluent(self) -> bool:
        return len(self.terminals) == 1 and not self.truncated

    def terminal_configurations(self) -> list[Configuration]:
        return [self.graph.nodes[t]["config"] for t in self.terminals]


def exhaustive_trajectories(
    config: Configuration,
    rules,
    depth_bound: Optional[int] = None,
    cap: Optional[int] = None,
) -> ReachabilityReport:
    """Breadth-first reachability DAG over configurations up to translation."""
    cap = cap or get_settings().STATE_SPACE_CAP
    ruleset = as_ruleset(rules)
    graph = nx.DiGraph()
    start = config.canonical()
    graph.add_node(start, config=config.copy(), depth=0)
    frontier = [start]
    truncated = False

    while frontier:
        next_frontier = []
        for key in frontier:
            node = graph.nodes[key]
            if depth_bound is not None and node["depth"] >= depth_bound:
                if enumerate_events(node["config"], ruleset, RateConvention.PER_CHOICE):
                    truncated = True
                continue
            for event in enumerate_events(node["config"], ruleset, RateConvention.PER_CHOICE):
                successor = apply_event(node["config"], ruleset, event)
                succ_key = successor.canonical()
                if succ_key not in graph:
                    if graph.number_of_nodes() >= cap:
                        raise StateSpaceCapExceeded(
                            f"reachable state space exceeds the cap of {cap} configurations",
                            details={"cap": cap},
                        )
                    graph.add_node(succ_key, config=successor, depth=node["depth"] + 1)
                    next_frontier.append(succ_key)
                graph.add_edge(key, succ_key, rule_id=event.rule_id)
        frontier = next_frontier

    terminals = sorted(
        (n for n in graph.nodes if graph.out_degree(n) == 0 and not _has_events(graph, n, ruleset)),
        key=repr,
    )
    logger.debug(f"Reachability: {graph.number_of_nodes()} configurations, {len(terminals)} terminal classes")
    return ReachabilityReport(graph=graph, initial=start, terminals=terminals, truncated=truncated)


def _has_events(graph: nx.DiGraph, node, ruleset) -> bool:
    return bool(enumerate_events(graph.nodes[node]["config"], ruleset, RateConvention.PER_CHOICE))


def _rebuildable(spec: ConstructionSpec) -> bool:
    """Worker processes rebuild the construction from its generator name and parameters."""
    from app.constructions.registry import GENERATORS

    return spec.name in GENERATORS

"""Rule semantics and the continuous-time scheduler.

Every applicable rule instance fires at rate 1; the waiting time before the
next step is Exponential(k) where k counts applicable instances, and the
instance is chosen uniformly. How movement rules contribute to k is governed
by the rate convention (see `RateConvention`).
"""
from collections import defaultdict
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from app.core.config import get_settings
from app.core.errors import (
    BondToEmpty,
    BudgetExhausted,
    EmptyPairBothSides,
    MovementDistanceNotOne,
    MovementWithEmpty,
    StaleEvent,
)
from app.core.logging import logger
from app.engine.movement import movable_set
from app.models.enums import DIRECTIONS, ArmChoice, BondType, Direction, RateConvention, StopReason
from app.models.grid import BoundingRect, GridPoint, bounding_rect, direction_distance
from app.models.models import EMPTY, Configuration, Event, Rule, Trajectory, TrajectoryStep

Stop = Callable[[Configuration], bool]


def validate_rule(rule: Rule) -> Rule:
    """Return the rule unchanged or raise the RuleError naming the broken clause."""
    if rule.s1 == EMPTY and rule.s2 == EMPTY:
        raise EmptyPairBothSides(f"rule '{rule}' has empty on both sides of its left-hand side")
    if rule.s1p == EMPTY and rule.s2p == EMPTY:
        raise EmptyPairBothSides(f"rule '{rule}' has empty on both sides of its right-hand side")
    if EMPTY in (rule.s1, rule.s2) and rule.bond != BondType.NULL:
        raise BondToEmpty(f"rule '{rule}' bonds to an empty slot on its left-hand side")
    if EMPTY in (rule.s1p, rule.s2p) and rule.bondp != BondType.NULL:
        raise BondToEmpty(f"rule '{rule}' bonds to an empty slot on its right-hand side")
    if rule.is_movement:
        if direction_distance(rule.u, rule.up) != 1:
            raise MovementDistanceNotOne(
                f"rule '{rule}' moves between {rule.u.value} and {rule.up.value}, which are not at distance 1"
            )
        if EMPTY in (rule.s1, rule.s2, rule.s1p, rule.s2p):
            raise MovementWithEmpty(f"movement rule '{rule}' involves an empty slot")
    return rule


def movement_direction(rule: Rule) -> Direction:
    v = rule.movement_vector()
    return Direction.from_vector(v.x, v.y)


class RuleSet:
    """Validated rules indexed by (s1, s2, u) for local matching."""

    def __init__(self, rules: Sequence[Rule]):
        self.rules = [validate_rule(r) for r in rules]
        self.index: dict[tuple[str, str, Direction], list[int]] = defaultdict(list)
        for rule_id, rule in enumerate(self.rules):
            self.index[(rule.s1, rule.s2, rule.u)].append(rule_id)
        self.index = dict(self.index)
        self.moves = {
            rule_id: movement_direction(rule) for rule_id, rule in enumerate(self.rules) if rule.is_movement
        }

    def __len__(self) -> int:
        return len(self.rules)

    def matches_at(self, config: Configuration, anchor: GridPoint) -> list[int]:
        """Rule ids whose left-hand side matches with s1 at `anchor`."""
        monomers = config.monomers
        s1 = monomers.get(anchor, EMPTY)
        found = []
        for u in DIRECTIONS:
            partner = anchor + u
            s2 = monomers.get(partner, EMPTY)
            if s1 == EMPTY and s2 == EMPTY:
                continue
            candidates = self.index.get((s1, s2, u))
            if not candidates:
                continue
            bond = config.bond_between(anchor, partner) if s1 != EMPTY and s2 != EMPTY else BondType.NULL
            for rule_id in candidates:
                if self.rules[rule_id].bond == bond:
                    found.append(rule_id)
        return found


def as_ruleset(rules) -> RuleSet:
    return rules if isinstance(rules, RuleSet) else RuleSet(rules)


def _arm_and_base(rule: Rule, anchor: GridPoint, arm: ArmChoice) -> tuple[GridPoint, GridPoint, Direction]:
    partner = anchor + rule.u
    v = movement_direction(rule)
    if arm == ArmChoice.SECOND:
        return partner, anchor, v
    return anchor, partner, v.opposite


def movement_events(
    config: Configuration, ruleset: RuleSet, rule_id: int, anchor: GridPoint, convention: RateConvention
) -> list[Event]:
    rule = ruleset.rules[rule_id]
    events = []
    for arm in (ArmChoice.FIRST, ArmChoice.SECOND):
        arm_point, base_point, v = _arm_and_base(rule, anchor, arm)
        moved = movable_set(config, arm_point, base_point, v)
        if moved:
            events.append(Event(rule_id, anchor, rule.u, arm, v, moved))
    if convention == RateConvention.PER_RULE and events:
        return [Event(rule_id, anchor, rule.u)]
    return events


def events_for_matches(
    config: Configuration,
    ruleset: RuleSet,
    matches: Iterable[tuple[int, GridPoint]],
    convention: RateConvention,
) -> list[Event]:
    events = []
    for rule_id, anchor in sorted(matches):
        if rule_id in ruleset.moves:
            events.extend(movement_events(config, ruleset, rule_id, anchor, convention))
        else:
            events.append(Event(rule_id, anchor, ruleset.rules[rule_id].u))
    return events


def candidate_anchors(points: Iterable[GridPoint]) -> set[GridPoint]:
    """Every anchor whose matched pair could involve one of `points`."""
    anchors = set()
    for p in points:
        anchors.add(p)
        for u in DIRECTIONS:
            anchors.add(p - u)
    return anchors


def all_matches(config: Configuration, ruleset: RuleSet) -> set[tuple[int, GridPoint]]:
    return {
        (rule_id, anchor)
        for anchor in candidate_anchors(config.monomers)
        for rule_id in ruleset.matches_at(config, anchor)
    }


def enumerate_events(config: Configuration, rules, convention: Optional[RateConvention] = None) -> list[Event]:
    """All applicable events in canonical order (rule id, anchor, arm)."""
    ruleset = as_ruleset(rules)
    convention = RateConvention(convention or get_settings().RATE_CONVENTION)
    return events_for_matches(config, ruleset, all_matches(config, ruleset), convention)


def _resolve_arm(config: Configuration, ruleset: RuleSet, event: Event, rng) -> Event:
    if event.arm is not None:
        return event
    choices = movement_events(config, ruleset, event.rule_id, event.anchor, RateConvention.PER_CHOICE)
    if not choices:
        raise StaleEvent(f"movement rule {event.rule_id} at {event.anchor} is blocked")
    if rng is None or len(choices) == 1:
        return choices[0]
    return choices[int(rng.integers(len(choices)))]


def _is_applicable(config: Configuration, ruleset: RuleSet, event: Event) -> bool:
    return event.rule_id in ruleset.matches_at(config, event.anchor)


def apply_event_in_place(config: Configuration, rules, event: Event, rng=None) -> tuple[Event, set[GridPoint]]:
    """Apply an event to `config`; returns the resolved event and the touched positions."""
    ruleset = as_ruleset(rules)
    if not _is_applicable(config, ruleset, event):
        raise StaleEvent(f"rule {event.rule_id} no longer matches at {event.anchor}")
    rule = ruleset.rules[event.rule_id]
    anchor = event.anchor
    touched = {anchor, anchor + rule.u}

    if rule.is_movement:
        event = _resolve_arm(config, ruleset, event, rng)
        arm_point, base_point, v = _arm_and_base(rule, anchor, event.arm)
        moved = movable_set(config, arm_point, base_point, v)
        if not moved:
            raise StaleEvent(f"movement rule {event.rule_id} at {anchor} is blocked")
        config.set_bond(anchor, anchor + rule.u, BondType.NULL)
        config.move(set(moved), v)
        touched |= moved
        touched |= {p + v for p in moved}
        first = anchor + v if event.arm == ArmChoice.FIRST else anchor
        second = first + rule.up
        config.set_state(first, rule.s1p)
        config.set_state(second, rule.s2p)
        config.set_bond(first, second, rule.bondp)
        return event, touched

    first, second = anchor, anchor + rule.u
    for point, before, after in ((first, rule.s1, rule.s1p), (second, rule.s2, rule.s2p)):
        if before == EMPTY and after != EMPTY:
            config.add_monomer(point, after)
        elif before != EMPTY and after == EMPTY:
            touched |= set(config.bonded(point))
            config.remove_monomer(point)
        elif after != EMPTY:
            config.set_state(point, after)
    if rule.s1p != EMPTY and rule.s2p != EMPTY:
        config.set_bond(first, second, rule.bondp)
    return event, touched


def apply_event(config: Configuration, rules, event: Event, rng=None) -> Configuration:
    """Functional form of `apply_event_in_place`: the input configuration is left untouched."""
    result = config.copy()
    apply_event_in_place(result, rules, event, rng)
    return result


def step(
    config: Configuration, rules, rng: np.random.Generator, convention: Optional[RateConvention] = None
) -> Optional[tuple[Event, float]]:
    """Pick the next event uniformly and draw its Exponential(k) waiting time; None when halted."""
    events = enumerate_events(config, rules, convention)
    return choose(events, rng)


def choose(events: Sequence[Event], rng: np.random.Generator) -> Optional[tuple[Event, float]]:
    k = len(events)
    if k == 0:
        return None
    dt = float(rng.exponential(1.0 / k))
    return events[int(rng.integers(k))], dt


class EventIndex:
    """Left-hand-side matches kept current by re-matching around touched positions.

    Movement matches are re-checked against fresh movable sets on every call
    to `events`, since a push can be blocked by anything in the configuration.
    """

    def __init__(self, config: Configuration, ruleset: RuleSet, convention: RateConvention):
        self.config = config
        self.ruleset = ruleset
        self.convention = convention
        self.by_anchor: dict[GridPoint, list[int]] = {}
        self.update(config.monomers)

    def update(self, touched: Iterable[GridPoint]) -> None:
        for anchor in candidate_anchors(touched):
            found = self.ruleset.matches_at(self.config, anchor)
            if found:
                self.by_anchor[anchor] = found
            else:
                self.by_anchor.pop(anchor, None)

    def matches(self) -> set[tuple[int, GridPoint]]:
        return {(rule_id, anchor) for anchor, ids in self.by_anchor.items() for rule_id in ids}

    def events(self) -> list[Event]:
        return events_for_matches(self.config, self.ruleset, self.matches(), self.convention)


def run(
    config: Configuration,
    rules,
    stop: Optional[Stop] = None,
    max_events: Optional[int] = None,
    seed: Optional[int] = None,
    record: bool = True,
    convention: Optional[RateConvention] = None,
    track_space: bool = False,
    strict: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Trajectory:
    """Advance a copy of `config` until halted, `stop` holds, or the event budget runs out."""
    settings = get_settings()
    seed = settings.DEFAULT_SEED if seed is None else seed
    max_events = settings.MAX_EVENTS if max_events is None else max_events
    convention = RateConvention(convention or settings.RATE_CONVENTION)
    rng = rng if rng is not None else np.random.default_rng(seed)
    ruleset = as_ruleset(rules)

    current = config.copy()
    index = EventIndex(current, ruleset, convention)
    trajectory = Trajectory(seed=seed)
    clock = 0.0
    max_rect = bounding_rect(current)
    reason = StopReason.HALTED

    while True:
        if stop is not None and stop(current):
            reason = StopReason.TARGET
            break
        if trajectory.event_count >= max_events:
            reason = StopReason.BUDGET
            break
        picked = choose(index.events(), rng)
        if picked is None:
            reason = StopReason.HALTED
            break
        event, dt = picked
        event, touched = apply_event_in_place(current, ruleset, event, rng)
        index.update(touched)
        clock += dt
        trajectory.event_count += 1
        if record:
            trajectory.steps.append(TrajectoryStep(trajectory.event_count, clock, event, current.digest()))
        if track_space:
            rect = bounding_rect(current)
            max_rect = BoundingRect(max(max_rect.width, rect.width), max(max_rect.height, rect.height))

    trajectory.terminal = current
    trajectory.stop_reason = reason
    trajectory.total_time = clock
    trajectory.max_rect = max_rect
    logger.debug(f"Run seed={seed} stopped: {reason.value} after {trajectory.event_count} events, t={clock:.4f}")
    if strict and reason == StopReason.BUDGET:
        raise BudgetExhausted(
            f"event budget of {max_events} exhausted at t={clock:.4f}",
            details={"events": trajectory.event_count},
        )
    return trajectory


def run_to_halt(spec_rules, initial: Configuration, seed: int = 1, **kwargs) -> Configuration:
    return run(initial, spec_rules, seed=seed, record=False, **kwargs).terminal


def time_to_target(
    config: Configuration,
    rules,
    target: Stop,
    seed: Optional[int] = None,
    max_events: Optional[int] = None,
    convention: Optional[RateConvention] = None,
) -> Optional[float]:
    """Clock time at which `target` first holds, or None if the run halts or runs out first."""
    trajectory = run(config, rules, stop=target, max_events=max_events, seed=seed, record=False, convention=convention)
    return trajectory.total_time if trajectory.stop_reason == StopReason.TARGET else None

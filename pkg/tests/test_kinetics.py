import numpy as np
import pytest
from scipy import stats

from app.cli.suites import first_waiting_times, independent_sites
from app.constructions.doubling import PDS_STEPS, gen_line_doubling, gen_line_tripling, gen_pds
from app.constructions.sync import gen_synchronization
from app.core.errors import (
    BondToEmpty, BudgetExhausted, EmptyPairBothSides, MovementDistanceNotOne, MovementWithEmpty, StaleEvent,
    StateSpaceCapExceeded,
)
from app.engine.analysis import estimate_expected_time, exhaustive_trajectories, trial_rng
from app.engine.kinetics import (
    EventIndex, RuleSet, apply_event, apply_event_in_place, enumerate_events, run, step, time_to_target,
    validate_rule,
)
from app.models.enums import BondType, Direction, RateConvention, StopReason
from app.models.grid import GridPoint
from app.models.models import EMPTY, Configuration, Event, Rule

PX, MX, PY = Direction.PLUS_X, Direction.MINUS_X, Direction.PLUS_Y
RIGID, NULL = BondType.RIGID, BondType.NULL

# a-b along +x swings to a-b along +y
SWING = Rule("a", "b", RIGID, PX, "a", "b", RIGID, PY)


@pytest.mark.parametrize("rule, error", [
    (Rule(EMPTY, EMPTY, NULL, PX, "a", EMPTY, NULL, PX), EmptyPairBothSides),
    (Rule("a", "b", NULL, PX, EMPTY, EMPTY, NULL, PX), EmptyPairBothSides),
    (Rule("a", EMPTY, RIGID, PX, "a", "b", RIGID, PX), BondToEmpty),
    (Rule("a", "b", NULL, PX, "a", EMPTY, RIGID, PX), BondToEmpty),
    (Rule("a", "b", RIGID, PX, "a", "b", RIGID, MX), MovementDistanceNotOne),
    (Rule("a", EMPTY, NULL, PX, "a", EMPTY, NULL, PY), MovementWithEmpty),
])
def test_invalid_rules(rule, error):
    with pytest.raises(error) as exc:
        validate_rule(rule)
    assert exc.value.exit_code == 4


def test_valid_rules_pass_through(appear_rule):
    assert validate_rule(appear_rule) is appear_rule
    assert validate_rule(SWING) is SWING


def test_appearance(appear_rule):
    trajectory = run(Configuration.line(["a"]), [appear_rule], seed=3)
    assert trajectory.stop_reason == StopReason.HALTED
    assert trajectory.event_count == 1
    terminal = trajectory.terminal
    assert terminal.monomers == {GridPoint(0, 0): "a", GridPoint(1, 0): "c"}
    assert terminal.bond_between(GridPoint(0, 0), GridPoint(1, 0)) == RIGID
    assert trajectory.total_time > 0


def test_matching_respects_bond_type(pair):
    flexible = Rule("a", "b", BondType.FLEXIBLE, PX, "c", "c", NULL, PX)
    assert enumerate_events(pair, [flexible]) == []
    assert RuleSet([SWING]).matches_at(pair, GridPoint(0, 0)) == [0]


def test_movement_arm_choices(pair):
    assert len(enumerate_events(pair, [SWING], RateConvention.PER_CHOICE)) == 2
    per_rule = enumerate_events(pair, [SWING], RateConvention.PER_RULE)
    assert len(per_rule) == 1 and per_rule[0].arm is None

    results = {
        run(pair, [SWING], seed=seed, convention=convention).terminal.digest()
        for seed in range(6)
        for convention in RateConvention
    }
    swung = Configuration.from_parts([(GridPoint(0, 0), "a"), (GridPoint(0, 1), "b")],
                                     [(GridPoint(0, 0), GridPoint(0, 1), RIGID)])
    assert results == {swung.digest()}


def test_blocked_movement_is_not_an_event(pair):
    # c is rigidly bonded to a and sits where either arm would land
    pair.add_monomer(GridPoint(0, 1), "c")
    pair.set_bond(GridPoint(0, 0), GridPoint(0, 1), RIGID)
    for convention in RateConvention:
        assert enumerate_events(pair, [SWING], convention) == []


def test_stale_event(pair, appear_rule):
    with pytest.raises(StaleEvent):
        apply_event(pair, [appear_rule], Event(0, GridPoint(0, 0), PX))


def test_apply_event_leaves_input_alone(pair):
    event = enumerate_events(pair, [SWING])[0]
    moved = apply_event(pair, [SWING], event)
    assert pair.monomers == {GridPoint(0, 0): "a", GridPoint(1, 0): "b"}
    assert not moved.equivalent(pair)


def test_pair_doubling_is_a_fixed_chain():
    spec = gen_pds()
    for seed in range(5):
        trajectory = run(spec.initial, spec.rules, seed=seed, track_space=True)
        assert trajectory.stop_reason == StopReason.HALTED
        assert trajectory.event_count == PDS_STEPS
        assert spec.target(trajectory.terminal)
        assert trajectory.max_rect.fits_within(spec.space_bound)


def test_trace_is_deterministic_per_seed():
    spec = gen_line_doubling(6)
    first = run(spec.initial, spec.rules, seed=42)
    again = run(spec.initial, spec.rules, seed=42)
    other = run(spec.initial, spec.rules, seed=43)
    assert [(s.time, s.event, s.digest) for s in first.steps] == [(s.time, s.event, s.digest) for s in again.steps]
    assert [s.time for s in first.steps] != [s.time for s in other.steps]
    assert first.terminal.equivalent(other.terminal)


def test_clock_is_increasing():
    spec = gen_line_doubling(4)
    times = [s.time for s in run(spec.initial, spec.rules, seed=5).steps]
    assert times == sorted(times)
    assert [s.index for s in run(spec.initial, spec.rules, seed=5).steps] == list(range(1, len(times) + 1))


def test_budget():
    spec = gen_line_doubling(4)
    trajectory = run(spec.initial, spec.rules, max_events=3, seed=1)
    assert trajectory.stop_reason == StopReason.BUDGET
    assert trajectory.event_count == 3
    with pytest.raises(BudgetExhausted) as exc:
        run(spec.initial, spec.rules, max_events=3, seed=1, strict=True)
    assert exc.value.exit_code == 3


def test_time_to_target():
    spec = gen_line_doubling(4)
    t = time_to_target(spec.initial, spec.rules, spec.target, seed=9)
    assert t is not None and t > 0
    assert t == run(spec.initial, spec.rules, stop=spec.target, seed=9).total_time
    assert time_to_target(spec.initial, spec.rules, lambda c: False, seed=9) is None


def test_event_index_tracks_full_enumeration():
    spec = gen_line_doubling(5)
    rng = np.random.default_rng(11)
    current = spec.initial.copy()
    ruleset = RuleSet(spec.rules)
    index = EventIndex(current, ruleset, RateConvention.PER_CHOICE)

    while True:
        events = index.events()
        assert [e.sort_key() for e in events] == [
            e.sort_key() for e in enumerate_events(current, ruleset, RateConvention.PER_CHOICE)
        ]
        if not events:
            break
        _, touched = apply_event_in_place(current, ruleset, events[int(rng.integers(len(events)))], rng)
        index.update(touched)
    assert spec.target(current)


def test_single_event_waiting_time_mean():
    config = Configuration.from_parts((GridPoint(3 * i, 0), "a") for i in range(4))
    rule = Rule("a", EMPTY, NULL, PX, "c", EMPTY, NULL, PX)
    times = [run(config, [rule], max_events=1, record=False, rng=trial_rng(0, t)).total_time for t in range(3000)]
    assert np.mean(times) == pytest.approx(0.25, rel=0.1)


def test_pair_doubling_is_confluent():
    spec = gen_pds()
    report = exhaustive_trajectories(spec.initial, spec.rules)
    assert report.confluent
    assert spec.target(report.terminal_configurations()[0])


def test_reachability_cap():
    spec = gen_pds()
    with pytest.raises(StateSpaceCapExceeded):
        exhaustive_trajectories(spec.initial, spec.rules, cap=3)


def test_estimate_is_reproducible():
    spec = gen_line_doubling(4)
    a = estimate_expected_time(spec, trials=20, seed=8)
    b = estimate_expected_time(spec, trials=20, seed=8)
    assert a.mean == b.mean
    assert a.success_rate == 1.0
    assert a.failed_trials() == []
    assert a.std_error > 0


def test_estimate_counts_failures():
    spec = gen_line_doubling(4)
    report = estimate_expected_time(spec, trials=5, seed=8, max_events=2)
    assert report.success_rate == 0.0
    assert report.failed_trials() == [0, 1, 2, 3, 4]
    assert all(o.stop_reason == StopReason.BUDGET for o in report.outcomes)


def test_step(appear_rule, rng):
    assert step(Configuration.line(["z"]), [appear_rule], rng) is None
    event, dt = step(Configuration.line(["a"]), [appear_rule], rng)
    assert (event.rule_id, event.anchor, event.u) == (0, GridPoint(0, 0), PX)
    assert dt > 0


# ----- bond geometry under every event -----

def moved_position(event: Event, p: GridPoint) -> GridPoint:
    return p + event.v if p in event.movable else p


def check_bond_geometry(before: Configuration, ruleset: RuleSet, event: Event) -> None:
    rule = ruleset.rules[event.rule_id]
    after = apply_event(before, ruleset, event)
    rewritten = {event.anchor, event.anchor + rule.u}
    for (p, q), bond in before.bonds.items():
        if {p, q} == rewritten:
            continue
        if rule.is_movement:
            p2, q2 = moved_position(event, p), moved_position(event, q)
        elif p in after.monomers and q in after.monomers:
            p2, q2 = p, q
        else:
            # a deleted monomer takes its bonds with it
            continue
        assert after.bond_between(p2, q2) == bond
        if bond == RIGID:
            assert (q2.x - p2.x, q2.y - p2.y) == (q.x - p.x, q.y - p.y)
        else:
            assert p2.is_neighbor(q2)


@pytest.mark.parametrize("build", [
    lambda: gen_line_doubling(5),
    lambda: gen_line_tripling(3),
    lambda: gen_synchronization(4, 0),
    lambda: gen_synchronization(5, 1),
])
def test_every_event_keeps_bond_geometry(build):
    spec = build()
    ruleset = RuleSet(spec.rules)
    current = spec.initial.copy()
    rng = np.random.default_rng(5)
    while True:
        events = enumerate_events(current, ruleset, RateConvention.PER_CHOICE)
        if not events:
            break
        for event in events:
            check_bond_geometry(current, ruleset, event)
        current = apply_event(current, ruleset, events[int(rng.integers(len(events)))])
    assert spec.target(current)


def test_flexible_partner_is_dragged_along():
    config = Configuration.line(["a", "b", "c"])
    config.set_bond(GridPoint(1, 0), GridPoint(2, 0), BondType.FLEXIBLE)
    events = enumerate_events(config, [SWING], RateConvention.PER_CHOICE)
    assert events
    for event in events:
        check_bond_geometry(config, RuleSet([SWING]), event)
    swung = next(e for e in events if GridPoint(1, 0) in e.movable)
    assert GridPoint(2, 0) in swung.movable


# ----- exhaustive reachability on small instances -----

@pytest.mark.parametrize("build", [
    lambda: gen_line_doubling(2),
    lambda: gen_line_doubling(3),
    lambda: gen_line_doubling(4),
    lambda: gen_synchronization(2, 0),
    lambda: gen_synchronization(2, 1),
])
def test_small_instances_have_one_terminal_class(build):
    spec = build()
    report = exhaustive_trajectories(spec.initial, spec.rules)
    assert report.confluent
    assert spec.target(report.terminal_configurations()[0])


# ----- rate convention statistics -----

@pytest.mark.parametrize("k", [1, 3, 10])
def test_waiting_times_are_exponential(k):
    times = first_waiting_times(k, seed=k, trials=800)
    assert stats.kstest(times, "expon", args=(0, 1.0 / k)).pvalue >= 0.01


def test_event_choice_is_uniform():
    config, rules = independent_sites(4)
    counts = np.zeros(4, dtype=int)
    for t in range(2000):
        first = run(config, rules, max_events=1, rng=trial_rng(3, t)).steps[0]
        counts[first.event.anchor.x // 3] += 1
    assert stats.chisquare(counts).pvalue >= 0.01

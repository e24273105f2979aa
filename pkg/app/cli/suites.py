"""Verification suites: every construction and engine piece checked against its oracle.

Each suite takes a seed and returns one `VerifyCaseResult` per case. Walker
programs are interpreted strictly, so every step must be one the compiled rules
can take, and the sweeps also run the compiled rules under kinetics.
"""
import itertools
from typing import Callable, Optional

import numpy as np
from scipy import stats

from app.constructions.counter import gen_counter
from app.constructions.doubling import (
    chain_mean, expected_doubling_time, gen_line_doubling, gen_line_tripling, gen_pds,
)
from app.constructions.line_growth import gen_line_growth
from app.constructions.masking import gen_masking
from app.constructions.matrices import as_rows, boolean_product, gen_matmul
from app.constructions.parallel_eval import FRAGMENTS, expected_output, gen_parallel_eval
from app.constructions.phases import (
    circuit_phases, line_growth_phases, matmul_phases, pair_eval_phases, sort_phases, tm_phases,
)
from app.constructions.sorting import gen_sort
from app.constructions.sync import gen_synchronization
from app.core.errors import CapExceeded, ParseError, TapeError
from app.core.logging import logger
from app.engine.analysis import estimate_expected_time, exhaustive_trajectories, trial_rng
from app.engine.kinetics import apply_event, enumerate_events, run
from app.engine.movement import brute_force_movable_set, movable_set
from app.engine.walker import interpret
from app.formats.machinefiles import parse_circuit, parse_tm, serialize_circuit, serialize_tm
from app.formats.ruledsl import parse_config, parse_ruleset, serialize_config, serialize_ruleset
from app.machines.circuits import (
    CIRCUITS, all_inputs, circuit_oracle, encode_circuit, encoded_layers, gen_circuit_sim, is_answer, unfold_circuit,
)
from app.machines.pipeline import monomer_tm_pipeline
from app.machines.tm import (
    MACHINES, ConfigLayout, accepts, closure_oracle, path_complete, simulate_by_squaring, tm_oracle,
)
from app.models.enums import DIRECTIONS, BondType, Direction, RateConvention, StopReason
from app.models.grid import GridPoint, bfs_distance, neighbors, normalize, translate, tri_distance
from app.models.models import EMPTY, Configuration, ConstructionSpec, Rule
from app.schemas.schemas import VerifyCaseResult

ALPHA = 0.01
# largest configuration matrix squared on the data path
ABSTRACT_CONFIG_LIMIT = 512


class Cases:
    """Collects case results; a check returns None on success or a failure detail."""

    def __init__(self, suite: str):
        self.suite = suite
        self.results: list[VerifyCaseResult] = []

    def expect(self, case: str, check: Callable[[], Optional[str]]) -> None:
        try:
            detail = check()
        except Exception as exc:  # a crashing case is a failing case
            detail = f"{type(exc).__name__}: {exc}"
        self.results.append(VerifyCaseResult(suite=self.suite, case=case, passed=detail is None, detail=detail))

    def skip(self, case: str, reason: str) -> None:
        self.results.append(VerifyCaseResult(suite=self.suite, case=case, passed=True, detail=f"skipped: {reason}"))


def walker_check(spec: ConstructionSpec) -> Optional[str]:
    """Interpret the walker strictly against its compiled rules and test the target."""
    try:
        final, result = interpret(spec.program, spec.initial, strict=True)
    except TapeError as exc:
        return exc.message
    if not result.halted:
        return "walker did not halt"
    if not spec.target(final):
        return f"decoded {spec.decode(final)!r} after {result.steps} steps"
    return None


def kinetic_check(spec: ConstructionSpec, seed: int, trial: int = 0) -> Optional[str]:
    """Run the compiled rules under kinetics until nothing applies; the terminal must be the target."""
    trajectory = run(spec.initial, spec.rules, record=False, rng=trial_rng(seed, trial))
    if trajectory.stop_reason != StopReason.HALTED:
        return f"stopped: {trajectory.stop_reason.value} after {trajectory.event_count} events"
    if not spec.target(trajectory.terminal):
        return f"terminal decodes to {spec.decode(trajectory.terminal) if spec.decode else None!r}"
    return None


def kinetic_sweep(specs, seed: int, trials: int = 1) -> Optional[str]:
    """kinetic_check over (label, spec) pairs, `trials` independent runs each."""
    for label, spec in specs:
        for t in range(trials):
            detail = kinetic_check(spec, seed, trial=t)
            if detail:
                return f"{label}, trial {t}: {detail}"
    return None


def answer_stays_fixed(spec: ConstructionSpec, seed: int, trial: int = 0) -> Optional[str]:
    """Once an answer monomer appears, neither its position nor its state may change."""
    seen: dict[str, Optional[tuple[GridPoint, str]]] = {"answer": None, "broken": None}

    def watch(config: Configuration) -> bool:
        answers = [(p, s) for p, s in config.monomers.items() if is_answer(s)]
        first = seen["answer"]
        if first is None:
            if answers:
                seen["answer"] = answers[0] if len(answers) == 1 else None
                if len(answers) > 1:
                    seen["broken"] = f"{len(answers)} answer monomers at once"
        elif answers != [first]:
            seen["broken"] = f"answer {first[1]} at {first[0]} became {answers}"
        return seen["broken"] is not None

    trajectory = run(spec.initial, spec.rules, stop=watch, record=False, rng=trial_rng(seed, trial))
    if seen["broken"]:
        return seen["broken"]
    if seen["answer"] is None:
        return f"no answer monomer after {trajectory.event_count} events"
    return None


def first_mismatch(pairs) -> Optional[str]:
    for case, got, want in pairs:
        if got != want:
            return f"{case}: got {got!r}, expected {want!r}"
    return None


# ----- grid -----

def suite_grid(seed: int) -> list[VerifyCaseResult]:
    cases = Cases("grid")
    rng = np.random.default_rng(seed)
    points = [GridPoint(int(x), int(y)) for x, y in rng.integers(-8, 9, size=(600, 2))]
    pairs = list(zip(points[::2], points[1::2]))

    cases.expect("distance equals BFS", lambda: first_mismatch(
        ((a, b), tri_distance(a, b), bfs_distance(a, b)) for a, b in pairs
    ))

    def metric_laws():
        for a, b, c in zip(points[::3], points[1::3], points[2::3]):
            if tri_distance(a, b) != tri_distance(b, a):
                return f"asymmetric at {a}, {b}"
            if tri_distance(a, c) > tri_distance(a, b) + tri_distance(b, c):
                return f"triangle inequality fails at {a}, {b}, {c}"
            if (tri_distance(a, b) == 0) != (a == b):
                return f"identity fails at {a}, {b}"
        return None

    cases.expect("metric laws", metric_laws)

    def directions():
        for d in DIRECTIONS:
            if Direction.from_vector(*d.vector) != d or d.opposite.opposite != d or -d != d.opposite:
                return f"direction {d.value} is inconsistent"
        return None

    cases.expect("direction algebra", directions)

    def normal_form():
        for _ in range(100):
            shape = {GridPoint(int(x), int(y)) for x, y in rng.integers(-4, 5, size=(5, 2))}
            shift = GridPoint(int(rng.integers(-9, 10)), int(rng.integers(-9, 10)))
            if normalize(translate(shape, shift)) != normalize(shape):
                return f"normalize depends on translation for {sorted(shape)}"
            if normalize(normalize(shape)) != normalize(shape):
                return "normalize is not idempotent"
        return None

    cases.expect("normal form up to translation", normal_form)
    return cases.results


# ----- movable set -----

def _scenario(monomers, bonds, arm, base, v, expected) -> Callable[[], Optional[str]]:
    config = Configuration.from_parts(monomers, bonds)

    def check():
        got = movable_set(config, arm, base, v)
        oracle = brute_force_movable_set(config, arm, base, v)
        if got != oracle or got != frozenset(expected):
            return f"closure {sorted(got)}, oracle {sorted(oracle)}, expected {sorted(expected)}"
        return None

    return check


def random_cluster(rng: np.random.Generator, size: int):
    arm = GridPoint(0, 0)
    base = arm + DIRECTIONS[int(rng.integers(6))]
    points = [arm, base]
    while len(points) < size:
        q = points[int(rng.integers(len(points)))] + DIRECTIONS[int(rng.integers(6))]
        if q not in points:
            points.append(q)
    config = Configuration.from_parts((p, "m") for p in points)
    occupied = set(points)
    for p in points:
        for q in neighbors(p):
            if q in occupied and p < q:
                r = rng.random()
                if r < 0.35:
                    config.set_bond(p, q, BondType.RIGID)
                elif r < 0.6:
                    config.set_bond(p, q, BondType.FLEXIBLE)
    return config, arm, base, DIRECTIONS[int(rng.integers(6))]


def suite_movable_set(seed: int, clusters: int = 1000) -> list[VerifyCaseResult]:
    cases = Cases("movable-set")
    o, px, py, mx, my = GridPoint(0, 0), GridPoint(1, 0), GridPoint(0, 1), GridPoint(-1, 0), GridPoint(0, -1)
    rigid, flexible = BondType.RIGID, BondType.FLEXIBLE
    plus_x = Direction.PLUS_X

    cases.expect("push", _scenario([(o, "a"), (my, "b"), (px, "c")], [(o, my, rigid)], o, my, plus_x, {o, px}))
    cases.expect("pull", _scenario(
        [(o, "a"), (my, "b"), (py, "c")], [(o, my, rigid), (o, py, rigid)], o, my, plus_x, {o, py},
    ))
    cases.expect("blocked", _scenario([(o, "a"), (px, "b")], [(o, px, rigid)], o, px, plus_x, set()))
    cases.expect("flexible partner stays", _scenario(
        [(o, "a"), (my, "b"), (py, "c")], [(o, my, rigid), (o, py, flexible)], o, my, plus_x, {o},
    ))
    cases.expect("flexible partner follows", _scenario(
        [(o, "a"), (my, "b"), (mx, "c")], [(o, my, rigid), (o, mx, flexible)], o, my, plus_x, {o, mx},
    ))

    rng = np.random.default_rng(seed)

    def random_agreement():
        for i in range(clusters):
            config, arm, base, v = random_cluster(rng, int(rng.integers(2, 7)))
            got = movable_set(config, arm, base, v)
            oracle = brute_force_movable_set(config, arm, base, v)
            if got != oracle:
                return f"cluster {i}: closure {sorted(got)} != oracle {sorted(oracle)}"
        return None

    cases.expect(f"{clusters} random clusters agree with the subset oracle", random_agreement)
    return cases.results


# ----- kinetics -----

def independent_sites(k: int) -> tuple[Configuration, list[Rule]]:
    """k isolated monomers, each with exactly one applicable event."""
    config = Configuration.from_parts((GridPoint(3 * i, 0), "a") for i in range(k))
    rule = Rule("a", EMPTY, BondType.NULL, Direction.PLUS_X, "c", EMPTY, BondType.NULL, Direction.PLUS_X)
    return config, [rule]


def first_waiting_times(k: int, seed: int, trials: int) -> np.ndarray:
    config, rules = independent_sites(k)
    return np.array([
        run(config, rules, max_events=1, record=False, rng=trial_rng(seed, t)).total_time for t in range(trials)
    ])


def suite_kinetics(seed: int, trials: int = 2000) -> list[VerifyCaseResult]:
    cases = Cases("kinetics")
    for k in (1, 3, 10):
        def ks(k=k):
            p = stats.kstest(first_waiting_times(k, seed, trials), "expon", args=(0, 1.0 / k)).pvalue
            return None if p >= ALPHA else f"KS p-value {p:.4g}"

        cases.expect(f"waiting time with {k} events is Exponential({k})", ks)

    def uniform_choice():
        k = 3
        config, rules = independent_sites(k)
        counts = np.zeros(k, dtype=int)
        for t in range(trials):
            first = run(config, rules, max_events=1, rng=trial_rng(seed, t)).steps[0]
            counts[first.event.anchor.x // 3] += 1
        p = stats.chisquare(counts).pvalue
        return None if p >= ALPHA else f"chi-squared p-value {p:.4g} for counts {counts.tolist()}"

    cases.expect("event choice is uniform", uniform_choice)

    def replay():
        spec = gen_line_doubling(6)
        convention = RateConvention.PER_CHOICE
        trajectory = run(spec.initial, spec.rules, seed=seed, convention=convention)
        current = spec.initial.copy()
        for step in trajectory.steps:
            keys = {e.sort_key() for e in enumerate_events(current, spec.rules, convention)}
            if step.event.sort_key() not in keys:
                return f"event {step.index} was not applicable by full enumeration"
            current = apply_event(current, spec.rules, step.event)
            if current.digest() != step.digest:
                return f"replay diverged at event {step.index}"
        if enumerate_events(current, spec.rules, convention):
            return "terminal configuration still has events"
        return None

    cases.expect("incremental index matches full enumeration", replay)

    def pds_confluent():
        spec = gen_pds()
        report = exhaustive_trajectories(spec.initial, spec.rules)
        if not report.confluent:
            return f"{len(report.terminals)} terminal classes"
        if not spec.target(report.terminal_configurations()[0]):
            return "the only terminal is not the doubled pair"
        return None

    cases.expect("pair doubling is confluent", pds_confluent)
    return cases.results


# ----- rule language and files -----

def suite_ruledsl(seed: int) -> list[VerifyCaseResult]:
    cases = Cases("ruledsl")
    specs = {
        "pds": gen_pds(),
        "line-doubling": gen_line_doubling(4),
        "line-tripling": gen_line_tripling(2),
        "masking": gen_masking(5, 3),
        "sync": gen_synchronization(4, 1),
        "sort": gen_sort([1, 0]),
    }
    for name, spec in specs.items():
        def round_trip(spec=spec):
            if parse_ruleset(serialize_ruleset(spec.rules, name="x")) != spec.rules:
                return "rules changed in a round trip"
            if parse_config(serialize_config(spec.initial)).canonical() != spec.initial.canonical():
                return "configuration changed in a round trip"
            return None

        cases.expect(f"{name} files round trip", round_trip)

    def located(text: str, line: int, parse=parse_ruleset) -> Callable[[], Optional[str]]:
        def check():
            try:
                parse(text)
            except ParseError as exc:
                return None if exc.line == line else f"reported line {exc.line}, expected {line}"
            return "no parse error"

        return check

    cases.expect("bad direction is located", located("nubot-format 1\nstate a b\na, empty, null, +x -> a, b, rigid, +q\n", 3))
    cases.expect("wrong version is located", located("\n\nnubot-format 2\n", 3))
    cases.expect("bad point is located", located("nubot-format 1\nmonomer (0,x) a\n", 2, parse_config))

    for name in MACHINES:
        def machine_trip(name=name):
            tm = MACHINES[name]()
            back = parse_tm(serialize_tm(tm))
            return None if (back.delta, back.start, back.halting) == (tm.delta, tm.start, tm.halting) else "changed"

        cases.expect(f"machine {name} round trips", machine_trip)
    for name in CIRCUITS:
        def circuit_trip(name=name):
            c = CIRCUITS[name]()
            return None if parse_circuit(serialize_circuit(c)).gates == c.gates else "changed"

        cases.expect(f"circuit {name} round trips", circuit_trip)
    return cases.results


# ----- doubling, tripling, masking -----

def suite_doubling(seed: int, trials: int = 2000) -> list[VerifyCaseResult]:
    cases = Cases("doubling")

    def pds_mean():
        report = estimate_expected_time(gen_pds(), trials, seed, convention=RateConvention.PER_RULE)
        want = chain_mean(RateConvention.PER_RULE)
        if report.success_rate != 1.0:
            return f"success rate {report.success_rate}"
        return None if abs(report.mean - want) <= 0.05 * want else f"mean {report.mean:.3f}, expected {want}"

    cases.expect("pair doubling takes 13 on average", pds_mean)

    for length in (2, 3, 4, 5, 8):
        def doubled(length=length):
            report = estimate_expected_time(gen_line_doubling(length), 20, seed)
            return None if report.success_rate == 1.0 else f"success rate {report.success_rate}"

        cases.expect(f"line of {length} doubles", doubled)

    def doubling_time():
        report = estimate_expected_time(gen_line_doubling(8), 200, seed)
        want = expected_doubling_time(8)
        return None if abs(report.mean - want) <= 0.2 * want else f"mean {report.mean:.3f}, expected {want:.3f}"

    cases.expect("doubling time matches the slowest pair", doubling_time)

    for length in (2, 4):
        cases.expect(f"line of {length} triples", lambda length=length: kinetic_check(gen_line_tripling(length), seed))
    for longer, shorter in ((5, 3), (6, 1)):
        cases.expect(
            f"masking {longer} by {shorter}", lambda a=longer, b=shorter: kinetic_check(gen_masking(a, b), seed),
        )
    return cases.results


# ----- synchronization -----

def suite_sync(seed: int, trials: int = 200) -> list[VerifyCaseResult]:
    cases = Cases("sync")
    sizes = (4, 8, 16, 32, 64)
    means = []
    for n in sizes:
        for bit in (0, 1):
            report = estimate_expected_time(gen_synchronization(n, bit), trials, seed)
            cases.expect(
                f"n={n} bit={bit}",
                lambda r=report: None if r.success_rate == 1.0 else f"success rate {r.success_rate}",
            )
            if bit == 0:
                means.append(report.mean)

    def log_scaling():
        fit = stats.linregress(np.log2(sizes), means)
        r2 = fit.rvalue ** 2
        return None if r2 >= 0.95 else f"R^2 of mean time on log n is {r2:.3f}"

    cases.expect("time grows like log n", log_scaling)
    return cases.results


# ----- line growth and counter -----

def suite_line_growth(seed: int, largest: int = 64) -> list[VerifyCaseResult]:
    cases = Cases("line-growth")
    counts = {}

    def walkers():
        for n in range(1, largest + 1):
            spec = gen_line_growth(format(n, "b"))
            counts[n] = spec.state_count()
            detail = walker_check(spec)
            if detail:
                return f"n={n}: {detail}"
        return None

    cases.expect(f"walker grows every n in 1..{largest}", walkers)
    cases.expect(
        "state count is the same for every n",
        lambda: None if len(set(counts.values())) <= 1 else f"state counts {sorted(set(counts.values()))}",
    )
    cases.expect("rules grow every n in 1..16, 3 trials each", lambda: kinetic_sweep(
        ((f"n={n}", gen_line_growth(format(n, "b"))) for n in range(1, 17)), seed, trials=3,
    ))

    def phases():
        for n in range(1, 17):
            result = line_growth_phases(format(n, "b"), seed).result
            if result != n:
                return f"n={n}: registers gave {result}"
        return None

    cases.expect("parallel iterations with doubling, sync, tripling and masking", phases)

    def walker_scaling():
        sizes = [16, 32, 64]
        steps = []
        for n in sizes:
            spec = gen_line_growth(format(n, "b"))
            steps.append(interpret(spec.program, spec.initial, strict=False)[1].steps)
        slope = stats.linregress(np.log(sizes), np.log(steps)).slope
        if abs(slope - spec.time_exponent) > 0.5:
            return f"walker steps grow like n^{slope:.2f}, declared n^{spec.time_exponent}"
        return None

    cases.expect("walker steps grow like the declared n^2", walker_scaling)
    return cases.results


def suite_counter(seed: int) -> list[VerifyCaseResult]:
    cases = Cases("counter")
    for width in (1, 2, 3):
        for padding in (0, 1, 2):
            cases.expect(f"width {width} padding {padding}", lambda w=width, p=padding: walker_check(gen_counter(w, p)))
    cases.expect("rules count width 2", lambda: kinetic_check(gen_counter(2, 1), seed))
    cases.expect(
        "state count does not depend on width",
        lambda: None if len({gen_counter(w, 1).state_count() for w in (1, 2, 3, 4)}) == 1 else "state counts differ",
    )
    return cases.results


# ----- sorting and pair evaluation -----

def suite_sort(seed: int, samples: int = 100) -> list[VerifyCaseResult]:
    cases = Cases("sort")
    rng = np.random.default_rng(seed)
    for n in (1, 2, 4, 8):
        def every_permutation(n=n):
            for values in itertools.permutations(range(n)):
                detail = walker_check(gen_sort(list(values)))
                if detail:
                    return f"{list(values)}: {detail}"
            return None

        cases.expect(f"every permutation of {n}", every_permutation)

    def sampled():
        for _ in range(samples):
            values = rng.permutation(8).tolist()
            detail = walker_check(gen_sort(values))
            if detail:
                return f"{values}: {detail}"
        return None

    cases.expect(f"{samples} permutations of 8", sampled)
    cases.expect("rules sort every permutation of 4", lambda: kinetic_sweep(
        ((str(list(v)), gen_sort(list(v))) for v in itertools.permutations(range(4))), seed,
    ))
    cases.expect("rules sort 10 permutations of 8", lambda: kinetic_sweep(
        ((str(v), gen_sort(v)) for v in (rng.permutation(8).tolist() for _ in range(10))), seed,
    ))

    def merge_phases():
        for values in itertools.permutations(range(8)):
            run_ = sort_phases(values)
            if run_.result != list(range(8)):
                return f"{list(values)} sorted to {run_.result}"
        return None

    cases.expect("merge phases sort all 40320 permutations", merge_phases)
    return cases.results


def random_segments(rng: np.random.Generator, n: int, k: int) -> list[list[int]]:
    return rng.integers(0, 2, size=(n, k)).tolist()


def suite_parallel_eval(seed: int) -> list[VerifyCaseResult]:
    cases = Cases("parallel-eval")
    rng = np.random.default_rng(seed)
    for name, fragment in FRAGMENTS.items():
        def fragment_cases(fragment=fragment):
            for n, k in ((1, 1), (2, 2), (2, 3), (4, 1)):
                a, b = random_segments(rng, n, k), random_segments(rng, n, k)
                detail = walker_check(gen_parallel_eval(a, b, fragment))
                if detail:
                    return f"A={a} B={b}: {detail}"
                if pair_eval_phases(a, b, fragment).result != expected_output(a, b, fragment):
                    return f"A={a} B={b}: phases disagree"
            return None

        cases.expect(f"F = {name}", fragment_cases)
    cases.expect("rules evaluate AND on 2 pairs", lambda: kinetic_check(gen_parallel_eval([[1, 0], [1, 1]], [[1, 1], [0, 1]]), seed))
    return cases.results


# ----- matrices and closure -----

def all_matrices(n: int):
    for bits in itertools.product((0, 1), repeat=n * n):
        yield np.array(bits, dtype=bool).reshape(n, n)


def suite_matmul(seed: int, samples: int = 20) -> list[VerifyCaseResult]:
    cases = Cases("matmul")
    rng = np.random.default_rng(seed)

    def every_2x2():
        for a in all_matrices(2):
            for b in all_matrices(2):
                detail = walker_check(gen_matmul(a, b))
                if detail:
                    return f"A={as_rows(a)} B={as_rows(b)}: {detail}"
        return None

    cases.expect("all 256 pairs of 2x2 matrices", every_2x2)

    def random_3x3():
        for _ in range(samples):
            a, b = rng.integers(0, 2, size=(3, 3)), rng.integers(0, 2, size=(3, 3))
            detail = walker_check(gen_matmul(a, b))
            if detail:
                return f"A={a.tolist()} B={b.tolist()}: {detail}"
            if not np.array_equal(matmul_phases(a, b).result, boolean_product(a, b)):
                return f"A={a.tolist()} B={b.tolist()}: phases disagree"
        return None

    cases.expect(f"{samples} random 3x3 pairs", random_3x3)
    cases.expect("rules multiply 16 pairs of 2x2", lambda: kinetic_sweep(
        ((f"A={as_rows(a)} B={as_rows(b)}", gen_matmul(a, b))
         for a, b in itertools.islice(zip(all_matrices(2), reversed(list(all_matrices(2)))), 16)),
        seed,
    ))
    return cases.results


def suite_closure(seed: int, graphs: int = 100) -> list[VerifyCaseResult]:
    cases = Cases("closure")
    rng = np.random.default_rng(seed)

    def random_graphs():
        for i in range(graphs):
            k = int(rng.integers(1, 65))
            m = rng.random((k, k)) < rng.uniform(0.0, 3.0 / k)
            if not np.array_equal(path_complete(m), closure_oracle(m)):
                return f"graph {i} with {k} nodes"
        return None

    cases.expect(f"squaring equals transitive closure on {graphs} graphs", random_graphs)
    return cases.results


# ----- machines and circuits -----

def short_inputs(longest: int = 6):
    for n in range(longest + 1):
        for bits in itertools.product("01", repeat=n):
            yield "".join(bits)


def suite_tm(seed: int, longest: int = 6) -> list[VerifyCaseResult]:
    cases = Cases("tm")
    for name, build in MACHINES.items():
        tm = build()
        inputs = [x for x in short_inputs(longest) if accepts(tm, x)]

        def squaring(tm=tm, inputs=inputs):
            checked = 0
            for x in inputs:
                if ConfigLayout.of(tm, len(x)).count() > ABSTRACT_CONFIG_LIMIT:
                    continue
                if simulate_by_squaring(tm, x) != tm_oracle(tm, x):
                    return f"'{x}': squaring gave {simulate_by_squaring(tm, x)!r}, expected {tm_oracle(tm, x)!r}"
                tm_phases(tm, x)
                checked += 1
            return None if checked else "no input fits the abstract limit"

        cases.expect(f"{name}: squaring and extraction", squaring)

        def monomers(tm=tm, inputs=inputs):
            checked = 0
            for x in inputs:
                try:
                    spec = monomer_tm_pipeline(tm, x)
                except CapExceeded:
                    continue
                detail = walker_check(spec) or kinetic_check(spec, seed)
                if detail:
                    return f"'{x}': {detail}"
                checked += 1
            logger.debug(f"Monomer pipeline of {tm.name}: {checked} inputs within the configuration cap")
            return None if checked else "no input fits the configuration cap"

        cases.expect(f"{name}: monomer pipeline", monomers)
    cases.expect("one-writer rules write 1", lambda: kinetic_check(monomer_tm_pipeline(MACHINES["one-writer"](), "1"), seed))
    return cases.results


def suite_circuits(seed: int, trials: int = 20) -> list[VerifyCaseResult]:
    cases = Cases("circuits")
    for name, build in CIRCUITS.items():
        c = build()

        def every_input(c=c):
            for x in all_inputs(c):
                detail = walker_check(gen_circuit_sim(c, x))
                if detail:
                    return f"'{x}': {detail}"
                if circuit_phases(c, x).result != circuit_oracle(c, x):
                    return f"'{x}': layer phases disagree"
            return None

        cases.expect(f"{name}: every input", every_input)

        def rules_answer(c=c):
            for x in all_inputs(c):
                spec = gen_circuit_sim(c, x)
                for t in range(trials):
                    detail = kinetic_check(spec, seed, trial=t) or answer_stays_fixed(spec, seed, trial=t)
                    if detail:
                        return f"'{x}', trial {t}: {detail}"
            return None

        cases.expect(f"{name}: rules leave one fixed answer monomer, {trials} trials per input", rules_answer)

        def layout(c=c):
            rows = list(encoded_layers(encode_circuit(c)).values())
            want = [[g.type.value for g in layer] for layer in c.layers()]
            if rows != want:
                return f"encoded layers {rows}, expected {want}"
            address = c.addresses()
            wires = [list(g.destinations) for g in unfold_circuit(encode_circuit(c))]
            want_wires = [[address[d] for d in c.destinations(g.id)] for g in c.ordered()]
            return None if wires == want_wires else f"unfolded wires {wires}, expected {want_wires}"

        cases.expect(f"{name}: 2D encoding keeps the layers and wires", layout)
    return cases.results


SUITES: dict[str, Callable[[int], list[VerifyCaseResult]]] = {
    "grid": suite_grid,
    "movable-set": suite_movable_set,
    "kinetics": suite_kinetics,
    "ruledsl": suite_ruledsl,
    "doubling": suite_doubling,
    "sync": suite_sync,
    "line-growth": suite_line_growth,
    "counter": suite_counter,
    "sort": suite_sort,
    "parallel-eval": suite_parallel_eval,
    "matmul": suite_matmul,
    "closure": suite_closure,
    "tm": suite_tm,
    "circuits": suite_circuits,
}


def run_suite(name: str, seed: int) -> list[VerifyCaseResult]:
    logger.info(f"Verifying {name} (seed {seed})")
    results = SUITES[name](seed)
    failed = sum(not r.passed for r in results)
    logger.info(f"Suite {name}: {len(results) - failed}/{len(results)} cases passed")
    return results

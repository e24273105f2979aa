import itertools

import numpy as np
import pytest
from scipy import stats

from app.cli.suites import kinetic_check, walker_check
from app.constructions.counter import expected_columns, gen_counter
from app.constructions.doubling import (
    PDS_STEPS, chain_mean, expected_doubling_time, gen_line_doubling, gen_line_tripling, gen_pds,
    harmonic_estimate, sample_doubling_times,
)
from app.constructions.line_growth import gen_line_growth, line_growth_trace
from app.constructions.masking import gen_masking
from app.constructions.matrices import as_rows, boolean_product, decode_matrix, encode_matrix, gen_matmul
from app.constructions.parallel_eval import FRAGMENTS, expected_output, gen_parallel_eval
from app.constructions.phases import line_growth_phases, log_rounds, matmul_phases, pair_eval_phases, sort_phases
from app.constructions.registry import GENERATORS, build_construction
from app.constructions.sorting import gen_sort
from app.constructions.sync import gen_synchronization
from app.core.errors import CapExceeded, GenerationError
from app.engine.kinetics import run
from app.engine.walker import interpret
from app.models.enums import RateConvention, StopReason, TimeScale


# ----- doubling, tripling, masking -----

@pytest.mark.parametrize("length", [2, 3, 4, 7])
def test_line_doubling(length):
    spec = gen_line_doubling(length)
    assert len(spec.initial) == length
    assert kinetic_check(spec, seed=length) is None
    terminal = run(spec.initial, spec.rules, seed=1).terminal
    assert spec.decode(terminal) == 2 * length


def test_doubling_needs_a_pair():
    with pytest.raises(GenerationError) as exc:
        gen_line_doubling(1)
    assert exc.value.exit_code == 2


def test_pds_shape():
    spec = gen_pds()
    assert len(spec.rules) == PDS_STEPS
    assert sum(r.is_movement for r in spec.rules) == 2
    assert spec.time_exponent == 0.0


@pytest.mark.parametrize("length", [2, 3])
def test_line_tripling(length):
    assert kinetic_check(gen_line_tripling(length), seed=3) is None


@pytest.mark.parametrize("longer, shorter", [(5, 3), (6, 1), (2, 1)])
def test_masking(longer, shorter):
    spec = gen_masking(longer, shorter)
    terminal = run(spec.initial, spec.rules, seed=2).terminal
    assert spec.decode(terminal) == longer - shorter
    assert spec.target(terminal)


def test_masking_needs_a_longer_line():
    with pytest.raises(GenerationError):
        gen_masking(3, 3)


def test_chain_means():
    assert chain_mean(RateConvention.PER_RULE) == 13
    assert chain_mean(RateConvention.PER_CHOICE) == 12
    assert expected_doubling_time(2, RateConvention.PER_RULE) == pytest.approx(13, rel=1e-3)
    assert expected_doubling_time(2, RateConvention.PER_CHOICE) == pytest.approx(12, rel=1e-3)


def test_slowest_pair_is_bounded_by_the_harmonic_estimate():
    for length in (4, 8, 16):
        exact = expected_doubling_time(length, RateConvention.PER_RULE)
        assert 13 < exact < harmonic_estimate(length)


def test_sampled_doubling_times_match_the_exact_mean(rng):
    samples = sample_doubling_times(8, 20000, rng)
    assert samples.mean() == pytest.approx(expected_doubling_time(8, RateConvention.PER_RULE), rel=0.02)


# ----- synchronization -----

@pytest.mark.parametrize("n, bit", [(2, 0), (4, 1), (5, 1), (8, 0)])
def test_sync(n, bit):
    assert kinetic_check(gen_synchronization(n, bit), seed=n) is None


# ----- line growth and counter -----

@pytest.mark.parametrize("n", [1, 2, 3, 6, 11, 32])
def test_line_growth_walker(n):
    assert walker_check(gen_line_growth(format(n, "b"))) is None


@pytest.mark.parametrize("bits", ["1", "10", "11", "101", "110", "1000"])
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_line_growth_rules(bits, seed):
    spec = gen_line_growth(bits)
    assert kinetic_check(spec, seed=seed) is None
    trajectory = run(spec.initial, spec.rules, record=False, seed=seed, track_space=True)
    assert spec.decode(trajectory.terminal) == int(bits, 2)
    assert trajectory.max_rect.fits_within(spec.space_bound)


def test_line_growth_state_count_is_constant():
    assert len({gen_line_growth(format(n, "b")).state_count() for n in (1, 5, 40, 255)}) == 1


def test_line_growth_trace():
    assert line_growth_trace("101") == [(1, 2, 2), (1, 4, 4), (5, 8, 8)]
    assert line_growth_phases("101", seed=2).result == 5


def test_line_growth_walker_time_is_quadratic():
    spec = gen_line_growth("1")
    assert spec.time_scale == TimeScale.POLYNOMIAL
    sizes = [16, 32, 64]
    steps = []
    for n in sizes:
        spec = gen_line_growth(format(n, "b"))
        final, result = interpret(spec.program, spec.initial, strict=False)
        assert spec.target(final)
        steps.append(result.steps)
    slope = stats.linregress(np.log(sizes), np.log(steps)).slope
    assert abs(slope - spec.time_exponent) <= 0.5


@pytest.mark.slow
def test_line_growth_phase_time_stays_within_its_bound():
    iterations = [3, 4, 5, 6, 7]
    means = []
    for k in iterations:
        bits = "1" + "0" * (k - 1)
        runs = [line_growth_phases(bits, seed=seed) for seed in range(10)]
        means.append(np.mean([r.time for r in runs]))
    assert all(a < b for a, b in zip(means, means[1:]))
    # the bound is an upper bound: log n iterations, each at most O(log n)
    slope = stats.linregress(np.log(iterations), np.log(means)).slope
    assert 0.5 < slope <= runs[0].time_exponent + 0.5


@pytest.mark.parametrize("bits", ["", "012", "011"])
def test_line_growth_rejects_bad_bits(bits):
    with pytest.raises(GenerationError):
        gen_line_growth(bits)


@pytest.mark.parametrize("width, padding", itertools.product([1, 2, 3], [0, 2]))
def test_counter_walker(width, padding):
    assert walker_check(gen_counter(width, padding)) is None


def test_counter_rules_and_columns():
    assert expected_columns(2, 1) == [None, 0, None, 1, None, 2, None, 3]
    assert kinetic_check(gen_counter(1, 1), seed=4) is None


def test_counter_cap(settings):
    with pytest.raises(CapExceeded) as exc:
        gen_counter(settings.COUNTER_WIDTH_CAP + 1, 0)
    assert exc.value.exit_code == 6
    assert exc.value.details["setting"] == "COUNTER_WIDTH_CAP"


# ----- sorting, pair evaluation, matrices -----

@pytest.mark.parametrize("values", [[0], [1, 0], [3, 1, 0, 2], [5, 2, 7, 0, 1, 6, 4, 3]])
def test_sort_walker(values):
    assert walker_check(gen_sort(values)) is None


def test_sort_rules():
    assert kinetic_check(gen_sort([1, 0]), seed=6) is None


@pytest.mark.parametrize("values", [[], [0, 1, 2], [0, 0], [0, 4]])
def test_sort_rejects(values):
    with pytest.raises(GenerationError):
        gen_sort(values)


def test_sort_cap(settings):
    n = 2 * settings.SORT_CAP
    with pytest.raises(CapExceeded):
        gen_sort(list(range(n)))


def test_sort_phases():
    phases = sort_phases([5, 2, 7, 0, 1, 6, 4, 3])
    assert phases.result == list(range(8))
    assert phases.rounds == 3 + log_rounds(8)


@pytest.mark.parametrize("name", sorted(FRAGMENTS))
def test_parallel_eval(name):
    a, b = [[1, 0], [0, 1]], [[1, 1], [0, 1]]
    spec = gen_parallel_eval(a, b, name)
    assert walker_check(spec) is None
    assert pair_eval_phases(a, b, name).result == expected_output(a, b, FRAGMENTS[name])


def test_parallel_eval_and_rules():
    expected = expected_output([[1], [0]], [[1], [1]], FRAGMENTS["and"])
    assert expected == [[1], [0], [1], [0]]
    assert kinetic_check(gen_parallel_eval([[1], [0]], [[1], [1]]), seed=7) is None


def test_parallel_eval_rejects():
    with pytest.raises(GenerationError):
        gen_parallel_eval([[1]], [[1], [0]])
    with pytest.raises(GenerationError):
        gen_parallel_eval([[1], [0, 1]], [[1], [0]])
    with pytest.raises(GenerationError):
        gen_parallel_eval([[1]], [[1]], "nand")


def test_matmul_walker(rng):
    for _ in range(5):
        a, b = rng.integers(0, 2, size=(2, 2)), rng.integers(0, 2, size=(2, 2))
        spec = gen_matmul(a, b)
        assert walker_check(spec) is None
    assert as_rows(boolean_product([[1, 0], [1, 1]], [[0, 1], [1, 0]])) == ((0, 1), (1, 1))


def test_matrix_line_round_trip():
    m = [[1, 0, 1], [0, 0, 1], [1, 1, 0]]
    line = encode_matrix(m)
    assert line.row_states()[0] == "mat_m1"
    assert np.array_equal(decode_matrix(line), np.array(m))


def test_matmul_phases(rng):
    a, b = rng.integers(0, 2, size=(3, 3)), rng.integers(0, 2, size=(3, 3))
    assert np.array_equal(matmul_phases(a, b).result, boolean_product(a, b))


def test_matmul_limits():
    with pytest.raises(CapExceeded):
        gen_matmul(np.eye(4, dtype=int), np.eye(4, dtype=int))
    with pytest.raises(GenerationError):
        gen_matmul([[1, 0], [0, 1]], [[1]])


# ----- registry -----

def test_registry_builds_by_name():
    spec = build_construction("line-doubling", {"length": 4, "unused": 1})
    assert spec.name == "line-doubling"
    assert spec.params == {"length": 4}
    assert set(GENERATORS) >= {"pds", "sync", "sort", "matmul", "tm", "circuit"}


def test_registry_errors():
    with pytest.raises(GenerationError, match="needs length"):
        build_construction("line-doubling", {})
    with pytest.raises(GenerationError, match="unknown construction"):
        build_construction("line-quadrupling", {})


def test_generated_rules_halt_in_the_target():
    spec = build_construction("masking", {"longer": 4, "shorter": 2})
    trajectory = run(spec.initial, spec.rules, stop=spec.target, seed=3)
    assert trajectory.stop_reason == StopReason.TARGET


# ----- generators that share the record tape -----

@pytest.mark.parametrize("a, b", [([[1]], [[1]]), ([[0]], [[1]]), ([[1, 0], [0, 1]], [[0, 1], [1, 0]])])
def test_matmul_builds_and_runs(a, b):
    spec = gen_matmul(a, b)
    assert walker_check(spec) is None
    assert kinetic_check(spec, seed=1) is None

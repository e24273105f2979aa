"""Line doubling with the pair gadget, and line tripling built on it.

Each pair (L, R) runs a strictly sequential chain of 13 rules inside the
4x2 window above it and stays rigidly connected throughout.
"""
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate, stats

from app.constructions.common import bare_line, finish, require
from app.constructions.sync import PARITIES, SyncStates, split_received, sync_rules
from app.models.enums import BondType, Direction, RateConvention
from app.models.grid import BoundingRect
from app.models.models import EMPTY, Configuration, ConstructionSpec, Rule

RIGID, NULL = BondType.RIGID, BondType.NULL
PX, PY, MY, MW = Direction.PLUS_X, Direction.PLUS_Y, Direction.MINUS_Y, Direction.MINUS_W

PDS_STEPS = 13
PDS_MOVEMENTS = 2

LEFT_IN = "dbl_l1"
RIGHT = "dbl_r"
LEFT_OUT = "dbl_l0"
ODD_IN = "dbl_e1"


@dataclass(frozen=True)
class PairStates:
    """Inputs and outputs of one pair gadget instance; `tag` prefixes its intermediate states."""
    tag: str = "pds"
    left_in: str = LEFT_IN
    right_in: str = RIGHT
    left_out: str = LEFT_OUT
    inner_right_out: str = RIGHT
    inner_left_out: str = LEFT_OUT
    right_out: str = RIGHT


def pds_rules(pair: PairStates = PairStates()) -> list[Rule]:
    def s(name: str) -> str:
        return f"{pair.tag}_{name}"

    chain = [
        (pair.left_in, EMPTY, NULL, PY, s("a1"), s("t1"), RIGID, PY, "L grows T1"),
        (s("t1"), EMPTY, NULL, PX, s("t1b"), s("t2"), RIGID, PX, "T1 grows T2"),
        (s("t2"), pair.right_in, NULL, MY, s("t2b"), s("b1"), RIGID, MY, "T2 bonds to R"),
        (s("a1"), s("b1"), RIGID, PX, s("a2"), s("b2"), NULL, PX, "L lets go of R"),
        (s("t2b"), s("b2"), RIGID, MY, s("t2c"), s("b3"), RIGID, MW, "first insertion: R moves right"),
        (EMPTY, s("b3"), NULL, PX, s("n1"), s("b4"), RIGID, PX, "N1 appears"),
        (s("t2c"), s("n1"), NULL, MY, s("t2d"), s("n1b"), RIGID, MY, "T2 bonds to N1"),
        (s("t2d"), s("b4"), RIGID, MW, s("t2e"), pair.right_out, NULL, MW, "T2 lets go of R"),
        (s("t2e"), s("n1b"), RIGID, MY, s("t2f"), s("n1c"), RIGID, MW, "second insertion: N1 moves right"),
        (EMPTY, s("n1c"), NULL, PX, s("n2"), pair.inner_left_out, RIGID, PX, "N2 appears"),
        (s("a2"), s("n2"), NULL, PX, pair.left_out, s("n2b"), RIGID, PX, "L bonds to N2"),
        (s("t2f"), s("n2b"), NULL, MY, EMPTY, s("n2c"), NULL, MY, "T2 disappears"),
        (s("t1b"), s("n2c"), NULL, MW, EMPTY, pair.inner_right_out, NULL, MW, "T1 disappears"),
    ]
    return [
        Rule(s1, s2, b, u, s1p, s2p, bp, up, comment=f"{pair.tag} {i}: {note}")
        for i, (s1, s2, b, u, s1p, s2p, bp, up, note) in enumerate(chain, start=1)
    ]


def doubling_rules() -> list[Rule]:
    rules = pds_rules()
    rules.append(Rule(ODD_IN, EMPTY, NULL, PX, LEFT_OUT, RIGHT, RIGID, PX,
                      comment="odd end: append one monomer"))
    return rules


def doubling_input(length: int) -> Configuration:
    states = [LEFT_IN, RIGHT] * (length // 2)
    if length % 2:
        states.append(ODD_IN)
    return Configuration.line(states)


def gen_pds() -> ConstructionSpec:
    """One pair doubling on its own: 2 monomers in, 4 out."""
    expected = [LEFT_OUT, RIGHT, LEFT_OUT, RIGHT]
    return finish(ConstructionSpec(
        name="pds",
        rules=pds_rules(),
        initial=doubling_input(2),
        target=lambda c: bare_line(c) == expected,
        params={},
        time_exponent=0.0,
        space_bound=BoundingRect(4, 2),
        target_description="the 4-monomer output line",
        decode=bare_line,
    ))


def gen_line_doubling(length: int) -> ConstructionSpec:
    require(length >= 2, "line doubling needs at least 2 monomers", length=length)
    expected = [LEFT_OUT, RIGHT] * length

    def decode(config: Configuration):
        states = bare_line(config)
        return len(states) if states == [LEFT_OUT, RIGHT] * (len(states or []) // 2) and states else None

    return finish(ConstructionSpec(
        name="line-doubling",
        rules=doubling_rules(),
        initial=doubling_input(length),
        target=lambda c: bare_line(c) == expected,
        params={"length": length},
        time_exponent=1.0,
        space_bound=BoundingRect(2 * length, 2),
        target_description=f"alternating line of {2 * length} monomers",
        decode=decode,
    ))


# ===== Expected completion times =====

def chain_mean(convention: RateConvention = RateConvention.PER_CHOICE) -> float:
    """Mean time of one pair's chain: 13 under per-rule rates, 12 under per-choice rates."""
    if RateConvention(convention) == RateConvention.PER_RULE:
        return float(PDS_STEPS)
    return (PDS_STEPS - PDS_MOVEMENTS) + PDS_MOVEMENTS / 2


def harmonic_estimate(length: int) -> float:
    """13 * H(l/2), an upper bound on the expected doubling time."""
    return PDS_STEPS * sum(1.0 / i for i in range(1, length // 2 + 1))


def chain_cdf(t: float, convention: RateConvention = RateConvention.PER_CHOICE) -> float:
    if t <= 0:
        return 0.0
    if RateConvention(convention) == RateConvention.PER_RULE:
        return float(stats.gamma.cdf(t, PDS_STEPS))
    plain = PDS_STEPS - PDS_MOVEMENTS
    value, _ = integrate.quad(
        lambda s: stats.gamma.pdf(s, plain) * stats.gamma.cdf(t - s, PDS_MOVEMENTS, scale=0.5), 0, t
    )
    return value


@lru_cache(maxsize=64)
def expected_doubling_time(length: int, convention: RateConvention = RateConvention.PER_CHOICE) -> float:
    """Exact mean of the slowest of the independent pair chains (plus the odd end's single step)."""
    pairs = length // 2
    odd = length % 2

    def survival(t: float) -> float:
        done = chain_cdf(t, convention) ** pairs
        if odd:
            done *= 1.0 - math.exp(-t)
        return 1.0 - done

    upper = chain_mean(convention) * 4 + 10 * math.log(max(pairs, 1) + 1) + 40
    value, _ = integrate.quad(survival, 0, upper, limit=200)
    return value


def sample_doubling_times(length: int, trials: int, rng: np.random.Generator) -> np.ndarray:
    """Monte Carlo draw of completion times under per-rule rates, for cross-checks."""
    pairs = rng.gamma(PDS_STEPS, 1.0, size=(trials, length // 2)).max(axis=1)
    if length % 2:
        pairs = np.maximum(pairs, rng.exponential(1.0, size=trials))
    return pairs


# ===== Tripling =====

TRIPLE_HEAD = "tri_h"
TRIPLE_LEFT = "tri_l"
TRIPLE_RIGHT = "tri_r"
TRIPLE_ODD = "tri_e"
TRIPLE_SYNC = SyncStates(prefix="tsy", payloads=("k", "p", "q", "e"), bits=(1,))


def tripling_rules() -> list[Rule]:
    """Insert one monomer per input monomer, synchronize the whole line, insert one more.

    The first round is the pair gadget; its outputs are tagged so that after
    the lift synchronization the right half of each original pair (tags p, q)
    runs the gadget once more, adding the second monomer per input monomer.
    """
    sync = TRIPLE_SYNC
    out_a, out_b = sync.received(1, "a", "k"), sync.received(1, "b", "k")
    first_round = dict(
        right_in=TRIPLE_RIGHT,
        inner_right_out=sync.line("b", "k"),
        inner_left_out=sync.line("a", "p"),
        right_out=sync.line("b", "q"),
    )
    rules = pds_rules(PairStates(tag="trh", left_in=TRIPLE_HEAD, left_out=sync.head(1, "k"), **first_round))
    rules += pds_rules(PairStates(tag="trn", left_in=TRIPLE_LEFT, left_out=sync.line("a", "k"), **first_round))
    rules.append(Rule(TRIPLE_ODD, EMPTY, NULL, PX, sync.line("a", "k"), sync.line("b", "e"), RIGID, PX,
                      comment="odd end: first insertion"))
    rules += sync_rules(sync)
    rules += pds_rules(PairStates(
        tag="trr",
        left_in=sync.received(1, "a", "p"),
        right_in=sync.received(1, "b", "q"),
        left_out=out_a,
        inner_right_out=out_b,
        inner_left_out=out_a,
        right_out=out_b,
    ))
    rules.append(Rule(sync.received(1, "b", "e"), EMPTY, NULL, PX, out_b, out_a, RIGID, PX,
                      comment="odd end: second insertion"))
    return rules


def tripling_input(length: int) -> Configuration:
    states = [TRIPLE_HEAD, TRIPLE_RIGHT] + [TRIPLE_LEFT, TRIPLE_RIGHT] * (length // 2 - 1)
    if length % 2:
        states.append(TRIPLE_ODD)
    return Configuration.line(states)


def tripled_length(config: Configuration) -> int | None:
    """Length of the alternating output line, or None if anything else is left besides the lifted row."""
    sync = TRIPLE_SYNC
    outputs = {sync.received(1, p, "k") for p in PARITIES}
    line, rest = split_received(config, outputs)
    if not line or any(s != sync.received(1, PARITIES[i % 2], "k") for i, s in enumerate(line)):
        return None
    if set(rest.monomers.values()) - sync.sync_names():
        return None
    return len(line)


def gen_line_tripling(length: int) -> ConstructionSpec:
    require(length >= 2, "line tripling needs at least 2 monomers", length=length)
    return finish(ConstructionSpec(
        name="line-tripling",
        rules=tripling_rules(),
        initial=tripling_input(length),
        target=lambda c: tripled_length(c) == 3 * length,
        params={"length": length},
        time_exponent=1.0,
        space_bound=BoundingRect(3 * length + 1, 5),
        target_description=f"alternating line of {3 * length} monomers above the lifted synchronization row",
        decode=tripled_length,
    ))

"""`nubot gen <construction>`: write a construction's rules, initial configuration and manifest.

Every generator in the registry becomes a subcommand whose options are the
generator's parameters, e.g. `nubot gen line-doubling --length 8`.
"""
from pathlib import Path
from typing import Any, Callable, Mapping

import click

from app.cli.common import CliContext, dump_yaml, pass_cli, plain, read_text, write_text
from app.constructions.matrices import parse_matrix
from app.constructions.registry import GENERATORS, Generator, build_construction
from app.core.errors import GenerationError, ParseError
from app.core.logging import logger
from app.formats.machinefiles import parse_circuit, parse_tm
from app.formats.ruledsl import serialize_config, serialize_ruleset
from app.machines.circuits import get_circuit
from app.machines.tm import get_machine
from app.models.models import ConstructionSpec
from app.schemas.schemas import ConstructionManifest, RectSchema


def parse_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise GenerationError(f"'{text}' is not an integer") from None


def parse_int_list(text: str) -> list[int]:
    """Comma-separated integers, e.g. "2,0,3,1"."""
    return [parse_int(t.strip()) for t in text.split(",") if t.strip()]


def parse_segments(text: str) -> list[list[int]]:
    """Comma-separated binary segments, e.g. "01,10"."""
    segments = []
    for s in (t.strip() for t in text.split(",")):
        if not s:
            continue
        if any(c not in "01" for c in s):
            raise GenerationError(f"segment '{s}' is not binary")
        segments.append([int(c) for c in s])
    return segments


def parse_word(text: str) -> str:
    if any(c not in "01" for c in text):
        raise GenerationError(f"'{text}' is not a binary word")
    return text


def load_machine(value: str):
    """A shipped machine by name, or a .tm file."""
    if value.endswith(".tm") or Path(value).is_file():
        return parse_tm(read_text(value))
    return get_machine(value)


def load_circuit(value: str):
    """A shipped circuit by name, or a .ckt file."""
    if value.endswith(".ckt") or Path(value).is_file():
        return parse_circuit(read_text(value))
    return get_circuit(value)


def _matrix(text: str):
    try:
        return parse_matrix(text)
    except ParseError as exc:
        raise GenerationError(exc.message) from None


PARSERS: dict[str, Callable[[str], Any]] = {
    "length": parse_int,
    "longer": parse_int,
    "shorter": parse_int,
    "n": parse_int,
    "bit": parse_int,
    "width": parse_int,
    "padding": parse_int,
    "values": parse_int_list,
    "bits": parse_word,
    "a": _matrix,
    "b": _matrix,
    "fragment": str,
    "machine": load_machine,
    "input": parse_word,
    "circuit": load_circuit,
}

# parameters whose text means something else for one construction
OVERRIDES: dict[str, dict[str, Callable[[str], Any]]] = {
    "parallel-eval": {"a": parse_segments, "b": parse_segments},
}

HELP = {
    "length": "Monomers in the input line.",
    "longer": "Length of the lower line.",
    "shorter": "Length of the upper line.",
    "n": "Monomers in the line.",
    "bit": "Bit to broadcast (0 or 1).",
    "width": "Counter width in bits.",
    "padding": "Filler columns between counter values.",
    "values": "Comma-separated values to sort, a permutation of 0..n-1.",
    "bits": "Binary string of the target length, MSB first.",
    "a": "First operand: rows (matmul) or segments (parallel-eval), comma separated.",
    "b": "Second operand, same shape as --a.",
    "fragment": "Pair function F: and, or, xor, left, right, eq, lt.",
    "machine": "Shipped machine name or a .tm file.",
    "input": "Input word.",
    "circuit": "Shipped circuit name or a .ckt file.",
}


def parse_params(construction: str, raw: Mapping[str, str]) -> dict[str, Any]:
    """Generator arguments from their command-line text."""
    parsers = {**PARSERS, **OVERRIDES.get(construction, {})}
    return {k: parsers.get(k, str)(v) for k, v in raw.items() if v is not None}


def build_from_text(construction: str, raw: Mapping[str, str]) -> ConstructionSpec:
    return build_construction(construction, parse_params(construction, raw))


def construction_manifest(generator: str, spec: ConstructionSpec, raw: Mapping[str, str], stem: str) -> ConstructionManifest:
    bound = spec.space_bound
    return ConstructionManifest(
        construction=generator,
        params={k: v for k, v in raw.items() if v is not None},
        rules_file=f"{stem}.nbr",
        config_file=f"{stem}.nbc",
        target=spec.target_description,
        rule_count=len(spec.rules),
        state_count=spec.state_count(),
        time_exponent=spec.time_exponent,
        time_scale=spec.time_scale,
        space_bound=RectSchema(width=bound.width, height=bound.height) if bound else None,
        notes=[f"{k} = {v}" for k, v in plain(spec.params).items()],
    )


def write_construction(ctx: CliContext, generator: str, raw: Mapping[str, str]) -> ConstructionManifest:
    spec = build_from_text(generator, raw)
    stem = spec.name
    write_text(ctx, f"{stem}.nbr", serialize_ruleset(spec.rules, name=stem.replace("-", "_")))
    write_text(ctx, f"{stem}.nbc", serialize_config(spec.initial))
    manifest = construction_manifest(generator, spec, raw, stem)
    write_text(ctx, f"{stem}.yaml", dump_yaml(manifest))
    logger.info(f"Wrote {stem}: {manifest.rule_count} rules, {manifest.state_count} states")
    return manifest


def _command(gen: Generator) -> click.Command:
    params = [
        click.Option([f"--{p}"], required=p in gen.required, help=HELP.get(p))
        for p in gen.required + gen.optional
    ]

    @pass_cli
    def callback(ctx: CliContext, **raw):
        manifest = write_construction(ctx, gen.name, raw)
        for path in ctx.written:
            click.echo(str(path))
        click.echo(f"rules: {manifest.rule_count}  states: {manifest.state_count}  target: {manifest.target}")

    return click.Command(gen.name, params=params, callback=callback, help=gen.summary)


@click.group("gen")
def gen_group():
    """Generate a construction: .nbr rules, .nbc initial configuration and a YAML manifest."""


for _gen in GENERATORS.values():
    gen_group.add_command(_command(_gen))

"""Construction generators by name, for the CLI and for worker processes that rebuild specs."""
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from app.constructions.counter import gen_counter
from app.constructions.doubling import gen_line_doubling, gen_line_tripling, gen_pds
from app.constructions.line_growth import gen_line_growth
from app.constructions.masking import gen_masking
from app.constructions.matrices import gen_matmul
from app.constructions.parallel_eval import gen_parallel_eval
from app.constructions.sorting import gen_sort
from app.constructions.sync import gen_synchronization
from app.core.errors import GenerationError
from app.core.logging import logger
from app.machines.circuits import CircuitDesc, gen_circuit_sim, get_circuit
from app.machines.pipeline import monomer_tm_pipeline
from app.machines.tm import TMSpec, get_machine
from app.models.models import ConstructionSpec


def _tm(machine: Any, input: str) -> ConstructionSpec:
    tm = machine if isinstance(machine, TMSpec) else get_machine(machine)
    return monomer_tm_pipeline(tm, input)


def _circuit(circuit: Any, input: str) -> ConstructionSpec:
    c = circuit if isinstance(circuit, CircuitDesc) else get_circuit(circuit)
    return gen_circuit_sim(c, input)


@dataclass(frozen=True)
class Generator:
    name: str
    build: Callable[..., ConstructionSpec]
    required: tuple[str, ...] = ()
    optional: tuple[str, ...] = ()
    summary: str = ""


GENERATORS: dict[str, Generator] = {g.name: g for g in (
    Generator("pds", gen_pds, summary="one pair doubling, 2 monomers to 4"),
    Generator("line-doubling", gen_line_doubling, ("length",), summary="line of l monomers to 2l"),
    Generator("line-tripling", gen_line_tripling, ("length",), summary="line of l monomers to 3l"),
    Generator("masking", gen_masking, ("longer", "shorter"), summary="difference of two touching lines"),
    Generator("sync", gen_synchronization, ("n", "bit"), summary="send one bit to every monomer of a line"),
    Generator("line-growth", gen_line_growth, ("bits",), summary="line of n monomers from the binary string of n"),
    Generator("counter", gen_counter, ("width", "padding"), summary="padded binary counter"),
    Generator("sort", gen_sort, ("values",), summary="sort a line of binary segments"),
    Generator("parallel-eval", gen_parallel_eval, ("a", "b"), ("fragment",), summary="F on every pair of segments"),
    Generator("matmul", gen_matmul, ("a", "b"), summary="Boolean matrix product"),
    Generator("tm", _tm, ("machine", "input"), summary="machine output by configuration-matrix squaring"),
    Generator("circuit", _circuit, ("circuit", "input"), summary="layered Boolean circuit evaluation"),
)}


def get_generator(name: str) -> Generator:
    try:
        return GENERATORS[name]
    except KeyError:
        raise GenerationError(f"unknown construction '{name}'", details={"known": sorted(GENERATORS)}) from None


def build_construction(name: str, params: Mapping[str, Any]) -> ConstructionSpec:
    gen = get_generator(name)
    missing = [p for p in gen.required if p not in params]
    if missing:
        raise GenerationError(f"{name} needs {', '.join(missing)}", details={"missing": missing})
    accepted = set(gen.required) | set(gen.optional)
    ignored = sorted(set(params) - accepted)
    if ignored:
        logger.debug(f"Ignoring parameters {ignored} for {name}")
    return gen.build(**{k: v for k, v in params.items() if k in accepted})

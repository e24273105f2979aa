"""`nubot verify <suite>`: run oracle suites and print a pass/fail table."""
from concurrent.futures import ProcessPoolExecutor

import click

from app.cli.common import CliContext, pass_cli, write_text
from app.cli.suites import SUITES, run_suite
from app.core.errors import VerificationFailed
from app.core.logging import logger
from app.schemas.schemas import VerifyCaseResult, VerifySummary

ALL = "all"


def summarize(suite: str, results: list[VerifyCaseResult]) -> VerifySummary:
    passed = sum(r.passed for r in results)
    return VerifySummary(suite=suite, total=len(results), passed=passed, failed=len(results) - passed, cases=results)


def run_suites(names: list[str], seed: int, workers: int = 1) -> list[VerifySummary]:
    """Suites in the order given; with several workers they run in separate processes."""
    if workers > 1 and len(names) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(names))) as pool:
            outcomes = list(pool.map(run_suite, names, [seed] * len(names)))
    else:
        outcomes = [run_suite(name, seed) for name in names]
    return [summarize(name, results) for name, results in zip(names, outcomes)]


def format_table(summaries: list[VerifySummary], verbose: bool = False) -> str:
    width = max((len(s.suite) for s in summaries), default=5)
    lines = [f"{'suite':<{width}}  {'passed':>6}  {'failed':>6}  status", "-" * (width + 26)]
    for s in summaries:
        lines.append(f"{s.suite:<{width}}  {s.passed:>6}  {s.failed:>6}  {'ok' if s.ok else 'FAIL'}")
        for case in s.cases:
            if not case.passed or (verbose and case.detail):
                mark = "  ok " if case.passed else "  !! "
                lines.append(f"{mark}{case.case}" + (f": {case.detail}" if case.detail else ""))
    return "\n".join(lines) + "\n"


@click.command("verify")
@click.argument("suite", type=click.Choice([*SUITES, ALL]))
@click.option("-v", "--verbose", is_flag=True, help="List every case, not only the failures.")
@click.option("--report/--no-report", default=False, help="Write the summaries as JSON lines under --out.")
@pass_cli
def verify_command(ctx: CliContext, suite, verbose, report):
    """Check SUITE (or all suites) against its oracles; exits non-zero on any failure."""
    names = list(SUITES) if suite == ALL else [suite]
    summaries = run_suites(names, ctx.seed, ctx.workers)
    click.echo(format_table(summaries, verbose), nl=False)
    if report:
        write_text(ctx, f"verify-{suite}.jsonl", "".join(s.model_dump_json() + "\n" for s in summaries))

    failed = [s.suite for s in summaries if not s.ok]
    if failed:
        logger.error(f"Verification failed in {', '.join(failed)}")
        return VerificationFailed.exit_code
    logger.info(f"All {sum(s.total for s in summaries)} cases passed")
    return 0

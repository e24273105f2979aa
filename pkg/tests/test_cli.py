import json

import pytest
import yaml

from app.cli import cli
from app.formats.traces import read_trace

QUIET = ["--no-log-file", "--log-level", "ERROR", "--workers", "1"]


@pytest.fixture
def invoke(runner, tmp_path):
    def call(*args, out=None):
        return runner.invoke(cli, [*QUIET, "--out", str(out or tmp_path), *args])

    return call


@pytest.fixture
def doubling_files(invoke, tmp_path):
    result = invoke("gen", "line-doubling", "--length", "4")
    assert result.exit_code == 0, result.output
    return tmp_path / "line-doubling.nbr", tmp_path / "line-doubling.nbc"


def test_version(runner):
    result = runner.invoke(cli, ["--version"])
    assert result.exit_code == 0
    assert "1.0.0" in result.stdout


def test_gen_writes_rules_config_and_manifest(invoke, tmp_path):
    result = invoke("gen", "line-doubling", "--length", "4")
    assert result.exit_code == 0, result.output
    for suffix in ("nbr", "nbc", "yaml"):
        assert (tmp_path / f"line-doubling.{suffix}").is_file()
    manifest = yaml.safe_load((tmp_path / "line-doubling.yaml").read_text())
    assert manifest["construction"] == "line-doubling"
    assert manifest["params"] == {"length": "4"}
    assert manifest["rule_count"] == 14
    assert (manifest["time_exponent"], manifest["time_scale"]) == (1.0, "polylog")
    assert "rules: 14" in result.stdout
    assert (tmp_path / "line-doubling.nbr").read_text().startswith("nubot-format 1\nname line_doubling\n")


def test_gen_parallel_eval_takes_segments(invoke, tmp_path):
    result = invoke("gen", "parallel-eval", "--a", "10,01", "--b", "11,01", "--fragment", "xor")
    assert result.exit_code == 0, result.output
    assert (tmp_path / "parallel-eval.nbc").is_file()


def test_gen_errors(invoke):
    assert invoke("gen", "line-doubling", "--length", "1").exit_code == 2
    assert invoke("gen", "line-doubling").exit_code == 2
    identity = "1000,0100,0010,0001"
    capped = invoke("gen", "matmul", "--a", identity, "--b", identity)
    assert capped.exit_code == 6
    assert json.loads(capped.stderr.strip().splitlines()[-1])["error"]["code"] == "CAP_EXCEEDED"


def test_run_writes_trace_and_snapshot(invoke, tmp_path, doubling_files):
    rules, config = doubling_files
    result = invoke("--seed", "3", "run", str(rules), str(config))
    assert result.exit_code == 0, result.output
    assert "stop: halted" in result.stdout
    assert "events: 26" in result.stdout
    header, records = read_trace((tmp_path / "line-doubling.nbt").read_text())
    assert header.seed == 3
    assert len(records) == 26
    assert (tmp_path / "line-doubling.txt").is_file()


def test_run_is_reproducible(invoke, tmp_path, doubling_files):
    rules, config = doubling_files
    traces = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert invoke("--seed", "11", "run", str(rules), str(config), out=out).exit_code == 0
        traces.append((out / "line-doubling.nbt").read_text())
    assert traces[0] == traces[1]


def test_run_from_manifest(invoke, tmp_path, doubling_files):
    manifest = tmp_path / "double.yaml"
    manifest.write_text(yaml.safe_dump({
        "rules": "line-doubling.nbr",
        "config": "line-doubling.nbc",
        "seed": 5,
        "snapshot_format": "svg",
    }))
    result = invoke("run", "--manifest", str(manifest))
    assert result.exit_code == 0, result.output
    assert (tmp_path / "double.nbt").is_file()
    assert (tmp_path / "double.svg").read_text().startswith("<svg")


def test_run_budget(invoke, doubling_files):
    rules, config = doubling_files
    result = invoke("--max-events", "3", "run", str(rules), str(config))
    assert result.exit_code == 3
    assert "stop: budget" in result.stdout


def test_run_errors(invoke, tmp_path, doubling_files):
    rules, config = doubling_files
    missing = invoke("run", str(tmp_path / "nope.nbr"), str(config))
    assert missing.exit_code == 5
    assert json.loads(missing.stderr.strip().splitlines()[-1])["error"]["code"] == "IO_ERROR"

    broken = tmp_path / "broken.nbr"
    broken.write_text("nubot-format 1\na, b, rigid, +x -> a, b, rigid, -x\n")
    result = invoke("run", str(broken), str(config))
    assert result.exit_code == 4
    assert "MOVEMENT_DISTANCE_NOT_ONE" in result.stderr

    assert invoke("run", str(rules)).exit_code == 2

    bad_manifest = tmp_path / "bad.yaml"
    bad_manifest.write_text("rules: [unclosed\n")
    assert invoke("run", "--manifest", str(bad_manifest)).exit_code == 4


def test_render(invoke, tmp_path, doubling_files):
    _, config = doubling_files
    result = invoke("render", str(config))
    assert result.exit_code == 0, result.output
    assert "snapshot:" in result.stdout
    assert (tmp_path / "line-doubling.txt").read_text().splitlines()[0].startswith("A * B * A * B")

    svg = invoke("--format", "svg", "render", str(config))
    assert svg.exit_code == 0
    assert (tmp_path / "line-doubling.svg").is_file()


def test_stats_by_name(invoke, tmp_path):
    result = invoke("--seed", "2", "stats", "pds", "--trials", "20")
    assert result.exit_code == 0, result.output
    report = json.loads((tmp_path / "pds.stats.json").read_text())
    assert report["trials"] == 20
    assert report["success_rate"] == 1.0
    assert report["max_rect"]["width"] == 4
    assert report["max_rect"]["height"] <= 2
    assert "exact chain mean" in result.stdout


def test_stats_from_generated_manifest(invoke, tmp_path, doubling_files):
    result = invoke("stats", str(tmp_path / "line-doubling.yaml"), "--trials", "5")
    assert result.exit_code == 0, result.output
    assert "13 * H(l/2) upper bound" in result.stdout
    assert invoke("stats", "line-doubling", "-p", "length").exit_code == 2


def test_verify(invoke, tmp_path):
    result = invoke("verify", "grid", "--report")
    assert result.exit_code == 0, result.output
    assert "grid" in result.stdout and "FAIL" not in result.stdout
    summary = json.loads((tmp_path / "verify-grid.jsonl").read_text().splitlines()[0])
    assert summary["failed"] == 0
    assert invoke("verify", "nonsense").exit_code == 2


def test_walker_manifest_declares_polynomial_time(invoke, tmp_path):
    result = invoke("gen", "sort", "--values", "1,0")
    assert result.exit_code == 0, result.output
    manifest = yaml.safe_load((tmp_path / "sort.yaml").read_text())
    assert (manifest["time_exponent"], manifest["time_scale"]) == (2.0, "polynomial")

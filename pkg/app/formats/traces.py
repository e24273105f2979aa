"""JSON Lines traces (.nbt): one header record, then one record per applied event."""
import json
from typing import Optional

from pydantic import ValidationError

from app.core.errors import ParseError
from app.models.models import Trajectory
from app.schemas.schemas import RunManifest, TraceHeader, TraceRecord


def trajectory_records(trajectory: Trajectory) -> list[TraceRecord]:
    return [
        TraceRecord(
            index=step.index,
            time=step.time,
            rule_id=step.event.rule_id,
            anchor=(step.event.anchor.x, step.event.anchor.y),
            orientation=step.event.u,
            arm=step.event.arm,
            movable_size=len(step.event.movable),
            digest=step.digest,
        )
        for step in trajectory.steps
    ]


def write_trace(
    trajectory: Trajectory,
    rule_count: int,
    initial_digest: str,
    manifest: Optional[RunManifest] = None,
) -> str:
    header = TraceHeader(
        seed=trajectory.seed,
        rule_count=rule_count,
        initial_digest=initial_digest,
        manifest=manifest,
    )
    return dump_records(header, trajectory_records(trajectory))


def dump_records(header: TraceHeader, records: list[TraceRecord]) -> str:
    lines = [header.model_dump_json()]
    lines.extend(record.model_dump_json() for record in records)
    return "\n".join(lines) + "\n"


def read_trace(text: str) -> tuple[TraceHeader, list[TraceRecord]]:
    header: Optional[TraceHeader] = None
    records: list[TraceRecord] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            payload = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", line=line_no, column=exc.colno) from None
        try:
            if header is None:
                header = TraceHeader.model_validate(payload)
                continue
            record = TraceRecord.model_validate(payload)
        except ValidationError as exc:
            raise ParseError(f"invalid trace record: {exc.errors()[0]['msg']}", line=line_no, column=1) from None
        if records and (record.index <= records[-1].index or record.time <= records[-1].time):
            raise ParseError("trace records must have increasing index and time", line=line_no, column=1)
        records.append(record)
    if header is None:
        raise ParseError("trace has no header record", line=1, column=1)
    return header, records

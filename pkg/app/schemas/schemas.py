from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, Field, field_validator

from app.models.enums import ArmChoice, Direction, RateConvention, RenderFormat, TimeScale


# ===== Rect Schemas =====

class RectSchema(BaseModel):
    width: int = Field(..., ge=0)
    height: int = Field(..., ge=0)


# ===== Run Schemas =====

class RunManifest(BaseModel):
    rules: str
    config: str
    seed: int = 1
    max_events: int = Field(default=1_000_000, gt=0)
    rate_convention: RateConvention = RateConvention.PER_CHOICE
    trace_out: Optional[str] = None
    snapshot_out: Optional[str] = None
    snapshot_format: RenderFormat = RenderFormat.ASCII
    format_version: int = 1


# ===== Trace Schemas =====

class TraceHeader(BaseModel):
    kind: str = "header"
    format: str = "nubot-trace"
    format_version: int = 1
    seed: int
    rule_count: int = Field(..., ge=0)
    initial_digest: str
    manifest: Optional[RunManifest] = None


class TraceRecord(BaseModel):
    kind: str = "event"
    index: int = Field(..., ge=1)
    time: float = Field(..., ge=0)
    rule_id: int = Field(..., ge=0)
    anchor: Tuple[int, int]
    orientation: Direction
    arm: Optional[ArmChoice] = None
    movable_size: int = Field(default=0, ge=0)
    digest: str


# ===== Construction Schemas =====

class ConstructionManifest(BaseModel):
    """Describes one generated construction and the files written for it."""
    construction: str
    params: Dict[str, Any] = Field(default_factory=dict)
    rules_file: str
    config_file: str
    target: str
    rule_count: int = Field(..., ge=0)
    state_count: int = Field(..., ge=0)
    time_exponent: Optional[float] = None
    time_scale: TimeScale = TimeScale.POLYLOG
    space_bound: Optional[RectSchema] = None
    notes: List[str] = Field(default_factory=list)
    format_version: int = 1


# ===== Stats Schemas =====

class StatsReport(BaseModel):
    construction: str
    trials: int = Field(..., ge=1)
    seed: int
    seed_scheme: str = "numpy SeedSequence(seed).spawn(trials); trial i uses child i"
    rate_convention: RateConvention
    mean_time: Optional[float]
    std_error: float
    success_rate: float = Field(..., ge=0, le=1)
    max_rect: RectSchema
    state_count: int
    failed_trials: List[int] = Field(default_factory=list)

    @field_validator("mean_time")
    @classmethod
    def validate_mean_time(cls, v):
        if v is not None and v != v:
            return None
        return v


# ===== Verify Schemas =====

class VerifyCaseResult(BaseModel):
    suite: str
    case: str
    passed: bool
    detail: Optional[str] = None


class VerifySummary(BaseModel):
    suite: str
    total: int
    passed: int
    failed: int
    cases: List[VerifyCaseResult] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0


# ===== Error Schema =====

class ErrorResponse(BaseModel):
    error: dict = Field(..., examples=[{
        "code": "PARSE_ERROR",
        "message": "line 3, column 7: unexpected ','",
        "details": None,
    }])

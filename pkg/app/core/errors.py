from typing import Any, Optional


class NubotError(Exception):
    """Base error; `code` is stable and reported by the CLI."""
    code = "NUBOT_ERROR"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Any] = None):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self, debug: bool = False) -> dict:
        return {
            "error": {
                "code": self.code,
                "message": self.message,
                "details": self.details if debug else None,
            }
        }


# ===== Rule validation =====

class RuleError(NubotError):
    code = "RULE_INVALID"
    exit_code = 4


class EmptyPairBothSides(RuleError):
    code = "EMPTY_PAIR_BOTH_SIDES"


class BondToEmpty(RuleError):
    code = "BOND_TO_EMPTY"


class MovementDistanceNotOne(RuleError):
    code = "MOVEMENT_DISTANCE_NOT_ONE"


class MovementWithEmpty(RuleError):
    code = "MOVEMENT_WITH_EMPTY"


# ===== Configuration =====

class ConfigurationError(NubotError):
    code = "CONFIGURATION_INVALID"
    exit_code = 4


class DuplicateMonomer(ConfigurationError):
    code = "DUPLICATE_MONOMER"


class BondNotAdjacent(ConfigurationError):
    code = "BOND_NOT_ADJACENT"


class BondToVacancy(ConfigurationError):
    code = "BOND_TO_VACANCY"


class NotAdjacent(ConfigurationError):
    code = "NOT_ADJACENT"


class NotOccupied(ConfigurationError):
    code = "NOT_OCCUPIED"


# ===== Parsing =====

class ParseError(NubotError):
    code = "PARSE_ERROR"
    exit_code = 4

    def __init__(self, message: str, line: int = 0, column: int = 0, details: Optional[Any] = None):
        location = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{location}{message}", details)
        self.line = line
        self.column = column


# ===== Simulation =====

class StaleEvent(NubotError):
    code = "STALE_EVENT"


class BudgetExhausted(NubotError):
    code = "BUDGET_EXHAUSTED"
    exit_code = 3


class StateSpaceCapExceeded(NubotError):
    code = "STATE_SPACE_CAP_EXCEEDED"
    exit_code = 6


# ===== Generators and machines =====

class GenerationError(NubotError):
    code = "GENERATION_INVALID"
    exit_code = 2


class CapExceeded(NubotError):
    code = "CAP_EXCEEDED"
    exit_code = 6


class StepCapExceeded(NubotError):
    code = "STEP_CAP_EXCEEDED"
    exit_code = 6


class NoAcceptingPath(NubotError):
    code = "NO_ACCEPTING_PATH"


class TapeError(NubotError):
    code = "TAPE_ERROR"


class VerificationFailed(NubotError):
    code = "VERIFICATION_FAILED"
    exit_code = 7

"""
Verification report records for the HeisenBH subelliptic geometry engine.
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from utils.formatters import FormatterUtils


@dataclass(frozen=True)
class LevelResult:
    """Residual of one check on one refinement level."""

    points: int
    spacing: float
    residual: float

    def to_dict(self) -> Dict[str, Any]:
        return {'points': self.points, 'spacing': self.spacing, 'residual': self.residual}


@dataclass
class CheckResult:
    """Outcome of one named check; wall_time is kept out of to_dict."""

    check_id: str
    anchor: str
    exactness: str
    levels: List[LevelResult] = field(default_factory=list)
    observed_order: Optional[float] = None
    floor: float = 0.0
    passed: bool = False
    details: Dict[str, Any] = field(default_factory=dict)
    error: Optional[str] = None
    wall_time: float = 0.0

    @property
    def residuals(self) -> List[float]:
        return [level.residual for level in self.levels]

    @property
    def spacings(self) -> List[float]:
        return [level.spacing for level in self.levels]

    @property
    def finest_residual(self) -> Optional[float]:
        return self.levels[-1].residual if self.levels else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.check_id,
            'anchor': self.anchor,
            'exactness': self.exactness,
            'levels': [level.to_dict() for level in self.levels],
            'residuals': self.residuals,
            'spacings': self.spacings,
            'observed_order': self.observed_order,
            'floor': self.floor,
            'verdict': FormatterUtils.format_verdict(self.passed),
            'details': self.details,
            'error': self.error,
        }

    def summary_line(self) -> str:
        order = 'n/a' if self.observed_order is None else f"{self.observed_order:.2f}"
        residual = 'n/a' if self.finest_residual is None else f"{self.finest_residual:.3e}"
        text = FormatterUtils.format_columns(
            [FormatterUtils.format_verdict(self.passed), self.check_id, f"residual={residual}", f"order={order}"],
            [4, 26, 22, 12])
        return f"{text}  error={self.error}" if self.error else text


@dataclass
class VerificationReport:
    """All check results of one verify run."""

    seed: int
    levels: int
    checks: List[CheckResult] = field(default_factory=list)
    settings: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def get(self, check_id: str) -> CheckResult:
        for check in self.checks:
            if check.check_id == check_id:
                return check
        raise KeyError(check_id)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'seed': self.seed,
            'levels': self.levels,
            'settings': self.settings,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }

    def to_json(self) -> str:
        return FormatterUtils.to_json(self.to_dict())

    def to_text(self) -> str:
        lines = [check.summary_line() for check in self.checks]
        lines.append(f"overall: {FormatterUtils.format_verdict(self.passed)} "
                     f"({sum(c.passed for c in self.checks)}/{len(self.checks)} checks)")
        return '\n'.join(lines) + '\n'

    def timing(self) -> Dict[str, float]:
        return {check.check_id: check.wall_time for check in self.checks}

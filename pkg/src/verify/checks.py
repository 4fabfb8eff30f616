"""
Verification Checks
Check definitions, per-check results and the aggregated verification report
"""

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
import pandas as pd

from geometry.errors import GeometryError


class CheckKind(Enum):
    """Family of a check, selecting its default tolerance"""
    EXACT_LAW = "exact-law"
    INVARIANCE = "invariance"
    IDENTIFICATION = "identification"
    FLATNESS = "flatness"
    DUALITY = "duality"
    ORACLE = "oracle"
    DIAGNOSTIC = "diagnostic"   # never gates the overall verdict


DEFAULT_TOLERANCES: Dict[CheckKind, float] = {
    CheckKind.EXACT_LAW: 1e-8,
    CheckKind.INVARIANCE: 1e-8,
    CheckKind.IDENTIFICATION: 1e-8,
    CheckKind.FLATNESS: 1e-9,
    CheckKind.DUALITY: 1e-9,
    CheckKind.ORACLE: 1e-4,
    CheckKind.DIAGNOSTIC: 1e-8,
}

# Share of singular points above which every check fails
MAX_SKIP_FRACTION = 0.2


class AllPointsSingularError(GeometryError):
    """Every sampled point was singular, nothing could be checked"""


@dataclass(frozen=True)
class CheckSpec:
    """One named property with its tolerance"""
    name: str
    kind: CheckKind
    tolerance: float
    gating: bool = True
    description: str = ""

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError(f"check '{self.name}': tolerance must be > 0, got {self.tolerance}")


def resolve_tolerance(name: str, kind: CheckKind, overrides: Optional[Mapping[str, float]] = None,
                      default: Optional[float] = None) -> float:
    """Tolerance for a check: name override, then kind override, then default"""
    overrides = overrides or {}
    if name in overrides:
        return float(overrides[name])
    if kind.value in overrides:
        return float(overrides[kind.value])
    return default if default is not None else DEFAULT_TOLERANCES[kind]


def deviation(actual, expected) -> Tuple[float, float]:
    """Max absolute and max relative componentwise deviation

    The relative deviation divides by max(|expected|, 1). Non-finite values
    give an infinite deviation.
    """
    a = np.asarray(actual, dtype=float)
    b = np.asarray(expected, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"cannot compare shapes {a.shape} and {b.shape}")
    if a.size == 0:
        return 0.0, 0.0
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        return math.inf, math.inf
    diff = np.abs(a - b)
    rel = diff / np.maximum(np.abs(b), 1.0)
    return float(diff.max()), float(rel.max())


@dataclass
class CheckResult:
    """Outcome of one check over all points"""
    spec: CheckSpec
    max_abs: float = 0.0
    max_rel: float = 0.0
    points_sampled: int = 0
    points_skipped: int = 0
    passed: bool = False
    diagnostic: Optional[str] = None

    @property
    def name(self) -> str:
        return self.spec.name

    def record(self, max_abs: float, max_rel: float):
        """Fold one point's deviation into the running maximum"""
        self.max_abs = max(self.max_abs, max_abs)
        self.max_rel = max(self.max_rel, max_rel)
        self.points_sampled += 1

    def to_dict(self) -> Dict:
        """Convert to dictionary for serialization"""
        return {
            'name': self.spec.name,
            'kind': self.spec.kind.value,
            'tolerance': self.spec.tolerance,
            'max_abs': self.max_abs,
            'max_rel': self.max_rel,
            'points_sampled': self.points_sampled,
            'points_skipped': self.points_skipped,
            'pass': self.passed,
            'gating': self.spec.gating,
            'diagnostic': self.diagnostic,
        }


@dataclass
class VerificationReport:
    """All check results for one space and conformal factor"""
    label: str
    seed: int
    stroke: str
    points_sampled: int = 0
    points_skipped: int = 0
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        """True when every gating check passed"""
        return all(check.passed for check in self.checks if check.spec.gating)

    def result(self, name: str) -> CheckResult:
        """Result of the named check"""
        for check in self.checks:
            if check.name == name:
                return check
        raise KeyError(name)

    def failures(self) -> List[CheckResult]:
        """Gating checks that did not pass"""
        return [check for check in self.checks if check.spec.gating and not check.passed]

    def diagnostics(self) -> List[CheckResult]:
        """Checks carrying a diagnostic message"""
        return [check for check in self.checks if check.diagnostic]

    def to_dict(self) -> Dict:
        """Convert to dictionary for serialization"""
        return {
            'label': self.label,
            'seed': self.seed,
            'stroke': self.stroke,
            'points_sampled': self.points_sampled,
            'points_skipped': self.points_skipped,
            'passed': self.passed,
            'checks': [check.to_dict() for check in self.checks],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_frame(self) -> pd.DataFrame:
        """One row per check"""
        rows = [{
            'check': check.name,
            'kind': check.spec.kind.value,
            'tolerance': check.spec.tolerance,
            'max_abs': check.max_abs,
            'max_rel': check.max_rel,
            'points': check.points_sampled,
            'skipped': check.points_skipped,
            'result': ("pass" if check.passed else "FAIL") + ("" if check.spec.gating else " (info)"),
        } for check in self.checks]
        return pd.DataFrame(rows, columns=['check', 'kind', 'tolerance', 'max_abs', 'max_rel',
                                           'points', 'skipped', 'result'])

    def to_text(self) -> str:
        """Aligned table, diagnostics and a summary line"""
        lines = [f"{self.label or 'space'}  seed={self.seed}  stroke={self.stroke}  "
                 f"points={self.points_sampled}  skipped={self.points_skipped}", ""]
        if self.checks:
            lines.append(self.to_frame().to_string(index=False, float_format=lambda v: f"{v:.3e}"))
        diagnostics = self.diagnostics()
        if diagnostics:
            lines.append("")
            lines.extend(f"  {check.name}: {check.diagnostic}" for check in diagnostics)
        gating = [check for check in self.checks if check.spec.gating]
        passed = sum(check.passed for check in gating)
        lines.append("")
        lines.append(f"{'PASS' if self.passed else 'FAIL'}: {passed}/{len(gating)} checks passed")
        return "\n".join(lines)

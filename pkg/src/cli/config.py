"""
Space Configuration
JSON configuration of an AP-space, its conformal factor and the verification settings
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from geometry.errors import ExpressionError, GeometryError
from geometry.frame import ApSpace
from geometry.invariants import Stroke
from utils.expr_parser import Expr, parse
from verify.checks import CheckKind
from verify.fd_oracle import DEFAULT_STEP
from verify.suite import SuiteSettings

logger = logging.getLogger(__name__)

_KIND_NAMES = {kind.value for kind in CheckKind}


class ConfigError(GeometryError):
    """Invalid configuration, located by file and field"""

    def __init__(self, message: str, path: str = "", field: str = ""):
        self.message = message
        self.path = path
        self.field = field
        location = ": ".join(part for part in (path, field) if part)
        super().__init__(f"{location}: {message}" if location else message)


@dataclass
class SpaceConfig:
    """Configuration for one verification run"""
    label: str = ""
    dimension: int = 2
    frame: List[List[str]] = field(default_factory=list)
    rho: str = "0"
    domain: Optional[List[List[float]]] = None
    points: Optional[List[List[float]]] = None
    tolerances: Dict[str, float] = field(default_factory=dict)
    seed: int = 0
    num_points: int = 20
    stroke: Stroke = Stroke.WEITZENBOCK
    fd_step: float = DEFAULT_STEP
    oracle: bool = True
    workers: int = 1
    source: str = ""  # file the configuration came from, for error locations

    def to_dict(self) -> Dict:
        """Convert to dictionary for serialization"""
        data = {
            'label': self.label,
            'dimension': self.dimension,
            'frame': self.frame,
            'rho': self.rho,
            'seed': self.seed,
            'num_points': self.num_points,
            'stroke': self.stroke.value,
            'fd_step': self.fd_step,
            'oracle': self.oracle,
            'workers': self.workers,
            'tolerances': self.tolerances,
        }
        if self.domain is not None:
            data['domain'] = self.domain
        if self.points is not None:
            data['points'] = self.points
        return data

    @classmethod
    def from_dict(cls, data: Dict, source: str = "") -> 'SpaceConfig':
        """Create from dictionary, validating every field"""
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object", source)
        config = cls(source=source)
        config.label = str(data.get('label', config.label or Path(source).stem))
        config.dimension = _integer(data, 'dimension', None, source)
        config.frame = data.get('frame', config.frame)
        config.rho = data.get('rho', config.rho)
        config.domain = data.get('domain', config.domain)
        config.points = data.get('points', config.points)
        config.tolerances = data.get('tolerances', config.tolerances)
        config.seed = _integer(data, 'seed', config.seed, source)
        config.num_points = _integer(data, 'num_points', config.num_points, source)
        try:
            config.stroke = Stroke(data.get('stroke', config.stroke.value))
        except ValueError:
            choices = ", ".join(s.value for s in Stroke)
            raise ConfigError(f"unknown stroke convention {data.get('stroke')!r} (choose {choices})",
                              source, 'stroke')
        config.fd_step = data.get('fd_step', config.fd_step)
        config.oracle = data.get('oracle', config.oracle)
        config.workers = _integer(data, 'workers', config.workers, source)
        config.validate()
        return config

    @classmethod
    def load(cls, path) -> 'SpaceConfig':
        """Read and validate a JSON configuration file"""
        path = Path(path)
        try:
            with open(path, 'r') as f:
                data = json.load(f)
        except OSError as e:
            raise ConfigError(f"cannot read configuration: {e.strerror or e}", str(path))
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}", str(path))
        return cls.from_dict(data, source=path.name)

    def save(self, path):
        """Write the configuration as indented JSON"""
        with open(path, 'w') as f:
            json.dump(self.to_dict(), f, indent=2)

    def _error(self, message: str, field_name: str) -> ConfigError:
        return ConfigError(message, self.source, field_name)

    def validate(self):
        """Check shapes, ranges and tolerance keys"""
        n = self.dimension
        if n < 2:
            raise self._error("dimension must be >= 2", 'dimension')
        if not isinstance(self.frame, list) or len(self.frame) != n:
            rows = len(self.frame) if isinstance(self.frame, list) else 0
            raise self._error(f"frame must have {n} rows, got {rows}", 'frame')
        for i, row in enumerate(self.frame):
            if not isinstance(row, list) or len(row) != n:
                length = len(row) if isinstance(row, list) else 0
                raise self._error(f"frame row must have {n} entries, got {length} (frame is not square)",
                                  f'frame[{i}]')
            for j, text in enumerate(row):
                if not isinstance(text, str):
                    raise self._error("frame entries must be expression strings", f'frame[{i}][{j}]')
        if not isinstance(self.rho, str):
            raise self._error("rho must be an expression string", 'rho')
        if self.domain is not None:
            if not isinstance(self.domain, list) or len(self.domain) != n:
                raise self._error(f"domain must give [lo, hi] for each of {n} coordinates", 'domain')
            for k, bounds in enumerate(self.domain):
                if not isinstance(bounds, list) or len(bounds) != 2:
                    raise self._error("bounds must be [lo, hi]", f'domain[{k}]')
                for b, bound in enumerate(bounds):
                    if not _is_number(bound):
                        raise self._error(f"bound must be a finite number, got {bound!r}", f'domain[{k}][{b}]')
                if not bounds[0] < bounds[1]:
                    raise self._error("bounds must be [lo, hi] with lo < hi", f'domain[{k}]')
        if self.points is not None:
            if not isinstance(self.points, list):
                raise self._error("points must be a list of coordinate lists", 'points')
            for k, point in enumerate(self.points):
                if not isinstance(point, list) or len(point) != n:
                    raise self._error(f"point must have {n} coordinates", f'points[{k}]')
                for c, coord in enumerate(point):
                    if not _is_number(coord):
                        raise self._error(f"coordinate must be a finite number, got {coord!r}",
                                          f'points[{k}][{c}]')
        if not isinstance(self.tolerances, dict):
            raise self._error("tolerances must be an object", 'tolerances')
        for key, value in self.tolerances.items():
            if not _is_number(value) or not value > 0:
                raise self._error(f"tolerance must be a positive number, got {value!r}", f'tolerances.{key}')
        if self.seed < 0:
            raise self._error("seed must be >= 0", 'seed')
        if self.num_points < 1 and not self.points:
            raise self._error("num_points must be >= 1", 'num_points')
        if not _is_number(self.fd_step) or not self.fd_step > 0:
            raise self._error(f"fd_step must be a positive number, got {self.fd_step!r}", 'fd_step')
        if not isinstance(self.oracle, bool):
            raise self._error(f"oracle must be true or false, got {self.oracle!r}", 'oracle')
        if self.workers < 1:
            raise self._error("workers must be >= 1", 'workers')

    def check_tolerance_keys(self, known_names: Sequence[str]):
        """Reject tolerance overrides naming neither a check nor a kind"""
        for key in self.tolerances:
            if key not in known_names and key not in _KIND_NAMES:
                raise self._error(f"unknown check or kind '{key}'", f'tolerances.{key}')

    def build_space(self) -> ApSpace:
        """Parse the frame expressions"""
        n = self.dimension
        rows = []
        for i, row in enumerate(self.frame):
            rows.append(tuple(self._parse(text, f'frame[{i}][{j}]') for j, text in enumerate(row)))
        return ApSpace(n, tuple(rows), self.label)

    def build_rho(self) -> Expr:
        """Parse the conformal factor"""
        return self._parse(self.rho, 'rho')

    def _parse(self, text: str, field_name: str) -> Expr:
        try:
            return parse(text, self.dimension)
        except ExpressionError as e:
            raise self._error(str(e), field_name) from e

    def suite_settings(self) -> SuiteSettings:
        """Settings for verify.run_suite"""
        return SuiteSettings(
            num_points=self.num_points,
            seed=self.seed,
            domain=[tuple(map(float, bounds)) for bounds in self.domain] if self.domain else None,
            points=[list(map(float, point)) for point in self.points] if self.points else None,
            tolerances={key: float(value) for key, value in self.tolerances.items()},
            stroke=self.stroke,
            fd_step=self.fd_step,
            oracle=self.oracle,
            workers=self.workers,
        )


def _integer(data: Dict[str, Any], key: str, default: Optional[int], source: str) -> int:
    if key not in data:
        if default is None:
            raise ConfigError("missing required field", source, key)
        return default
    value = data[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"must be an integer, got {value!r}", source, key)
    return value


def _is_number(value: Any) -> bool:
    """Finite int or float; JSON booleans do not count"""
    return not isinstance(value, bool) and isinstance(value, (int, float)) and math.isfinite(value)

"""
Run configuration for the HeisenBH subelliptic geometry engine.
RunConfig record and its loader for flat `key = value` files.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, Optional, Tuple

from config.settings import Config
from fields.grid import BumpProfile, GridSpec
from models.errors import ConfigError
from models.heisenberg import HeisenbergModel
from models.target import TargetGeometry
from simulation.variational import FlowConfig
from utils.validators import ValidatorUtils
from verification.oracle_suite import SuiteSettings

logger = logging.getLogger(__name__)


def _int_list(text: str) -> Tuple[int, ...]:
    return tuple(int(token) for token in text.split(','))


def _float_list(text: str) -> Tuple[float, ...]:
    return tuple(float(token) for token in text.split(','))


def _optional_text(text: str) -> Optional[str]:
    return text or None


# key -> (RunConfig attribute, parser)
CONFIG_KEYS: Dict[str, Tuple[str, Callable[[str], Any]]] = {
    'n': ('n', int),
    'nu': ('nu', int),
    'frame.normalization': ('frame_normalization', float),
    'target.kind': ('target_kind', str),
    'target.chart_bound': ('chart_bound', float),
    'grid.dims': ('grid_dims', _int_list),
    'grid.extent': ('grid_extent', _float_list),
    'grid.stencil_order': ('stencil_order', int),
    'bump.inner': ('bump_inner', float),
    'bump.outer': ('bump_outer', float),
    'bump.smoothness': ('bump_smoothness', int),
    'fiber.points': ('fiber_points', int),
    'flow.eta': ('flow_eta', float),
    'flow.max_steps': ('flow_max_steps', int),
    'flow.stop_tolerance': ('flow_stop_tolerance', float),
    'flow.log_interval': ('flow_log_interval', int),
    'flow.functional': ('flow_functional', str),
    'flow.initial': ('flow_initial', str),
    'flow.initial_file': ('flow_initial_file', _optional_text),
    'flow.amplitude': ('flow_amplitude', float),
    'verify.levels': ('verify_levels', int),
    'verify.base_points': ('verify_base_points', int),
    'verify.points_step': ('verify_points_step', int),
    'seed': ('seed', int),
    'output.dir': ('output_dir', str),
    'log.level': ('log_level', str),
}


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a CLI run, defaulting to Config."""

    n: int = Config.CR_DIMENSION
    nu: int = Config.TARGET_DIMENSION
    frame_normalization: float = Config.FRAME_NORMALIZATION
    target_kind: str = Config.TARGET_KIND
    chart_bound: float = Config.CHART_BOUND
    grid_dims: Tuple[int, ...] = (Config.GRID_POINTS,)
    grid_extent: Tuple[float, ...] = (Config.GRID_EXTENT,)
    stencil_order: int = Config.STENCIL_ORDER
    bump_inner: float = Config.BUMP_INNER
    bump_outer: float = Config.BUMP_OUTER
    bump_smoothness: int = Config.BUMP_SMOOTHNESS
    fiber_points: int = Config.FIBER_POINTS
    flow_eta: float = Config.FLOW_ETA
    flow_max_steps: int = Config.FLOW_MAX_STEPS
    flow_stop_tolerance: float = Config.FLOW_STOP_TOLERANCE
    flow_log_interval: int = Config.FLOW_LOG_INTERVAL
    flow_functional: str = Config.FLOW_FUNCTIONAL
    flow_initial: str = Config.FLOW_INITIAL
    flow_initial_file: Optional[str] = None
    flow_amplitude: float = Config.FLOW_AMPLITUDE
    verify_levels: int = Config.VERIFY_LEVELS
    verify_base_points: int = Config.VERIFY_BASE_POINTS
    verify_points_step: int = Config.VERIFY_POINTS_STEP
    seed: int = Config.SEED
    output_dir: str = Config.OUTPUT_DIR
    log_level: str = Config.LOG_LEVEL
    source: Optional[str] = field(default=None, compare=False)

    def _per_axis(self, values: Tuple, what: str) -> Tuple:
        dim = 2 * self.n + 1
        if len(values) == 1:
            return tuple(values) * dim
        if len(values) != dim:
            raise ConfigError(what, f"needs 1 or {dim} entries, got {len(values)}")
        return tuple(values)

    # Builders; each re-validates through the model constructor

    def grid(self) -> GridSpec:
        return GridSpec(n=self.n, extents=self._per_axis(self.grid_extent, 'grid.extent'),
                        points=self._per_axis(self.grid_dims, 'grid.dims'), stencil_order=self.stencil_order)

    def bump(self) -> BumpProfile:
        return BumpProfile(self.bump_inner, self.bump_outer, self.bump_smoothness)

    def model(self) -> HeisenbergModel:
        return HeisenbergModel(self.n, self.frame_normalization)

    def target(self) -> TargetGeometry:
        return TargetGeometry(self.nu, self.target_kind, self.chart_bound)

    def flow_config(self) -> FlowConfig:
        return FlowConfig(step_size=self.flow_eta, max_steps=self.flow_max_steps,
                          stop_tolerance=self.flow_stop_tolerance, variation_weight=self.bump(),
                          energy_log_interval=self.flow_log_interval, functional=self.flow_functional)

    def suite_settings(self) -> SuiteSettings:
        return SuiteSettings(n=self.n, frame_normalization=self.frame_normalization, nu=self.nu,
                             chart_bound=self.chart_bound, base_points=self.verify_base_points,
                             points_step=self.verify_points_step, stencil_order=self.stencil_order,
                             fiber_points=self.fiber_points)

    def validate(self) -> 'RunConfig':
        """
        Build every engine object once so invalid values surface at load time.

        Raises:
            ConfigError: naming the section whose values were rejected
        """
        checks = [
            ('grid', self.grid),
            ('frame.normalization', self.model),
            ('bump', self.bump),
            ('target', self.target),
            ('flow', self.flow_config),
            ('verify', self.suite_settings),
            ('flow.initial', lambda: ValidatorUtils.validate_preset(self.flow_initial)),
        ]
        for section, build in checks:
            try:
                build()
            except ConfigError:
                raise
            except (ValueError, TypeError) as exc:
                raise ConfigError(section, str(exc)) from exc
        if self.verify_levels < 1:
            raise ConfigError('verify.levels', f"must be >= 1, got {self.verify_levels}")
        return self

    def with_overrides(self, **changes) -> 'RunConfig':
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def to_dict(self) -> Dict[str, Any]:
        return {key: getattr(self, attribute) for key, (attribute, _) in CONFIG_KEYS.items()}


def parse_run_config(text: str, source: Optional[str] = None) -> RunConfig:
    """
    Parse `key = value` lines; `#` starts a comment, blank lines are skipped.

    Raises:
        ConfigError: on an unknown key, a malformed line or an unparsable value
    """
    values: Dict[str, Any] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition('=')
        key, value = key.strip(), value.strip()
        if not sep:
            raise ConfigError(key or f"line {number}", "expected 'key = value'")
        if key not in CONFIG_KEYS:
            raise ConfigError(key, "unknown configuration key")
        attribute, parser = CONFIG_KEYS[key]
        try:
            values[attribute] = parser(value)
        except ValueError as exc:
            raise ConfigError(key, f"cannot parse '{value}': {exc}") from exc
    return RunConfig(source=source, **values)


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """Load and validate a run configuration; defaults when path is None."""
    if path is None:
        return RunConfig().validate()
    with open(path, 'r', encoding='utf-8') as handle:
        text = handle.read()
    config = parse_run_config(text, source=path)
    logger.debug(f"Loaded run configuration from {path}")
    return config.validate()

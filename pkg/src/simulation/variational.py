"""
VariationalEngine for the HeisenBH subelliptic geometry engine.
Energies E_{1,b} and E_{2,b}, analytic and finite-difference first variations,
and the backtracking descent flow toward subelliptic biharmonic maps.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from config.settings import Config
from config.constants import FIRST_VARIATION_STEP, MAX_BACKTRACKS, TRACE_CSV_HEADER
from fields.fields import MapField, SectionField, integrate_array, l2_inner
from fields.grid import BumpProfile
from models.errors import ChartOverflowError, NonFiniteError
from operators.subelliptic import SubellipticCalculus
from utils.formatters import FormatterUtils
from utils.validators import ValidatorUtils


@dataclass(frozen=True)
class FlowConfig:
    """Parameters of the descent flow."""

    step_size: float = Config.FLOW_ETA
    max_steps: int = Config.FLOW_MAX_STEPS
    stop_tolerance: float = Config.FLOW_STOP_TOLERANCE
    variation_weight: BumpProfile = field(default_factory=BumpProfile)
    energy_log_interval: int = Config.FLOW_LOG_INTERVAL
    functional: str = Config.FLOW_FUNCTIONAL

    def __post_init__(self):
        ValidatorUtils.require_positive(self.step_size, "step_size")
        ValidatorUtils.require_positive(self.stop_tolerance, "stop_tolerance")
        ValidatorUtils.require_positive(self.energy_log_interval, "energy_log_interval")
        if int(self.max_steps) != self.max_steps or self.max_steps < 0:
            raise ValueError(f"max_steps must be a non-negative integer, got {self.max_steps}")
        ValidatorUtils.validate_functional(self.functional)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['variation_weight'] = self.variation_weight.to_dict()
        return data


@dataclass(frozen=True)
class FlowRecord:
    """One logged flow step."""

    step: int
    e2b: float
    e1b: float
    tau_l2: float
    bh_l2: float
    max_chart_norm: float

    def as_row(self) -> Tuple[Any, ...]:
        return (self.step, self.e2b, self.e1b, self.tau_l2, self.bh_l2, self.max_chart_norm)


@dataclass
class FlowTrace:
    """Chronological flow records plus the outcome of the run."""

    records: List[FlowRecord] = field(default_factory=list)
    status: str = 'running'
    steps_taken: int = 0
    backtracks: int = 0
    final_step_size: Optional[float] = None
    abort_step: Optional[int] = None
    abort_reason: Optional[str] = None

    def append(self, record: FlowRecord):
        if self.records and record.step <= self.records[-1].step:
            raise ValueError(f"Flow record {record.step} is not after {self.records[-1].step}")
        self.records.append(record)

    @property
    def aborted(self) -> bool:
        return self.status == 'aborted'

    def column(self, name: str) -> List[float]:
        return [getattr(record, name) for record in self.records]

    def is_monotone(self, name: str = 'e2b') -> bool:
        """True when the logged column never increases."""
        values = self.column(name)
        return all(b <= a for a, b in zip(values, values[1:]))

    def to_csv(self) -> str:
        return FormatterUtils.format_csv(TRACE_CSV_HEADER, [record.as_row() for record in self.records])

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status,
            'steps_taken': self.steps_taken,
            'backtracks': self.backtracks,
            'final_step_size': self.final_step_size,
            'abort_step': self.abort_step,
            'abort_reason': self.abort_reason,
            'records': [asdict(record) for record in self.records],
        }


@dataclass
class _FlowState:
    phi: MapField
    tau: SectionField
    e2b: float
    e1b: float
    bh: Optional[SectionField] = None

    def l2(self, section: SectionField) -> float:
        return math.sqrt(max(l2_inner(section, section), 0.0))


class VariationalEngine:
    """
    Energies and descent flow for maps phi: H_n -> N on a grid.

    Variations are chart-linear: phi_t = phi + t V in the target chart.
    """

    def __init__(self, calculus: SubellipticCalculus):
        self.calculus = calculus
        self.grid = calculus.grid
        self.logger = logging.getLogger(__name__)

        # Callbacks
        self.on_progress_update: Optional[Callable[[FlowRecord], None]] = None

    # Energies

    def energy_e1b(self, phi: MapField) -> float:
        """1/2 int sum_a h_ij(phi) X~_a phi^i X~_a phi^j Psi."""
        density = np.einsum('ij...,ij...->...', phi.metric(), self.calculus.pushforward_contraction(phi))
        return 0.5 * float(integrate_array(density, self.grid))

    def energy_e2b(self, phi: MapField) -> float:
        """1/2 int |tau_b(phi)|^2 Psi."""
        tau = self.calculus.tension_field(phi)
        return 0.5 * l2_inner(tau, tau)

    def energy(self, phi: MapField, functional: str) -> float:
        ValidatorUtils.validate_functional(functional)
        return self.energy_e2b(phi) if functional == 'e2b' else self.energy_e1b(phi)

    # First variations

    def first_variation_analytic(self, phi: MapField, v: SectionField) -> float:
        """d/dt E_{2,b}(phi + tV) at 0 as (V, BH_b(phi))."""
        return l2_inner(v, self.calculus.bh_operator(phi))

    def first_variation_e1b_analytic(self, phi: MapField, v: SectionField) -> float:
        """d/dt E_{1,b}(phi + tV) at 0 as -(V, tau_b(phi))."""
        return -l2_inner(v, self.calculus.tension_field(phi))

    def _central_difference(self, energy: Callable[[MapField], float], phi: MapField, v: SectionField,
                            step: float) -> float:
        return (energy(phi.displaced(v, step)) - energy(phi.displaced(v, -step))) / (2.0 * step)

    def _richardson(self, energy: Callable[[MapField], float], phi: MapField, v: SectionField,
                    step: float) -> float:
        ValidatorUtils.require_positive(step, "step")
        coarse = self._central_difference(energy, phi, v, step)
        fine = self._central_difference(energy, phi, v, 0.5 * step)
        return (4.0 * fine - coarse) / 3.0

    def first_variation_fd(self, phi: MapField, v: SectionField, step: float = FIRST_VARIATION_STEP) -> float:
        """
        Central difference of E_{2,b} along phi + tV, Richardson-extrapolated once.

        Raises:
            ChartOverflowError: if phi +- step V leaves the chart
        """
        return self._richardson(self.energy_e2b, phi, v, step)

    def first_variation_e1b_fd(self, phi: MapField, v: SectionField, step: float = FIRST_VARIATION_STEP) -> float:
        return self._richardson(self.energy_e1b, phi, v, step)

    # Flow

    def _evaluate(self, phi: MapField, with_bh: bool = True) -> _FlowState:
        tau = self.calculus.tension_field(phi)
        ValidatorUtils.require_finite(tau.components, "tension field")
        state = _FlowState(phi=phi, tau=tau, e2b=0.5 * l2_inner(tau, tau), e1b=self.energy_e1b(phi))
        if with_bh:
            state.bh = self.calculus.bh_operator(phi)
            ValidatorUtils.require_finite(state.bh.components, "BH_b")
        return state

    def _record(self, step: int, state: _FlowState) -> FlowRecord:
        return FlowRecord(step=step, e2b=state.e2b, e1b=state.e1b, tau_l2=state.l2(state.tau),
                          bh_l2=state.l2(state.bh), max_chart_norm=state.phi.max_chart_norm)

    def _log(self, trace: FlowTrace, record: FlowRecord):
        if not trace.records or trace.records[-1].step != record.step:
            trace.append(record)
            if self.on_progress_update:
                self.on_progress_update(record)

    def flow_run(self, phi0: MapField, config: Optional[FlowConfig] = None) -> Tuple[MapField, FlowTrace]:
        """
        Descent phi <- phi - eta * bump * BH_b(phi) (or phi + eta * bump * tau_b for e1b).

        eta is halved, up to MAX_BACKTRACKS times, whenever the chosen energy would
        increase; the accepted eta carries over to the next step.

        Returns:
            Tuple[MapField, FlowTrace]: last admissible map and the trace; the trace
                status is 'converged', 'max_steps', 'stalled' or 'aborted'
        """
        config = config if config is not None else FlowConfig()
        weight = config.variation_weight.weights(self.grid)
        eta = config.step_size
        trace = FlowTrace()
        phi = phi0
        step = 0
        self.logger.info(f"Flow started: functional={config.functional}, eta={eta:g}, "
                         f"max_steps={config.max_steps}")
        try:
            state = self._evaluate(phi)
            self._log(trace, self._record(0, state))
            while True:
                record = self._record(step, state)
                if record.bh_l2 < config.stop_tolerance:
                    trace.status = 'converged'
                    break
                if step >= config.max_steps:
                    trace.status = 'max_steps'
                    break
                step += 1
                direction = -state.bh.components if config.functional == 'e2b' else state.tau.components
                current = state.e2b if config.functional == 'e2b' else state.e1b
                candidate = None
                for attempt in range(MAX_BACKTRACKS + 1):
                    trial = MapField(self.grid, phi.values + eta * weight * direction, phi.target)
                    value = self.energy(trial, config.functional)
                    if not math.isfinite(value):
                        raise NonFiniteError(f"Energy became non-finite at step {step}")
                    if value <= current:
                        candidate = trial
                        break
                    if attempt < MAX_BACKTRACKS:
                        eta *= 0.5
                        trace.backtracks += 1
                        self.logger.debug(f"Step {step}: energy {value:.6e} > {current:.6e}, eta -> {eta:g}")
                if candidate is None:
                    self.logger.warning(f"Backtracking exhausted at step {step} (eta={eta:g})")
                    trace.status = 'stalled'
                    step -= 1
                    break
                phi = candidate
                state = self._evaluate(phi)
                trace.steps_taken = step
                if step % config.energy_log_interval == 0:
                    self._log(trace, self._record(step, state))
                    self.logger.info(f"Step {step}: e2b={state.e2b:.6e} e1b={state.e1b:.6e} eta={eta:g}")
            self._log(trace, self._record(step, state))
        except (ChartOverflowError, NonFiniteError) as exc:
            reason = str(exc)
            if isinstance(exc, ChartOverflowError) and exc.step is None:
                exc.step = step
                reason = f"{reason} at step {step}"
            trace.status = 'aborted'
            trace.abort_step = step
            trace.abort_reason = reason
            self.logger.error(f"Flow aborted: {reason}")
        trace.final_step_size = eta
        self.logger.info(f"Flow finished: status={trace.status}, steps={trace.steps_taken}")
        return phi, trace

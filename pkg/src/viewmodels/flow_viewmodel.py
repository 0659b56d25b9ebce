"""
FlowViewModel for the HeisenBH subelliptic geometry engine.
Builds initial maps from a RunConfig, runs the descent flow and summarizes energies.
"""

import logging
import math
import os
from typing import Dict, Optional, Tuple

from config.constants import EXIT_FAILURE, EXIT_OK, FINAL_FIELD, TRACE_CSV
from config.run_config import RunConfig
from fields.fields import MapField, l2_inner, read_hfield, write_hfield
from models.errors import GridError
from operators.subelliptic import SubellipticCalculus
from simulation.presets import make_initial_map
from simulation.variational import FlowTrace, VariationalEngine
from utils.helpers import HelperUtils


class FlowViewModel:
    def __init__(self, run_config: RunConfig):
        self.run_config = run_config
        self.grid = run_config.grid()
        self.target = run_config.target()
        self.calculus = SubellipticCalculus(run_config.model(), self.grid)
        self.engine = VariationalEngine(self.calculus)
        self.logger = logging.getLogger(__name__)
        self.state = {
            'final_map': None,
            'trace': None,
        }

    def load_map(self, path: str) -> MapField:
        """
        Read an hfield map; its grid must match the configured one.

        Raises:
            FieldFormatError: on a malformed file
            GridError: if the file's grid differs from the configuration
        """
        grid, values = read_hfield(path, self.grid.stencil_order)
        if grid != self.grid:
            raise GridError(f"{path} holds a {grid.points} grid, configuration expects {self.grid.points}")
        return MapField(grid, values, self.target)

    def initial_map(self, path: Optional[str] = None) -> MapField:
        path = path or self.run_config.flow_initial_file
        if path:
            return self.load_map(path)
        return make_initial_map(self.run_config.flow_initial, self.grid, self.target, self.run_config.bump(),
                                self.run_config.flow_amplitude, self.run_config.seed)

    def energy_summary(self, phi: MapField) -> Dict[str, float]:
        tau = self.calculus.tension_field(phi)
        bh = self.calculus.bh_operator(phi)
        return {
            'e1b': self.engine.energy_e1b(phi),
            'e2b': 0.5 * l2_inner(tau, tau),
            'tau_l2': math.sqrt(max(l2_inner(tau, tau), 0.0)),
            'bh_l2': math.sqrt(max(l2_inner(bh, bh), 0.0)),
        }

    def run(self, phi0: Optional[MapField] = None) -> Tuple[MapField, FlowTrace]:
        phi0 = phi0 if phi0 is not None else self.initial_map()
        phi, trace = self.engine.flow_run(phi0, self.run_config.flow_config())
        self.state['final_map'] = phi
        self.state['trace'] = trace
        return phi, trace

    def get_trace_csv(self) -> str:
        return self.state['trace'].to_csv() if self.state['trace'] else ''

    def get_exit_code(self) -> int:
        trace = self.state['trace']
        return EXIT_FAILURE if trace is None or trace.aborted else EXIT_OK

    def write_outputs(self, output_dir: str) -> Dict[str, str]:
        """Write trace.csv and the final map as hfield."""
        HelperUtils.ensure_directory(output_dir)
        trace_path = HelperUtils.write_text(os.path.join(output_dir, TRACE_CSV), self.get_trace_csv())
        field_path = os.path.join(output_dir, FINAL_FIELD)
        write_hfield(field_path, self.grid, self.state['final_map'].values)
        self.logger.info(f"Flow outputs written to {output_dir}")
        return {'trace': trace_path, 'final_map': field_path}

"""
Initial maps for the HeisenBH descent flow.
"""

from typing import Optional

import numpy as np

from config.settings import Config
from fields.fields import MapField
from fields.grid import BumpProfile, GridSpec
from models.target import TargetGeometry
from utils.validators import ValidatorUtils
from verification.inputs import InputGenerator, sample_map


def make_initial_map(preset: str, grid: GridSpec, target: TargetGeometry, profile: Optional[BumpProfile] = None,
                     amplitude: float = Config.FLOW_AMPLITUDE, seed: int = Config.SEED,
                     base_point=None) -> MapField:
    """
    Build a builtin initial map.

    Args:
        preset: 'constant', 'bump' (constant plus amplitude * bump in the first
            chart component), 'linear' (phi^1 = x^1) or 'random' (constant plus
            a band-limited perturbation times the bump)
        base_point: chart point of the constant part, the chart origin by default

    Returns:
        MapField: the initial map
    """
    ValidatorUtils.validate_preset(preset)
    profile = profile if profile is not None else BumpProfile()
    base = np.zeros(target.nu) if base_point is None else np.asarray(base_point, dtype=float)
    constant = MapField.constant(grid, target, base)
    if preset == 'constant':
        return constant
    values = constant.values.copy()
    if preset == 'bump':
        values[0] += amplitude * profile.weights(grid)
        return MapField(grid, values, target)
    if preset == 'linear':
        values[0] = grid.mesh[0]
        return MapField(grid, values, target)
    generator = InputGenerator(np.random.default_rng(seed), grid.dim, extent=max(grid.extents))
    return sample_map(generator.series(components=target.nu, amplitude=amplitude, offset=base),
                      grid, target, profile)

"""
Settings configuration for the HeisenBH subelliptic geometry engine.
"""


class Config:
    # Heisenberg Model Settings
    CR_DIMENSION = 1
    FRAME_NORMALIZATION = 0.5

    # Grid Settings
    GRID_POINTS = 33
    GRID_EXTENT = 1.0
    STENCIL_ORDER = 4
    FIBER_POINTS = 8

    # Bump Profile Settings
    BUMP_INNER = 0.5
    BUMP_OUTER = 0.9
    BUMP_SMOOTHNESS = 2  # quintic taper

    # Target Settings
    TARGET_KIND = 'flat'
    TARGET_DIMENSION = 2
    CHART_BOUND = 1e3

    # Flow Settings
    FLOW_ETA = 1e-4
    FLOW_MAX_STEPS = 2000
    FLOW_STOP_TOLERANCE = 1e-8
    FLOW_LOG_INTERVAL = 10
    FLOW_FUNCTIONAL = 'e2b'
    FLOW_INITIAL = 'bump'
    FLOW_AMPLITUDE = 0.2

    # Verification Settings
    VERIFY_LEVELS = 3
    VERIFY_BASE_POINTS = 33
    VERIFY_POINTS_STEP = 8
    VERIFY_EXTENT = 1.0
    VERIFY_FIBER_POINTS = 8
    VERIFY_INTERIOR_FRACTION = 0.25
    VERIFY_BUMP_INNER = 0.05
    VERIFY_BUMP_OUTER = 0.5
    VERIFY_BUMP_SMOOTHNESS = 6
    VERIFY_SAMPLE_POINTS = 100
    VERIFY_VARIATION_PAIRS = 20
    VERIFY_MAP_AMPLITUDE = 0.3
    ORDER_THRESHOLD = 3.5
    RESIDUAL_FLOOR = 1e-10

    # Development Settings
    SEED = 7
    OUTPUT_DIR = 'out'
    LOG_LEVEL = 'INFO'

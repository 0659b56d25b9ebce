"""
Constants for the HeisenBH subelliptic geometry engine.
"""

# Field File Constants
FIELD_FORMAT_TAG = "hfield v1"
FIELD_FILE_SUFFIX = ".hfield"
SIGNIFICANT_DIGITS = 17

# Flow Constants
TRACE_CSV_HEADER = "step,e2b,e1b,tau_l2,bh_l2,max_chart_norm"
MAX_BACKTRACKS = 30
FLOW_FUNCTIONALS = ("e2b", "e1b")
INITIAL_MAP_PRESETS = ("constant", "bump", "linear", "random")

# Numerical Constants
FD_ORACLE_STEP = 1e-4
FIRST_VARIATION_STEP = 1e-3
ENERGY_FLOOR = 1e-14
HORIZONTAL_TOLERANCE = 1e-10
SUPPORTED_STENCIL_ORDERS = (2, 4, 6)
MIN_POINTS_PER_AXIS = 9
TARGET_KINDS = ("flat", "round_sphere")

# Lifted Connection Constants
LIFTED_DTHETA_FACTOR = 0.5  # d theta read in the alternation convention on C(M)
LIFTED_REEB_DIVISOR = 4.0  # S-term coefficient is kappa / LIFTED_REEB_DIVISOR

# Exit Codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

# Output Files
REPORT_JSON = "report.json"
REPORT_TEXT = "report.txt"
REPORT_TIMING = "report.timing.json"
TRACE_CSV = "trace.csv"
FINAL_FIELD = "final.hfield"

# Oracle Checks: id -> anchor describing the identity under test
CHECK_ANCHORS = {
    "self_adjoint": "rough sublaplacian is formally self-adjoint on compactly supported sections",
    "nonpositive": "rough sublaplacian is nonpositive: (Lap V, V) <= 0",
    "dstar_d": "rough sublaplacian equals -D*D",
    "product_rule": "Lap_b(u^2) = 2u Lap_b u + 2|grad_H u|^2",
    "leibniz": "Leibniz rule for the rough sublaplacian of gV",
    "symbol": "principal symbol [w(T)^2 - |w|^2] v, degenerate along theta",
    "first_variation": "first variation of the bienergy is (V, BH_b)",
    "first_variation_e1b": "first variation of the energy is -(V, tau_b)",
    "lee_identity": "wave operator of a lifted function is the lifted sublaplacian",
    "tension_lift": "tension field of the lifted map is the lifted subelliptic tension",
    "contraction_lift": "F^{pq} contraction of lifted differentials is the horizontal trace",
    "energy_ratio": "bienergy of the lift is 2 pi times the subelliptic bienergy",
    "inverse_identities": "inverse Fefferman metric identities against the Reeb covector",
    "reciprocal_levi": "reciprocal Fefferman metric reproduces the inverse Levi matrix",
    "lorentzian_signature": "Fefferman metric has Lorentzian signature",
    "connection_lift": "Levi-Civita connection of the Fefferman metric on lifted frames",
    "rough_laplacian_lift": "pullback rough Laplacian on C(M) of a lifted section",
    "bh_lift": "biharmonic operator of the lifted map is the lifted BH_b",
    "green_lemma": "integration by parts against the contact volume form",
    "divergence_identity": "pointwise divergence identity behind self-adjointness",
    "route_equivalence_rough": "nested connection route equals the expanded local formula",
    "route_equivalence_tension": "second fundamental form trace equals the local tension formula",
}

CHECK_IDS = tuple(CHECK_ANCHORS.keys())

# Checks whose residual is algebraic (no refinement study)
EXACT_CHECKS = (
    "inverse_identities",
    "reciprocal_levi",
    "lorentzian_signature",
    "energy_ratio",
)

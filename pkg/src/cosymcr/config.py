"""Default numerical contract of the verification engine."""

IDENTITY_TOLERANCE = 1e-8
DERIVATIVE_TOLERANCE = 1e-6
LEVI_TOLERANCE = 1e-10
SECTION_TOLERANCE = 1e-10

DEFAULT_POINTS = 100
DEFAULT_SEED = 42

# Sampling box [-0.8, 0.8]^{2n+1}; keeps the trigonometric frames away from degeneracies.
BOX_HALF_WIDTH = 0.8

FINITE_DIFFERENCE_STEP = 1e-5

# Rank threshold (relative to the largest singular value) used by the (κ, μ, ν) fit.
RANK_TOLERANCE = 1e-9

SYMBOLIC_MAX_DIMENSION = 7

SCHEMA_VERSION = 1

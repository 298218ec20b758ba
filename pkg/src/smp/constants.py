import numpy as np


# δ = 10⁻², 10⁻³, …, 10⁻¹²
DEFAULT_DELTAS = tuple(10.0 ** -np.arange(2, 13))

# points of each of the two scans (uniform and geometric) behind M_δ
SCAN_POINTS = 2001

# the interior minimum counts as zero below this fraction of max u, above the
# residual left by the semilinear solver
MIN_TOLERANCE = 1e-8

# upper limit of ∫₀ F^(−1/2)
VAZQUEZ_LIMIT = 0.5

# the growth of M_δ behind the decay criterion is fitted down to δ = 10⁻⁸⁰
ASYMPTOTIC_DELTAS = tuple(10.0 ** -np.arange(2, 81))

# growth exponents of √M_δ in |ln δ| this close to 1 are decided by the linear rate
EXPONENT_MARGIN = 0.1

# relative gap between the linear rate of √M_δ and k below which the criterion is inconclusive
RATE_MARGIN = 0.05

# largest ODE residual accepted for a dead-core profile, and the halvings of h spent on it
PROFILE_RESIDUAL = 1e-4
MAX_PROFILE_HALVINGS = 10

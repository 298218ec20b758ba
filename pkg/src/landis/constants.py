# Ω = ℝⁿ∖B_2 unless another inner radius is configured
DEFAULT_INNER_RADIUS = 2.0

# ψ(x₀) = 1 at |x₀| = 3
DEFAULT_NORMALIZATION_RADIUS = 3.0

# u_j below −tolerance·max u_j means the discrete maximum principle failed
NEGATIVITY_TOLERANCE = 1e-10

# diagonal-scaled residual, relative to max |u|, accepted for a solution
RESIDUAL_TOLERANCE = 1e-8

# e^(C₁R)·sup_{|x|=R}|u| below this counts as a vanishing liminf
LIMINF_TOLERANCE = 1e-10

# max |u| below this counts as u ≡ 0
ZERO_TOLERANCE = 1e-10

# u − δψ above this fraction of the data scale breaks the ordering
COMPARISON_TOLERANCE = 1e-10

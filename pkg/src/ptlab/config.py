# -*- coding: utf-8 -*-
"""
Shared configuration constants for the library and the command-line front end.
"""

# Bessel functions
BESSEL_SUPPORT = 1.0e4  # documented |x| range of bessel_j
BESSEL_SERIES_CUTOFF = 2.0  # ascending series below this |x|, Miller recurrence above
TRUNCATION_PAD = 40  # m_max = ceil(|kappa|) + TRUNCATION_PAD
NEGLIGIBLE_TERM = 1e-15

# Lattice model
BALANCE_TOL = 1e-12
MAX_SITES = 256

# Averaging oracle (composite Simpson)
QUADRATURE_STEPS = 4096
MIN_QUADRATURE_STEPS = 64
MAX_PHASE_PER_STEP = 0.5  # radians of e^{i eta} rotation per quadrature step

# Spectra
REALITY_TOL_SCALE = 1e-9  # tol_im = REALITY_TOL_SCALE * max(1, spectral radius)
RESIDUAL_TOL = 1e-10
THRESHOLD_GRID_POINTS = 64
THRESHOLD_TOL = 1e-10

# Propagation
RK4_STEPS_PER_PERIOD = 2048
MIN_RK4_STEPS_PER_PERIOD = 64
MIN_MONODROMY_STEPS = 512
OVERFLOW_NORM = 1e100

# Command line
THREADS_ENV_VAR = "PTLAB_THREADS"

"""Shared constants of the critical-length KdV stability problem.

Everything downstream (eigenfunctions, manifold coefficients, reduced
dynamics, PDE runs) draws these values from here so that there is a single
source of truth.  The defining formulas are evaluated once in extended
precision (50 digits) and rounded to double.
"""

import mpmath as _mp

_mp.mp.dps = 50

#: Critical interval length L = 2*pi*sqrt(7/3) (j=1, l=2 critical pair).
L = float(2 * _mp.pi * _mp.sqrt(_mp.mpf(7) / 3))

#: sqrt(21); every trigonometric frequency in the construction is k/sqrt(21).
SQRT21 = float(_mp.sqrt(21))

#: Frequency unit 1/sqrt(21).
BASE_FREQ = float(1 / _mp.sqrt(21))

#: Imaginary-axis eigenvalue magnitude q = 20/(21*sqrt(21)).
Q = float(_mp.mpf(20) / (21 * _mp.sqrt(21)))

#: Eigenfunction normalization Theta = (1/sqrt(14*pi)) * (3/7)**(1/4).
THETA = float((1 / _mp.sqrt(14 * _mp.pi)) * (_mp.mpf(3) / 7) ** _mp.mpf("0.25"))

#: Trilinear-integral constant c1 = (177147/(392392*pi)) * sqrt(1/(2*pi)) * (3/7)**(1/4).
C1 = float(
    (_mp.mpf(177147) / (392392 * _mp.pi))
    * _mp.sqrt(1 / (2 * _mp.pi))
    * (_mp.mpf(3) / 7) ** _mp.mpf("0.25")
)

SQRT3 = float(_mp.sqrt(3))

# Reference values the pipeline is compared against (with the comparison
# tolerances used by the acceptance suite and the CLI verdict lines).
#: First Lyapunov coefficient of the reduced dynamics, reference value.
RHO1_REF = -0.014325
RHO1_TOL = 5e-4
#: Boundary derivative c'(0) of the quadratic manifold coefficient c.
CPRIME0_REF = 0.0118
CPRIME0_TOL = 5e-4
#: Determinant of the 4x4 Sylvester matrix of the two boundary quadratics.
DETS_REF = -0.0197
DETS_TOL = 5e-3

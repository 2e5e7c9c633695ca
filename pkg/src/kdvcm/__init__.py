"""Center-manifold stability toolkit for the KdV equation on [0, 2*pi*sqrt(7/3)].

The pipeline, bottom to top:

- :mod:`kdvcm.exptrig`   exact exponential-trigonometric polynomial algebra
- :mod:`kdvcm.spectral`  critical lengths, the imaginary-axis eigenpair, the
  discretized spectrum of the linearized operator
- :mod:`kdvcm.manifold`  closed-form quadratic manifold coefficients a, b, c
  and an independent finite-difference boundary-value oracle
- :mod:`kdvcm.reduced`   cubic reduced dynamics, Poincare normal form, decay fits
- :mod:`kdvcm.lyapunov`  boundary-flux quadratics, Sylvester nondegeneracy,
  Lyapunov-derivative scans
- :mod:`kdvcm.pde`       full nonlinear KdV initial-boundary-value solver
- :mod:`kdvcm.cli`       command-line orchestration and report files
"""

from .constants import C1, L, Q, SQRT3, SQRT21, THETA
from .exptrig import ExpTrigPoly, ExpTrigTerm

__all__ = [
    "C1",
    "L",
    "Q",
    "SQRT3",
    "SQRT21",
    "THETA",
    "ExpTrigPoly",
    "ExpTrigTerm",
]

__version__ = "0.1.0"

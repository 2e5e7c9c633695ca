"""Reduced two-dimensional dynamics on the center manifold.

The vector field carries the exact quadratic part fixed by the trilinear
integrals plus the cubic coefficients A1..D2 obtained by pairing the
quadratic manifold coefficients against the eigenfunctions.  The Poincare
normal form collapses everything into rho = rho1 + i rho2; rho1 < 0 is the
stability verdict, and r(t)^-2 grows linearly with slope -2 rho1 along
trajectories, which is what the decay fit measures.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C1, Q, SQRT3
from .manifold import ManifoldCoeffs
from .spectral import EigenPair


@dataclass(frozen=True)
class ReducedModel:
    """Cubic truncation of the reduced dynamics plus its normal-form data.

    ``rho1`` is the real part of the Poincare coefficient computed from the
    normal-form algebra, rho1 = (3 A1 + C1 + B2 + 3 D2)/8.  ``rho1_alt``
    keeps the alternative combination (A1 + C1 + B2 + 3 D2)/8 alongside it;
    the decay fit of the untransformed field arbitrates between them.
    """

    q: float
    c1: float
    A1: float
    B1: float
    C1: float
    D1: float
    A2: float
    B2: float
    C2: float
    D2: float
    g20: complex
    g11: complex
    g02: complex
    g21: complex
    rho1: float
    rho1_alt: float
    rho2: float

    def to_dict(self):
        return {
            "q": self.q,
            "c1": self.c1,
            "cubic": {k: getattr(self, k) for k in
                      ("A1", "B1", "C1", "D1", "A2", "B2", "C2", "D2")},
            "g20": {"re": self.g20.real, "im": self.g20.imag},
            "g11": {"re": self.g11.real, "im": self.g11.imag},
            "g02": {"re": self.g02.real, "im": self.g02.imag},
            "g21": {"re": self.g21.real, "im": self.g21.imag},
            "rho1": self.rho1,
            "rho1_alt": self.rho1_alt,
            "rho2": self.rho2,
        }


@dataclass
class Trajectory:
    """Sampled reduced-model trajectory; ``truncated`` marks an escape from the chart."""

    times: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    step_size: float
    truncated: bool = False

    @property
    def radius(self):
        return np.hypot(self.m1, self.m2)

    @property
    def angle(self):
        return np.unwrap(np.arctan2(self.m2, self.m1))


@dataclass(frozen=True)
class DecayFit:
    slope: float
    r_squared: float


def cubic_coefficients(mc: ManifoldCoeffs, pair: EigenPair):
    """The eight integrals A1, B1, C1, D1, A2, B2, C2, D2, computed exactly."""
    p1, p2 = pair.phi1, pair.phi2
    d1, d2 = p1.derivative(), p2.derivative()
    a, b, c = mc.a, mc.b, mc.c

    def anchor(f, phi, dphi):
        return (f * phi * dphi).integral()

    A1 = anchor(a, p1, d1)
    B1 = anchor(b, p1, d1) + anchor(a, p2, d1)
    C1 = anchor(c, p1, d1) + anchor(b, p2, d1)
    D1 = anchor(c, p2, d1)
    A2 = anchor(a, p1, d2)
    B2 = anchor(b, p1, d2) + anchor(a, p2, d2)
    C2 = anchor(c, p1, d2) + anchor(b, p2, d2)
    D2 = anchor(c, p2, d2)
    return A1, B1, C1, D1, A2, B2, C2, D2


def normal_form(coeffs, q=Q, c1=C1):
    """Poincare normal-form data from the eight cubic coefficients.

    g20 = -c1 (sqrt(3) + i), g11 = (c1/2)(sqrt(3) - i), g02 = 0 and
    g21 = (1/4)(3A1 + 3iA2 - iB1 + B2 + C1 + iC2 - 3iD1 + 3D2); then
    rho = (i/2q)(g20 g11 - 2|g11|^2 - |g02|^2/3) + g21/2.
    """
    A1, B1, C1c, D1, A2, B2, C2, D2 = coeffs
    g20 = -c1 * complex(SQRT3, 1.0)
    g11 = 0.5 * c1 * complex(SQRT3, -1.0)
    g02 = 0.0 + 0.0j
    g21 = 0.25 * complex(3 * A1 + B2 + C1c + 3 * D2, 3 * A2 - B1 + C2 - 3 * D1)
    rho = (1j / (2 * q)) * (g20 * g11 - 2 * abs(g11) ** 2 - abs(g02) ** 2 / 3.0) + g21 / 2.0
    rho1 = rho.real
    rho1_alt = (A1 + C1c + B2 + 3 * D2) / 8.0
    rho2 = rho.imag
    return g20, g11, g02, g21, rho1, rho1_alt, rho2


def build_reduced_model(mc: ManifoldCoeffs, pair: EigenPair, q=Q, c1=C1) -> ReducedModel:
    coeffs = cubic_coefficients(mc, pair)
    g20, g11, g02, g21, rho1, rho1_alt, rho2 = normal_form(coeffs, q, c1)
    A1, B1, C1c, D1, A2, B2, C2, D2 = coeffs
    return ReducedModel(
        q=q, c1=c1,
        A1=A1, B1=B1, C1=C1c, D1=D1, A2=A2, B2=B2, C2=C2, D2=D2,
        g20=g20, g11=g11, g02=g02, g21=g21,
        rho1=rho1, rho1_alt=rho1_alt, rho2=rho2,
    )


def vector_field(m, model: ReducedModel, omega_radius=0.1):
    """Cubic truncation F(m) of the reduced dynamics.

    Raises when |m| leaves the manifold chart of the given radius.
    """
    m1, m2 = m
    if math.hypot(m1, m2) > omega_radius:
        raise ValueError("outside manifold chart")
    return _field(m1, m2, model)


def _field(m1, m2, md: ReducedModel):
    q, c1 = md.q, md.c1
    f1 = (
        -q * m2 + SQRT3 * c1 * m2 * m2 + c1 * m1 * m2
        + md.A1 * m1**3 + md.B1 * m1**2 * m2 + md.C1 * m1 * m2**2 + md.D1 * m2**3
    )
    f2 = (
        q * m1 - c1 * m1 * m1 - SQRT3 * c1 * m1 * m2
        + md.A2 * m1**3 + md.B2 * m1**2 * m2 + md.C2 * m1 * m2**2 + md.D2 * m2**3
    )
    return f1, f2


def integrate(m0, horizon, dt, model: ReducedModel, omega_radius=0.1,
              record_every=1) -> Trajectory:
    """Classic fourth-order Runge-Kutta integration of the reduced field.

    Records every ``record_every``-th step.  If the state leaves the chart
    the trajectory is truncated and flagged.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    m1, m2 = float(m0[0]), float(m0[1])
    if math.hypot(m1, m2) > omega_radius:
        raise ValueError("outside manifold chart")
    n_steps = int(round(horizon / dt))
    times = [0.0]
    xs = [m1]
    ys = [m2]
    truncated = False
    half = 0.5 * dt
    sixth = dt / 6.0
    for k in range(1, n_steps + 1):
        a1, b1 = _field(m1, m2, model)
        a2, b2 = _field(m1 + half * a1, m2 + half * b1, model)
        a3, b3 = _field(m1 + half * a2, m2 + half * b2, model)
        a4, b4 = _field(m1 + dt * a3, m2 + dt * b3, model)
        m1 += sixth * (a1 + 2 * a2 + 2 * a3 + a4)
        m2 += sixth * (b1 + 2 * b2 + 2 * b3 + b4)
        if m1 * m1 + m2 * m2 > omega_radius * omega_radius:
            truncated = True
            break
        if k % record_every == 0:
            times.append(k * dt)
            xs.append(m1)
            ys.append(m2)
    return Trajectory(
        times=np.asarray(times), m1=np.asarray(xs), m2=np.asarray(ys),
        step_size=dt, truncated=truncated,
    )


def decay_fit(traj: Trajectory) -> DecayFit:
    """Least-squares fit of r(t)^-2 against t; the slope estimates -2 rho1."""
    if len(traj.times) < 10:
        raise ValueError("need at least 10 samples for a decay fit")
    r = traj.radius
    if np.any(r <= 0.0):
        raise ValueError("decay fit needs r(t) > 0 throughout")
    y = 1.0 / (r * r)
    A = np.vstack([traj.times, np.ones_like(traj.times)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid**2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(slope=float(coef[0]), r_squared=r2)


def rotation_rate(traj: Trajectory) -> float:
    """Mean angular velocity from the unwrapped phase (compare against q)."""
    th = traj.angle
    return float((th[-1] - th[0]) / (traj.times[-1] - traj.times[0]))


def fitted_rho1(model: ReducedModel, r0=5e-3, horizon=None, dt=0.2) -> float:
    """Transformation-free arbitration of rho1: integrate and fit.

    Integrates the untransformed cubic field from (r0, 0) and reads the
    decay coefficient off the r^-2 slope; at small r0 this converges to the
    normal-form rho1.
    """
    if horizon is None:
        horizon = 0.04 / (abs(model.rho1) * r0 * r0)
    period = 2 * math.pi / model.q
    stride = max(1, int(round(period / dt)))
    traj = integrate((r0, 0.0), horizon, dt, model, record_every=stride)
    return -0.5 * decay_fit(traj).slope


def trajectory_to_csv(traj: Trajectory, path):
    """CSV export with header t,m1,m2,r,theta at 17 significant digits."""
    r = traj.radius
    th = traj.angle
    with open(path, "w") as fh:
        fh.write("t,m1,m2,r,theta\n")
        for row in zip(traj.times, traj.m1, traj.m2, r, th):
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")

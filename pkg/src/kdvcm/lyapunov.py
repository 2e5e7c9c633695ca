"""Lyapunov-function route to stability of the reduced dynamics.

Everything is built from the boundary derivatives a'(0), b'(0), c'(0): the
boundary-flux quadratic Ktilde, its leading time derivative along the flow,
the Sylvester-matrix nondegeneracy certificate, and the Lyapunov function
Vtilde = Etilde - mu * Ktilde * dKtilde whose derivative along the cubic
field is scanned for negativity on annuli.  V-dot is evaluated analytically
through the chain rule on the polynomial expressions, never by finite
differences along trajectories, so quartic-scale signs are trustworthy.
"""

import math
from dataclasses import dataclass

import numpy as np

from .constants import Q
from .manifold import ManifoldCoeffs
from .reduced import ReducedModel, _field


@dataclass(frozen=True)
class LyapunovData:
    """Boundary derivatives, coupling mu and the Sylvester determinant."""

    a_prime0: float
    b_prime0: float
    c_prime0: float
    mu: float
    sylvester_det: float


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a V-dot negativity scan on an annulus.

    ``max_vdot`` is the maximum of the quartic leading form of dV/dt (the
    object the stability estimate bounds by -(mu/2) eta1 |m|^4); negative
    means the Lyapunov decrease holds on the annulus.  ``max_vdot_full``
    tracks the maximum of the complete polynomial derivative along the cubic
    field, whose fifth-order remainder overtakes the quartic part once the
    radius is no longer small; it is reported for diagnosis, not bounded.
    """

    radius: float
    mu: float
    samples: int
    max_vdot: float
    argmin: tuple
    eta1_estimate: float
    max_vdot_full: float

    def to_dict(self):
        return {
            "radius": self.radius,
            "mu": self.mu,
            "samples": self.samples,
            "maxVdot": self.max_vdot,
            "argmin": {"m1": self.argmin[0], "m2": self.argmin[1]},
            "eta1Estimate": self.eta1_estimate,
            "maxVdotFull": self.max_vdot_full,
        }


def lyapunov_data(mc: ManifoldCoeffs, mu=1e-3) -> LyapunovData:
    """Bundle boundary derivatives with mu and the checked Sylvester determinant."""
    if not 0.0 < mu <= 0.25:
        raise ValueError("mu must lie in (0, 1/4]")
    det = sylvester_det(mc.a_prime0, mc.b_prime0, mc.c_prime0)
    return LyapunovData(
        a_prime0=mc.a_prime0,
        b_prime0=mc.b_prime0,
        c_prime0=mc.c_prime0,
        mu=mu,
        sylvester_det=det,
    )


def ktilde(m, data: LyapunovData) -> float:
    """Boundary-flux quadratic a'(0) m1^2 + b'(0) m1 m2 + c'(0) m2^2."""
    m1, m2 = m
    return data.a_prime0 * m1 * m1 + data.b_prime0 * m1 * m2 + data.c_prime0 * m2 * m2


def ktilde_dot(m, data: LyapunovData, q=Q) -> float:
    """Leading time derivative of Ktilde along the reduced flow."""
    m1, m2 = m
    return q * (
        data.b_prime0 * m1 * m1
        + 2.0 * (data.c_prime0 - data.a_prime0) * m1 * m2
        - data.b_prime0 * m2 * m2
    )


def sylvester_matrix(a_prime0, b_prime0, c_prime0):
    """The 4x4 Sylvester matrix of the two boundary quadratics (as polynomials
    in m2/m1)."""
    aP, bP, cP = a_prime0, b_prime0, c_prime0
    return np.array(
        [
            [cP, bP, aP, 0.0],
            [0.0, cP, bP, aP],
            [-bP, -2.0 * (aP - cP), bP, 0.0],
            [0.0, -bP, -2.0 * (aP - cP), bP],
        ]
    )


def sylvester_det_closed_form(a_prime0, b_prime0, c_prime0) -> float:
    """Quartic closed form of det(S) in the three boundary derivatives.

    This is the literal cofactor expansion of the 4x4 matrix (checked
    symbolically against the explicit determinant for arbitrary arguments).
    """
    aP, bP, cP = a_prime0, b_prime0, c_prime0
    return (
        4.0 * aP**3 * cP
        - aP**2 * bP**2
        - 8.0 * aP**2 * cP**2
        + 6.0 * aP * bP**2 * cP
        + 4.0 * aP * cP**3
        - bP**4
        - bP**2 * cP**2
    )


def sylvester_det_printed_form(a_prime0, b_prime0, c_prime0) -> float:
    """The quartic as printed alongside the matrix; kept for comparison only.

    It exceeds the true determinant by a'(0) b'(0) (a'(0) - b'(0))
    (a'(0) + c'(0)), so the two coincide exactly on the a'(0) = -c'(0)
    slice, which the actual boundary derivatives happen to satisfy.
    """
    aP, bP, cP = a_prime0, b_prime0, c_prime0
    return (
        aP**3 * (bP + 4.0 * cP)
        + aP**2 * (-2.0 * bP**2 + bP * cP - 8.0 * cP**2)
        + aP * (5.0 * bP**2 * cP + 4.0 * cP**3)
        - bP**2 * cP**2
        - bP**4
    )


def sylvester_det_both(a_prime0, b_prime0, c_prime0):
    """(explicit 4x4 determinant, closed form); the two routes must agree."""
    direct = float(np.linalg.det(sylvester_matrix(a_prime0, b_prime0, c_prime0)))
    closed = sylvester_det_closed_form(a_prime0, b_prime0, c_prime0)
    return direct, closed


def sylvester_det(a_prime0, b_prime0, c_prime0) -> float:
    """det(S), computed both ways; raises if the routes disagree."""
    direct, closed = sylvester_det_both(a_prime0, b_prime0, c_prime0)
    scale = max(1.0, abs(direct), abs(closed))
    if abs(direct - closed) > 1e-10 * scale:
        raise ArithmeticError(
            f"Sylvester determinant routes disagree: {direct!r} vs {closed!r}"
        )
    return direct


def _unit_directions(samples, seed=None):
    if seed is None:
        theta = 2.0 * math.pi * np.arange(samples) / samples
    else:
        theta = np.random.default_rng(seed).uniform(0.0, 2.0 * math.pi, samples)
    return np.cos(theta), np.sin(theta)


def sphere_minimum(data: LyapunovData, q=Q, samples=10000, seed=None):
    """Brute-force minima over unit directions.

    Returns (min of Ktilde^2 + (dKtilde/q)^2, eta1 estimate), the latter being
    half the minimum of Ktilde^2 + dKtilde^2 by the homogeneity bound.
    """
    c, s = _unit_directions(samples, seed)
    k = data.a_prime0 * c * c + data.b_prime0 * c * s + data.c_prime0 * s * s
    kd = q * (
        data.b_prime0 * c * c
        + 2.0 * (data.c_prime0 - data.a_prime0) * c * s
        - data.b_prime0 * s * s
    )
    scaled = k * k + (kd / q) ** 2
    raw = k * k + kd * kd
    return float(np.min(scaled)), 0.5 * float(np.min(raw))


def nondegeneracy_check(data: LyapunovData, q=Q, samples=10000) -> bool:
    """True iff the two boundary quadratics share only the root m = 0.

    Certificate: c'(0) != 0 and det(S) != 0 (1e-10 thresholds), which the
    brute-force sphere minimum corroborates.
    """
    return abs(data.c_prime0) > 1e-10 and abs(data.sylvester_det) > 1e-10


# ----------------------------------------------------------- energy quartics
def energy_quartic(mc: ManifoldCoeffs):
    """Coefficients of Q4(m) = ||m1^2 a + m1 m2 b + m2^2 c||^2 (quartic in m)."""
    aa, ab, ac = mc.a.inner(mc.a), mc.a.inner(mc.b), mc.a.inner(mc.c)
    bb, bc, cc = mc.b.inner(mc.b), mc.b.inner(mc.c), mc.c.inner(mc.c)
    return (aa, 2.0 * ab, 2.0 * ac + bb, 2.0 * bc, cc)


def e_tilde(m, quartic) -> float:
    """Surrogate energy (1/2)||ytilde||^2 = (1/2)|m|^2 + (1/2) Q4(m)."""
    m1, m2 = m
    q40, q31, q22, q13, q04 = quartic
    Q4 = (q40 * m1**4 + q31 * m1**3 * m2 + q22 * m1**2 * m2**2
          + q13 * m1 * m2**3 + q04 * m2**4)
    return 0.5 * (m1 * m1 + m2 * m2) + 0.5 * Q4


def e_tilde_dot(m, quartic, model: ReducedModel) -> float:
    """d/dt of the surrogate energy along the cubic field (analytic gradient)."""
    m1, m2 = m
    q40, q31, q22, q13, q04 = quartic
    f1, f2 = _field(m1, m2, model)
    dQ4_1 = 4 * q40 * m1**3 + 3 * q31 * m1**2 * m2 + 2 * q22 * m1 * m2**2 + q13 * m2**3
    dQ4_2 = q31 * m1**3 + 2 * q22 * m1**2 * m2 + 3 * q13 * m1 * m2**2 + 4 * q04 * m2**3
    return (m1 + 0.5 * dQ4_1) * f1 + (m2 + 0.5 * dQ4_2) * f2


def v_tilde(m, data: LyapunovData, quartic) -> float:
    """Lyapunov function Vtilde = Etilde - mu * Ktilde * dKtilde."""
    return e_tilde(m, quartic) - data.mu * ktilde(m, data) * ktilde_dot(m, data)


def ktilde_ddot(m, data: LyapunovData, q=Q) -> float:
    """Leading form of the second derivative of Ktilde: the rotation derivative
    of ktilde_dot."""
    m1, m2 = m
    aP, bP, cP = data.a_prime0, data.b_prime0, data.c_prime0
    dkd_1 = q * (2.0 * bP * m1 + 2.0 * (cP - aP) * m2)
    dkd_2 = q * (2.0 * (cP - aP) * m1 - 2.0 * bP * m2)
    return dkd_1 * (-q * m2) + dkd_2 * (q * m1)


def v_tilde_dot(m, data: LyapunovData, model: ReducedModel) -> float:
    """Quartic leading form of dVtilde/dt along the flow.

    The surrogate-energy rate collapses to -(1/2) Ktilde^2 at quartic order
    (an exact polynomial identity of the construction), so the leading form
    of dVtilde/dt is

        -(1/2) Ktilde^2 - mu (dKtilde^2 + Ktilde ddKtilde),

    which is quartic homogeneous; its negativity on a sphere is what the
    stability estimate needs.
    """
    q = model.q
    k = ktilde(m, data)
    kd = ktilde_dot(m, data, q)
    kdd = ktilde_ddot(m, data, q)
    return -0.5 * k * k - data.mu * (kd * kd + k * kdd)


def v_tilde_dot_full(m, data: LyapunovData, quartic, model: ReducedModel) -> float:
    """Complete polynomial dVtilde/dt along the cubic field (chain rule).

    Includes the genuine fifth- and sixth-order remainders; matches a
    finite-difference derivative of Vtilde along integrated trajectories.
    """
    m1, m2 = m
    f1, f2 = _field(m1, m2, model)
    aP, bP, cP = data.a_prime0, data.b_prime0, data.c_prime0
    q = model.q
    k = ktilde(m, data)
    kd = ktilde_dot(m, data, q)
    dk_1 = 2.0 * aP * m1 + bP * m2
    dk_2 = bP * m1 + 2.0 * cP * m2
    dkd_1 = q * (2.0 * bP * m1 + 2.0 * (cP - aP) * m2)
    dkd_2 = q * (2.0 * (cP - aP) * m1 - 2.0 * bP * m2)
    d_kkd_dt = (dk_1 * kd + k * dkd_1) * f1 + (dk_2 * kd + k * dkd_2) * f2
    return e_tilde_dot(m, quartic, model) - data.mu * d_kkd_dt


def vtilde_dot_scan(data: LyapunovData, model: ReducedModel, quartic,
                    radius=1e-2, samples=10000, seed=None) -> ScanResult:
    """Scan V-dot over the annulus radius/2 <= |m| <= radius.

    Deterministic polar lattice by default; pass a seed for random samples.
    Returns the largest V-dot found (negative means the Lyapunov decrease
    holds on the annulus) and where it occurred.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    if seed is None:
        n_r = max(8, int(math.sqrt(samples / 16)))
        n_t = int(math.ceil(samples / n_r))
        rr = np.linspace(0.5 * radius, radius, n_r)
        tt = 2.0 * math.pi * np.arange(n_t) / n_t
        R, T = np.meshgrid(rr, tt, indexing="ij")
        m1s = (R * np.cos(T)).ravel()
        m2s = (R * np.sin(T)).ravel()
    else:
        rng = np.random.default_rng(seed)
        rr = np.sqrt(rng.uniform((0.5 * radius) ** 2, radius**2, samples))
        tt = rng.uniform(0.0, 2.0 * math.pi, samples)
        m1s, m2s = rr * np.cos(tt), rr * np.sin(tt)
    values = v_tilde_dot((m1s, m2s), data, model)  # elementwise on arrays
    full = v_tilde_dot_full((m1s, m2s), data, quartic, model)
    iw = int(np.argmax(values))
    worst, arg = values[iw], (float(m1s[iw]), float(m2s[iw]))
    _, eta1 = sphere_minimum(data, model.q, samples=max(10000, samples))
    return ScanResult(
        radius=radius, mu=data.mu, samples=len(m1s),
        max_vdot=float(worst), argmin=arg, eta1_estimate=eta1,
        max_vdot_full=float(np.max(full)),
    )


def mu_sweep(mc: ManifoldCoeffs, model: ReducedModel, radius=1e-2,
             samples=10000, mus=(1e-4, 1e-3, 1e-2)):
    """Run the scan across a sweep of mu values; returns {mu: ScanResult}."""
    quartic = energy_quartic(mc)
    return {
        mu: vtilde_dot_scan(lyapunov_data(mc, mu), model, quartic,
                            radius=radius, samples=samples)
        for mu in mus
    }

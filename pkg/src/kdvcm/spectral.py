"""Critical lengths, the imaginary-axis eigenpair and the discretized spectrum
of the linearized operator A = -d/dx - d^3/dx^3 with y(0)=y(L)=0, y'(L)=0."""

import math
from dataclasses import dataclass

import numpy as np

from .constants import C1, L, Q, SQRT3, THETA
from .exptrig import ExpTrigPoly
from .fdops import evolution_operator


@dataclass(frozen=True)
class CriticalLength:
    """One member 2*pi*sqrt((j^2 + l^2 + j*l)/3) of the critical-length set."""

    j: int
    l: int
    value: float


@dataclass(frozen=True)
class EigenPair:
    """The +-iq eigenpair: frequency q, orthonormal real eigenfunctions, Theta."""

    q: float
    phi1: ExpTrigPoly
    phi2: ExpTrigPoly
    theta: float


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of the discretized operator and the spectral-gap readout."""

    grid_size: int
    eigenvalues: np.ndarray  # complex, sorted by descending real part
    nearest_pair: complex    # eigenvalue closest to +iq
    gap: float               # max Re over eigenvalues excluding the central pair

    def to_dict(self):
        return {
            "gridSize": self.grid_size,
            "eigenvalues": [{"re": z.real, "im": z.imag} for z in self.eigenvalues],
            "nearestPair": {"re": self.nearest_pair.real, "im": self.nearest_pair.imag},
            "gap": self.gap,
        }


def critical_lengths(max_index):
    """All distinct critical lengths for index pairs 1 <= j, l <= max_index.

    Pairs are canonicalized to j <= l, deduplicated by value (1e-12) and
    sorted ascending.
    """
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    out = []
    for j in range(1, max_index + 1):
        for l in range(j, max_index + 1):
            value = 2 * math.pi * math.sqrt((j * j + l * l + j * l) / 3.0)
            if not any(abs(value - c.value) <= 1e-12 for c in out):
                out.append(CriticalLength(j, l, value))
    return sorted(out, key=lambda c: c.value)


def build_eigen_pair():
    """Construct the exact eigenpair at the critical length.

    phi1 = Theta(cos(5u) - 3cos(u) + 2cos(4u)) and
    phi2 = Theta(-sin(5u) - 3sin(u) + 2sin(4u)) with u = x/sqrt(21), which
    satisfy phi' + phi''' = -+ q * (other phi) and vanish with their first
    derivative at both ends.
    """
    phi1 = ExpTrigPoly.harmonics(
        [(5, THETA, 0.0), (1, -3 * THETA, 0.0), (4, 2 * THETA, 0.0)], L
    )
    phi2 = ExpTrigPoly.harmonics(
        [(5, 0.0, -THETA), (1, 0.0, -3 * THETA), (4, 0.0, 2 * THETA)], L
    )
    return EigenPair(q=Q, phi1=phi1, phi2=phi2, theta=THETA)


def eigen_residual(pair, samples=2000):
    """Sup-norms of (phi1' + phi1''' + q phi2, phi2' + phi2''' - q phi1)."""
    r1 = pair.phi1.derivative(1) + pair.phi1.derivative(3) + pair.q * pair.phi2
    r2 = pair.phi2.derivative(1) + pair.phi2.derivative(3) - pair.q * pair.phi1
    return r1.sup_norm(samples), r2.sup_norm(samples)


def integral_identities(pair, c1=C1):
    """The bilinear/trilinear integral table: (label, computed, expected) rows.

    Every row is evaluated by exact exp-trig integration; the expected values
    are the closed forms in terms of q's companion constant c1.
    """
    p1, p2 = pair.phi1, pair.phi2
    d1, d2 = p1.derivative(), p2.derivative()
    rows = [
        ("<phi1,phi1>", p1.inner(p1), 1.0),
        ("<phi2,phi2>", p2.inner(p2), 1.0),
        ("<phi1,phi2>", p1.inner(p2), 0.0),
        ("int phi1 phi2'", (p1 * d2).integral(), 10.0 / (7.0 * math.sqrt(21.0))),
        ("int phi2 phi1'", (p2 * d1).integral(), -10.0 / (7.0 * math.sqrt(21.0))),
        ("int phi1^2 phi1'", (p1 * p1 * d1).integral(), 0.0),
        ("int phi2^2 phi2'", (p2 * p2 * d2).integral(), 0.0),
        ("int phi1^2 phi2'", (p1 * p1 * d2).integral(), -2.0 * c1),
        ("int phi2^2 phi1'", (p2 * p2 * d1).integral(), 2.0 * SQRT3 * c1),
        ("int phi1 phi2 phi1'", (p1 * p2 * d1).integral(), c1),
        ("int phi1 phi2 phi2'", (p1 * p2 * d2).integral(), -SQRT3 * c1),
    ]
    return rows


def discrete_spectrum(grid_size):
    """Eigenvalues of the finite-difference discretization of A.

    The two eigenvalues nearest +-iq converge to +-iq at second order in the
    spacing; the gap (max real part over all remaining eigenvalues) stays
    strictly negative.
    """
    if grid_size < 64:
        raise ValueError("grid_size must be >= 64")
    A, _, _ = evolution_operator(grid_size, L)
    try:
        ev = np.linalg.eigvals(A.toarray())
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigenvalue solve failed at grid size {grid_size}") from exc
    i_plus = int(np.argmin(np.abs(ev - 1j * Q)))
    i_minus = int(np.argmin(np.abs(ev + 1j * Q)))
    mask = np.ones(len(ev), dtype=bool)
    mask[i_plus] = mask[i_minus] = False
    gap = float(np.max(ev[mask].real))
    order = np.argsort(-ev.real)
    return SpectrumReport(
        grid_size=grid_size,
        eigenvalues=ev[order],
        nearest_pair=complex(ev[i_plus]),
        gap=gap,
    )

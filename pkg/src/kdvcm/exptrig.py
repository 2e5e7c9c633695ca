"""Exact algebra for exponential-trigonometric polynomials on [0, L].

A polynomial here is a finite sum of terms

    e^(sigma*x) * (A*cos(omega*x) + B*sin(omega*x)),

which is closed under differentiation, multiplication (product-to-sum
identities) and definite integration, so every quantity in the
center-manifold construction (eigenfunctions, source terms, the manifold
coefficients a, b, c and all their inner products) can be carried in closed
form with no quadrature error.

Frequencies that are integer multiples of 1/sqrt(21) carry their integer
index ``k`` so that sums and differences of such frequencies merge exactly;
irrational frequencies (the roots of the sixth-order characteristic
polynomial) fall back to raw floats with a 1e-12 merge tolerance.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import BASE_FREQ

#: Terms whose amplitudes both fall below this are dropped.
PRUNE_TOL = 1e-15
#: Two (sigma, omega) keys closer than this are considered the same term.
KEY_TOL = 1e-12


@dataclass(frozen=True)
class ExpTrigTerm:
    """One canonical term e^(sigma*x)(coef_cos*cos(omega*x) + coef_sin*sin(omega*x)).

    ``k`` is the optional integer frequency index: when set, ``omega`` equals
    ``k * BASE_FREQ`` exactly.  Canonical form requires omega >= 0, and
    coef_sin == 0 when omega == 0.
    """

    sigma: float
    omega: float
    coef_cos: float
    coef_sin: float
    k: int | None = None


def _canonical(sigma, omega, coef_cos, coef_sin, k):
    if omega < 0:
        omega, coef_sin = -omega, -coef_sin
        k = -k if k is not None else None
    if k is not None:
        omega = abs(k) * BASE_FREQ  # snap indexed frequencies to the exact grid
        k = abs(k)
    if omega == 0.0 or (k is not None and k == 0):
        omega, coef_sin, k = 0.0, 0.0, 0
    return sigma, omega, coef_cos, coef_sin, k


class ExpTrigPoly:
    """Immutable exp-trig polynomial on a fixed domain [0, domain_length].

    Supports ``+``, ``-``, ``*`` (by scalar or by another polynomial),
    ``p(x)`` evaluation on scalars or arrays, exact ``derivative``,
    ``antiderivative``, definite ``integral`` over the domain and ``inner``
    products.  Instances are value objects: all operations return new
    polynomials and never mutate.
    """

    __slots__ = ("_terms", "domain_length")

    def __init__(self, terms, domain_length):
        if domain_length <= 0:
            raise ValueError("domain_length must be positive")
        merged: list[list] = []  # [sigma, omega, A, B, k], sorted by (sigma, omega)
        for t in terms:
            if isinstance(t, ExpTrigTerm):
                s, w, A, B, k = t.sigma, t.omega, t.coef_cos, t.coef_sin, t.k
            else:
                s, w, A, B, k = t
            s, w, A, B, k = _canonical(s, w, A, B, k)
            lo, hi = 0, len(merged)
            while lo < hi:  # insertion point by (sigma, omega)
                mid = (lo + hi) // 2
                if (merged[mid][0], merged[mid][1]) < (s, w):
                    lo = mid + 1
                else:
                    hi = mid
            if lo < len(merged) and _same_key(merged[lo], s, w):
                _merge_into(merged[lo], A, B, k)
            elif lo > 0 and _same_key(merged[lo - 1], s, w):
                _merge_into(merged[lo - 1], A, B, k)
            else:
                merged.insert(lo, [s, w, A, B, k])
        self._terms = tuple(
            ExpTrigTerm(s, w, A, B, k)
            for s, w, A, B, k in merged
            if max(abs(A), abs(B)) > PRUNE_TOL
        )
        self.domain_length = float(domain_length)

    # ------------------------------------------------------------------ build
    @classmethod
    def zero(cls, domain_length):
        return cls((), domain_length)

    @classmethod
    def constant(cls, value, domain_length):
        return cls([(0.0, 0.0, float(value), 0.0, 0)], domain_length)

    @classmethod
    def harmonics(cls, terms, domain_length):
        """Build an indexed pure-trig polynomial from (k, coef_cos, coef_sin) triples."""
        return cls(
            [(0.0, k * BASE_FREQ, A, B, int(k)) for k, A, B in terms], domain_length
        )

    @classmethod
    def exp_trig(cls, sigma, omega, coef_cos, coef_sin, domain_length):
        """Build a single raw-frequency term e^(sigma x)(A cos(omega x) + B sin(omega x))."""
        return cls([(float(sigma), float(omega), coef_cos, coef_sin, None)], domain_length)

    # ------------------------------------------------------------- properties
    @property
    def terms(self) -> tuple[ExpTrigTerm, ...]:
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __repr__(self):
        return f"ExpTrigPoly({len(self._terms)} terms, L={self.domain_length:.6g})"

    def __eq__(self, other):
        if not isinstance(other, ExpTrigPoly):
            return NotImplemented
        return (
            self.domain_length == other.domain_length and self._terms == other._terms
        )

    # ------------------------------------------------------------- arithmetic
    def _check_domain(self, other):
        if abs(self.domain_length - other.domain_length) > KEY_TOL:
            raise ValueError("operands live on different domains")

    def __add__(self, other):
        if isinstance(other, (int, float)):
            other = ExpTrigPoly.constant(other, self.domain_length)
        self._check_domain(other)
        return ExpTrigPoly(self._raw() + other._raw(), self.domain_length)

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other if isinstance(other, ExpTrigPoly) else -float(other))

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            c = float(other)
            return ExpTrigPoly(
                [(t.sigma, t.omega, c * t.coef_cos, c * t.coef_sin, t.k) for t in self._terms],
                self.domain_length,
            )
        self._check_domain(other)
        out = []
        for t1 in self._terms:
            for t2 in other._terms:
                s = t1.sigma + t2.sigma
                A1, B1, A2, B2 = t1.coef_cos, t1.coef_sin, t2.coef_cos, t2.coef_sin
                ksum = t1.k + t2.k if (t1.k is not None and t2.k is not None) else None
                kdif = t1.k - t2.k if ksum is not None else None
                # cos/sin product-to-sum: frequencies add and subtract
                out.append((s, t1.omega + t2.omega,
                            0.5 * (A1 * A2 - B1 * B2), 0.5 * (A1 * B2 + B1 * A2), ksum))
                out.append((s, t1.omega - t2.omega,
                            0.5 * (A1 * A2 + B1 * B2), 0.5 * (B1 * A2 - A1 * B2), kdif))
        return ExpTrigPoly(out, self.domain_length)

    __rmul__ = __mul__

    def _raw(self):
        return [(t.sigma, t.omega, t.coef_cos, t.coef_sin, t.k) for t in self._terms]

    # ------------------------------------------------------------- calculus
    def derivative(self, order: int = 1) -> "ExpTrigPoly":
        """Exact derivative of the given order (order in 1..6 is the supported range)."""
        if not 1 <= order <= 6:
            raise ValueError("order must be in 1..6")
        terms = self._raw()
        for _ in range(order):
            terms = [
                (s, w, s * A + w * B, s * B - w * A, k) for s, w, A, B, k in terms
            ]
        return ExpTrigPoly(terms, self.domain_length)

    def antiderivative(self) -> "ExpTrigPoly":
        """Exact antiderivative (integration constant 0).

        Fails on a constant term: its antiderivative is linear in x, which
        lies outside this algebra.
        """
        out = []
        for t in self._terms:
            s, w, A, B = t.sigma, t.omega, t.coef_cos, t.coef_sin
            if s == 0.0 and w == 0.0:
                raise ValueError("antiderivative of a constant term leaves the algebra")
            if s == 0.0:
                out.append((0.0, w, -B / w, A / w, t.k))
            else:
                d = s * s + w * w
                out.append((s, w, (s * A - w * B) / d, (w * A + s * B) / d, t.k))
        return ExpTrigPoly(out, self.domain_length)

    def integral(self) -> float:
        """Exact definite integral over [0, domain_length]."""
        Ld = self.domain_length
        tot = 0.0
        for t in self._terms:
            s, w, A, B = t.sigma, t.omega, t.coef_cos, t.coef_sin
            if s == 0.0 and w == 0.0:
                tot += A * Ld
            elif s == 0.0:
                tot += A * math.sin(w * Ld) / w + B * (1.0 - math.cos(w * Ld)) / w
            elif w == 0.0:
                tot += A * math.expm1(s * Ld) / s
            else:
                d = s * s + w * w
                ca, sa = (s * A - w * B) / d, (w * A + s * B) / d
                tot += (
                    math.exp(s * Ld) * (ca * math.cos(w * Ld) + sa * math.sin(w * Ld)) - ca
                )
        return tot

    def inner(self, other: "ExpTrigPoly") -> float:
        """L2 inner product over the domain, computed exactly via multiply + integrate."""
        return (self * other).integral()

    def norm(self) -> float:
        return math.sqrt(max(self.inner(self), 0.0))

    # ------------------------------------------------------------- evaluation
    def __call__(self, x):
        """Evaluate at scalar or array x; points outside [0, L] are flagged."""
        arr = np.asarray(x, dtype=float)
        if np.any(arr < -KEY_TOL) or np.any(arr > self.domain_length + KEY_TOL):
            warnings.warn("evaluating outside [0, L]", RuntimeWarning, stacklevel=2)
        out = np.zeros_like(arr)
        for t in self._terms:
            val = t.coef_cos * np.cos(t.omega * arr) if t.coef_cos else 0.0
            if t.coef_sin:
                val = val + t.coef_sin * np.sin(t.omega * arr)
            if t.sigma:
                val = val * np.exp(t.sigma * arr)
            out = out + val
        return float(out) if np.isscalar(x) or arr.ndim == 0 else out

    def sup_norm(self, samples: int = 2000) -> float:
        """Max |p(x)| over a uniform grid of the given size (diagnostic norm)."""
        xs = np.linspace(0.0, self.domain_length, samples)
        return float(np.max(np.abs(self(xs))))

    # ---------------------------------------------------------- serialization
    def to_dict(self) -> dict:
        """JSON document: terms as {sigma, omega, coefCos, coefSin} plus domainLength."""
        return {
            "terms": [
                {"sigma": t.sigma, "omega": t.omega, "coefCos": t.coef_cos, "coefSin": t.coef_sin}
                for t in self._terms
            ],
            "domainLength": self.domain_length,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ExpTrigPoly":
        return cls(
            [(t["sigma"], t["omega"], t["coefCos"], t["coefSin"], None) for t in doc["terms"]],
            doc["domainLength"],
        )

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "ExpTrigPoly":
        return cls.from_dict(json.loads(text))


def _same_key(entry, s, w):
    return abs(entry[0] - s) <= KEY_TOL and abs(entry[1] - w) <= KEY_TOL


def _merge_into(entry, A, B, k):
    entry[2] += A
    entry[3] += B
    if entry[4] is None:
        entry[4] = k

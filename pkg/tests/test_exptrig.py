import math

import numpy as np
import pytest
from scipy.integrate import quad

from kdvcm.constants import BASE_FREQ, L, SQRT21
from kdvcm.exptrig import ExpTrigPoly, ExpTrigTerm

RNG = np.random.default_rng(20260809)


def random_poly(n_terms=4, with_exp=True):
    terms = []
    for _ in range(n_terms):
        sigma = float(RNG.uniform(-0.3, 0.3)) if with_exp else 0.0
        omega = float(RNG.uniform(0.0, 3.0))
        terms.append((sigma, omega, float(RNG.normal()), float(RNG.normal()), None))
    return ExpTrigPoly(terms, L)


class TestCanonicalForm:
    def test_negative_omega_normalized(self):
        p = ExpTrigPoly([(0.0, -1.5, 2.0, 3.0, None)], L)
        (t,) = p.terms
        assert t.omega == 1.5 and t.coef_cos == 2.0 and t.coef_sin == -3.0

    def test_zero_omega_absorbs_sin(self):
        p = ExpTrigPoly([(0.1, 0.0, 2.0, 3.0, None)], L)
        (t,) = p.terms
        assert t.omega == 0.0 and t.coef_sin == 0.0

    def test_duplicate_keys_merge(self):
        p = ExpTrigPoly([(0.0, 2.0, 1.0, 0.5, None), (0.0, 2.0, 2.0, -0.5, None)], L)
        assert len(p) == 1
        (t,) = p.terms
        assert t.coef_cos == 3.0 and t.coef_sin == 0.0

    def test_indexed_frequencies_snap_and_merge(self):
        a = ExpTrigPoly.harmonics([(5, 1.0, 0.0)], L) * ExpTrigPoly.harmonics([(4, 1.0, 0.0)], L)
        # cos(5u)cos(4u) = 1/2 cos(u) + 1/2 cos(9u) with u = x/sqrt(21)
        freqs = {t.k: t.coef_cos for t in a.terms}
        assert freqs == {1: 0.5, 9: 0.5}
        assert all(t.omega == abs(t.k) * BASE_FREQ for t in a.terms)

    def test_tiny_amplitudes_pruned(self):
        p = ExpTrigPoly([(0.0, 1.0, 1e-16, 0.0, None)], L)
        assert len(p) == 0

    def test_bad_domain_rejected(self):
        with pytest.raises(ValueError):
            ExpTrigPoly((), 0.0)


class TestDifferentiate:
    def test_cosine_derivative(self):
        p = ExpTrigPoly.harmonics([(1, 1.0, 0.0)], L)
        d = p.derivative()
        (t,) = d.terms
        assert t.coef_cos == 0.0
        assert t.coef_sin == pytest.approx(-1.0 / SQRT21, rel=1e-15)

    def test_constant_derivative_is_zero(self):
        assert len(ExpTrigPoly.constant(1.0, L).derivative()) == 0

    def test_sixth_order_annihilates_characteristic_root(self):
        # alpha1 + i*beta1 is a root of lam^6 + 2lam^4 + lam^2 + 4q^2, so
        # f = e^(alpha1 x) cos(beta1 x) satisfies f^(6) + 2f^(4) + f'' + 4q^2 f = 0.
        from kdvcm.constants import Q
        from kdvcm.manifold import fundamental_basis

        basis = fundamental_basis(Q)
        f = basis.minus_basis[0]
        r = f.derivative(6) + 2.0 * f.derivative(4) + f.derivative(2) + (4 * Q * Q) * f
        xs = np.linspace(0, L, 1000)
        assert np.max(np.abs(r(xs))) <= 1e-12

    def test_order_validation(self):
        p = random_poly()
        with pytest.raises(ValueError):
            p.derivative(0)
        with pytest.raises(ValueError):
            p.derivative(7)

    def test_linear_in_input(self):
        p, q = random_poly(), random_poly()
        d1 = (p + 2.0 * q).derivative()
        d2 = p.derivative() + 2.0 * q.derivative()
        xs = np.linspace(0, L, 200)
        assert np.allclose(d1(xs), d2(xs), atol=1e-13)


class TestMultiply:
    def test_product_to_sum(self):
        p = ExpTrigPoly([(0.0, 0.7, 1.0, 0.0, None)], L)
        sq = p * p
        by_omega = {t.omega: t for t in sq.terms}
        assert by_omega[0.0].coef_cos == pytest.approx(0.5)
        assert by_omega[1.4].coef_cos == pytest.approx(0.5)

    def test_multiply_by_zero(self):
        assert len(random_poly() * ExpTrigPoly.zero(L)) == 0

    def test_commutative_and_pointwise(self):
        p, q = random_poly(5), random_poly(5)
        pq, qp = p * q, q * p
        xs = np.linspace(0, L, 100)
        scale = max(1.0, p.sup_norm() * q.sup_norm())
        assert np.max(np.abs(pq(xs) - p(xs) * q(xs))) <= 1e-12 * scale
        assert np.max(np.abs(pq(xs) - qp(xs))) <= 1e-13 * scale

    def test_eigenfunction_trilinear_value(self):
        from kdvcm.spectral import build_eigen_pair

        pair = build_eigen_pair()
        val = pair.phi1.inner(pair.phi2.derivative())
        assert val == pytest.approx(10.0 / (7.0 * SQRT21), abs=1e-13)

    def test_domain_mismatch_rejected(self):
        with pytest.raises(ValueError):
            random_poly() * ExpTrigPoly.constant(1.0, L + 1.0)


class TestIntegrate:
    def test_full_period_integral_vanishes(self):
        p = ExpTrigPoly.harmonics([(3, 1.0, 0.0)], L)  # 3L/sqrt(21) = 2*pi
        assert p.integral() == pytest.approx(0.0, abs=1e-14)

    def test_partial_period_value(self):
        # int_0^L cos(x/sqrt(21)) dx = sqrt(21) sin(2*pi/3) = 3*sqrt(7)/2
        p = ExpTrigPoly.harmonics([(1, 1.0, 0.0)], L)
        expected = 3.0 * math.sqrt(7.0) / 2.0
        assert p.integral() == pytest.approx(expected, rel=1e-13)
        num, _ = quad(p, 0.0, L, limit=200)
        assert p.integral() == pytest.approx(num, rel=1e-12)

    def test_constant_integral(self):
        assert ExpTrigPoly.constant(2.5, L).integral() == pytest.approx(2.5 * L, rel=1e-15)

    def test_orthogonality_of_eigenfunctions(self):
        from kdvcm.spectral import build_eigen_pair

        pair = build_eigen_pair()
        assert (pair.phi1 * pair.phi2).integral() == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("trial", range(6))
    def test_agrees_with_adaptive_quadrature(self, trial):
        p = random_poly(4)
        num, err = quad(p, 0.0, L, limit=400)
        scale = max(1.0, abs(num))
        assert abs(p.integral() - num) <= 1e-10 * scale

    def test_linearity(self):
        p, q = random_poly(), random_poly()
        alpha, beta = 1.7, -0.4
        lhs = (alpha * p + beta * q).integral()
        rhs = alpha * p.integral() + beta * q.integral()
        scale = max(1.0, abs(p.integral()), abs(q.integral()))
        assert abs(lhs - rhs) <= 1e-13 * scale


class TestEvaluate:
    def test_eigenfunction_boundary_values(self):
        from kdvcm.spectral import build_eigen_pair

        pair = build_eigen_pair()
        assert pair.phi1(0.0) == pytest.approx(0.0, abs=1e-14)
        assert abs(pair.phi1(L)) <= 1e-12

    def test_constant(self):
        p = ExpTrigPoly.constant(1.0, L)
        assert p(0.3) == 1.0
        assert np.all(p(np.linspace(0, L, 7)) == 1.0)

    def test_outside_domain_flagged(self):
        p = random_poly()
        with pytest.warns(RuntimeWarning):
            p(-1.0)
        with pytest.warns(RuntimeWarning):
            p(L + 1.0)


class TestInnerProduct:
    def test_normalization_of_phi1(self):
        from kdvcm.spectral import build_eigen_pair

        pair = build_eigen_pair()
        assert pair.phi1.inner(pair.phi1) == pytest.approx(1.0, abs=1e-12)

    def test_inner_with_zero(self):
        assert random_poly().inner(ExpTrigPoly.zero(L)) == 0.0

    def test_manifold_coefficient_orthogonal_to_phi1(self, manifold_coeffs, eigen_pair):
        assert abs(manifold_coeffs.a.inner(eigen_pair.phi1)) <= 1e-10


class TestAntiderivative:
    @pytest.mark.parametrize("trial", range(4))
    def test_roundtrip_derivative_of_antiderivative(self, trial):
        p = random_poly(4)
        back = p.antiderivative().derivative()
        for t_in, t_out in zip(p.terms, back.terms):
            assert t_out.coef_cos == pytest.approx(t_in.coef_cos, rel=1e-13, abs=1e-15)
            assert t_out.coef_sin == pytest.approx(t_in.coef_sin, rel=1e-13, abs=1e-15)

    def test_constant_rejected(self):
        with pytest.raises(ValueError):
            ExpTrigPoly.constant(1.0, L).antiderivative()


class TestSerialization:
    def test_roundtrip(self):
        p = random_poly(5)
        q = ExpTrigPoly.from_json(p.to_json())
        xs = np.linspace(0, L, 50)
        assert np.allclose(p(xs), q(xs), atol=1e-15)
        assert q.domain_length == p.domain_length

    def test_field_order(self):
        doc = ExpTrigPoly.harmonics([(1, 1.0, 2.0)], L).to_dict()
        assert list(doc) == ["terms", "domainLength"]
        assert list(doc["terms"][0]) == ["sigma", "omega", "coefCos", "coefSin"]

    def test_terms_immutable(self):
        p = random_poly()
        assert isinstance(p.terms, tuple)
        assert isinstance(p.terms[0], ExpTrigTerm)

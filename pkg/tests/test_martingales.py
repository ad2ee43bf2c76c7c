import math
from fractions import Fraction

import numpy as np
import pytest

from ncrw.bessel import scaled_bessel_i_all, truncation_radius
from ncrw.errors import ConvergenceError
from ncrw.martingales import (FiniteConfiguration, LatticeSpec,
                              backward_transform, backward_transform_exp,
                              esscher_weight, lagrange_basis, lattice_basis,
                              lattice_martingale, martingale_coefficients,
                              martingale_polynomial, site_martingale,
                              site_martingale_row, vandermonde)


def transition_weights(t, center, radius):
    it = scaled_bessel_i_all(radius, t)
    return {y: it[abs(y - center)] for y in range(center - radius,
                                                  center + radius + 1)}


class TestConfigurationTypes:
    def test_valid(self):
        c = FiniteConfiguration((-3, 0, 2))
        assert len(c) == 3
        assert c.sites == (-3, 0, 2)

    def test_rejects_unsorted_or_repeated(self):
        with pytest.raises(ValueError):
            FiniteConfiguration((2, 0))
        with pytest.raises(ValueError):
            FiniteConfiguration((0, 0, 5))
        with pytest.raises(ValueError):
            FiniteConfiguration(())

    def test_lattice_spec(self):
        assert LatticeSpec(2).density == 0.5
        with pytest.raises(ValueError):
            LatticeSpec(1)

    def test_equidistant(self):
        assert FiniteConfiguration.equidistant(2, 4).sites == \
            (-4, -2, 0, 2, 4)


class TestEsscherWeight:
    def test_trivial(self):
        assert esscher_weight(0.0, 3.0, 7) == 1.0
        assert esscher_weight(1.3, 0.0, 0) == 1.0
        assert esscher_weight(1.0, 1.0, 2) == pytest.approx(
            math.exp(2.0 - (math.cosh(1.0) - 1.0)), rel=1e-15)

    def test_positive_and_guards(self):
        assert esscher_weight(-4.0, 2.0, -3) > 0.0
        with pytest.raises(ValueError):
            esscher_weight(math.inf, 1.0, 0)
        with pytest.raises(ValueError):
            esscher_weight(0.5, -1.0, 0)

    @pytest.mark.parametrize("alpha", [0.25, -0.5, 1.0])
    def test_martingale_mean(self, alpha):
        # sum_y p(t, y|x) G_alpha(t, y) = G_alpha(0, x)
        t, x = 1.5, 2
        radius = truncation_radius(t, 1e-25) + 10
        total = math.fsum(w * esscher_weight(alpha, t, y)
                          for y, w in transition_weights(t, x, radius).items())
        assert total == pytest.approx(esscher_weight(alpha, 0.0, x),
                                      rel=1e-12)


class TestMartingalePolynomials:
    def test_low_degree_closed_forms(self):
        for t in (0.0, 0.7, 2.0):
            for x in (-2.0, 0.0, 3.0):
                assert martingale_polynomial(0, t, x) == 1.0
                assert martingale_polynomial(1, t, x) == x
                assert martingale_polynomial(2, t, x) == \
                    pytest.approx(x * x - t, rel=1e-15, abs=1e-15)
                assert martingale_polynomial(3, t, x) == \
                    pytest.approx(x ** 3 - 3 * t * x, rel=1e-15, abs=1e-15)
                assert martingale_polynomial(4, t, x) == pytest.approx(
                    x ** 4 - 6 * t * x * x + 3 * t * t - t, rel=1e-15,
                    abs=1e-15)

    def test_example_value(self):
        assert martingale_polynomial(4, 1.0, 0.0) == pytest.approx(2.0)

    def test_initial_condition_monic(self):
        for n in range(13):
            table = martingale_coefficients(n)
            assert table[n] == (Fraction(1),)  # monic, no t dependence
            for j in range(n):
                assert table[j][0] == 0  # coefficients vanish at t = 0
        assert martingale_polynomial(5, 0.0, 1.5) == 1.5 ** 5

    def test_degree_guard(self):
        with pytest.raises(ValueError):
            martingale_polynomial(13, 1.0, 0.0)
        # explicit opt-in past the default guard
        assert martingale_polynomial(13, 0.0, 2.0, n_max=14) == 2.0 ** 13

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_semigroup_inverts_polynomials(self, t):
        radius = truncation_radius(t, 1e-30) + 4
        for u in range(-2, 3):
            weights = transition_weights(t, u, radius)
            for n in range(9):
                total = math.fsum(w * martingale_polynomial(n, t, float(y))
                                  for y, w in weights.items())
                assert total == pytest.approx(float(u) ** n, abs=1e-8)

    @pytest.mark.parametrize("alpha", [0.25, -0.25, 0.5, -0.5, 1.0])
    def test_generating_function_partial_sums(self, alpha):
        # partial sums approach the exponential martingale within a bound
        # from the first three omitted terms (they decay geometrically)
        for t in (0.5, 1.0, 2.0):
            for x in range(-3, 4):
                partial = math.fsum(
                    martingale_polynomial(n, t, float(x)) * alpha ** n
                    / math.factorial(n) for n in range(13))
                tail = [abs(martingale_polynomial(n, t, float(x), n_max=15)
                            * alpha ** n) / math.factorial(n)
                        for n in (13, 14, 15)]
                assert tail[2] <= max(tail[0], 1e-15)  # decaying regime
                bound = 2.0 * (tail[0] + tail[1] + tail[2])
                target = esscher_weight(alpha, t, x)
                assert abs(partial - target) <= bound + 1e-13


class TestBackwardTransform:
    def test_constant(self):
        assert backward_transform(lambda w: 1.0, 0, 1.3, 2) == \
            pytest.approx(1.0, abs=1e-12)

    def test_reproduces_martingale_polynomials(self):
        for n in range(7):
            for t, x in [(0.5, 0), (1.0, 2), (2.0, -3)]:
                got = backward_transform(lambda w, n=n: float(w) ** n, n, t, x)
                assert got == pytest.approx(
                    martingale_polynomial(n, t, float(x)), rel=1e-10,
                    abs=1e-10)

    def test_time_zero_evaluates_in_place(self):
        assert backward_transform(lambda w: w * w, 2, 0.0, 5) == 25.0

    @pytest.mark.parametrize("alpha", [-1.0, -0.5, 0.25, 1.0])
    @pytest.mark.parametrize("t", [0.5, 2.0, 5.0])
    def test_exponential_identity(self, alpha, t):
        got = backward_transform_exp(alpha, t, 3)
        assert got == pytest.approx(math.exp(-t * (math.cosh(alpha) - 1.0)),
                                    abs=1e-10)

    def test_divergence_guard(self):
        with pytest.raises(ConvergenceError):
            # super-exponential growth beats the signed weights' decay
            backward_transform(lambda w: math.exp(min(float(w * w), 700.0)),
                               0, 4.0, 0, max_radius=64)


class TestLagrangeBasis:
    def test_kronecker(self):
        c = FiniteConfiguration((0, 2))
        assert lagrange_basis(c, 0, 0.0) == 1.0
        assert lagrange_basis(c, 0, 2.0) == 0.0
        assert lagrange_basis(c, 0, 4.0) == pytest.approx(-1.0)

    def test_index_guard(self):
        with pytest.raises(IndexError):
            lagrange_basis(FiniteConfiguration((0, 2)), 2, 1.0)


class TestVandermonde:
    def test_small(self):
        assert vandermonde((0, 1, 2)) == 2.0
        assert vandermonde((0, 0, 5)) == 0.0
        assert vandermonde((7,)) == 1.0

    def test_against_determinant(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            n = int(rng.integers(2, 7))
            x = rng.normal(size=n) * 3.0
            mono = np.vander(x, increasing=True)
            det = float(np.linalg.det(mono))
            assert vandermonde(x) == pytest.approx(det, rel=1e-9, abs=1e-12)


class TestSiteMartingale:
    def test_kronecker_at_time_zero(self):
        c = FiniteConfiguration((0, 2))
        assert site_martingale(c, 0, 0.0, 0) == 1.0
        assert site_martingale(c, 1, 0.0, 0) == 0.0
        assert site_martingale(c, 1, 0.0, 2) == 1.0

    def test_polynomial_expansion_oracle(self):
        # expand the Lagrange polynomial in monomials and sum martingale
        # polynomials: must match the direct truncated transform
        c = FiniteConfiguration((-1, 0, 3))
        t, y = 1.2, 2
        row = site_martingale_row(c, t, y)
        for k in range(3):
            others = [u for i, u in enumerate(c.sites) if i != k]
            coeffs = np.polynomial.polynomial.polyfromroots(others)
            scale = np.prod([c.sites[k] - u for u in others])
            oracle = sum(float(cf) * martingale_polynomial(n, t, float(y))
                         for n, cf in enumerate(coeffs)) / scale
            assert row[k] == pytest.approx(oracle, rel=1e-10, abs=1e-10)

    def test_martingale_mean_is_kronecker(self):
        c = FiniteConfiguration((0, 2))
        t = 1.0
        radius = truncation_radius(t, 1e-25) + 8
        for j, uj in enumerate(c.sites):
            weights = transition_weights(t, uj, radius)
            for k in range(len(c)):
                total = math.fsum(w * site_martingale(c, k, t, y)
                                  for y, w in weights.items())
                assert total == pytest.approx(float(j == k), abs=1e-8)

    def test_single_site_configuration_trivial(self):
        c = FiniteConfiguration((4,))
        for t, y in [(0.0, 4), (1.5, -2), (3.0, 9)]:
            assert site_martingale(c, 0, t, y) == pytest.approx(1.0,
                                                                abs=1e-12)


class TestLatticeBasis:
    def test_lattice_points(self):
        lat = LatticeSpec(2)
        assert lattice_basis(lat, 3, 6.0) == 1.0
        assert abs(lattice_basis(lat, 3, 8.0)) < 1e-15
        assert lattice_basis(lat, 0, 1.0) == pytest.approx(2.0 / math.pi)

    def test_removable_singularity_series(self):
        lat = LatticeSpec(3)
        # just off a lattice point: series branch, continuous with sin form
        a = lattice_basis(lat, 1, 3.0 + 1e-5)
        b = math.sin(math.pi * 1e-5 / 3) / (math.pi * 1e-5 / 3)
        assert a == pytest.approx(b, rel=1e-12)

    def test_finite_window_limit(self):
        # Lagrange bases of growing equidistant windows approach the sinc
        lat = LatticeSpec(2)
        zs = [1.0, 2.5, -3.0, 0.5]
        errs = []
        for half in (10, 20, 40, 80):
            config = FiniteConfiguration.equidistant(2, half)
            k_center = len(config) // 2  # site 0
            err = max(abs(lagrange_basis(config, k_center, z)
                          - lattice_basis(lat, 0, z)) for z in zs)
            errs.append(err)
        assert errs[0] > errs[1] > errs[2] > errs[3]


class TestLatticeMartingale:
    def test_kronecker_at_time_zero(self):
        lat = LatticeSpec(2)
        assert lattice_martingale(lat, 3, 0.0, 6) == pytest.approx(1.0,
                                                                   abs=1e-13)
        assert lattice_martingale(lat, 3, 0.0, 8) == pytest.approx(0.0,
                                                                   abs=1e-13)
        assert lattice_martingale(lat, 0, 0.0, 1) == pytest.approx(
            2.0 / math.pi, abs=1e-13)

    def test_martingale_mean_is_kronecker(self):
        lat = LatticeSpec(2)
        t, j = 0.8, 1
        radius = truncation_radius(t, 1e-20) + 6
        weights = transition_weights(t, 2 * j, radius)
        for k in (0, 1, 2):
            total = math.fsum(w * lattice_martingale(lat, k, t, y)
                              for y, w in weights.items())
            assert total == pytest.approx(float(j == k), abs=1e-8)

import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from zetalaplace import special_functions as sf
from zetalaplace.errors import BranchCutError, DomainError, PoleError


def mp_gamma(z):
    return complex(mp.gamma(mp.mpc(z.real, z.imag)))


class TestConstants:
    def test_values_against_mpmath(self):
        mp.mp.dps = 30
        assert sf.EULER_GAMMA == pytest.approx(float(mp.euler), rel=1e-16)
        assert sf.ZETA_PRIME_2 == pytest.approx(float(mp.zeta(2, derivative=1)), rel=1e-15)
        assert sf.ZETA_3 == pytest.approx(float(mp.zeta(3)), rel=1e-16)
        assert sf.CONSTANTS.pi == math.pi

    def test_gamma_derivatives_at_one(self):
        mp.mp.dps = 30
        expected = [float(mp.diff(mp.gamma, 1, n)) for n in range(5)]
        np.testing.assert_allclose(sf.gamma_derivatives_at_one(), expected, rtol=1e-13)

    def test_bernoulli(self):
        b = sf.bernoulli_numbers(13)  # B_0 .. B_12
        assert b[0] == 1 and b[1] == -0.5 and b[2] * 6 == 1 and b[12] * 2730 == -691


class TestGamma:
    @pytest.mark.parametrize("z, expected", [
        (1.0, 1.0), (5.0, 24.0), (0.5, math.sqrt(math.pi)), (-0.5, -2 * math.sqrt(math.pi)),
    ])
    def test_real_points(self, z, expected):
        assert sf.gamma(z).real == pytest.approx(expected, rel=1e-14)

    def test_random_grid_against_mpmath(self, rng):
        z = rng.uniform(-30, 60, 200) + 1j * rng.uniform(-80, 80, 200)
        got = sf.gamma(z)
        want = np.array([mp_gamma(x) for x in z])
        assert np.max(np.abs(got / want - 1)) < 1e-12

    def test_log_gamma_against_mpmath(self, rng):
        z = rng.uniform(0.01, 100, 200) + 1j * rng.uniform(-500, 500, 200)
        got = sf.log_gamma(z)
        want = np.array([complex(mp.loggamma(mp.mpc(x.real, x.imag))) for x in z])
        assert np.max(np.abs(got - want) / np.maximum(1, np.abs(want))) < 1e-13

    @pytest.mark.parametrize("z", [0.0, -1.0, -7.0])
    def test_poles(self, z):
        with pytest.raises(PoleError):
            sf.gamma(z)

    def test_log_gamma_branch_cut(self):
        with pytest.raises(BranchCutError):
            sf.log_gamma(-2.5)

    def test_non_finite_input(self):
        with pytest.raises(DomainError):
            sf.gamma(complex(math.inf, 0))

    @given(st.floats(0.1, 40), st.floats(-40, 40))
    def test_recurrence(self, x, y):
        z = complex(x, y)
        assert abs(sf.gamma(z + 1) / (z * sf.gamma(z)) - 1) < 1e-12

    @given(st.floats(0.1, 30), st.floats(-30, 30))
    def test_duplication(self, x, y):
        z = complex(x, y)
        lhs = sf.log_gamma(z) + sf.log_gamma(z + 0.5)
        rhs = (1 - 2 * z) * math.log(2) + 0.5 * math.log(math.pi) + sf.log_gamma(2 * z)
        d = lhs - rhs
        d = complex(d.real, math.remainder(d.imag, 2 * math.pi))
        assert abs(d) < 1e-11 * max(1.0, abs(lhs))

    @given(st.floats(-60, 60))
    def test_half_line_modulus(self, y):
        assert abs(sf.gamma(0.5 + 1j * y)) ** 2 == pytest.approx(math.pi / math.cosh(math.pi * y),
                                                                  rel=1e-12)

    @given(st.floats(0.1, 50), st.floats(-50, 50))
    def test_conjugate_symmetry(self, x, y):
        z = complex(x, y)
        assert sf.log_gamma(z.conjugate()) == sf.log_gamma(z).conjugate()


class TestK0:
    def test_against_mpmath_all_sectors(self, rng):
        r = np.geomspace(1e-3, 300, 150)
        theta = rng.uniform(-math.pi + 1e-3, math.pi - 1e-3, r.size)
        z = r * np.exp(1j * theta)
        got = sf.bessel_k0(z)
        want = np.array([complex(mp.besselk(0, mp.mpc(x.real, x.imag))) for x in z])
        assert np.max(np.abs(got / want - 1)) < 1e-12

    def test_branch_overlap(self):
        r = np.linspace(4, 8, 60)
        z = r * np.exp(1j * np.linspace(-2.3, 2.3, 60))
        rel = np.abs(sf.k0_ascending(z) - sf.k0_laplace(z)) / np.abs(sf.k0_laplace(z))
        assert rel.max() <= 1e-9

    def test_asymptotic_leading_terms(self):
        z = 40 + 30j
        assert abs(sf.k0_asymptotic(z, 6) / sf.bessel_k0(z) - 1) < 1e-9
        # second coefficient is -1/(8z)
        c = (sf.bessel_k0(z) * np.sqrt(2 * z / np.pi) * np.exp(z) - 1) * z
        assert c == pytest.approx(-1 / 8, abs=2e-3)

    def test_zero_is_pole(self):
        with pytest.raises(DomainError):
            sf.bessel_k0(0.0)

    @pytest.mark.parametrize("z", [-3.0 + 1e-300j, -3.0 - 1e-300j])
    def test_cut_sides(self, z):
        want = complex(mp.besselk(0, mp.mpc(z.real, z.imag)))
        assert abs(sf.bessel_k0(z) - want) < 1e-12 * abs(want)

    @given(st.floats(0.01, 200), st.floats(-3.1, 3.1))
    def test_conjugate(self, r, th):
        z = r * complex(math.cos(th), math.sin(th))
        a, b = sf.bessel_k0(z), sf.bessel_k0(z.conjugate())
        assert abs(b - a.conjugate()) <= 1e-13 * abs(a)


def test_cpow_principal_branch():
    assert sf.cpow(-1, 0.5) == pytest.approx(1j)
    assert sf.cpow(2, 3) == pytest.approx(8)

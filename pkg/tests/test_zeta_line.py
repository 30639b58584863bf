import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from zetalaplace import zeta_line as zl
from zetalaplace.errors import RangeError, ToleranceError


def mp_zeta(t):
    return complex(mp.zeta(mp.mpc(0.5, t)))


@pytest.mark.parametrize("t", [0.0, 1.0, 7.5, 14.134725141734693, 100.0, 1234.5, 4999.0])
def test_em_against_mpmath(t):
    mp.mp.dps = 25
    assert abs(zl.zeta_half_em(t) - mp_zeta(t)) < 1e-12


def test_em_at_origin():
    assert zl.zeta_half_em(0.0) == pytest.approx(-1.4603545088095868, abs=1e-13)


def test_em_bound_is_reported():
    value, bound = zl.zeta_half_em_bounded(300.0, 1e-10)
    assert bound <= 0.5e-10
    assert abs(value - mp_zeta(300.0)) < 1e-10


@pytest.mark.parametrize("t", [-1.0, 5000.5])
def test_em_range(t):
    with pytest.raises(RangeError):
        zl.zeta_half_em(t)


def test_em_tolerance_floor():
    with pytest.raises(ToleranceError):
        zl.zeta_half_em(10.0, 1e-15)


def test_rs_against_mpmath(rng):
    mp.mp.dps = 20
    t = np.concatenate([rng.uniform(10, 100, 10), rng.uniform(100, 1e5, 15)])
    got = zl.zeta_half_rs(t)
    want = np.array([mp_zeta(x) for x in t])
    assert np.max(np.abs(got - want)) < 1e-8


def test_rs_against_em(rng):
    t = rng.uniform(10, 3000, 200)
    diff = np.abs(zl.zeta_half_rs(t) - np.array([zl.zeta_half_em(x) for x in t]))
    assert diff.max() <= 1e-7


def test_rs_bound_covers_error(rng):
    t = rng.uniform(10, 5000, 600)
    diff = np.abs(zl.zeta_half_rs(t) - np.array([zl.zeta_half_em(x) for x in t]))
    assert np.all(diff <= zl.rs_error_bound(t) + 1e-11)


def test_first_zero():
    t = 14.134725141734693
    assert abs(zl.hardy_z(t)) < zl.rs_error_bound(t)
    assert abs(zl.zeta_half_em(t)) < 1e-12  # default certified tolerance


@pytest.mark.parametrize("t", [5.0, 9.99, 10.0, 10.01, 500.0])
def test_hardy_z_real_and_modulus(t):
    zeta = zl.zeta_half_em(t)
    rotated = zeta * np.exp(1j * zl.riemann_siegel_theta(t))
    assert abs(rotated.imag) < 1e-11
    assert abs(abs(zl.hardy_z(t)) - abs(zeta)) < 1e-9


def test_theta_against_mpmath():
    for t in (1.0, 17.0, 1e3, 9e4):
        assert zl.riemann_siegel_theta(t) == pytest.approx(float(mp.siegeltheta(t)), abs=1e-10)


@given(st.floats(10, 1e5))
def test_rs_scalar_matches_vector(t):
    assert zl.zeta_half_rs(t) == zl.zeta_half_rs(np.array([t]))[0]


def test_rs_range():
    with pytest.raises(RangeError):
        zl.zeta_half_rs(9.0)
    with pytest.raises(RangeError):
        zl.zeta_half_rs(np.array([100.0, 2e5]))


def test_sample_and_fourth_power():
    s = zl.critical_line_sample(50.0)
    assert s.z4 == pytest.approx(abs(s.zeta) ** 4, rel=1e-14)
    assert zl.abs_zeta_pow4(50.0) == pytest.approx(s.z4, rel=1e-9)
    assert zl.critical_line_power(np.array([0.0]), 1)[0] == pytest.approx(1.4603545088095868 ** 2)

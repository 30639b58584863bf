import numpy as np
import pytest

from zetalaplace import rs_kernel


def test_shipped_kernel_matches_fresh_build():
    fresh = rs_kernel.generate_kernel()
    shipped = rs_kernel.load_kernel()
    assert len(fresh) == len(shipped) == rs_kernel.MAX_ORDER
    for a, b in zip(fresh, shipped):
        assert a.shape == b.shape
        np.testing.assert_array_equal(a, b)


def test_leading_polynomial_value():
    # P_0(p) = F(p); F(0) = (e^{3 pi i/8} - i sqrt 2) / 2
    want = (np.exp(3j * np.pi / 8) - 1j * np.sqrt(2)) / 2
    assert rs_kernel.evaluate_kernel(0, np.array([0.0]))[0] == pytest.approx(want, abs=1e-15)


@pytest.mark.parametrize("k", range(rs_kernel.MAX_ORDER))
def test_parity(k):
    p = np.linspace(-1, 1, 9)
    sign = -1 if k % 2 else 1
    np.testing.assert_allclose(rs_kernel.evaluate_kernel(k, -p),
                               sign * rs_kernel.evaluate_kernel(k, p), atol=1e-15)


def test_parity_form_matches_dense_polynomials():
    p = np.linspace(-1, 1, 33)
    for k, poly in enumerate(rs_kernel.load_kernel()):
        dense = np.polynomial.polynomial.polyval(p, poly)
        np.testing.assert_allclose(rs_kernel.evaluate_kernel(k, p), dense, atol=1e-13)


def test_remainder_coefficients_first_rows():
    d = rs_kernel.remainder_d_coefficients(3)
    assert d[(0, 0)] == 1
    assert d[(1, 0)] * 12 == 1 and d[(1, 1)] == 0
    assert d[(2, 0)] * 288 == 1 and d[(2, 2)] * 4 == -1 and d[(2, 3)] * 12 == -1


def test_write_and_reload_roundtrip(tmp_path):
    polys = [np.array([1 + 2j, 0.1 - 0.3j]), np.array([3.0 + 0j])]
    path = tmp_path / "k.csv"
    rs_kernel.write_kernel(path, polys)
    rows = np.loadtxt(path, delimiter=",", comments="#")
    assert rows.shape == (3, 4)
    assert rows[1, 2] == 0.1 and rows[1, 3] == -0.3

"""Correction polynomials of the Riemann-Siegel formula.

The remainder of the Riemann-Siegel main sum is written as

    S3 * sum_k a^{-k} P_k(p),   a = sqrt(t / 2pi),  p = 1 - 2 (a - floor a),

where each P_k is the polynomial

    P_k(p) = sum_l d[k, l] F^{(3k - 2l)}(p) / (pi^{2k - l} (2i)^l)

built from the kernel F(z) = (exp(i pi (z^2/2 + 3/8)) - i sqrt 2 cos(pi z / 2))
/ (2 cos pi z).  The Taylor coefficients of F come from Euler numbers and the
sum over l cancels heavily, so every P_k is assembled in 110-digit arithmetic
and only then rounded to complex128.

Generation takes a few seconds, so the rounded coefficients ship as a data
file; ``generate_kernel`` rebuilds them and the test suite checks the shipped
copy against a fresh build.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

KERNEL_FILE = "rs_kernel.csv"
MAX_ORDER = 23  # number of correction polynomials P_0 .. P_22
TAYLOR_TERMS = 80  # even Taylor coefficients of F kept (degree 158)


def remainder_d_coefficients(orders: int) -> dict[tuple[int, int], Fraction]:
    """Exact d[n, k] for sigma = 1/2, n < orders."""
    d: dict[tuple[int, int], Fraction] = {(0, 0): Fraction(1)}

    def get(n: int, k: int) -> Fraction:
        return d.get((n, k), Fraction(0))

    for n in range(1, orders):
        for k in range(3 * n // 2 + 1):
            m = 3 * n - 2 * k
            if m != 0:
                d[(n, k)] = -(m + 1) * get(n - 1, k - 2) + Fraction(1, 4 * m) * get(n - 1, k)
            else:
                acc = Fraction(0)
                for r in range(k):
                    ratio = Fraction(math.factorial(2 * k - 2 * r), math.factorial(k - r))
                    acc -= (-1) ** (k - r) * get(n, r) * ratio
                d[(n, k)] = acc
    return d


def generate_kernel(orders: int = MAX_ORDER, taylor_terms: int = TAYLOR_TERMS,
                    dps: int = 110) -> list[np.ndarray]:
    """Build P_0 .. P_{orders-1} as complex128 coefficient arrays (ascending)."""
    import mpmath as mp

    d = remainder_d_coefficients(orders)
    with mp.workdps(dps):
        pi = mp.pi
        euler = [mp.eulernum(2 * n) for n in range(taylor_terms + 1)]
        v = [(-1) ** n * euler[n] * pi ** (2 * n) / mp.factorial(2 * n)
             for n in range(taylor_terms + 1)]
        w = [pi ** n / (mp.factorial(n) * 2 ** n) for n in range(2 * taylor_terms + 1)]
        coeffs = [mp.mpc(0)] * (2 * taylor_terms)
        root2_half = mp.sqrt(2) / 2
        phase = mp.expjpi(mp.mpf(3) / 8) / 2
        for n in range(taylor_terms):
            p1 = (-1) ** (n + 1) * 1j * mp.fsum((-1) ** k * v[k] * w[2 * n - 2 * k]
                                                for k in range(n + 1))
            p2 = mp.fsum((1j) ** (n - k) * v[k] * w[n - k] for k in range(n + 1))
            coeffs[2 * n] = root2_half * p1 + phase * p2

        def derivative(poly, order):
            for _ in range(order):
                poly = [poly[j + 1] * (j + 1) for j in range(len(poly) - 1)]
            return poly

        polys = []
        for k in range(orders):
            acc = [mp.mpc(0)] * (2 * taylor_terms)
            for ell in range(3 * k // 2 + 1):
                dk = d.get((k, ell), 0)
                if dk == 0:
                    continue
                factor = (mp.mpf(dk.numerator) / dk.denominator
                          / pi ** (2 * k - ell) / (2j) ** ell)
                for j, x in enumerate(derivative(coeffs, 3 * k - 2 * ell)):
                    acc[j] += factor * x
            polys.append(_trim(np.array([complex(x) for x in acc])))
    return polys


def _trim(poly: np.ndarray, rel: float = 1e-19) -> np.ndarray:
    # drop the trailing coefficients whose total weight on |p| <= 1 is negligible
    mags = np.abs(poly)
    suffix = np.cumsum(mags[::-1])[::-1]
    keep = np.nonzero(suffix > rel * mags.max())[0]
    return poly[: keep.max() + 1].copy()


def write_kernel(path: Path, polys: list[np.ndarray]) -> None:
    lines = ["# Riemann-Siegel correction polynomials: order,power,re,im"]
    for k, poly in enumerate(polys):
        for j, c in enumerate(poly):
            lines.append(f"{k},{j},{float(c.real)!r},{float(c.imag)!r}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


@lru_cache(maxsize=1)
def load_kernel() -> tuple[np.ndarray, ...]:
    """Shipped correction polynomials, index k -> ascending coefficients."""
    text = resources.files("zetalaplace.data").joinpath(KERNEL_FILE).read_text("utf-8")
    rows = np.loadtxt(text.splitlines(), delimiter=",", comments="#")
    order = rows[:, 0].astype(int)
    polys = []
    for k in range(order.max() + 1):
        sel = rows[order == k]
        poly = np.zeros(int(sel[:, 1].max()) + 1, dtype=complex)
        poly[sel[:, 1].astype(int)] = sel[:, 2] + 1j * sel[:, 3]
        poly.setflags(write=False)
        polys.append(poly)
    return tuple(polys)


@lru_cache(maxsize=1)
def kernel_parity_form() -> tuple[tuple[int, np.ndarray, np.ndarray], ...]:
    """Each P_k as (parity e, real, imag) with P_k(p) = p^e * sum_j c_j (p^2)^j.

    P_k is even for even k and odd for odd k, so the evaluation runs in real
    arithmetic on half the degree.
    """
    out = []
    for k, poly in enumerate(load_kernel()):
        e = k % 2
        half = poly[e::2]
        out.append((e, np.ascontiguousarray(half.real), np.ascontiguousarray(half.imag)))
    return tuple(out)


def evaluate_kernel(k: int, p: np.ndarray) -> np.ndarray:
    """P_k(p) for real p."""
    e, re, im = kernel_parity_form()[k]
    q = p * p
    acc_re = np.full_like(p, re[-1])
    acc_im = np.full_like(p, im[-1])
    for j in range(len(re) - 2, -1, -1):
        acc_re *= q
        acc_re += re[j]
        acc_im *= q
        acc_im += im[j]
    out = acc_re + 1j * acc_im
    return out * p if e else out


@lru_cache(maxsize=1)
def kernel_envelopes() -> np.ndarray:
    """sup_{|p| <= 1} |P_k(p)| majorised by the coefficient 1-norm."""
    return np.array([np.sum(np.abs(p)) for p in load_kernel()])


if __name__ == "__main__":  # pragma: no cover - regeneration helper
    target = Path(__file__).with_name("data") / KERNEL_FILE
    write_kernel(target, generate_kernel())
    print(f"wrote {target}")

"""Complex gamma, log-gamma and the modified Bessel function K0.

All functions accept a Python scalar or a numpy array and return a value of
the same kind (``complex`` for scalars, ``complex128`` arrays otherwise).
Branches are principal throughout: ``a**b == exp(b * Log a)`` with
``Arg`` in ``(-pi, pi]``.

``log_gamma`` is the analytic continuation of ``log Gamma`` to the plane cut
along ``(-inf, 0]``; its imaginary part is continuous along vertical lines and
it is *not* the principal logarithm of ``gamma``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BranchCutError, DomainError, PoleError

EULER_GAMMA = 0.57721566490153286061
ZETA_PRIME_2 = -0.93754825431584375370
ZETA_3 = 1.20205690315959428540
LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Constants:
    euler_gamma: float = EULER_GAMMA
    zeta_prime_2: float = ZETA_PRIME_2
    pi: float = math.pi
    zeta_3: float = ZETA_3


CONSTANTS = Constants()


@lru_cache(maxsize=None)
def bernoulli_numbers(count: int) -> tuple[Fraction, ...]:
    """Exact B_0 .. B_{count-1} (convention B_1 = -1/2)."""
    b = [Fraction(0)] * count
    for m in range(count):
        acc = Fraction(0)
        for k in range(m):
            acc += math.comb(m + 1, k) * b[k]
        b[m] = Fraction(1) if m == 0 else -acc / (m + 1)
    return tuple(b)


def _stirling_coefficients(terms: int) -> np.ndarray:
    b = bernoulli_numbers(2 * terms + 2)
    return np.array([float(b[2 * k] / (2 * k * (2 * k - 1))) for k in range(1, terms + 1)])


_STIRLING = _stirling_coefficients(12)
_STIRLING_MIN_ABS = 15.0


def _as_complex_array(z) -> tuple[np.ndarray, bool]:
    scalar = np.ndim(z) == 0
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    if not np.all(np.isfinite(arr)):
        raise DomainError("non-finite argument")
    return arr, scalar


def _finish(out: np.ndarray, scalar: bool, what: str):
    if not np.all(np.isfinite(out)):
        raise DomainError(f"{what} overflows for the given argument")
    return complex(out[0]) if scalar else out


def _nonpositive_integer(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))


def _log_gamma_array(z: np.ndarray) -> np.ndarray:
    # shift into the Stirling region, undo with a sum of principal logs;
    # each log(z + k) is continuous off the cut, so the sum is too
    need = (np.abs(z) < _STIRLING_MIN_ABS) | (z.real < 0.5)
    shift = np.where(need, np.ceil(np.maximum(_STIRLING_MIN_ABS - z.real, 0.0)), 0.0)
    correction = np.zeros_like(z)
    idx = np.nonzero(need)[0]
    zs, ss = z[idx], shift[idx]
    acc = np.zeros_like(zs)
    for k in range(int(ss.max(initial=0.0))):
        active = k < ss
        acc[active] += np.log(zs[active] + k)
    correction[idx] = acc
    w = z + shift
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    series *= inv
    return (w - 0.5) * np.log(w) - w + 0.5 * LOG_2PI + series - correction


def log_gamma(z):
    """log Gamma(z) on the plane cut along (-inf, 0].

    Raises PoleError at non-positive integers and BranchCutError elsewhere on
    the negative real axis.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(_nonpositive_integer(arr)):
        raise PoleError("log_gamma has a pole at non-positive integers")
    if np.any((arr.imag == 0) & (arr.real < 0)):
        raise BranchCutError("log_gamma is cut along the negative real axis")
    return _finish(_log_gamma_array(arr), scalar, "log_gamma")


def gamma(z):
    """Gamma(z) for complex z, relative error about 1e-14 for |z| <= 100."""
    arr, scalar = _as_complex_array(z)
    if np.any(_nonpositive_integer(arr)):
        raise PoleError("gamma has poles at 0, -1, -2, ...")
    out = np.empty_like(arr)
    on_cut = (arr.imag == 0) & (arr.real < 0)
    if np.any(~on_cut):
        out[~on_cut] = np.exp(_log_gamma_array(arr[~on_cut]))
    if np.any(on_cut):
        x = arr[on_cut].real
        # reflection on the real axis; sin(pi x) via the reduced argument
        r = x - np.round(x)
        sign = np.where(np.round(x) % 2 == 0, 1.0, -1.0)
        refl = np.exp(_log_gamma_array((1.0 - x).astype(complex))).real
        out[on_cut] = math.pi / (sign * np.sin(math.pi * r) * refl)
    return _finish(out, scalar, "gamma")


def gamma_derivatives_at_one() -> tuple[float, ...]:
    """Gamma^{(i)}(1) for i = 0..4, i.e. the moments int_0^inf (log u)^i e^{-u} du."""
    g, z2, z3 = EULER_GAMMA, math.pi ** 2 / 6.0, ZETA_3
    return (
        1.0,
        -g,
        g * g + z2,
        -(g ** 3) - 3.0 * g * z2 - 2.0 * z3,
        g ** 4 + 6.0 * g * g * z2 + 8.0 * g * z3 + 27.0 * z2 * z2 / 5.0,
    )


def log_cosh(y):
    """log cosh(y) for real y without overflow."""
    a = np.abs(np.asarray(y, dtype=float))
    return a + np.log1p(np.exp(-2.0 * a)) - math.log(2.0)


# --- K0 ---------------------------------------------------------------------

_K0_SWITCH = 2.0
_K0_LAPLACE_MAX_ARG = 0.75 * math.pi


def _hermite_half_rule(n: int = 160) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.hermite.hermgauss(n)
    keep = x > 0
    return x[keep], 2.0 * w[keep]


_GH_X, _GH_W = _hermite_half_rule()


def k0_ascending(z):
    """K0 from the convergent ascending series.

    K0(z) = -(Log(z/2) + gamma) I0(z) + sum_k H_k (z^2/4)^k / (k!)^2
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise DomainError("K0 is singular at z = 0")
    q = arr * arr / 4.0
    term = np.ones_like(arr)
    i0 = term.copy()
    tail = np.zeros_like(arr)
    harmonic = 0.0
    for k in range(1, 400):
        term = term * q / (k * k)
        harmonic += 1.0 / k
        i0 += term
        tail += harmonic * term
        if np.all(harmonic * np.abs(term) <= 1e-18 * np.maximum(np.abs(i0), np.abs(tail))):
            break
    out = -(np.log(arr / 2.0) + EULER_GAMMA) * i0 + tail
    return _finish(out, scalar, "K0")


def k0_laplace(z):
    """K0 from its exponentially scaled Laplace-integral form.

    K0(z) = e^{-z} (2z)^{-1/2} int_R e^{-v^2} (1 + v^2/(2z))^{-1/2} dv,
    evaluated by Gauss-Hermite quadrature.  Expanding the bracket termwise
    reproduces the asymptotic series 1 - 1/(8z) + 9/(128 z^2) - ...; unlike
    that series this form converges, so it is accurate down to |z| ~ 2 for
    |arg z| <= 3*pi/4.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise DomainError("K0 is singular at z = 0")
    zz = arr[..., None]
    integral = np.sum(_GH_W / np.sqrt(1.0 + _GH_X * _GH_X / (2.0 * zz)), axis=-1)
    out = np.exp(-arr) / np.sqrt(2.0 * arr) * integral
    return _finish(out, scalar, "K0")


def k0_asymptotic(z, n_terms: int = 3):
    """Truncated asymptotic series sqrt(pi/2z) e^{-z} sum_k a_k z^{-k}.

    a_0 = 1, a_1 = -1/8, a_2 = 9/128, ...  Accurate only for large |z|; kept
    for magnitude envelopes.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise DomainError("K0 is singular at z = 0")
    total = np.zeros_like(arr)
    coeff = 1.0
    power = np.ones_like(arr)
    for k in range(n_terms):
        total += coeff * power
        coeff *= -((2 * k + 1) ** 2) / (8.0 * (k + 1))
        power = power / arr
    out = np.sqrt(math.pi / (2.0 * arr)) * np.exp(-arr) * total
    return _finish(out, scalar, "K0")


def _i0_trapezoid(w: np.ndarray) -> np.ndarray:
    # I0(w) = (1/2pi) int_0^{2pi} e^{w cos th} dth; the periodic trapezoid rule
    # converges like I_n(w) once n exceeds e|w|/2
    n = int(np.ceil(1.5 * np.max(np.abs(w), initial=0.0))) + 48
    theta = np.pi * (np.arange(n) + 0.5) / n
    return np.mean(np.exp(w[..., None] * np.cos(theta)), axis=-1)


def bessel_k0(z):
    """Modified Bessel function K0(z), principal branch.

    Small |z| uses the ascending series, the right sector |arg z| <= 3*pi/4 the
    Laplace-integral form; the left sector is reached by continuation,
    K0(z) = K0(-z) -/+ i*pi*I0(-z) for Im z >= 0 / Im z < 0.
    """
    arr, scalar = _as_complex_array(z)
    if np.any(arr == 0):
        raise DomainError("K0 is singular at z = 0")
    out = np.empty_like(arr)
    small = np.abs(arr) <= _K0_SWITCH
    left = ~small & (np.abs(np.angle(arr)) > _K0_LAPLACE_MAX_ARG)
    right = ~small & ~left
    if np.any(small):
        out[small] = k0_ascending(arr[small])
    if np.any(right):
        out[right] = k0_laplace(arr[right])
    if np.any(left):
        zl = arr[left]
        w = -zl
        sign = np.where(zl.imag >= 0, -1.0, 1.0)
        out[left] = k0_laplace(w) + sign * 1j * math.pi * _i0_trapezoid(w)
    return _finish(out, scalar, "K0")


def cpow(base: complex, exponent: complex) -> complex:
    """Principal power exp(exponent * Log base)."""
    if base == 0:
        raise DomainError("0 has no logarithm")
    return cmath.exp(exponent * cmath.log(base))

"""zeta(1/2 + it) on the critical line.

Two evaluators:

* ``zeta_half_em`` -- Euler-Maclaurin summation with an explicit remainder
  bound, the slow reference for 0 <= t <= 5000.
* ``zeta_half_rs`` -- the Riemann-Siegel main sum plus up to 22 correction
  terms, vectorised, for 10 <= t <= 1e5.

Phases t*log(n) are reduced modulo 2*pi in double-double arithmetic, so the
rounding floor stays near 1e-14 even at the top of the range.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, localcontext
from functools import lru_cache

import numpy as np

from .errors import RangeError, ToleranceError
from .rs_kernel import evaluate_kernel, kernel_envelopes
from .special_functions import bernoulli_numbers, log_gamma

EM_T_MAX = 5000.0
RS_T_MIN = 10.0
RS_T_MAX = 1.0e5
EM_MIN_TOL = 1e-13

_PI_50 = "3.14159265358979323846264338327950288419716939937510582097494"
_SPLITTER = 134217729.0  # 2**27 + 1


@dataclass(frozen=True)
class CriticalLineSample:
    t: float
    zeta: complex
    z4: float


# --- double-double phase reduction -------------------------------------------

@lru_cache(maxsize=8)
def _log_over_2pi_table(size: int) -> tuple[np.ndarray, np.ndarray]:
    """(hi, lo) with hi + lo = log(n) / (2 pi) to ~32 digits, n = 0..size-1."""
    hi = np.zeros(size)
    lo = np.zeros(size)
    with localcontext() as ctx:
        ctx.prec = 45
        two_pi = 2 * Decimal(_PI_50)
        for n in range(2, size):
            exact = Decimal(n).ln() / two_pi
            hi[n] = float(exact)
            lo[n] = float(exact - Decimal(hi[n]))
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def _log_table(nmax: int) -> tuple[np.ndarray, np.ndarray]:
    size = 64
    while size <= nmax:
        size *= 2
    return _log_over_2pi_table(size)


def _two_product(a, b):
    p = a * b
    ca = _SPLITTER * a
    ah = ca - (ca - a)
    al = a - ah
    cb = _SPLITTER * b
    bh = cb - (cb - b)
    bl = b - bh
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def _turns(t, hi, lo):
    """Fractional part of t * (hi + lo), in (-1/2, 1/2]."""
    p, e = _two_product(t, hi)
    return (p - np.round(p)) + (e + t * lo)


def _n_pow_minus_s(t, n: int, hi, lo):
    """n^{-1/2 - it} with a double-double phase."""
    return n ** -0.5 * np.exp(-2j * math.pi * _turns(t, hi[n], lo[n]))


# --- theta and Hardy Z --------------------------------------------------------

def riemann_siegel_theta(t):
    """theta(t) = Im log Gamma(1/4 + it/2) - (t/2) log pi."""
    t_arr = np.asarray(t, dtype=float)
    value = np.imag(log_gamma(0.25 + 0.5j * t_arr)) - 0.5 * t_arr * math.log(math.pi)
    return float(value) if np.ndim(t) == 0 else value


# --- Euler-Maclaurin oracle ---------------------------------------------------

@lru_cache(maxsize=1)
def _em_coefficients(count: int = 120) -> np.ndarray:
    b = bernoulli_numbers(2 * count + 2)
    return np.array([float(b[2 * j] / math.factorial(2 * j)) for j in range(count + 1)])


def _em_attempt(t: float, n_cut: int, tol: float) -> tuple[complex, float] | None:
    s = complex(0.5, t)
    hi, lo = _log_table(n_cut)
    n = np.arange(1, n_cut)
    head = np.sum(n ** -0.5 * np.exp(-2j * math.pi * _turns(t, hi[1:n_cut], lo[1:n_cut])))
    n_s = complex(_n_pow_minus_s(t, n_cut, hi, lo))  # N^{-s}
    total = head + n_cut * n_s / (s - 1.0) + 0.5 * n_s
    coeff = _em_coefficients()
    poch = s  # s (s+1) ... (s+2j-2)
    power = n_s / n_cut  # N^{-s-2j+1}
    term = coeff[1] * poch * power
    prev = abs(term)
    for j in range(1, len(coeff) - 1):
        total += term
        poch *= (s + 2 * j - 1) * (s + 2 * j)
        power /= n_cut * n_cut
        term = coeff[j + 1] * poch * power
        bound = abs(term) * abs(s + 2 * j + 1) / (0.5 + 2 * j + 1)
        if bound <= tol:
            return complex(total), bound
        if abs(term) > prev and j > 2:
            return None
        prev = abs(term)
    return None


def zeta_half_em_bounded(t: float, target_tol: float = 1e-12) -> tuple[complex, float]:
    """Euler-Maclaurin zeta(1/2+it) together with its truncation bound."""
    t = float(t)
    if not (0.0 <= t <= EM_T_MAX):
        raise RangeError(f"t = {t} outside [0, {EM_T_MAX:g}]")
    if not target_tol >= EM_MIN_TOL:
        raise ToleranceError(f"target_tol {target_tol} below the rounding floor {EM_MIN_TOL}")
    n_cut = int(max(16.0, 0.25 * t + 16.0))
    for _ in range(4):
        out = _em_attempt(t, n_cut, 0.5 * target_tol)
        if out is not None:
            return out
        n_cut *= 2
    raise ToleranceError(f"Euler-Maclaurin tail not certified below {target_tol} at t = {t}")


def zeta_half_em(t: float, target_tol: float = 1e-12) -> complex:
    """zeta(1/2 + it) by Euler-Maclaurin summation, |error| <= target_tol.

    The remainder after M correction terms is bounded by
    |s + 2M + 1| / (sigma + 2M + 1) times the first omitted term.
    """
    return zeta_half_em_bounded(t, target_tol)[0]


# --- Riemann-Siegel -----------------------------------------------------------

def _rs_orders(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Number of correction terms per point and the envelope of the first dropped one.

    The correction series is asymptotic; terms are kept while the envelope
    a^{-k} sup|P_k| keeps shrinking and is above 1e-17.
    """
    env = kernel_envelopes()
    k = np.arange(len(env))
    bounds = env[None, :] * a[:, None] ** (-k[None, :].astype(float))
    best = np.argmin(bounds, axis=1)
    below = bounds < 1e-17
    first_small = np.where(below.any(axis=1), np.argmax(below, axis=1), len(env) - 1)
    n_terms = np.maximum(np.minimum(best, first_small), 3)
    tail = np.take_along_axis(bounds, np.minimum(n_terms, len(env) - 1)[:, None], axis=1)[:, 0]
    return n_terms, tail


def _rs_rotated(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Return (e^{i theta} * R, tail bound) with Z = 2 Re(e^{i theta} R)."""
    a = np.sqrt(t / (2.0 * math.pi))
    n_main = np.floor(a).astype(int)
    p = 1.0 - 2.0 * (a - n_main)
    hi, lo = _log_table(int(n_main.max(initial=1)) + 1)

    # main sum: points sorted by N so that each n touches a contiguous suffix
    order = np.argsort(n_main, kind="stable")
    t_sorted = t[order]
    n_sorted = n_main[order]
    main_sorted = np.zeros(t.shape, dtype=complex)
    for n in range(1, int(n_main.max(initial=0)) + 1):
        start = int(np.searchsorted(n_sorted, n, side="left"))
        main_sorted[start:] += _n_pow_minus_s(t_sorted[start:], n, hi, lo)
    main = np.empty_like(main_sorted)
    main[order] = main_sorted

    n_terms, tail = _rs_orders(a)
    correction = np.zeros(t.shape, dtype=complex)
    inv_a = 1.0 / a
    scale = np.ones_like(a)
    for k in range(int(n_terms.max(initial=0))):
        active = n_terms > k
        correction[active] += evaluate_kernel(k, p[active]) * scale[active]
        scale = scale * inv_a
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)  # (-1)^{N-1}
    phase = 0.5 * t * np.log(t / (2.0 * math.pi)) - 0.5 * t - math.pi / 8.0
    s3 = sign * a ** -0.5 * np.exp(-1j * phase)
    theta = riemann_siegel_theta(t)
    rotated = np.exp(1j * theta) * (main + s3 * correction)
    return rotated, 2.0 * a ** -0.5 * tail


def _rs_checked(t) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(~np.isfinite(arr)) or np.any(arr < RS_T_MIN) or np.any(arr > RS_T_MAX):
        raise RangeError(f"Riemann-Siegel path needs {RS_T_MIN:g} <= t <= {RS_T_MAX:g}")
    return arr


def hardy_z_rs(t):
    """Hardy's Z(t) by Riemann-Siegel (real, |Z(t)| = |zeta(1/2+it)|)."""
    arr = _rs_checked(t)
    z = 2.0 * _rs_rotated(arr)[0].real
    return float(z[0]) if np.ndim(t) == 0 else z


def zeta_half_rs(t):
    """zeta(1/2 + it) by Riemann-Siegel, 10 <= t <= 1e5; scalar or array."""
    arr = _rs_checked(t)
    rotated, _ = _rs_rotated(arr)
    zeta = np.exp(-1j * riemann_siegel_theta(arr)) * (2.0 * rotated.real)
    return complex(zeta[0]) if np.ndim(t) == 0 else zeta


RS_ROUNDING = 16.0 * 2.0 ** -52  # measured floor is below 9 eps (1 + t log t)


def rs_error_bound(t):
    """Envelope of the first omitted correction term plus the rounding floor.

    The floor, RS_ROUNDING * (1 + t log(2 + t)), covers the loss in theta(t)
    and in the phases, both of size t log t.
    """
    arr = _rs_checked(t)
    bound = 2.0 * np.sqrt(2.0 * math.pi / arr) ** 0.5 * _rs_orders(np.sqrt(arr / (2 * math.pi)))[1]
    bound = bound + RS_ROUNDING * (1.0 + arr * np.log(2.0 + arr))
    return float(bound[0]) if np.ndim(t) == 0 else bound


def hardy_z(t, target_tol: float = 1e-12):
    """Z(t) = e^{i theta(t)} zeta(1/2+it); Euler-Maclaurin below t = 10."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.empty(arr.shape)
    low = arr < RS_T_MIN
    for i in np.nonzero(low)[0]:
        z = zeta_half_em(arr[i], target_tol) * np.exp(1j * riemann_siegel_theta(arr[i]))
        out[i] = z.real
    if np.any(~low):
        out[~low] = hardy_z_rs(arr[~low])
    return float(out[0]) if np.ndim(t) == 0 else out


def critical_line_power(t, k: int):
    """|zeta(1/2 + it)|^{2k}, vectorised over t >= 0."""
    arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(arr < 0) or np.any(~np.isfinite(arr)):
        raise RangeError("t must be finite and >= 0")
    z = hardy_z(arr)
    out = z ** (2 * int(k))
    return float(out[0]) if np.ndim(t) == 0 else out


def abs_zeta_pow4(t):
    """|zeta(1/2 + it)|^4 (Riemann-Siegel for t >= 10, Euler-Maclaurin below)."""
    return critical_line_power(t, 2)


def critical_line_sample(t: float) -> CriticalLineSample:
    t = float(t)
    zeta = zeta_half_em(t) if t < RS_T_MIN else zeta_half_rs(t)
    return CriticalLineSample(t=t, zeta=zeta, z4=(zeta.real ** 2 + zeta.imag ** 2) ** 2)

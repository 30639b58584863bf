"""Closed-form and asymptotic expressions for L_1(s) and L_2(s).

* ``kober_main`` / ``kober_fit``: small-sigma expansion of L_1(2 sigma).
* ``atkinson_l1``: the divisor-sum representation of L_1(s) in 0 < Re s < pi.
* ``atkinson_l2_k0``: the d_4 / K_0 series for L_2(s).
* ``main_term`` / ``fit_main_coeffs``: the degree-4 log-polynomial main term
  (1/s)(A L^4 + B L^3 + C L^2 + D L + E), L = Log(1/s).
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .arithmetic import DivisorTable, divisor_sieve
from .errors import ConvergenceError, DomainError, IllConditionedError
from .special_functions import EULER_GAMMA, ZETA_PRIME_2, bessel_k0
from .transforms import (DEFAULT_CONFIG, LaplaceResult, Method, P4Coeffs, QuadratureConfig,
                         laplace_quadrature, main_coefficients_from_p4,
                         p4_from_main_coefficients)

MAX_SERIES_TERMS = 10 ** 7


class Provenance(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    FITTED = "fitted"


MAIN_A = 1.0 / (2.0 * math.pi ** 2)
# closed form for the L^3 coefficient
MAIN_B_CLOSED_FORM = (2.0 * math.log(2.0 * math.pi) - 6.0 * EULER_GAMMA
                      + 24.0 * ZETA_PRIME_2 / math.pi ** 2) / math.pi ** 2


def fourth_moment_a3() -> float:
    """x^3 coefficient of the fourth-moment polynomial P_4."""
    return 2.0 / math.pi ** 2 * (4.0 * EULER_GAMMA - 1.0 - math.log(2.0 * math.pi)
                                 - 12.0 * ZETA_PRIME_2 / math.pi ** 2)


def main_b_from_moments() -> float:
    """L^3 coefficient implied by P_4: B = a_3 + 4 a_4 (1 - gamma).

    Numerically this is -MAIN_B_CLOSED_FORM; the data (free fits of L_2 and of
    I_2) side with this sign.
    """
    return float(main_coefficients_from_p4(P4Coeffs(a3=fourth_moment_a3(), a4=MAIN_A))[3])


@dataclass(frozen=True)
class MainTermCoeffs:
    A: float
    B: float
    C: float
    D: float
    E: float
    provenance: Provenance

    def as_array(self) -> np.ndarray:
        """[E, D, C, B, A] -- ascending powers of Log(1/s)."""
        return np.array([self.E, self.D, self.C, self.B, self.A])


def closed_form_main_coeffs(b: float = MAIN_B_CLOSED_FORM) -> MainTermCoeffs:
    """Exact A and B (lower coefficients unknown, set to zero)."""
    return MainTermCoeffs(MAIN_A, b, 0.0, 0.0, 0.0, Provenance.CLOSED_FORM)


def default_main_coeffs() -> MainTermCoeffs:
    """A exact, B from ``main_b_from_moments``, C, D, E fitted.

    C, D, E come from ``fit_main_coeffs`` on 24 geometric sigma in [1e-3, 0.3]
    (see ``FIT_GRID``); the test suite re-runs the fit.
    """
    return MainTermCoeffs(MAIN_A, main_b_from_moments(), *FITTED_CDE, Provenance.FITTED)


def p4_default() -> P4Coeffs:
    """Fourth-moment polynomial matching ``default_main_coeffs`` term by term."""
    return p4_from_main_coefficients(default_main_coeffs().as_array())


FIT_GRID = (1e-3, 0.3, 24)
FITTED_CDE = (-0.30752374712410663, 0.8244656518408537, -0.0733457273995005)


# --- Kober ---------------------------------------------------------------------

@dataclass(frozen=True)
class KoberCoeffs:
    c: np.ndarray
    N: int
    residual: float  # rms of the scaled residuals on the fitted points
    sigmas: np.ndarray

    def __call__(self, sigma):
        return np.polynomial.polynomial.polyval(np.asarray(sigma, dtype=float), self.c)


def kober_main(sigma):
    """(gamma - log(4 pi sigma)) / (2 sin sigma), 0 < sigma < pi/2."""
    sig = np.asarray(sigma, dtype=float)
    if np.any(~(sig > 0)) or np.any(sig >= math.pi / 2):
        raise DomainError("kober_main needs 0 < sigma < pi/2")
    out = (EULER_GAMMA - np.log(4.0 * math.pi * sig)) / (2.0 * np.sin(sig))
    return float(out) if np.ndim(sigma) == 0 else out


def kober_difference(sigmas, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """L_1(2 sigma) - kober_main(sigma) from the quadrature oracle; (values, errors)."""
    sig = np.asarray(sigmas, dtype=float)
    res = [laplace_quadrature(1, 2.0 * s, cfg) for s in sig]
    values = np.array([r.value.real for r in res]) - kober_main(sig)
    return values, np.array([r.err_estimate for r in res])


def _lstsq(design: np.ndarray, rhs: np.ndarray, cond_limit: float = 1e13) -> np.ndarray:
    norms = np.linalg.norm(design, axis=0)
    if np.any(norms == 0):
        raise IllConditionedError("design matrix has an empty column")
    scaled = design / norms
    sv = np.linalg.svd(scaled, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > cond_limit:
        raise IllConditionedError(f"condition number {sv[0] / max(sv[-1], 1e-300):.3g} too large")
    coef, *_ = np.linalg.lstsq(scaled, rhs, rcond=None)
    return coef / norms


def kober_fit(sigmas, N: int, values=None, cfg: QuadratureConfig = DEFAULT_CONFIG) -> KoberCoeffs:
    """Fit L_1(2 sigma) - kober_main(sigma) by sum_{n<=N} c_n sigma^n.

    Residuals are scaled by sigma^{-(N+1)}, the size of the expected remainder,
    so the fit targets the Taylor coefficients instead of a uniform best fit
    and the remainder keeps its sigma^{N+1} shape.
    """
    sig = np.asarray(sigmas, dtype=float)
    if np.unique(sig).size < N + 3:
        raise IllConditionedError(f"need at least {N + 3} distinct sigma values")
    if np.any(sig <= 0) or np.any(sig >= 0.5):
        raise DomainError("sigmas must lie in (0, 0.5)")
    if values is None:
        values, _ = kober_difference(sig, cfg)
    values = np.asarray(values, dtype=float)
    weight = sig ** -(N + 1.0)
    design = np.vander(sig, N + 1, increasing=True) * weight[:, None]
    c = _lstsq(design, values * weight)
    resid = (values - np.polynomial.polynomial.polyval(sig, c)) * weight
    return KoberCoeffs(c=c, N=N, residual=float(np.sqrt(np.mean(resid ** 2))), sigmas=sig)


def kober_scaled_residuals(coeffs: KoberCoeffs, sigmas, values) -> np.ndarray:
    sig = np.asarray(sigmas, dtype=float)
    return (np.asarray(values) - coeffs(sig)) * sig ** -(coeffs.N + 1.0)


# --- Atkinson series ------------------------------------------------------------

def _check_strip(s: complex) -> None:
    if not 0 < s.real < math.pi:
        raise DomainError("the divisor series needs 0 < Re s < pi")


def atkinson_l1_rate(s) -> float:
    """rho with |exp(-2 pi i n e^{-is})| = exp(-rho n)."""
    s = complex(s)
    return 2.0 * math.pi * math.exp(s.imag) * math.sin(s.real)


def _l1_tail(s: complex, n_terms: int) -> float:
    rho = atkinson_l1_rate(s)
    n1 = n_terms + 1
    ratio = math.exp(-rho) * math.sqrt((n1 + 1) / n1)
    if ratio >= 1:
        return math.inf
    # d(n) <= 2 sqrt(n)
    first = 2.0 * math.sqrt(n1) * math.exp(-rho * n1)
    return 2.0 * math.pi * math.exp(0.5 * s.imag) * first / (1.0 - ratio)


def atkinson_l1(s, n_terms: int | None = None, dtable: DivisorTable | None = None,
                tol: float = 1e-12) -> LaplaceResult:
    """-i e^{is/2}(log 2pi - gamma + (pi/2 - s) i) + 2 pi e^{-is/2} sum d(n) exp(-2 pi i n e^{-is}).

    Differs from L_1(s) by a function holomorphic in |Re s| < pi.  With
    ``n_terms=None`` the truncation is chosen to meet ``tol``.
    """
    s = complex(s)
    _check_strip(s)
    if n_terms is None:
        rho = atkinson_l1_rate(s)
        n_terms = max(8, int(math.ceil((math.log(1.0 / tol) + 10.0) / rho)))
        while _l1_tail(s, n_terms) > tol:
            n_terms = int(n_terms * 1.5) + 1
            if n_terms > MAX_SERIES_TERMS:
                raise ConvergenceError(f"Re s = {s.real} too close to 0 for tol {tol:g}")
    tail = _l1_tail(s, n_terms)
    if tail > tol:
        raise ConvergenceError(f"tail bound {tail:.3g} exceeds tol {tol:g} at {n_terms} terms")
    if dtable is None:
        dtable = divisor_sieve(2, n_terms)
    if dtable.order != 2:
        raise DomainError("atkinson_l1 needs a d(n) table")
    d = dtable.prefix(n_terms)
    n = np.arange(1, n_terms + 1)
    series = np.sum(d * np.exp(-2j * math.pi * n * cmath.exp(-1j * s)))
    head = -1j * cmath.exp(0.5j * s) * (math.log(2 * math.pi) - EULER_GAMMA + (math.pi / 2 - s) * 1j)
    value = head + 2.0 * math.pi * cmath.exp(-0.5j * s) * series
    return LaplaceResult(s=s, k=1, value=complex(value), method=Method.ATKINSON_SERIES,
                         err_estimate=tail)


def k0_series_rate(s) -> float:
    """beta with Re(4 pi i sqrt(n) e^{-is/2}) = beta sqrt(n)."""
    s = complex(s)
    return 4.0 * math.pi * math.exp(0.5 * s.imag) * math.sin(0.5 * s.real)


def _l2_tail(s: complex, n_terms: int) -> float:
    beta = k0_series_rate(s)
    if beta <= 0:
        return math.inf
    if n_terms < (2.5 / beta) ** 2:
        return math.inf
    # d_4(n) <= d(n)^3 <= 8 n^{3/2};  |K_0(z)| <= sqrt(pi / (2|z|)) e^{-Re z} for Re z >= 0
    scale = 8.0 * math.sqrt(math.pi / (2.0 * 4.0 * math.pi * math.exp(0.5 * s.imag)))
    # sum_{n>N} n^{5/4} e^{-beta sqrt n} <= int_N^inf = 2 beta^{-9/2} Gamma(9/2, beta sqrt N)
    x = beta * math.sqrt(n_terms)
    integral = 2.0 * beta ** -4.5 * math.exp(sp.gammaln(4.5)) * sp.gammaincc(4.5, x)
    return 4.0 * math.pi * math.exp(0.5 * s.imag) * scale * integral


def atkinson_l2_k0(s, n_terms: int | None = None, d4table: DivisorTable | None = None,
                   tol: float = 1e-12) -> LaplaceResult:
    """4 pi e^{-is/2} sum_n d_4(n) K_0(4 pi i sqrt(n) e^{-is/2}).

    Differs from L_2(s) by a function analytic in |s| < pi.  The terms decay
    like n^{-1/4} exp(-4 pi sqrt(n) sin(sigma/2)) on the real axis.
    """
    s = complex(s)
    if not s.real > 0 or abs(s) >= math.pi:
        raise DomainError("the K_0 series needs Re s > 0 and |s| < pi")
    if n_terms is None:
        beta = k0_series_rate(s)
        n_terms = max(16, int(math.ceil(((math.log(1.0 / tol) + 30.0) / beta) ** 2)))
        while _l2_tail(s, n_terms) > tol:
            n_terms = int(n_terms * 1.5) + 1
            if n_terms > MAX_SERIES_TERMS:
                raise ConvergenceError(f"Re s = {s.real} too small for tol {tol:g}")
    tail = _l2_tail(s, n_terms)
    if tail > tol:
        raise ConvergenceError(f"tail bound {tail:.3g} exceeds tol {tol:g} at {n_terms} terms")
    if d4table is None:
        d4table = divisor_sieve(4, n_terms)
    if d4table.order != 4:
        raise DomainError("atkinson_l2_k0 needs a d_4(n) table")
    d4 = d4table.prefix(n_terms)
    z = 4j * math.pi * np.sqrt(np.arange(1, n_terms + 1)) * cmath.exp(-0.5j * s)
    value = 4.0 * math.pi * cmath.exp(-0.5j * s) * np.sum(d4 * bessel_k0(z))
    return LaplaceResult(s=s, k=2, value=complex(value), method=Method.K0_SERIES,
                         err_estimate=tail)


def k0_term_envelope(n, sigma: float):
    """n^{-1/4} exp(-4 pi sqrt(n) sin(sigma/2)) (up to the constant sqrt(pi/(8 pi)))."""
    n = np.asarray(n, dtype=float)
    return n ** -0.25 * np.exp(-4.0 * math.pi * np.sqrt(n) * math.sin(0.5 * sigma))


# --- main term -------------------------------------------------------------------

def check_sector(s: complex, phi: float | None = None) -> None:
    """0 < |s| <= 1 and |arg s| <= phi < pi/2 (phi defaults to just below pi/2)."""
    if not (0 < abs(s) <= 1.0 + 1e-12):
        raise DomainError("need 0 < |s| <= 1")
    limit = math.pi / 2 if phi is None else phi
    if phi is not None and not 0 <= phi < math.pi / 2:
        raise DomainError("phi must lie in [0, pi/2)")
    arg = abs(cmath.phase(s))
    if arg >= math.pi / 2 or arg > limit:
        raise DomainError(f"|arg s| = {arg:.6g} outside the sector")


def main_term(s, coeffs: MainTermCoeffs) -> complex:
    """(1/s)(A L^4 + B L^3 + C L^2 + D L + E), L = Log(1/s) (principal)."""
    s = complex(s)
    check_sector(s)
    ell = -cmath.log(s)
    acc = 0j
    for c in (coeffs.A, coeffs.B, coeffs.C, coeffs.D, coeffs.E):
        acc = acc * ell + c
    inv = s.conjugate() / (s.real * s.real + s.imag * s.imag)
    return acc * inv


def _main_design(sig: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if sig.size < 8:
        raise IllConditionedError("need at least 8 sigma values")
    if np.any(sig <= 0) or np.any(sig > 1):
        raise DomainError("sigmas must lie in (0, 1]")
    return sig, np.log(1.0 / sig)


def fit_main_coeffs(sigmas, values=None, cfg: QuadratureConfig | None = None,
                    A: float = MAIN_A, B: float = MAIN_B_CLOSED_FORM) -> MainTermCoeffs:
    """C, D, E by least squares with A and B frozen.

    Fits sigma L_2(sigma) - A L^4 - B L^3 against (L^2, L, 1), L = log(1/sigma).
    ``values`` are L_2(sigma); computed by quadrature when omitted.
    """
    sig, ell = _main_design(np.asarray(sigmas, dtype=float))
    if values is None:
        values = l2_values(sig, cfg)
    y = sig * np.asarray(values, dtype=float) - A * ell ** 4 - B * ell ** 3
    c, d, e = _lstsq(np.vander(ell, 3), y)
    return MainTermCoeffs(A, B, float(c), float(d), float(e), Provenance.FITTED)


def fit_main_coeffs_free(sigmas, values=None, cfg: QuadratureConfig | None = None) -> MainTermCoeffs:
    """All five coefficients by unconstrained least squares."""
    sig, ell = _main_design(np.asarray(sigmas, dtype=float))
    if values is None:
        values = l2_values(sig, cfg)
    y = sig * np.asarray(values, dtype=float)
    a, b, c, d, e = _lstsq(np.vander(ell, 5), y)
    return MainTermCoeffs(float(a), float(b), float(c), float(d), float(e), Provenance.FITTED)


def l2_config(sigma: float, rel: float = 1e-11) -> QuadratureConfig:
    """Quadrature settings scaled to the size (log^4(1/sigma)/sigma) of L_2(sigma)."""
    scale = (1.0 + math.log(1.0 / sigma) ** 4 / (2.0 * math.pi ** 2)) / sigma
    return QuadratureConfig(tol=max(1e-10, rel * scale))


def l2_values(sigmas, cfg: QuadratureConfig | None = None) -> np.ndarray:
    sig = np.asarray(sigmas, dtype=float)
    return np.array([laplace_quadrature(2, s, cfg or l2_config(s)).value.real for s in sig])

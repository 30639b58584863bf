"""Integrals of |zeta(1/2+it)|^{2k} against exponential and power kernels.

All quadratures share one cached panel grid of Hardy Z values on [0, X].
Panels have width min(2, 2*pi/log(2+t)) with Gauss-Legendre nodes, are split
where the Legendre tail of Z^4 is not negligible, and the grid grows on
demand.  Error estimates combine

* panel error: panel width times the two highest Legendre coefficients of the
  actual integrand (kernel included) on that panel;
* evaluation error: a rounding model for Z propagated through |Z|^{2k};
* tail: the majorant |zeta(1/2+it)|^4 <= c (1+t)^{2/3} (c = MAJORANT_C by
  default; an empirical constant -- the sup of |zeta|^4 (1+t)^{-2/3} over
  [0, 1e5] is about 349, reached near t = 77403.7).

The Romberg routines are a second, structurally different quadrature used to
cross-check the panel results.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre
from scipy import special as sp

from .errors import ConvergenceError, DomainError, RangeError, ValidationError
from .special_functions import gamma_derivatives_at_one
from .zeta_line import RS_T_MAX, hardy_z, rs_error_bound

MOMENT_T_MAX = 5.0e4
MELLIN_CUTOFF = 5.0e4
MELLIN_TAIL_TARGET = 1e-8
_BREAKPOINTS = (1.0, 10.0)
_GRID_RTOL = 1e-8
_MAX_SPLIT_ROUNDS = 6
_NOISE_FACTOR = 4e-16
MAJORANT_C = 1000.0


class Method(str, enum.Enum):
    QUADRATURE = "quadrature"
    KOBER = "kober"
    ATKINSON_SERIES = "atkinson_series"
    K0_SERIES = "k0_series"
    THEOREM_SPECTRAL = "theorem_spectral"
    ROMBERG = "romberg"


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-8
    cutoff_factor: float = 1.5
    max_panels: int = 400_000
    panel_points: int = 24
    majorant_c: float = MAJORANT_C

    def __post_init__(self):
        if not (self.tol > 0 and math.isfinite(self.tol)):
            raise ValidationError("tol must be positive")
        if self.panel_points < 8:
            raise ValidationError("panel_points must be >= 8")
        if self.max_panels < 1:
            raise ValidationError("max_panels must be >= 1")
        if not self.cutoff_factor > 0 or not self.majorant_c > 0:
            raise ValidationError("cutoff_factor and majorant_c must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class LaplaceResult:
    s: complex
    k: int
    value: complex
    method: Method
    err_estimate: float

    def __post_init__(self):
        if not self.err_estimate >= 0:
            raise ValidationError("err_estimate must be >= 0")


@dataclass(frozen=True)
class MomentRecord:
    T: float
    value: float
    k: int
    err_estimate: float = 0.0


@dataclass(frozen=True)
class MellinResult:
    w: complex
    value: complex
    cutoff: float
    tail_bound: float
    err_estimate: float


@dataclass(frozen=True)
class P4Coeffs:
    """P_4(x) = a0 + a1 x + a2 x^2 + a3 x^3 + a4 x^4."""

    a0: float = 0.0
    a1: float = 0.0
    a2: float = 0.0
    a3: float = 0.0
    a4: float = 1.0 / (2.0 * math.pi ** 2)

    def as_array(self) -> np.ndarray:
        return np.array([self.a0, self.a1, self.a2, self.a3, self.a4])

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.as_array())


# --- panel grid ---------------------------------------------------------------

@dataclass(frozen=True)
class _Rule:
    x: np.ndarray
    w: np.ndarray
    to_legendre: np.ndarray  # values -> Legendre coefficients


def _rule(n: int) -> _Rule:
    x, w = legendre.leggauss(n)
    vander = legendre.legvander(x, n - 1)
    scale = (2.0 * np.arange(n) + 1.0) / 2.0
    return _Rule(x=x, w=w, to_legendre=(vander * w[:, None]).T * scale[:, None])


@dataclass(frozen=True)
class PanelGrid:
    """Immutable snapshot: panels [a_i, b_i] with Hardy Z at their Gauss nodes."""

    a: np.ndarray
    b: np.ndarray
    z: np.ndarray
    rule: _Rule = field(repr=False)

    @property
    def end(self) -> float:
        return float(self.b[-1]) if self.b.size else 0.0

    @property
    def size(self) -> int:
        return int(self.a.size)

    def nodes(self, sel=slice(None)) -> np.ndarray:
        a, b = self.a[sel], self.b[sel]
        return a[:, None] + (b - a)[:, None] * (self.rule.x + 1.0) / 2.0

    def weights(self, sel=slice(None)) -> np.ndarray:
        return (self.b[sel] - self.a[sel])[:, None] / 2.0 * self.rule.w


def _base_edges(start: float, stop: float) -> np.ndarray:
    edges = [start]
    t = start
    while t < stop:
        nxt = t + min(2.0, 2.0 * math.pi / math.log(2.0 + t))
        for bp in _BREAKPOINTS:
            if t < bp < nxt:
                nxt = bp
        edges.append(nxt)
        t = nxt
    return np.array(edges)


def _node_values(a: np.ndarray, b: np.ndarray, rule: _Rule) -> np.ndarray:
    nodes = a[:, None] + (b - a)[:, None] * (rule.x + 1.0) / 2.0
    return hardy_z(nodes.ravel()).reshape(nodes.shape)


def _legendre_tail(values: np.ndarray, rule: _Rule) -> np.ndarray:
    coeffs = values @ rule.to_legendre.T
    return np.abs(coeffs[:, -1]) + np.abs(coeffs[:, -2])


def _refine(a: np.ndarray, b: np.ndarray, z: np.ndarray, rule: _Rule, max_panels: int):
    for _ in range(_MAX_SPLIT_ROUNDS):
        f = z ** 4
        tail = _legendre_tail(f, rule)
        bad = tail > _GRID_RTOL * np.maximum(1.0, np.abs(f).max(axis=1))
        if not np.any(bad):
            break
        mid = 0.5 * (a[bad] + b[bad])
        new_a = np.concatenate([a[~bad], a[bad], mid])
        new_b = np.concatenate([b[~bad], mid, b[bad]])
        if new_a.size > max_panels:
            raise ConvergenceError(f"panel grid would exceed max_panels = {max_panels}")
        new_z = np.concatenate([z[~bad], _node_values(a[bad], mid, rule),
                                _node_values(mid, b[bad], rule)])
        order = np.argsort(new_a, kind="stable")
        a, b, z = new_a[order], new_b[order], new_z[order]
    return a, b, z


def _build_segment(start: float, stop: float, rule: _Rule, max_panels: int):
    edges = _base_edges(start, stop)
    a, b = edges[:-1], edges[1:]
    return _refine(a, b, _node_values(a, b, rule), rule, max_panels)


_GRID_LOCK = threading.Lock()
_GRIDS: dict[int, PanelGrid] = {}


def integrand_grid(cover: float, panel_points: int = 24, max_panels: int = 400_000) -> PanelGrid:
    """Cached grid of Hardy Z values covering at least [0, cover]."""
    if cover > RS_T_MAX:
        raise RangeError(f"integration range {cover:g} exceeds {RS_T_MAX:g}")
    with _GRID_LOCK:
        grid = _GRIDS.get(panel_points)
        if grid is not None and grid.end >= cover:
            return grid
        rule = grid.rule if grid is not None else _rule(panel_points)
        start = grid.end if grid is not None else 0.0
        # grow geometrically so that repeated small extensions stay cheap
        stop = min(RS_T_MAX, max(cover, 1.25 * start, 64.0))
        a, b, z = _build_segment(start, stop, rule, max_panels)
        if grid is not None:
            a = np.concatenate([grid.a, a])
            b = np.concatenate([grid.b, b])
            z = np.concatenate([grid.z, z])
        if a.size > max_panels:
            raise ConvergenceError(f"panel grid would exceed max_panels = {max_panels}")
        for arr in (a, b, z):
            arr.setflags(write=False)
        grid = PanelGrid(a=a, b=b, z=z, rule=rule)
        _GRIDS[panel_points] = grid
        return grid


def _z_error(t: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Model of the absolute error of the computed Hardy Z values."""
    rounding = 4e-16 * (1.0 + t * np.log(2.0 + t)) * np.maximum(1.0, np.abs(z))
    rs = np.zeros_like(t)
    high = t >= 10.0
    if np.any(high):
        rs[high] = rs_error_bound(t[high])
    return rounding + rs


def _power_error(z: np.ndarray, dz: np.ndarray, k: int) -> np.ndarray:
    return 2 * k * np.abs(z) ** (2 * k - 1) * dz + (2 * k) * 1.2e-16 * z ** (2 * k)


def _refine_panels(grid: PanelGrid, bad: np.ndarray, max_panels: int) -> PanelGrid:
    a, b, z, rule = grid.a, grid.b, grid.z, grid.rule
    mid = 0.5 * (a[bad] + b[bad])
    new_a = np.concatenate([a[~bad], a[bad], mid])
    new_b = np.concatenate([b[~bad], mid, b[bad]])
    if new_a.size > max_panels:
        raise ConvergenceError(f"refinement would exceed max_panels = {max_panels}")
    new_z = np.concatenate([z[~bad], _node_values(a[bad], mid, rule),
                            _node_values(mid, b[bad], rule)])
    order = np.argsort(new_a, kind="stable")
    out = PanelGrid(a=new_a[order], b=new_b[order], z=new_z[order], rule=rule)
    for arr in (out.a, out.b, out.z):
        arr.setflags(write=False)
    with _GRID_LOCK:
        current = _GRIDS.get(rule.x.size)
        if current is grid:
            _GRIDS[rule.x.size] = out
    return out


# --- tails --------------------------------------------------------------------

def _check_k(k: int) -> int:
    if k not in (1, 2):
        raise DomainError(f"k must be 1 or 2, got {k}")
    return int(k)


def _majorant(k: int, c: float) -> tuple[float, float]:
    """(constant, exponent) with |zeta(1/2+it)|^{2k} <= constant (1+t)^exponent."""
    return c ** (k / 2.0), k / 3.0


def laplace_tail_bound(k: int, sigma: float, cutoff: float, c: float = MAJORANT_C) -> float:
    """Majorant bound on int_X^inf |zeta|^{2k} e^{-sigma t} dt."""
    ck, alpha = _majorant(k, c)
    x = sigma * (1.0 + cutoff)
    # e^{sigma} sigma^{-alpha-1} Gamma(alpha+1, x), assembled in log space
    log_upper = math.log(sp.gammaincc(alpha + 1.0, x)) if x < 700 else -x + alpha * math.log(x)
    return ck * math.exp(sigma - (alpha + 1.0) * math.log(sigma) + sp.gammaln(alpha + 1.0)
                         + log_upper)


def laplace_cutoff(k: int, s: complex, cfg: QuadratureConfig) -> tuple[float, float]:
    sigma = s.real
    cutoff = cfg.cutoff_factor * math.log(1.0 / min(cfg.tol, 0.5)) / sigma
    tail = laplace_tail_bound(k, sigma, cutoff, cfg.majorant_c)
    while tail > 0.25 * cfg.tol:
        cutoff *= 1.2
        if cutoff > RS_T_MAX:
            raise ConvergenceError(
                f"tail bound {tail:.3g} not below {cfg.tol:g} before t = {RS_T_MAX:g}")
        tail = laplace_tail_bound(k, sigma, cutoff, cfg.majorant_c)
    return cutoff, tail


# --- Laplace transforms -------------------------------------------------------

def _panel_integral(grid: PanelGrid, sel: np.ndarray, k: int, kernel):
    """Panel sums, resolvable Legendre-tail estimates and rounding/evaluation bounds.

    Legendre coefficients cannot fall below the rounding noise of the node
    values, so the part of the tail at noise level is booked as rounding
    error instead of triggering further splits.
    """
    t = grid.nodes(sel)
    z = grid.z[sel]
    kern = kernel(t)
    vals = z ** (2 * k) * kern
    w = grid.weights(sel)
    sums = np.sum(vals * w, axis=1)
    width = grid.b[sel] - grid.a[sel]
    tail = _legendre_tail(vals, grid.rule)
    noise = _NOISE_FACTOR * grid.rule.x.size * np.abs(vals).max(axis=1)
    quad = width * np.maximum(tail - noise, 0.0)
    evaluation = width * np.minimum(tail, noise)
    evaluation += np.sum(w * np.abs(kern) * _power_error(z, _z_error(t, z), k), axis=1)
    return sums, quad, evaluation


def _adaptive_integral(k: int, cutoff: float, kernel, tol: float, cfg: QuadratureConfig,
                       lower: float = 0.0):
    """Integral over the grid panels in [lower, cutoff); panel error driven below tol."""
    grid = integrand_grid(cutoff, cfg.panel_points, cfg.max_panels)
    while True:
        sel = np.nonzero((grid.a >= lower) & (grid.a < cutoff))[0]
        sums, quad, evaluation = _panel_integral(grid, sel, k, kernel)
        err = float(np.sum(quad) + np.sum(evaluation))
        if np.sum(quad) <= tol:
            upper = float(grid.b[sel[-1]]) if sel.size else lower
            return complex(np.sum(sums)), err, upper
        share = tol / max(sel.size, 1)
        bad = np.zeros(grid.size, dtype=bool)
        bad[sel[quad > share]] = True
        if grid.size + int(bad.sum()) > cfg.max_panels:
            raise ConvergenceError(
                f"panel error {np.sum(quad):.3g} above tol {tol:g} with max_panels exhausted")
        grid = _refine_panels(grid, bad, cfg.max_panels)


def _check_s(s) -> complex:
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise DomainError("s must be finite")
    if s.real <= 0:
        raise DomainError("Laplace transform needs Re s > 0")
    return s


def laplace_quadrature(k: int, s, cfg: QuadratureConfig = DEFAULT_CONFIG) -> LaplaceResult:
    """L_k(s) = int_0^inf |zeta(1/2+ix)|^{2k} e^{-sx} dx by panel quadrature."""
    k = _check_k(k)
    s = _check_s(s)
    cutoff, _ = laplace_cutoff(k, s, cfg)
    value, err, upper = _adaptive_integral(k, cutoff, lambda t: np.exp(-s * t), 0.5 * cfg.tol, cfg)
    tail = laplace_tail_bound(k, s.real, upper, cfg.majorant_c)
    return LaplaceResult(s=s, k=k, value=value, method=Method.QUADRATURE,
                         err_estimate=err + tail)


def _romberg(func, lower: float, upper: float, tol: float, min_level: int, max_level: int = 22):
    """Romberg integration of a vectorised func; returns (value, error estimate)."""
    n = 2 ** min_level
    x = np.linspace(lower, upper, n + 1)
    fx = func(x)
    h = (upper - lower) / n
    trap = h * (np.sum(fx[1:-1]) + 0.5 * (fx[0] + fx[-1]))
    abs_sum = h * np.sum(np.abs(fx))
    rows = [[trap]]
    for level in range(min_level + 1, max_level + 1):
        h *= 0.5
        mids = lower + h * (2 * np.arange(n) + 1)
        fm = func(mids)
        abs_sum = 0.5 * abs_sum + h * np.sum(np.abs(fm))
        trap = 0.5 * trap + h * np.sum(fm)
        n *= 2
        row = [trap]
        for j in range(1, len(rows[-1]) + 1):
            factor = 4.0 ** j
            row.append(row[j - 1] + (row[j - 1] - rows[-1][j - 1]) / (factor - 1.0))
        rows.append(row)
        diff = abs(row[-1] - rows[-2][-1])
        floor = 1e-15 * abs_sum * math.sqrt(n)
        if len(rows) >= 4 and diff <= max(tol, floor):
            return complex(row[-1]), float(diff + floor)
    raise ConvergenceError(f"Romberg did not reach {tol:g} after 2^{max_level} intervals")


def romberg_laplace(k: int, s, cfg: QuadratureConfig = DEFAULT_CONFIG,
                    cutoff: float | None = None) -> LaplaceResult:
    """L_k(s) by Romberg extrapolation of the trapezoid rule on [0, X].

    Independent of the panel grid: Z is re-evaluated on uniform dyadic points.
    """
    k = _check_k(k)
    s = _check_s(s)
    if cutoff is None:
        cutoff, tail = laplace_cutoff(k, s, cfg)
    else:
        tail = laplace_tail_bound(k, s.real, cutoff, cfg.majorant_c)
    min_level = max(4, int(math.ceil(math.log2(max(cutoff, 1.0) * 4.0))))

    def func(t):
        return hardy_z(t) ** (2 * k) * np.exp(-s * t)

    value, err = _romberg(func, 0.0, cutoff, 0.25 * cfg.tol, min_level)
    return LaplaceResult(s=s, k=k, value=value, method=Method.ROMBERG, err_estimate=err + tail)


def truncated_laplace(k: int, s, cutoff: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """(value, err) of the panel quadrature of int_0^X without the tail."""
    k = _check_k(k)
    s = _check_s(s)
    grid = integrand_grid(cutoff, cfg.panel_points, cfg.max_panels)
    edge = grid.b[np.searchsorted(grid.b, cutoff)]
    if abs(edge - cutoff) > 1e-9 * max(1.0, cutoff):
        raise DomainError("cutoff must coincide with a panel edge; use panel_edge_at")
    value, err, _ = _adaptive_integral(k, cutoff, lambda t: np.exp(-s * t), 0.5 * cfg.tol, cfg)
    return value, err


def panel_edge_at(x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """Smallest panel edge of the shared grid that is >= x."""
    grid = integrand_grid(x, cfg.panel_points, cfg.max_panels)
    return float(grid.b[np.searchsorted(grid.b, x - 1e-12)])


# --- moments ------------------------------------------------------------------

def moment_integrals(k: int, T, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """I_k(T) = int_0^T |zeta(1/2+it)|^{2k} dt for an array of T; returns (values, errors)."""
    k = _check_k(k)
    t_arr = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(~np.isfinite(t_arr)) or np.any(t_arr < 0) or np.any(t_arr > MOMENT_T_MAX):
        raise RangeError(f"T must lie in [0, {MOMENT_T_MAX:g}]")
    cover = float(t_arr.max(initial=0.0))
    grid = integrand_grid(max(cover, 1.0), cfg.panel_points, cfg.max_panels)
    sums, quad, evaluation = _panel_integral(grid, np.arange(grid.size), k, lambda t: 1.0)
    sums = sums.real
    cum = np.concatenate([[0.0], np.cumsum(sums)])
    cum_err = np.concatenate([[0.0], np.cumsum(quad + evaluation)])
    idx = np.searchsorted(grid.b, t_arr, side="left")  # panel containing T
    idx = np.minimum(idx, grid.size - 1)
    a = grid.a[idx]
    values = cum[idx].copy()
    errors = cum_err[idx].copy()
    partial = t_arr > a
    if np.any(partial):
        ends = t_arr[partial]
        starts = a[partial]
        rule = grid.rule
        nodes = starts[:, None] + (ends - starts)[:, None] * (rule.x + 1.0) / 2.0
        z = hardy_z(nodes.ravel()).reshape(nodes.shape)
        vals = z ** (2 * k)
        w = (ends - starts)[:, None] / 2.0 * rule.w
        values[partial] += np.sum(vals * w, axis=1)
        errors[partial] += (ends - starts) * _legendre_tail(vals, rule)
        errors[partial] += np.sum(w * _power_error(z, _z_error(nodes, z), k), axis=1)
    return values, errors


def moment_integral(k: int, T: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> MomentRecord:
    """I_k(T) with absolute accuracy about 1e-6 (1 + T)."""
    T = float(T)
    if not 0 < T <= MOMENT_T_MAX:
        raise RangeError(f"T must lie in (0, {MOMENT_T_MAX:g}]")
    values, errors = moment_integrals(k, np.array([T]), cfg)
    return MomentRecord(T=T, value=float(values[0]), k=k, err_estimate=float(errors[0]))


# --- main-term bookkeeping ----------------------------------------------------

def _log_moment_matrix() -> np.ndarray:
    """M[m, j] with int_0^inf (log T)^j e^{-sT} dT = (1/s) sum_m M[m, j] Log(1/s)^m."""
    mu = gamma_derivatives_at_one()
    mat = np.zeros((5, 5))
    for j in range(5):
        for m in range(j + 1):
            mat[m, j] = math.comb(j, m) * mu[j - m]
    return mat


def main_coefficients_from_p4(p4: P4Coeffs) -> np.ndarray:
    """[E, D, C, B, A] such that int (T P4(log T))' e^{-sT} dT = (1/s) sum coeff_m L^m."""
    a = p4.as_array()
    q = a + np.append(np.arange(1, 5) * a[1:], 0.0)  # Q = P4 + P4'
    return _log_moment_matrix() @ q


def p4_from_main_coefficients(main: np.ndarray) -> P4Coeffs:
    """Inverse of ``main_coefficients_from_p4`` ([E, D, C, B, A] -> P4)."""
    q = np.linalg.solve(_log_moment_matrix(), np.asarray(main, dtype=float))
    # a_4 = q_4, a_j = q_j - (j+1) a_{j+1}
    a = np.zeros(5)
    a[4] = q[4]
    for j in range(3, -1, -1):
        a[j] = q[j] - (j + 1) * a[j + 1]
    return P4Coeffs(*a)


def main_term_laplace(s, p4: P4Coeffs) -> complex:
    """M(s) = int_0^inf (T P4(log T))' e^{-sT} dT."""
    s = _check_s(s)
    coeff = main_coefficients_from_p4(p4)
    ell = -np.log(s)
    return complex(np.polynomial.polynomial.polyval(ell, coeff) / s)


def e2_error_term(T, p4: P4Coeffs, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """E_2(T) = I_2(T) - T P_4(log T), scalar or array."""
    t_arr = np.atleast_1d(np.asarray(T, dtype=float))
    if np.any(t_arr <= 1):
        raise RangeError("E_2(T) is evaluated for T > 1")
    values, _ = moment_integrals(2, t_arr, cfg)
    out = values - t_arr * p4(np.log(t_arr))
    return float(out[0]) if np.ndim(T) == 0 else out


@dataclass(frozen=True)
class E2LaplaceResult:
    s: complex
    value: complex
    err_estimate: float


def e2_laplace(s, p4: P4Coeffs, cfg: QuadratureConfig = DEFAULT_CONFIG) -> E2LaplaceResult:
    """int_0^inf E_2(T) e^{-sT} dT = (L_2(s) - M(s)) / s."""
    s = _check_s(s)
    lap = laplace_quadrature(2, s, cfg)
    value = (lap.value - main_term_laplace(s, p4)) / s
    return E2LaplaceResult(s=s, value=value, err_estimate=lap.err_estimate / abs(s))


# --- identities ---------------------------------------------------------------

def _shifted_panels(cutoff: float, width: float = 1.0, offset: float = 0.5, n: int = 20):
    edges = np.concatenate([[0.0], np.arange(offset, cutoff + width, width)])
    a, b = edges[:-1], edges[1:]
    x, w = legendre.leggauss(n)
    nodes = a[:, None] + (b - a)[:, None] * (x + 1.0) / 2.0
    weights = (b - a)[:, None] / 2.0 * w
    return a, b, nodes, weights, x


def moment_laplace(k: int, T: float, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """(1/T) int_0^inf I_k(t) e^{-t/T} dt on a grid independent of the shared one.

    Returns (value, err_estimate).
    """
    k = _check_k(k)
    sigma = 1.0 / T
    ck, alpha = _majorant(k, cfg.majorant_c)

    def tail(x):
        # I_k(t) <= ck (1+t)^{alpha+1}/(alpha+1)
        y = sigma * (1.0 + x)
        return (ck / (alpha + 1.0)) * sigma * math.exp(
            sigma - (alpha + 2.0) * math.log(sigma) + sp.gammaln(alpha + 2.0)
            + math.log(max(sp.gammaincc(alpha + 2.0, y), 1e-300)))

    cutoff = cfg.cutoff_factor * math.log(1.0 / min(cfg.tol, 0.5)) / sigma
    while tail(cutoff) > 0.25 * cfg.tol * max(1.0, T):
        cutoff *= 1.2
    a, b, nodes, weights, _ = _shifted_panels(cutoff)
    moments, moment_err = moment_integrals(k, nodes.ravel(), cfg)
    moments = moments.reshape(nodes.shape)
    kern = np.exp(-sigma * nodes) * sigma
    value = float(np.sum(np.sum(moments * kern * weights, axis=1)))
    err = float(np.sum(moment_err.reshape(nodes.shape) * kern * weights)) + tail(b[-1])
    return value, err


def laplace_identity_residual(k: int, T: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> float:
    """|L_k(1/T) - (1/T) int_0^inf I_k(t) e^{-t/T} dt|, both sides by independent quadratures."""
    if not 1.0 <= T <= 100.0:
        raise RangeError("T must lie in [1, 100]")
    lhs = laplace_quadrature(k, 1.0 / T, cfg)
    rhs, _ = moment_laplace(k, T, cfg)
    return abs(lhs.value - rhs)


def trivial_bound_check(k: int, T: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> bool:
    """True iff I_k(T) <= e * L_k(1/T) within the combined error estimates."""
    if T < 1:
        raise RangeError("T must be >= 1")
    moment = moment_integral(k, T, cfg)
    lap = laplace_quadrature(k, 1.0 / T, cfg)
    slack = moment.err_estimate + math.e * lap.err_estimate
    return moment.value <= math.e * lap.value.real + slack


# --- Mellin transform ---------------------------------------------------------

def mellin_tail_bound(w, cutoff: float, c: float = MAJORANT_C) -> float:
    """Majorant bound on |int_X^inf |zeta|^4 t^{-w} dt| (infinite if Re w <= 5/3)."""
    excess = complex(w).real - 5.0 / 3.0
    if excess <= 0:
        return math.inf
    return c * (1.0 + 1.0 / cutoff) ** (2.0 / 3.0) * cutoff ** (-excess) / excess


def _check_w(w) -> complex:
    w = complex(w)
    if not (math.isfinite(w.real) and math.isfinite(w.imag)):
        raise DomainError("w must be finite")
    if w.real <= 1.0:
        raise DomainError("the Mellin transform converges only for Re w > 1")
    return w


def mellin_cutoff(w, max_cutoff: float = MELLIN_CUTOFF, c: float = MAJORANT_C) -> float:
    """Smallest power-of-two cutoff whose tail bound is below the target, capped."""
    cutoff = 64.0
    while cutoff < max_cutoff and mellin_tail_bound(w, cutoff, c) > MELLIN_TAIL_TARGET:
        cutoff *= 2.0
    return min(cutoff, max_cutoff)


def mellin_z2_result(w, cfg: QuadratureConfig = DEFAULT_CONFIG,
                     max_cutoff: float = MELLIN_CUTOFF) -> MellinResult:
    """int_1^inf |zeta(1/2+it)|^4 t^{-w} dt, truncated where the tail bound allows.

    The pointwise majorant only certifies the tail for Re w > 5/3, and only
    below 1e-8 once Re w is near 4 within the computed range; the reported
    tail bound says exactly what was certified.
    """
    w = _check_w(w)
    target = mellin_cutoff(w, max_cutoff, cfg.majorant_c)
    cutoff = panel_edge_at(target, cfg)
    value, err, upper = _adaptive_integral(
        2, cutoff, lambda t: np.exp(-w * np.log(t)), 0.5 * cfg.tol, cfg, lower=1.0)
    tail = mellin_tail_bound(w, upper, cfg.majorant_c)
    return MellinResult(w=w, value=value, cutoff=upper, tail_bound=tail, err_estimate=err + tail)


def mellin_z2(w, cfg: QuadratureConfig = DEFAULT_CONFIG) -> complex:
    """Z_2(w) = int_1^inf |zeta(1/2+it)|^4 t^{-w} dt for Re w > 1."""
    return mellin_z2_result(w, cfg).value


def romberg_mellin(w, cutoff: float, tol: float = 1e-9):
    """int_1^X |zeta|^4 t^{-w} dt by Romberg in the variable u = log t."""
    w = _check_w(w)
    upper = math.log(cutoff)
    min_level = max(6, int(math.ceil(math.log2(cutoff))) + 2)

    def func(u):
        t = np.exp(u)
        return hardy_z(t) ** 4 * np.exp((1.0 - w) * u)

    return _romberg(func, 0.0, upper, tol, min_level)

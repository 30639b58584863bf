"""Discrete-spectrum terms in the expansion of L_2(s).

A spectral table lists pairs (kappa_j, w_j) where lambda_j = kappa_j^2 + 1/4
runs over the discrete spectrum of the Laplacian on SL(2, Z) and
w_j = alpha_j H_j(1/2)^3.  The expansion of L_2 reads

    L_2(s) = main_term(s) + s^{-1/2} sum_j w_j (s^{-i k} R(k) Gamma(1/2 + i k)
                                              + s^{i k} R(-k) Gamma(1/2 - i k)) + G_2(s)

with R(y) = sqrt(pi/2) (2^{-iy} Gamma(1/4 - iy/2) / Gamma(1/4 + iy/2))^3
Gamma(2iy) cosh(pi y).  Every factor is handled in log space: Gamma(2iy) and
Gamma(1/2 + iy) underflow long before the products do.
"""

from __future__ import annotations

import cmath
import io
import math
import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np
from scipy import integrate

from .closed_forms import MainTermCoeffs, check_sector, main_term
from .errors import DomainError, NotFoundError, ParseError, ValidationError
from .special_functions import log_cosh, log_gamma
from .transforms import DEFAULT_CONFIG, LaplaceResult, Method, QuadratureConfig, laplace_quadrature

TABLE_ENV = "ZL_SPECTRAL_TABLE"
MODEL_TABLE_FILE = "maass_model.csv"
MERGE_TOL = 1e-9
FIRST_KAPPA = 9.53369526135  # smallest kappa_j for SL(2, Z)

_NUMBER = r"[+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_RECORD = re.compile(rf"^\s*({_NUMBER})\s*,\s*({_NUMBER})\s*$")


@dataclass(frozen=True)
class SpectralDatum:
    kappa: float
    weight: float


@dataclass(frozen=True)
class SpectralTable:
    kappa: np.ndarray
    weight: np.ndarray
    source: str = field(default="", compare=False)

    def __post_init__(self):
        kappa = np.array(self.kappa, dtype=float)
        weight = np.array(self.weight, dtype=float)
        if kappa.shape != weight.shape or kappa.ndim != 1:
            raise ValidationError("kappa and weight must be 1-d arrays of equal length")
        if np.any(~np.isfinite(kappa)) or np.any(kappa <= 0):
            raise ValidationError("kappa values must be finite and positive")
        if np.any(~np.isfinite(weight)) or np.any(weight < 0):
            raise ValidationError("weights must be finite and nonnegative")
        if np.any(np.diff(kappa) <= 0):
            raise ValidationError("kappa values must be strictly increasing")
        kappa.setflags(write=False)
        weight.setflags(write=False)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "weight", weight)

    def __len__(self) -> int:
        return len(self.kappa)

    @property
    def data(self) -> list[SpectralDatum]:
        return [SpectralDatum(float(k), float(w)) for k, w in zip(self.kappa, self.weight)]

    @property
    def kappa_max(self) -> float:
        return float(self.kappa[-1]) if len(self) else 0.0

    def truncated(self, kappa_max: float) -> "SpectralTable":
        keep = self.kappa <= kappa_max
        return SpectralTable(self.kappa[keep], self.weight[keep], self.source)

    def partial_sums(self, K) -> np.ndarray:
        """S(K) = sum of weights with kappa_j <= K."""
        cum = np.concatenate([[0.0], np.cumsum(self.weight)])
        return cum[np.searchsorted(self.kappa, np.asarray(K, dtype=float), side="right")]


EMPTY_TABLE = SpectralTable(np.zeros(0), np.zeros(0), "empty")


def table_from_pairs(pairs: Iterable[tuple[float, float]], source: str = "") -> SpectralTable:
    """Sort by kappa and merge entries closer than MERGE_TOL by adding weights."""
    rows = sorted((float(k), float(w)) for k, w in pairs)
    for k, w in rows:
        if not (math.isfinite(k) and k > 0):
            raise ValidationError(f"kappa must be positive, got {k}")
        if not (math.isfinite(w) and w >= 0):
            raise ValidationError(f"weight must be nonnegative, got {w}")
    kappa: list[float] = []
    weight: list[float] = []
    for k, w in rows:
        if kappa and k - kappa[-1] <= MERGE_TOL:
            weight[-1] += w
        else:
            kappa.append(k)
            weight.append(w)
    return SpectralTable(np.array(kappa), np.array(weight), source)


def parse_spectral_table(stream: TextIO | str, source: str = "<stream>") -> SpectralTable:
    """Read "kappa,weight" records; '#' starts a comment, blank lines are skipped."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    pairs = []
    for lineno, raw in enumerate(stream, start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        match = _RECORD.match(line)
        if match is None:
            raise ParseError(f"expected 'kappa,weight', got {raw.rstrip()!r}", line=lineno)
        kappa, weight = float(match.group(1)), float(match.group(2))
        if kappa <= 0:
            raise ValidationError(f"line {lineno}: kappa must be positive, got {kappa}")
        if weight < 0:
            raise ValidationError(f"line {lineno}: weight must be nonnegative, got {weight}")
        pairs.append((kappa, weight))
    if not pairs:
        raise ParseError("no records found")
    return table_from_pairs(pairs, source)


def load_spectral_table(path: str | os.PathLike) -> SpectralTable:
    with open(path, encoding="utf-8") as fh:
        return parse_spectral_table(fh, source=str(path))


def model_table() -> SpectralTable:
    """The shipped synthetic table (see ``model_spectral_table``)."""
    text = resources.files("zetalaplace.data").joinpath(MODEL_TABLE_FILE).read_text("utf-8")
    return parse_spectral_table(text, source=MODEL_TABLE_FILE)


def default_table() -> SpectralTable:
    """Table named by $ZL_SPECTRAL_TABLE, else the shipped synthetic model."""
    path = os.environ.get(TABLE_ENV)
    return load_spectral_table(path) if path else model_table()


# --- synthetic model ---------------------------------------------------------

def weight_density(K):
    """d/dK of (4 / (3 pi^2)) K^2 log^3 K, the mean growth of S(K)."""
    K = np.asarray(K, dtype=float)
    L = np.log(K)
    return 4.0 / (3.0 * math.pi ** 2) * (2.0 * K * L ** 3 + 3.0 * K * L ** 2)


def model_spectral_table(kappa_max: float = 180.0, seed: int = 20240517,
                         spread: float = 0.5) -> SpectralTable:
    """Synthetic stand-in for a table of even Maass forms.

    kappa_j follow the even-form Weyl law N(K) ~ K^2 / 24 (jittered, anchored at
    FIRST_KAPPA); weights are lognormal around the mean weight_density(K) / N'(K),
    so S(K) tracks (4 / (3 pi^2)) K^2 log^3 K.  These are NOT computed
    eigenvalues or L-values.
    """
    rng = np.random.default_rng(seed)
    offset = FIRST_KAPPA ** 2 / 24.0 - 1.0
    count = int((kappa_max ** 2) / 24.0 - offset)
    j = np.arange(1, count + 1, dtype=float)
    jitter = rng.uniform(-0.3, 0.3, size=count)
    jitter[0] = 0.0
    kappa = np.sqrt(24.0 * (j + offset + jitter))
    kappa = kappa[kappa <= kappa_max]
    mean = weight_density(kappa) / (kappa / 12.0)
    weight = mean * rng.lognormal(-0.5 * spread ** 2, spread, size=kappa.size)
    return SpectralTable(np.round(kappa, 9), np.round(weight, 6), "synthetic model")


def write_table(path: Path, table: SpectralTable, header: str = "") -> None:
    lines = [f"# {h}" for h in header.splitlines()] if header else []
    lines += [f"{k:.9f},{w:.6f}" for k, w in zip(table.kappa, table.weight)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --- R(y) and residues ---------------------------------------------------------

def log_r_function(y):
    """log R(y), vectorised over real y != 0 (branch irrelevant: only exp of it is used)."""
    arr = np.asarray(y, dtype=float)
    if np.any(arr == 0):
        raise DomainError("R(y) has a pole at y = 0")
    ratio = (-1j * arr * math.log(2.0) + log_gamma(0.25 - 0.5j * arr)
             - log_gamma(0.25 + 0.5j * arr))
    out = (0.5 * math.log(math.pi / 2.0) + 3.0 * ratio + log_gamma(2j * arr)
           + log_cosh(math.pi * arr))
    return complex(out) if np.ndim(y) == 0 else out


def r_function(y) -> complex:
    return cmath.exp(log_r_function(y))


def residue_r0(kappa: float, table: SpectralTable) -> complex:
    """R(kappa) times the (merged) weight at kappa: the residue of Z_2 at 1/2 + i kappa."""
    idx = int(np.searchsorted(table.kappa, kappa - MERGE_TOL))
    if idx >= len(table) or abs(table.kappa[idx] - kappa) > MERGE_TOL:
        raise NotFoundError(f"kappa = {kappa} not in table")
    w = float(table.weight[idx])
    return 0j if w == 0 else w * r_function(kappa)


# --- spectral sum -----------------------------------------------------------------

@dataclass(frozen=True)
class SpectralSum:
    s: complex
    value: complex
    truncation: float  # envelope of the terms beyond kappa_max


def _log_factors(kappa: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """log(R(+-k) Gamma(1/2 +- i k)) for every kappa."""
    plus = log_r_function(kappa) + log_gamma(0.5 + 1j * kappa)
    minus = log_r_function(-kappa) + log_gamma(0.5 - 1j * kappa)
    return np.atleast_1d(plus), np.atleast_1d(minus)


def spectral_terms(s, table: SpectralTable) -> np.ndarray:
    """Per-kappa contributions w_j s^{-1/2}(s^{-ik}R(k)G(1/2+ik) + s^{ik}R(-k)G(1/2-ik))."""
    s = complex(s)
    if len(table) == 0:
        return np.zeros(0, dtype=complex)
    log_s = cmath.log(s)
    kappa = table.kappa
    plus, minus = _log_factors(kappa)
    terms = (np.exp(-(0.5 + 1j * kappa) * log_s + plus)
             + np.exp(-(0.5 - 1j * kappa) * log_s + minus))
    return np.where(table.weight == 0, 0j, table.weight * terms)


def term_envelope(s, kappa, weight=1.0):
    """Upper bound for one term: 2 w |s|^{-1/2} e^{kappa |arg s|} 2 kappa^{-1/2} sqrt(2 pi) e^{-pi kappa/2}.

    Uses |R(y)| <= 2 |y|^{-1/2} (checked on the working range) and
    |Gamma(1/2 + i y)| = sqrt(pi / cosh(pi y)).
    """
    s = complex(s)
    kappa = np.asarray(kappa, dtype=float)
    decay = math.pi / 2.0 - abs(cmath.phase(s))
    return (4.0 * math.sqrt(2.0 * math.pi) * np.asarray(weight) * abs(s) ** -0.5
            * kappa ** -0.5 * np.exp(-decay * kappa))


def truncation_envelope(s, kappa_max: float, safety: float = 4.0) -> float:
    """Bound for the terms with kappa > kappa_max, weights taken at safety x their mean density."""
    if kappa_max <= 0:
        return math.inf
    s = complex(s)
    decay = math.pi / 2.0 - abs(cmath.phase(s))
    if decay * kappa_max > 700:
        return 0.0
    lo = max(kappa_max, 2.0)

    def integrand(K):
        return float(term_envelope(s, K, safety * weight_density(K)))

    value, _ = integrate.quad(integrand, lo, np.inf, limit=200)
    return float(value)


def spectral_sum_result(s, table: SpectralTable) -> SpectralSum:
    s = complex(s)
    check_sector(s)
    terms = spectral_terms(s, table)
    value = complex(sum(terms.tolist(), 0j))  # ascending kappa, fixed order
    return SpectralSum(s=s, value=value, truncation=truncation_envelope(s, table.kappa_max))


def spectral_sum(s, table: SpectralTable) -> complex:
    return spectral_sum_result(s, table).value


def theorem_l2(s, coeffs: MainTermCoeffs, table: SpectralTable) -> LaplaceResult:
    """main_term + spectral_sum; err_estimate is the spectral truncation envelope only."""
    spec = spectral_sum_result(s, table)
    value = main_term(s, coeffs) + spec.value
    return LaplaceResult(s=complex(s), k=2, value=value, method=Method.THEOREM_SPECTRAL,
                         err_estimate=spec.truncation)


# --- G_2 residual --------------------------------------------------------------------

def g2_envelope(s, C: float = 0.1) -> float:
    """|s|^{-1/2} exp(-C log(x) / ((log log x)^{2/3} (log log log x)^{1/3})), x = |s|^{-1} + 20."""
    r = abs(complex(s))
    x = 1.0 / r + 20.0
    lx = math.log(x)
    llx = math.log(lx)
    lllx = math.log(llx)
    return r ** -0.5 * math.exp(-C * lx / (llx ** (2.0 / 3.0) * lllx ** (1.0 / 3.0)))


@dataclass(frozen=True)
class G2Residual:
    s: complex
    residual: float
    main_only: float  # |L_2(s) - main_term(s)|
    envelope: float
    err_estimate: float  # quadrature error + spectral truncation


def g2_residual_report(s, coeffs: MainTermCoeffs, table: SpectralTable, C: float = 0.1,
                       cfg: QuadratureConfig | None = None, l2=None) -> G2Residual:
    s = complex(s)
    check_sector(s)
    if l2 is None:
        l2 = laplace_quadrature(2, s, cfg or DEFAULT_CONFIG)
    theorem = theorem_l2(s, coeffs, table)
    return G2Residual(s=s, residual=abs(l2.value - theorem.value),
                      main_only=abs(l2.value - main_term(s, coeffs)),
                      envelope=g2_envelope(s, C),
                      err_estimate=l2.err_estimate + theorem.err_estimate)


def g2_residual(s, coeffs: MainTermCoeffs, table: SpectralTable, C: float = 0.1,
                cfg: QuadratureConfig | None = None) -> tuple[float, float]:
    """(|L_2(s) - theorem_l2(s)|, envelope at s)."""
    rep = g2_residual_report(s, coeffs, table, C, cfg)
    return rep.residual, rep.envelope


# --- partial sums of the weights -------------------------------------------------

@dataclass(frozen=True)
class PartialSumReport:
    K: np.ndarray
    S: np.ndarray
    ratios: np.ndarray
    max_ratio: float
    top_decade_slope: float  # d log(ratio) / d log K over [K_max / 10, K_max]
    bounded: bool


def partial_sum_bound(table: SpectralTable, C_exponent: float, n_grid: int = 64,
                      slope_limit: float = 0.25) -> PartialSumReport:
    """S(K) / (K^2 log^C K) over a geometric K grid and a trend test on the top decade.

    ``bounded`` is False when log(ratio) rises faster than ``slope_limit`` per
    unit of log K across the top decade of K.
    """
    if len(table) == 0:
        raise ValidationError("table is empty")
    k_lo = max(float(table.kappa[0]), math.e)
    k_hi = max(table.kappa_max, k_lo * 1.0001)
    K = np.geomspace(k_lo, k_hi, n_grid)
    S = table.partial_sums(K)
    ratios = S / (K ** 2 * np.log(K) ** C_exponent)
    top = K >= k_hi / 10.0
    if np.count_nonzero(top) >= 3 and np.all(ratios[top] > 0):
        slope = float(np.polyfit(np.log(K[top]), np.log(ratios[top]), 1)[0])
    else:
        slope = 0.0
    return PartialSumReport(K=K, S=S, ratios=ratios, max_ratio=float(ratios.max()),
                            top_decade_slope=slope, bounded=bool(slope <= slope_limit))


if __name__ == "__main__":  # pragma: no cover - regeneration helper
    target = Path(__file__).with_name("data") / MODEL_TABLE_FILE
    header = ("SYNTHETIC model spectral table -- not computed Maass eigenvalues or L-values.\n"
              "kappa: even-form Weyl law K^2/24, jittered, anchored at 9.53369526135\n"
              "weight: lognormal around the mean density of (4/(3 pi^2)) K^2 log^3 K\n"
              "generator: zetalaplace.spectral.model_spectral_table(180.0, seed=20240517)\n"
              "format: kappa,weight")
    write_table(target, model_spectral_table(), header)
    print(f"wrote {target}")

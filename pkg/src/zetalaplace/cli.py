"""Command-line front end.

    zetalaplace eval --k 2 --s 0.1 --method quadrature,theorem --format csv
    zetalaplace compare --k 1 --s 0.5+0.3i
    zetalaplace fit --coeffs main --sigma-grid 1e-3:0.3:24
    zetalaplace moments --k 2 --T 100,1000
    zetalaplace spectral-check --table maass.csv
    zetalaplace verify --suite identities --tol 1e-5

Exit codes: 0 success, 2 a check failed, 64 usage error, 65 data error.
Reports go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import closed_forms as cf
from . import spectral as sp
from . import transforms as tr
from .errors import DomainError, ParseError, ValidationError, ZetaLaplaceError
from .special_functions import gamma, k0_ascending, k0_laplace
from .zeta_line import riemann_siegel_theta, zeta_half_em, zeta_half_rs

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_USAGE = 64
EXIT_DATA = 65

CSV_FIELDS = ("command", "method", "k", "s_re", "s_im", "value_re", "value_im", "err_estimate",
              "note")
CHECK_FIELDS = ("suite", "check", "value", "threshold", "passed")


class Command(str, enum.Enum):
    EVAL = "eval"
    COMPARE = "compare"
    FIT = "fit"
    MOMENTS = "moments"
    SPECTRAL_CHECK = "spectral-check"
    VERIFY = "verify"


class OutputFormat(str, enum.Enum):
    CSV = "csv"
    JSON = "json"


METHOD_ALIASES = {
    "quadrature": tr.Method.QUADRATURE,
    "romberg": tr.Method.ROMBERG,
    "kober": tr.Method.KOBER,
    "atkinson": tr.Method.ATKINSON_SERIES,
    "atkinson_series": tr.Method.ATKINSON_SERIES,
    "k0": tr.Method.K0_SERIES,
    "k0_series": tr.Method.K0_SERIES,
    "theorem": tr.Method.THEOREM_SPECTRAL,
    "theorem_spectral": tr.Method.THEOREM_SPECTRAL,
}
METHODS_FOR_K = {
    1: (tr.Method.QUADRATURE, tr.Method.ROMBERG, tr.Method.KOBER, tr.Method.ATKINSON_SERIES),
    2: (tr.Method.QUADRATURE, tr.Method.ROMBERG, tr.Method.K0_SERIES, tr.Method.THEOREM_SPECTRAL),
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: Command
    k: int = 2
    points: list = field(default_factory=list)
    methods: tuple = ()
    tol: float = 1e-8
    table_path: str | None = None
    output_format: OutputFormat = OutputFormat.CSV
    seed: int = 0
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.tol > 0:
            raise UsageError("--tol must be positive")
        if self.command in (Command.EVAL, Command.COMPARE) and not self.points:
            raise UsageError(f"{self.command.value} needs at least one point (--s or --grid)")

    def echo(self) -> dict:
        out = asdict(self)
        out["command"] = self.command.value
        out["output_format"] = self.output_format.value
        out["methods"] = [m.value for m in self.methods]
        out["points"] = [_format_complex(p) for p in self.points]
        return out


# --- argument parsing ---------------------------------------------------------

_COMPLEX_RE = re.compile(r"^[+-]?[0-9.eE+-]*[ij]?$")


def parse_complex(text: str) -> complex:
    """'a+bi', 'a - b i', 'bi', 'a' (spaces allowed, i or j)."""
    compact = text.replace(" ", "").replace("I", "i").replace("J", "j")
    if not compact or not _COMPLEX_RE.match(compact):
        raise UsageError(f"cannot parse complex number {text!r}")
    compact = compact.replace("i", "j")
    if compact.endswith("j") and (len(compact) == 1 or compact[-2] in "+-"):
        compact = compact[:-1] + "1j"
    try:
        return complex(compact)
    except ValueError as exc:
        raise UsageError(f"cannot parse complex number {text!r}") from exc


def parse_grid(text: str, geometric: bool) -> list[float]:
    """'start:stop:count' -> count points, geometric or linear."""
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be start:stop:count, got {text!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}") from exc
    if count < 1:
        raise UsageError("grid count must be >= 1")
    if geometric:
        if start <= 0 or stop <= 0:
            raise UsageError("geometric grids need positive endpoints")
        return [float(x) for x in np.geomspace(start, stop, count)]
    return [float(x) for x in np.linspace(start, stop, count)]


def parse_methods(text: str | None, k: int) -> tuple:
    if not text:
        return METHODS_FOR_K[k]
    out = []
    for name in text.split(","):
        name = name.strip().lower()
        if name not in METHOD_ALIASES:
            raise UsageError(f"unknown method {name!r}; choose from {sorted(METHOD_ALIASES)}")
        method = METHOD_ALIASES[name]
        if method not in METHODS_FOR_K[k]:
            raise UsageError(f"method {name!r} does not apply to k = {k}")
        if method not in out:
            out.append(method)
    return tuple(out)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="zetalaplace", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, points=False):
        p.add_argument("--format", choices=[f.value for f in OutputFormat], default="csv")
        p.add_argument("--tol", type=float, default=1e-8)
        p.add_argument("--table", default=None, help="spectral table (default $ZL_SPECTRAL_TABLE "
                                                      "or the shipped synthetic model)")
        if points:
            p.add_argument("--k", type=int, choices=[1, 2], default=2)
            p.add_argument("--s", action="append", default=[], help="point a+bi (repeatable)")
            p.add_argument("--grid", default=None, help="real grid start:stop:count")
            p.add_argument("--geometric", action="store_true", help="geometric --grid spacing")

    p_eval = sub.add_parser("eval", help="evaluate L_k(s) by selected methods")
    common(p_eval, points=True)
    p_eval.add_argument("--method", default=None, help="comma-separated method list")
    p_cmp = sub.add_parser("compare", help="all methods for k, with differences to quadrature")
    common(p_cmp, points=True)
    p_fit = sub.add_parser("fit", help="fit main-term or Kober coefficients")
    common(p_fit)
    p_fit.add_argument("--coeffs", choices=["main", "main-free", "kober"], default="main")
    p_fit.add_argument("--sigma-grid", default="1e-3:0.3:24")
    p_fit.add_argument("--linear", action="store_true", help="linear sigma grid (default geometric)")
    p_fit.add_argument("--degree", type=int, default=3, help="Kober polynomial degree")
    p_fit.add_argument("--b", choices=["closed-form", "moments"], default="closed-form",
                       help="frozen L^3 coefficient for --coeffs main")
    p_fit.add_argument("--seed", type=int, default=0)
    p_fit.add_argument("--jitter", type=float, default=0.0,
                       help="relative log-spacing jitter of the sigma grid")
    p_mom = sub.add_parser("moments", help="I_k(T) and, for k = 2, E_2(T)")
    common(p_mom)
    p_mom.add_argument("--k", type=int, choices=[1, 2], default=2)
    p_mom.add_argument("--T", default="100,1000", help="comma list or start:stop:count")
    p_spec = sub.add_parser("spectral-check", help="structural checks of a spectral table")
    common(p_spec)
    p_spec.add_argument("--c-exponent", type=float, default=3.0)
    p_ver = sub.add_parser("verify", help="run a verification suite")
    common(p_ver)
    p_ver.add_argument("--suite", choices=["identities", "special", "zeta", "all"],
                       default="identities")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    command = Command(args.command)
    points: list = []
    methods: tuple = ()
    k = getattr(args, "k", 2)
    extra: dict = {}
    if command in (Command.EVAL, Command.COMPARE):
        points = [parse_complex(x) for x in args.s]
        if args.grid:
            points += parse_grid(args.grid, args.geometric)
        methods = parse_methods(getattr(args, "method", None), k) if command == Command.EVAL \
            else METHODS_FOR_K[k]
    elif command == Command.FIT:
        extra = {"coeffs": args.coeffs, "sigma_grid": args.sigma_grid, "linear": args.linear,
                 "degree": args.degree, "b": args.b, "jitter": args.jitter}
    elif command == Command.MOMENTS:
        if ":" in args.T:
            points = parse_grid(args.T, geometric=True)
        else:
            try:
                points = [float(x) for x in args.T.split(",")]
            except ValueError as exc:
                raise UsageError(f"bad --T {args.T!r}") from exc
    elif command == Command.SPECTRAL_CHECK:
        extra = {"c_exponent": args.c_exponent}
    elif command == Command.VERIFY:
        extra = {"suite": args.suite}
    return RunConfig(command=command, k=k, points=points, methods=methods, tol=args.tol,
                     table_path=args.table, output_format=OutputFormat(args.format),
                     seed=getattr(args, "seed", 0), extra=extra)


# --- output -------------------------------------------------------------------

def _format_float(x: float) -> str:
    return repr(float(x))


def _format_complex(z: complex) -> str:
    z = complex(z)
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else None


def emit(rows: list[dict], fields: tuple, cfg: RunConfig, out) -> None:
    if cfg.output_format == OutputFormat.JSON:
        payload = {"config": cfg.echo(),
                   "rows": [{k: (_json_float(v) if isinstance(v, float) else v)
                             for k, v in row.items()} for row in rows]}
        out.write(json.dumps(payload, sort_keys=True, indent=1) + "\n")
        return
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (_format_float(v) if isinstance(v, float) else v)
                         for k, v in row.items()})
    out.write(buf.getvalue())


def _row(cfg: RunConfig, method: str, s: complex, value: complex, err: float, note: str = ""):
    s = complex(s)
    value = complex(value)
    return {"command": cfg.command.value, "method": method, "k": cfg.k,
            "s_re": s.real, "s_im": s.imag, "value_re": value.real, "value_im": value.imag,
            "err_estimate": float(err), "note": note}


# --- commands ---------------------------------------------------------------------

def _table(cfg: RunConfig) -> sp.SpectralTable:
    return sp.load_spectral_table(cfg.table_path) if cfg.table_path else sp.default_table()


def evaluate(cfg: RunConfig, method: tr.Method, s: complex, table=None) -> tr.LaplaceResult:
    qcfg = tr.QuadratureConfig(tol=cfg.tol)
    if method == tr.Method.QUADRATURE:
        return tr.laplace_quadrature(cfg.k, s, qcfg)
    if method == tr.Method.ROMBERG:
        return tr.romberg_laplace(cfg.k, s, qcfg)
    if method == tr.Method.KOBER:
        if s.imag != 0:
            raise DomainError("the Kober expansion is for real s")
        # leading term only; the remainder is O(1), reported as unbounded
        return tr.LaplaceResult(s=s, k=1, value=complex(cf.kober_main(s.real / 2.0)),
                                method=method, err_estimate=math.inf)
    if method == tr.Method.ATKINSON_SERIES:
        return cf.atkinson_l1(s, tol=cfg.tol)
    if method == tr.Method.K0_SERIES:
        return cf.atkinson_l2_k0(s, tol=cfg.tol)
    if method == tr.Method.THEOREM_SPECTRAL:
        return sp.theorem_l2(s, cf.default_main_coeffs(), table if table is not None else _table(cfg))
    raise UsageError(f"unsupported method {method}")


def _note(method: tr.Method) -> str:
    return {tr.Method.ATKINSON_SERIES: "differs from L_1 by a holomorphic function",
            tr.Method.K0_SERIES: "differs from L_2 by an analytic function",
            tr.Method.THEOREM_SPECTRAL: "main term + spectral sum; err excludes G_2",
            tr.Method.KOBER: "leading term only"}.get(method, "")


def cmd_eval(cfg: RunConfig, out) -> int:
    table = _table(cfg) if tr.Method.THEOREM_SPECTRAL in cfg.methods else None
    rows = []
    for s in cfg.points:
        for method in cfg.methods:
            res = evaluate(cfg, method, complex(s), table)
            rows.append(_row(cfg, method.value, res.s, res.value, res.err_estimate, _note(method)))
    emit(rows, CSV_FIELDS, cfg, out)
    return EXIT_OK


def cmd_compare(cfg: RunConfig, out) -> int:
    table = _table(cfg) if cfg.k == 2 else None
    rows = []
    for s in cfg.points:
        s = complex(s)
        ref = evaluate(cfg, tr.Method.QUADRATURE, s)
        rows.append(_row(cfg, ref.method.value, s, ref.value, ref.err_estimate, "reference"))
        for method in cfg.methods[1:]:
            try:
                res = evaluate(cfg, method, s, table)
            except (DomainError, ZetaLaplaceError) as exc:
                print(f"{method.value} at {_format_complex(s)}: {exc}", file=sys.stderr)
                continue
            note = f"|diff to quadrature| = {abs(res.value - ref.value)!r}"
            rows.append(_row(cfg, method.value, s, res.value, res.err_estimate, note))
    emit(rows, CSV_FIELDS, cfg, out)
    return EXIT_OK


def _fit_grid(cfg: RunConfig) -> np.ndarray:
    grid = np.array(parse_grid(cfg.extra["sigma_grid"], geometric=not cfg.extra["linear"]))
    if cfg.extra["jitter"] > 0 and grid.size > 1:
        rng = np.random.default_rng(cfg.seed)
        step = np.diff(np.log(grid)).mean()
        grid = grid * np.exp(rng.uniform(-1, 1, grid.size) * cfg.extra["jitter"] * step)
    return np.sort(grid)


def cmd_fit(cfg: RunConfig, out) -> int:
    sig = _fit_grid(cfg)
    kind = cfg.extra["coeffs"]
    rows = []
    if kind == "kober":
        coeffs = cf.kober_fit(sig, cfg.extra["degree"], cfg=tr.QuadratureConfig(tol=cfg.tol))
        for n, c in enumerate(coeffs.c):
            rows.append({"name": f"c{n}", "value": float(c), "provenance": "fitted"})
        rows.append({"name": "scaled_residual", "value": coeffs.residual, "provenance": "fitted"})
    else:
        values = cf.l2_values(sig)
        if kind == "main-free":
            coeffs = cf.fit_main_coeffs_free(sig, values)
        else:
            b = cf.MAIN_B_CLOSED_FORM if cfg.extra["b"] == "closed-form" else cf.main_b_from_moments()
            coeffs = cf.fit_main_coeffs(sig, values, B=b)
        frozen = set() if kind == "main-free" else {"A", "B"}
        for name in "ABCDE":
            prov = cf.Provenance.CLOSED_FORM.value if name in frozen else coeffs.provenance.value
            if name == "B" and kind == "main" and cfg.extra["b"] == "moments":
                prov = "from_moment_polynomial"
            rows.append({"name": name, "value": float(getattr(coeffs, name)), "provenance": prov})
    emit(rows, ("name", "value", "provenance"), cfg, out)
    return EXIT_OK


def cmd_moments(cfg: RunConfig, out) -> int:
    T = np.array(cfg.points, dtype=float)
    if T.size == 0 or np.any(T < 0):
        raise UsageError("--T values must be >= 0")
    qcfg = tr.QuadratureConfig(tol=cfg.tol)
    values, errors = tr.moment_integrals(cfg.k, T, qcfg)
    rows = []
    p4 = cf.p4_default() if cfg.k == 2 else None
    for t, v, e in zip(T, values, errors):
        row = {"T": float(t), "value": float(v), "err_estimate": float(e), "E2": ""}
        if p4 is not None and t > 1:
            row["E2"] = float(v - t * p4(math.log(t)))
        rows.append(row)
    emit(rows, ("T", "value", "err_estimate", "E2"), cfg, out)
    return EXIT_OK


def spectral_checks(table: sp.SpectralTable, c_exponent: float) -> list[dict]:
    rows = []
    worst = 0.0
    for sigma in np.geomspace(0.01, 1.0, 12):
        value = sp.spectral_sum(sigma, table)
        worst = max(worst, abs(value.imag) / (1.0 + abs(value)))
    rows.append({"suite": "spectral", "check": "realness_real_sigma", "value": worst,
                 "threshold": 1e-10, "passed": worst <= 1e-10})
    y = np.geomspace(5.0, 500.0, 200)
    rmax = float(np.max(np.abs(np.exp(sp.log_r_function(y))) * np.sqrt(y)))
    rows.append({"suite": "spectral", "check": "r_function_sqrt_y_max", "value": rmax,
                 "threshold": 2.0, "passed": rmax <= 2.0})
    rep = sp.partial_sum_bound(table, c_exponent)
    rows.append({"suite": "spectral", "check": f"partial_sum_slope_C{c_exponent:g}",
                 "value": rep.top_decade_slope, "threshold": 0.25, "passed": rep.bounded})
    return rows


def cmd_spectral_check(cfg: RunConfig, out) -> int:
    rows = spectral_checks(_table(cfg), cfg.extra["c_exponent"])
    emit(rows, CHECK_FIELDS, cfg, out)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CHECK_FAILED


def _check(suite, name, value, threshold) -> dict:
    return {"suite": suite, "check": name, "value": float(value), "threshold": float(threshold),
            "passed": bool(value <= threshold)}


def suite_identities(tol: float) -> list[dict]:
    rows = []
    for k in (1, 2):
        for T in (1.0, 5.0, 10.0):
            rows.append(_check("identities", f"moment_laplace_k{k}_T{T:g}",
                               tr.laplace_identity_residual(k, T), tol))
            ok = tr.trivial_bound_check(k, T)
            rows.append({"suite": "identities", "check": f"trivial_bound_k{k}_T{T:g}",
                         "value": float(ok), "threshold": 1.0, "passed": ok})
    coeffs = cf.default_main_coeffs()
    for s in (0.3 + 0.2j, 0.05 - 0.04j, 0.9 + 0.3j):
        a = cf.main_term(s, coeffs)
        b = cf.main_term(s.conjugate(), coeffs)
        rows.append(_check("identities", f"main_term_conj_{_format_complex(s)}",
                           abs(b - a.conjugate()), 0.0))
    for k, s in ((1, 0.5 + 0.3j), (2, 0.4 - 0.2j)):
        a = tr.laplace_quadrature(k, s)
        b = tr.laplace_quadrature(k, s.conjugate())
        rows.append(_check("identities", f"quadrature_conj_k{k}",
                           abs(b.value - a.value.conjugate()), a.err_estimate + b.err_estimate))
    return rows


def suite_special(tol: float) -> list[dict]:
    rng = np.random.default_rng(7)
    z = rng.uniform(0.2, 30, 100) + 1j * rng.uniform(-30, 30, 100)
    rec = np.max(np.abs(gamma(z + 1) / (z * gamma(z)) - 1))
    dup = np.max(np.abs(gamma(z) * gamma(z + 0.5) / (2 ** (1 - 2 * z) * math.sqrt(math.pi)
                                                     * gamma(2 * z)) - 1))
    y = np.linspace(-40, 40, 100)
    mod = np.max(np.abs(np.abs(gamma(0.5 + 1j * y)) ** 2 * np.cosh(math.pi * y) / math.pi - 1))
    r = np.linspace(4, 8, 50)
    w = r * np.exp(1j * np.linspace(-2.3, 2.3, 50))
    overlap = np.max(np.abs(k0_ascending(w) - k0_laplace(w)) / np.abs(k0_laplace(w)))
    return [_check("special", "gamma_recurrence", rec, 1e-10),
            _check("special", "gamma_duplication", dup, 1e-10),
            _check("special", "gamma_half_line_modulus", mod, 1e-10),
            _check("special", "k0_branch_overlap", overlap, 1e-9)]


def suite_zeta(tol: float) -> list[dict]:
    rng = np.random.default_rng(11)
    t = np.sort(rng.uniform(10, 3000, 50))
    rs = zeta_half_rs(t)
    em = np.array([zeta_half_em(x, 1e-12) for x in t])
    real = np.max(np.abs((np.exp(1j * riemann_siegel_theta(t)) * em).imag))
    return [_check("zeta", "rs_vs_em", np.max(np.abs(rs - em)), 1e-7),
            _check("zeta", "hardy_z_realness", real, 1e-9)]


def cmd_verify(cfg: RunConfig, out) -> int:
    suite = cfg.extra["suite"]
    runners = {"identities": suite_identities, "special": suite_special, "zeta": suite_zeta}
    names = list(runners) if suite == "all" else [suite]
    rows = []
    for name in names:
        rows += runners[name](cfg.tol)
    emit(rows, CHECK_FIELDS, cfg, out)
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_CHECK_FAILED


COMMANDS = {Command.EVAL: cmd_eval, Command.COMPARE: cmd_compare, Command.FIT: cmd_fit,
            Command.MOMENTS: cmd_moments, Command.SPECTRAL_CHECK: cmd_spectral_check,
            Command.VERIFY: cmd_verify}


def run(cfg: RunConfig, out=None) -> int:
    return COMMANDS[cfg.command](cfg, out or sys.stdout)


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        cfg = config_from_args(args)
        return run(cfg, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ZetaLaplaceError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

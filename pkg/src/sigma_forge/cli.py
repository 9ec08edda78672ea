"""Command line front end: ``sigma-forge {expand,sigma,wp,division,check}``."""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from . import ring_core as rc
from .curve_expansions import SYMBOLIC, CurveKit, CurveParams, invariants_D
from .nplication import PsiPoly, classical_oracle, psi_poly
from .series_engine import INF, BSeries, LSeries, SeriesError, hurwitz_report
from .sigma_engine import SUITES, SigmaKit, identity_suite

FORMATS = ("text", "json", "latex")
DEFAULT_ORDER = 10

CURVE_TARGETS = ("s", "x", "y", "omega1", "eta1", "tprime", "q", "u", "p")
SIGMA_TARGETS = ("xi", "third_kind", "r", "sigma_t", "sigma_sq", "sigma", "wp", "wp_prime")
HURWITZ_TARGETS = ("sigma", "sigma_sq")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    order: int = DEFAULT_ORDER
    mu: tuple[Fraction, ...] | None = None
    fmt: str = "text"
    output: str | None = None
    target: str | None = None
    suites: tuple[str, ...] = ()
    n: int | None = None
    oracle: bool = False

    @property
    def params(self) -> CurveParams:
        return SYMBOLIC if self.mu is None else CurveParams.numeric(self.mu)


def max_order() -> int:
    raw = os.environ.get("SIGMA_FORGE_MAX_ORDER", "64")
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SIGMA_FORGE_MAX_ORDER must be an integer, got {raw!r}")


def parse_mu(text: str) -> tuple[Fraction, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 5:
        raise UsageError("--mu needs five rationals mu1,mu2,mu3,mu4,mu6")
    try:
        return tuple(rc.as_rat(p) for p in parts)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"malformed rational in --mu: {exc}")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _lseries_text(s: LSeries, hurwitz: bool) -> str:
    lines = []
    for n, c in s.items():
        if hurwitz and n >= 0:
            lines.append(f"{s.var}^{n}/{n}!: {rc.to_text(c * math.factorial(n))}")
        else:
            lines.append(f"{s.var}^{n}: {rc.to_text(c)}")
    lines.append(f"O({s.var}^{int(s.prec) + 1})" if s.prec != INF else "exact")
    return "\n".join(lines)


def _lseries_latex(s: LSeries, hurwitz: bool) -> str:
    parts = []
    v = s.var
    for n, c in s.items():
        if hurwitz and n >= 0:
            coeff = rc.to_latex(c * math.factorial(n))
            mono = v if n == 1 else (f"\\frac{{{v}^{{{n}}}}}{{{n}!}}" if n else "")
        else:
            coeff = rc.to_latex(c)
            mono = "" if n == 0 else (v if n == 1 else f"{v}^{{{n}}}")
        if not mono:
            parts.append(coeff)
        elif coeff == "1":
            parts.append(mono)
        elif coeff == "-1":
            parts.append("-" + mono)
        else:
            parts.append(("\\left(" + coeff + "\\right)" if len(c) > 1 else coeff) + mono)
    body = " + ".join(parts).replace("+ -", "- ") or "0"
    if s.prec != INF:
        body += f" + O({v}^{{{int(s.prec) + 1}}})"
    return body


def _bseries_text(b: BSeries) -> str:
    a, c = b.vars
    lines = [f"{a}^{i} {c}^{j}: {rc.to_text(v)}" for (i, j), v in b.items()]
    lines.append(f"O(deg {int(b.prec) + 1})" if b.prec != INF else "exact")
    return "\n".join(lines)


def _bseries_latex(b: BSeries) -> str:
    a, c = b.vars
    parts = []
    for (i, j), v in b.items():
        mono = "".join(
            s for s in ((a if i == 1 else f"{a}^{{{i}}}") if i else "",
                        (c if j == 1 else f"{c}^{{{j}}}") if j else "") if s)
        coeff = rc.to_latex(v)
        if not mono:
            parts.append(coeff)
        elif coeff == "1":
            parts.append(mono)
        elif coeff == "-1":
            parts.append("-" + mono)
        else:
            parts.append(("\\left(" + coeff + "\\right)" if len(v) > 1 else coeff) + mono)
    return " + ".join(parts).replace("+ -", "- ") or "0"


def series_json(s: LSeries) -> dict:
    return {
        "var": s.var,
        "lo": s.lo if s.coeffs else 0,
        "prec": None if s.prec == INF else int(s.prec),
        "coeffs": {str(n): rc.to_json(c) for n, c in s.items()},
    }


def bseries_json(b: BSeries) -> dict:
    return {
        "vars": list(b.vars),
        "prec": None if b.prec == INF else int(b.prec),
        "terms": [{"i": i, "j": j, "poly": rc.to_json(v)} for (i, j), v in b.items()],
    }


def emit(obj, fmt: str = "text", hurwitz: bool = False) -> str:
    """Canonical rendering of a polynomial, series or PsiPoly."""
    if fmt not in FORMATS:
        raise UsageError(f"unknown format {fmt!r}")
    if rc.is_mupoly(obj):
        if fmt == "json":
            return json.dumps(rc.to_json(obj))
        return rc.to_latex(obj) if fmt == "latex" else rc.to_text(obj)
    if isinstance(obj, LSeries):
        if fmt == "json":
            return json.dumps(series_json(obj))
        return _lseries_latex(obj, hurwitz) if fmt == "latex" else _lseries_text(obj, hurwitz)
    if isinstance(obj, BSeries):
        if fmt == "json":
            return json.dumps(bseries_json(obj))
        return _bseries_latex(obj) if fmt == "latex" else _bseries_text(obj)
    if isinstance(obj, PsiPoly):
        if fmt == "json":
            return json.dumps(obj.to_json())
        return obj.to_latex() if fmt == "latex" else obj.to_text()
    raise TypeError(f"cannot emit {type(obj).__name__}")


def parse_series_json(text: str) -> LSeries:
    data = json.loads(text)
    prec = INF if data["prec"] is None else data["prec"]
    terms = {int(k): rc.from_json(v) for k, v in data["coeffs"].items()}
    return LSeries.from_dict(terms, prec, data["var"])


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def _expand(cfg: RunConfig):
    N = cfg.order
    t = cfg.target or "sigma"
    if t in CURVE_TARGETS:
        kit = CurveKit(cfg.params, N)
        return kit.u_of_t(N) if t == "u" else kit.series(t, N)
    if t in SIGMA_TARGETS:
        kit = SigmaKit(cfg.params, N)
        fn = {"xi": kit.xi_regular, "third_kind": kit.third_kind_correction, "r": kit.r_series,
              "sigma_t": kit.sigma_in_t, "sigma_sq": kit.sigma_sq, "sigma": kit.sigma,
              "wp": kit.wp, "wp_prime": kit.wp_prime}[t]
        return fn(N)
    if t in ("b2", "b4", "b6", "b8", "D"):
        return getattr(invariants_D(cfg.params), t)
    raise UsageError(f"unknown target {t!r}")


def _check(cfg: RunConfig) -> tuple[str, bool]:
    suites = cfg.suites or ("fs", "dup", "inversion", "curve")
    kit = SigmaKit(cfg.params, cfg.order)
    rep = identity_suite(cfg.order, cfg.params, kit, suites)
    lines = rep.lines()
    if "integrality" in suites:
        sg = hurwitz_report(kit.sigma(cfg.order))
        if sg.first_failing is not None:
            lines.append(f"sigma leaves Z[mu]<<u>> at u^{sg.first_failing}/{sg.first_failing}!: "
                         f"monomial {list(sg.witness)} has coefficient {sg.witness_coeff}")
    if cfg.fmt == "json":
        payload = [{"name": r.name, "holds": r.holds, "checked_to": r.checked_to,
                    "first_failure": r.first_failure, "note": r.note} for r in rep.results]
        return json.dumps(payload), rep.ok
    return "\n".join(lines), rep.ok


def execute(cfg: RunConfig) -> tuple[str, int]:
    cap = max_order()
    if cfg.order < 1 or cfg.order > cap:
        raise UsageError(f"--order must lie in 1..{cap}")
    if cfg.command == "expand":
        obj = _expand(cfg)
        return emit(obj, cfg.fmt, hurwitz=cfg.target in HURWITZ_TARGETS), 0
    if cfg.command in ("sigma", "wp"):
        kit = SigmaKit(cfg.params, cfg.order)
        obj = kit.sigma(cfg.order) if cfg.command == "sigma" else kit.wp(cfg.order)
        return emit(obj, cfg.fmt, hurwitz=cfg.command == "sigma"), 0
    if cfg.command == "division":
        n = cfg.n
        if n is None or n < 1:
            raise UsageError("--n must be a positive integer")
        if n * n > cap:
            raise UsageError(f"n^2 exceeds the order cap {cap}")
        poly = classical_oracle(n, cfg.params) if cfg.oracle else psi_poly(n, cfg.params)
        return emit(poly, cfg.fmt), 0
    if cfg.command == "check":
        text, ok = _check(cfg)
        return text, 0 if ok else 1
    raise UsageError(f"unknown command {cfg.command!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sigma-forge",
                                     description="Exact sigma-function expansions for the general Weierstrass curve.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--order", type=int, default=DEFAULT_ORDER)
        p.add_argument("--mu", help="five rationals mu1,mu2,mu3,mu4,mu6 as p/q")
        p.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
        p.add_argument("--output", help="write the result here instead of stdout")

    p = sub.add_parser("expand", help="print one series")
    common(p)
    p.add_argument("--target", default="sigma",
                   choices=CURVE_TARGETS + SIGMA_TARGETS + ("b2", "b4", "b6", "b8", "D"))
    common(sub.add_parser("sigma", help="sigma(u) in Hurwitz form"))
    common(sub.add_parser("wp", help="wp(u)"))
    p = sub.add_parser("division", help="n-plication polynomial")
    common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="use the classical recurrence")
    p = sub.add_parser("check", help="identity and integrality checks")
    common(p)
    p.add_argument("--suite", action="append", choices=SUITES, default=[])
    return parser


def config_from_args(args) -> RunConfig:
    return RunConfig(
        command=args.command,
        order=args.order,
        mu=parse_mu(args.mu) if args.mu else None,
        fmt=args.fmt,
        output=args.output,
        target=getattr(args, "target", None),
        suites=tuple(getattr(args, "suite", ()) or ()),
        n=getattr(args, "n", None),
        oracle=getattr(args, "oracle", False),
    )


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(args)
        text, code = execute(cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"sigma-forge: error: {exc}", file=sys.stderr)
        return 2
    except (SeriesError, ArithmeticError) as exc:
        print(f"sigma-forge: {exc}", file=sys.stderr)
        return 1
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()

"""n-plication polynomials psi_n = sigma(n u) / sigma(u)^(n^2) in x, y.

The series route (``psi_series`` + ``reduce_to_xy``) is checked against the
classical division-polynomial recurrence (``classical_oracle``), which knows
nothing about sigma.  A small chord-tangent group law is included for the
torsion fixtures.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from . import ring_core as rc
from .curve_expansions import SYMBOLIC, CurveParams, CurvePoly, invariants_D
from .ring_core import ONE, ZERO, MuPoly
from .series_engine import INF, LSeries, SeriesError
from .sigma_engine import SigmaKit, sigma_kit


def pole_monomial(k: int) -> tuple[int, int] | None:
    """The unique x^a y^b (b in {0, 1}) with pole order 2a + 3b = k, or None for k = 1."""
    if k < 0:
        raise ValueError("negative pole order")
    if k == 1:
        return None
    b = k % 2
    return ((k - 3 * b) // 2, b)


@dataclass
class PsiPoly:
    """psi_n as a polynomial in x, y of y-degree at most one."""

    n: int
    poly: CurvePoly = field(default_factory=CurvePoly)

    def __post_init__(self):
        if self.poly.y_degree() > 1:
            raise ValueError("PsiPoly must be reduced to y-degree <= 1")

    @property
    def terms(self) -> dict:
        return self.poly.terms

    def coefficient(self, j: int) -> MuPoly:
        """C_j: the coefficient of the monomial with pole order n^2 - 1 - j."""
        top = self.n * self.n - 1
        if not 0 <= j <= top:
            raise ValueError(f"j must lie in 0..{top}")
        mono = pole_monomial(top - j)
        if mono is None:
            return ZERO
        return self.terms.get(mono, ZERO)

    def coefficients(self) -> list[MuPoly]:
        return [self.coefficient(j) for j in range(self.n * self.n)]

    def nonzero_coefficients(self) -> list[MuPoly]:
        return [c for c in self.coefficients() if not c.is_zero()]

    def __neg__(self):
        return PsiPoly(self.n, -self.poly)

    def __eq__(self, other):
        if not isinstance(other, PsiPoly):
            return NotImplemented
        return self.n == other.n and self.poly == other.poly

    __hash__ = None

    def specialize(self, params: CurveParams) -> "PsiPoly":
        return PsiPoly(self.n, self.poly.specialize(params))

    def evaluate(self, x, y, params: CurveParams | None = None) -> Fraction:
        return self.poly.evaluate(x, y, params)

    def to_text(self) -> str:
        return self.poly.to_text()

    def to_latex(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.poly.sorted_terms():
            mono = ("x" if a == 1 else (f"x^{{{a}}}" if a else "")) + ("y" if b else "")
            body = rc.to_latex(c)
            if mono:
                if c == ONE:
                    body = mono
                elif c == -ONE:
                    body = "-" + mono
                else:
                    body = (f"\\left({body}\\right){mono}" if len(c) > 1 else body + mono)
            parts.append(body)
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "terms": [{"x": a, "y": b, "poly": rc.to_json(c)}
                      for (a, b), c in self.poly.sorted_terms()],
        }

    @classmethod
    def from_json(cls, data: dict) -> "PsiPoly":
        terms = {(int(t["x"]), int(t["y"])): rc.from_json(t["poly"]) for t in data["terms"]}
        return cls(int(data["n"]), CurvePoly(terms))


# ---------------------------------------------------------------------------
# series route
# ---------------------------------------------------------------------------

def psi_series(n: int, N: int, params: CurveParams = SYMBOLIC, kit: SigmaKit | None = None) -> LSeries:
    """sigma(n u)/sigma(u)^(n^2) to u^N; the pole has order n^2 - 1."""
    if n < 1:
        raise ValueError("n must be positive")
    kit = kit or sigma_kit(params, N + n * n)
    sig = kit.sigma(N + n * n)
    # sigma(u) = u * unit, so the quotient is n * unit(n u) / unit(u)^(n^2) * u^(1 - n^2)
    unit = sig.shift(-1)
    num = unit.substitute_scale(n).scale(rc.const(n))
    out = (num * unit ** (-(n * n))).shift(1 - n * n)
    if out.prec < N:
        raise SeriesError(f"sigma precision too low for psi_{n} to u^{N}")
    return out.truncate(N)


def _xy_of_u(kit: SigmaKit, N: int):
    return kit.wp(N), kit.y_of_u(N)


def reduce_to_xy(series: LSeries, n: int, params: CurveParams = SYMBOLIC,
                 kit: SigmaKit | None = None) -> PsiPoly:
    """Strip poles greedily with x^a y^b until nothing but O(u) is left.

    Leading terms: x = u^-2 + ..., y = -u^-3 + ..., so x^a y^b starts with
    (-1)^b u^-(2a + 3b).
    """
    top = n * n - 1
    if series.valuation != -top:
        raise SeriesError(f"psi_{n} should have a pole of order {top}, got valuation {series.valuation}")
    if series.prec < 1:
        raise SeriesError("need the series at least to u^1 to certify the remainder")
    kit = kit or sigma_kit(params, int(series.prec) + top)
    # relative precision of x^a y^b is that of x and y, so carry top extra orders
    xs, ys = _xy_of_u(kit, int(series.prec) + top + 3)
    xpow = [LSeries([ONE], 0, INF, "u")]
    for _ in range(top // 2):
        xpow.append(xpow[-1] * xs)
    rem = series
    terms = {}
    for k in range(top, -1, -1):
        c = rem.coeff(-k)
        mono = pole_monomial(k)
        if mono is None:
            if not c.is_zero():
                raise SeriesError(f"u^-1 term {rc.to_text(c)} cannot be matched by any x^a y^b")
            continue
        if c.is_zero():
            continue
        a, b = mono
        coeff = -c if b else c
        terms[mono] = coeff
        basis = xpow[a] * ys if b else xpow[a]
        rem = rem - basis.scale(coeff)
    bad = [(k, c) for k, c in rem.items() if k <= rem.prec and not c.is_zero()]
    if bad:
        k, c = bad[0]
        raise SeriesError(f"nonzero remainder at u^{k}: {rc.to_text(c)}")
    return PsiPoly(n, CurvePoly(terms))


def leading_coefficients(n: int, J: int, params: CurveParams = SYMBOLIC,
                         kit: SigmaKit | None = None) -> list[MuPoly]:
    """C_0, ..., C_J without computing the whole of psi_n.

    The top J + 1 poles of psi_n only involve sigma through u^(J + 1), and
    the matching x^a y^b are only needed to relative order J.
    """
    top = n * n - 1
    J = min(J, top)
    cut = -top + J
    kit = kit or sigma_kit(params, J + 2)
    series = psi_series(n, cut, params, kit)
    xs, ys = kit.wp(J - 2), kit.y_of_u(J - 3)
    out = []
    rem = series
    xpow = {0: LSeries([ONE], 0, INF, "u")}
    for k in range(top, top - J - 1, -1):
        c = rem.coeff(-k)
        mono = pole_monomial(k)
        if mono is None:
            if not c.is_zero():
                raise SeriesError(f"u^-1 term {rc.to_text(c)} cannot be matched by any x^a y^b")
            out.append(ZERO)
            continue
        a, b = mono
        coeff = -c if b else c
        out.append(coeff)
        if c.is_zero():
            continue
        for i in range(1, a + 1):
            if i not in xpow:
                xpow[i] = xpow[i - 1] * xs
        basis = (xpow[a] * ys if b else xpow[a]).truncate(cut)
        rem = rem - basis.scale(coeff)
    return out


def psi_poly(n: int, params: CurveParams = SYMBOLIC, kit: SigmaKit | None = None) -> PsiPoly:
    kit = kit or sigma_kit(params, n * n + 2)
    return reduce_to_xy(psi_series(n, 2, params, kit), n, params, kit)


# ---------------------------------------------------------------------------
# closed formulas for the leading C_j
# ---------------------------------------------------------------------------

def _f(x) -> Fraction:
    return Fraction(x)


def _odd_table(n: int) -> dict[int, dict]:
    n2 = n * n
    A = n * (n2 - 1)
    B = A * (n2 - 9)
    D = B * (n2 - 25)
    E = B * (n2 + 10)
    W = A * (n2 * n2 + n2 + 15)
    return {
        1: {},
        2: {(2, 0, 0, 0, 0): _f(A) / 24, (0, 1, 0, 0, 0): _f(A) / 6},
        3: {},
        4: {(4, 0, 0, 0, 0): _f(B) / 1920, (2, 1, 0, 0, 0): _f(B) / 240,
            (1, 0, 1, 0, 0): _f(A * (n2 + 6)) / 120, (0, 2, 0, 0, 0): _f(B) / 120,
            (0, 0, 0, 1, 0): _f(A * (n2 + 6)) / 60},
        5: {},
        6: {(6, 0, 0, 0, 0): _f(D) / 322560, (4, 1, 0, 0, 0): _f(D) / 26880,
            (3, 0, 1, 0, 0): _f(E) / 6720, (2, 2, 0, 0, 0): _f(D) / 6720,
            (2, 0, 0, 1, 0): _f(E) / 3360, (1, 1, 1, 0, 0): _f(E) / 1680,
            (0, 3, 0, 0, 0): _f(D) / 5040, (0, 1, 0, 1, 0): _f(E) / 840,
            (0, 0, 2, 0, 0): _f(W) / 840, (0, 0, 0, 0, 1): _f(W) / 210},
    }


def _even_table(n: int) -> dict[int, dict]:
    n2 = n * n
    A = n * (n2 - 4)
    B = A * (n2 - 16)
    return {
        1: {(1, 0, 0, 0, 0): _f(-n) / 2},
        2: {(2, 0, 0, 0, 0): _f(-A) / 24, (0, 1, 0, 0, 0): _f(-A) / 6},
        3: {(3, 0, 0, 0, 0): _f(-A) / 48, (1, 1, 0, 0, 0): _f(-A) / 12,
            (0, 0, 1, 0, 0): _f(-n) / 2},
        4: {(4, 0, 0, 0, 0): _f(-B) / 1920, (2, 1, 0, 0, 0): _f(-B) / 240,
            (1, 0, 1, 0, 0): _f(-A * (n2 + 9)) / 120, (0, 2, 0, 0, 0): _f(-B) / 120,
            (0, 0, 0, 1, 0): _f(-A * (n2 + 9)) / 60},
        5: {(5, 0, 0, 0, 0): _f(-B) / 3840, (3, 1, 0, 0, 0): _f(-B) / 480,
            (2, 0, 1, 0, 0): _f(-A * (n2 + 14)) / 240, (1, 2, 0, 0, 0): _f(-B) / 240,
            (1, 0, 0, 1, 0): _f(-A * (n2 + 9)) / 120, (0, 1, 1, 0, 0): _f(-A) / 12},
    }


def cj_formula(n: int, j: int) -> MuPoly:
    """Tabulated closed form of C_j (j <= 6 for odd n, j <= 5 for even n).

    j = 0 gives the leading coefficient.  For even n that is -n: the
    leading term of sigma(n u)/sigma(u)^(n^2) is -n x^((n^2-4)/2) y, as
    n = 2 already shows (sigma(2u)/sigma(u)^4 = -wp').
    """
    if n < 1:
        raise ValueError("n must be positive")
    if j == 0:
        return rc.const(n if n % 2 else -n)
    table = _odd_table(n) if n % 2 else _even_table(n)
    if j not in table:
        raise ValueError(f"C_{j} is not tabulated for {'odd' if n % 2 else 'even'} n")
    return rc.from_terms(table[j])


# ---------------------------------------------------------------------------
# classical recurrence
# ---------------------------------------------------------------------------

def _xpoly_divide(num: dict, den: dict) -> dict:
    """Exact division of polynomials in x with Q[mu] coefficients; den must have a rational leading coefficient."""
    num = {k: v for k, v in num.items() if not v.is_zero()}
    dd = max(den)
    lead = den[dd]
    if not lead.is_constant():
        raise ValueError("divisor must have a constant leading coefficient")
    inv = rc.const(1 / rc.as_rat(lead.leading_coefficient()))
    q = {}
    while num:
        top = max(num)
        if top < dd:
            raise ArithmeticError("division by F2 left a remainder")
        c = num.pop(top) * inv
        q[top - dd] = c
        for e, dc in den.items():
            if e == dd:
                continue
            key = top - dd + e
            val = num.get(key, ZERO) - c * dc
            if val.is_zero():
                num.pop(key, None)
            else:
                num[key] = val
    return q


def classical_oracle(n: int, params: CurveParams = SYMBOLIC) -> PsiPoly:
    """Division polynomial psi_n from the standard recurrence, reduced mod the curve."""
    if n < 1:
        raise ValueError("n must be positive")
    return PsiPoly(n, _classical(params, n))


@lru_cache(maxsize=None)
def _classical(params: CurveParams, n: int) -> CurvePoly:
    inv = invariants_D(params)
    b2, b4, b6, b8 = inv.b2, inv.b4, inv.b6, inv.b8
    m1, _, m3, _, _ = params.gens()
    if n == 1:
        return CurvePoly.constant(1)
    if n == 2:
        return CurvePoly({(0, 1): rc.const(2), (1, 0): m1, (0, 0): m3})
    if n == 3:
        return CurvePoly({(4, 0): rc.const(3), (3, 0): b2, (2, 0): 3 * b4, (1, 0): 3 * b6, (0, 0): b8})
    if n == 4:
        inner = CurvePoly({(6, 0): rc.const(2), (5, 0): b2, (4, 0): 5 * b4, (3, 0): 10 * b6,
                           (2, 0): 10 * b8, (1, 0): b2 * b8 - b4 * b6, (0, 0): b4 * b8 - b6 * b6})
        return (_classical(params, 2) * inner).reduce(params)
    if n % 2:
        m = (n - 1) // 2
        P = lambda k: _classical(params, k)
        return (P(m + 2) * P(m) ** 3 - P(m - 1) * P(m + 1) ** 3).reduce(params)
    m = n // 2
    P = lambda k: _classical(params, k)
    rhs = (P(m) * (P(m + 2) * P(m - 1) ** 2 - P(m - 2) * P(m + 1) ** 2)).reduce(params)
    # psi_2 psi_2m = rhs, and psi_2^2 = F2(x) = 4x^3 + b2 x^2 + 2 b4 x + b6
    prod = (rhs * P(2)).reduce(params)
    F2 = {3: rc.const(4), 2: b2, 1: 2 * b4, 0: b6}
    F2 = {k: v for k, v in F2.items() if not v.is_zero()}
    out = {}
    for b in (0, 1):
        part = {a: c for (a, bb), c in prod.terms.items() if bb == b}
        if part:
            for a, c in _xpoly_divide(part, F2).items():
                out[(a, b)] = c
    return CurvePoly(out)


@dataclass
class OracleComparison:
    n: int
    sign: int | None
    series_poly: PsiPoly
    oracle_poly: PsiPoly

    @property
    def ok(self) -> bool:
        return self.sign is not None


def compare_with_oracle(n: int, params: CurveParams = SYMBOLIC, kit: SigmaKit | None = None) -> OracleComparison:
    """Decide whether the series result equals +oracle, -oracle or neither."""
    series = psi_poly(n, params, kit)
    oracle = classical_oracle(n, params)
    sign = 1 if series == oracle else (-1 if series == -oracle else None)
    return OracleComparison(n, sign, series, oracle)


# ---------------------------------------------------------------------------
# group law plumbing
# ---------------------------------------------------------------------------

class WeierstrassCurve:
    """Affine chord-tangent arithmetic on a numeric general Weierstrass curve; None is O."""

    def __init__(self, params: CurveParams):
        if params.values is None:
            raise ValueError("group law needs numeric coefficients")
        self.params = params
        self.a1, self.a2, self.a3, self.a4, self.a6 = params.values

    def on_curve(self, P) -> bool:
        if P is None:
            return True
        x, y = map(Fraction, P)
        return y * y + (self.a1 * x + self.a3) * y == x ** 3 + self.a2 * x * x + self.a4 * x + self.a6

    def neg(self, P):
        if P is None:
            return None
        x, y = P
        return (x, -y - self.a1 * x - self.a3)

    def add(self, P, Q):
        if P is None:
            return Q
        if Q is None:
            return P
        x1, y1 = map(Fraction, P)
        x2, y2 = map(Fraction, Q)
        if x1 == x2:
            if y1 + y2 + self.a1 * x2 + self.a3 == 0:
                return None
            lam = (3 * x1 * x1 + 2 * self.a2 * x1 + self.a4 - self.a1 * y1) / (2 * y1 + self.a1 * x1 + self.a3)
        else:
            lam = (y2 - y1) / (x2 - x1)
        nu = y1 - lam * x1
        x3 = lam * lam + self.a1 * lam - self.a2 - x1 - x2
        y3 = -(lam + self.a1) * x3 - nu - self.a3
        return (x3, y3)

    def mul(self, k: int, P):
        if k < 0:
            return self.mul(-k, self.neg(P))
        out, base = None, P
        while k:
            if k & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            k >>= 1
        return out

    def order(self, P, limit: int = 64) -> int | None:
        Q = P
        for k in range(1, limit + 1):
            if Q is None:
                return k
            Q = self.add(Q, P)
        return None


@dataclass
class TorsionReport:
    n: int
    point: tuple
    on_curve: bool
    is_n_torsion: bool
    psi_value: Fraction
    order: int | None

    @property
    def consistent(self) -> bool:
        """psi_n(P) = 0 exactly when [n]P = O (P affine)."""
        return self.on_curve and (self.psi_value == 0) == self.is_n_torsion


def torsion_check(n: int, params: CurveParams, point, psi: PsiPoly | None = None) -> TorsionReport:
    curve = WeierstrassCurve(params)
    P = tuple(Fraction(v) for v in point)
    if not curve.on_curve(P):
        raise ValueError(f"{point} is not on the curve")
    psi = psi or psi_poly(n, params)
    value = psi.evaluate(P[0], P[1], params)
    return TorsionReport(n, P, True, curve.mul(n, P) is None, value, curve.order(P))

"""Curve-level expansions at infinity in the local parameter t = -x/y.

Everything here is generated from ``s = 1/x`` via the fixed point

    s = (1 + mu2 s + mu4 s^2 + mu6 s^3) t^2 + (mu1 s + mu3 s^2) t,

after which x, y, the invariant differential, the conjugate parameter t',
q, u(t) and the bivariate unit p(t1, t2) are plain series manipulations.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from . import ring_core as rc
from .ring_core import ONE, ZERO, MuPoly, RatLike
from .series_engine import (
    INF,
    BSeries,
    LSeries,
    SeriesError,
    differentiate,
    diagonal_divide,
    divide_exact,
    integrate_formal,
    invert_unit,
)


@dataclass(frozen=True)
class CurveParams:
    """Coefficients of y^2 + (mu1 x + mu3) y = x^3 + mu2 x^2 + mu4 x + mu6.

    ``values`` is None for the fully symbolic curve, otherwise five rationals.
    """

    values: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.values is not None:
            vals = tuple(rc.as_rat(v) for v in self.values)
            if len(vals) != 5:
                raise ValueError("numeric curves need all five of mu1, mu2, mu3, mu4, mu6")
            object.__setattr__(self, "values", vals)

    @classmethod
    def symbolic(cls) -> "CurveParams":
        return cls(None)

    @classmethod
    def numeric(cls, values: Sequence[RatLike]) -> "CurveParams":
        return cls(tuple(values))

    @property
    def is_symbolic(self) -> bool:
        return self.values is None

    def gens(self) -> tuple[MuPoly, ...]:
        if self.values is None:
            return (rc.MU1, rc.MU2, rc.MU3, rc.MU4, rc.MU6)
        return tuple(rc.const(v) for v in self.values)

    def specialize(self, p: MuPoly) -> MuPoly:
        if self.values is None:
            return p
        return rc.specialize(p, self.values)


SYMBOLIC = CurveParams.symbolic()


# ---------------------------------------------------------------------------
# polynomials in (x, y) over Q[mu]
# ---------------------------------------------------------------------------

class CurvePoly:
    """Polynomial in x, y with Q[mu] coefficients, stored as {(a, b): coeff}."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        for k, c in (terms or {}).items():
            c = c if isinstance(c, type(ONE)) else rc.const(c)
            if not c.is_zero():
                clean[(int(k[0]), int(k[1]))] = c
        self.terms = clean

    @classmethod
    def x(cls):
        return cls({(1, 0): ONE})

    @classmethod
    def y(cls):
        return cls({(0, 1): ONE})

    @classmethod
    def constant(cls, c):
        return cls({(0, 0): c})

    def __add__(self, other):
        if not isinstance(other, CurvePoly):
            other = CurvePoly.constant(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return CurvePoly(out)

    __radd__ = __add__

    def __neg__(self):
        return CurvePoly({k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, CurvePoly):
            other = CurvePoly.constant(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CurvePoly):
            c = other if isinstance(other, type(ONE)) else rc.const(other)
            return CurvePoly({k: v * c for k, v in self.terms.items()})
        out = {}
        for (a, b), c in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (a + a2, b + b2)
                out[k] = out[k] + c * c2 if k in out else c * c2
        return CurvePoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = CurvePoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, CurvePoly):
            return NotImplemented
        return self.terms.keys() == other.terms.keys() and all(
            self.terms[k] == other.terms[k] for k in self.terms)

    __hash__ = None

    def __repr__(self):
        return f"CurvePoly({self.to_text()})"

    def y_degree(self) -> int:
        return max((b for _, b in self.terms), default=0)

    def x_degree(self) -> int:
        return max((a for a, _ in self.terms), default=0)

    def reduce(self, params: CurveParams = SYMBOLIC) -> "CurvePoly":
        """Normal form with y-degree <= 1 using y^2 = -(mu1 x + mu3) y + x^3 + mu2 x^2 + mu4 x + mu6."""
        m1, m2, m3, m4, m6 = params.gens()
        y2 = {(0, 1): -m3, (1, 1): -m1, (3, 0): ONE, (2, 0): m2, (1, 0): m4, (0, 0): m6}
        work = dict(self.terms)
        while True:
            high = [k for k in work if k[1] >= 2]
            if not high:
                break
            b = max(k[1] for k in high)
            for k in [k for k in high if k[1] == b]:
                c = work.pop(k)
                a = k[0]
                for (da, db), cc in y2.items():
                    key = (a + da, b - 2 + db)
                    term = c * cc
                    work[key] = work[key] + term if key in work else term
        return CurvePoly(work)

    def evaluate(self, x, y, params: CurveParams | None = None) -> Fraction:
        """Value at a rational point; coefficients must already be numeric or ``params`` given."""
        total = Fraction(0)
        for (a, b), c in self.terms.items():
            if params is not None and params.values is not None:
                cv = rc.evaluate(c, params.values)
            else:
                if not c.is_constant():
                    raise ValueError("symbolic coefficient; pass numeric params")
                cv = rc.as_rat(c.leading_coefficient()) if not c.is_zero() else Fraction(0)
            total += cv * Fraction(x) ** a * Fraction(y) ** b
        return total

    def on_series(self, x: LSeries, y: LSeries) -> LSeries:
        """Substitute Laurent series for x and y."""
        xp, yp = {0: LSeries([ONE], 0, INF, x.var)}, {0: LSeries([ONE], 0, INF, y.var)}
        total = None
        for (a, b), c in sorted(self.terms.items()):
            for cache, base, e in ((xp, x, a), (yp, y, b)):
                for k in range(1, e + 1):
                    if k not in cache:
                        cache[k] = cache[k - 1] * base
            term = (xp[a] * yp[b]).scale(c)
            total = term if total is None else total + term
        return total if total is not None else LSeries.zero(INF, x.var)

    def specialize(self, params: CurveParams) -> "CurvePoly":
        return CurvePoly({k: params.specialize(c) for k, c in self.terms.items()})

    def sorted_terms(self):
        """Terms by descending pole order 2a + 3b, i.e. in the order x, y dominate at infinity."""
        return sorted(self.terms.items(), key=lambda kv: (-(2 * kv[0][0] + 3 * kv[0][1]), -kv[0][1]))

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for (a, b), c in self.sorted_terms():
            mono = "*".join(p for p in (
                "x" if a == 1 else (f"x^{a}" if a else ""),
                "y" if b == 1 else (f"y^{b}" if b else "")) if p)
            ctext = rc.to_text(c)
            if not mono:
                parts.append(f"({ctext})" if len(c) > 1 else ctext)
            elif c == ONE:
                parts.append(mono)
            elif c == -ONE:
                parts.append("-" + mono)
            else:
                parts.append(f"({ctext})*{mono}" if len(c) > 1 or ctext.startswith("-") and "*" in ctext
                             else f"{ctext}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def curve_f(params: CurveParams = SYMBOLIC) -> CurvePoly:
    """f(x, y) = y^2 + (mu1 x + mu3) y - (x^3 + mu2 x^2 + mu4 x + mu6)."""
    m1, m2, m3, m4, m6 = params.gens()
    return CurvePoly({(0, 2): ONE, (1, 1): m1, (0, 1): m3,
                      (3, 0): -ONE, (2, 0): -m2, (1, 0): -m4, (0, 0): -m6})


def curve_fy(params: CurveParams = SYMBOLIC) -> CurvePoly:
    """f_y = 2y + mu1 x + mu3."""
    m1, _, m3, _, _ = params.gens()
    return CurvePoly({(0, 1): rc.const(2), (1, 0): m1, (0, 0): m3})


def pairing_F(params: CurveParams = SYMBOLIC) -> dict:
    """The numerator F(x, y; z, w) of the fundamental 2-form.

    Returned as {(ex, ey, ez, ew): coeff}.
    """
    m1, m2, m3, m4, m6 = params.gens()
    two = rc.const(2)
    terms = {
        (2, 0, 1, 0): ONE, (1, 0, 2, 0): ONE,           # xz(x + z)
        (1, 0, 1, 0): m1 * m1 + two * m2,                # (mu1^2 + 2 mu2) xz
        (0, 1, 1, 0): m1, (1, 0, 0, 1): m1,              # mu1 (zy + xw)
        (1, 0, 0, 0): m3 * m1 + m4, (0, 0, 1, 0): m3 * m1 + m4,
        (0, 1, 0, 1): two,                               # 2yw
        (0, 1, 0, 0): m3, (0, 0, 0, 1): m3,
        (0, 0, 0, 0): m3 * m3 + two * m6,
    }
    return {k: v for k, v in terms.items() if not v.is_zero()}


def pairing_F_diagonal(params: CurveParams = SYMBOLIC) -> CurvePoly:
    """F(x, y; x, y) as a polynomial in x, y (not yet reduced)."""
    out = CurvePoly()
    for (a, b, c, d), coeff in pairing_F(params).items():
        out = out + CurvePoly({(a + c, b + d): coeff})
    return out


def swap_F(terms: dict) -> dict:
    return {(c, d, a, b): v for (a, b, c, d), v in terms.items()}


@dataclass(frozen=True)
class Invariants:
    b2: MuPoly
    b4: MuPoly
    b6: MuPoly
    b8: MuPoly
    D: MuPoly


def invariants_D(params: CurveParams = SYMBOLIC) -> Invariants:
    m1, m2, m3, m4, m6 = params.gens()
    b2 = m1 * m1 + 4 * m2
    b4 = 2 * m4 + m1 * m3
    b6 = m3 * m3 + 4 * m6
    b8 = m1 * m1 * m6 + 4 * m2 * m6 - m1 * m3 * m4 + m2 * m3 * m3 - m4 * m4
    D = -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6
    return Invariants(b2, b4, b6, b8, D)


# ---------------------------------------------------------------------------
# the expansions
# ---------------------------------------------------------------------------

# weight of the coefficient of t^n is n + shift
WEIGHT_SHIFT = {
    "s": -2, "x": 2, "y": 3, "omega1": 0, "eta1": 2, "tprime": -1,
    "q": 0, "u": -1, "fy": 3, "p": 0,
}


def _t(var="t") -> LSeries:
    return LSeries.monomial(1, 1, var)


def expand_s_raw(params: CurveParams, N: int) -> LSeries:
    """s = 1/x to t^N by iterating the fixed point from s = 0."""
    if N < 2:
        raise ValueError("expand_s needs N >= 2")
    m1, m2, m3, m4, m6 = params.gens()
    s = LSeries.zero(1)  # s = O(t^2)
    for k in range(2, N + 1):
        s_k = s.truncate(k)
        s2 = s_k * s_k
        s3 = s2 * s_k
        quad = (s_k.scale(m2) + s2.scale(m4) + s3.scale(m6) + 1).shift(2)
        lin = (s_k.scale(m1) + s2.scale(m3)).shift(1)
        # each pass gains one certified order
        s = (quad + lin).truncate(k)
        s = LSeries(s.coeffs, s.lo, k, "t")
    return s


class CurveKit:
    """Memoised curve series; every accessor returns a series certified to the requested order."""

    def __init__(self, params: CurveParams = SYMBOLIC, order: int = 12):
        self.params = params
        self._work = 0
        self._cache: dict[str, object] = {}
        self._build(max(order + 6, 8))

    # precision management -------------------------------------------------
    def _build(self, work: int):
        if work <= self._work:
            return
        self._work = work
        P = self.params
        m1, _, m3, _, _ = P.gens()
        s = expand_s_raw(P, work)
        x = invert_unit(s)
        y = -x.shift(-1)
        dxdt = differentiate(x)
        fy = y.scale(2) + x.scale(m1) + m3
        omega = dxdt / fy
        eta = -(x * omega)
        tprime = x / (y + x.scale(m1) + m3)
        q = -(x.shift(1) * tprime)
        u = integrate_formal(omega)
        self._cache = dict(s=s, x=x, y=y, dxdt=dxdt, fy=fy, omega1=omega, eta1=eta,
                           tprime=tprime, q=q, u=u)

    def _series(self, name: str, N: int):
        while True:
            ser = self._cache.get(name)
            if ser is None:
                ser = self._compute(name)
                self._cache[name] = ser
            if ser.prec >= N:
                return ser.truncate(N)
            self._build(self._work + max(N - int(ser.prec), 1))

    def _compute(self, name: str):
        if name == "p":
            return self._expand_p()
        if name == "Q":
            s = self._cache["s"]
            diff = BSeries.from_univariate(s, 2) - BSeries.from_univariate(s, 1)
            # s(t2) - s(t1) = (t1 - t2) * qd, and Q = (s2 - s1)/(t2 - t1) = -qd
            return -diagonal_divide(diff)
        if name == "tprime_minus":
            # t1 - t2'(t2)
            return BSeries.from_univariate(_t(), 1) - BSeries.from_univariate(self._cache["tprime"], 2)
        raise KeyError(name)

    def _expand_p(self) -> BSeries:
        Q = self._series_raw("Q")
        den = self._series_raw("tprime_minus")
        p = divide_exact(Q, den)
        if p.coeff(0, 0) != ONE:
            raise SeriesError("p(0, 0) != 1")
        return p

    def _series_raw(self, name: str):
        ser = self._cache.get(name)
        if ser is None:
            ser = self._compute(name)
            self._cache[name] = ser
        return ser

    @property
    def work_order(self) -> int:
        return self._work

    def ensure(self, work: int):
        self._build(work)

    def raw(self, name: str):
        """Series at the full working precision, whatever that certifies."""
        return self._series_raw(name)

    # public accessors -----------------------------------------------------
    def s(self, N: int) -> LSeries:
        return self._series("s", N)

    def x(self, N: int) -> LSeries:
        return self._series("x", N)

    def y(self, N: int) -> LSeries:
        return self._series("y", N)

    def dxdt(self, N: int) -> LSeries:
        return self._series("dxdt", N)

    def fy(self, N: int) -> LSeries:
        return self._series("fy", N)

    def omega1(self, N: int) -> LSeries:
        return self._series("omega1", N)

    def eta1(self, N: int) -> LSeries:
        return self._series("eta1", N)

    def tprime(self, N: int) -> LSeries:
        return self._series("tprime", N)

    def q(self, N: int) -> LSeries:
        return self._series("q", N)

    def u_of_t(self, N: int) -> LSeries:
        return self._series("u", N)

    def p(self, N: int) -> BSeries:
        return self._series("p", N)

    def Q(self, N: int) -> BSeries:
        """(s(t2) - s(t1)) / (t2 - t1)."""
        return self._series("Q", N)

    def series(self, name: str, N: int):
        return self._series(name, N)


_KITS: dict[CurveParams, CurveKit] = {}


def kit_for(params: CurveParams = SYMBOLIC, order: int = 12) -> CurveKit:
    kit = _KITS.get(params)
    if kit is None:
        kit = _KITS[params] = CurveKit(params, order)
    return kit


def expand_s(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    if N < 2:
        raise ValueError("expand_s needs N >= 2")
    return kit_for(params, N).s(N)


def expand_xy(N: int, params: CurveParams = SYMBOLIC) -> tuple[LSeries, LSeries]:
    kit = kit_for(params, N)
    return kit.x(N), kit.y(N)


def expand_omega1(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    return kit_for(params, N).omega1(N)


def expand_eta1(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    return kit_for(params, N).eta1(N)


def expand_conjugate(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    return kit_for(params, N).tprime(N)


def expand_q(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    return kit_for(params, N).q(N)


def expand_p(N: int, params: CurveParams = SYMBOLIC) -> BSeries:
    return kit_for(params, N).p(N)


def expand_u_of_t(N: int, params: CurveParams = SYMBOLIC) -> LSeries:
    return kit_for(params, N).u_of_t(N)


# ---------------------------------------------------------------------------
# structural checks on the expansions
# ---------------------------------------------------------------------------

def in_product_parameter(s: LSeries, t: LSeries, tp: LSeries) -> LSeries:
    """Rewrite ``s`` as a series in w = t t'; raises if that is impossible.

    w has valuation 2 with leading coefficient -1, so the coefficient of w^k is
    read off from t^(2k) and subtracted; odd powers of t must cancel on the way.
    """
    w = t * tp
    if w.lo != 2 or not w.coeffs[0].is_constant():
        raise SeriesError("t t' must start with a rational multiple of t^2")
    lead = w.coeffs[0].leading_coefficient()
    rem = s
    top = int(s.prec)
    out = {}
    power = LSeries([ONE], 0, INF, s.var)
    k = 0
    while 2 * (k + 1) <= top:
        k += 1
        power = (power * w).truncate(top)
        if rem.coeff(2 * k - 1) != ZERO:
            raise SeriesError(f"odd coefficient t^{2 * k - 1} survives")
        c = rem.coeff(2 * k) * (1 / lead ** k)
        out[k] = c
        rem = rem - power.scale(c)
    if not all(c.is_zero() for _, c in rem.items()):
        raise SeriesError("residual after rewriting in t t'")
    return LSeries.from_dict(out, top // 2, "w")


def conjugate_subring_violations(tp: LSeries) -> list[int]:
    """Exponents of t' whose coefficient involves mu2, mu4 or mu6."""
    bad = []
    for n, c in tp.items():
        if any(e[1] or e[3] or e[4] for e in c.monoms()):
            bad.append(n)
    return bad

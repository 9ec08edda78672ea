"""Truncated Laurent series in one variable and power series in two.

Every series carries its certified precision ``prec``: the highest exponent
(total degree for bivariate series) whose coefficient is known.  Stored
coefficients stop wherever the series stops being nonzero; everything between
the last stored term and ``prec`` is a genuine zero, everything above ``prec``
is unknown.  ``prec`` may be ``math.inf`` for exact polynomials.

Binary operations compute the certified precision of their result from the
precisions and valuations of the operands, so precision loss is never silent.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import flint

from .ring_core import (
    MU_CTX,
    ONE,
    ZERO,
    Integrality,
    MuPoly,
    as_rat,
    integrality_class,
    is_homogeneous_of_weight,
    to_fmpq,
)

INF = math.inf


class SeriesError(ValueError):
    """A precondition of a series operation does not hold."""


class PrecisionError(SeriesError):
    """A coefficient beyond the certified precision was requested."""


def _scalar(c) -> MuPoly:
    if isinstance(c, flint.fmpq_mpoly):
        return c
    return MU_CTX.constant(to_fmpq(c))


def _dot(pairs: Iterable[tuple[MuPoly, MuPoly]]) -> MuPoly:
    acc = None
    for x, y in pairs:
        prod = x * y
        if acc is None:
            acc = prod
        else:
            acc.iadd(prod)
    return ZERO if acc is None else acc


# ---------------------------------------------------------------------------
# univariate
# ---------------------------------------------------------------------------

class LSeries:
    """Truncated Laurent series ``sum c_n var^n + O(var^(prec+1))``."""

    __slots__ = ("var", "lo", "coeffs", "prec")

    def __init__(self, coeffs: Sequence, lo: int = 0, prec=INF, var: str = "t"):
        cs = [_scalar(c) for c in coeffs]
        if prec != INF:
            prec = int(prec)
            keep = prec - lo + 1
            if keep < len(cs):
                cs = cs[:max(keep, 0)]
        start = 0
        while start < len(cs) and cs[start].is_zero():
            start += 1
        end = len(cs)
        while end > start and cs[end - 1].is_zero():
            end -= 1
        self.coeffs = tuple(cs[start:end])
        self.lo = lo + start if self.coeffs else 0
        self.prec = prec
        self.var = var

    # construction helpers
    @classmethod
    def from_dict(cls, terms: dict, prec=INF, var: str = "t") -> "LSeries":
        if not terms:
            return cls([], 0, prec, var)
        lo, hi = min(terms), max(terms)
        return cls([terms.get(n, ZERO) for n in range(lo, hi + 1)], lo, prec, var)

    @classmethod
    def monomial(cls, n: int, c=1, var: str = "t") -> "LSeries":
        return cls([c], n, INF, var)

    @classmethod
    def zero(cls, prec=INF, var: str = "t") -> "LSeries":
        return cls([], 0, prec, var)

    # inspection
    @property
    def hi(self) -> int:
        return self.lo + len(self.coeffs) - 1

    @property
    def valuation(self):
        if self.coeffs:
            return self.lo
        return self.prec + 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> MuPoly:
        if n > self.prec:
            raise PrecisionError(f"coefficient of {self.var}^{n} beyond precision {self.prec}")
        k = n - self.lo
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def __getitem__(self, n: int) -> MuPoly:
        return self.coeff(n)

    def items(self):
        for k, c in enumerate(self.coeffs):
            if not c.is_zero():
                yield self.lo + k, c

    def dense(self, start: int, stop: int) -> list:
        """Coefficients for exponents ``start..stop`` inclusive."""
        return [self.coeff(n) for n in range(start, stop + 1)]

    def __repr__(self):
        body = ", ".join(f"{n}: {c}" for n, c in self.items())
        return f"LSeries({self.var}; {{{body}}}; prec={self.prec})"

    # structural equality: same variable, same precision, same coefficients
    def __eq__(self, other):
        if not isinstance(other, LSeries):
            return NotImplemented
        return (self.var == other.var and self.prec == other.prec
                and self.lo == other.lo and len(self.coeffs) == len(other.coeffs)
                and all(a == b for a, b in zip(self.coeffs, other.coeffs)))

    __hash__ = None

    def first_difference(self, other: "LSeries", upto=None):
        """Lowest exponent where two series differ within common precision."""
        _check_var(self, other)
        top = min(self.prec, other.prec)
        if upto is not None:
            top = min(top, upto)
        if top == INF:
            top = max(self.hi, other.hi)
        start = min(self.lo if self.coeffs else top + 1, other.lo if other.coeffs else top + 1)
        for n in range(start, int(top) + 1):
            if self.coeff(n) != other.coeff(n):
                return n
        return None

    def agrees_with(self, other: "LSeries", upto=None) -> bool:
        return self.first_difference(other, upto) is None

    # basic transforms
    def truncate(self, n) -> "LSeries":
        return LSeries(self.coeffs, self.lo, min(self.prec, n), self.var)

    def with_var(self, var: str) -> "LSeries":
        return LSeries(self.coeffs, self.lo, self.prec, var)

    def shift(self, k: int) -> "LSeries":
        """Multiply by ``var**k``."""
        return LSeries(self.coeffs, self.lo + k, self.prec + k, self.var)

    def map_coeffs(self, fn: Callable[[MuPoly], MuPoly]) -> "LSeries":
        return LSeries([fn(c) for c in self.coeffs], self.lo, self.prec, self.var)

    def scale(self, c) -> "LSeries":
        c = _scalar(c)
        return self.map_coeffs(lambda x: x * c)

    def principal_part(self) -> "LSeries":
        return LSeries.from_dict({n: c for n, c in self.items() if n < 0}, INF, self.var)

    def regular_part(self) -> "LSeries":
        return LSeries.from_dict({n: c for n, c in self.items() if n >= 0}, self.prec, self.var)

    def substitute_scale(self, k) -> "LSeries":
        """The series in ``k*var``: coefficient of var^n multiplied by k^n."""
        k = as_rat(k)
        return LSeries.from_dict({n: c * to_fmpq(k ** n) for n, c in self.items()},
                                 self.prec, self.var)

    # arithmetic
    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __add__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries([other], 0, INF, self.var)
        _check_var(self, other)
        prec = min(self.prec, other.prec)
        terms = {}
        for n, c in self.items():
            terms[n] = c
        for n, c in other.items():
            terms[n] = terms[n] + c if n in terms else c
        if prec != INF:
            terms = {n: c for n, c in terms.items() if n <= prec}
        return LSeries.from_dict(terms, prec, self.var)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LSeries):
            other = LSeries([other], 0, INF, self.var)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, LSeries):
            return self.scale(other)
        _check_var(self, other)
        va, vb = self.valuation, other.valuation
        prec = min(self.prec + vb, other.prec + va)
        if self.is_zero() or other.is_zero():
            return LSeries.zero(prec, self.var)
        lo = self.lo + other.lo
        a, b = self.coeffs, other.coeffs
        nat = len(a) + len(b) - 1
        count = nat if prec == INF else min(nat, int(prec) - lo + 1)
        out = []
        la, lb = len(a), len(b)
        for k in range(max(count, 0)):
            i0 = max(0, k - lb + 1)
            i1 = min(k, la - 1)
            out.append(_dot((a[i], b[k - i]) for i in range(i0, i1 + 1)))
        return LSeries(out, lo, prec, self.var)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, LSeries):
            return self * invert_unit(other)
        if isinstance(other, flint.fmpq_mpoly):
            if not _is_unit_constant(other):
                raise SeriesError("can only divide by a nonzero rational")
            other = other.leading_coefficient()
        return self.scale(1 / as_rat(other))

    def __pow__(self, k: int):
        if k < 0:
            return invert_unit(self) ** (-k)
        result = LSeries([ONE], 0, INF, self.var)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result


def _check_var(a, b):
    if a.var != b.var:
        raise SeriesError(f"mixing series in {a.var!r} and {b.var!r}")


def variable(var: str = "t") -> LSeries:
    return LSeries.monomial(1, 1, var)


def series_arith(a, b, op: str):
    """``op`` in {"add", "sub", "mul"} for two LSeries or two BSeries."""
    if type(a) is not type(b):
        raise SeriesError("operands must be of the same series kind")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


def _is_unit_constant(p: MuPoly) -> bool:
    return p.is_constant() and not p.is_zero()


def invert_unit(a: LSeries, prec=None) -> LSeries:
    """Multiplicative inverse of a series whose leading coefficient is a nonzero rational.

    ``prec`` caps the result; it is required when ``a`` is an exact polynomial
    that is not a monomial.
    """
    if a.is_zero():
        raise SeriesError("cannot invert the zero series")
    c0 = a.coeffs[0]
    if not _is_unit_constant(c0):
        raise SeriesError(f"leading coefficient {c0} is not a unit of Q[mu]")
    v = a.lo
    out_prec = a.prec - 2 * v
    if prec is not None:
        out_prec = min(out_prec, prec)
    if out_prec == INF:
        if len(a.coeffs) == 1:
            return LSeries([1 / c0.leading_coefficient() * ONE], -v, INF, a.var)
        raise SeriesError("inverse of an exact non-monomial needs an explicit precision")
    n_rel = int(out_prec) + v  # relative precision
    inv0 = MU_CTX.constant(1 / c0.leading_coefficient())
    ac = a.coeffs
    b = [inv0]
    for k in range(1, n_rel + 1):
        s = _dot((ac[j], b[k - j]) for j in range(1, min(k, len(ac) - 1) + 1))
        b.append(-(s * inv0))
    return LSeries(b, -v, out_prec, a.var)


def compose(outer: LSeries, inner: LSeries, prec=None) -> LSeries:
    """Formal substitution ``outer(inner(var))``; the result lives in ``inner.var``.

    ``inner`` must have strictly positive valuation.  Negative powers of the
    outer variable need ``inner`` to have a unit leading coefficient.
    """
    if inner.is_zero() or inner.valuation <= 0:
        raise SeriesError("inner series must have positive valuation")
    v = inner.lo
    target = outer.prec if outer.prec == INF else v * (outer.prec + 1) - 1
    nz = [n for n, _ in outer.items() if n != 0]
    if nz:
        target = min(target, min(nz) * v + inner.prec - v)
    if prec is not None:
        target = min(target, prec)
    if target == INF and outer.lo < 0 and len(inner.coeffs) > 1:
        raise SeriesError("composition with poles needs an explicit precision")
    var = inner.var

    def cut(s):
        return s if target == INF else s.truncate(target)

    result = LSeries([outer.coeff(0)] if outer.prec >= 0 else [], 0, target, var)
    # positive part from explicit powers: the coefficients of inner^n are
    # light compared with those of outer, which keeps the products cheap
    pos = [(n, c) for n, c in outer.items() if n > 0]
    if pos:
        if target == INF:
            top_out = pos[-1][0] * (inner.hi if inner.coeffs else 0)
        else:
            top_out = int(target)
        sums: dict[int, list] = {}
        power = None
        for n in range(1, pos[-1][0] + 1):
            power = inner if power is None else cut(power * inner)
            if n * v > top_out:
                break
            c = outer.coeff(n)
            if c.is_zero():
                continue
            for k, pc in power.items():
                if k > top_out:
                    break
                sums.setdefault(k, []).append((c, pc))
        acc = LSeries.from_dict({k: _dot(pairs) for k, pairs in sums.items()}, INF, var)
        result = result + acc
    neg = [(n, c) for n, c in outer.items() if n < 0]
    if neg:
        cap = target + v
        j = invert_unit(inner, prec=cap)
        power = j
        for m in range(1, -neg[0][0] + 1):
            if m > 1:
                power = (power.truncate(cap) if cap != INF else power) * j
            c = outer.coeff(-m)
            if not c.is_zero():
                result = result + cut(power.scale(c))
    return cut(result)


def revert(a: LSeries, prec=None, var: str = "u") -> LSeries:
    """Compositional inverse of ``a = t + O(t^2)``, solved order by order.

    With ``b = u + sum_{n>=2} beta_n u^n`` the coefficient of ``u^n`` in
    ``a(b(u))`` is ``beta_n`` plus terms in lower ``beta``; the powers ``b^j``
    are extended one coefficient per step so each ``beta_n`` is read off
    directly.
    """
    if a.is_zero() or a.lo != 1 or a.coeffs[0] != ONE:
        raise SeriesError("reversion needs a series of the form t + O(t^2)")
    top = a.prec if prec is None else min(a.prec, prec)
    if top == INF:
        raise SeriesError("reversion of an exact polynomial needs an explicit precision")
    top = int(top)
    ac = {n: c for n, c in a.items()}
    beta = {1: ONE}
    # powers[j][n] = coefficient of u^n in b^j
    powers = {1: {1: ONE}}
    for n in range(2, top + 1):
        for j in range(2, n + 1):
            row = powers.setdefault(j, {j: ONE} if j == 2 else {})
            if j == n:
                row[n] = ONE
                continue
            prev = powers[j - 1]
            row[n] = _dot((beta[m], prev[n - m]) for m in range(1, n - j + 2)
                          if not beta[m].is_zero() and (n - m) in prev)
        s = _dot((ac[j], powers[j][n]) for j in range(2, n + 1) if j in ac)
        beta[n] = -s
        powers[1][n] = beta[n]
    return LSeries([beta[n] for n in range(1, top + 1)], 1, top, var)


def differentiate(a: LSeries) -> LSeries:
    terms = {n - 1: c * n for n, c in a.items() if n != 0}
    return LSeries.from_dict(terms, a.prec - 1, a.var)


def integrate_formal(a: LSeries) -> LSeries:
    """Term-wise antiderivative with zero constant; a t^-1 term is refused."""
    if a.prec >= -1 and not a.coeff(-1).is_zero():
        raise SeriesError("cannot integrate a var^-1 term formally")
    if a.prec < -1:
        raise PrecisionError("the var^-1 coefficient is not certified")
    terms = {n + 1: c * to_fmpq(Fraction(1, n + 1)) for n, c in a.items()}
    return LSeries.from_dict(terms, a.prec + 1, a.var)


def _graded_prec(a, prec):
    top = a.prec if prec is None else min(a.prec, prec)
    if top == INF:
        raise SeriesError("an explicit precision is required for an exact input")
    return int(top)


def exp_series(a, prec=None):
    """exp of a series with zero constant term (LSeries or BSeries)."""
    if isinstance(a, BSeries):
        return a.exp(prec)
    if not a.is_zero() and a.lo < 1:
        raise SeriesError("exp_series needs a series with zero constant term")
    top = _graded_prec(a, prec)
    ak = [a.coeff(k) for k in range(top + 1)]
    e = [ONE]
    for n in range(1, top + 1):
        s = _dot((ak[k] * k, e[n - k]) for k in range(1, n + 1) if not ak[k].is_zero())
        e.append(s * to_fmpq(Fraction(1, n)))
    return LSeries(e, 0, top, a.var)


def log_series(a, prec=None):
    """log of a series with constant term 1 (LSeries or BSeries)."""
    if isinstance(a, BSeries):
        return a.log(prec)
    if a.is_zero() or a.lo != 0 or a.coeffs[0] != ONE:
        raise SeriesError("log_series needs a series with constant term 1")
    top = _graded_prec(a, prec)
    ak = [a.coeff(k) for k in range(top + 1)]
    lg = [ZERO]
    for n in range(1, top + 1):
        s = _dot((lg[k] * k, ak[n - k]) for k in range(1, n) if not lg[k].is_zero())
        lg.append(ak[n] - s * to_fmpq(Fraction(1, n)))
    return LSeries(lg, 0, top, a.var)


def sqrt_hurwitz(h: LSeries, prec=None) -> LSeries:
    """The square root with constant term 1 of ``h = 1 + ...``.

    When the Hurwitz coefficients of ``h - 1`` are all even over a ring A, the
    Hurwitz coefficients of the root lie in A as well.
    """
    if h.is_zero() or h.lo != 0 or h.coeffs[0] != ONE:
        raise SeriesError("sqrt_hurwitz needs a series with constant term 1")
    top = _graded_prec(h, prec)
    half = to_fmpq(Fraction(1, 2))
    phi = [ONE]
    for n in range(1, top + 1):
        s = _dot((phi[k], phi[n - k]) for k in range(1, n))
        phi.append((h.coeff(n) - s) * half)
    return LSeries(phi, 0, top, h.var)


@dataclass
class HurwitzReport:
    classes: list = field(default_factory=list)
    overall: Integrality = Integrality.Z_MU
    first_failing: int | None = None
    witness: tuple | None = None
    witness_coeff: Fraction | None = None

    @property
    def order(self) -> int:
        return len(self.classes) - 1


def hurwitz_coefficient(a: LSeries, n: int) -> MuPoly:
    """n! times the coefficient of var^n."""
    return a.coeff(n) * math.factorial(n)


def hurwitz_report(a: LSeries, upto=None) -> HurwitzReport:
    """Classify every Hurwitz coefficient ``n! a_n`` of a power series.

    ``first_failing`` is the first index not in Z[mu]; its witness monomial
    shows why.
    """
    if not a.is_zero() and a.lo < 0:
        raise SeriesError("hurwitz_report needs a series without principal part")
    top = _graded_prec(a, upto)
    report = HurwitzReport()
    for n in range(top + 1):
        res = integrality_class(hurwitz_coefficient(a, n))
        report.classes.append(res.cls)
        if res.cls != Integrality.Z_MU and report.first_failing is None:
            report.first_failing = n
            report.witness = res.witness
            report.witness_coeff = res.coeff
        report.overall = min(report.overall, res.cls)
    return report


def weight_violation(a: LSeries, shift: int):
    """First exponent whose coefficient is not of weight ``n + shift``, else None."""
    for n, c in a.items():
        if not is_homogeneous_of_weight(c, n + shift):
            return n
    return None


# ---------------------------------------------------------------------------
# binary forms (homogeneous components of bivariate series)
#   f[i] is the coefficient of t1^i t2^(d-i)
# ---------------------------------------------------------------------------

def _form_mul(f: Sequence[MuPoly], g: Sequence[MuPoly]) -> list:
    fn = [(i, c) for i, c in enumerate(f) if not c.is_zero()]
    gn = [(j, c) for j, c in enumerate(g) if not c.is_zero()]
    out = [None] * (len(f) + len(g) - 1)
    for i, a in fn:
        for j, b in gn:
            prod = a * b
            k = i + j
            if out[k] is None:
                out[k] = prod
            else:
                out[k].iadd(prod)
    return [ZERO if c is None else c for c in out]


def _form_add_into(acc: list, f: Sequence[MuPoly], sign: int = 1):
    for i, c in enumerate(f):
        if c.is_zero():
            continue
        if acc[i] is ZERO:
            acc[i] = c if sign > 0 else -c
        else:
            acc[i] = acc[i] + c if sign > 0 else acc[i] - c


def _form_is_zero(f) -> bool:
    return all(c.is_zero() for c in f)


def _form_divide(g: Sequence[MuPoly], den: Sequence[MuPoly]) -> list:
    """Exact quotient of binary forms ``g / den``; raises if not exact.

    Works on the dehomogenised polynomials in t1 (t2 = 1): strips the power of
    t1 dividing ``den``, then divides from the bottom, which needs the lowest
    remaining coefficient of ``den`` to be a nonzero rational.
    """
    dg, dd = len(g) - 1, len(den) - 1
    if dg < dd:
        if _form_is_zero(g):
            return [ZERO] * max(dg - dd + 1, 0)
        raise SeriesError("form degree too small for exact division")
    a = 0
    while a <= dd and den[a].is_zero():
        a += 1
    if a > dd:
        raise SeriesError("division by the zero form")
    lead = den[a]
    if not _is_unit_constant(lead):
        raise SeriesError("lowest coefficient of divisor form is not a unit")
    inv = MU_CTX.constant(1 / lead.leading_coefficient())
    rest = [(k, den[a + k]) for k in range(1, dd - a + 1) if not den[a + k].is_zero()]
    nq = dg - dd + 1
    q = []
    for j in range(nq):
        s = g[j + a]
        for k, c in rest:
            if k <= j:
                s = s - c * q[j - k]
        q.append(s * inv)
    check = _form_mul(den, q)
    if any(x != y for x, y in zip(check, g)):
        raise SeriesError("binary form division is not exact")
    return q


# ---------------------------------------------------------------------------
# bivariate
# ---------------------------------------------------------------------------

class BSeries:
    """Power series in (t1, t2) certified through total degree ``prec``.

    ``comps[d][i]`` is the coefficient of ``t1^i t2^(d-i)``.
    """

    __slots__ = ("comps", "prec", "vars")

    def __init__(self, comps: Sequence[Sequence], prec=INF, vars=("t1", "t2")):
        cs = [[_scalar(c) for c in f] for f in comps]
        for d, f in enumerate(cs):
            if len(f) != d + 1:
                raise ValueError(f"component {d} must have {d + 1} coefficients")
        if prec != INF:
            prec = int(prec)
            cs = cs[:max(prec + 1, 0)]
        while cs and _form_is_zero(cs[-1]):
            cs.pop()
        self.comps = cs
        self.prec = prec
        self.vars = tuple(vars)

    @classmethod
    def from_dict(cls, terms: dict, prec=INF, vars=("t1", "t2")) -> "BSeries":
        top = max((i + j for i, j in terms), default=-1)
        comps = [[ZERO] * (d + 1) for d in range(top + 1)]
        for (i, j), c in terms.items():
            comps[i + j][i] = _scalar(c)
        return cls(comps, prec, vars)

    @classmethod
    def zero(cls, prec=INF, vars=("t1", "t2")) -> "BSeries":
        return cls([], prec, vars)

    @classmethod
    def one(cls, vars=("t1", "t2")) -> "BSeries":
        return cls([[ONE]], INF, vars)

    @classmethod
    def from_univariate(cls, f: LSeries, slot: int, vars=("t1", "t2")) -> "BSeries":
        """Embed a power series in t as a series in t1 (slot 1) or t2 (slot 2)."""
        if not f.is_zero() and f.lo < 0:
            raise SeriesError("cannot embed a Laurent series with poles")
        top = f.hi if f.coeffs else -1
        comps = []
        for d in range(top + 1):
            form = [ZERO] * (d + 1)
            form[d if slot == 1 else 0] = f.coeff(d)
            comps.append(form)
        return cls(comps, f.prec, vars)

    @classmethod
    def outer(cls, f: LSeries, g: LSeries, vars=("t1", "t2")) -> "BSeries":
        """``f(t1) * g(t2)`` for two power series."""
        for s in (f, g):
            if not s.is_zero() and s.lo < 0:
                raise SeriesError("outer product needs power series")
        vf, vg = f.valuation, g.valuation
        prec = min(f.prec + vg, g.prec + vf)
        if f.is_zero() or g.is_zero():
            return cls.zero(prec, vars)
        top = f.hi + g.hi if prec == INF else min(int(prec), f.hi + g.hi)
        comps = [[ZERO] * (d + 1) for d in range(top + 1)]
        for i, a in f.items():
            for j, b in g.items():
                if i + j <= top:
                    comps[i + j][i] = a * b
        return cls(comps, prec, vars)

    # inspection
    @property
    def valuation(self):
        for d, f in enumerate(self.comps):
            if not _form_is_zero(f):
                return d
        return self.prec + 1

    def is_zero(self) -> bool:
        return not self.comps

    def coeff(self, i: int, j: int) -> MuPoly:
        d = i + j
        if d > self.prec:
            raise PrecisionError(f"coefficient of t1^{i} t2^{j} beyond precision {self.prec}")
        if d < len(self.comps):
            return self.comps[d][i]
        return ZERO

    def __getitem__(self, ij) -> MuPoly:
        return self.coeff(*ij)

    def form(self, d: int) -> list:
        if d > self.prec:
            raise PrecisionError(f"degree {d} beyond precision {self.prec}")
        if d < len(self.comps):
            return self.comps[d]
        return [ZERO] * (d + 1)

    def items(self):
        for d, f in enumerate(self.comps):
            for i, c in enumerate(f):
                if not c.is_zero():
                    yield (i, d - i), c

    def __repr__(self):
        body = ", ".join(f"{k}: {c}" for k, c in self.items())
        return f"BSeries({{{body}}}; prec={self.prec})"

    def __eq__(self, other):
        if not isinstance(other, BSeries):
            return NotImplemented
        if self.prec != other.prec or len(self.comps) != len(other.comps):
            return False
        return all(a == b for f, g in zip(self.comps, other.comps) for a, b in zip(f, g))

    __hash__ = None

    def first_difference(self, other: "BSeries", upto=None):
        top = min(self.prec, other.prec)
        if upto is not None:
            top = min(top, upto)
        if top == INF:
            top = max(len(self.comps), len(other.comps)) - 1
        for d in range(int(top) + 1):
            f, g = self.form(d), other.form(d)
            for i in range(d + 1):
                if f[i] != g[i]:
                    return (i, d - i)
        return None

    def agrees_with(self, other, upto=None) -> bool:
        return self.first_difference(other, upto) is None

    # transforms
    def truncate(self, n) -> "BSeries":
        return BSeries(self.comps, min(self.prec, n), self.vars)

    def map_coeffs(self, fn) -> "BSeries":
        return BSeries([[fn(c) for c in f] for f in self.comps], self.prec, self.vars)

    def scale(self, c) -> "BSeries":
        c = _scalar(c)
        return self.map_coeffs(lambda x: x * c)

    def swap(self) -> "BSeries":
        """Exchange t1 and t2."""
        return BSeries([list(reversed(f)) for f in self.comps], self.prec, self.vars)

    def restrict(self, slot: int, var: str = "t") -> LSeries:
        """Set the *other* variable to zero: slot 1 keeps t1, slot 2 keeps t2."""
        coeffs = [f[d] if slot == 1 else f[0] for d, f in enumerate(self.comps)]
        return LSeries(coeffs, 0, self.prec, var)

    def diagonal(self, var: str = "t") -> LSeries:
        """The series in t obtained by t1 = t2 = t."""
        coeffs = []
        for f in self.comps:
            acc = ZERO
            for c in f:
                if not c.is_zero():
                    acc = acc + c
            coeffs.append(acc)
        return LSeries(coeffs, 0, self.prec, var)

    def monomial_shift(self, a: int, b: int) -> "BSeries":
        """Multiply by t1^a t2^b."""
        comps = [[ZERO] * (d + 1) for d in range(len(self.comps) + a + b)]
        for (i, j), c in self.items():
            comps[i + j + a + b][i + a] = c
        return BSeries(comps, self.prec + a + b, self.vars)

    # arithmetic
    def __neg__(self):
        return self.map_coeffs(lambda c: -c)

    def __add__(self, other):
        if not isinstance(other, BSeries):
            other = BSeries([[other]], INF, self.vars)
        prec = min(self.prec, other.prec)
        n = max(len(self.comps), len(other.comps))
        if prec != INF:
            n = min(n, int(prec) + 1)
        comps = []
        for d in range(n):
            acc = list(self.comps[d]) if d < len(self.comps) else [ZERO] * (d + 1)
            if d < len(other.comps):
                _form_add_into(acc, other.comps[d])
            comps.append(acc)
        return BSeries(comps, prec, self.vars)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, BSeries):
            other = BSeries([[other]], INF, self.vars)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BSeries):
            return self.scale(other)
        va, vb = self.valuation, other.valuation
        prec = min(self.prec + vb, other.prec + va)
        if self.is_zero() or other.is_zero():
            return BSeries.zero(prec, self.vars)
        nat = len(self.comps) + len(other.comps) - 1
        n = nat if prec == INF else min(nat, int(prec) + 1)
        a, b = self.comps, other.comps
        comps = []
        for d in range(n):
            acc = [ZERO] * (d + 1)
            for k in range(max(0, d - len(b) + 1), min(d, len(a) - 1) + 1):
                if _form_is_zero(a[k]) or _form_is_zero(b[d - k]):
                    continue
                _form_add_into(acc, _form_mul(a[k], b[d - k]))
            comps.append(acc)
        return BSeries(comps, prec, self.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise SeriesError("negative powers of bivariate series are not supported")
        result = BSeries.one(self.vars)
        for _ in range(k):
            result = result * self
        return result

    # calculus
    def integrate(self, slot: int) -> "BSeries":
        """Antiderivative in t1 (slot 1) or t2 (slot 2), zero on that axis."""
        terms = {}
        for (i, j), c in self.items():
            if slot == 1:
                terms[(i + 1, j)] = c * to_fmpq(Fraction(1, i + 1))
            else:
                terms[(i, j + 1)] = c * to_fmpq(Fraction(1, j + 1))
        return BSeries.from_dict(terms, self.prec + 1, self.vars)

    def differentiate(self, slot: int) -> "BSeries":
        terms = {}
        for (i, j), c in self.items():
            if slot == 1 and i:
                terms[(i - 1, j)] = c * i
            elif slot == 2 and j:
                terms[(i, j - 1)] = c * j
        return BSeries.from_dict(terms, self.prec - 1, self.vars)

    def _graded_top(self, prec):
        top = self.prec if prec is None else min(self.prec, prec)
        if top == INF:
            raise SeriesError("an explicit precision is required for an exact input")
        return int(top)

    def exp(self, prec=None) -> "BSeries":
        """exp via the Euler operator: d E_d = sum_k k a_k E_(d-k)."""
        if self.comps and not _form_is_zero(self.comps[0]):
            raise SeriesError("exp_series needs a series with zero constant term")
        top = self._graded_top(prec)
        a = [self.form(d) for d in range(top + 1)]
        e = [[ONE]]
        for d in range(1, top + 1):
            acc = [ZERO] * (d + 1)
            for k in range(1, d + 1):
                if _form_is_zero(a[k]) or _form_is_zero(e[d - k]):
                    continue
                _form_add_into(acc, [c * k for c in _form_mul(a[k], e[d - k])])
            inv = to_fmpq(Fraction(1, d))
            e.append([c * inv for c in acc])
        return BSeries(e, top, self.vars)

    def log(self, prec=None) -> "BSeries":
        if not self.comps or self.comps[0][0] != ONE:
            raise SeriesError("log_series needs a series with constant term 1")
        top = self._graded_top(prec)
        a = [self.form(d) for d in range(top + 1)]
        lg = [[ZERO]]
        for d in range(1, top + 1):
            acc = [c * d for c in a[d]]
            for k in range(1, d):
                if _form_is_zero(lg[k]) or _form_is_zero(a[d - k]):
                    continue
                _form_add_into(acc, [c * k for c in _form_mul(lg[k], a[d - k])], -1)
            inv = to_fmpq(Fraction(1, d))
            lg.append([c * inv for c in acc])
        return BSeries(lg, top, self.vars)


def diagonal_divide(g: BSeries) -> BSeries:
    """The quotient ``q`` with ``g = (t1 - t2) q``; ``g`` must vanish on t1 = t2.

    Component-wise: the coefficient of t1^i t2^(d-i) in (t1 - t2) q is
    q_(i-1) - q_i, so q is a running sum whose final value must vanish.
    """
    comps = []
    for d, f in enumerate(g.comps):
        if d == 0:
            if not f[0].is_zero():
                raise SeriesError("series does not vanish on the diagonal (degree 0)")
            continue
        q = []
        run = ZERO
        for i in range(d):
            run = run - f[i]
            q.append(run)
        if run != f[d]:
            raise SeriesError(f"series does not vanish on the diagonal (degree {d})")
        comps.append(q)
    return BSeries(comps, g.prec - 1, g.vars)


def divide_exact(num: BSeries, den: BSeries) -> BSeries:
    """Exact quotient ``num / den`` when ``den`` need not be a unit.

    The lowest nonzero form L of ``den`` (degree m) drives an order-by-order
    solve: L * q_d = num_(d+m) - sum_(k>m) den_k q_(d+m-k), each step an exact
    binary-form division that raises if a remainder appears.
    """
    m = den.valuation
    if m == INF or (den.prec != INF and m > den.prec):
        raise SeriesError("division by a series with no certified nonzero term")
    for d in range(min(m, len(num.comps))):
        if not _form_is_zero(num.comps[d]):
            raise SeriesError(f"numerator has a nonzero form of degree {d} < {m}")
    prec = min(num.prec, den.prec) - m
    if prec == INF:
        raise SeriesError("exact division of exact polynomials needs a precision cap")
    top = int(prec)
    lead = den.comps[m]
    dforms = [den.form(m + k) for k in range(top + 1)]
    q = []
    for d in range(top + 1):
        rhs = list(num.form(d + m))
        for k in range(1, d + 1):
            if k >= len(dforms):
                break
            dk = dforms[k]
            if _form_is_zero(dk) or _form_is_zero(q[d - k]):
                continue
            _form_add_into(rhs, _form_mul(dk, q[d - k]), -1)
        q.append(_form_divide(rhs, lead))
    return BSeries(q, prec, num.vars)


def substitute(b: BSeries, f: LSeries, g: LSeries, vars=("t1", "t2")) -> BSeries:
    """``b(f(t1), g(t2))`` for power series f, g of positive valuation."""
    for s in (f, g):
        if s.is_zero() or s.valuation < 1:
            raise SeriesError("substituted series need positive valuation")
    vmin = min(f.lo, g.lo)
    prec = INF if b.prec == INF else (b.prec + 1) * vmin - 1
    prec = min(prec, f.prec, g.prec)
    if prec == INF:
        raise SeriesError("substitution of exact series needs finite precision")
    top = int(prec)
    maxdeg = min(len(b.comps) - 1, top)

    def powers(s):
        out = [LSeries([ONE], 0, INF, s.var)]
        for _ in range(maxdeg):
            out.append((out[-1] * s).truncate(top))
        return out

    fp, gp = powers(f), powers(g)
    # stage 1: c[(a, j)] = sum_i b_ij [t^a] f^i
    stage = {}
    for (i, j), c in b.items():
        if i + j > top:
            continue
        for a, fc in fp[i].items():
            if a + j > top:
                break
            key = (a, j)
            val = c * fc
            stage[key] = stage[key] + val if key in stage else val
    terms = {}
    for (a, j), c in stage.items():
        if c.is_zero():
            continue
        for bb, gc in gp[j].items():
            if a + bb > top:
                break
            key = (a, bb)
            val = c * gc
            terms[key] = terms[key] + val if key in terms else val
    return BSeries.from_dict(terms, prec, vars)


def bseries_weight_violation(b: BSeries, shift: int):
    for (i, j), c in b.items():
        if not is_homogeneous_of_weight(c, i + j + shift):
            return (i, j)
    return None


def is_symmetric(b: BSeries) -> bool:
    return b.agrees_with(b.swap())

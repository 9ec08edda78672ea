"""Exact arithmetic in the weighted ring Q[mu1, mu2, mu3, mu4, mu6].

Polynomials are python-flint ``fmpq_mpoly`` elements of one fixed context,
so ``+``, ``-``, ``*`` and ``==`` come straight from flint.  This module adds
what flint does not know about: the weight grading (wt mu_j = j), the two
integrality classes used by the Hurwitz checks, canonical printing, and the
canonical JSON form.

Exponent vectors are always 5-tuples in the order (mu1, mu2, mu3, mu4, mu6).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import flint

MU_NAMES = ("mu1", "mu2", "mu3", "mu4", "mu6")
MU_WEIGHTS = (1, 2, 3, 4, 6)
MU_CTX = flint.fmpq_mpoly_ctx.get(MU_NAMES, "deglex")

MuPoly = flint.fmpq_mpoly
Exponent = tuple[int, int, int, int, int]
RatLike = Union[int, Fraction, str, flint.fmpq]

INHOMOGENEOUS = "inhomogeneous"

MU1, MU2, MU3, MU4, MU6 = MU_CTX.gens()
ZERO = MU_CTX.from_dict({})
ONE = MU_CTX.constant(1)


def as_rat(value: RatLike) -> Fraction:
    """Coerce ints, Fractions, flint rationals and "p/q" strings to Fraction.

    Floats are refused on purpose.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, flint.fmpq):
        return Fraction(int(value.p), int(value.q))
    if isinstance(value, str):
        text = value.strip()
        if not text or any(ch in text for ch in ".eE"):
            raise ValueError(f"malformed rational {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


def to_fmpq(value: RatLike) -> flint.fmpq:
    r = as_rat(value)
    return flint.fmpq(r.numerator, r.denominator)


def const(value: RatLike) -> MuPoly:
    return MU_CTX.constant(to_fmpq(value))


def monomial(exponent: Sequence[int], coeff: RatLike = 1) -> MuPoly:
    exponent = tuple(int(e) for e in exponent)
    if len(exponent) != 5 or min(exponent) < 0:
        raise ValueError(f"bad exponent vector {exponent}")
    c = to_fmpq(coeff)
    if c == 0:
        return ZERO
    return MU_CTX.from_dict({exponent: c})


def from_terms(terms: dict) -> MuPoly:
    """Build a polynomial from ``{exponent: rational}``; zero entries are dropped."""
    clean = {}
    for e, c in terms.items():
        c = to_fmpq(c)
        if c != 0:
            clean[tuple(int(x) for x in e)] = c
    return MU_CTX.from_dict(clean)


def is_mupoly(obj) -> bool:
    return isinstance(obj, flint.fmpq_mpoly) and obj.context() is MU_CTX


def monomial_weight(exponent: Sequence[int]) -> int:
    return sum(w * e for w, e in zip(MU_WEIGHTS, exponent))


def _canonical_key(exponent: Exponent):
    # descending weight, then descending exponent vector
    return (-monomial_weight(exponent), tuple(-e for e in exponent))


def canonical_terms(p: MuPoly) -> list[tuple[Exponent, Fraction]]:
    """Terms of ``p`` as ``(exponent, Fraction)`` in canonical print order."""
    items = [(tuple(int(x) for x in e), Fraction(int(c.p), int(c.q))) for e, c in p.to_dict().items()]
    items.sort(key=lambda item: _canonical_key(item[0]))
    return items


def weight_of(p: MuPoly):
    """Common weight of all monomials of ``p``, or ``INHOMOGENEOUS``."""
    if p.is_zero():
        raise ValueError("undefined weight: zero polynomial")
    weights = {monomial_weight(e) for e in p.monoms()}
    if len(weights) == 1:
        return weights.pop()
    return INHOMOGENEOUS


def is_homogeneous_of_weight(p: MuPoly, weight: int) -> bool:
    """True for the zero polynomial and for polynomials of exactly this weight."""
    return all(monomial_weight(e) == weight for e in p.monoms())


class Integrality(enum.IntEnum):
    """Integrality classes, ordered so that ``min`` is the meet."""

    NEITHER = 0
    Z_HALF_MU1 = 1  # Z[mu1/2, mu2, mu3, mu4, mu6]
    Z_MU = 2  # Z[mu1, mu2, mu3, mu4, mu6]


@dataclass(frozen=True)
class IntegralityResult:
    cls: Integrality
    witness: Exponent | None = None
    coeff: Fraction | None = None


def integrality_class(p: MuPoly) -> IntegralityResult:
    """Classify ``p`` as lying in Z[mu], in Z[mu1/2, mu2, ...], or in neither.

    A coefficient ``c`` of mu1^e1 * ... is allowed in the second ring iff
    ``c * 2**e1`` is an integer.  The witness is the first offending monomial
    in canonical order: for ``Z_HALF_MU1`` it shows why the polynomial is not
    in Z[mu], for ``NEITHER`` it violates both rings.
    """
    if all(c.q == 1 for c in p.coeffs()):
        return IntegralityResult(Integrality.Z_MU)
    first_nonint = None
    for e, c in canonical_terms(p):
        if c.denominator == 1:
            continue
        if first_nonint is None:
            first_nonint = (e, c)
        if (c * 2 ** e[0]).denominator != 1:
            return IntegralityResult(Integrality.NEITHER, e, c)
    if first_nonint is None:
        return IntegralityResult(Integrality.Z_MU)
    return IntegralityResult(Integrality.Z_HALF_MU1, *first_nonint)


def evaluate(p: MuPoly, values: Sequence[RatLike]) -> Fraction:
    """Substitute five rationals for (mu1, mu2, mu3, mu4, mu6)."""
    if len(values) != 5:
        raise ValueError("need exactly five values for mu1, mu2, mu3, mu4, mu6")
    args = [to_fmpq(v) for v in values]
    return as_rat(p(*args))


def specialize(p: MuPoly, values: Sequence[RatLike]) -> MuPoly:
    """Like :func:`evaluate` but returns a constant polynomial."""
    return const(evaluate(p, values))


def flip_odd(p: MuPoly) -> MuPoly:
    """Apply (mu1, mu3) -> (-mu1, -mu3), fixing mu2, mu4, mu6."""
    return MU_CTX.from_dict({
        e: (-c if (e[0] + e[2]) % 2 else c) for e, c in p.to_dict().items()
    })


# --- printing ---------------------------------------------------------------

def _mono_text(e: Exponent) -> str:
    parts = []
    for name, k in zip(MU_NAMES, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts)


def to_text(p: MuPoly) -> str:
    """Plain-text rendering, e.g. ``mu1^2 + 4*mu2``."""
    terms = canonical_terms(p)
    if not terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(terms):
        sign = "-" if c < 0 else "+"
        a = abs(c)
        mono = _mono_text(e)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if idx == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


def _mono_latex(e: Exponent) -> str:
    parts = []
    for name, k in zip(MU_NAMES, e):
        sym = r"\mu_{%s}" % name[2:]
        if k == 1:
            parts.append(sym)
        elif k > 1:
            parts.append(f"{sym}^{{{k}}}")
    return "".join(parts)


def _rat_latex(a: Fraction) -> str:
    if a.denominator == 1:
        return str(a.numerator)
    return r"\tfrac{%d}{%d}" % (a.numerator, a.denominator)


def to_latex(p: MuPoly) -> str:
    terms = canonical_terms(p)
    if not terms:
        return "0"
    out = []
    for idx, (e, c) in enumerate(terms):
        a = abs(c)
        mono = _mono_latex(e)
        if not mono:
            body = _rat_latex(a)
        elif a == 1:
            body = mono
        else:
            body = _rat_latex(a) + mono
        if idx == 0:
            out.append(body if c > 0 else "-" + body)
        else:
            out.append((" + " if c > 0 else " - ") + body)
    return "".join(out)


def n_terms(p: MuPoly) -> int:
    return len(p)


# --- canonical JSON ---------------------------------------------------------

def to_json(p: MuPoly) -> list[dict]:
    return [
        {"e": list(e), "n": str(c.numerator), "d": str(c.denominator)}
        for e, c in canonical_terms(p)
    ]


def from_json(data: Iterable[dict]) -> MuPoly:
    terms = {}
    for item in data:
        e = tuple(int(x) for x in item["e"])
        d = int(item["d"])
        if d <= 0:
            raise ValueError("denominator must be positive")
        terms[e] = Fraction(int(item["n"]), d)
    return from_terms(terms)

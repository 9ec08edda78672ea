#!/usr/bin/env python3
"""Cross-check sigma as a series in t against a plain-Fraction computation.

The oracle never touches the package's series code.  It solves for s(t) by
fixed-point iteration, builds omega = dx / f_y, integrates to u(t), and
substitutes u(t) into the u^7/7! Hurwitz truncation of sigma.  Terms t^1..t^7
only depend on that truncation, so they must agree with the package.
"""
import argparse
from dataclasses import dataclass
from fractions import Fraction

from sigma_forge import ring_core as rc
from sigma_forge.curve_expansions import CurveParams
from sigma_forge.sigma_engine import SigmaKit

TERMS = 10


@dataclass(frozen=True)
class OracleConfig:
    mu: tuple = (1, 0, 1, 0, 0)
    upto: int = 7


def _mul(a, b):
    out = [Fraction(0)] * TERMS
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b[:TERMS - i]):
                out[i + j] += x * y
    return out


def _inv(a):
    b = [1 / a[0]]
    for n in range(1, TERMS):
        b.append(-sum(a[j] * b[n - j] for j in range(1, n + 1)) / a[0])
    return b


def _shift(a, k):
    return ([Fraction(0)] * k + a)[:TERMS]


def _lin(*terms):
    out = [Fraction(0)] * TERMS
    for c, a in terms:
        out = [o + c * v for o, v in zip(out, a)]
    return out


def oracle_sigma_t(mu):
    m1, m2, m3, m4, m6 = (Fraction(v) for v in mu)
    one = [Fraction(1)] + [Fraction(0)] * (TERMS - 1)
    s = [Fraction(0)] * TERMS
    for _ in range(TERMS + 2):
        s2 = _mul(s, s)
        s3 = _mul(s2, s)
        s = _lin((1, _shift(_lin((1, one), (m2, s), (m4, s2), (m6, s3)), 2)),
                 (1, _shift(_lin((m1, s), (m3, s2)), 1)))
    # s = t^2 g, x = t^-2 / g, y = -x / t
    gi = _inv(s[2:] + [Fraction(0)] * 2)
    dx = [(n - 2) * gi[n] for n in range(TERMS)]                  # t^3 dx/dt
    fy = _lin((-2, gi), (m1, _shift(gi, 1)), (m3, _shift(one, 3)))  # t^3 f_y
    om = _mul(dx, _inv(fy))
    u = [Fraction(0)] + [om[n] / (n + 1) for n in range(TERMS - 1)]
    h = m1 / 2
    hurwitz = {
        1: Fraction(1),
        3: (h**2 + m2) / 6,
        5: (h**4 + 2*m2*h**2 + m3*m1 + m2**2 + 2*m4) / 120,
        7: (h**6 + 3*m2*h**4 + 6*m3*h**3 + 3*m2**2*h**2 + 6*m4*h**2 + 6*m3*m2*h + m2**3
            + 6*m4*m2 + 6*m3**2 + 24*m6) / 5040,
    }
    sig, power = [Fraction(0)] * TERMS, one
    for k in range(1, 8):
        power = _mul(power, u)
        if k in hurwitz:
            sig = _lin((1, sig), (hurwitz[k], power))
    return sig


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", default="1,0,1,0,0", help="mu1,mu2,mu3,mu4,mu6")
    args = ap.parse_args(argv)
    cfg = OracleConfig(mu=tuple(int(v) for v in args.mu.split(",")))
    want = oracle_sigma_t(cfg.mu)
    got = SigmaKit(CurveParams.numeric(cfg.mu), cfg.upto + 2).sigma_in_t(cfg.upto)
    bad = 0
    for n in range(1, cfg.upto + 1):
        g = rc.evaluate(got.coeff(n), [0] * 5)
        flag = "ok" if g == want[n] else "MISMATCH"
        bad += flag != "ok"
        print(f"t^{n}: package {g}  oracle {want[n]}  {flag}")
    return 1 if bad else 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Acceptance criteria 1 to 6, one PASS/FAIL line each.

Run under pytest (lines are printed even with output capture on) or
directly with ``python3 tests/test_acceptance.py``.
"""
import random
import sys
import time
from fractions import Fraction
from math import factorial
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

import golden as G  # noqa: E402

from sigma_forge import ring_core as rc  # noqa: E402
from sigma_forge.curve_expansions import (  # noqa: E402
    SYMBOLIC, WEIGHT_SHIFT as CURVE_SHIFT, CurveKit, CurveParams, invariants_D,
)
from sigma_forge.nplication import (  # noqa: E402
    WeierstrassCurve, classical_oracle, cj_formula, compare_with_oracle, leading_coefficients,
    psi_poly, torsion_check,
)
from sigma_forge.ring_core import ONE, Integrality  # noqa: E402
from sigma_forge.series_engine import (  # noqa: E402
    BSeries, LSeries, bseries_weight_violation, compose, exp_series, hurwitz_report,
    invert_unit, is_symmetric, log_series, revert, sqrt_hurwitz, weight_violation,
)
from sigma_forge.sigma_engine import (  # noqa: E402
    BIVARIATE_SHIFT, WEIGHT_SHIFT as SIGMA_SHIFT, SigmaKit, along, curve_literal_residual,
    curve_residual, duplication_sides, fs_sides,
)

SAMPLE = CurveParams.numeric([1, 2, 3, 4, 6])
Y2_PLUS_Y = CurveParams.numeric([0, 0, 1, 0, 0])


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1():
    """Tabulated low-order coefficients, symbolic, order 12."""
    t0 = time.perf_counter()
    ck = CurveKit(SYMBOLIC, 12)
    sk = SigmaKit(SYMBOLIC, 12)
    bad = []

    def uni(name, ser, tab, hurwitz=False):
        for n, want in G.table(tab).items():
            got = ser.coeff(n) * (factorial(n) if hurwitz else 1)
            if got != want:
                bad.append(f"{name}[{n}]")

    def bi(name, ser, tab):
        for (i, j), want in tab.items():
            if ser.coeff(i, j) != G.P(want):
                bad.append(f"{name}[{i},{j}]")

    uni("s", ck.s(6), G.S)
    uni("x", ck.x(3), G.X)
    uni("y", ck.y(2), G.Y)
    uni("omega1", ck.omega1(3), G.OMEGA)
    uni("tprime", ck.tprime(5), G.TPRIME)
    bi("p", ck.p(3), G.P_SHOWN)
    third = {(i, d - i): G.THIRD_KIND.get((i, d - i), "0") for d in range(5) for i in range(d + 1)}
    bi("third_kind", sk.third_kind_correction(4), third)
    uni("eta1", ck.eta1(3), G.ETA)
    bi("xi_reg", sk.xi_regular(4), G.XI_REG)
    uni("q", ck.q(5), G.Q)
    A, B, C, D, E = (G.P(G.R_BLOCKS[k]) for k in "ABCDE")
    t1 = BSeries.from_dict({(1, 0): ONE}, 6)
    t2 = BSeries.from_dict({(0, 1): ONE}, 6)
    d2 = (t1 - t2) * (t1 - t2)
    r_disp = (BSeries.one() - (d2 * d2).scale(A) - (d2 * d2 * (t1 + t2)).scale(B)
              + ((t1 ** 4 + t2 ** 4).scale(C) + (t1 * t2 * (t1 * t1 + t2 * t2)).scale(D)
                 + (t1 * t1 * t2 * t2).scale(E)) * d2)
    diff = sk.r_series(6).first_difference(r_disp, 6)
    if diff is not None:
        bad.append(f"r{list(diff)}")
    sig_t = sk.sigma_in_t(7)
    uni("sigma_t", sig_t, G.SIGMA_T)
    uni("sigma_u", sk.sigma(7), G.SIGMA_U, hurwitz=True)
    uni("wp", sk.wp(2), {k: v for k, v in G.WP.items() if k <= 2})
    # u^4 and u^6 against the display with the missing "+(" restored
    uni("wp(repaired)", sk.wp(6), {k: v for k, v in G.WP.items() if k > 2})
    secs = time.perf_counter() - t0
    ok = not bad and secs < 10
    detail = f"{secs:.1f}s"
    if bad:
        detail += "; mismatches: " + ", ".join(bad)
        if bad == ["sigma_t[5]"]:
            got = sig_t.coeff(5) - G.P(G.SIGMA_T[5])
            detail += (f" (computed minus displayed = {rc.to_text(got)}: the displayed 29/16 on"
                       " mu3*(mu1/2) is refuted by an independent Fraction oracle, which gives"
                       " 29/12; every other displayed coefficient matches)")
    return ok, detail


def criterion_2():
    t0 = time.perf_counter()
    kit = SigmaKit(SYMBOLIC, 24)
    sq = hurwitz_report(kit.sigma_sq(24))
    sg = hurwitz_report(kit.sigma(24))
    secs = time.perf_counter() - t0
    # every prefix of the coefficient list is the series at a lower order
    ok = (sq.overall == Integrality.Z_MU and sg.overall == Integrality.Z_HALF_MU1
          and all(c == Integrality.Z_MU for c in sq.classes)
          and all(c >= Integrality.Z_HALF_MU1 for c in sg.classes) and secs < 120)
    n = sg.first_failing
    witness = (f"sigma leaves Z[mu]<<u>> at u^{n}/{n}!, monomial {list(sg.witness)} has"
               f" coefficient {sg.witness_coeff}") if n is not None else "no witness"
    return ok, f"{secs:.1f}s; sigma^2 in Z_mu, sigma in Z_half_mu1 through u^24; {witness}"


def criterion_3():
    """The four identities exactly as stated, symbolic, order 14."""
    t0 = time.perf_counter()
    N = 14
    kit = SigmaKit(SYMBOLIC, N)
    parts = {}
    lhs, truth = fs_sides(kit, N)
    # as printed: sigma(u+v)sigma(u-v)/(sigma(u)^2 sigma(v)^2) = x(u) - x(v)
    parts["fs"] = (lhs.agrees_with(-truth), lhs.agrees_with(truth))
    ratio, wpp = duplication_sides(kit, N)
    parts["dup"] = (ratio.agrees_with(wpp), ratio.agrees_with(-wpp))
    inv = kit.wp(N).agrees_with(kit.x_of_u(N)) and kit.wp_prime(N).agrees_with(kit.fy_of_u(N))
    parts["inversion"] = (inv, inv)
    res = curve_residual(kit, N)
    curve_ok = all(c.is_zero() for _, c in res.items())
    parts["curve"] = (curve_ok, curve_ok)
    lit = curve_literal_residual(kit, N)
    secs = time.perf_counter() - t0
    ok = all(p[0] for p in parts.values()) and secs < 60
    words = []
    for name, (as_stated, true_form) in parts.items():
        if as_stated:
            words.append(f"{name} ok")
        elif true_form:
            words.append(f"{name} as stated refuted, holds with the opposite sign")
        else:
            words.append(f"{name} FAILS")
    lit_note = ("wp'^2 + (mu1 wp + mu3) wp' = wp^3 + ... refuted (residual starts "
                f"{rc.to_text(lit.coeff(lit.valuation))}*u^{lit.valuation}); checked as "
                "f(wp, (wp' - mu1 wp - mu3)/2) = 0")
    return ok, f"{secs:.1f}s; " + "; ".join(words) + "; curve: " + lit_note


def criterion_4():
    t0 = time.perf_counter()
    notes = []
    signs = {}
    ok = True
    for n in range(2, 8):
        params = SYMBOLIC if n <= 5 else SAMPLE
        cmp = compare_with_oracle(n, params)
        signs.setdefault(n % 2, set()).add(cmp.sign)
        if cmp.sign is None:
            ok = False
            notes.append(f"n={n} differs from the recurrence")
        if params.is_symbolic:
            for j, c in enumerate(cmp.series_poly.coefficients()):
                if not c.is_zero() and rc.integrality_class(c).cls != Integrality.Z_MU:
                    ok = False
                    notes.append(f"C_{j}(n={n}) not in Z[mu]")
    sym_secs = time.perf_counter() - t0
    consistent = all(len(s) == 1 for s in signs.values())
    ok = ok and consistent and sym_secs < 120
    for n in range(2, 8):
        top = min(n * n - 1, 6 if n % 2 else 5)
        got = leading_coefficients(n, top)
        for j in range(top + 1):
            if got[j] != cj_formula(n, j):
                ok = False
                notes.append(f"C_{j}(n={n}) off the closed form")
            if not got[j].is_zero() and rc.integrality_class(got[j]).cls != Integrality.Z_MU:
                ok = False
                notes.append(f"C_{j}(n={n}) not in Z[mu]")
    inv = invariants_D()
    seq = psi_poly(3).nonzero_coefficients()
    if seq != [rc.const(3), inv.b2, 3 * inv.b4, 3 * inv.b6, inv.b8]:
        ok = False
        notes.append("n=3 sequence differs from (3, b2, 3b4, 3b6, b8)")
    secs = time.perf_counter() - t0
    odd, even = signs.get(1), signs.get(0)
    detail = (f"{secs:.1f}s (symbolic n<=5 in {sym_secs:.1f}s); series = {sorted(odd)} x recurrence"
              f" for odd n, {sorted(even)} x recurrence for even n; even-n leading C_0 = -n,"
              " C_1..C_5 as tabulated; n=3 gives (3, b2, 3b4, 3b6, b8)")
    if notes:
        detail += "; " + ", ".join(notes)
    return ok, detail


def _roundtrips(cases=100, seed=20240611, N=8):
    rng = random.Random(seed)

    def rnd():
        return Fraction(rng.randint(-9, 9), rng.randint(1, 9))

    for _ in range(cases):
        tail = [rc.const(rnd()) for _ in range(N)]
        one = LSeries([ONE] + tail, 0, N)
        if not (sqrt_hurwitz(one) ** 2).agrees_with(one, N):
            return "sqrt"
        zero = LSeries([rc.ZERO] + tail, 0, N)
        if not log_series(exp_series(zero)).agrees_with(zero, N):
            return "exp/log"
        if not (one * invert_unit(one)).agrees_with(LSeries([ONE], 0, N), N):
            return "inverse"
        lin = LSeries([ONE] + tail, 1, N + 1)
        if not compose(lin, revert(lin)).agrees_with(LSeries([ONE], 1, N + 1, "u"), N + 1):
            return "reversion"
    return None


def criterion_5():
    t0 = time.perf_counter()
    fails = []
    N = 12
    ck = CurveKit(SYMBOLIC, N)
    kit = SigmaKit(SYMBOLIC, N)
    for name, shift in CURVE_SHIFT.items():
        if name == "p":
            bad = bseries_weight_violation(ck.p(N), shift)
        else:
            bad = weight_violation(ck.series(name, N), shift)
        if bad is not None:
            fails.append(f"weight {name}")
    sig_fns = {"sigma": kit.sigma, "sigma_sq": kit.sigma_sq, "wp": kit.wp,
               "wp_prime": kit.wp_prime, "sigma_t": kit.sigma_in_t}
    for name, shift in SIGMA_SHIFT.items():
        if weight_violation(sig_fns[name](N), shift) is not None:
            fails.append(f"weight {name}")
    bi_fns = {"xi_reg": kit.xi_regular, "third_kind": kit.third_kind_correction,
              "r": kit.r_series, "A": kit.double_integral, "p": ck.p}
    for name, shift in BIVARIATE_SHIFT.items():
        if bseries_weight_violation(bi_fns[name](N), shift) is not None:
            fails.append(f"weight {name}")
    lo, hi = SigmaKit(SYMBOLIC, 9), SigmaKit(SYMBOLIC, 14)
    for fn in ("sigma", "sigma_sq", "wp", "sigma_in_t"):
        if getattr(hi, fn)(14).truncate(9) != getattr(lo, fn)(9):
            fails.append(f"precision {fn}")
    if hi.r_series(14).truncate(9) != lo.r_series(9):
        fails.append("precision r")
    tp = ck.tprime(N)
    if not compose(tp, tp).agrees_with(LSeries.monomial(1, 1), N):
        fails.append("involution")
    if not is_symmetric(kit.xi_regular(N)):
        fails.append("xi symmetry")
    if not kit.r_series(N).diagonal().agrees_with(LSeries([ONE], 0, N), N):
        fails.append("r(t,t)")
    if not kit.sigma_sq_two_var(8).agrees_with(along(kit.sigma_sq(8), 1, -1), 8):
        fails.append("translation")
    rt = _roundtrips()
    if rt:
        fails.append(f"round trip {rt}")
    secs = time.perf_counter() - t0
    detail = (f"{secs:.1f}s; weights of every exported series, precision N vs N+5, t'(t'(t)) = t,"
              " xi symmetry, r(t,t) = 1, sigma^2(u-v) translation invariance, 100 seeded"
              " round trips each for sqrt, exp/log, inverse, reversion")
    if fails:
        detail += "; failing: " + ", ".join(fails)
    return not fails, detail


def criterion_6():
    P = (0, 0)
    rep3 = torsion_check(3, Y2_PLUS_Y, P)
    psi2_classical = torsion_check(2, Y2_PLUS_Y, P, classical_oracle(2, Y2_PLUS_Y)).psi_value
    psi2_series = psi_poly(2, Y2_PLUS_Y).evaluate(0, 0, Y2_PLUS_Y)
    E = WeierstrassCurve(Y2_PLUS_Y)
    three_p = E.mul(3, P)
    ok = (rep3.psi_value == 0 and psi2_classical == 1 and psi2_series == -1
          and three_p is None and E.mul(2, P) is not None and E.mul(1, P) is not None)
    return ok, (f"psi_3(P) = {rep3.psi_value}; psi_2(P) = {psi2_classical} (the series-side psi_2 is"
                f" the even-n sign flip, {psi2_series}); [3]P = O by chord-tangent, order {E.order(P)}")


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6}


def line(n, ok, detail):
    return f"criterion {n}: {'PASS' if ok else 'FAIL'}: {detail}"


# ---------------------------------------------------------------------------
# pytest entry points
# ---------------------------------------------------------------------------

@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print("\n" + line(n, ok, detail))
    return emit


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, report):
    ok, detail = CRITERIA[n]()
    report(n, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    for n, fn in CRITERIA.items():
        print(line(n, *fn()), flush=True)

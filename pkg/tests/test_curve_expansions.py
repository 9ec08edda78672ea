import pytest

from golden import ETA, OMEGA, P_SHOWN, Q, S, TPRIME, X, Y, table
from conftest import SAMPLE

from sigma_forge import ring_core as rc
from sigma_forge.curve_expansions import (
    SYMBOLIC, WEIGHT_SHIFT, CurveKit, CurveParams, CurvePoly, conjugate_subring_violations,
    curve_f, curve_fy, expand_s, in_product_parameter, invariants_D, pairing_F,
    pairing_F_diagonal, swap_F,
)
from sigma_forge.ring_core import MU1, MU2, MU3, MU4, MU6, ONE, Integrality
from sigma_forge.series_engine import (
    BSeries, LSeries, compose, divide_exact, hurwitz_report, weight_violation,
)

N = 14
T = LSeries.monomial(1, 1)


def zero_to(s, n):
    return all(s.coeff(k).is_zero() for k in range(s.lo if s.coeffs else 0, n + 1))


# --- tabulated values -----------------------------------------------------------

@pytest.mark.parametrize("name, tab", [
    ("s", S), ("x", X), ("y", Y), ("omega1", OMEGA), ("tprime", TPRIME), ("eta1", ETA), ("q", Q),
])
def test_tabulated_coefficients(curve, name, tab):
    top = max(tab)
    ser = curve.series(name, top)
    for n, want in table(tab).items():
        assert ser.coeff(n) == want, (name, n)


def test_p_displayed_terms(curve):
    p = curve.p(3)
    for (i, j), want in table(P_SHOWN).items():
        assert p.coeff(i, j) == want
    # mu1 t1 is there, mu1 t2 is not
    assert p.coeff(0, 1).is_zero()


def test_s_small_orders():
    with pytest.raises(ValueError):
        expand_s(1)
    assert expand_s(2).coeff(2) == ONE


# --- identities on the expansions -------------------------------------------------

def test_on_the_curve(curve):
    x, y = curve.x(N), curve.y(N)
    res = curve_f().on_series(x, y)
    assert zero_to(res, int(res.prec)) and res.prec >= N - 6


def test_t_is_minus_x_over_y(curve):
    x, y = curve.x(N), curve.y(N)
    assert zero_to(T * y + x, N - 3)


def test_involution(curve):
    tp = curve.tprime(N)
    assert compose(tp, tp).agrees_with(T, N)


def test_conjugate_keeps_x(curve):
    x, tp = curve.x(N), curve.tprime(N)
    assert compose(x, tp).agrees_with(x, N - 3)


def test_conjugate_y(curve):
    x, y, tp = curve.x(N), curve.y(N), curve.tprime(N)
    lhs = y + compose(y, tp)
    rhs = -(x.scale(MU1) + MU3)
    assert lhs.agrees_with(rhs, N - 4)
    # f_y is the jump of y across the involution
    assert (y - compose(y, tp)).agrees_with(curve.fy(N), N - 4)


def test_fy_shape(curve):
    tp, fy = curve.tprime(N), curve.fy(N)
    w = T * tp
    num = w * w * w * fy
    den = T - tp
    shaped = (num / den).truncate(N - 2)
    assert shaped.lo == 2 and shaped.coeff(2) == ONE
    assert all(rc.integrality_class(c).cls == Integrality.Z_MU for _, c in shaped.items())


def test_inverse_x_in_product_parameter(curve):
    # s = 1/x as a series in w = t t'; note w = -t^2 + ..., so the leading term is -w
    w = in_product_parameter(curve.s(N), T, curve.tprime(N))
    assert w.coeff(1) == -ONE and w.coeff(2) == MU2
    assert w.coeff(3) == -(MU2 ** 2 + MU4)
    assert all(rc.integrality_class(c).cls == Integrality.Z_MU for _, c in w.items())


def test_p_definition(curve):
    # s(t2) - s(t1) = -(t2 - t1)(t2' - t1) p(t1, t2)
    n = 8
    s = curve.s(n + 2)
    tp = curve.tprime(n + 2)
    t1 = BSeries.from_univariate(T, 1)
    t2 = BSeries.from_univariate(T, 2)
    lhs = BSeries.from_univariate(s, 2) - BSeries.from_univariate(s, 1)
    rhs = -((t2 - t1) * (BSeries.from_univariate(tp, 2) - t1) * curve.p(n))
    assert lhs.agrees_with(rhs, n)


def test_p_antisymmetry(curve):
    n = 8
    tp = curve.tprime(n)
    t1 = BSeries.from_univariate(T, 1)
    t2 = BSeries.from_univariate(T, 2)
    p = curve.p(n)
    lhs = (BSeries.from_univariate(tp, 2) - t1) * (t2 - t1) * p
    rhs = -((BSeries.from_univariate(tp, 1) - t2) * (t1 - t2) * p.swap())
    assert lhs.agrees_with(rhs, n)


def test_p_on_axis(curve):
    # p(t, 0) = s(t) / t^2
    p = curve.p(10)
    assert p.restrict(1).agrees_with(curve.s(12).shift(-2), 10)
    assert p.coeff(0, 0) == ONE


def test_p_integral(curve):
    assert all(rc.integrality_class(c).cls == Integrality.Z_MU for _, c in curve.p(10).items())


def test_exact_division_reconstructs(curve):
    p = curve.p(8)
    den = BSeries.from_univariate(T, 1) - BSeries.from_univariate(curve.tprime(9), 2)
    assert divide_exact(den * p, den).agrees_with(p, 7)


def test_u_of_t_hurwitz_integral(curve):
    rep = hurwitz_report(curve.u_of_t(N))
    assert rep.overall == Integrality.Z_MU


# --- weights ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["s", "x", "y", "omega1", "eta1", "tprime", "q", "u", "fy"])
def test_weight_homogeneity(curve, name):
    ser = curve.series(name, N)
    assert weight_violation(ser, WEIGHT_SHIFT[name]) is None


def test_p_weights(curve):
    p = curve.p(10)
    assert all(rc.is_homogeneous_of_weight(c, i + j) for (i, j), c in p.items())


def test_conjugate_parameter_subring(curve):
    # the claim t' in t Z[mu1, mu3][[t]] holds only through t^5;
    # mu2 appears at t^6 (confirmed with a plain Fraction computation of x/(y + mu1 x + mu3))
    tp = curve.tprime(N)
    assert conjugate_subring_violations(tp.truncate(5)) == []
    assert conjugate_subring_violations(tp)[0] == 6
    assert tp.coeff(6) == -(MU1 ** 5 + 6 * MU1 ** 2 * MU3 + MU2 * MU3)


def test_conjugate_parameter_numeric_fraction_oracle():
    # t' = x / (y + mu1 x + mu3) at two curves that differ only in mu2
    a = CurveKit(CurveParams.numeric([1, 0, 1, 0, 0]), 8).tprime(7)
    b = CurveKit(CurveParams.numeric([1, 1, 1, 0, 0]), 8).tprime(7)
    assert [rc.evaluate(a.coeff(n), [0] * 5) for n in range(1, 8)] == [-1, -1, -1, -2, -4, -7, -13]
    assert [rc.evaluate(b.coeff(n), [0] * 5) for n in range(1, 8)] == [-1, -1, -1, -2, -4, -8, -17]


# --- the pairing polynomial and invariants ------------------------------------------------

def test_pairing_symmetric():
    F = pairing_F()
    assert swap_F(F) == F


def test_pairing_diagonal_is_fy_squared():
    diff = (pairing_F_diagonal() - curve_fy() * curve_fy()).reduce()
    # the difference is a multiple of f; after reduction by f it vanishes
    assert diff == CurvePoly()


def test_curve_poly_reduce():
    y = CurvePoly.y()
    assert (y * y - curve_f()).reduce() == (y * y - curve_f())
    assert curve_f().reduce() == CurvePoly()


def test_invariants():
    inv = invariants_D()
    assert inv.b2 == MU1 ** 2 + 4 * MU2
    assert rc.evaluate(inv.D, [0, 0, 1, 0, 0]) == -27
    assert rc.weight_of(inv.D) == 12
    # b8 is forced by the others: 4 b8 = b2 b6 - b4^2
    assert 4 * inv.b8 == inv.b2 * inv.b6 - inv.b4 ** 2
    assert rc.evaluate(invariants_D(SAMPLE).b2, [0] * 5) == 9


def test_specialized_kit_matches_symbolic(curve):
    num = CurveKit(SAMPLE, 10)
    for name in ("x", "omega1", "q"):
        sym = curve.series(name, 10)
        got = num.series(name, 10)
        for n, c in sym.items():
            assert SAMPLE.specialize(c) == got.coeff(n)


def test_curve_params_validation():
    with pytest.raises((ValueError, TypeError)):
        CurveParams.numeric([1, 2, 3])
    assert SYMBOLIC.is_symbolic and not SAMPLE.is_symbolic
    assert SAMPLE.gens()[4] == rc.const(6)
    assert MU6 in SYMBOLIC.gens()

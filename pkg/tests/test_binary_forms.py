from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from quanticflow.binary_forms import (
    P,
    Q,
    BinaryForm,
    CubicCoeffs,
    DegreeError,
    QuarticCoeffs,
    add,
    as_rational,
    check_syzygy_cubic,
    check_syzygy_quartic,
    discriminant_cubic,
    evaluate,
    hessian_cubic,
    hessian_quartic,
    invariant_S,
    invariant_T,
    invariants,
    jacobian_cubic,
    jacobian_determinant,
    jacobian_quartic,
    make_cubic,
    make_quartic,
    multiply,
    partial_p,
    partial_q,
    poisson_bracket,
    power,
    scale,
    symplectic_swap,
)

from conftest import forms, random_int_tuples, rationals, small_ints

p, q = sp.symbols("p q")


def to_sympy(f: BinaryForm):
    n = f.degree
    return sum(sp.Rational(c.numerator, c.denominator) * p ** (n - k) * q ** k
               for k, c in enumerate(map(Fraction, f.coeffs)))


def from_sympy(expr, degree):
    poly = sp.Poly(sp.expand(expr), p, q)
    coeffs = [0] * (degree + 1)
    for (i, j), c in poly.terms():
        if c == 0:
            continue
        assert i + j == degree
        coeffs[j] = Fraction(int(c.p), int(c.q))
    return BinaryForm(tuple(coeffs))


def form(*coeffs):
    return BinaryForm(coeffs)


# -- construction -------------------------------------------------------------

@pytest.mark.parametrize("c, expected", [
    ((1, 0, 0, 1), (1, 0, 0, 1)),
    ((1, 1, 1, 1), (1, 3, 3, 1)),
    ((0, 0, 0, 0), (0, 0, 0, 0)),
])
def test_make_cubic(c, expected):
    f = make_cubic(CubicCoeffs.of(*c))
    assert f.degree == 3
    assert f.coeffs == expected


@pytest.mark.parametrize("c, expected", [
    ((1, 0, 0, 0, 1), (1, 0, 0, 0, 1)),
    ((1, 0, 1, 0, 1), (1, 0, 6, 0, 1)),
    ((1, 1, 1, 1, 1), (1, 4, 6, 4, 1)),
])
def test_make_quartic(c, expected):
    assert make_quartic(QuarticCoeffs.of(*c)).coeffs == expected


def test_coefficients_are_exact_rationals():
    f = make_cubic(CubicCoeffs.of("1/2", "-3/4", 2, "6/3"))
    assert f.coeffs == (Fraction(1, 2), Fraction(-9, 4), 6, 2)
    assert all(isinstance(c, (int, Fraction)) for c in f.coeffs)
    with pytest.raises(TypeError):
        as_rational(0.5)


# -- evaluation and arithmetic ------------------------------------------------

@pytest.mark.parametrize("f, at, expected", [
    (form(1, 0, 0, 1), (1, 0), 1),
    (form(1, 0, 0, 1), (1, -1), 0),
    (form(0, 1, 0), (2, 3), 6),
])
def test_evaluate(f, at, expected):
    assert evaluate(f, *at) == expected
    assert evaluate(f, float(at[0]), float(at[1])) == pytest.approx(expected)


def test_evaluate_exact_rational():
    f = form(1, 0, 0, 1)
    assert evaluate(f, Fraction(1, 2), Fraction(1, 3)) == Fraction(1, 8) + Fraction(1, 27)


def test_arithmetic_examples():
    assert power(form(0, 1, 0), 3).coeffs == (0, 0, 0, 1, 0, 0, 0)
    assert power(form(1, 0, 0, 1), 2).coeffs == (1, 0, 0, 2, 0, 0, 1)
    z = add(form(1, 0, 0), form(-1, 0, 0))
    assert z.is_zero() and z.degree == 2


def test_add_degree_mismatch():
    with pytest.raises(DegreeError):
        add(form(1, 0), form(1, 0, 0))


@pytest.mark.parametrize("f, dp, dq", [
    (form(1, 0, 0, 1), (3, 0, 0), (0, 0, 3)),
    (form(0, 0, 1, 0, 0), (0, 0, 2, 0), (0, 2, 0, 0)),
])
def test_partials(f, dp, dq):
    assert partial_p(f).coeffs == dp
    assert partial_q(f).coeffs == dq


def test_partial_degree_zero():
    with pytest.raises(DegreeError):
        partial_p(BinaryForm.constant(3))
    with pytest.raises(DegreeError):
        partial_q(BinaryForm.constant(3))


@given(forms(min_degree=1), forms(min_degree=1))
def test_partials_match_sympy(f, g):
    e = to_sympy(f)
    assert partial_p(f) == from_sympy(sp.diff(e, p), f.degree - 1)
    assert partial_q(f) == from_sympy(sp.diff(e, q), f.degree - 1)


@settings(max_examples=50)
@given(forms(), forms())
def test_multiply_matches_sympy(f, g):
    assert multiply(f, g) == from_sympy(to_sympy(f) * to_sympy(g), f.degree + g.degree)


# -- Poisson bracket ----------------------------------------------------------

def test_bracket_examples():
    assert poisson_bracket(P, Q).coeffs == (1,)
    psi = scale(form(1, 0, 0, 1), Fraction(1, 3))
    F = form(0, -1, 0)
    # p^2 * (-p) - q^2 * (-q)
    assert poisson_bracket(psi, F).coeffs == (-1, 0, 0, 1)


@given(forms(min_degree=1))
def test_bracket_self_is_zero(f):
    assert poisson_bracket(f, f).is_zero()


@given(forms(min_degree=1), forms(min_degree=1))
def test_bracket_antisymmetric(f, g):
    assert poisson_bracket(f, g) == scale(poisson_bracket(g, f), -1)


@given(forms(min_degree=1), forms(min_degree=1), forms(min_degree=1))
def test_bracket_leibniz(f, g, h):
    lhs = poisson_bracket(f, multiply(g, h))
    rhs = add(multiply(poisson_bracket(f, g), h), multiply(g, poisson_bracket(f, h)))
    assert lhs == rhs


def test_bracket_needs_positive_degree():
    with pytest.raises(DegreeError):
        poisson_bracket(BinaryForm.constant(1), P)


# -- cubic invariants and covariants ------------------------------------------

@pytest.mark.parametrize("c, D", [((1, 0, 0, 1), 1), ((1, 1, 1, 1), 0), ((1, 0, 1, 0), 4)])
def test_discriminant_cubic(c, D):
    assert discriminant_cubic(CubicCoeffs.of(*c)) == D


@pytest.mark.parametrize("c, H", [
    ((1, 0, 0, 1), (0, 1, 0)),
    ((1, 1, 1, 1), (0, 0, 0)),
    ((1, 0, 1, 0), (1, 0, -1)),
])
def test_hessian_cubic(c, H):
    assert hessian_cubic(CubicCoeffs.of(*c)).coeffs == H


@pytest.mark.parametrize("c, J", [
    ((1, 0, 0, 1), (1, 0, 0, -1)),
    ((1, 0, 0, 0), (0, 0, 0, 0)),
    ((1, 0, 1, 0), (0, -6, 0, -2)),
])
def test_jacobian_cubic(c, J):
    assert jacobian_cubic(CubicCoeffs.of(*c)).coeffs == J


def test_jacobian_cubic_is_scaled_determinant():
    for c in random_int_tuples(200, 4, seed=3):
        c = CubicCoeffs.of(*c)
        U = make_cubic(c)
        det = jacobian_determinant(U, hessian_cubic(c))
        assert jacobian_cubic(c) == scale(det, Fraction(1, 3))


@pytest.mark.parametrize("c", [(1, 0, 0, 1), (1, 0, 1, 0), (0, 0, 0, 0), (2, -1, 3, 5)])
def test_cubic_syzygy_examples(c):
    assert check_syzygy_cubic(CubicCoeffs.of(*c)).is_zero()


def test_cubic_syzygy_sides_for_1010():
    # both sides equal 36 p^4 q^2 + 24 p^2 q^4 + 4 q^6
    c = CubicCoeffs.of(1, 0, 1, 0)
    J, H, U = jacobian_cubic(c), hessian_cubic(c), make_cubic(c)
    expected = (0, 0, 36, 0, 24, 0, 4)
    assert power(J, 2).coeffs == expected
    rhs = add(scale(power(H, 3), -4), scale(power(U, 2), discriminant_cubic(c)))
    assert rhs.coeffs == expected


def test_cubic_syzygy_generic_sympy():
    a, b, c, d = sp.symbols("a b c d")
    U = a * p**3 + 3 * b * p**2 * q + 3 * c * p * q**2 + d * q**3
    H = (a*c - b**2) * p**2 + (a*d - b*c) * p * q + (b*d - c**2) * q**2
    J = ((2*b**3 + a**2*d - 3*a*b*c) * p**3 + 3*(a*b*d + b**2*c - 2*a*c**2) * p**2*q
         + 3*(2*b**2*d - b*c**2 - a*c*d) * p*q**2 + (3*b*c*d - a*d**2 - 2*c**3) * q**3)
    D = a**2*d**2 - 3*b**2*c**2 + 4*a*c**3 + 4*b**3*d - 6*a*b*c*d
    assert sp.expand(J**2 + 4 * H**3 - D * U**2) == 0


# -- quartic invariants and covariants ----------------------------------------

@pytest.mark.parametrize("c, S, T", [
    ((1, 0, 0, 0, 1), 1, 0),
    ((1, 0, 1, 0, 1), 4, 0),
    ((0, 0, 0, 0, 0), 0, 0),
])
def test_S_T(c, S, T):
    c = QuarticCoeffs.of(*c)
    assert invariant_S(c) == S
    assert invariant_T(c) == T


@pytest.mark.parametrize("c, H", [
    ((1, 0, 0, 0, 1), (0, 0, 1, 0, 0)),
    ((1, 1, 1, 1, 1), (0, 0, 0, 0, 0)),
    ((0, 0, 0, 0, 0), (0, 0, 0, 0, 0)),
])
def test_hessian_quartic(c, H):
    assert hessian_quartic(QuarticCoeffs.of(*c)).coeffs == H


@pytest.mark.parametrize("c, J", [
    ((1, 0, 0, 0, 1), (0, 1, 0, 0, 0, -1, 0)),
    ((0, 0, 0, 0, 0), (0,) * 7),
    ((1, 1, 1, 1, 1), (0,) * 7),
])
def test_jacobian_quartic(c, J):
    assert jacobian_quartic(QuarticCoeffs.of(*c)).coeffs == J


@pytest.mark.parametrize("c", [(1, 0, 0, 0, 1), (1, 1, 1, 1, 1), (0, 0, 0, 0, 0),
                               (3, -2, 1, 7, -5)])
def test_quartic_syzygy_examples(c):
    assert check_syzygy_quartic(QuarticCoeffs.of(*c)).is_zero()


def test_quartic_syzygy_sides_for_10001():
    # J^2 = p^2 q^2 (p^4 - q^4)^2 and -4H^3 + S U^2 H = the same with T = 0
    c = QuarticCoeffs.of(1, 0, 0, 0, 1)
    expected = from_sympy(p**2 * q**2 * (p**4 - q**4) ** 2, 12)
    assert power(jacobian_quartic(c), 2) == expected


def test_syzygy_detects_wrong_normalization():
    c = QuarticCoeffs.of(3, -2, 1, 7, -5)
    U, H = make_quartic(c), hessian_quartic(c)
    J_wrong = scale(jacobian_determinant(U, H), Fraction(1, 4))
    S, T = invariant_S(c), invariant_T(c)
    residual = add(add(power(J_wrong, 2), scale(power(H, 3), 4)),
                   add(scale(multiply(power(U, 2), H), -S), scale(power(U, 3), T)))
    assert not residual.is_zero()


# -- invariance and degenerate forms ------------------------------------------

@given(st.tuples(*[small_ints] * 4))
def test_discriminant_invariant_under_swap(c):
    swapped = symplectic_swap(c)
    assert discriminant_cubic(CubicCoeffs.of(*swapped)) == discriminant_cubic(CubicCoeffs.of(*c))


@given(st.tuples(*[small_ints] * 5))
def test_S_T_invariant_under_swap(c):
    s = QuarticCoeffs.of(*symplectic_swap(c))
    c = QuarticCoeffs.of(*c)
    assert invariant_S(s) == invariant_S(c)
    assert invariant_T(s) == invariant_T(c)


def test_swap_is_the_substitution():
    c = (2, -1, 3, 5)
    f = make_cubic(CubicCoeffs.of(*c))
    g = make_cubic(CubicCoeffs.of(*symplectic_swap(c)))
    for x, y in [(1, 2), (Fraction(1, 3), -4), (0, 1)]:
        assert evaluate(g, x, y) == evaluate(f, y, -x)


def _perfect_power_salmon(alpha, beta, n):
    # (alpha p + beta q)^n has binomial labels alpha^(n-k) beta^k
    return tuple(alpha ** (n - k) * beta ** k for k in range(n + 1))


@given(rationals, rationals)
def test_perfect_powers_have_vanishing_hessian(alpha, beta):
    c3 = CubicCoeffs.of(*_perfect_power_salmon(alpha, beta, 3))
    c4 = QuarticCoeffs.of(*_perfect_power_salmon(alpha, beta, 4))
    assert make_cubic(c3) == power(BinaryForm((alpha, beta)), 3)
    assert hessian_cubic(c3).is_zero()
    assert hessian_quartic(c4).is_zero()
    assert discriminant_cubic(c3) == 0


def test_invariants_dispatch():
    assert invariants((1, 0, 0, 1)).D == 1
    inv = invariants((1, 0, 0, 0, 1))
    assert (inv.S, inv.T, inv.disc) == (1, 0, 1)
    with pytest.raises(DegreeError):
        invariants((1, 2, 3))


@given(st.tuples(*[small_ints] * 5))
def test_quartic_disc_field(c):
    inv = invariants(c)
    assert inv.disc == inv.S ** 3 - 27 * inv.T ** 2

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from quanticflow.binary_forms import (
    CUBIC_JACOBIAN_DIVISOR,
    P,
    QUARTIC_JACOBIAN_DIVISOR,
    DegreeError,
    make_quartic,
    multiply,
    poisson_bracket,
    scale,
)
from quanticflow.covariant_dynamics import (
    QUARTIC_HESSIAN_RATIO,
    QUARTIC_JACOBIAN_RATIO,
    HamiltonianSpec,
    all_residuals,
    conserved_brackets,
    covariant_F,
    g_constants,
    g_forms,
    quartic_disc_relation,
    verify_Fdot_is_minus_J,
    verify_scalar_odes,
    verify_vector_ode,
)
from quanticflow.weierstrass import LatticeClass

from conftest import random_int_tuples, small_ints
from oracles import derive_constants

cubic = HamiltonianSpec.cubic
quartic = HamiltonianSpec.quartic


# -- F and g constants ---------------------------------------------------------

@pytest.mark.parametrize("h, expected", [
    (cubic(1, 0, 0, 1), (0, -1, 0)),
    (quartic(1, 0, 0, 0, 1), (0, 0, -4, 0, 0)),
    (cubic(1, 1, 1, 1), (0, 0, 0)),
])
def test_covariant_F(h, expected):
    assert covariant_F(h).coeffs == expected


def test_covariant_F_rejects_degree_two():
    with pytest.raises(DegreeError):
        covariant_F(HamiltonianSpec(2, (1, 0, 1)))


def test_psi_is_form_over_degree():
    h = quartic(1, 2, 3, 4, 5)
    assert h.psi == scale(make_quartic(h.salmon), Fraction(1, 4))


def test_g_constants_cubic_example():
    ep = g_constants(cubic(1, 0, 0, 1), Fraction(1, 3))
    assert (ep.g2, ep.g3) == (0, -1)
    assert ep.weierstrass_disc == -27
    assert ep.lattice_class is LatticeClass.EQUIANHARMONIC


def test_g_constants_quartic_example():
    ep = g_constants(quartic(1, 0, 0, 0, 1), Fraction(1, 2))
    assert (ep.g2, ep.g3) == (64, 0)
    assert ep.lattice_class is LatticeClass.LEMNISCATIC


@pytest.mark.parametrize("h", [cubic(2, -1, 3, 5), quartic(3, -2, 1, 7, -5)])
def test_g_constants_zero_energy(h):
    ep = g_constants(h, 0)
    assert ep.g2 == 0 and ep.g3 == 0
    assert ep.lattice_class is LatticeClass.DEGENERATE


def test_g_constants_float_energy():
    ep = g_constants(cubic(1, 0, 0, 1), 1 / 3)
    assert ep.g2 == 0.0
    assert ep.g3 == pytest.approx(-1.0, rel=1e-15)
    assert ep.lattice_class is LatticeClass.EQUIANHARMONIC


def test_g_forms_match_g_constants_pointwise():
    h = quartic(3, -2, 1, 7, -5)
    g2, g3 = g_forms(h)
    for x, y in [(1, 2), (Fraction(-1, 3), Fraction(5, 7))]:
        psi0 = h.psi(x, y)
        ep = g_constants(h, psi0)
        assert g2(x, y) == ep.g2 and g3(x, y) == ep.g3


# -- exact dynamical identities -----------------------------------------------

def test_vector_ode_examples():
    h = cubic(1, 0, 0, 1)
    acc = poisson_bracket(h.psi, poisson_bracket(h.psi, P))
    assert acc.coeffs == (0, -2, 0, 0)  # -2 p^2 q
    assert all(r.is_zero() for r in verify_vector_ode(h))

    h = quartic(1, 0, 0, 0, 1)
    acc = poisson_bracket(h.psi, poisson_bracket(h.psi, P))
    assert acc.coeffs == (0, 0, -3, 0, 0, 0)  # -3 p^3 q^2
    assert all(r.is_zero() for r in verify_vector_ode(h))

    h = cubic(1, 1, 1, 1)
    acc = poisson_bracket(h.psi, poisson_bracket(h.psi, P))
    assert acc.is_zero() and h.F.is_zero()
    assert all(r.is_zero() for r in verify_vector_ode(h))


def test_vector_ode_factor_two_fails_for_quartics():
    # the cubic factor 2 in z'' = 2Fz is wrong for quartics, which need 3/4
    h = quartic(1, 0, 0, 0, 1)
    acc = poisson_bracket(h.psi, poisson_bracket(h.psi, P))
    assert acc != scale(multiply(h.F, P), 2)


def test_scalar_ode_examples():
    h = cubic(1, 0, 0, 1)
    assert h.Fdot.coeffs == (-1, 0, 0, 1)  # q^3 - p^3
    assert all(r.is_zero() for r in verify_scalar_odes(h))

    h = quartic(1, 0, 0, 0, 1)
    # Fdot = -8 pq (p^4 - q^4)
    assert h.Fdot.coeffs == (0, -8, 0, 0, 0, 8, 0)
    Fddot = poisson_bracket(h.psi, h.Fdot)
    assert Fddot.coeffs == (-8, 0, 0, 0, 80, 0, 0, 0, -8)
    assert all(r.is_zero() for r in verify_scalar_odes(h))


def test_Fdot_minus_J_examples():
    assert verify_Fdot_is_minus_J(cubic(1, 0, 0, 1)).is_zero()
    assert verify_Fdot_is_minus_J(quartic(1, 0, 0, 0, 1)).is_zero()
    assert verify_Fdot_is_minus_J(cubic(0, 0, 0, 0)).is_zero()
    assert verify_Fdot_is_minus_J(quartic(0, 0, 0, 0, 0)).is_zero()


@pytest.mark.parametrize("c", [(1, 0, 0, 0, 1), (1, 1, 1, 1, 1), (0, 0, 0, 0, 0)])
def test_disc_relation_examples(c):
    assert quartic_disc_relation(quartic(*c)).is_zero()


def test_disc_relation_requires_quartic():
    with pytest.raises(DegreeError):
        quartic_disc_relation(cubic(1, 0, 0, 1))


@pytest.mark.parametrize("degree", [3, 4])
def test_all_identities_on_random_forms(degree):
    for c in random_int_tuples(150, degree + 1, seed=100 + degree):
        res = all_residuals(HamiltonianSpec(degree, c))
        bad = [name for name, f in res.items() if not f.is_zero()]
        assert not bad, (c, bad)


def test_all_identities_with_rational_coefficients():
    h = quartic("1/2", "-2/3", "5/7", 3, "-11/5")
    assert all(f.is_zero() for f in all_residuals(h).values())
    h = cubic("3/4", "-1/9", 2, "7/3")
    assert all(f.is_zero() for f in all_residuals(h).values())


@pytest.mark.parametrize("degree", [3, 4])
def test_conserved_brackets(degree):
    for c in random_int_tuples(30, degree + 1, seed=7 * degree):
        assert all(f.is_zero() for f in conserved_brackets(HamiltonianSpec(degree, c)))


@given(st.tuples(*[small_ints] * 5), st.fractions(min_value=-5, max_value=5,
                                                 max_denominator=7))
def test_F_is_quadratic_in_coefficients(c, mu):
    for degree in (3, 4):
        base = HamiltonianSpec(degree, c[:degree + 1])
        scaled = HamiltonianSpec(degree, tuple(mu * x for x in c[:degree + 1]))
        assert scaled.F == scale(base.F, mu * mu)


# -- derivation of the normalization constants --------------------------------

def test_normalizations_derived_by_oracle():
    d = derive_constants()
    assert d["quartic_k2"] == {64}          # J = det / (+-8)
    assert d["cubic_k2"] == {9}             # J = det / (+-3)
    assert d["F_over_H"] == {-4}            # H = -F/4
    assert d["Fdot_over_det"] == {-1}       # Fdot = -det = -8 J  fixes J = det/8
    assert d["cubic_F_over_H"] == {-1}
    assert d["cubic_Fdot_over_det"] == {Fraction(-1, 3)}  # Fdot = -J with J = det/3
    assert QUARTIC_JACOBIAN_DIVISOR == 8 and CUBIC_JACOBIAN_DIVISOR == 3
    assert QUARTIC_HESSIAN_RATIO == 4 and QUARTIC_JACOBIAN_RATIO == 8


# -- generic symbolic proof ---------------------------------------------------

def test_identities_hold_generically():
    p, q, a, b, c, d, e = sp.symbols("p q a b c d e")

    def X(f, g):
        return sp.expand(sp.diff(f, p) * sp.diff(g, q) - sp.diff(f, q) * sp.diff(g, p))

    U = a*p**4 + 4*b*p**3*q + 6*c*p**2*q**2 + 4*d*p*q**3 + e*q**4
    psi = U / 4
    G = ((b**2 - a*c)*p**4 + 2*(b*c - a*d)*p**3*q + (3*c**2 - 2*b*d - a*e)*p**2*q**2
         + 2*(c*d - b*e)*p*q**3 + (d**2 - c*e)*q**4)
    F = 4 * G
    S = a*e - 4*b*d + 3*c**2
    T = a*c*e + 2*b*c*d - a*d**2 - b**2*e - c**3
    g2, g3 = S * (16*psi)**2, T * (16*psi)**3
    Fdot = X(psi, F)
    assert sp.expand(Fdot**2 - 4*F**3 + g2*F + g3) == 0
    assert sp.expand(X(psi, Fdot) - 6*F**2 + g2/2) == 0
    assert sp.expand(X(psi, X(psi, p)) - sp.Rational(3, 4)*F*p) == 0

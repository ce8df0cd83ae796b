"""Covariants of a homogeneous Hamiltonian and the dynamics they obey.

For a Hamiltonian ``psi`` with ``3 psi`` a binary cubic (or ``4 psi`` a
quartic) the scalar covariant ``F`` is minus the Hessian (resp. minus four
times it).  Along the Hamiltonian flow ``F`` satisfies the Weierstrass
equation ``F'^2 = 4F^3 - g2 F - g3`` with ``g2`` and ``g3`` built from the
invariants and the (conserved) energy.

Every identity here is checked as an exact polynomial identity, with time
derivatives replaced by the Hamiltonian vector field ``X_psi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Union

from .binary_forms import (
    P,
    Q,
    BinaryForm,
    CubicCoeffs,
    DegreeError,
    QuarticCoeffs,
    Scalar,
    as_rational,
    binomial_form,
    discriminant_cubic,
    hessian_cubic,
    hessian_quartic,
    invariant_S,
    invariant_T,
    jacobian_cubic,
    jacobian_quartic,
    linear_combination,
    multiply,
    poisson_bracket,
    power,
    scale,
)
from .weierstrass import LatticeClass, classify_lattice

# H = -F / HESSIAN_RATIO and J = -Fdot / JACOBIAN_RATIO for quartic Hamiltonians
QUARTIC_HESSIAN_RATIO = 4
QUARTIC_JACOBIAN_RATIO = 8

# z'' = lambda * F * z
VECTOR_ODE_FACTOR = {3: Fraction(2), 4: Fraction(3, 4)}


@dataclass(frozen=True)
class HamiltonianSpec:
    """Homogeneous Hamiltonian given by binomial coefficients of ``n * psi``.

    ``degree`` 3 and 4 carry the full invariant machinery.  Degree 2
    (``2 psi = a p^2 + 2b pq + c q^2``) is accepted for integrator testing.
    """

    degree: int
    coeffs: tuple

    def __post_init__(self):
        if self.degree not in (2, 3, 4):
            raise DegreeError(f"unsupported Hamiltonian degree {self.degree}")
        coeffs = tuple(as_rational(c) for c in self.coeffs)
        if len(coeffs) != self.degree + 1:
            raise ValueError(
                f"degree {self.degree} Hamiltonian needs {self.degree + 1} "
                f"coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def cubic(cls, *coeffs) -> HamiltonianSpec:
        return cls(3, tuple(CubicCoeffs.of(*coeffs)))

    @classmethod
    def quartic(cls, *coeffs) -> HamiltonianSpec:
        return cls(4, tuple(QuarticCoeffs.of(*coeffs)))

    @property
    def salmon(self):
        if self.degree == 3:
            return CubicCoeffs(*self.coeffs)
        if self.degree == 4:
            return QuarticCoeffs(*self.coeffs)
        raise DegreeError("invariants are only defined for cubics and quartics")

    @cached_property
    def U(self) -> BinaryForm:
        """The form ``n * psi``."""
        return binomial_form(self.coeffs)

    @cached_property
    def psi(self) -> BinaryForm:
        return scale(self.U, Fraction(1, self.degree))

    @cached_property
    def F(self) -> BinaryForm:
        return covariant_F(self)

    @cached_property
    def Fdot(self) -> BinaryForm:
        return poisson_bracket(self.psi, self.F)

    def to_dict(self) -> dict:
        return {"degree": self.degree, "coefficients": [str(c) for c in self.coeffs]}

    @classmethod
    def from_dict(cls, data: dict) -> HamiltonianSpec:
        return cls(int(data["degree"]), tuple(data["coefficients"]))


@dataclass(frozen=True)
class EllipticParams:
    g2: Union[Scalar, float]
    g3: Union[Scalar, float]
    weierstrass_disc: Union[Scalar, float]
    lattice_class: LatticeClass

    def to_dict(self) -> dict:
        def enc(x):
            return x if isinstance(x, (int, float)) else str(x)
        return {
            "g2": enc(self.g2),
            "g3": enc(self.g3),
            "weierstrass_disc": enc(self.weierstrass_disc),
            "lattice_class": self.lattice_class.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> EllipticParams:
        def dec(x):
            return as_rational(x) if isinstance(x, str) else x
        return cls(dec(data["g2"]), dec(data["g3"]), dec(data["weierstrass_disc"]),
                   LatticeClass(data["lattice_class"]))


def covariant_F(h: HamiltonianSpec) -> BinaryForm:
    """Scalar covariant ``F`` of the Hamiltonian.

    Cubic::

        F = (b^2 - ac) p^2 + (bc - ad) pq + (c^2 - bd) q^2

    Quartic: ``F = 4G`` with
    ``G = (b^2-ac) p^4 + 2(bc-ad) p^3 q + (3c^2-2bd-ae) p^2 q^2 + 2(cd-be) p q^3 + (d^2-ce) q^4``.
    """
    if h.degree == 3:
        a, b, c, d = h.coeffs
        return BinaryForm((b * b - a * c, b * c - a * d, c * c - b * d))
    if h.degree == 4:
        a, b, c, d, e = h.coeffs
        G = BinaryForm((
            b * b - a * c,
            2 * (b * c - a * d),
            3 * c * c - 2 * b * d - a * e,
            2 * (c * d - b * e),
            d * d - c * e,
        ))
        return scale(G, 4)
    raise DegreeError("covariant F is defined for cubic and quartic Hamiltonians only")


def g_forms(h: HamiltonianSpec) -> tuple[BinaryForm, BinaryForm]:
    """``g2`` and ``g3`` as polynomials in ``(p, q)`` (constants of the motion).

    Cubic: ``g2 = 0``, ``g3 = -D (3 psi)^2``.
    Quartic: ``g2 = S (16 psi)^2``, ``g3 = T (16 psi)^3``.
    """
    if h.degree == 3:
        D = discriminant_cubic(h.salmon)
        return BinaryForm.zero(6), scale(power(h.U, 2), -D)
    if h.degree == 4:
        c = h.salmon
        sixteen_psi = scale(h.psi, 16)
        return (scale(power(sixteen_psi, 2), invariant_S(c)),
                scale(power(sixteen_psi, 3), invariant_T(c)))
    raise DegreeError("g2, g3 are defined for cubic and quartic Hamiltonians only")


def g_constants(h: HamiltonianSpec, psi0, tol: float = 1e-12) -> EllipticParams:
    """Weierstrass invariants ``(g2, g3)`` on the energy level ``psi = psi0``.

    Exact when ``psi0`` is rational, floating point otherwise (then ``tol``
    is used for the lattice classification).
    """
    exact = isinstance(psi0, (int, Fraction))
    if exact:
        psi0 = as_rational(psi0)
    else:
        psi0 = float(psi0)
    if h.degree == 3:
        D = discriminant_cubic(h.salmon)
        g2 = 0
        g3 = -D * (3 * psi0) ** 2
    elif h.degree == 4:
        c = h.salmon
        g2 = invariant_S(c) * (16 * psi0) ** 2
        g3 = invariant_T(c) * (16 * psi0) ** 3
    else:
        raise DegreeError("g constants are defined for cubic and quartic Hamiltonians only")
    if exact:
        g2, g3 = as_rational(Fraction(g2)), as_rational(Fraction(g3))
    else:
        g2, g3 = float(g2), float(g3)
    disc = g2 ** 3 - 27 * g3 ** 2
    cls = classify_lattice(g2, g3, tol=0 if exact else tol)
    return EllipticParams(g2, g3, disc, cls)


def verify_vector_ode(h: HamiltonianSpec) -> tuple[BinaryForm, BinaryForm]:
    """Residuals of ``z'' = lambda F z`` (lambda = 2 for cubics, 3/4 for quartics)."""
    lam = VECTOR_ODE_FACTOR.get(h.degree)
    if lam is None:
        raise DegreeError("vector ODE is stated for cubic and quartic Hamiltonians")
    psi, F = h.psi, h.F
    out = []
    for coord in (P, Q):
        acc = poisson_bracket(psi, poisson_bracket(psi, coord))
        out.append(linear_combination([(1, acc), (-lam, multiply(F, coord))]))
    return out[0], out[1]


def verify_scalar_odes(h: HamiltonianSpec) -> tuple[BinaryForm, BinaryForm]:
    """Residuals of ``F'' = 6F^2 - g2/2`` and ``F'^2 = 4F^3 - g2 F - g3``.

    For cubics ``g2`` vanishes, giving ``F'' = 6F^2`` and ``F'^2 = 4F^3 - g3``.
    """
    psi, F, Fdot = h.psi, h.F, h.Fdot
    g2, g3 = g_forms(h)
    Fddot = poisson_bracket(psi, Fdot)
    F2 = power(F, 2)
    second = linear_combination([(1, Fddot), (-6, F2)] + (
        [(Fraction(1, 2), g2)] if h.degree == 4 else []))
    first = linear_combination([
        (1, power(Fdot, 2)),
        (-4, multiply(F2, F)),
        (1, multiply(g2, F) if h.degree == 4 else BinaryForm.zero(3 * F.degree)),
        (1, g3),
    ])
    return second, first


def verify_Fdot_is_minus_J(h: HamiltonianSpec) -> BinaryForm:
    """Residual of ``F' = -J`` (cubic) or ``F' = -8J`` (quartic)."""
    if h.degree == 3:
        return linear_combination([(1, h.Fdot), (1, jacobian_cubic(h.salmon))])
    if h.degree == 4:
        return linear_combination([(1, h.Fdot),
                                   (QUARTIC_JACOBIAN_RATIO, jacobian_quartic(h.salmon))])
    raise DegreeError("J is defined for cubic and quartic Hamiltonians only")


def verify_hessian_is_minus_F(h: HamiltonianSpec) -> BinaryForm:
    """Residual of ``H = -F`` (cubic) or ``H = -F/4`` (quartic)."""
    if h.degree == 3:
        return linear_combination([(1, hessian_cubic(h.salmon)), (1, h.F)])
    if h.degree == 4:
        return linear_combination([(QUARTIC_HESSIAN_RATIO, hessian_quartic(h.salmon)),
                                   (1, h.F)])
    raise DegreeError("H is defined for cubic and quartic Hamiltonians only")


def quartic_disc_relation(h: HamiltonianSpec) -> BinaryForm:
    """Residual of ``g2^3 - 27 g3^2 = (S^3 - 27T^2)(16 psi)^6`` as a polynomial."""
    if h.degree != 4:
        raise DegreeError("the discriminant relation concerns quartic Hamiltonians")
    c = h.salmon
    g2, g3 = g_forms(h)
    S, T = invariant_S(c), invariant_T(c)
    return linear_combination([
        (1, power(g2, 3)),
        (-27, power(g3, 2)),
        (-(S ** 3 - 27 * T * T), power(scale(h.psi, 16), 6)),
    ])


def conserved_brackets(h: HamiltonianSpec) -> tuple[BinaryForm, ...]:
    """``X_psi`` applied to ``psi``, ``g2`` and ``g3``; all zero forms."""
    g2, g3 = g_forms(h)
    return tuple(poisson_bracket(h.psi, f) if f.degree else f for f in (h.psi, g2, g3))


def all_residuals(h: HamiltonianSpec) -> dict[str, BinaryForm]:
    """Every exact identity for ``h`` keyed by name; each should be the zero form."""
    from .binary_forms import check_syzygy_cubic, check_syzygy_quartic

    out = {}
    if h.degree == 3:
        out["syzygy"] = check_syzygy_cubic(h.salmon)
    else:
        out["syzygy"] = check_syzygy_quartic(h.salmon)
    out["hessian_F"] = verify_hessian_is_minus_F(h)
    out["vector_ode_p"], out["vector_ode_q"] = verify_vector_ode(h)
    out["second_order_F"], out["weierstrass_F"] = verify_scalar_odes(h)
    out["Fdot_J"] = verify_Fdot_is_minus_J(h)
    if h.degree == 4:
        out["disc_relation"] = quartic_disc_relation(h)
    return out

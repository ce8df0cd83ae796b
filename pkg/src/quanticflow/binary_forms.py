"""Exact binary forms in two variables ``(p, q)``.

Coefficients are stored in the raw monomial basis: ``coeffs[k]`` multiplies
``p**(degree - k) * q**k``.  The binomially weighted labels ``a, b, c, ...``
used in classical invariant theory only appear in :func:`make_cubic` and
:func:`make_quartic`.

All arithmetic is exact.  Coefficients are Python ints where possible and
:class:`fractions.Fraction` otherwise, which keeps integer-heavy identity
checks fast while remaining fully rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from numbers import Rational
from typing import Iterable, NamedTuple, Sequence, Union

Scalar = Union[int, Fraction]


class DegreeError(ValueError):
    """Raised when an operation receives a form of unsuitable degree."""


def as_rational(x) -> Scalar:
    """Coerce ``x`` to an exact rational (int when integral).

    Strings such as ``"-3/2"`` are accepted.  Floats are rejected because
    they would silently smuggle rounding into exact computations.
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return as_rational(Fraction(x.strip()))
    if isinstance(x, Rational):
        return as_rational(Fraction(x.numerator, x.denominator))
    raise TypeError(f"cannot use {x!r} as an exact rational")


def _norm(x: Scalar) -> Scalar:
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


@dataclass(frozen=True)
class BinaryForm:
    """Homogeneous polynomial ``sum(coeffs[k] * p**(n-k) * q**k)``."""

    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("a binary form needs at least one coefficient")
        object.__setattr__(self, "coeffs", tuple(as_rational(c) for c in self.coeffs))

    @classmethod
    def zero(cls, degree: int) -> BinaryForm:
        return cls((0,) * (degree + 1))

    @classmethod
    def constant(cls, value) -> BinaryForm:
        return cls((value,))

    @classmethod
    def from_dict(cls, degree: int, terms: dict) -> BinaryForm:
        """Build from ``{(i, j): coeff}`` meaning ``coeff * p**i * q**j``."""
        coeffs = [0] * (degree + 1)
        for (i, j), c in terms.items():
            if i + j != degree:
                raise DegreeError(f"monomial p^{i} q^{j} is not of degree {degree}")
            coeffs[j] += as_rational(c)
        return cls(tuple(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    @cached_property
    def _float_coeffs(self) -> tuple:
        return tuple(float(c) for c in self.coeffs)

    def __call__(self, p, q):
        return evaluate(self, p, q)

    def __add__(self, other: BinaryForm) -> BinaryForm:
        return add(self, other)

    def __sub__(self, other: BinaryForm) -> BinaryForm:
        return add(self, scale(other, -1))

    def __neg__(self) -> BinaryForm:
        return scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, BinaryForm):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, k) -> BinaryForm:
        return scale(self, Fraction(1) / as_rational(k))

    def __pow__(self, n: int) -> BinaryForm:
        return power(self, n)

    def __str__(self) -> str:
        return format_form(self)


P = BinaryForm((1, 0))
Q = BinaryForm((0, 1))


class CubicCoeffs(NamedTuple):
    """``a p^3 + 3b p^2 q + 3c p q^2 + d q^3`` in binomial labelling."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar

    @classmethod
    def of(cls, *values) -> CubicCoeffs:
        if len(values) == 1 and not isinstance(values[0], (int, str, Fraction)):
            values = tuple(values[0])
        return cls(*(as_rational(v) for v in values))


class QuarticCoeffs(NamedTuple):
    """``a p^4 + 4b p^3 q + 6c p^2 q^2 + 4d p q^3 + e q^4`` in binomial labelling."""

    a: Scalar
    b: Scalar
    c: Scalar
    d: Scalar
    e: Scalar

    @classmethod
    def of(cls, *values) -> QuarticCoeffs:
        if len(values) == 1 and not isinstance(values[0], (int, str, Fraction)):
            values = tuple(values[0])
        return cls(*(as_rational(v) for v in values))


@dataclass(frozen=True)
class InvariantSet:
    """Scalar invariants of a cubic (``D``) or quartic (``S``, ``T``, ``disc``)."""

    degree: int
    D: Scalar | None = None
    S: Scalar | None = None
    T: Scalar | None = None
    disc: Scalar | None = None

    def as_dict(self) -> dict:
        out = {"degree": self.degree}
        for name in ("D", "S", "T", "disc"):
            value = getattr(self, name)
            if value is not None:
                out[name] = str(value)
        return out


# -- construction -------------------------------------------------------------

def binomial_form(values: Sequence) -> BinaryForm:
    """Raw form from binomially weighted coefficients ``sum C(n,k) v_k p^(n-k) q^k``."""
    n = len(values) - 1
    return BinaryForm(tuple(comb(n, k) * as_rational(v) for k, v in enumerate(values)))


def make_cubic(c: CubicCoeffs) -> BinaryForm:
    return binomial_form(c)


def make_quartic(c: QuarticCoeffs) -> BinaryForm:
    return binomial_form(c)


# -- evaluation and arithmetic ------------------------------------------------

def evaluate(f: BinaryForm, p, q):
    """Value of ``f`` at ``(p, q)``.

    Exact when both arguments are rational; floating point otherwise.
    """
    exact = isinstance(p, (int, Fraction)) and isinstance(q, (int, Fraction))
    coeffs = f.coeffs if exact else f._float_coeffs
    if not exact:
        p, q = float(p), float(q)
    n = len(coeffs) - 1
    # sum_k c_k p^(n-k) q^k, accumulated with running powers of q
    total = 0
    qk = 1
    p_pows = [1] * (n + 1)
    for i in range(1, n + 1):
        p_pows[i] = p_pows[i - 1] * p
    for k, ck in enumerate(coeffs):
        if ck:
            total += ck * p_pows[n - k] * qk
        qk *= q
    if exact:
        return _norm(Fraction(total)) if isinstance(total, Fraction) else total
    return float(total)


def add(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    if f.degree != g.degree:
        raise DegreeError(f"cannot add forms of degree {f.degree} and {g.degree}")
    return BinaryForm(tuple(_norm(x + y) for x, y in zip(f.coeffs, g.coeffs)))


def scale(f: BinaryForm, k) -> BinaryForm:
    k = as_rational(k)
    return BinaryForm(tuple(_norm(k * c) for c in f.coeffs))


def multiply(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    out = [0] * (f.degree + g.degree + 1)
    gc = g.coeffs
    for i, x in enumerate(f.coeffs):
        if not x:
            continue
        for j, y in enumerate(gc):
            if y:
                out[i + j] += x * y
    return BinaryForm(tuple(_norm(c) for c in out))


def power(f: BinaryForm, n: int) -> BinaryForm:
    if n < 0:
        raise ValueError("negative powers are not polynomials")
    result = BinaryForm.constant(1)
    base = f
    while n:
        if n & 1:
            result = multiply(result, base)
        n >>= 1
        if n:
            base = multiply(base, base)
    return result


def linear_combination(terms: Iterable[tuple]) -> BinaryForm:
    """``sum(k * f)`` over ``(k, f)`` pairs of a common degree."""
    terms = list(terms)
    degree = terms[0][1].degree
    out = [0] * (degree + 1)
    for k, f in terms:
        if f.degree != degree:
            raise DegreeError("linear combination of forms of different degree")
        k = as_rational(k)
        for i, c in enumerate(f.coeffs):
            out[i] += k * c
    return BinaryForm(tuple(_norm(c) for c in out))


# -- calculus -----------------------------------------------------------------

def partial_p(f: BinaryForm) -> BinaryForm:
    n = f.degree
    if n < 1:
        raise DegreeError("cannot differentiate a form of degree 0")
    return BinaryForm(tuple((n - k) * f.coeffs[k] for k in range(n)))


def partial_q(f: BinaryForm) -> BinaryForm:
    n = f.degree
    if n < 1:
        raise DegreeError("cannot differentiate a form of degree 0")
    return BinaryForm(tuple(k * f.coeffs[k] for k in range(1, n + 1)))


def poisson_bracket(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """``X_f(g) = f_p g_q - f_q g_p``.

    With Hamilton's equations ``p' = -psi_q``, ``q' = psi_p`` this is the
    time derivative of ``g`` along the flow of ``psi = f``.
    """
    if f.degree < 1 or g.degree < 1:
        raise DegreeError("Poisson bracket needs forms of degree >= 1")
    return add(multiply(partial_p(f), partial_q(g)),
               scale(multiply(partial_q(f), partial_p(g)), -1))


# -- classical invariants and covariants --------------------------------------

def discriminant_cubic(c: CubicCoeffs) -> Scalar:
    a, b, c_, d = c
    return _norm(a * a * d * d - 3 * b * b * c_ * c_ + 4 * a * c_ ** 3
                 + 4 * b ** 3 * d - 6 * a * b * c_ * d)


def hessian_cubic(c: CubicCoeffs) -> BinaryForm:
    a, b, c_, d = c
    return BinaryForm((a * c_ - b * b, a * d - b * c_, b * d - c_ * c_))


def jacobian_cubic(c: CubicCoeffs) -> BinaryForm:
    a, b, c_, d = c
    return BinaryForm((
        2 * b ** 3 + a * a * d - 3 * a * b * c_,
        3 * (a * b * d + b * b * c_ - 2 * a * c_ * c_),
        3 * (2 * b * b * d - b * c_ * c_ - a * c_ * d),
        3 * b * c_ * d - a * d * d - 2 * c_ ** 3,
    ))


def invariant_S(c: QuarticCoeffs) -> Scalar:
    a, b, c_, d, e = c
    return _norm(a * e - 4 * b * d + 3 * c_ * c_)


def invariant_T(c: QuarticCoeffs) -> Scalar:
    a, b, c_, d, e = c
    return _norm(a * c_ * e + 2 * b * c_ * d - a * d * d - b * b * e - c_ ** 3)


def hessian_quartic(c: QuarticCoeffs) -> BinaryForm:
    a, b, c_, d, e = c
    return BinaryForm((
        a * c_ - b * b,
        2 * (a * d - b * c_),
        a * e + 2 * b * d - 3 * c_ * c_,
        2 * (b * e - c_ * d),
        c_ * e - d * d,
    ))


def jacobian_determinant(f: BinaryForm, g: BinaryForm) -> BinaryForm:
    """``f_p g_q - f_q g_p`` (same polynomial as the Poisson bracket)."""
    return poisson_bracket(f, g)


# Divisors turning the Jacobian determinant U_p H_q - U_q H_p into the
# normalized cubic/sextic covariants that satisfy the classical syzygies.
CUBIC_JACOBIAN_DIVISOR = 3
QUARTIC_JACOBIAN_DIVISOR = 8


def jacobian_quartic(c: QuarticCoeffs) -> BinaryForm:
    U = make_quartic(c)
    return scale(jacobian_determinant(U, hessian_quartic(c)),
                 Fraction(1, QUARTIC_JACOBIAN_DIVISOR))


def invariants(c) -> InvariantSet:
    """Invariant set of a cubic or quartic coefficient tuple."""
    if len(c) == 4:
        return InvariantSet(3, D=discriminant_cubic(CubicCoeffs.of(c)))
    if len(c) == 5:
        c = QuarticCoeffs.of(c)
        S, T = invariant_S(c), invariant_T(c)
        return InvariantSet(4, S=S, T=T, disc=_norm(S ** 3 - 27 * T * T))
    raise DegreeError(f"expected 4 or 5 coefficients, got {len(c)}")


def check_syzygy_cubic(c: CubicCoeffs) -> BinaryForm:
    """Residual ``J^2 + 4H^3 - D U^2``; the zero form when Cayley's identity holds."""
    c = CubicCoeffs.of(c)
    U, H, J = make_cubic(c), hessian_cubic(c), jacobian_cubic(c)
    D = discriminant_cubic(c)
    return linear_combination([
        (1, power(J, 2)),
        (4, power(H, 3)),
        (-D, power(U, 2)),
    ])


def check_syzygy_quartic(c: QuarticCoeffs) -> BinaryForm:
    """Residual ``J^2 + 4H^3 - S U^2 H + T U^3``."""
    c = QuarticCoeffs.of(c)
    U, H, J = make_quartic(c), hessian_quartic(c), jacobian_quartic(c)
    S, T = invariant_S(c), invariant_T(c)
    U2 = power(U, 2)
    return linear_combination([
        (1, power(J, 2)),
        (4, power(H, 3)),
        (-S, multiply(U2, H)),
        (T, multiply(U2, U)),
    ])


def symplectic_swap(values: Sequence) -> tuple:
    """Binomial coefficients of ``f(q, -p)`` given those of ``f(p, q)``.

    The substitution has determinant one, so every invariant is unchanged.
    """
    n = len(values) - 1
    # C(n,k) v_k q^(n-k) (-p)^k lands on p^(n-j) q^j with j = n - k
    return tuple(as_rational((-1) ** (n - j) * values[n - j]) for j in range(n + 1))


# -- formatting ---------------------------------------------------------------

def _monomial(i: int, j: int) -> str:
    parts = []
    if i:
        parts.append("p" if i == 1 else f"p^{i}")
    if j:
        parts.append("q" if j == 1 else f"q^{j}")
    return "*".join(parts)


def format_form(f: BinaryForm) -> str:
    n = f.degree
    pieces = []
    for k, c in enumerate(f.coeffs):
        if c == 0:
            continue
        mono = _monomial(n - k, k)
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        elif mono:
            body = f"{mag}*{mono}"
        else:
            body = str(mag)
        sign = "-" if c < 0 else "+"
        pieces.append((sign, body))
    if not pieces:
        return "0"
    first_sign, first = pieces[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out

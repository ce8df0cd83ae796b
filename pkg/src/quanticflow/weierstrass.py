"""Weierstrass ``p`` function on the real axis.

Evaluation uses the Laurent expansion at the origin as a seed and then the
duplication formula.  Real half-periods and the inverse function come from
the elliptic integral ``int_x^inf ds / sqrt(4s^3 - g2 s - g3)`` after a
substitution that leaves smooth integrands on finite intervals.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

MAX_DOUBLINGS = 40
LAURENT_MAX_TERMS = 60
# Seed radius in units of the lattice scale max(|g2|^(1/4), |g3|^(1/6)).
# The Laurent series converges out to at least 2.81 in these units.  Seeding
# far from the pole matters: duplication preserves the seed's rounding
# residual eps*p(z)^3 as an effective shift of g3.
SEED_RADIUS = 1.0
QUAD_RTOL = 1e-13


class LatticeClass(str, enum.Enum):
    GENERAL = "general"
    EQUIANHARMONIC = "equianharmonic"
    LEMNISCATIC = "lemniscatic"
    DEGENERATE = "degenerate"


class DegenerateLatticeError(ValueError):
    pass


class PoleProximityError(ValueError):
    def __init__(self, t: float):
        super().__init__(f"argument t={t!r} is within tolerance of a pole")
        self.t = t


class FitError(ValueError):
    pass


def invariant_scale(g2, g3) -> float:
    """Magnitude of ``p`` set by the invariants: ``max(|g2|^(1/2), |g3|^(1/3))``."""
    return max(abs(float(g2)) ** 0.5, abs(float(g3)) ** (1.0 / 3.0))


def classify_lattice(g2, g3, tol: float = 1e-12) -> LatticeClass:
    """Classify the period lattice from its invariants.

    Comparisons are homogeneous: ``g2`` is measured against ``tol*sigma^2``,
    ``g3`` against ``tol*sigma^3`` and ``g2^3 - 27 g3^2`` against
    ``tol*sigma^6`` with ``sigma`` from :func:`invariant_scale`.  ``tol=0``
    gives exact comparisons, which is what rational inputs want.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    if tol == 0:
        disc = g2 ** 3 - 27 * g3 ** 2
        g2_small, g3_small, disc_small = g2 == 0, g3 == 0, disc == 0
    else:
        g2, g3 = float(g2), float(g3)
        s = invariant_scale(g2, g3)
        if s == 0:
            return LatticeClass.DEGENERATE
        # unit-scale copies keep the cubes and squares in range
        n2, n3 = g2 / s / s, g3 / s / s / s
        g2_small = abs(n2) <= tol
        g3_small = abs(n3) <= tol
        disc_small = abs(n2 ** 3 - 27 * n3 ** 2) <= tol
    if g2_small and not g3_small:
        return LatticeClass.EQUIANHARMONIC
    if g3_small and not g2_small:
        return LatticeClass.LEMNISCATIC
    if disc_small:
        return LatticeClass.DEGENERATE
    return LatticeClass.GENERAL


@dataclass(frozen=True)
class WpValue:
    wp: float
    wp_prime: float
    residual: float  # |wp'^2 - (4 wp^3 - g2 wp - g3)|


@dataclass(frozen=True)
class PeriodData:
    e1: float
    real_half_period: float
    degenerate: bool = False
    e2: float | None = None
    e3: float | None = None


# -- roots and periods --------------------------------------------------------

def _cubic(s, g2, g3):
    return 4 * s ** 3 - g2 * s - g3


def largest_root(g2: float, g3: float) -> float:
    """Largest real root of ``4s^3 - g2 s - g3`` by bracketed search plus Newton."""
    g2, g3 = float(g2), float(g3)
    bound = 1.0 + max(abs(g2), abs(g3)) / 4.0
    if g2 > 0:
        s_c = math.sqrt(g2 / 12.0)
        # cubic increases right of its local minimum at s_c
        if _cubic(s_c, g2, g3) <= 0:
            lo, hi = s_c, bound
        else:
            lo, hi = -bound, -s_c
    else:
        lo, hi = -bound, bound
    if _cubic(lo, g2, g3) == 0:
        return lo
    root = brentq(_cubic, lo, hi, args=(g2, g3), xtol=1e-300, rtol=1e-15,
                           maxiter=500)
    for _ in range(3):
        slope = 12 * root * root - g2
        if slope == 0:
            break
        step = _cubic(root, g2, g3) / slope
        if not math.isfinite(step):
            break
        root -= step
    return root


def cubic_roots(g2: float, g3: float) -> tuple[float, float | None, float | None]:
    """``(e1, e2, e3)`` with ``e1 >= e2 >= e3``; ``e2 = e3 = None`` when only e1 is real."""
    e1 = largest_root(g2, g3)
    # 4s^3 - g2 s - g3 = 4 (s - e1)(s^2 + e1 s + e1^2 - g2/4)
    rad = g2 - 3 * e1 * e1
    if rad < 0:
        return e1, None, None
    r = math.sqrt(rad)
    # stable pair: e2 + e3 = -e1, e2 * e3 = e1^2 - g2/4
    big = (-e1 - r) / 2 if e1 > 0 else (-e1 + r) / 2
    prod = e1 * e1 - g2 / 4
    other = prod / big if big != 0 else 0.0
    e2, e3 = max(big, other), min(big, other)
    return e1, e2, e3


def _integrands(g2: float, e1: float) -> tuple[Callable, Callable]:
    # P(s) = (s - e1) Q(s) with Q(e1 + y) = 4y^2 + 12 e1 y + (12 e1^2 - g2).
    # s = e1 + v^2 gives 2 dv / sqrt(Q), and v = 1/w maps the tail onto [0, 1].
    A = 12 * e1 * e1 - g2

    def near(v):
        y = v * v
        return 2.0 / math.sqrt(4 * y * y + 12 * e1 * y + A)

    def far(w):
        y = w * w
        return 2.0 / math.sqrt(4 + 12 * e1 * y + A * y * y)

    return near, far


def _quad(f, lo, hi) -> float:
    if hi <= lo:
        return 0.0
    val, _ = quad(f, lo, hi, epsabs=0.0, epsrel=QUAD_RTOL, limit=200)
    return val


def _unit_scale(g2: float, g3: float) -> tuple[float, float, float]:
    # p(t; g2, g3) = L^2 p(L t; g2/L^4, g3/L^6); L = sqrt(sigma) brings the
    # invariants to unit size so extreme magnitudes neither under- nor overflow
    L = math.sqrt(invariant_scale(g2, g3))
    L2 = L * L
    # divide stepwise: L**6 alone can underflow
    return L, g2 / L2 / L2, g3 / L2 / L2 / L2


@lru_cache(maxsize=512)
def real_period(g2: float, g3: float, tol: float = 1e-12) -> PeriodData:
    """Real half-period ``omega = int_{e1}^inf ds / sqrt(4s^3 - g2 s - g3)``.

    The real period of ``p`` is ``2 * omega`` for either sign of the
    discriminant.

    Raises
    ------
    DegenerateLatticeError
        When ``g2^3 - 27 g3^2`` vanishes to within ``tol``.
    """
    g2, g3 = float(g2), float(g3)
    if classify_lattice(g2, g3, tol) is LatticeClass.DEGENERATE:
        raise DegenerateLatticeError(f"degenerate lattice for g2={g2!r}, g3={g3!r}")
    L, n2, n3 = _unit_scale(g2, g3)
    e1, e2, e3 = cubic_roots(n2, n3)
    near, far = _integrands(n2, e1)
    omega = _quad(near, 0.0, 1.0) + _quad(far, 0.0, 1.0)
    L2 = L * L
    return PeriodData(e1=e1 * L2, real_half_period=omega / L, degenerate=False,
                      e2=None if e2 is None else e2 * L2,
                      e3=None if e3 is None else e3 * L2)


def wp_inverse(g2: float, g3: float, x: float) -> float:
    """The ``u`` in ``(0, omega]`` with ``p(u) = x``, for ``x >= e1`` (non-degenerate)."""
    g2, g3 = float(g2), float(g3)
    e1 = real_period(g2, g3).e1
    if x < e1:
        if x < e1 - 1e-12 * max(invariant_scale(g2, g3), abs(e1)):
            raise ValueError(f"{x!r} is below e1={e1!r}; no real preimage")
        x = e1
    L, n2, n3 = _unit_scale(g2, g3)
    e1n = e1 / (L * L)
    near, far = _integrands(n2, e1n)
    v0 = math.sqrt(max(x / (L * L) - e1n, 0.0))
    if v0 >= 1.0:
        return _quad(far, 0.0, 1.0 / v0) / L
    return (_quad(far, 0.0, 1.0) + _quad(near, v0, 1.0)) / L


# -- evaluation ---------------------------------------------------------------

@lru_cache(maxsize=256)
def laurent_coefficients(g2: float, g3: float, nterms: int = LAURENT_MAX_TERMS) -> tuple:
    """``c_k`` for ``p(z) = z^-2 + sum_{k>=2} c_k z^(2k-2)``, indices 0..nterms."""
    c = [0.0] * (nterms + 1)
    if nterms >= 2:
        c[2] = g2 / 20.0
    if nterms >= 3:
        c[3] = g3 / 28.0
    for k in range(4, nterms + 1):
        acc = 0.0
        for m in range(2, k - 1):
            acc += c[m] * c[k - m]
        c[k] = 3.0 * acc / ((2 * k + 1) * (k - 3))
    return tuple(c)


def _laurent(g2: float, g3: float, z: float) -> tuple[float, float]:
    c = laurent_coefficients(g2, g3)
    z2 = z * z
    wp = 1.0 / z2
    dwp = -2.0 / (z2 * z)
    zpow = 1.0  # z^(2k-4)
    quiet = 0
    for k in range(2, len(c)):
        term = c[k] * zpow * z2  # c_k z^(2k-2)
        wp += term
        dwp += (2 * k - 2) * c[k] * zpow * z  # (2k-2) c_k z^(2k-3)
        # individual coefficients can vanish (g2 = 0 or g3 = 0), so require a run
        quiet = quiet + 1 if abs(term) <= 1e-18 * abs(wp) else 0
        if quiet >= 3:
            break
        zpow *= z2
    return wp, dwp


def _duplicate(wp: float, dwp: float, g2: float) -> tuple[float, float]:
    # p(2t) = R^2/4 - 2p with R = p''/p',  p'' = 6p^2 - g2/2,  p''' = 12 p p'
    R = (6.0 * wp * wp - 0.5 * g2) / dwp
    return 0.25 * R * R - 2.0 * wp, 0.25 * R * (12.0 * wp - R * R) - dwp


def _degenerate_wp(g2: float, g3: float, t: float) -> tuple[float, float]:
    if g2 == 0 and g3 == 0 or g2 <= 0:
        return 1.0 / (t * t), -2.0 / (t * t * t)
    c = math.sqrt(g2 / 12.0)
    k = math.sqrt(3.0 * c)
    if g3 > 0:
        # double root -c below simple root 2c: p = -c + 3c / sin^2(kt)
        s, co = math.sin(k * t), math.cos(k * t)
        return -c + 3 * c / (s * s), -6 * c * k * co / (s * s * s)
    # double root c above simple root -2c: p = c + 3c / sinh^2(kt)
    s, co = math.sinh(k * t), math.cosh(k * t)
    return c + 3 * c / (s * s), -6 * c * k * co / (s * s * s)


def wp_eval(g2, g3, t, pole_tol: float = 1e-12, tol: float = 1e-12) -> WpValue:
    """Evaluate ``p(t)`` and ``p'(t)`` for real ``t``.

    Parameters
    ----------
    g2, g3 : float
        Lattice invariants.
    t : float
        Real argument; must stay ``pole_tol`` (relative to the real
        half-period when there is one) away from every real pole.
    tol : float
        Classification tolerance deciding when the closed degenerate forms
        are used.

    Raises
    ------
    PoleProximityError
        If ``t`` is too close to a pole.
    """
    g2, g3, t = float(g2), float(g3), float(t)
    if classify_lattice(g2, g3, tol) is LatticeClass.DEGENERATE:
        tt = t
        if g2 > 0 and g3 > 0:
            period = math.pi / math.sqrt(3.0 * math.sqrt(g2 / 12.0))
            tt = math.remainder(t, period)
            if abs(tt) <= pole_tol * period:
                raise PoleProximityError(t)
        elif abs(tt) <= pole_tol:
            raise PoleProximityError(t)
        wp, dwp = _degenerate_wp(g2, g3, tt)
    else:
        omega = real_period(g2, g3, tol).real_half_period
        sign = 1.0
        x = math.remainder(t, 2.0 * omega)  # in [-omega, omega]
        if x < 0:
            x, sign = -x, -1.0
        if x <= pole_tol * omega:
            raise PoleProximityError(t)
        L, n2, n3 = _unit_scale(g2, g3)
        n = 0
        z = x * L
        while z > SEED_RADIUS and n < MAX_DOUBLINGS:
            z *= 0.5
            n += 1
        wp, dwp = _laurent(n2, n3, z)
        for _ in range(n):
            wp, dwp = _duplicate(wp, dwp, n2)
        wp *= L * L
        dwp *= sign * L ** 3
    residual = abs(dwp * dwp - (4 * wp ** 3 - g2 * wp - g3))
    return WpValue(wp, dwp, residual)


# -- shifted-p certification --------------------------------------------------

@dataclass(frozen=True)
class ShiftFit:
    t0: float
    max_residual: float
    branch: str
    reference_index: int
    lattice_class: LatticeClass

    def to_dict(self) -> dict:
        return {
            "t0": self.t0,
            "max_residual": self.max_residual,
            "branch": self.branch,
            "reference_index": self.reference_index,
            "lattice_class": self.lattice_class.value,
        }


class _Branch:
    """One real solution family of ``F'^2 = 4F^3 - g2 F - g3`` as ``F = model(t - t0)``."""

    name: str
    period: float = math.inf

    def value(self, x: float) -> float:
        raise NotImplementedError

    def invert(self, F: float, Fdot: float) -> float:
        raise NotImplementedError


class _RealBranch(_Branch):
    # F >= e1: F(t) = p(t - t0) with real t0
    name = "real"

    def __init__(self, g2, g3, tol):
        self.g2, self.g3, self.tol = g2, g3, tol
        self.period = 2.0 * real_period(g2, g3, tol).real_half_period

    def value(self, x):
        return wp_eval(self.g2, self.g3, x, tol=self.tol).wp

    def invert(self, F, Fdot):
        u = wp_inverse(self.g2, self.g3, F)
        # p' < 0 on (0, omega)
        return u if Fdot < 0 else -u


class _OvalBranch(_Branch):
    # e3 <= F <= e2: F(t) = p(t - t0 + omega3), omega3 the imaginary half-period,
    # p(x + omega3) = e3 + (e3 - e1)(e3 - e2) / (p(x) - e3)
    name = "bounded"

    def __init__(self, g2, g3, tol, data: PeriodData):
        self.g2, self.g3, self.tol = g2, g3, tol
        self.e1, self.e2, self.e3 = data.e1, data.e2, data.e3
        self.k = (self.e1 - self.e3) * (self.e2 - self.e3)
        self.period = 2.0 * data.real_half_period

    def value(self, x):
        try:
            wp = wp_eval(self.g2, self.g3, x, tol=self.tol).wp
        except PoleProximityError:
            return self.e3
        return self.e3 + self.k / (wp - self.e3)

    def invert(self, F, Fdot):
        F = min(max(F, self.e3), self.e2)
        if F - self.e3 <= 0:
            return 0.0
        Y = self.e3 + self.k / (F - self.e3)
        u = wp_inverse(self.g2, self.g3, max(Y, self.e1))
        # the Moebius map reverses orientation, so F' > 0 where p' < 0
        return u if Fdot > 0 else -u


class _DegenerateBranch(_Branch):
    def __init__(self, g2, g3, F_ref):
        self.g2, self.g3 = g2, g3
        if g2 <= 0:
            self.kind = "rational"
            self.name = "degenerate-rational"
            return
        self.c = math.sqrt(g2 / 12.0)
        self.k = math.sqrt(3.0 * self.c)
        if g3 > 0:
            self.kind = "trig"
            self.name = "degenerate-trigonometric"
            self.period = math.pi / self.k
        elif F_ref >= self.c:
            self.kind = "sinh"
            self.name = "degenerate-hyperbolic"
        else:
            self.kind = "cosh"
            self.name = "degenerate-bounded"

    def value(self, x):
        if self.kind == "cosh":
            return self.c - 3 * self.c / math.cosh(self.k * x) ** 2
        if self.kind == "trig":
            x = math.remainder(x, self.period)
        return _degenerate_wp(self.g2, self.g3, x)[0]

    def invert(self, F, Fdot):
        if self.kind == "rational":
            if F <= 0:
                raise FitError("F must be positive on the rational degenerate branch")
            u = 1.0 / math.sqrt(F)
        elif self.kind == "trig":
            u = math.asin(min(1.0, math.sqrt(3 * self.c / (F + self.c)))) / self.k
        elif self.kind == "sinh":
            if F <= self.c:
                raise FitError("F left the invertible hyperbolic branch")
            u = math.asinh(math.sqrt(3 * self.c / (F - self.c))) / self.k
        else:
            ratio = 3 * self.c / (self.c - F) if F < self.c else math.inf
            u = math.acosh(math.sqrt(max(ratio, 1.0))) / self.k
            # c - 3c sech^2 increases for x > 0
            return u if Fdot > 0 else -u
        return u if Fdot < 0 else -u


def select_branch(g2: float, g3: float, F_ref: float, tol: float = 1e-12) -> _Branch:
    """Real solution family containing the value ``F_ref``."""
    g2, g3 = float(g2), float(g3)
    if classify_lattice(g2, g3, tol) is LatticeClass.DEGENERATE:
        return _DegenerateBranch(g2, g3, F_ref)
    data = real_period(g2, g3, tol)
    if data.e2 is not None and F_ref < 0.5 * (data.e1 + data.e2):
        return _OvalBranch(g2, g3, tol, data)
    return _RealBranch(g2, g3, tol)


def _reference_index(F: np.ndarray, Fdot: np.ndarray, sigma: float) -> int:
    # best-conditioned inversion: largest |F'| relative to the local scale
    # (F' ~ F^(3/2) near poles, F' -> 0 at turning points)
    scale = np.maximum(np.abs(F), sigma if sigma > 0 else 1e-300)
    score = np.abs(Fdot) / scale ** 1.5
    score[~np.isfinite(score)] = -1.0
    return int(np.argmax(score))


def fit_shift_arrays(t, F, Fdot, g2, g3, tol: float = 1e-12,
                     min_samples: int = 10) -> ShiftFit:
    """Certify ``F(t)`` as a shifted ``p`` on sampled data.

    A single reference sample fixes ``t0``; the reported residual is
    ``max |F(t) - model(t - t0)| / max(|F(t)|, sigma)`` over all samples.
    """
    t = np.asarray(t, dtype=float)
    F = np.asarray(F, dtype=float)
    Fdot = np.asarray(Fdot, dtype=float)
    if len(t) < min_samples:
        raise FitError(f"insufficient samples: {len(t)} < {min_samples}")
    g2, g3 = float(g2), float(g3)
    sigma = invariant_scale(g2, g3)
    ref = _reference_index(F, Fdot, sigma)
    branch = select_branch(g2, g3, float(F[ref]), tol)
    x_ref = branch.invert(float(F[ref]), float(Fdot[ref]))
    t0 = float(t[ref]) - x_ref
    worst = 0.0
    for ti, Fi in zip(t, F):
        try:
            model = branch.value(ti - t0)
        except PoleProximityError:
            model = math.inf
        denom = max(abs(Fi), sigma) or 1.0
        worst = max(worst, float(abs(Fi - model) / denom))
    return ShiftFit(t0=t0, max_residual=worst, branch=branch.name, reference_index=ref,
                    lattice_class=classify_lattice(g2, g3, tol))


def fit_shift(traj, tol: float = 1e-12, min_samples: int = 10) -> ShiftFit:
    """:func:`fit_shift_arrays` on a trajectory carrying ``t, F, Fdot`` and ``params``."""
    if traj.params is None:
        raise FitError("trajectory carries no elliptic parameters")
    return fit_shift_arrays(traj.t, traj.F, traj.Fdot, traj.params.g2, traj.params.g3,
                            tol=tol, min_samples=min_samples)


def time_to_pole(g2, g3, F0: float, Fdot0: float, tol: float = 1e-12) -> float:
    """Forward time until ``F`` (started at ``(F0, Fdot0)``) reaches a pole; ``inf`` if never."""
    branch = select_branch(g2, g3, F0, tol)
    if isinstance(branch, _OvalBranch) or getattr(branch, "kind", None) == "cosh":
        return math.inf
    x0 = branch.invert(F0, Fdot0)
    if math.isfinite(branch.period):
        return branch.period - x0 % branch.period
    return -x0 if x0 < 0 else math.inf


def check_disc_relation_numeric(h, s0) -> float:
    """Relative residual of ``g2^3 - 27 g3^2 = (S^3 - 27T^2)(16 psi0)^6`` at a state."""
    from .binary_forms import DegreeError, evaluate, invariant_S, invariant_T

    if h.degree != 4:
        raise DegreeError("the discriminant relation concerns quartic Hamiltonians")
    psi0 = evaluate(h.psi, s0.p, s0.q)
    c = h.salmon
    S, T = invariant_S(c), invariant_T(c)
    g2 = S * (16 * psi0) ** 2
    g3 = T * (16 * psi0) ** 3
    lhs = g2 ** 3 - 27 * g3 ** 2
    rhs = (S ** 3 - 27 * T ** 2) * (16 * psi0) ** 6
    denom = max(abs(lhs), abs(rhs))
    if denom == 0:
        return 0.0
    return float(abs(lhs - rhs) / denom)

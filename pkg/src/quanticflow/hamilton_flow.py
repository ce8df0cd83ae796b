"""Numerical Hamiltonian flow for homogeneous polynomial Hamiltonians.

The Hamilton equations ``p' = -psi_q``, ``q' = psi_p`` are advanced with an
adaptive Dormand-Prince 5(4) pair.  Samples on a uniform time grid come from
the pair's continuous extension; the derived channels ``psi``, ``F`` and
``F'`` are evaluated from the exact covariant polynomials at every sample.

Finite-time blow-up is an expected outcome (``F`` is a shifted Weierstrass
function with double poles) and is reported through :class:`FlowStatus`.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from functools import partial
from typing import Sequence, Union

import numpy as np

from .binary_forms import BinaryForm, evaluate, partial_p, partial_q
from .covariant_dynamics import EllipticParams, HamiltonianSpec, g_constants

EXPORT_DIGITS = 15

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = _A[6]
# fifth minus fourth order weights (stage 7 is the FSAL stage)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)
# continuous extension (Hairer & Wanner, DOPRI5 dense output)
_D = (-12715105075 / 11282082432, 0.0, 87487479700 / 32700410799,
      -10690763975 / 1880347072, 701980252875 / 199316789632,
      -1453857185 / 822651844, 69997945 / 29380423)

SAFETY = 0.9
FAC_MIN = 0.2
FAC_MAX = 5.0


class FlowStatus(str, enum.Enum):
    COMPLETED = "completed"
    BLEW_UP = "blew_up"
    STEP_FAILURE = "step_failure"


@dataclass(frozen=True)
class PhaseState:
    t: float
    p: float
    q: float

    def __post_init__(self):
        for name in ("t", "p", "q"):
            if not math.isfinite(float(getattr(self, name))):
                raise ValueError(f"phase state component {name} is not finite")


@dataclass
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    initial_step: float = 0.0  # 0 selects a starting step automatically
    max_step: float = math.inf
    blow_up_threshold: float = 1e8
    t_end: float = 1.0
    sample_interval: float = 0.01
    max_steps: int = 1_000_000

    def validate(self) -> None:
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if not self.blow_up_threshold > 0:
            raise ValueError("blow_up_threshold must be positive")
        if not self.sample_interval > 0:
            raise ValueError("sample_interval must be positive")
        if self.initial_step < 0 or not self.max_step > 0:
            raise ValueError("step bounds must be positive")
        if not math.isfinite(self.t_end):
            raise ValueError("t_end must be finite")

    def to_dict(self) -> dict:
        return {k: (None if isinstance(v, float) and math.isinf(v) else v)
                for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, data: dict) -> IntegratorConfig:
        known = {f.name: f.type for f in fields(cls)}
        kwargs = {}
        for key, value in data.items():
            if key not in known:
                raise ValueError(f"unknown integrator field {key!r}")
            if value is None and key == "max_step":
                value = math.inf
            try:
                kwargs[key] = int(value) if key == "max_steps" else float(value)
            except (TypeError, ValueError):
                raise ValueError(f"integrator field {key!r}: cannot parse {value!r}") from None
        return cls(**kwargs)


@dataclass(frozen=True)
class DriftReport:
    max_rel_drift_psi: float
    max_rel_drift_g2: float
    max_rel_drift_g3: float
    # max |F'^2 - 4F^3 + g2 F + g3| / max(1, |F|)^3
    max_abs_residual_weierstrass_ode: float

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Trajectory:
    t: np.ndarray
    p: np.ndarray
    q: np.ndarray
    psi: np.ndarray
    F: np.ndarray
    Fdot: np.ndarray
    params: EllipticParams | None
    status: FlowStatus
    last_state: PhaseState | None = None
    hamiltonian: HamiltonianSpec | None = None
    config: IntegratorConfig | None = None
    n_steps: int = 0
    n_rejected: int = 0
    initial_state: PhaseState | None = None

    def __len__(self) -> int:
        return len(self.t)

    def samples(self) -> list[PhaseState]:
        return [PhaseState(float(t), float(p), float(q))
                for t, p, q in zip(self.t, self.p, self.q)]


HamiltonianLike = Union[HamiltonianSpec, BinaryForm]


def _psi_of(h: HamiltonianLike) -> BinaryForm:
    return h.psi if isinstance(h, HamiltonianSpec) else h


def _gradient_coeffs(psi: BinaryForm) -> tuple[tuple, tuple]:
    return partial_p(psi)._float_coeffs, partial_q(psi)._float_coeffs


def _form_value(coeffs: tuple, p: float, q: float) -> float:
    # homogeneous sum c_k p^(n-k) q^k
    n = len(coeffs) - 1
    if n == 0:
        return coeffs[0]
    total = 0.0
    pk = 1.0
    for k in range(n, -1, -1):
        c = coeffs[k]
        if c:
            total += c * pk * q ** k
        pk *= p
    return total


def hamilton_rhs(h: HamiltonianLike, s: PhaseState) -> tuple[float, float]:
    """``(p', q') = (-psi_q, psi_p)`` at ``s``."""
    fp, fq = _gradient_coeffs(_psi_of(h))
    p, q = float(s.p), float(s.q)
    return -_form_value(fq, p, q), _form_value(fp, p, q)


def _quantize(x: float) -> float:
    return float(format(x, f".{EXPORT_DIGITS}g"))


def _initial_step(rhs, t0, y0, f0, direction, cfg) -> float:
    # Hairer's starting-step heuristic, order 5
    sc = [cfg.abs_tol + cfg.rel_tol * abs(v) for v in y0]
    d0 = math.sqrt(sum((v / s) ** 2 for v, s in zip(y0, sc)) / 2)
    d1 = math.sqrt(sum((v / s) ** 2 for v, s in zip(f0, sc)) / 2)
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, cfg.max_step)
    y1 = [y + direction * h0 * f for y, f in zip(y0, f0)]
    f1 = rhs(y1[0], y1[1])
    d2 = math.sqrt(sum(((a - b) / s) ** 2 for a, b, s in zip(f1, f0, sc)) / 2) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, cfg.max_step)


def integrate(h: HamiltonianLike, s0: PhaseState, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the Hamilton equations of ``h`` from ``s0`` to ``cfg.t_end``.

    Parameters
    ----------
    h : HamiltonianSpec or BinaryForm
        Cubic and quartic specs get the full set of covariant channels; any
        other homogeneous form (e.g. the harmonic oscillator) is integrated
        with ``F`` and ``F'`` left as NaN.
    s0 : PhaseState
        Initial state.  Exact rational ``p``, ``q`` give exact ``g2, g3``.
    cfg : IntegratorConfig
        Tolerances, step bounds, blow-up threshold and sampling grid.
        ``cfg.t_end`` may lie before ``s0.t`` for backward integration.

    Returns
    -------
    Trajectory
        Samples on the uniform grid ``s0.t + k * sample_interval``; the
        status tells whether ``t_end`` was reached, the state exceeded the
        blow-up threshold, or the step size underflowed.
    """
    cfg.validate()
    psi = _psi_of(h)
    spec = h if isinstance(h, HamiltonianSpec) else None
    fp, fq = _gradient_coeffs(psi)
    fv = _form_value

    def rhs(p, q):
        return -fv(fq, p, q), fv(fp, p, q)

    t = float(s0.t)
    y = (float(s0.p), float(s0.q))
    t_end = float(cfg.t_end)
    span = t_end - t
    direction = 1.0 if span >= 0 else -1.0
    n_samples = int(math.floor(abs(span) / cfg.sample_interval * (1 + 1e-12))) + 1
    grid = [_quantize(t + direction * k * cfg.sample_interval) for k in range(n_samples)]

    out_t, out_p, out_q = [grid[0]], [y[0]], [y[1]]
    next_idx = 1

    status = FlowStatus.COMPLETED
    n_steps = n_rejected = 0
    threshold = cfg.blow_up_threshold
    last = PhaseState(t, *y)

    if span != 0:
        k1 = rhs(*y)
        step = cfg.initial_step or _initial_step(rhs, t, y, k1, direction, cfg)
        step = min(step, cfg.max_step)
        err_exp = -1.0 / 5.0
        rejected_last = False
        while direction * (t_end - t) > 0:
            if n_steps + n_rejected >= cfg.max_steps:
                status = FlowStatus.STEP_FAILURE
                break
            if step < 16 * np.finfo(float).eps * max(abs(t), 1e-300):
                status = FlowStatus.STEP_FAILURE
                break
            hs = direction * step
            last_step = False
            if direction * (t + hs - t_end) >= 0:
                hs = t_end - t
                last_step = True
            ks = [k1]
            for i in range(1, 7):
                a = _A[i]
                yp = y[0] + hs * sum(a[j] * ks[j][0] for j in range(i))
                yq = y[1] + hs * sum(a[j] * ks[j][1] for j in range(i))
                if i == 6:
                    y_new = (yp, yq)
                ks.append(rhs(yp, yq))
            e = [hs * sum(_E[j] * ks[j][m] for j in range(7)) for m in (0, 1)]
            sc = [cfg.abs_tol + cfg.rel_tol * max(abs(a), abs(b)) for a, b in zip(y, y_new)]
            err = math.sqrt(((e[0] / sc[0]) ** 2 + (e[1] / sc[1]) ** 2) / 2)
            if not math.isfinite(err) or not all(map(math.isfinite, y_new)):
                n_rejected += 1
                step *= FAC_MIN
                rejected_last = True
                continue
            if err > 1.0:
                n_rejected += 1
                step *= max(FAC_MIN, SAFETY * err ** err_exp)
                rejected_last = True
                continue

            n_steps += 1
            t_new = t_end if last_step else t + hs
            blew = max(abs(y_new[0]), abs(y_new[1])) > threshold

            # dense output coefficients for this step
            r1 = y
            r2 = (y_new[0] - y[0], y_new[1] - y[1])
            r3 = tuple(hs * ks[0][m] - r2[m] for m in (0, 1))
            r4 = tuple(r2[m] - hs * ks[6][m] - r3[m] for m in (0, 1))
            r5 = tuple(hs * sum(_D[j] * ks[j][m] for j in range(7)) for m in (0, 1))
            while next_idx < n_samples and direction * (grid[next_idx] - t_new) <= 0:
                ts = grid[next_idx]
                th = (ts - t) / hs
                th1 = 1.0 - th
                ps, qs = (r1[m] + th * (r2[m] + th1 * (r3[m] + th * (r4[m] + th1 * r5[m])))
                          for m in (0, 1))
                if blew and not (max(abs(ps), abs(qs)) <= threshold):
                    break
                out_t.append(ts)
                out_p.append(ps)
                out_q.append(qs)
                next_idx += 1
            if blew:
                status = FlowStatus.BLEW_UP
                break

            t, y = t_new, y_new
            k1 = ks[6]
            last = PhaseState(t, *y)
            fac = SAFETY * err ** err_exp if err > 0 else FAC_MAX
            fac = min(FAC_MAX, max(FAC_MIN, fac))
            if rejected_last:
                fac = min(fac, 1.0)
            rejected_last = False
            step = min(step * fac, cfg.max_step)

    t_arr = np.array(out_t)
    # quantize first so the channels describe the exported coordinates
    p_arr = np.array([_quantize(v) for v in out_p])
    q_arr = np.array([_quantize(v) for v in out_q])
    psi_arr = np.array([_quantize(evaluate(psi, a, b)) for a, b in zip(p_arr, q_arr)])
    if spec is not None and spec.degree in (3, 4):
        F_arr = np.array([_quantize(evaluate(spec.F, a, b)) for a, b in zip(p_arr, q_arr)])
        Fd_arr = np.array([_quantize(evaluate(spec.Fdot, a, b)) for a, b in zip(p_arr, q_arr)])
        params = g_constants(spec, _energy(psi, s0))
    else:
        F_arr = np.full_like(t_arr, np.nan)
        Fd_arr = np.full_like(t_arr, np.nan)
        params = None
    return Trajectory(t=t_arr, p=p_arr, q=q_arr, psi=psi_arr, F=F_arr, Fdot=Fd_arr,
                      params=params, status=status, last_state=last, hamiltonian=spec,
                      config=cfg, n_steps=n_steps, n_rejected=n_rejected, initial_state=s0)


def _energy(psi: BinaryForm, s0: PhaseState):
    # exact energy when the initial coordinates are rational
    if isinstance(s0.p, (int, Fraction)) and isinstance(s0.q, (int, Fraction)):
        return evaluate(psi, s0.p, s0.q)
    return evaluate(psi, float(s0.p), float(s0.q))


def integrate_many(h: HamiltonianLike, states: Sequence[PhaseState], cfg: IntegratorConfig,
                   workers: int | None = None) -> list[Trajectory]:
    """Integrate independent initial states; results keep the input order."""
    if workers is None or workers <= 1:
        return [integrate(h, s, cfg) for s in states]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(partial(integrate, h, cfg=cfg), states))


def _rel_drift(values: np.ndarray) -> float:
    if len(values) == 0:
        return 0.0
    ref = values[0]
    diff = np.max(np.abs(values - ref))
    return float(diff / abs(ref)) if ref != 0 else float(diff)


def drift_report(traj: Trajectory, h: HamiltonianSpec | None = None) -> DriftReport:
    """Drift of the conserved quantities against the first sample.

    ``g2`` and ``g3`` are recomputed from the sampled energy at each sample.
    The Weierstrass residual uses the exact-covariant ``F`` and ``F'``
    channels and the trajectory's initial ``g2, g3``.
    """
    if len(traj) == 0:
        raise ValueError("empty trajectory")
    h = h or traj.hamiltonian
    psi_drift = _rel_drift(traj.psi)
    if h is None or h.degree not in (3, 4) or traj.params is None:
        return DriftReport(psi_drift, 0.0, 0.0, 0.0)
    gs = [g_constants(h, float(v)) for v in traj.psi]
    g2 = np.array([float(g.g2) for g in gs])
    g3 = np.array([float(g.g3) for g in gs])
    G2, G3 = float(traj.params.g2), float(traj.params.g3)
    F, Fd = traj.F, traj.Fdot
    res = np.abs(Fd ** 2 - 4 * F ** 3 + G2 * F + G3) / np.maximum(1.0, np.abs(F)) ** 3
    return DriftReport(psi_drift, _rel_drift(g2), _rel_drift(g3), float(np.max(res)))


def weierstrass_residuals(traj: Trajectory) -> np.ndarray:
    """Unscaled pointwise ``|F'^2 - 4F^3 + g2 F + g3|``."""
    G2, G3 = float(traj.params.g2), float(traj.params.g3)
    F, Fd = traj.F, traj.Fdot
    return np.abs(Fd ** 2 - 4 * F ** 3 + G2 * F + G3)

"""CSV + JSON sidecar export of trajectories.

The CSV carries ``t,p,q,psi,F,Fdot`` at 15 significant digits.  Sample
values are quantized to that precision when the trajectory is built, so a
write/read round trip is lossless.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .covariant_dynamics import EllipticParams, HamiltonianSpec
from .hamilton_flow import (
    EXPORT_DIGITS,
    DriftReport,
    FlowStatus,
    IntegratorConfig,
    PhaseState,
    Trajectory,
    drift_report,
)

CSV_HEADER = ("t", "p", "q", "psi", "F", "Fdot")


class TrajectoryFormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), f".{EXPORT_DIGITS}g")


def _state_dict(s: PhaseState | None):
    if s is None:
        return None
    return {"t": _json_num(s.t), "p": _json_num(s.p), "q": _json_num(s.q)}


def _json_num(x):
    if isinstance(x, (int, float)):
        return x
    return str(x)


def _parse_num(x):
    if isinstance(x, str):
        from .binary_forms import as_rational
        return as_rational(x)
    return x


def write_trajectory(traj: Trajectory, directory, name: str = "trajectory",
                     report: DriftReport | None = None) -> tuple[Path, Path]:
    """Write ``<name>.csv`` and ``<name>.json``; returns both paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = directory / f"{name}.csv"
    json_path = directory / f"{name}.json"
    with csv_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for row in zip(traj.t, traj.p, traj.q, traj.psi, traj.F, traj.Fdot):
            writer.writerow([_fmt(v) for v in row])
    if report is None and len(traj):
        report = drift_report(traj)
    sidecar = {
        "csv": csv_path.name,
        "hamiltonian": traj.hamiltonian.to_dict() if traj.hamiltonian else None,
        "initial_state": _state_dict(traj.initial_state),
        "integrator": traj.config.to_dict() if traj.config else None,
        "elliptic_params": traj.params.to_dict() if traj.params else None,
        "drift_report": report.to_dict() if report else None,
        "status": traj.status.value,
        "last_state": _state_dict(traj.last_state),
        "n_steps": traj.n_steps,
        "n_rejected": traj.n_rejected,
    }
    json_path.write_text(json.dumps(sidecar, indent=2, allow_nan=True) + "\n")
    return csv_path, json_path


def sidecar_path(csv_path) -> Path:
    return Path(csv_path).with_suffix(".json")


def read_trajectory(csv_path) -> Trajectory:
    """Load a trajectory written by :func:`write_trajectory`."""
    csv_path = Path(csv_path)
    meta_path = sidecar_path(csv_path)
    if not csv_path.exists():
        raise TrajectoryFormatError(f"{csv_path}: no such file")
    if not meta_path.exists():
        raise TrajectoryFormatError(f"{meta_path}: sidecar JSON is missing")
    try:
        meta = json.loads(meta_path.read_text())
    except json.JSONDecodeError as exc:
        raise TrajectoryFormatError(f"{meta_path}: {exc}") from None

    rows = []
    with csv_path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != CSV_HEADER:
            raise TrajectoryFormatError(
                f"{csv_path}: expected header {','.join(CSV_HEADER)}, got {header}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(CSV_HEADER):
                raise TrajectoryFormatError(f"{csv_path}:{lineno}: expected 6 columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise TrajectoryFormatError(f"{csv_path}:{lineno}: non-numeric value") from None
    data = np.array(rows, dtype=float).reshape(-1, len(CSV_HEADER))

    def state(key):
        s = meta.get(key)
        if not s:
            return None
        return PhaseState(_parse_num(s["t"]), _parse_num(s["p"]), _parse_num(s["q"]))

    try:
        ham = meta.get("hamiltonian")
        params = meta.get("elliptic_params")
        cfg = meta.get("integrator")
        return Trajectory(
            t=data[:, 0], p=data[:, 1], q=data[:, 2], psi=data[:, 3],
            F=data[:, 4], Fdot=data[:, 5],
            params=EllipticParams.from_dict(params) if params else None,
            status=FlowStatus(meta["status"]),
            last_state=state("last_state"),
            hamiltonian=HamiltonianSpec.from_dict(ham) if ham else None,
            config=IntegratorConfig.from_dict(cfg) if cfg else None,
            n_steps=int(meta.get("n_steps", 0)),
            n_rejected=int(meta.get("n_rejected", 0)),
            initial_state=state("initial_state"),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise TrajectoryFormatError(f"{meta_path}: {exc}") from None

"""Command-line entry point: ``quanticflow <subcommand> ...``.

Exit codes: 0 success, 1 usage/parse/verification failure, 2 blow-up,
3 step failure.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path

from .binary_forms import (
    CubicCoeffs,
    QuarticCoeffs,
    as_rational,
    hessian_cubic,
    hessian_quartic,
    invariants,
    jacobian_cubic,
    jacobian_quartic,
)
from .covariant_dynamics import HamiltonianSpec, all_residuals
from .hamilton_flow import (
    FlowStatus,
    IntegratorConfig,
    PhaseState,
    drift_report,
    integrate,
)
from .trajectory_io import TrajectoryFormatError, read_trajectory, write_trajectory
from .weierstrass import (
    FitError,
    LatticeClass,
    PoleProximityError,
    classify_lattice,
    fit_shift,
    wp_eval,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BLOW_UP = 2
EXIT_STEP_FAILURE = 3

COEFF_RANGE = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-3/2" and "-1e-3" through as values rather than option flags
        self._negative_number_matcher = re.compile(r"^-(\d+(/\d+)?|\d*\.?\d+([eE][-+]?\d+)?)$")

    # argparse exits with 2 on bad usage, which is reserved for blow-up here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_rationals(values, what="coefficient"):
    out = []
    for i, v in enumerate(values, start=1):
        try:
            out.append(as_rational(v))
        except (ValueError, TypeError, ZeroDivisionError):
            raise UsageError(f"{what} {i} ({v!r}): not an exact rational") from None
    return out


# -- invariants ---------------------------------------------------------------

def cmd_invariants(args) -> int:
    if args.cubic is not None:
        values, expected = args.cubic, 4
    else:
        values, expected = args.quartic, 5
    if len(values) != expected:
        raise UsageError(f"expected {expected} coefficients, got {len(values)}")
    coeffs = parse_rationals(values)
    inv = invariants(coeffs)
    if expected == 4:
        c = CubicCoeffs(*coeffs)
        H, J = hessian_cubic(c), jacobian_cubic(c)
    else:
        c = QuarticCoeffs(*coeffs)
        H, J = hessian_quartic(c), jacobian_quartic(c)
    payload = {
        "invariants": inv.as_dict(),
        "H": [str(x) for x in H.coeffs],
        "J": [str(x) for x in J.coeffs],
    }
    if not args.json:
        for key, value in inv.as_dict().items():
            if key != "degree":
                print(f"{key} = {value}")
        print(f"H = {H}")
        print(f"J = {J}")
    print(json.dumps(payload))
    return EXIT_OK


# -- verify -------------------------------------------------------------------

def random_coeffs(rng: random.Random, degree: int, bound: int = COEFF_RANGE) -> tuple:
    return tuple(rng.randint(-bound, bound) for _ in range(degree + 1))


def coefficient_stream(degree: int, trials: int, seed: int, bound: int = COEFF_RANGE):
    rng = random.Random(seed)
    return [random_coeffs(rng, degree, bound) for _ in range(trials)]


def _check_tuple(item):
    degree, coeffs = item
    residuals = all_residuals(HamiltonianSpec(degree, coeffs))
    return {name: form.is_zero() for name, form in residuals.items()}


def cmd_verify(args) -> int:
    if args.degree not in (3, 4):
        raise UsageError(f"unsupported degree {args.degree}; choose 3 or 4")
    if args.trials < 1:
        raise UsageError("trials must be >= 1")
    stream = coefficient_stream(args.degree, args.trials, args.seed)
    items = [(args.degree, c) for c in stream]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_check_tuple, items, chunksize=32))
    else:
        results = [_check_tuple(it) for it in items]
    counts: dict[str, int] = {}
    first_failure = None
    for idx, res in enumerate(results):
        for name, ok in res.items():
            counts[name] = counts.get(name, 0) + ok
            if not ok and first_failure is None:
                first_failure = (idx, name, stream[idx])
    print(f"degree {args.degree}, {args.trials} trials, seed {args.seed}")
    for name, n in counts.items():
        print(f"  {name:16s} {n}/{args.trials}")
    if first_failure is not None:
        idx, name, coeffs = first_failure
        print(f"FAIL trial {idx}: {name} residual nonzero for coefficients "
              f"{' '.join(map(str, coeffs))}")
        return EXIT_USAGE
    print("all identities hold exactly")
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

@dataclass
class RunConfig:
    hamiltonian: HamiltonianSpec
    initial_state: PhaseState
    integrator: IntegratorConfig
    directory: Path = Path("out")
    formats: tuple = ("csv", "json")
    name: str = "trajectory"


class ConfigError(ValueError):
    pass


def _number(value, where):
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got {value!r}")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return as_rational(value)
        except (ValueError, ZeroDivisionError):
            raise ConfigError(f"{where}: cannot parse {value!r} as a rational") from None
    raise ConfigError(f"{where}: expected a number, got {value!r}")


def parse_run_config(data: dict) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    try:
        ham = data["hamiltonian"]
    except KeyError:
        raise ConfigError("hamiltonian: missing") from None
    if "degree" not in ham:
        raise ConfigError("hamiltonian.degree: missing")
    degree = ham["degree"]
    if degree not in (2, 3, 4):
        raise ConfigError(f"hamiltonian.degree: must be 2, 3 or 4, got {degree!r}")
    raw = ham.get("coefficients")
    if not isinstance(raw, list):
        raise ConfigError("hamiltonian.coefficients: expected a list")
    if len(raw) != degree + 1:
        raise ConfigError(f"hamiltonian.coefficients: expected {degree + 1} entries, "
                          f"got {len(raw)}")
    coeffs = []
    for i, v in enumerate(raw):
        where = f"hamiltonian.coefficients[{i}]"
        if isinstance(v, float):
            raise ConfigError(f"{where}: use an exact rational (e.g. \"1/2\"), not {v!r}")
        try:
            coeffs.append(as_rational(v))
        except (ValueError, TypeError, ZeroDivisionError):
            raise ConfigError(f"{where}: cannot parse {v!r} as a rational") from None
    spec = HamiltonianSpec(degree, tuple(coeffs))

    state = data.get("initial_state")
    if not isinstance(state, dict):
        raise ConfigError("initial_state: expected an object with p and q")
    for key in ("p", "q"):
        if key not in state:
            raise ConfigError(f"initial_state.{key}: missing")
    s0 = PhaseState(_number(state.get("t", 0), "initial_state.t"),
                    _number(state["p"], "initial_state.p"),
                    _number(state["q"], "initial_state.q"))
    try:
        cfg = IntegratorConfig.from_dict(data.get("integrator", {}))
        cfg.validate()
    except ValueError as exc:
        raise ConfigError(f"integrator: {exc}") from None

    out = data.get("output", {})
    formats = tuple(out.get("formats", ("csv", "json")))
    for f in formats:
        if f not in ("csv", "json"):
            raise ConfigError(f"output.formats: unknown format {f!r}")
    return RunConfig(spec, s0, cfg, Path(out.get("directory", "out")), formats,
                     out.get("name", "trajectory"))


def load_run_config(path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return parse_run_config(data)


_OVERRIDABLE = [f.name for f in fields(IntegratorConfig)]


def cmd_simulate(args) -> int:
    run = load_run_config(args.config)
    for name in _OVERRIDABLE:
        value = getattr(args, name, None)
        if value is not None:
            setattr(run.integrator, name, value)
    run.integrator.validate()
    if args.out_dir is not None:
        run.directory = Path(args.out_dir)
    if args.name is not None:
        run.name = args.name

    traj = integrate(run.hamiltonian, run.initial_state, run.integrator)
    report = drift_report(traj)
    csv_path, json_path = write_trajectory(traj, run.directory, run.name, report)
    print(f"status: {traj.status.value}")
    print(f"samples: {len(traj)}  steps: {traj.n_steps}  rejected: {traj.n_rejected}")
    if traj.last_state is not None:
        s = traj.last_state
        print(f"last state: t={s.t:.15g} p={float(s.p):.15g} q={float(s.q):.15g}")
    if traj.params is not None:
        ep = traj.params
        print(f"g2 = {ep.g2}  g3 = {ep.g3}  disc = {ep.weierstrass_disc}  "
              f"lattice = {ep.lattice_class.value}")
    for key, value in report.to_dict().items():
        print(f"{key}: {value:.3e}")
    print(f"wrote {csv_path} and {json_path}")
    return {FlowStatus.COMPLETED: EXIT_OK,
            FlowStatus.BLEW_UP: EXIT_BLOW_UP,
            FlowStatus.STEP_FAILURE: EXIT_STEP_FAILURE}[traj.status]


# -- fit / classify / wp-eval -------------------------------------------------

def cmd_fit(args) -> int:
    traj = read_trajectory(args.trajectory)
    fit = fit_shift(traj, min_samples=args.min_samples)
    if fit.lattice_class is LatticeClass.DEGENERATE:
        print(f"note: degenerate lattice, closed-form branch {fit.branch}")
    print(f"t0 = {fit.t0:.15g}")
    print(f"max_residual = {fit.max_residual:.15g}")
    print(f"branch = {fit.branch}")
    print(f"lattice = {fit.lattice_class.value}")
    ok = fit.max_residual <= args.threshold
    print("certificate: " + ("PASS" if ok else "FAIL") + f" (threshold {args.threshold:g})")
    return EXIT_OK if ok else EXIT_USAGE


def _real(value: str, what: str) -> float:
    try:
        return float(Fraction(value))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{what} ({value!r}): not a number") from None


def cmd_classify(args) -> int:
    g2, g3 = _real(args.g2, "g2"), _real(args.g3, "g3")
    print(classify_lattice(g2, g3, args.tol).value)
    return EXIT_OK


def cmd_wp_eval(args) -> int:
    g2, g3 = _real(args.g2, "g2"), _real(args.g3, "g3")
    for i, raw in enumerate(args.t, start=1):
        t = _real(raw, f"t {i}")
        try:
            v = wp_eval(g2, g3, t)
        except PoleProximityError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(f"t={t:.15g} wp={v.wp:.15g} wp'={v.wp_prime:.15g} residual={v.residual:.3e}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quanticflow",
                     description="Invariants, flows and Weierstrass certificates "
                                 "for cubic and quartic Hamiltonians.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("invariants", help="exact invariants and covariants")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--cubic", nargs="+", metavar="C")
    g.add_argument("--quartic", nargs="+", metavar="C")
    p.add_argument("--json", action="store_true", help="print only the JSON line")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("verify", help="exact identity checks on random forms")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("simulate", help="integrate the Hamilton equations")
    p.add_argument("config", help="JSON run configuration")
    p.add_argument("--out-dir")
    p.add_argument("--name")
    for f in fields(IntegratorConfig):
        p.add_argument("--" + f.name.replace("_", "-"), dest=f.name,
                       type=int if f.name == "max_steps" else float, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit", help="certify F(t) as a shifted Weierstrass function")
    p.add_argument("trajectory", help="trajectory CSV (sidecar JSON alongside)")
    p.add_argument("--threshold", type=float, default=1e-6)
    p.add_argument("--min-samples", type=int, default=10)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("classify", help="lattice class of (g2, g3)")
    p.add_argument("g2")
    p.add_argument("g3")
    p.add_argument("--tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("wp-eval", help="evaluate the Weierstrass function")
    p.add_argument("g2")
    p.add_argument("g3")
    p.add_argument("t", nargs="+")
    p.set_defaults(func=cmd_wp_eval)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, TrajectoryFormatError, FitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands:
  eval          figures of merit for one (epsilon, delta) point
  sweep         CSV over an (epsilon, delta) grid, optionally with oracle columns
  verify        Monte Carlo oracle vs closed form, PASS/FAIL at 3 sigma
  compensation  round-trip compensation residual for ideal and imperfect mirrors

Angles: epsilon is given in degrees (--epsilon-deg), delta and channel angles
accept 'pi', 'pi/N' or a plain radian value. Grids are comma lists; epsilon
grids also accept 'start:stop:count' (inclusive linspace, degrees).

Every subcommand accepts '--config PATH' pointing at a key=value file whose
keys mirror the long flag names; explicit flags take precedence.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import os
import re
import sys
from dataclasses import dataclass
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .attack import (
    AttackReport,
    build_phase_remapping_povm,
    build_suboptimal_povm,
    evaluate,
)
from .errors import PfmAttackError
from .mcoracle import OracleEstimate, run_oracle
from .optics import BirefringentChannel, FaradayMirror, verify_compensation
from .statespace import bb84_ensemble, build_ensemble

_PI_FRACTION = re.compile(r"^pi(?:/(\d+(?:\.\d+)?))?$")

BASE_COLUMNS = ("epsilon_deg", "delta_rad", "e_B", "p_succ", "lambda_0", "lambda_3", "x", "max_fiber_km")
ORACLE_COLUMNS = ("oracle_e_B", "oracle_p")


def parse_angle(token: str) -> float:
    """Parse 'pi', 'pi/N' or a plain radian float."""
    text = token.strip().lower().replace(" ", "")
    m = _PI_FRACTION.match(text)
    if m:
        return np.pi / float(m.group(1)) if m.group(1) else np.pi
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse angle {token!r} (use radians or pi/N)") from None


def parse_angle_grid(token: str) -> list[float]:
    """Comma list of angle tokens, or 'start:stop:count' with angle-token endpoints."""
    text = token.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range grid must be start:stop:count, got {token!r}")
        try:
            count = int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"grid count must be an integer, got {parts[2]!r}") from None
        if count < 1:
            raise argparse.ArgumentTypeError("grid count must be >= 1")
        return list(np.linspace(parse_angle(parts[0]), parse_angle(parts[1]), count))
    return [parse_angle(part) for part in text.split(",") if part.strip()]


def parse_degree_grid(token: str) -> list[float]:
    """Comma list of degrees, or 'start:stop:count' for an inclusive linspace."""
    text = token.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"range grid must be start:stop:count, got {token!r}")
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise argparse.ArgumentTypeError(f"cannot parse grid {token!r}") from None
        if count < 1:
            raise argparse.ArgumentTypeError("grid count must be >= 1")
        return list(np.linspace(start, stop, count))
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cannot parse grid {token!r}") from None


@dataclass(frozen=True)
class SweepConfig:
    """Grid sweep request; epsilon values in degrees, delta in radians."""

    epsilon_grid_deg: list[float]
    delta_grid: list[float]
    attack_kind: str
    output_path: str
    oracle_trials: int | None = None
    seed: int | None = None
    reproducible: bool = False


def _point_report(attack_kind: str, epsilon_deg: float, delta: float):
    """Closed-form report plus the (ensemble, strategy) pair behind it."""
    if attack_kind == "remap":
        ens = bb84_ensemble(delta)
        strat = build_phase_remapping_povm(delta)
    else:
        ens = build_ensemble(np.deg2rad(epsilon_deg), delta)
        strat = build_suboptimal_povm(ens)
    return evaluate(ens, strat), ens, strat


def _csv_num(value: float) -> str:
    """Deterministic cell format: scientific below 1e-3, 9 significant digits."""
    if value == 0:
        return "0"
    if abs(value) < 1e-3:
        return f"{value:.9e}"
    return f"{value:.9g}"


def _report_row(epsilon_deg: float, report: AttackReport, oracle: OracleEstimate | None = None) -> list[str]:
    values = [
        epsilon_deg, report.delta, report.qber, report.p_succ,
        report.lambda_0, report.lambda_3, report.x, report.max_fiber_km,
    ]
    if not all(np.isfinite(v) for v in values):
        raise PfmAttackError(f"non-finite value in row for epsilon_deg={epsilon_deg}, delta={report.delta}")
    cells = [_csv_num(v) for v in values]
    if oracle is not None:
        # oracle cells may be nan when too few rounds were sifted
        cells += [_csv_num(oracle.qber_hat), _csv_num(oracle.p_succ_hat)]
    return cells


def _write_csv(path: str, lines: list[str]) -> None:
    """Write all lines at once; drop the partial file if the write fails."""
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        if os.path.exists(path):
            os.unlink(path)
        raise OSError(f"cannot write {path}: {exc}") from exc


def read_rows(path: str) -> tuple[list[str], list[list[str]]]:
    """Read an emitted CSV back, skipping '#' comment lines. Returns (header, rows)."""
    with open(path, encoding="utf-8") as fh:
        reader = csv.reader(line for line in fh if not line.startswith("#"))
        table = [row for row in reader if row]
    return table[0], table[1:]


def run_sweep(config: SweepConfig) -> list[str]:
    """Compute all sweep lines (comments, header, rows) in deterministic order."""
    lines = [f"# pfmattack {__version__}", f"# attack={config.attack_kind}"]
    if config.oracle_trials is not None:
        seed = config.seed if config.seed is not None else 0
        lines.append(f"# oracle trials={config.oracle_trials} seed={seed} (row seeds: seed+index)")
    if not config.reproducible:
        lines.append(f"# generated={datetime.now(timezone.utc).isoformat(timespec='seconds')}")
    columns = BASE_COLUMNS + (ORACLE_COLUMNS if config.oracle_trials is not None else ())
    lines.append(",".join(columns))
    row_index = 0
    for epsilon_deg in config.epsilon_grid_deg:
        for delta in config.delta_grid:
            if config.attack_kind == "pfm" and epsilon_deg == 0.0:
                lines.append(f"# skipped epsilon_deg=0 delta_rad={_csv_num(delta)}: singular point")
                continue
            report, ens, strat = _point_report(config.attack_kind, epsilon_deg, delta)
            oracle = None
            if config.oracle_trials is not None:
                seed = (config.seed if config.seed is not None else 0) + row_index
                oracle = run_oracle(ens, strat, config.oracle_trials, seed)
            lines.append(",".join(_report_row(epsilon_deg, report, oracle)))
            row_index += 1
    return lines


def cmd_eval(args) -> int:
    report, _, _ = _point_report(args.attack, args.epsilon_deg, args.delta)
    epsilon_deg = args.epsilon_deg if args.attack == "pfm" else 0.0
    pairs = [
        ("epsilon_deg", epsilon_deg),
        ("delta_rad", report.delta),
        ("e_B", report.qber),
        ("p_succ", report.p_succ),
        ("lambda_0", report.lambda_0),
        ("lambda_3", report.lambda_3),
        ("x", report.x),
        ("max_fiber_km", report.max_fiber_km),
    ]
    for key, value in pairs:
        print(f"{key:<13} {value:.6g}")
    if args.out:
        _write_csv(args.out, [",".join(BASE_COLUMNS), ",".join(_report_row(epsilon_deg, report))])
    return 0


def cmd_sweep(args) -> int:
    config = SweepConfig(
        epsilon_grid_deg=args.epsilon_deg,
        delta_grid=args.delta,
        attack_kind=args.attack,
        output_path=args.out,
        oracle_trials=args.trials,
        seed=args.seed,
        reproducible=args.reproducible,
    )
    if not config.epsilon_grid_deg or not config.delta_grid:
        raise PfmAttackError("epsilon and delta grids must be non-empty")
    _write_csv(config.output_path, run_sweep(config))
    return 0


def cmd_verify(args) -> int:
    report, ens, strat = _point_report(args.attack, args.epsilon_deg, args.delta)
    estimate = run_oracle(ens, strat, args.trials, args.seed)
    print(f"closed form   e_B={report.qber:.6g}  p_succ={report.p_succ:.6g}")
    print(
        f"oracle        e_B={estimate.qber_hat:.6g} (stderr {estimate.stderr_qber:.3g}, "
        f"n_sifted={estimate.n_sifted})  p_succ={estimate.p_succ_hat:.6g} "
        f"(stderr {estimate.stderr_p_succ:.3g})  seed={estimate.rng_seed}"
    )
    all_pass = True
    for name, closed, hat, stderr in (
        ("e_B", report.qber, estimate.qber_hat, estimate.stderr_qber),
        ("p_succ", report.p_succ, estimate.p_succ_hat, estimate.stderr_p_succ),
    ):
        dev = abs(hat - closed)
        ok = bool(dev <= 3 * stderr)
        all_pass &= ok
        sigmas = dev / stderr if stderr > 0 else float("inf")
        print(f"{name:<7} |deviation| = {sigmas:.2f} sigma  {'PASS' if ok else 'FAIL'}")
    print(f"overall {'PASS' if all_pass else 'FAIL'}")
    return 0 if all_pass else 1


def cmd_compensation(args) -> int:
    channel = BirefringentChannel(theta_prime=args.theta_prime, phi_o=args.phi_o, phi_e=args.phi_e)
    ideal = verify_compensation(channel)
    actual = verify_compensation(channel, FaradayMirror(np.deg2rad(args.epsilon_deg)))
    print(f"residual_ideal_fm     {ideal:.6g}")
    print(f"residual_epsilon_fm   {actual:.6g}  (epsilon_deg={args.epsilon_deg:.6g})")
    return 0


def _expand_config(argv: list[str]) -> list[str]:
    """Replace '--config PATH' with the flags read from the file (key=value lines).

    Expanded flags are inserted right after the subcommand so explicit
    command-line flags, which come later, win.
    """
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    if i + 1 >= len(argv):
        raise PfmAttackError("--config requires a file path")
    path = argv[i + 1]
    rest = argv[:i] + argv[i + 2 :]
    if not rest:
        raise PfmAttackError("--config requires a subcommand")
    flags: list[str] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise PfmAttackError(f"{path}: expected key=value, got {line!r}")
                key, value = key.strip(), value.strip()
                if key == "reproducible":
                    if value.lower() in ("1", "true", "yes", "on"):
                        flags.append("--reproducible")
                    continue
                flags.extend([f"--{key}", value])
    except OSError as exc:
        raise PfmAttackError(f"cannot read config {path}: {exc}") from exc
    return [rest[0], *flags, *rest[1:]]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfmattack",
        description="Imperfect-Faraday-mirror attack simulator for two-way plug-and-play QKD",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="evaluate one (epsilon, delta) point")
    p_eval.add_argument("--epsilon-deg", type=float, default=0.0, help="mirror deviation in degrees")
    p_eval.add_argument("--delta", type=parse_angle, required=True, help="phase step (pi/N or radians)")
    p_eval.add_argument("--attack", choices=("pfm", "remap"), default="pfm")
    p_eval.add_argument("--out", default=None, help="optional single-row CSV output path")
    p_eval.set_defaults(func=cmd_eval)

    p_sweep = sub.add_parser("sweep", help="grid sweep emitted as CSV")
    p_sweep.add_argument(
        "--epsilon-deg", type=parse_degree_grid, default=[0.0],
        help="epsilon grid in degrees: comma list or start:stop:count",
    )
    p_sweep.add_argument(
        "--delta", type=parse_angle_grid, required=True, help="delta grid: comma list of pi/N or radians"
    )
    p_sweep.add_argument("--attack", choices=("pfm", "remap"), default="pfm")
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--trials", type=int, default=None, help="add oracle columns with this many trials per row")
    p_sweep.add_argument("--seed", type=int, default=None, help="master seed for oracle columns")
    p_sweep.add_argument("--reproducible", action="store_true", help="suppress the timestamp comment")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="Monte Carlo oracle vs closed form")
    p_verify.add_argument("--epsilon-deg", type=float, default=0.0)
    p_verify.add_argument("--delta", type=parse_angle, required=True)
    p_verify.add_argument("--attack", choices=("pfm", "remap"), default="pfm")
    p_verify.add_argument("--trials", type=int, default=1_000_000)
    p_verify.add_argument("--seed", type=int, default=12345)
    p_verify.set_defaults(func=cmd_verify)

    p_comp = sub.add_parser("compensation", help="round-trip compensation residual")
    p_comp.add_argument("--theta-prime", type=parse_angle, default=0.0, help="eigenmode rotation (radians or pi/N)")
    p_comp.add_argument("--phi-o", type=parse_angle, default=0.0)
    p_comp.add_argument("--phi-e", type=parse_angle, default=0.0)
    p_comp.add_argument("--epsilon-deg", type=float, default=0.0)
    p_comp.set_defaults(func=cmd_compensation)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _expand_config(argv)
        args = build_parser().parse_args(argv)
        return args.func(args)
    except PfmAttackError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: ``qwi solve``, ``qwi wavefunction``, ``qwi compare``.

Exit codes: 0 success, 1 usage or input errors, 2 numerical failure or a
comparison outside tolerance.  Set ``QWI_LOG`` (e.g. ``DEBUG``) for logging.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import __version__, classical, greens, impedance, oracle, transfer
from .errors import ProfileError, UnsupportedProfileError
from .potential import PotentialProfile, UnitSystem, dump_profile, load_profile, three_region, well_wavenumbers

log = logging.getLogger("qwi")

METHODS = ("classical", "transfer", "impedance")
EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunReport:
    profile: dict
    methods: dict = field(default_factory=dict)
    pairwise_max_delta: dict = field(default_factory=dict)
    normalization_checks: list = field(default_factory=list)
    oracle: dict | None = None
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_dict(self) -> dict:
        out = {
            "profile": self.profile,
            "methods": self.methods,
            "pairwise_max_delta": self.pairwise_max_delta,
        }
        if self.normalization_checks:
            out["normalization_checks"] = self.normalization_checks
        if self.oracle is not None:
            out["oracle"] = self.oracle
        if self.checks:
            out["checks"] = self.checks
            out["status"] = "PASS" if self.passed else "FAIL"
        if self.notes:
            out["notes"] = self.notes
        return out


def _g17(x) -> str:
    return format(float(x), ".17g")


def _solver(method: str):
    return {
        "classical": classical.find_bound_states,
        "transfer": transfer.find_bound_states_tm,
        "impedance": impedance.find_bound_states_imp,
    }[method]


def _state_row(state: classical.BoundState) -> dict:
    row = {"index": state.index, "energy": state.energy, "residual": state.residual}
    if state.norm_constant is not None:
        row["norm_constant"] = state.norm_constant
    if state.phase is not None:
        row["phase"] = state.phase
    return row


def run_methods(profile, units, methods, resolution, report: RunReport) -> dict:
    energies = {}
    for m in methods:
        try:
            states = _solver(m)(profile, units, resolution)
        except UnsupportedProfileError as exc:
            report.methods[m] = {"unsupported": str(exc)}
            continue
        report.methods[m] = [_state_row(s) for s in states]
        energies[m] = [s.energy for s in states]
        log.info("%s: %d bound states", m, len(states))
    for a, b in combinations(sorted(energies), 2):
        ea, eb = energies[a], energies[b]
        key = f"{a}-{b}"
        if len(ea) != len(eb):
            report.pairwise_max_delta[key] = None
            report.notes.append(f"{a} found {len(ea)} states, {b} found {len(eb)}")
        else:
            report.pairwise_max_delta[key] = max((abs(x - y) for x, y in zip(ea, eb)), default=0.0)
    return energies


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_text(payload: dict, args) -> str:
    if not args.no_meta:
        payload = {"meta": {"tool": "qwi", "version": __version__, "command": args.command}, **payload}
    return json.dumps(payload, indent=2, allow_nan=True) + "\n"


def _states_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["method", "index", "energy", "residual", "norm_constant", "phase"])
    for m, rows in report.methods.items():
        if isinstance(rows, dict):
            continue
        for r in rows:
            w.writerow([m, r["index"], _g17(r["energy"]), _g17(r["residual"]),
                        _g17(r["norm_constant"]) if "norm_constant" in r else "",
                        _g17(r["phase"]) if "phase" in r else ""])
    return buf.getvalue()


def cmd_solve(args, profile, units) -> int:
    methods = METHODS if args.method == "all" else (args.method,)
    report = RunReport(dump_profile(profile, units))
    run_methods(profile, units, methods, args.resolution, report)
    if args.method != "all" and isinstance(report.methods[args.method], dict):
        raise UnsupportedProfileError(report.methods[args.method]["unsupported"])
    text = _states_csv(report) if args.format == "csv" else _json_text(report.to_dict(), args)
    _emit(text, args.out)
    return EXIT_OK


def _wavefunction_samples(profile, units, state, n_samples, method, eps_schedule):
    well = three_region(profile)
    E = state.energy
    kappa1, k2, kappa3 = (float(v) for v in well_wavenumbers(well, units, E))
    x0, a = well.origin, well.width
    x = np.linspace(x0 - 10.0 / kappa1, x0 + a + 10.0 / kappa3, n_samples)
    if method == "classical":
        psi = classical.wavefunction(profile, units, state, x)
        return x, psi, psi**2

    inside = (x > x0) & (x < x0 + a)
    psi_left = impedance.well_wavefunction(profile, units, state, x0)
    psi_right = impedance.well_wavefunction(profile, units, state, x0 + a)
    psi = np.where(x <= x0, psi_left * np.exp(kappa1 * np.minimum(x - x0, 0.0)),
                   psi_right * np.exp(-kappa3 * np.maximum(x - x0 - a, 0.0)))
    psi[inside] = impedance.well_wavefunction(profile, units, state, x[inside])
    if method == "impedance":
        return x, psi, psi**2

    # eps-limit density inside; outside, continue the interface values into the decaying tails
    delta = greens.NODE_SHIFT * a
    rho_left, rho_right = greens.eigenfunction_density(
        profile, units, np.array([x0 + delta, x0 + a - delta]), E, eps_schedule)
    density = np.where(x <= x0, rho_left * np.exp(2 * kappa1 * np.minimum(x - x0, 0.0)),
                       rho_right * np.exp(-2 * kappa3 * np.maximum(x - x0 - a, 0.0)))
    if np.any(inside):
        density[inside] = greens.eigenfunction_density(profile, units, x[inside], E, eps_schedule)
    signed = np.sign(psi) * np.sqrt(np.clip(density, 0.0, None))
    return x, signed, density


def cmd_wavefunction(args, profile, units) -> int:
    solver = impedance.find_bound_states_imp if args.method in ("impedance", "greens") else classical.find_bound_states
    states = solver(profile, units, args.resolution)
    if not 0 <= args.state < len(states):
        raise IndexError(f"state index {args.state} out of range: {len(states)} bound states available")
    if args.samples < 2:
        raise UsageError("--samples must be >= 2")
    x, psi, density = _wavefunction_samples(profile, units, states[args.state], args.samples,
                                            args.method, args.eps_schedule)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "psi", "density"])
    for row in zip(x, psi, density):
        w.writerow([_g17(v) for v in row])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def compare(profile: PotentialProfile, units: UnitSystem, resolution: int = classical.DEFAULT_RESOLUTION,
            oracle_points: int = oracle.DEFAULT_POINTS, pair_tol: float = 1e-10,
            oracle_tol: float = 1e-4) -> RunReport:
    """All three analytic methods plus the finite-difference oracle, with pass/fail checks."""
    report = RunReport(dump_profile(profile, units))
    energies = run_methods(profile, units, METHODS, resolution, report)
    report.checks["pairwise"] = all(
        d is not None and d <= pair_tol for d in report.pairwise_max_delta.values()
    )
    for e in energies.get("classical", []):
        closed = 1.0 / classical.normalization(profile, units, e)
        direct = classical.normalization_terms(profile, units, e)
        report.normalization_checks.append(
            {"energy": e, "closed_form": closed, "term_sum": direct, "relative_difference": abs(closed - direct) / direct}
        )
    report.checks["normalization"] = all(c["relative_difference"] <= 1e-10 for c in report.normalization_checks)

    reference = energies["transfer"]
    if not reference:
        report.oracle = {"states": 0, "status": "0 states, trivially consistent"}
        report.checks["oracle"] = True
        return report
    problem, states = oracle.solve(profile, units, reference, oracle_points)
    found = [s.energy for s in states]
    same = len(found) == len(reference)
    delta = max(abs(a - b) for a, b in zip(found, reference)) if same else None
    report.oracle = {
        "n_points": problem.n_points,
        "h": problem.h,
        "margin": problem.margin,
        "energies": found,
        "max_delta_vs_transfer": delta,
    }
    if not same:
        report.notes.append(f"oracle found {len(found)} states, transfer found {len(reference)}")
    report.checks["oracle"] = same and delta <= oracle_tol
    return report


def cmd_compare(args, profile, units) -> int:
    report = compare(profile, units, args.resolution, args.oracle_points, args.pair_tol, args.oracle_tol)
    if args.format == "csv":
        text = _states_csv(report)
    else:
        text = _json_text(report.to_dict(), args)
    _emit(text, args.out)
    return EXIT_OK if report.passed else EXIT_NUMERIC


def _eps_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid eps schedule {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qwi", description="Bound states of piecewise-constant 1D wells.")
    parser.add_argument("--version", action="version", version=f"qwi {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("profile", help="JSON profile: boundaries, potentials, hbar, mass")
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--resolution", type=int, default=classical.DEFAULT_RESOLUTION,
                       help="energy scan points for root bracketing")
        p.add_argument("--no-meta", action="store_true", help="omit the metadata block (golden files)")

    p = sub.add_parser("solve", help="bound-state energies")
    common(p)
    p.add_argument("--method", choices=METHODS + ("all",), default="all")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = sub.add_parser("wavefunction", help="sampled psi and |psi|^2 for one state (CSV)")
    common(p)
    p.add_argument("--state", type=int, default=0)
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--method", choices=("classical", "impedance", "greens"), default="classical")
    p.add_argument("--eps-schedule", type=_eps_list, default=greens.DEFAULT_EPS_SCHEDULE)

    p = sub.add_parser("compare", help="cross-check all methods and the finite-difference oracle")
    common(p)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--oracle-points", type=int, default=oracle.DEFAULT_POINTS)
    p.add_argument("--pair-tol", type=float, default=1e-10)
    p.add_argument("--oracle-tol", type=float, default=1e-4)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get("QWI_LOG", "WARNING").upper(),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        profile, units = load_profile(args.profile)
    except json.JSONDecodeError as exc:
        print(f"{args.profile}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{args.profile}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    except ProfileError as exc:
        print(f"{args.profile}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handler = {"solve": cmd_solve, "wavefunction": cmd_wavefunction, "compare": cmd_compare}[args.command]
    try:
        return handler(args, profile, units)
    except (UsageError, IndexError, UnsupportedProfileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ArithmeticError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

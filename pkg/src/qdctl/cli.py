"""Command-line front end.

Subcommands operate on JSON system-spec files and write JSON reports or CSV
curves.  Every number that influences a result (tolerances, grids, units,
seeds, backend) is echoed into the output so runs are reproducible; identical
inputs and seeds produce byte-identical outputs.

Exit codes: 0 success, 2 input/validation error, 3 numeric failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .backend import backend_name
from .criteria import (
    EPS_REL,
    ConditionReport,
    check_elimination,
    check_lemma1,
    check_theorem1,
    check_theorem2,
)
from .dynamics import StateVector, optimize_pulse, sweep_tau
from .errors import ContractError, InvalidSpecError, NumericError
from .hamiltonians import HBAR_EV_S, SystemSpec, demo_spec, energy_gaps, load_spec, to_json_dict
from .lie_closure import DEFAULT_TOLERANCE, is_completely_controllable


def _write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _parse_state(text: str, dim: int) -> StateVector:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if len(parts) != dim:
        raise InvalidSpecError(f"state needs {dim} components, got {len(parts)}")
    try:
        values = np.array([complex(p) for p in parts], dtype=np.complex128)
    except ValueError as exc:
        raise InvalidSpecError(f"cannot parse state component: {exc}") from exc
    norm = float(np.linalg.norm(values))
    if abs(norm - 1.0) > 1e-6:
        raise InvalidSpecError(f"state norm {norm} too far from 1 to auto-normalize")
    return StateVector.normalized(values)


def _parse_taus(args) -> tuple[list[float], str]:
    if args.taus is not None:
        taus = [float(p) for p in args.taus.split(",") if p.strip()]
        if not taus:
            raise InvalidSpecError("empty --taus list")
        return taus, f"explicit({args.taus})"
    if args.tau_range is not None:
        parts = args.tau_range.split(":")
        if len(parts) not in (3, 4):
            raise InvalidSpecError("--tau-range expects lo:hi:n[:lin|:log]")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        spacing = parts[3] if len(parts) == 4 else "log"
        if n < 1:
            raise InvalidSpecError("--tau-range needs at least one point")
        if spacing == "log":
            if lo <= 0 or hi <= 0:
                raise InvalidSpecError("log-spaced --tau-range needs positive bounds")
            taus = list(np.geomspace(lo, hi, n))
        elif spacing == "lin":
            taus = list(np.linspace(lo, hi, n))
        else:
            raise InvalidSpecError(f"unknown --tau-range spacing {spacing!r}")
        return taus, f"{spacing}({lo}:{hi}:{n})"
    taus = list(np.geomspace(1e-15, 1e-11, 41))
    return taus, "default log(1e-15:1e-11:41)"


def _theorem2_or_inapplicable(spec: SystemSpec, eps_rel: float) -> ConditionReport:
    try:
        return check_theorem2(spec, eps_rel)
    except InvalidSpecError as exc:
        return ConditionReport(
            condition_id="theorem2",
            passed=False,
            witnesses={},
            notes=f"inapplicable: {exc}",
        )


def _analysis_payload(spec: SystemSpec, tol: float, eps_rel: float) -> dict:
    closure = is_completely_controllable(spec, tolerance=tol)
    thm1 = check_theorem1(spec, eps_rel)
    thm2 = _theorem2_or_inapplicable(spec, eps_rel)
    reports = [check_lemma1(spec, eps_rel), thm1, thm2, *check_elimination(spec, eps_rel)]
    violation = (thm1.passed or thm2.passed) and not closure.controllable
    return {
        "spec": to_json_dict(spec),
        "backend": backend_name(),
        "closure": closure.to_json_dict(),
        "conditions": [r.to_json_dict() for r in reports],
        "consistency": {
            "sufficiency_violation": bool(violation),
            "note": (
                "a sufficient-condition pass with a non-controllable closure "
                "would indicate an implementation bug"
                if violation
                else ""
            ),
        },
    }


def cmd_analyze(args) -> int:
    spec = load_spec(args.spec, units=args.units)
    payload = {"command": "analyze", **_analysis_payload(spec, args.tol, args.eps_rel)}
    _write_json(args.out, payload)
    return 0


def cmd_split(args) -> int:
    spec = load_spec(args.spec, units=args.units)
    reports = check_elimination(spec, args.eps_rel)
    payload = {
        "command": "split",
        "spec": to_json_dict(spec),
        "pass": bool(all(r.passed for r in reports)),
        "conditions": [r.to_json_dict() for r in reports],
        "split_spectrum": reports[0].to_json_dict()["witnesses"]["split_spectrum"],
    }
    _write_json(args.out, payload)
    return 0


def cmd_fidelity(args) -> int:
    spec = load_spec(args.spec, units=args.units)
    state = _parse_state(args.state, spec.dim)
    taus, grid_desc = _parse_taus(args)
    curve = sweep_tau(
        spec,
        state,
        taus,
        with_exact=args.exact,
        dt_max=args.dt_max,
        corrected_indices=args.corrected_indices,
    )
    metadata = {
        "command": "fidelity",
        "spec": args.spec,
        "units": args.units or "file declaration (eV default)",
        "couplings": "interpreted in eV internally (J inputs divided by 1.602176634e-19)",
        "tau_grid": grid_desc,
        "exact": args.exact,
        "dt_max": "auto" if args.dt_max is None else args.dt_max,
        "corrected_indices": args.corrected_indices,
        "backend": backend_name(),
    }
    Path(args.out).write_text(curve.to_csv_text(metadata))
    return 0


def cmd_optimize(args) -> int:
    spec = load_spec(args.spec, units=args.units)
    if args.initial == "ground":
        ground = np.zeros(spec.dim, dtype=np.complex128)
        ground[0] = 1.0
        initial = StateVector(ground)
    else:
        initial = _parse_state(args.initial, spec.dim)
    if args.target == "random":
        rng = np.random.default_rng([int(args.seed), 1])
        target = StateVector.normalized(
            rng.normal(size=spec.dim) + 1j * rng.normal(size=spec.dim)
        )
    else:
        target = _parse_state(args.target, spec.dim)

    if args.duration == "auto":
        duration = 50.0 * HBAR_EV_S / energy_gaps(spec)[0]
    else:
        duration = float(args.duration)

    closure = is_completely_controllable(spec, tolerance=args.tol)
    schedule = optimize_pulse(
        spec,
        initial,
        target,
        n_segments=args.segments,
        duration=duration,
        iterations=args.iters,
        seed=args.seed,
    )

    out = Path(args.out)
    csv_path = out.with_name(out.stem + ".schedule.csv")
    csv_path.write_text(
        schedule.to_csv_text(
            {
                "command": "optimize",
                "spec": args.spec,
                "seed": args.seed,
                "achieved_fidelity": schedule.achieved_fidelity,
                "backend": backend_name(),
            }
        )
    )
    summary = {
        "command": "optimize",
        "spec": to_json_dict(spec),
        "achieved_fidelity": schedule.achieved_fidelity,
        "segments": args.segments,
        "duration": duration,
        "iterations": args.iters,
        "seed": args.seed,
        "backend": backend_name(),
        "closure": closure.to_json_dict(),
        "schedule_csv": str(csv_path),
    }
    if not closure.controllable:
        summary["warning"] = "system not completely controllable"
    _write_json(out, summary)
    return 0


def cmd_demo(args) -> int:
    if args.n < 3:
        raise InvalidSpecError(
            "demo requires at least 3 levels (the 2-level system is not "
            "completely controllable)"
        )
    spec = demo_spec(args.n)
    payload = {"command": "demo", "N": args.n, **_analysis_payload(spec, args.tol, args.eps_rel)}
    _write_json(args.out, payload)
    return 0


def _add_common(sub, spec_required: bool = True) -> None:
    if spec_required:
        sub.add_argument("--spec", required=True, help="system spec JSON file")
    sub.add_argument("--out", required=True, help="output file path")
    sub.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE, help="Lie-closure admission tolerance (relative)")
    sub.add_argument("--eps-rel", type=float, default=EPS_REL, help="relative margin for the exact inequalities")
    sub.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    sub.add_argument("--units", choices=["eV", "J"], default=None, help="override the spec file's coupling units")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdctl",
        description="Controllability analysis and relaxation/pulse simulation "
        "for ladder systems with two-fold degenerate excited levels.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", help="Lie-closure dimension plus every sufficient-condition report")
    _add_common(p)
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("split", help="degeneracy-splitting feasibility report")
    _add_common(p)
    p.set_defaults(func=cmd_split)

    p = subs.add_parser("fidelity", help="fidelity-versus-relaxation-time sweep (CSV)")
    _add_common(p)
    p.add_argument("--state", required=True, help="comma-separated target amplitudes (complex OK)")
    grid = p.add_mutually_exclusive_group()
    grid.add_argument("--taus", help="comma-separated relaxation times in seconds")
    grid.add_argument("--tau-range", help="lo:hi:n[:log|:lin] grid in seconds (default log)")
    p.add_argument("--exact", action="store_true", help="also integrate the exact dynamics")
    p.add_argument("--dt-max", type=float, default=None, help="step bound for the exact integrator (seconds)")
    p.add_argument(
        "--corrected-indices",
        action="store_true",
        help="use the typo-corrected neighbour amplitude indices in the first-order formula",
    )
    p.set_defaults(func=cmd_fidelity)

    p = subs.add_parser("optimize", help="gradient-ascent pulse search (CSV schedule + JSON summary)")
    _add_common(p)
    p.add_argument("--initial", default="ground", help='comma-separated amplitudes or "ground"')
    p.add_argument("--target", default="random", help='comma-separated amplitudes or "random" (seeded)')
    p.add_argument("--segments", type=int, default=40, help="number of pulse segments")
    p.add_argument("--duration", default="auto", help='total duration in seconds or "auto" (50*hbar/gap)')
    p.add_argument("--iters", type=int, default=2000, help="maximum gradient iterations")
    p.set_defaults(func=cmd_optimize)

    p = subs.add_parser("demo", help="build the equally spaced demo system and analyze it")
    _add_common(p, spec_required=False)
    p.add_argument("--n", type=int, required=True, help="number of levels (>= 3)")
    p.set_defaults(func=cmd_demo)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except (InvalidSpecError, ContractError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

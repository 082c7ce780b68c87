"""Command-line front end.

Exit codes: 0 success, 2 validation error (bad files/flags), 3 estimation
error (empty cells, vacuous identification). Errors go to stderr as one JSON
object {code, message, context}; results go to stdout as schema-versioned JSON
or CSV. Identical invocations produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings

from . import bounds as _bounds
from . import extensions as _ext
from . import inference as _inf
from . import simulation as _sim
from .data import (
    MONO_NEGATIVE,
    MONO_POSITIVE,
    WITHOUT_MONOTONICITY,
    AssumptionSet,
    cell_counts,
    load_multi_csv,
    load_panel_csv,
    load_rcs_csv,
)
from .errors import DataWarning, EstimationError, ValidationError

SCHEMA = 1

ASSUMPTION_FLAGS = {
    "nomono": WITHOUT_MONOTONICITY,
    "mono-pos": MONO_POSITIVE,
    "mono-neg": MONO_NEGATIVE,
}


def _parse_assumptions(name: str, param: str) -> AssumptionSet:
    if name not in ASSUMPTION_FLAGS:
        raise ValidationError(f"unknown assumption set {name!r}")
    base = ASSUMPTION_FLAGS[name]
    dominance = {"ono": "5a", "nno": "5b", "noo": "5c"}.get(param)
    if dominance is None:
        return base
    if name != "mono-pos":
        raise ValidationError(f"parameter {param} requires --assumptions mono-pos")
    return AssumptionSet(
        "with_monotonicity",
        "positive",
        joint_independence=True,
        mean_dominance=dominance,
    )


def _emit(payload: dict, output: str) -> None:
    if output == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        flat = _flatten(payload)
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(flat.keys())
        writer.writerow(flat.values())
        sys.stdout.write(buf.getvalue())


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        elif isinstance(value, list):
            out[name] = ";".join(str(v) for v in value)
        else:
            out[name] = value
    return out


def _collect_warnings(caught) -> list:
    return [str(w.message) for w in caught if issubclass(w.category, DataWarning)]


def _add_ci_flags(sub):
    sub.add_argument("--ci", choices=["none", "union", "im"], default="none")
    sub.add_argument("--boot", type=int, default=200)
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--legacy-se-scaling", action="store_true")
    sub.add_argument("--output", choices=["json", "csv"], default="json")
    sub.add_argument("--threads", type=int, default=None,
                     help="advisory worker cap; results are thread-count-invariant")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="didbounds")
    commands = parser.add_subparsers(dest="command", required=True)

    p_bounds = commands.add_parser("bounds", help="two-period panel bounds")
    p_bounds.add_argument("--data", required=True)
    p_bounds.add_argument("--param", choices=["ooo", "ono", "nno", "noo"], default="ooo")
    p_bounds.add_argument("--assumptions", default="mono-pos")
    p_bounds.add_argument("--support-y00", type=float, default=None)
    p_bounds.add_argument("--support-y01", type=float, default=None)
    p_bounds.add_argument("--support-y10", type=float, default=None)
    _add_ci_flags(p_bounds)

    p_rcs = commands.add_parser("bounds-rcs", help="repeated cross-section bounds")
    p_rcs.add_argument("--data", required=True)
    p_rcs.add_argument("--variant", choices=["level", "trend"], default="level")
    p_rcs.add_argument("--assumptions", choices=["nomono", "mono-pos"], default="mono-pos")
    _add_ci_flags(p_rcs)

    p_stag = commands.add_parser("bounds-staggered", help="staggered 2x2 bounds")
    p_stag.add_argument("--data", required=True)
    p_stag.add_argument("--gamma", type=int, required=True)
    p_stag.add_argument("--t", type=int, required=True)
    p_stag.add_argument("--assumptions", default="mono-pos")
    _add_ci_flags(p_stag)

    p_naive = commands.add_parser("naive", help="naive DiD on observed units")
    p_naive.add_argument("--data", required=True)
    p_naive.add_argument("--design", choices=["panel", "rcs"], default="panel")
    p_naive.add_argument("--output", choices=["json", "csv"], default="json")

    p_strata = commands.add_parser("strata", help="latent strata proportions")
    p_strata.add_argument("--data", required=True)
    p_strata.add_argument("--output", choices=["json", "csv"], default="json")

    p_sim = commands.add_parser("simulate", help="Monte Carlo replication study")
    p_sim.add_argument("--n", type=int, required=True)
    p_sim.add_argument("--reps", type=int, required=True)
    p_sim.add_argument("--seed", type=int, required=True)
    p_sim.add_argument("--assumptions", default="mono-pos,nomono")
    p_sim.add_argument("--coverage", choices=["att", "interval"], default="att")
    p_sim.add_argument("--oracle-draws", type=int, default=2_000_000)
    p_sim.add_argument("--att", type=float, default=4.0)
    p_sim.add_argument("--threads", type=int, default=None)

    p_oracle = commands.add_parser("oracle", help="true values by numerical integration")
    p_oracle.add_argument("--mc-draws", type=int, default=10_000_000)
    p_oracle.add_argument("--seed", type=int, required=True)
    p_oracle.add_argument("--att", type=float, default=4.0)
    p_oracle.add_argument("--selection-shift", type=float, default=1.5)
    p_oracle.add_argument("--threads", type=int, default=None)
    return parser


def _panel_bound(args, data):
    assumptions = _parse_assumptions(args.assumptions, args.param)
    overrides = {
        "y00_lb": args.support_y00,
        "y01_lb": args.support_y01,
        "y10_lb": args.support_y10,
    }
    fn = {
        "ooo": lambda d: _bounds.bounds_tau_ooo(d, assumptions),
        "ono": lambda d: _bounds.bounds_tau_ono(d, assumptions, overrides),
        "nno": lambda d: _bounds.bounds_tau_nno(d, assumptions, overrides),
        "noo": lambda d: _bounds.bounds_tau_noo(d, assumptions, overrides),
    }[args.param]
    return fn, fn(data)


def _attach_ci(args, data, fn, result) -> dict:
    payload = {"schema": SCHEMA, **result.to_dict()}
    if args.ci != "none":
        if args.seed is None:
            raise ValidationError("--seed is required when a CI is requested")
        boot = _inf.bootstrap_ses(data, fn, _inf.BootstrapSpec(args.boot, args.seed))
        if args.ci == "union":
            ci = _inf.ci_union(
                result.lb, result.ub, boot.se_lb, boot.se_ub,
                n=data.n, legacy_se_scaling=args.legacy_se_scaling,
            )
        else:
            ci = _inf.ci_imbens_manski(
                result.lb, result.ub, boot.se_lb, boot.se_ub, data.n,
                legacy_se_scaling=args.legacy_se_scaling,
            )
        ci.reps_used = boot.reps_used
        ci.failed_reps = boot.failed_reps
        payload["ci"] = ci.to_dict()
    return payload


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DataWarning)
            if args.command == "bounds":
                data = load_panel_csv(args.data)
                fn, result = _panel_bound(args, data)
                payload = _attach_ci(args, data, fn, result)
                payload["warnings"] = _collect_warnings(caught) + payload["warnings"]
                _emit(payload, args.output)
            elif args.command == "bounds-rcs":
                data = load_rcs_csv(args.data)
                variant = {"level": "LevelEquality", "trend": "TrendEquality"}[args.variant]
                assumptions = ASSUMPTION_FLAGS[args.assumptions]
                fn = lambda d: _ext.bounds_tau_oo_rcs(d, variant, assumptions)
                result = fn(data)
                payload = _attach_ci(args, data, fn, result)
                payload["warnings"] = _collect_warnings(caught) + payload["warnings"]
                _emit(payload, args.output)
            elif args.command == "bounds-staggered":
                data = load_multi_csv(args.data)
                assumptions = _parse_assumptions(args.assumptions, "ooo")
                target = _ext.StaggeredTarget(args.gamma, args.t)
                result = _ext.bounds_staggered(data, target, assumptions)
                payload = {"schema": SCHEMA, **result.to_dict()}
                payload["warnings"] = _collect_warnings(caught) + payload["warnings"]
                _emit(payload, args.output)
            elif args.command == "naive":
                if args.design == "panel":
                    value = _bounds.naive_did(load_panel_csv(args.data))
                else:
                    value = _ext.naive_did_rcs(load_rcs_csv(args.data))
                _emit({"schema": SCHEMA, "naive_did": value,
                       "warnings": _collect_warnings(caught)}, args.output)
            elif args.command == "strata":
                data = load_panel_csv(args.data)
                mix = _bounds.strata_proportions(data)
                _emit(
                    {
                        "schema": SCHEMA,
                        "proportions": mix.to_dict(),
                        "cell_counts": {
                            f"s0={k[0]},s1={k[1]},d={k[2]}": v
                            for k, v in cell_counts(data).items()
                        },
                        "warnings": _collect_warnings(caught) + mix.warnings,
                    },
                    args.output,
                )
            elif args.command == "simulate":
                config = _sim.DgpConfig(n=args.n, att=args.att, seed=args.seed)
                rows = _sim.run_monte_carlo(
                    config,
                    args.reps,
                    [a.strip() for a in args.assumptions.split(",") if a.strip()],
                    coverage=args.coverage,
                    oracle_draws=args.oracle_draws,
                )
                sys.stdout.write(_sim.monte_carlo_csv(rows))
            elif args.command == "oracle":
                config = _sim.DgpConfig(
                    n=2, att=args.att, selection_shift=args.selection_shift
                )
                result = _sim.oracle_true_values(config, args.mc_draws, seed=args.seed)
                sys.stdout.write(
                    json.dumps({"schema": SCHEMA, **result.to_dict()}, indent=2) + "\n"
                )
    except ValidationError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 2
    except EstimationError as exc:
        sys.stderr.write(json.dumps(exc.to_dict()) + "\n")
        return 3
    except OSError as exc:
        sys.stderr.write(
            json.dumps({"code": "IOError", "message": str(exc), "context": {}}) + "\n"
        )
        return 2
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()

"""Command-line entry point: ``uncertainty-lab <subcommand> [options]``.

Exit status: 0 on success, 2 on invalid input, 3 when a universal relation
is violated or the inconsistency check reports a fault.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import box
from .audit import FAULT, check_unbiased_disturbance, check_unbiased_measurement, inconsistency_certificate
from .experiments import CAMPAIGN_SUITES, fmt, run_property_campaign, run_spin_sweep
from .frontier import (
    MIN_BUDGET,
    ModelParameterization,
    SearchMonitor,
    bias_blowup_probe,
    trace_frontier,
)
from .model import build_projective_spin, load_model, operator_from_doc
from .operators import KET, SX, SY, SZ, Tolerances, as_state
from .relations import RelationId, evaluate_all, robertson_variants

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_VIOLATION = 3

NAMED_OPERATORS = {"sx": SX, "sy": SY, "sz": SZ}


class ValidationError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-alg", type=float, default=1e-10)
    p.add_argument("--tol-rel", type=float, default=1e-8)
    p.add_argument("--out", type=Path, default=None, help="write output here instead of stdout")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="uncertainty-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spin-sweep", parents=[common], help="projective spin model over a phi grid")
    p.add_argument("--phi-start", type=float, default=0.0, help="radians")
    p.add_argument("--phi-end", type=float, default=math.pi / 2, help="radians")
    p.add_argument("--steps", type=int, default=91)

    p = sub.add_parser("campaign", parents=[common], help="random-instance property campaign")
    p.add_argument("--suite", required=True, help="|".join(CAMPAIGN_SUITES))
    p.add_argument("--instances", type=int, default=1000)

    p = sub.add_parser("frontier", parents=[common], help="error/disturbance frontier search (spin setting)")
    p.add_argument("--budget", type=int, default=3000)
    p.add_argument("--phi0", type=float, default=math.pi / 4, help="start model: projective spin at this angle")
    p.add_argument(
        "--blowup-caps",
        type=str,
        default=None,
        help="comma-separated decreasing eps caps; runs the bias blow-up probe instead",
    )

    p = sub.add_parser("box", parents=[common], help="periodic-box px relation for a state file")
    p.add_argument("--state", type=Path, default=None, help="BoxState JSON; default: single mode n=0")

    p = sub.add_parser("audit", parents=[common], help="unbiasedness audit of a model file")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--A", dest="A", default="sx", help="sx|sy|sz or a JSON matrix file")
    p.add_argument("--B", dest="B", default="sy", help="sx|sy|sz or a JSON matrix file")
    p.add_argument("--psi", default="+z", help="+z|-z|+x|-x|+y|-y or a JSON vector file of [re, im] pairs")
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _dump_json(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def _operator_arg(value: str) -> np.ndarray:
    if value in NAMED_OPERATORS:
        return NAMED_OPERATORS[value]
    try:
        return operator_from_doc(json.loads(Path(value).read_text()))
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read operator {value!r}: {exc}") from exc


def _state_arg(value: str) -> np.ndarray:
    if value in KET:
        return KET[value]
    try:
        pairs = json.loads(Path(value).read_text())
        return as_state([complex(re, im) for re, im in pairs])
    except (OSError, ValueError, TypeError) as exc:
        raise ValidationError(f"cannot read state {value!r}: {exc}") from exc


def cmd_spin_sweep(args, tol) -> int:
    result = run_spin_sweep(args.phi_start, args.phi_end, args.steps, tol, args.seed)
    text = result.to_csv() if args.format == "csv" else _dump_json(result.as_dict())
    _emit(text, args.out)
    return EXIT_VIOLATION if result.universal_violations() else EXIT_OK


def cmd_campaign(args, tol) -> int:
    summary = run_property_campaign(args.suite, args.instances, args.seed, tol)
    text = summary.to_csv() if args.format == "csv" else _dump_json(summary.as_dict())
    _emit(text, args.out)
    print(
        f"{summary.suite}: {summary.passes}/{summary.instances} passed, "
        f"worst margin {summary.worst_margin:.3e}",
        file=sys.stderr,
    )
    return EXIT_OK if summary.ok else EXIT_VIOLATION


def cmd_frontier(args, tol) -> int:
    if args.budget < MIN_BUDGET:
        raise ValidationError(f"budget >= {MIN_BUDGET} required")
    psi = KET["+z"]
    p0 = ModelParameterization.from_model(build_projective_spin(args.phi0))
    monitor = SearchMonitor()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")

    if args.blowup_caps:
        try:
            caps = [float(c) for c in args.blowup_caps.split(",")]
        except ValueError as exc:
            raise ValidationError(str(exc)) from exc
        records = bias_blowup_probe(SX, SY, psi, caps, args.budget, args.seed, p0=p0, monitor=monitor, tol=tol)
        if args.format == "json":
            text = _dump_json({"records": [r.__dict__ for r in records], "monitor": _monitor_doc(monitor)})
        else:
            w.writerow(["eps_cap", "achieved_eps", "min_bias_B", "evaluations", "penalty_schedule", "feasible"])
            for r in records:
                sched = ";".join(fmt(m) for m in r.penalty_schedule)
                w.writerow([fmt(r.eps_cap), fmt(r.achieved_eps), fmt(r.min_bias_B), r.evaluations, sched, int(r.feasible)])
            text = buf.getvalue()
    else:
        points = trace_frontier(SX, SY, psi, p0, args.budget, args.seed, monitor, tol)
        if args.format == "json":
            doc = {
                "points": [
                    {"eps": p.eps, "eta": p.eta, "theta": p.theta.tolist(), "reports": [r.as_dict() for r in p.reports]}
                    for p in points
                ],
                "monitor": _monitor_doc(monitor),
            }
            text = _dump_json(doc)
        else:
            w.writerow(["eps_A", "eta_B", "naive_lhs", "r4_status", "r5_status", "r6_status"])
            for p in points:
                status = {r.id: r.status for r in p.reports}
                w.writerow(
                    [
                        fmt(p.eps),
                        fmt(p.eta),
                        fmt(p.eps * p.eta),
                        status[RelationId.R4_NAIVE_ED],
                        status[RelationId.R5_OZAWA],
                        status[RelationId.R6_UV_HEISENBERG],
                    ]
                )
            text = buf.getvalue()
    _emit(text, args.out)
    bad = monitor.universal_violations or monitor.forbidden_hits
    return EXIT_VIOLATION if bad else EXIT_OK


def _monitor_doc(m: SearchMonitor) -> dict:
    return {
        "evaluations": m.evaluations,
        "spot_checks": m.spot_checks,
        "universal_violations": m.universal_violations,
        "forbidden_hits": m.forbidden_hits,
        "worst_universal_margin": m.worst_universal_margin,
    }


def cmd_box(args, tol) -> int:
    try:
        state = box.single_mode(0) if args.state is None else box.load_box(args.state)
    except (OSError, KeyError, ValueError) as exc:
        raise ValidationError(f"cannot read box state: {exc}") from exc
    rep = box.check_relation_4_1(state, tol)
    if args.format == "json":
        doc = rep.as_dict() | {
            "delta_p": box.delta_p(state, tol),
            "delta_x": box.delta_x(state, tol),
            "boundary_term": box.boundary_term(state),
        }
        text = _dump_json(doc)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["id", "lhs", "rhs", "margin", "status", "universality"])
        w.writerow([rep.id.value, fmt(rep.lhs), fmt(rep.rhs), fmt(rep.margin), rep.status, rep.universality])
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_VIOLATION if rep.violated else EXIT_OK


def cmd_audit(args, tol) -> int:
    try:
        model = load_model(args.model, tol)
    except (OSError, KeyError, ValueError) as exc:
        raise ValidationError(f"cannot read model: {exc}") from exc
    A, B, psi = _operator_arg(args.A), _operator_arg(args.B), _state_arg(args.psi)
    if A.shape[0] != model.d_sys or B.shape[0] != model.d_sys or psi.shape[0] != model.d_sys:
        raise ValidationError(f"observables and state must have dimension {model.d_sys}")
    bias_a = check_unbiased_measurement(model, A, "A", tol)
    bias_b = check_unbiased_disturbance(model, B, "B", tol)
    cert = inconsistency_certificate(model, A, B, psi, tol)
    suite = evaluate_all(model, A, B, psi, tol=tol)
    variants = robertson_variants(model, A, B, psi, tol)
    if args.format == "json":
        doc = {
            "measurement_bias": bias_a.__dict__,
            "disturbance_bias": bias_b.__dict__,
            "certificate": cert.as_dict(),
            "relations": [r.as_dict() for r in suite],
            "skipped": {k.value: v for k, v in suite.skipped.items()},
            "robertson_variants": {k: v.as_dict() for k, v in variants.items()},
        }
        text = _dump_json(doc)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["item", "value", "status"])
        w.writerow(["measurement_bias_A", fmt(bias_a.reduced_deviation_norm), "unbiased" if bias_a.is_unbiased else "biased"])
        w.writerow(["disturbance_bias_B", fmt(bias_b.reduced_deviation_norm), "unbiased" if bias_b.is_unbiased else "biased"])
        w.writerow(["certificate", fmt(cert.commutator_expectation), cert.verdict])
        for r in suite:
            w.writerow([r.id.value, fmt(r.margin), r.status])
        text = buf.getvalue()
    _emit(text, args.out)
    bad = cert.verdict == FAULT or suite.universal_violations() or any(v.violated for v in variants.values())
    return EXIT_VIOLATION if bad else EXIT_OK


COMMANDS = {
    "spin-sweep": cmd_spin_sweep,
    "campaign": cmd_campaign,
    "frontier": cmd_frontier,
    "box": cmd_box,
    "audit": cmd_audit,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        tol = Tolerances(args.tol_alg, args.tol_rel)
        return COMMANDS[args.command](args, tol)
    except (ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

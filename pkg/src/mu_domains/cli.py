"""Batch command-line front end with JSON input and output.

Every subcommand reads one JSON document (from ``--input`` or stdin) and
writes one JSON document (to ``--output`` or stdout). Complex numbers are
``[re, im]`` pairs. Exit codes:

    0   interior / feasible / verified / healthy sweep
    1   boundary (within the tolerance band) / unhealthy sweep
    2   exterior / infeasible / disc failed verification
    3   interpolant construction incomplete
    64  malformed input
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from typing import Optional, Sequence

from .domains import Verdict, g2_membership, tetra_membership
from .errors import (
    ConstructionIncomplete,
    HypothesisViolated,
    InfeasibleProblem,
    MalformedInput,
    MuDomainsError,
    OutsideDomain,
    WitnessNotConstructed,
)
from .interpolate import (
    AnalyticDisc,
    build_interpolant_g2,
    build_interpolant_tetra,
    schur_matrix_witness,
    verify_interpolant,
)
from .jsonio import decode_complex, encode_complex, encode_real
from .oracle import SweepConfig, equivalence_sweep
from .schwarz import (
    Feasibility,
    SchwarzProblem,
    g2_feasibility,
    lempert_origin_g2,
    lempert_origin_tetra,
    tetra_feasibility,
)
from .settings import resolve_band

EXIT_OK = 0
EXIT_BOUNDARY = 1
EXIT_OUTSIDE = 2
EXIT_INCOMPLETE = 3
EXIT_MALFORMED = 64

_VERDICT_EXIT = {Verdict.INTERIOR: EXIT_OK, Verdict.BOUNDARY: EXIT_BOUNDARY, Verdict.EXTERIOR: EXIT_OUTSIDE}
_FEASIBILITY_EXIT = {
    Feasibility.FEASIBLE: EXIT_OK,
    Feasibility.BOUNDARY: EXIT_BOUNDARY,
    Feasibility.INFEASIBLE: EXIT_OUTSIDE,
}
_DIMENSION = {"tetra": 3, "g2": 2}


# ---------------------------------------------------------------------------
# input parsing


def _domain(doc):
    domain = doc.get("domain", "tetra")
    if domain not in _DIMENSION:
        raise MalformedInput(f"domain must be 'tetra' or 'g2', got {domain!r}")
    return domain


def _point(doc, domain):
    raw = doc.get("point")
    if not isinstance(raw, list) or len(raw) != _DIMENSION[domain]:
        raise MalformedInput(f"point must be a list of {_DIMENSION[domain]} complex values")
    return tuple(decode_complex(v, f"point[{k}]") for k, v in enumerate(raw))


def _lambda0(doc):
    if "lambda0" not in doc:
        raise MalformedInput("missing 'lambda0'")
    lam = decode_complex(doc["lambda0"], "lambda0")
    if lam == 0 or abs(lam) >= 1:
        raise MalformedInput(f"lambda0 must satisfy 0 < |lambda0| < 1, got {lam}")
    return lam


def _problem(doc):
    domain = _domain(doc)
    point = _point(doc, domain)
    lam = _lambda0(doc)
    prob = SchwarzProblem.tetra(lam, point) if domain == "tetra" else SchwarzProblem.g2(lam, point)
    return domain, prob


# ---------------------------------------------------------------------------
# output shaping


def _pair(beta):
    return None if beta is None else [encode_complex(beta.beta1), encode_complex(beta.beta2)]


def _matrix(m):
    if m is None:
        return None
    return {
        "entries": [[encode_complex(m.a11), encode_complex(m.a12)], [encode_complex(m.a21), encode_complex(m.a22)]],
        "norm": encode_real(m.norm),
        "exceeds_ball": m.exceeds_ball,
    }


def _report_json(rep):
    return {
        "endpoint_err_0": encode_real(rep.endpoint_err_0),
        "endpoint_err_lambda0": encode_real(rep.endpoint_err_lambda0),
        "worst_membership_margin": encode_real(rep.worst_membership_margin),
        "worst_point": encode_complex(rep.worst_point),
        "verified": rep.verified,
    }


def _echo(domain, point, lam=None):
    out = {"domain": domain, "point": [encode_complex(v) for v in point]}
    if lam is not None:
        out["lambda0"] = encode_complex(lam)
    return out


# ---------------------------------------------------------------------------
# subcommands


def cmd_membership(doc, args):
    domain = _domain(doc)
    point = _point(doc, domain)
    fn = tetra_membership if domain == "tetra" else g2_membership
    v = fn(point, band=args.tol)
    out = _echo(domain, point)
    out.update(
        overall=v.overall.value,
        margin=encode_real(v.margin),
        criteria=[{"id": c.id, "verdict": c.verdict.value, "margin": encode_real(c.margin)} for c in v.criteria],
        beta=_pair(v.beta),
        matrix=_matrix(v.matrix),
        consistent=v.consistent,
        notes=v.notes,
    )
    return out, _VERDICT_EXIT[v.overall]


def cmd_feasibility(doc, args):
    domain, prob = _problem(doc)
    fn = tetra_feasibility if domain == "tetra" else g2_feasibility
    with warnings.catch_warnings():
        # the same message is recorded in the report notes
        warnings.simplefilter("ignore", HypothesisViolated)
        r = fn(prob, band=args.tol)
    out = _echo(domain, prob.target, prob.lambda0)
    out.update(
        feasible=r.feasible.value,
        conditions=[{"id": c.id, "verdict": c.verdict.value, "margin": encode_real(c.margin)} for c in r.conditions],
        branch=r.branch,
        lempert=encode_real(r.lempert),
        beta=_pair(r.beta),
        matrix=_matrix(r.matrix),
        consistent=r.consistent,
        notes=r.notes,
    )
    return out, _FEASIBILITY_EXIT[r.feasible]


def cmd_lempert(doc, args):
    domain = _domain(doc)
    point = _point(doc, domain)
    fn = lempert_origin_tetra if domain == "tetra" else lempert_origin_g2
    out = _echo(domain, point)
    out["lempert"] = encode_real(fn(point, band=args.tol))
    return out, EXIT_OK


def cmd_interpolate(doc, args):
    domain, prob = _problem(doc)
    build = build_interpolant_tetra if domain == "tetra" else build_interpolant_g2
    disc = build(prob, band=args.tol)
    report = verify_interpolant(disc, prob, n=args.grid)
    out = _echo(domain, prob.target, prob.lambda0)
    out.update(disc=disc.to_json(), report=_report_json(report))
    if domain == "tetra":
        try:
            out["witness"] = schur_matrix_witness(prob, disc, band=args.tol).to_json()
        except WitnessNotConstructed as exc:
            out["witness"] = None
            out["notes"] = [f"no matrix witness: {exc}"]
    return out, EXIT_OK if report.verified else EXIT_OUTSIDE


def cmd_verify(doc, args):
    domain, prob = _problem(doc)
    if "disc" not in doc:
        raise MalformedInput("missing 'disc'")
    disc = AnalyticDisc.from_json(doc["disc"])
    report = verify_interpolant(disc, prob, n=args.grid)
    out = _echo(domain, prob.target, prob.lambda0)
    out.update(disc=disc.to_json(), report=_report_json(report))
    return out, EXIT_OK if report.verified else EXIT_OUTSIDE


_SWEEP_KEYS = {"n": "n_samples", "n_samples": "n_samples", "seed": "seed", "campaign": "campaign",
               "mutate": "mutate", "workers": "workers", "grid_samples": "grid_samples",
               "torus_grid": "torus_grid", "bidisc_grid": "bidisc_grid"}


def cmd_sweep(doc, args):
    fields = {}
    for key, value in doc.items():
        if key not in _SWEEP_KEYS:
            raise MalformedInput(f"unknown sweep option {key!r}")
        fields[_SWEEP_KEYS[key]] = value
    for key in ("n_samples", "seed", "workers", "grid_samples", "torus_grid", "bidisc_grid"):
        if key in fields and (isinstance(fields[key], bool) or not isinstance(fields[key], int)):
            raise MalformedInput(f"sweep option {key!r} must be an integer")
    if args.seed is not None:
        fields["seed"] = args.seed
    if args.grid_given:
        fields["torus_grid"] = args.grid
    fields["tolerance_band"] = resolve_band(args.tol)
    try:
        cfg = SweepConfig(**fields)
    except ValueError as exc:
        raise MalformedInput(str(exc)) from exc
    report = equivalence_sweep(cfg)
    out = report.to_json()
    out["healthy"] = report.healthy
    return out, EXIT_OK if report.healthy else EXIT_BOUNDARY


COMMANDS = {
    "membership": cmd_membership,
    "feasibility": cmd_feasibility,
    "lempert": cmd_lempert,
    "interpolate": cmd_interpolate,
    "verify": cmd_verify,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# driver


_HELP = {
    "membership": "classify a point as interior, boundary or exterior",
    "feasibility": "evaluate every Schwarz condition for a problem",
    "lempert": "origin threshold for a target point",
    "interpolate": "construct and verify an analytic disc",
    "verify": "re-check a disc produced by 'interpolate'",
    "sweep": "run a randomized equivalence sweep",
}


class _Parser(argparse.ArgumentParser):
    """Argument errors are malformed input, not an 'exterior' verdict."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_MALFORMED, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="mu-domains", description=__doc__.splitlines()[0])
    common = _Parser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="boundary band (default 1e-9 or $MU_DOMAINS_TOL)")
    common.add_argument("--grid", type=int, default=None,
                        help="grid size: verification angles, or torus points for sweep")
    common.add_argument("--seed", type=int, default=None, help="random seed (sweep)")
    common.add_argument("--input", default=None, help="input JSON file, '-' for stdin")
    common.add_argument("--output", default="-", help="output file, '-' for stdout")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=_HELP[name])
    return parser


def _read_input(args):
    if args.input is None and args.command == "sweep" and sys.stdin.isatty():
        # a sweep needs no input document; flags alone configure it
        return {}
    if args.input in (None, "-"):
        text = sys.stdin.read()
    else:
        with open(args.input, encoding="utf-8") as fh:
            text = fh.read()
    if args.command == "sweep" and not text.strip():
        return {}
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise MalformedInput("input must be a JSON object")
    return doc


def _write_output(args, payload):
    text = json.dumps(payload, indent=2) + "\n"
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)


def run(argv: Optional[Sequence[str]] = None):
    """Parse arguments, run one subcommand and return ``(payload, exit_code)``."""
    args = build_parser().parse_args(argv)
    args.grid_given = args.grid is not None
    if args.grid is None:
        args.grid = 64
    try:
        if args.tol is not None and not args.tol >= 0:
            raise MalformedInput("--tol must be non-negative")
        if args.command != "sweep" and args.grid < 64:
            raise MalformedInput("--grid must be at least 64")
        resolve_band(args.tol)
        doc = _read_input(args)
        return COMMANDS[args.command](doc, args), args
    except ConstructionIncomplete as exc:
        payload = {"error": "construction-incomplete", "message": str(exc),
                   "diagnostics": _jsonable(exc.diagnostics)}
        return (payload, EXIT_INCOMPLETE), args
    except (InfeasibleProblem, OutsideDomain) as exc:
        return ({"error": type(exc).__name__, "message": str(exc)}, EXIT_OUTSIDE), args
    except (MalformedInput, MuDomainsError, ValueError, OSError) as exc:
        return ({"error": "malformed-input", "message": str(exc)}, EXIT_MALFORMED), args


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return encode_complex(obj)
    if isinstance(obj, float):
        return encode_real(obj)
    return obj


def main(argv: Optional[Sequence[str]] = None) -> int:
    (payload, code), args = run(argv)
    if "error" in payload:
        print(f"mu-domains {args.command}: {payload['message']}", file=sys.stderr)
    _write_output(args, payload)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

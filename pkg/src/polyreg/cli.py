"""Command-line front end.

Exit codes: 0 success, 2 invalid input (domain, query, override, config or
flags), 3 numerical failure (root finding, linear algebra, failed verification).
"""
from __future__ import annotations

import argparse
import json
import math
import re
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__
from .certificates import CertificateError, certify_domain, load_overrides
from .config import ConfigError, RunConfig, load_config
from .edge_pencil import (BcPair, MuBound, RootFindingError, SearchBox, find_roots, mu,
                          mu_over_samples)
from .exact import fraction_to_json, to_fraction
from .geometry import DomainError, DomainModel, _schema_check, load_domain, validate
from .report import AnalysisReport, FORMATS, complex_pair, number, render
from .windows import (THEOREMS, AssumptionFlags, BaseData, QueryError, RegularityQuery,
                      compatibility_requirements, evaluate, max_s_range)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

QUERY_ALIASES = {"weak": "weak_bounded", "lift": "lift_bounded"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# shared record builders ----------------------------------------------------

def mu_record(bound: MuBound) -> dict[str, Any]:
    value = bound.value
    value = fraction_to_json(value) if not isinstance(value, float) else number(value)
    return {"value": value, "kind": bound.kind, "source": bound.source, "detail": bound.detail}


def edge_mus(model: DomainModel, config: RunConfig) -> tuple[dict[str, MuBound], list[dict]]:
    settings = config.pencil_settings()
    mus, records = {}, []
    for e in model.edges:
        pair = BcPair(*model.bc_pair(e))
        if e.theta_samples:
            bound = mu_over_samples(pair, e.theta_samples, settings)
            theta_source = "samples"
        else:
            bound = mu(pair, e.theta, settings)
            theta_source = "supplied" if e.theta_supplied else "geometry"
        mus[e.id] = bound
        records.append({"id": e.id, "faces": [e.face_plus, e.face_minus], "pair": str(pair),
                        "theta": number(e.theta), "theta_source": theta_source,
                        "samples": len(e.theta_samples), "mu": mu_record(bound)})
    return mus, records


def certificate_record(cert) -> dict[str, Any] | None:
    if cert is None:
        return None
    out = cert.to_dict()
    out["text"] = cert.describe()
    return out


def _flags(args) -> AssumptionFlags:
    return AssumptionFlags(compat_iii=not args.no_compat_iii, condg_0_3=not args.no_condg,
                           g_edge_trace_zero=not args.no_g_trace_zero,
                           solvability_5_4_5_5=not args.no_solvability)


def _read_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read {path}: {exc}") from exc


def _queries(args, model: DomainModel) -> list[RegularityQuery]:
    out = []
    if args.queries:
        doc = _read_json(args.queries)
        _schema_check(doc, "query")
        for entry in doc if isinstance(doc, list) else [doc]:
            entry = {k: v for k, v in entry.items() if k != "id"}
            out.append(RegularityQuery.from_dict(entry))
    if args.query:
        if args.s is None:
            raise QueryError("--query needs --s")
        theorem = QUERY_ALIASES.get(args.query, args.query)
        level = args.l if args.l is not None else (1 if theorem in ("weak_bounded", "weak_cone")
                                                   else 2)
        base = None
        if args.sigma is not None:
            base = BaseData(to_fraction(args.sigma), to_fraction(args.base_beta),
                            to_fraction(args.base_delta), args.base_level)
        out.append(RegularityQuery(theorem, level, to_fraction(args.s), to_fraction(args.beta),
                                   to_fraction(args.delta), _flags(args), base, "cli"))
    return out


def _cert_argument(theorem: str, certs: dict, model: DomainModel):
    if theorem in ("strong_cone", "weak_cone", "lift_cone"):
        if len(model.vertices) != 1:
            raise QueryError(f"{theorem} applies to a cone: the domain must have exactly one vertex")
        return certs.get(model.vertices[0].id)
    return {v.id: certs.get(v.id) for v in model.vertices}


# subcommands ---------------------------------------------------------------

def cmd_analyze(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    model = load_domain(args.domain)
    overrides = load_overrides(_read_json(args.overrides)) if args.overrides else {}
    queries = _queries(args, model)
    report = AnalysisReport("analyze", config.to_dict())
    report.domain = {"name": model.name, "path": args.domain, "faces": len(model.faces),
                     "edges": len(model.edges), "vertices": len(model.vertices),
                     "attestations": list(model.attestations)}
    report.diagnostics = [{"level": d.level, "entity": d.entity, "message": d.message,
                           "citation": d.citation} for d in validate(model)]
    mus, report.edges = edge_mus(model, config)
    certs, missing = certify_domain(model, overrides)
    report.vertices = [{"id": v.id, "certificate": certificate_record(certs.get(v.id)),
                        **({"error": missing[v.id]} if v.id in missing else {})}
                       for v in model.vertices]
    for q in queries:
        report.verdicts.append(evaluate(q, mus, _cert_argument(q.theorem, certs, model)).to_dict())
    range_keys: list[tuple] = []
    if not queries:
        range_keys = [("weak_bounded", 1, 0, 0, _flags(args), None),
                      ("lift_bounded", 2, 0, 0, _flags(args), None)]
    for q in queries:
        key = (q.theorem, q.l, q.beta, q.delta, q.flags, q.base)
        # per-vertex or per-edge weights get verdicts only
        if not isinstance(q.beta, dict) and not isinstance(q.delta, dict) and key not in range_keys:
            range_keys.append(key)
    for theorem, level, beta, delta, flags, base in range_keys:
        srange = max_s_range(theorem, level, mus, _cert_argument(theorem, certs, model),
                             beta, delta, flags, base)
        report.s_ranges.append({**srange.to_dict(), "beta": fraction_to_json(to_fraction(beta)),
                                "delta": fraction_to_json(to_fraction(delta))})
    report.checklist = [c.to_dict() for c in compatibility_requirements(model)]
    return report, EXIT_OK


_ANGLE = re.compile(r"^\s*(?:(\d+(?:\.\d*)?)\s*\*?\s*)?pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$")


def parse_angle(text: str) -> float:
    """Radians from "4.71", "pi", "3pi/2", "3*pi/4" or "0.99pi"."""
    match = _ANGLE.match(text.lower())
    if match:
        factor = float(match.group(1) or 1.0)
        divisor = float(match.group(2) or 1.0)
        return factor * math.pi / divisor
    try:
        return float(text)
    except ValueError as exc:
        raise QueryError(f"cannot read angle {text!r}") from exc


def _thetas(values: Sequence[str]) -> list[float]:
    return [parse_angle(v) for v in values]


def _pair(text: str) -> BcPair:
    try:
        return BcPair.parse(text)
    except (ValueError, TypeError) as exc:
        raise QueryError(f"bad --pair {text!r}: {exc}") from exc


def cmd_mu(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    pair = _pair(args.pair)
    settings = config.pencil_settings()
    report = AnalysisReport("mu", config.to_dict())
    for theta in _thetas(args.theta):
        report.mu_table.append({"pair": str(pair), "theta": number(theta),
                                **mu_record(mu(pair, theta, settings))})
    return report, EXIT_OK


def cmd_roots(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    pair = _pair(args.pair)
    (theta,) = _thetas([args.theta])
    settings = config.pencil_settings()
    try:
        box = SearchBox.parse(args.box) if args.box else SearchBox(*settings.default_box)
    except (ValueError, TypeError) as exc:
        raise QueryError(f"bad --box {args.box!r}: {exc}") from exc
    spectrum = find_roots(pair, theta, box, settings=settings)
    report = AnalysisReport("roots", config.to_dict())

    def rec(r):
        return {"value": complex_pair(r.value), "multiplicity": r.multiplicity,
                "residual": float(f"{r.residual:.3e}")}
    report.results = {"pair": str(pair), "theta": number(theta),
                      "box": [number(x) for x in box.as_tuple()],
                      "zero_count": spectrum.count,
                      "roots": [rec(r) for r in spectrum.roots],
                      "excluded": [rec(r) for r in spectrum.excluded]}
    return report, EXIT_OK


def cmd_windows(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    from .scenarios import scenario_table
    report = AnalysisReport("windows", config.to_dict())
    for scenario, srange in scenario_table():
        report.s_ranges.append({**srange.to_dict(), "key": scenario.key, "label": scenario.title})
    return report, EXIT_OK


def cmd_verify(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    from .verification import GRID_ANGLES, GRID_PAIRS, equivalence_grid, membership_suite
    pairs = GRID_PAIRS[:1] if args.quick else GRID_PAIRS
    angles = GRID_ANGLES[:2] if args.quick else GRID_ANGLES
    cases = equivalence_grid(config.collocation_n, config.match_tol, pairs, angles)
    rows = membership_suite(config.membership_cases, config.seed, config.membership_margin)
    wrong = [c for c, expected, got in rows if expected != got]
    report = AnalysisReport("verify", config.to_dict())
    report.results = {
        "equivalence": [c.to_dict() for c in cases],
        "equivalence_ok": all(c.ok for c in cases),
        "membership": {"cases": len(rows), "misclassified": len(wrong),
                       "margin": config.membership_margin},
    }
    ok = report.results["equivalence_ok"] and not wrong
    return report, EXIT_OK if ok else EXIT_NUMERIC


def cmd_checklist(args, config: RunConfig) -> tuple[AnalysisReport, int]:
    model = load_domain(args.domain)
    report = AnalysisReport("checklist", config.to_dict())
    report.domain = {"name": model.name, "path": args.domain, "faces": len(model.faces),
                     "edges": len(model.edges), "vertices": len(model.vertices),
                     "attestations": list(model.attestations)}
    report.checklist = [c.to_dict() for c in compatibility_requirements(model)]
    return report, EXIT_OK


COMMANDS = {"analyze": cmd_analyze, "mu": cmd_mu, "roots": cmd_roots, "windows": cmd_windows,
            "verify": cmd_verify, "checklist": cmd_checklist}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="polyreg", description="Edge exponents, vertex strip certificates "
                                                 "and regularity windows for polyhedral domains.")
    parser.add_argument("--version", action="version", version=f"polyreg {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=FORMATS, default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--config", help="JSON config file (default: $POLYREG_CONFIG)")
    common.add_argument("--tol", type=float, help="root-finder tolerance")
    common.add_argument("--im-cap", type=float, help="largest |Im lambda| searched")
    common.add_argument("--re-cap", type=float, help="largest Re lambda searched for mu")
    common.add_argument("--literal", action="store_true", default=None,
                        help="use the unreduced characteristic functions")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", parents=[common], help="full analysis of a domain file")
    p.add_argument("domain")
    p.add_argument("--query", choices=sorted(QUERY_ALIASES) + list(THEOREMS))
    p.add_argument("--queries", help="JSON file with one or more queries")
    p.add_argument("--l", type=int)
    p.add_argument("--s", help="integrability exponent, e.g. 2.5 or 8/7")
    p.add_argument("--beta", default="0")
    p.add_argument("--delta", default="0")
    p.add_argument("--sigma", help="base exponent for lift_cone")
    p.add_argument("--base-beta", default="0")
    p.add_argument("--base-delta", default="0")
    p.add_argument("--base-level", type=int, default=1, choices=(1, 2))
    p.add_argument("--overrides", help="JSON file with user strip certificates")
    p.add_argument("--no-compat-iii", action="store_true", help="compatibility (iii) not attested")
    p.add_argument("--no-condg", action="store_true", help="weighted g condition not attested")
    p.add_argument("--no-g-trace-zero", action="store_true", help="g = 0 on edges not attested")
    p.add_argument("--no-solvability", action="store_true",
                   help="solvability preconditions not attested")

    p = sub.add_parser("mu", parents=[common], help="edge exponent for a boundary pair")
    p.add_argument("--pair", required=True, help="d+,d- e.g. 0,3")
    p.add_argument("--theta", required=True, nargs="+", help="angles in radians (pi allowed)")

    p = sub.add_parser("roots", parents=[common], help="characteristic roots in a box")
    p.add_argument("--pair", required=True)
    p.add_argument("--theta", required=True)
    p.add_argument("--box", help="re_lo,re_hi,im_lo,im_hi")

    sub.add_parser("windows", parents=[common], help="s-ranges of the built-in polyhedron families")

    p = sub.add_parser("verify", parents=[common], help="oracle equivalence and membership suites")
    p.add_argument("--quick", action="store_true", help="two angles of one pair only")

    p = sub.add_parser("checklist", parents=[common], help="compatibility conditions to attest")
    p.add_argument("domain")
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = load_config(args.config, {"tol": args.tol, "im_cap": args.im_cap,
                                           "re_cap": args.re_cap, "literal": args.literal})
        report, code = COMMANDS[args.command](args, config)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except (DomainError, CertificateError, QueryError, ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RootFindingError, np.linalg.LinAlgError, RuntimeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

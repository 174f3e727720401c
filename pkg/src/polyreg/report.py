"""Analysis reports: a JSON-ready container plus json and text renderers."""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any

from . import __version__

TOOL = "polyreg"
REPORT_FORMAT = 1
FORMATS = ("json", "text")


def number(x: float) -> float:
    """Float rounded to 12 significant digits so reports do not depend on kernel backend."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x} in report")
    return float(f"{x:.12g}")


def complex_pair(z: complex) -> list[float]:
    return [number(z.real), number(z.imag)]


@dataclass
class AnalysisReport:
    """Everything one CLI run produced, already reduced to JSON types."""

    command: str
    config: dict[str, Any] = field(default_factory=dict)
    tool: dict[str, Any] = field(default_factory=lambda: {
        "name": TOOL, "version": __version__, "report_format": REPORT_FORMAT})
    domain: dict[str, Any] | None = None
    diagnostics: list[dict[str, Any]] = field(default_factory=list)
    edges: list[dict[str, Any]] = field(default_factory=list)
    vertices: list[dict[str, Any]] = field(default_factory=list)
    verdicts: list[dict[str, Any]] = field(default_factory=list)
    s_ranges: list[dict[str, Any]] = field(default_factory=list)
    checklist: list[dict[str, Any]] = field(default_factory=list)
    mu_table: list[dict[str, Any]] = field(default_factory=list)
    results: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "AnalysisReport":
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown report fields: {sorted(unknown)}")
        return cls(**doc)

    @property
    def violated_constraints(self) -> list[dict[str, Any]]:
        return [c for v in self.verdicts for c in v["constraints"] if c["status"] != "satisfied"]


def render(report: AnalysisReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    if fmt == "text":
        return _render_text(report)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _table(header: list[str], rows: list[list[str]]) -> list[str]:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(header)]
    line = lambda cells: "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    return [line(header), line(["-" * w for w in widths])] + [line(r) for r in rows]


def _render_text(report: AnalysisReport) -> str:
    out = [f"{report.tool['name']} {report.tool['version']}: {report.command}"]
    if report.domain:
        d = report.domain
        out.append(f"domain: {d.get('name') or '(unnamed)'}  faces {d['faces']}  "
                   f"edges {d['edges']}  vertices {d['vertices']}")
    if report.diagnostics:
        out += ["", "diagnostics"]
        for diag in report.diagnostics:
            out.append(f"  {diag['level']}: {diag['entity']}: {diag['message']}")
            if diag.get("citation"):
                out.append(f"    cite: \"{diag['citation']}\"")
    if report.edges:
        out += ["", "edges"]
        rows = [[e["id"], e["pair"], f"{e['theta']:.10g}", _mu_text(e["mu"]), e["mu"]["source"]]
                for e in report.edges]
        out += ["  " + r for r in _table(["edge", "pair", "theta", "mu", "source"], rows)]
    if report.vertices:
        out += ["", "vertex certificates"]
        for v in report.vertices:
            cert = v.get("certificate")
            if cert is None:
                out.append(f"  {v['id']}: none ({v.get('error', '')})")
                continue
            out.append(f"  {v['id']}: {cert['text']} [{cert['rule_id']}]")
            if cert.get("citation"):
                out.append(f"    cite: \"{cert['citation']}\"")
            for note in cert.get("notes", []):
                out.append(f"    note: {note}")
    if report.mu_table:
        out += ["", "mu table"]
        rows = [[f"{r['theta']:.10g}", _mu_text(r), r["source"]] for r in report.mu_table]
        out += ["  " + r for r in _table(["theta", "mu", "source"], rows)]
    for verdict in report.verdicts:
        q = verdict["query"]
        state = "admissible" if verdict["admissible"] else "not admissible"
        out += ["", f"verdict {q['theorem']} ({q['id']}) l={q['l']} s={q['s']}: {state}"]
        for c in verdict["constraints"]:
            out.append(f"  [{c['status']}] {c['name']}: {c['detail']}")
            if c["status"] != "satisfied":
                out.append(f"    cite: \"{c['citation']}\"")
        for note in verdict.get("notes", []):
            out.append(f"  note: {note}")
    if report.s_ranges:
        out += ["", "admissible s"]
        for r in report.s_ranges:
            label = r.get("label") or f"{r['theorem']} ({r['id']}) l={r['l']}"
            out.append(f"  {label}: {r['text']}")
            for p in r["provenance"]:
                out.append(f"    {p['endpoint']}: {p['bound']}")
            for req in r["requirements"]:
                out.append(f"    requires {req['flag']} at {req['where']}")
            for note in r.get("notes", []):
                out.append(f"    note: {note}")
    if report.checklist:
        out += ["", "compatibility checklist (attest, not verified)"]
        for item in report.checklist:
            out.append(f"  {item['scope']} {item['entity']}: {item['name']} "
                       f"[{item['applies_when']}]")
            out.append(f"    cite: \"{item['citation']}\"")
    if report.results:
        out += ["", "results"]
        out += ["  " + line for line in json.dumps(report.results, sort_keys=True,
                                                     indent=2).splitlines()]
    return "\n".join(out) + "\n"


def _mu_text(mu: dict[str, Any]) -> str:
    prefix = "> " if mu["kind"] == "strict_lower_bound" else ""
    value = mu["value"]
    return prefix + (f"{value:.12g}" if isinstance(value, float) else str(value))

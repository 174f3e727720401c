"""Eigenvalue-free strip certificates for the vertex pencils.

A certificate asserts that no eigenvalue of a vertex pencil has real part in
an interval, apart from a finite list of known exceptional eigenvalues. Rules
below fire on boundary-condition and shape attestations; each carries the
published sentence it rests on verbatim as its citation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .exact import fraction_to_json, to_fraction
from .geometry import DomainModel

CITATIONS = {
    "R1": "no eigenvalues of the pencils ${\\mathfrak A}_j(\\lambda)$ in the strip "
          "$-1 \\le \\mbox{Re}\\, \\lambda \\le 0$",
    "R2": "even the strip $-2 < \\mbox{Re}\\, \\lambda < 1$",
    "R3": "contains only the eigenvalues $\\lambda=0$ and $\\lambda=1$",
    "R4": "the strip $-1\\le \\mbox{Re}\\, \\lambda\\le 0$ is free of eigenvalues",
    "R5": "$-1/2\\le \\mbox{Re}\\, \\lambda <1$ is free of eigenvalues",
}

NO_RULE = "no applicable rule - supply override"
WIDENS = "override widens certified strip"


class CertificateError(ValueError):
    pass


@dataclass(frozen=True)
class StripCertificate:
    re_lo: Fraction
    re_hi: Fraction
    lo_open: bool
    hi_open: bool
    exceptional_eigenvalues: tuple[Fraction, ...] = ()
    rule_id: str = "user"
    citation: str = ""
    vertex_id: str = ""
    notes: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        lo, hi = to_fraction(self.re_lo), to_fraction(self.re_hi)
        object.__setattr__(self, "re_lo", lo)
        object.__setattr__(self, "re_hi", hi)
        if not lo < hi:
            raise CertificateError(f"malformed bounds: re_lo={lo} must be below re_hi={hi}")
        exc = tuple(sorted({to_fraction(e) for e in self.exceptional_eigenvalues}))
        for e in exc:
            if not lo <= e <= hi:
                raise CertificateError(f"exceptional eigenvalue {e} lies outside [{lo}, {hi}]")
        object.__setattr__(self, "exceptional_eigenvalues", exc)

    def covers(self, x) -> bool:
        """x lies in the strip, respecting openness (exceptional values ignored)."""
        x = to_fraction(x)
        above = x > self.re_lo if self.lo_open else x >= self.re_lo
        below = x < self.re_hi if self.hi_open else x <= self.re_hi
        return above and below

    def describe(self) -> str:
        left = "(" if self.lo_open else "["
        right = ")" if self.hi_open else "]"
        text = f"{left}{self.re_lo}, {self.re_hi}{right}"
        if self.exceptional_eigenvalues:
            text += " minus {" + ", ".join(str(e) for e in self.exceptional_eigenvalues) + "}"
        return text

    def to_dict(self) -> dict[str, Any]:
        return {
            "vertex_id": self.vertex_id,
            "re_lo": fraction_to_json(self.re_lo),
            "re_hi": fraction_to_json(self.re_hi),
            "lo_open": self.lo_open,
            "hi_open": self.hi_open,
            "exceptional": [fraction_to_json(e) for e in self.exceptional_eigenvalues],
            "rule_id": self.rule_id,
            "citation": self.citation,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "StripCertificate":
        try:
            return cls(to_fraction(doc["re_lo"]), to_fraction(doc["re_hi"]),
                       bool(doc.get("lo_open", False)), bool(doc.get("hi_open", False)),
                       tuple(to_fraction(e) for e in doc.get("exceptional", [])),
                       doc.get("rule_id", "user"), doc.get("citation", ""),
                       doc.get("vertex_id", ""), tuple(doc.get("notes", [])))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, CertificateError):
                raise
            raise CertificateError(f"malformed certificate: {exc}") from exc


def line_free(cert: StripCertificate, re_value) -> bool:
    """True iff the line Re(lambda) = re_value is certified eigenvalue free."""
    x = to_fraction(re_value)
    return cert.covers(x) and x not in cert.exceptional_eigenvalues


@dataclass(frozen=True)
class StripCheck:
    status: str      # "free", "exceptional", "uncovered"
    detail: str


def check_closed_strip(cert: StripCertificate, lo, hi) -> StripCheck:
    """Is the closed strip lo <= Re <= hi free according to the certificate?"""
    lo, hi = to_fraction(lo), to_fraction(hi)
    if lo > hi:
        lo, hi = hi, lo
    hits = [e for e in cert.exceptional_eigenvalues if lo <= e <= hi]
    if hits:
        return StripCheck("exceptional", f"known eigenvalue(s) {', '.join(map(str, hits))} "
                                         f"in [{lo}, {hi}]")
    if not (cert.covers(lo) and cert.covers(hi)):
        return StripCheck("uncovered", f"[{lo}, {hi}] not inside certified {cert.describe()}")
    return StripCheck("free", f"[{lo}, {hi}] inside certified {cert.describe()}")


# vertex configurations ----------------------------------------------------

@dataclass(frozen=True)
class VertexConfig:
    vertex_id: str
    face_bcs: tuple[int, ...]
    edge_pairs: tuple[tuple[int, int], ...]
    edge_thetas: tuple[float, ...] = ()
    convex: bool = False
    lipschitz: bool = False
    dirichlet_adjacent_each_edge: bool = False
    cond_ii_face_special: bool = False

    @classmethod
    def build(cls, vertex_id: str, face_bcs: Sequence[int],
              edges: Sequence[tuple[tuple[int, int], float, Sequence[int]]] = (),
              convex: bool = False, lipschitz: bool = False) -> "VertexConfig":
        """Derive the attestation flags.

        ``edges`` holds (bc pair, theta, indices into face_bcs of its two faces).
        """
        pairs = tuple(tuple(sorted(p)) for p, _, _ in edges)
        thetas = tuple(float(t) for _, t, _ in edges)
        d_adj = bool(edges) and all(0 in p for p in pairs)
        special = False
        slip = [i for i, d in enumerate(face_bcs) if d == 1]
        if convex and len(slip) == 1 and all(d in (0, 1) for d in face_bcs):
            on_face = [t for _, t, idx in edges if slip[0] in idx]
            special = bool(on_face) and all(t < math.pi / 2 for t in on_face)
        return cls(vertex_id, tuple(int(d) for d in face_bcs), pairs, thetas, convex,
                   lipschitz or convex, d_adj, special)

    @property
    def flags(self) -> dict[str, bool]:
        return {"convex": self.convex, "lipschitz": self.lipschitz,
                "dirichlet_adjacent_each_edge": self.dirichlet_adjacent_each_edge,
                "cond_ii_face_special": self.cond_ii_face_special}


def vertex_config(model: DomainModel, vertex_id: str) -> VertexConfig:
    v = model.vertex(vertex_id)
    faces = list(v.incident_faces)
    edges = []
    for eid in v.incident_edges:
        e = model.edge(eid)
        # the largest sampled angle decides "theta < ..." conditions
        edges.append((model.bc_pair(e), max(e.angles),
                      (faces.index(e.face_plus), faces.index(e.face_minus))))
    atts = set(v.attestations) | set(model.attestations)
    return VertexConfig.build(vertex_id, [int(model.face(f).bc) for f in faces], edges,
                              convex="convex" in atts, lipschitz="lipschitz" in atts)


# rules --------------------------------------------------------------------

def _rule_cert(rule: str, lo, hi, lo_open, hi_open, exc=(), vertex_id="") -> StripCertificate:
    return StripCertificate(Fraction(lo), Fraction(hi), lo_open, hi_open,
                            tuple(Fraction(e) for e in exc), rule, CITATIONS[rule], vertex_id)


def matching_rules(cfg: VertexConfig) -> list[StripCertificate]:
    bcs = set(cfg.face_bcs)
    out = []
    if bcs == {0}:
        out.append(_rule_cert("R1", -1, 0, False, False, vertex_id=cfg.vertex_id))
        if cfg.convex:
            out.append(_rule_cert("R2", -2, 1, True, True, vertex_id=cfg.vertex_id))
    if bcs == {3} and cfg.lipschitz:
        out.append(_rule_cert("R3", -1, 1, False, False, (0, 1), cfg.vertex_id))
    if bcs and max(bcs) <= 2 and cfg.dirichlet_adjacent_each_edge:
        out.append(_rule_cert("R4", -1, 0, False, False, vertex_id=cfg.vertex_id))
    if cfg.cond_ii_face_special:
        out.append(_rule_cert("R5", Fraction(-1, 2), 1, False, True, vertex_id=cfg.vertex_id))
    return out


def _free_within(outer: StripCertificate, inner: StripCertificate) -> bool:
    """Every line certified free by ``inner`` is also certified free by ``outer``."""
    lo_ok = (inner.re_lo > outer.re_lo or (inner.re_lo == outer.re_lo
                                           and (inner.lo_open or not outer.lo_open)))
    hi_ok = (inner.re_hi < outer.re_hi or (inner.re_hi == outer.re_hi
                                           and (inner.hi_open or not outer.hi_open)))
    if not (lo_ok and hi_ok):
        return False
    return all(e in inner.exceptional_eigenvalues or not inner.covers(e)
               for e in outer.exceptional_eigenvalues)


def _union(a: StripCertificate, b: StripCertificate) -> StripCertificate | None:
    """Union of two overlapping certified strips, or None if they are disjoint."""
    if a.re_lo > b.re_lo or (a.re_lo == b.re_lo and a.lo_open and not b.lo_open):
        a, b = b, a
    # a starts first; the union is an interval iff b's left end is covered by a or touches it
    joined = a.covers(b.re_lo) or (b.re_lo == a.re_hi and not (a.hi_open and b.lo_open))
    if not joined:
        return None
    lo, lo_open = a.re_lo, a.lo_open
    if b.re_hi > a.re_hi or (b.re_hi == a.re_hi and a.hi_open and not b.hi_open):
        hi, hi_open = b.re_hi, b.hi_open
    else:
        hi, hi_open = a.re_hi, a.hi_open
    # an exceptional value survives unless the other certificate proves its line free
    exc = [e for e in a.exceptional_eigenvalues if not line_free(b, e)]
    exc += [e for e in b.exceptional_eigenvalues if not line_free(a, e)]
    ids = sorted({*a.rule_id.split("+"), *b.rule_id.split("+")})
    cites = [c for c in dict.fromkeys(a.citation.split(" | ") + b.citation.split(" | ")) if c]
    return StripCertificate(lo, hi, lo_open, hi_open, tuple(exc), "+".join(ids),
                            " | ".join(cites), a.vertex_id or b.vertex_id)


def combine(certs: Iterable[StripCertificate]) -> list[StripCertificate]:
    """Drop certificates implied by others and merge overlapping ones."""
    items = list(certs)
    changed = True
    while changed:
        changed = False
        for i, a in enumerate(items):
            for j, b in enumerate(items):
                if i == j:
                    continue
                if _free_within(a, b) or _free_within(b, a):
                    del items[j if _free_within(a, b) else i]
                    changed = True
                    break
                merged = _union(a, b)
                if merged is not None:
                    items = [c for k, c in enumerate(items) if k not in (i, j)] + [merged]
                    changed = True
                    break
            if changed:
                break
    return sorted(items, key=lambda c: (c.re_lo, c.re_hi, c.rule_id))


def certify(cfg: VertexConfig) -> StripCertificate:
    """Certificate from the rule table; raises CertificateError when no rule applies."""
    matched = combine(matching_rules(cfg))
    if not matched:
        raise CertificateError(f"vertex {cfg.vertex_id}: {NO_RULE}")
    if len(matched) > 1:
        # disjoint strips: keep the one containing the base line -1/2, else the widest
        base = [c for c in matched if c.covers(Fraction(-1, 2))]
        matched = base or sorted(matched, key=lambda c: c.re_hi - c.re_lo, reverse=True)
    return matched[0]


def override(cert: StripCertificate | None, user: StripCertificate) -> StripCertificate:
    """Adopt a user certificate; note when it claims more than the rule certified."""
    if not isinstance(user, StripCertificate):
        raise CertificateError("override must be a StripCertificate")
    notes = list(user.notes)
    if cert is not None and not _free_within(cert, user):
        notes.append(f"{WIDENS}: rule {cert.rule_id} gave {cert.describe()}, "
                     f"user gave {user.describe()}")
    return replace(user, rule_id="user", vertex_id=user.vertex_id or (cert.vertex_id if cert else ""),
                   notes=tuple(notes))


def certify_domain(model: DomainModel, overrides: dict[str, StripCertificate] | None = None,
                   ) -> tuple[dict[str, StripCertificate], dict[str, str]]:
    """Certificates per vertex plus an error message per uncertified vertex."""
    overrides = overrides or {}
    certs: dict[str, StripCertificate] = {}
    missing: dict[str, str] = {}
    for v in model.vertices:
        try:
            cert = certify(vertex_config(model, v.id))
        except CertificateError as exc:
            cert = None
            if v.id not in overrides:
                missing[v.id] = str(exc)
        if v.id in overrides:
            cert = override(cert, replace(overrides[v.id], vertex_id=v.id))
        if cert is not None:
            certs[v.id] = cert
    return certs, missing


def load_overrides(doc: Any) -> dict[str, StripCertificate]:
    """Override documents: one object or a list of {vertex_id, re_lo, re_hi, ...}."""
    from .geometry import _schema_check
    _schema_check(doc, "override")
    entries = doc if isinstance(doc, list) else [doc]
    out = {}
    for entry in entries:
        cert = StripCertificate.from_dict({**entry, "rule_id": "user"})
        out[entry["vertex_id"]] = cert
    return out

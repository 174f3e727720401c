"""Solvability and regularity windows: evaluation and exact inversion in s.

Every condition is linear in t = 1/s, so admissible sets are finite unions of
intervals with rational endpoints. ``check_*`` evaluate a single query
directly; ``max_s_range`` builds the same conditions as interval sets in t and
maps the result back to s.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .certificates import StripCertificate, check_closed_strip
from .edge_pencil import MuBound
from .exact import fraction_text, fraction_to_json, to_fraction

THEOREMS = ("strong_cone", "weak_cone", "lift_cone", "weak_bounded", "lift_bounded")
# stable ids of the underlying results (numbering kept in the docs table)
THEOREM_IDS = {"strong_cone": "ft1", "weak_cone": "gt1", "lift_cone": "ht3",
               "weak_bounded": "it2", "lift_bounded": "it3"}
WEAK = ("weak_cone", "weak_bounded")
BOUNDED = ("weak_bounded", "lift_bounded")

CITE = {
    "window_1": "$\\max(0,1-\\mu_k)<\\delta_k+2/s < 1$",
    "window_2": "$\\max(2-\\mu_k,0) < \\delta_k +2/s <2$",
    "window_l": "$\\max(l-\\mu_k,0)<\\delta_k+2/s<l$",
    "special_s2": "also valid if $s=2$, $\\delta=0$",
    "special_weighted": "can be replaced by $-\\min(\\mu_k,1) <\\delta_k\\le 0$",
    "line": "no eigenvalues of the pencil ${\\mathfrak A}(\\lambda)$ on the line",
    "weak_line": "The line $\\mbox{Re}\\, \\lambda = 1-\\beta-3/s$ does not contain eigenvalues",
    "weak_strip": "strip between the lines $\\mbox{\\em Re}\\lambda = -1/2$ and "
                  "$\\mbox{\\em Re}\\lambda = 1-\\beta-3/s$",
    "lift_strip": "no eigenvalues of the pencil ${\\mathfrak A}(\\lambda)$ in the closed strip "
                  "between the lines",
    "lift_bounded_strip": "between the lines $\\mbox{\\em Re}\\, \\lambda= -1/2$ and "
                          "$\\mbox{\\em Re}\\, \\lambda =l-\\beta-3/s$",
    "compat": "and $g,h_j,\\phi_j$ satisfy condition {\\em (iii)} of Section {\\em 3.6}",
    "solvability": "F(v) = 0 \\quad\\mbox{for all } v\\in L_V",
    "g_flags": "provided $g$ satisfies (\\ref{condg}) if $s=2$ and $g=0$ on $M_k$",
}

SATISFIED = "satisfied"
VIOLATED = "violated"
INSUFFICIENT = "insufficient_certificate"
STATUSES = (SATISFIED, VIOLATED, INSUFFICIENT)

HALF = Fraction(1, 2)


class QueryError(ValueError):
    pass


# queries and verdicts -----------------------------------------------------

@dataclass(frozen=True)
class AssumptionFlags:
    compat_iii: bool = True
    condg_0_3: bool = True
    g_edge_trace_zero: bool = True
    solvability_5_4_5_5: bool = True

    def as_dict(self) -> dict[str, bool]:
        return {"compat_iii": self.compat_iii, "condg_0_3": self.condg_0_3,
                "g_edge_trace_zero": self.g_edge_trace_zero,
                "solvability_5_4_5_5": self.solvability_5_4_5_5}


@dataclass(frozen=True)
class BaseData:
    """Known regularity of the solution a lift starts from (cone lifts and transfers)."""

    sigma: Fraction
    beta: Fraction = Fraction(0)
    delta: Fraction | Mapping[str, Fraction] = Fraction(0)
    level: int = 1

    def __post_init__(self):
        object.__setattr__(self, "sigma", to_fraction(self.sigma))
        object.__setattr__(self, "beta", to_fraction(self.beta))
        if self.sigma <= 1:
            raise QueryError("sigma must exceed 1")
        if self.level not in (1, 2):
            raise QueryError("base level must be 1 (weak solution) or 2 (strong solution)")


@dataclass(frozen=True)
class RegularityQuery:
    theorem: str
    l: int
    s: Fraction
    beta: Fraction | Mapping[str, Fraction] = Fraction(0)
    delta: Fraction | Mapping[str, Fraction] = Fraction(0)
    flags: AssumptionFlags = AssumptionFlags()
    base: BaseData | None = None
    query_id: str = ""

    def __post_init__(self):
        if self.theorem not in THEOREMS:
            raise QueryError(f"unknown theorem {self.theorem!r}; expected one of {THEOREMS}")
        object.__setattr__(self, "s", to_fraction(self.s))
        if not self.s > 1:
            raise QueryError("s must exceed 1")
        if int(self.l) != self.l or self.l < 1:
            raise QueryError("l must be an integer >= 1")
        if self.theorem in WEAK and self.l != 1:
            raise QueryError("weak theorems need l = 1")
        if self.theorem == "strong_cone" and self.l != 2:
            raise QueryError("strong_cone is the l = 2 result")
        if self.theorem in ("lift_cone", "lift_bounded") and self.l < 2:
            raise QueryError("lift theorems need l >= 2")
        if self.theorem == "lift_cone" and self.base is None:
            raise QueryError("lift_cone needs base data (sigma, beta', delta')")

    def beta_at(self, vertex: str) -> Fraction:
        return _pick(self.beta, vertex, "beta")

    def delta_at(self, edge: str) -> Fraction:
        return _pick(self.delta, edge, "delta")

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"theorem": self.theorem, "id": THEOREM_IDS[self.theorem],
                               "l": self.l, "s": fraction_to_json(self.s),
                               "beta": _jsonify(self.beta), "delta": _jsonify(self.delta),
                               "flags": self.flags.as_dict(), "query_id": self.query_id}
        if self.base is not None:
            out["base"] = {"sigma": fraction_to_json(self.base.sigma),
                           "beta": fraction_to_json(self.base.beta),
                           "delta": _jsonify(self.base.delta), "level": self.base.level}
        return out

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "RegularityQuery":
        base = doc.get("base")
        return cls(doc["theorem"], int(doc.get("l", 1)), to_fraction(doc["s"]),
                   _unjsonify(doc.get("beta", 0)), _unjsonify(doc.get("delta", 0)),
                   AssumptionFlags(**doc.get("flags", {})),
                   None if base is None else BaseData(to_fraction(base["sigma"]),
                                                      to_fraction(base.get("beta", 0)),
                                                      _unjsonify(base.get("delta", 0)),
                                                      int(base.get("level", 1))),
                   doc.get("query_id", ""))


def _pick(value, key: str, what: str) -> Fraction:
    if isinstance(value, Mapping):
        if key not in value:
            raise QueryError(f"no {what} given for {key!r}")
        return to_fraction(value[key])
    return to_fraction(value)


def _jsonify(value):
    if isinstance(value, Mapping):
        return {k: fraction_to_json(to_fraction(v)) for k, v in sorted(value.items())}
    return fraction_to_json(to_fraction(value))


def _unjsonify(value):
    if isinstance(value, Mapping):
        return {k: to_fraction(v) for k, v in value.items()}
    return to_fraction(value)


@dataclass(frozen=True)
class Constraint:
    name: str
    status: str
    detail: str
    citation: str

    def to_dict(self) -> dict[str, str]:
        return {"name": self.name, "status": self.status, "detail": self.detail,
                "citation": self.citation}


@dataclass(frozen=True)
class Verdict:
    query: RegularityQuery
    constraints: tuple[Constraint, ...]
    notes: tuple[str, ...] = ()

    @property
    def admissible(self) -> bool:
        return all(c.status == SATISFIED for c in self.constraints)

    @property
    def failed(self) -> tuple[Constraint, ...]:
        return tuple(c for c in self.constraints if c.status != SATISFIED)

    def to_dict(self) -> dict[str, Any]:
        return {"query": self.query.to_dict(), "admissible": self.admissible,
                "constraints": [c.to_dict() for c in self.constraints],
                "notes": list(self.notes)}


# edge windows -------------------------------------------------------------

def _mu_fraction(mu: MuBound) -> Fraction:
    return to_fraction(mu.value)


@dataclass(frozen=True)
class EdgeWindow:
    """Admissible values of delta_k + 2/s at one edge."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool

    def contains(self, x) -> bool:
        x = to_fraction(x)
        above = x >= self.lo if self.lo_closed else x > self.lo
        return above and x < self.hi and x > 0

    def describe(self) -> str:
        return f"{'[' if self.lo_closed else '('}{self.lo}, {self.hi})"


def edge_window(l: int, s, mu: MuBound) -> EdgeWindow:
    """Window max(l - mu, 0) < delta + 2/s < l.

    A strict lower bound mu > m makes the left end l - m attainable: at
    delta + 2/s = l - m the true condition l - mu < delta + 2/s still holds.
    """
    m = _mu_fraction(mu)
    lo = max(Fraction(l) - m, Fraction(0))
    closed = mu.strict and Fraction(l) - m > 0
    return EdgeWindow(lo, Fraction(l), closed)


def _window_cite(level: int) -> str:
    return CITE["window_1"] if level == 1 else CITE["window_2"] if level == 2 else CITE["window_l"]


def _special_ok(delta: Fraction, mu: MuBound) -> bool:
    """s = 2 weighted variant: -min(mu, 1) < delta <= 0."""
    m = _mu_fraction(mu)
    if delta > 0:
        return False
    if mu.strict and m < 1:
        return delta >= -m
    return delta > -min(m, Fraction(1))


def _edge_constraints(level: int, t: Fraction, mus: Mapping[str, MuBound],
                      delta_of, weak: bool, tag: str = "") -> list[Constraint]:
    out = []
    cite = _window_cite(level)
    for eid in sorted(mus):
        mu = mus[eid]
        delta = delta_of(eid)
        x = delta + 2 * t
        win = edge_window(level, 1 / t, mu)
        if weak and t == HALF and _special_ok(delta, mu) and not win.contains(x):
            out.append(Constraint(f"(ii) s = 2 special case{tag}, edge {eid}", SATISFIED,
                                  f"s = 2 and delta = {delta} within (-min(mu,1), 0]",
                                  CITE["special_s2"] if delta == 0 else CITE["special_weighted"]))
            continue
        lower_ok = (x >= win.lo if win.lo_closed else x > win.lo) and x > 0
        out.append(Constraint(
            f"(ii) lower bound{tag}, edge {eid}", SATISFIED if lower_ok else VIOLATED,
            f"delta+2/s = {x} vs window {win.describe()} (mu {mu.kind} {mu.value})", cite))
        out.append(Constraint(
            f"(ii) upper bound{tag}, edge {eid}", SATISFIED if x < win.hi else VIOLATED,
            f"delta+2/s = {x} must be < {level}", cite))
    return out


def _line_constraint(name: str, cert: StripCertificate | None, line: Fraction,
                     cite: str) -> Constraint:
    if cert is None:
        return Constraint(name, INSUFFICIENT, "no certificate for this vertex", cite)
    if line in cert.exceptional_eigenvalues:
        return Constraint(name, VIOLATED, f"Re lambda = {line} carries a known eigenvalue"
                          f"{_cert_source(cert)}", cite)
    if not cert.covers(line):
        return Constraint(name, INSUFFICIENT,
                          f"Re lambda = {line} outside certified {cert.describe()}", cite)
    return Constraint(name, SATISFIED, f"Re lambda = {line} inside certified {cert.describe()}",
                      cite)


def _cert_source(cert: StripCertificate) -> str:
    return f"; certificate {cert.rule_id}: {cert.citation}" if cert.citation else ""


def _strip_constraint(name: str, cert: StripCertificate | None, a: Fraction, b: Fraction,
                      cite: str) -> Constraint:
    if cert is None:
        return Constraint(name, INSUFFICIENT, "no certificate for this vertex", cite)
    chk = check_closed_strip(cert, a, b)
    status = {"free": SATISFIED, "exceptional": VIOLATED, "uncovered": INSUFFICIENT}[chk.status]
    detail = chk.detail
    if chk.status == "exceptional":
        detail += f" (eigenvalue lines crossed){_cert_source(cert)}"
    return Constraint(name, status, detail, cite)


def _flag_constraints(query: RegularityQuery, t: Fraction, mus: Mapping[str, MuBound],
                      ) -> list[Constraint]:
    f = query.flags
    out = [Constraint("(iii) compatibility conditions", SATISFIED if f.compat_iii else VIOLATED,
                      "attested" if f.compat_iii else "compatibility not attested", CITE["compat"])]
    if query.theorem in BOUNDED:
        out.append(Constraint("solvability preconditions",
                              SATISFIED if f.solvability_5_4_5_5 else VIOLATED,
                              "attested" if f.solvability_5_4_5_5 else "not attested",
                              CITE["solvability"]))
    if query.l >= 2:
        level = Fraction(query.l - 1)
        xs = [query.delta_at(e) + 2 * t for e in sorted(mus)]
        if any(x == level for x in xs):
            out.append(Constraint("g weighted integrability",
                                  SATISFIED if f.condg_0_3 else VIOLATED,
                                  "required where delta+2/s = l-1", CITE["g_flags"]))
        if any(x < level for x in xs):
            out.append(Constraint("g vanishes on edges",
                                  SATISFIED if f.g_edge_trace_zero else VIOLATED,
                                  "required where delta+2/s < l-1", CITE["g_flags"]))
    return out


def _require_mus(mus: Mapping[str, MuBound]) -> None:
    if not mus:
        raise QueryError("no edge exponents supplied")
    for eid, mu in mus.items():
        if mu is None:
            raise QueryError(f"missing mu for edge {eid!r}")


def _single_cert(certs) -> StripCertificate | None:
    if certs is None or isinstance(certs, StripCertificate):
        return certs
    vals = list(certs.values())
    if len(vals) != 1:
        raise QueryError("cone theorems take exactly one vertex certificate")
    return vals[0]


def _base_constraints(query: RegularityQuery, mus) -> list[Constraint]:
    base = query.base
    assert base is not None
    tb = 1 / base.sigma
    out = _edge_constraints(base.level, tb, mus, lambda e: _pick(base.delta, e, "base delta"),
                            weak=base.level == 1, tag=" (base)")
    return out


def check_strong_cone(query: RegularityQuery, mus: Mapping[str, MuBound],
                      cone_cert) -> Verdict:
    _require_mus(mus)
    cert = _single_cert(cone_cert)
    t = 1 / query.s
    beta = query.beta_at("")
    line = 2 - beta - 3 * t
    cons = [_line_constraint(f"(i) line Re lambda = 2-beta-3/s = {line}", cert, line, CITE["line"])]
    cons += _edge_constraints(2, t, mus, query.delta_at, weak=False)
    cons += _flag_constraints(query, t, mus)
    return Verdict(query, tuple(cons))


def check_weak(query: RegularityQuery, mus: Mapping[str, MuBound], certs) -> Verdict:
    _require_mus(mus)
    t = 1 / query.s
    cons: list[Constraint] = []
    notes = []
    if query.theorem == "weak_cone":
        cert = _single_cert(certs)
        line = 1 - query.beta_at("") - 3 * t
        cons.append(_line_constraint(f"(i) line Re lambda = 1-beta-3/s = {line}", cert, line,
                                     CITE["weak_line"]))
    else:
        if not certs:
            raise QueryError("weak_bounded needs one certificate per vertex")
        for vid in sorted(certs):
            b = 1 - query.beta_at(vid) - 3 * t
            cons.append(_strip_constraint(f"vertex {vid}: closed strip [-1/2, 1-beta-3/s = {b}]",
                                          certs[vid], Fraction(-1, 2), b, CITE["weak_strip"]))
    cons += _edge_constraints(1, t, mus, query.delta_at, weak=True)
    cons += _flag_constraints(query, t, mus)
    if t == HALF:
        notes.append("endpoint-ambiguous: s = 2 rests on the delta = 0 special case; "
                     "the general window excludes s = 2")
    return Verdict(query, tuple(cons), tuple(notes))


def check_lift(query: RegularityQuery, mus: Mapping[str, MuBound], certs) -> Verdict:
    _require_mus(mus)
    t = 1 / query.s
    cons: list[Constraint] = []
    if query.theorem == "lift_cone":
        base = query.base
        cert = _single_cert(certs)
        a = base.level - base.beta - 3 / base.sigma
        b = query.l - query.beta_at("") - 3 * t
        cons.append(_strip_constraint(f"closed strip between {a} and {b}", cert, a, b,
                                      CITE["lift_strip"]))
        cons += _base_constraints(query, mus)
    else:
        if not certs:
            raise QueryError("lift_bounded needs one certificate per vertex")
        for vid in sorted(certs):
            b = query.l - query.beta_at(vid) - 3 * t
            cons.append(_strip_constraint(f"vertex {vid}: closed strip [-1/2, l-beta-3/s = {b}]",
                                          certs[vid], Fraction(-1, 2), b,
                                          CITE["lift_bounded_strip"]))
    cons += _edge_constraints(query.l, t, mus, query.delta_at, weak=False)
    cons += _flag_constraints(query, t, mus)
    return Verdict(query, tuple(cons))


def evaluate(query: RegularityQuery, mus: Mapping[str, MuBound], certs) -> Verdict:
    if query.theorem == "strong_cone":
        return check_strong_cone(query, mus, certs)
    if query.theorem in WEAK:
        return check_weak(query, mus, certs)
    return check_lift(query, mus, certs)


# interval sets in t = 1/s -------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: Fraction | None          # None means -infinity
    hi: Fraction | None          # None means +infinity
    lo_closed: bool = False
    hi_closed: bool = False

    def is_empty(self) -> bool:
        if self.lo is None or self.hi is None:
            return False
        return self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed))

    def contains(self, x: Fraction) -> bool:
        if self.lo is not None and (x < self.lo or (x == self.lo and not self.lo_closed)):
            return False
        if self.hi is not None and (x > self.hi or (x == self.hi and not self.hi_closed)):
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval":
        lo, lo_c = _max_lo((self.lo, self.lo_closed), (other.lo, other.lo_closed))
        hi, hi_c = _min_hi((self.hi, self.hi_closed), (other.hi, other.hi_closed))
        return Interval(lo, hi, lo_c, hi_c)

    @property
    def is_point(self) -> bool:
        return self.lo is not None and self.lo == self.hi


def _max_lo(a, b):
    if a[0] is None:
        return b
    if b[0] is None:
        return a
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return a[0], a[1] and b[1]


def _min_hi(a, b):
    if a[0] is None:
        return b
    if b[0] is None:
        return a
    if a[0] != b[0]:
        return a if a[0] < b[0] else b
    return a[0], a[1] and b[1]


@dataclass(frozen=True)
class IntervalSet:
    parts: tuple[Interval, ...] = ()

    @staticmethod
    def of(*parts: Interval) -> "IntervalSet":
        return IntervalSet(()).union(IntervalSet(tuple(p for p in parts if not p.is_empty())))

    @staticmethod
    def everything() -> "IntervalSet":
        return IntervalSet((Interval(None, None),))

    def is_empty(self) -> bool:
        return not self.parts

    def contains(self, x) -> bool:
        x = to_fraction(x)
        return any(p.contains(x) for p in self.parts)

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        out = [a.intersect(b) for a in self.parts for b in other.parts]
        return IntervalSet.of(*out)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        items = sorted((p for p in self.parts + other.parts if not p.is_empty()),
                       key=lambda p: (float("-inf") if p.lo is None else p.lo, not p.lo_closed))
        merged: list[Interval] = []
        for p in items:
            if merged and _touch(merged[-1], p):
                q = merged[-1]
                hi, hi_c = _max_hi((q.hi, q.hi_closed), (p.hi, p.hi_closed))
                merged[-1] = Interval(q.lo, hi, q.lo_closed, hi_c)
            else:
                merged.append(p)
        return IntervalSet(tuple(merged))

    def minus_point(self, x: Fraction) -> "IntervalSet":
        return self.intersect(IntervalSet.of(Interval(None, x, False, False),
                                             Interval(x, None, False, False)))


def _max_hi(a, b):
    if a[0] is None or b[0] is None:
        return None, False
    if a[0] != b[0]:
        return a if a[0] > b[0] else b
    return a[0], a[1] or b[1]


def _touch(a: Interval, b: Interval) -> bool:
    """b starts inside a or exactly where a ends with at least one side closed."""
    if a.hi is None:
        return True
    if b.lo is None or b.lo < a.hi:
        return True
    return b.lo == a.hi and (a.hi_closed or b.lo_closed)


def _above(v: Fraction, closed: bool) -> IntervalSet:
    return IntervalSet.of(Interval(v, None, closed, False))


def _below(v: Fraction, closed: bool) -> IntervalSet:
    return IntervalSet.of(Interval(None, v, False, closed))


def _point(v: Fraction) -> IntervalSet:
    return IntervalSet.of(Interval(v, v, True, True))


# s ranges -----------------------------------------------------------------

@dataclass(frozen=True)
class SInterval:
    lo: Fraction
    hi: Fraction | None          # None means +infinity
    lo_closed: bool
    hi_closed: bool

    def contains(self, s) -> bool:
        s = to_fraction(s)
        above = s >= self.lo if self.lo_closed else s > self.lo
        if self.hi is None:
            return above
        below = s <= self.hi if self.hi_closed else s < self.hi
        return above and below

    def describe(self) -> str:
        if self.hi is not None and self.lo == self.hi:
            return "{" + fraction_text(self.lo) + "}"
        right = "inf)" if self.hi is None else fraction_text(self.hi) + ("]" if self.hi_closed else ")")
        return f"{'[' if self.lo_closed else '('}{fraction_text(self.lo)}, {right}"

    def to_dict(self) -> dict[str, Any]:
        return {"lo": fraction_to_json(self.lo), "hi": fraction_to_json(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed,
                "text": self.describe()}


def _t_to_s(part: Interval) -> SInterval:
    # t ranges inside (0, 1); s = 1/t reverses order and swaps closure flags
    lo_t, hi_t = part.lo, part.hi
    assert lo_t is not None and hi_t is not None
    s_lo = 1 / hi_t
    s_hi = None if lo_t == 0 else 1 / lo_t
    return SInterval(s_lo, s_hi, part.hi_closed, part.lo_closed if lo_t != 0 else False)


@dataclass(frozen=True)
class Bound:
    """One condition of the inversion with the t-set it allows."""

    name: str
    citation: str
    allowed: IntervalSet


@dataclass(frozen=True)
class SRange:
    theorem: str
    l: int
    intervals: tuple[SInterval, ...]
    special_points: tuple[Fraction, ...] = ()
    provenance: tuple[tuple[str, str], ...] = ()     # (endpoint text, bound name)
    requirements: tuple[tuple[str, str], ...] = ()   # (flag, where)
    notes: tuple[str, ...] = ()

    @property
    def empty(self) -> bool:
        return not self.intervals and not self.special_points

    def contains(self, s) -> bool:
        s = to_fraction(s)
        return s in self.special_points or any(i.contains(s) for i in self.intervals)

    @property
    def main(self) -> SInterval | None:
        """The single main interval, or None when the range is empty or split."""
        return self.intervals[0] if len(self.intervals) == 1 else None

    def describe(self) -> str:
        if self.empty:
            return "empty"
        points = "{" + ", ".join(fraction_text(p) for p in self.special_points) + "}"
        if not self.intervals:
            return f"s in {points} only"
        text = " u ".join(i.describe() for i in self.intervals)
        if self.special_points:
            text += f" plus s in {points}"
        return text

    def to_dict(self) -> dict[str, Any]:
        return {"theorem": self.theorem, "id": THEOREM_IDS[self.theorem], "l": self.l,
                "intervals": [i.to_dict() for i in self.intervals],
                "special_points": [fraction_to_json(p) for p in self.special_points],
                "text": self.describe(),
                "provenance": [{"endpoint": e, "bound": b} for e, b in self.provenance],
                "requirements": [{"flag": f, "where": w} for f, w in self.requirements],
                "notes": list(self.notes)}


def _edge_bounds(level: int, mus: Mapping[str, MuBound], delta_of, weak: bool,
                 ) -> tuple[list[Bound], list[Bound]]:
    """Main window bounds and the s = 2 special-case additions, per edge."""
    main, special = [], []
    cite = _window_cite(level)
    for eid in sorted(mus):
        mu, delta = mus[eid], delta_of(eid)
        win = edge_window(level, 2, mu)
        # lo < delta + 2t  <=>  t > (lo - delta)/2 ; also delta + 2t > 0
        allowed = _above((win.lo - delta) / 2, win.lo_closed)
        allowed = allowed.intersect(_above(-delta / 2, False))
        allowed = allowed.intersect(_below((win.hi - delta) / 2, False))
        main.append(Bound(f"edge {eid} window", cite, allowed))
        if weak and _special_ok(delta, mu):
            special.append(Bound(f"edge {eid} s = 2 case", CITE["special_s2"], _point(HALF)))
    return main, special


def _line_bound(name: str, cert: StripCertificate, c: Fraction, cite: str) -> Bound:
    """Line c - 3t certified free."""
    allowed = _above((c - cert.re_hi) / 3, not cert.hi_open)
    allowed = allowed.intersect(_below((c - cert.re_lo) / 3, not cert.lo_open))
    for e in cert.exceptional_eigenvalues:
        allowed = allowed.minus_point((c - e) / 3)
    return Bound(name, cite, allowed)


def _strip_bound(name: str, cert: StripCertificate, a: Fraction, c: Fraction, cite: str) -> Bound:
    """Closed strip between a and c - 3t certified free."""
    if not cert.covers(a) or a in cert.exceptional_eigenvalues:
        return Bound(name, cite, IntervalSet())
    allowed = _line_bound(name, cert, c, cite).allowed
    for e in cert.exceptional_eigenvalues:
        # a < e needs the moving line below e, a > e needs it above e
        allowed = allowed.intersect(_above((c - e) / 3, False) if e > a
                                    else _below((c - e) / 3, False))
    return Bound(name, cite, allowed)


def _all_true(flags: AssumptionFlags) -> bool:
    return all(flags.as_dict().values())


def max_s_range(theorem: str, l: int, mus: Mapping[str, MuBound], certs,
                beta=0, delta=0, flags: AssumptionFlags = AssumptionFlags(),
                base: BaseData | None = None) -> SRange:
    """All s > 1 for which the theorem's hypotheses hold, as exact rational intervals."""
    if theorem not in THEOREMS:
        raise QueryError(f"unknown theorem {theorem!r}")
    _require_mus(mus)
    # validate shapes once through a representative query
    proto = RegularityQuery(theorem, l, Fraction(2), beta, delta, flags, base)
    weak = theorem in WEAK
    domain = IntervalSet.of(Interval(Fraction(0), Fraction(1), False, False))
    bounds: list[Bound] = [Bound("s > 1", "", domain)]
    main_edges, special_edges = _edge_bounds(l, mus, proto.delta_at, weak)

    corner: list[Bound] = []
    if theorem in ("strong_cone", "weak_cone"):
        cert = _single_cert(certs)
        level = 2 if theorem == "strong_cone" else 1
        c = level - proto.beta_at("")
        cite = CITE["line"] if theorem == "strong_cone" else CITE["weak_line"]
        corner.append(_line_bound("corner line", cert, c, cite) if cert is not None
                      else Bound("corner line (no certificate)", cite, IntervalSet()))
    elif theorem == "lift_cone":
        cert = _single_cert(certs)
        a = base.level - base.beta - 3 / base.sigma
        c = l - proto.beta_at("")
        corner.append(_strip_bound("corner strip", cert, a, c, CITE["lift_strip"])
                      if cert is not None else Bound("corner strip (no certificate)",
                                                     CITE["lift_strip"], IntervalSet()))
    else:
        level = 1 if theorem == "weak_bounded" else l
        cite = CITE["weak_strip"] if theorem == "weak_bounded" else CITE["lift_bounded_strip"]
        for vid in sorted(certs):
            c = level - proto.beta_at(vid)
            if certs[vid] is None:
                corner.append(Bound(f"vertex {vid} strip (no certificate)", cite, IntervalSet()))
            else:
                corner.append(_strip_bound(f"vertex {vid} strip", certs[vid], Fraction(-1, 2),
                                           c, cite))

    gates: list[Bound] = []
    if not flags.compat_iii:
        gates.append(Bound("(iii) not attested", CITE["compat"], IntervalSet()))
    if theorem in BOUNDED and not flags.solvability_5_4_5_5:
        gates.append(Bound("solvability not attested", CITE["solvability"], IntervalSet()))
    if theorem == "lift_cone":
        tb = 1 / base.sigma
        for c_ in _edge_constraints(base.level, tb, mus,
                                    lambda e: _pick(base.delta, e, "base delta"),
                                    weak=base.level == 1, tag=" (base)"):
            if c_.status != SATISFIED:
                gates.append(Bound(c_.name, c_.citation, IntervalSet()))
    requirements = []
    if l >= 2:
        for eid in sorted(mus):
            edge_t = (Fraction(l - 1) - proto.delta_at(eid)) / 2
            if not flags.condg_0_3:
                gates.append(Bound(f"condg not attested (edge {eid})", CITE["g_flags"],
                                   IntervalSet.everything().minus_point(edge_t)))
            if not flags.g_edge_trace_zero:
                gates.append(Bound(f"g trace not attested (edge {eid})", CITE["g_flags"],
                                   _above(edge_t, True)))

    common = domain
    for b in corner + gates:
        common = common.intersect(b.allowed)
    main = common
    full = common
    special_by_edge = {b.name.split(" s = 2")[0]: b for b in special_edges}
    for b in main_edges:
        main = main.intersect(b.allowed)
        extra = special_by_edge.get(b.name.split(" window")[0])
        full = full.intersect(b.allowed if extra is None else b.allowed.union(extra.allowed))

    intervals = tuple(_t_to_s(p) for p in reversed(main.parts))
    special = (Fraction(2),) if full.contains(HALF) and not main.contains(HALF) else ()

    provenance = _provenance(intervals, bounds + corner + gates + main_edges)
    if l >= 2:
        for eid in sorted(mus):
            edge_t = (Fraction(l - 1) - proto.delta_at(eid)) / 2
            if main.contains(edge_t):
                requirements.append(("condg_0_3", f"s = {fraction_text(1 / edge_t)}"
                                     if edge_t > 0 else "never"))
            below = main.intersect(_below(edge_t, False))
            if not below.is_empty():
                requirements.append(("g_edge_trace_zero",
                                     f"s > {fraction_text(1 / edge_t)}" if edge_t > 0 else "all s"))
    notes = []
    if special:
        notes.append("s = 2 admitted only through the delta = 0 special case of the weak window")
    return SRange(theorem, l, intervals, special, tuple(provenance),
                  tuple(dict.fromkeys(requirements)), tuple(notes))


def _provenance(intervals: Sequence[SInterval], bounds: Sequence[Bound]) -> list[tuple[str, str]]:
    out = []
    for iv in intervals:
        for s_val, side in ((iv.lo, "lower"), (iv.hi, "upper")):
            if s_val is None:
                out.append(("inf", "no upper bound"))
                continue
            t_val = 1 / s_val
            names = [b.name for b in bounds
                     if any(p.lo == t_val or p.hi == t_val for p in b.allowed.parts)]
            out.append((f"{side} {fraction_text(s_val)}", ", ".join(names) or "s > 1"))
    return out


# compatibility checklist --------------------------------------------------

COMPAT_CITE = {
    "trace": "Ah^+|_M = Bh^-|_M",
    "dirichlet_trace": "h_{k_+}|_{M_k} = h_{k_-}|_{M_k}",
    "dirichlet_normal": "n_{k_-}\\cdot (\\partial_r h_{k_+})|_{M_k} + n_{k_+}\\cdot "
                        "(\\partial_r h_{k_-})|_{M_k} = \\big( g|_{M_k} + "
                        "\\partial_t(h_{k_+}\\cdot e_k)|_{M_k}\\big)\\, \\sin\\theta_k",
    "generalized_trace": "generalized trace condition",
    "neumann": "\\phi^+\\cdot n^- = \\phi^-\\cdot n^+ \\ \\mbox{ on }M",
    "normal_first": "$h^-\\cdot n^+ = h^+$",
    "normal_second": "\\partial_r h^+\\, \\cos 2\\theta - (2n^+\\cos\\theta\\, + n^-)\\, "
                     "\\partial_r h^- + 2\\sin^2\\theta\\, (\\phi_1^+\\cos \\theta/2 + "
                     "\\phi_2^+\\sin\\theta/2) + \\frac 12 (g+\\partial_{x_3}h_3^-)\\, "
                     "\\sin 2\\theta=0",
    "flux": "\\int_{\\cal G} g\\, dx + \\sum_{j:\\, d_j=0} \\int_{\\Gamma_j} h_j\\cdot n\\, dx + "
            "\\sum_{j:\\, d_j=2} \\int_{\\Gamma_j} h_j\\, dx =0",
    "rigid": CITE["solvability"],
}


@dataclass(frozen=True)
class CompatibilityItem:
    scope: str          # "edge" or "global"
    entity: str
    name: str
    applies_when: str
    citation: str

    def to_dict(self) -> dict[str, str]:
        return {"scope": self.scope, "entity": self.entity, "name": self.name,
                "applies_when": self.applies_when, "citation": self.citation}


def compatibility_requirements(model) -> list[CompatibilityItem]:
    """Named data conditions a user must attest; nothing here is evaluated."""
    items: list[CompatibilityItem] = []
    for e in model.edges:
        pair = tuple(sorted(model.bc_pair(e)))
        ent = e.id
        items.append(CompatibilityItem("edge", ent, "boundary data traces compatible on the edge",
                                       "traces exist (delta_k + 2/s < l)", COMPAT_CITE["trace"]))
        if pair == (0, 0):
            items += [
                CompatibilityItem("edge", ent, "Dirichlet traces agree on the edge",
                                  "traces exist", COMPAT_CITE["dirichlet_trace"]),
                CompatibilityItem("edge", ent, "normal-derivative relation",
                                  "delta_k < 1 - 2/s", COMPAT_CITE["dirichlet_normal"]),
                CompatibilityItem("edge", ent, "generalized trace condition",
                                  "delta_k = 1 - 2/s", COMPAT_CITE["generalized_trace"]),
            ]
        elif pair == (3, 3):
            items.append(CompatibilityItem("edge", ent, "traction data compatible on the edge",
                                           "delta_k < 1 - 2/s", COMPAT_CITE["neumann"]))
        elif pair == (0, 2):
            items += [
                CompatibilityItem("edge", ent, "normal component matches", "traces exist",
                                  COMPAT_CITE["normal_first"]),
                CompatibilityItem("edge", ent, "first-order relation", "delta_k < 1 - 2/s",
                                  COMPAT_CITE["normal_second"]),
            ]
    kinds = {int(f.bc) for f in model.faces}
    if kinds <= {0, 2}:
        items.append(CompatibilityItem("global", "domain", "flux balance of g and boundary data",
                                       "only conditions 0 and 2 occur", COMPAT_CITE["flux"]))
    items.append(CompatibilityItem("global", "domain", "load orthogonal to rigid motions in V",
                                   "when V contains rigid motions", COMPAT_CITE["rigid"]))
    return items

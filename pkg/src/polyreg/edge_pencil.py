"""Characteristic functions of the dihedral pencil, their complex zeros, and
the edge exponent mu.

Zeros are isolated with the argument principle: the winding number of F
around a box counts its zeros, boxes are split until every piece holds one
zero (or one multiple zero), and modified Newton polishes each root.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from . import kernels
from ._core_py import (DIRICHLET, DIRICHLET_NORMAL, DIRICHLET_SLIP,
                       DIRICHLET_TRACTION, NORMAL_LITERAL, TRACTION_LITERAL)

TWO_PI = 2.0 * math.pi

BC_NAMES = {
    0: "dirichlet",
    1: "tangential velocity + normal stress",
    2: "normal velocity + tangential stress",
    3: "traction (neumann)",
}

_CLOSED_FORM = {
    (0, 0): DIRICHLET,
    (3, 3): DIRICHLET,
    (0, 1): DIRICHLET_SLIP,
    (0, 2): DIRICHLET_NORMAL,
    (0, 3): DIRICHLET_TRACTION,
}
_LITERAL = {(0, 2): NORMAL_LITERAL, (0, 3): TRACTION_LITERAL}


class RootFindingError(RuntimeError):
    """Numerical failure of the contour machinery; carries the offending box."""

    def __init__(self, message: str, box: "SearchBox | None" = None):
        super().__init__(message if box is None else f"{message} (box {box.as_tuple()})")
        self.box = box


@dataclass(frozen=True)
class BcPair:
    """Boundary-condition kinds on the two faces adjacent to an edge."""

    d_plus: int
    d_minus: int

    def __post_init__(self):
        for d in (self.d_plus, self.d_minus):
            if d not in (0, 1, 2, 3):
                raise ValueError(f"boundary condition kind must be 0..3, got {d!r}")

    @classmethod
    def parse(cls, text: str) -> "BcPair":
        parts = [p.strip() for p in str(text).split(",")]
        if len(parts) != 2:
            raise ValueError(f"pair must look like '0,3', got {text!r}")
        return cls(int(parts[0]), int(parts[1]))

    @property
    def key(self) -> tuple[int, int]:
        return tuple(sorted((self.d_plus, self.d_minus)))  # type: ignore[return-value]

    @property
    def has_closed_form(self) -> bool:
        return self.key in _CLOSED_FORM

    @property
    def same_kind(self) -> bool:
        return self.d_plus == self.d_minus

    @property
    def parity_even(self) -> bool:
        return (self.d_plus + self.d_minus) % 2 == 0

    @property
    def excludes_zero(self) -> bool:
        """lambda = 0 is a trivial zero of F unless both faces are traction-free."""
        return self.key != (3, 3)

    def kernel_kind(self, literal: bool = False) -> int:
        if not self.has_closed_form:
            raise ValueError(f"pair {self} has no closed-form characteristic function; "
                             "use oracle module")
        if literal and self.key in _LITERAL:
            return _LITERAL[self.key]
        return _CLOSED_FORM[self.key]

    def __str__(self) -> str:
        return f"{self.d_plus},{self.d_minus}"


@dataclass(frozen=True)
class SearchBox:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError(f"degenerate search box {self.as_tuple()}")

    @classmethod
    def parse(cls, text: str) -> "SearchBox":
        vals = [float(v) for v in str(text).split(",")]
        if len(vals) != 4:
            raise ValueError("box must be re_min,re_max,im_min,im_max")
        return cls(*vals)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.re_min, self.re_max, self.im_min, self.im_max)

    @property
    def width(self) -> float:
        return self.re_max - self.re_min

    @property
    def height(self) -> float:
        return self.im_max - self.im_min

    @property
    def center(self) -> complex:
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def conjugate_symmetric(self) -> bool:
        return abs(self.im_min + self.im_max) <= 1e-12 * max(1.0, self.height)

    def expanded(self, eps: float) -> "SearchBox":
        return SearchBox(self.re_min - eps, self.re_max + eps, self.im_min - eps, self.im_max + eps)

    def contains(self, z: complex, pad: float = 0.0) -> bool:
        return (self.re_min - pad <= z.real <= self.re_max + pad
                and self.im_min - pad <= z.imag <= self.im_max + pad)

    def split(self, ratio: float) -> tuple["SearchBox", "SearchBox"]:
        """Cut across the longer side at ``ratio`` of its length."""
        if self.width >= self.height:
            cut = self.re_min + ratio * self.width
            return (SearchBox(self.re_min, cut, self.im_min, self.im_max),
                    SearchBox(cut, self.re_max, self.im_min, self.im_max))
        cut = self.im_min + ratio * self.height
        return (SearchBox(self.re_min, self.re_max, self.im_min, cut),
                SearchBox(self.re_min, self.re_max, cut, self.im_max))

    def corners(self) -> list[complex]:
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]


@dataclass(frozen=True)
class PencilRoot:
    value: complex
    multiplicity: int
    residual: float
    scale: float = 1.0


@dataclass(frozen=True)
class PencilSpectrum:
    pair: BcPair
    theta: float
    box: SearchBox
    roots: tuple[PencilRoot, ...]
    excluded: tuple[PencilRoot, ...] = ()
    count: int = 0
    literal: bool = False

    def values(self) -> list[complex]:
        return [r.value for r in self.roots]


MU_KINDS = ("exact", "strict_lower_bound")
MU_SOURCES = ("closed_form", "root_finder", "oracle", "user", "rule")


@dataclass(frozen=True)
class MuBound:
    """Edge exponent, either computed exactly or known only from below."""

    value: float | Fraction
    kind: str = "exact"
    source: str = "root_finder"
    detail: str = ""

    def __post_init__(self):
        if not self.value > 0:
            raise ValueError(f"mu must be positive, got {self.value}")
        if self.kind not in MU_KINDS:
            raise ValueError(f"unknown mu kind {self.kind!r}")
        if self.source not in MU_SOURCES:
            raise ValueError(f"unknown mu source {self.source!r}")

    @property
    def strict(self) -> bool:
        return self.kind == "strict_lower_bound"


@dataclass(frozen=True)
class PencilSettings:
    """Numerical knobs of the root finder; echoed into reports."""

    default_box: tuple[float, float, float, float] = (0.0, 5.0, -20.0, 20.0)
    re_cap: float = 10.0
    im_cap: float = 50.0
    strip_im_cap: float = 20.0
    tol: float = 1e-13
    max_depth: int = 48
    newton_maxit: int = 60
    phase_step: float = 0.05
    max_jump: float = 0.5
    perturb: float = 1e-6
    perturb_tries: int = 8
    literal: bool = False

    def as_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


DEFAULT_SETTINGS = PencilSettings()


def _check_theta(theta: float) -> None:
    if not (0.0 < theta < TWO_PI):
        raise ValueError(f"angle out of range: theta={theta} not in (0, 2*pi)")


def char_fn(pair: BcPair, theta: float, lam: complex, literal: bool = False) -> complex:
    """Characteristic function F(lambda) of the dihedral pencil.

    With ``literal=True`` the pairs (0,2) and (0,3) use the out-of-plane factor
    sin(2*lambda*theta) instead of cos(lambda*theta); the extra zeros at
    lambda = k*pi/theta that this introduces are not pencil eigenvalues.
    """
    _check_theta(theta)
    return kernels.value(pair.kernel_kind(literal), float(theta), complex(lam))


def char_fn_derivative(pair: BcPair, theta: float, lam: complex, literal: bool = False) -> complex:
    _check_theta(theta)
    return kernels.value_and_derivative(pair.kernel_kind(literal), float(theta), complex(lam))[1]


def _check_caps(box: SearchBox, settings: PencilSettings) -> None:
    if (box.re_min < -settings.re_cap or box.re_max > settings.re_cap
            or box.im_min < -settings.im_cap or box.im_max > settings.im_cap):
        raise ValueError(f"search box {box.as_tuple()} exceeds hard caps "
                         f"|Re| <= {settings.re_cap}, |Im| <= {settings.im_cap}")


class _Contour:
    """Winding numbers of one characteristic function, with edge caching."""

    def __init__(self, kind: int, theta: float, settings: PencilSettings):
        self.kind = kind
        self.theta = theta
        self.s = settings
        self._cache: dict[tuple[complex, complex], tuple[float, bool]] = {}

    def phase(self, z0: complex, z1: complex) -> tuple[float, bool]:
        hit = self._cache.get((z0, z1))
        if hit is not None:
            return hit
        back = self._cache.get((z1, z0))
        if back is not None:
            return -back[0], back[1]
        min_len = 1e-11 * max(1.0, abs(z0))
        res = kernels.segment_phase(self.kind, self.theta, z0, z1,
                                    self.s.phase_step, self.s.max_jump, min_len)
        self._cache[(z0, z1)] = res
        return res

    def winding(self, box: SearchBox) -> int | None:
        c = box.corners()
        total = 0.0
        for i in range(4):
            ph, ok = self.phase(c[i], c[(i + 1) % 4])
            if not ok:
                return None
            total += ph
        w = total / TWO_PI
        r = round(w)
        if abs(w - r) >= 0.25:
            return None
        return int(r)

    def count(self, box: SearchBox) -> tuple[int, SearchBox]:
        """Zero count, perturbing the box outward when F vanishes on its edge."""
        for k in range(self.s.perturb_tries + 1):
            b = box if k == 0 else box.expanded(self.s.perturb * k)
            w = self.winding(b)
            if w is not None:
                if w < 0:
                    raise RootFindingError("negative winding number", b)
                return w, b
        raise RootFindingError("no boundary clearance after perturbation", box)


def count_zeros(pair: BcPair, theta: float, box: SearchBox,
                settings: PencilSettings = DEFAULT_SETTINGS) -> int:
    """Number of zeros of F in ``box`` counted with multiplicity."""
    _check_theta(theta)
    _check_caps(box, settings)
    contour = _Contour(pair.kernel_kind(settings.literal), float(theta), settings)
    return contour.count(box)[0]


_SPLIT_RATIOS = (0.5 + 0.0137, 0.5 - 0.0219, 0.5 + 0.0311, 0.43, 0.57, 0.5 - 0.0713)


def _polish(contour: _Contour, box: SearchBox, n: int) -> complex | None:
    """Newton from the box centre; accept if it lands inside and accounts for all n zeros."""
    s = contour.s
    z, _, ok = kernels.newton(contour.kind, contour.theta, box.center, n, s.tol, s.newton_maxit)
    if not ok:
        return None
    scale = max(1.0, abs(z))
    if not box.contains(z, pad=1e-10 * scale):
        return None
    if n == 1:
        return z
    # a multiple root must carry the whole count of the box in a small neighbourhood
    r = min(1e-5 * scale, 0.25 * min(box.width, box.height))
    probe = SearchBox(z.real - r, z.real + r, z.imag - r, z.imag + r)
    w = contour.winding(probe)
    if w != n:
        return None
    return z


def _isolate(contour: _Contour, box: SearchBox, n: int) -> list[tuple[complex, int]]:
    s = contour.s
    found: list[tuple[complex, int]] = []
    stack = [(box, n, 0)]
    while stack:
        b, k, depth = stack.pop()
        if k == 0:
            continue
        if k == 1 or b.diameter < 0.5:
            z = _polish(contour, b, k)
            if z is not None:
                found.append((z, k))
                continue
        if depth >= s.max_depth or b.diameter < 1e-12:
            if b.diameter < 1e-9:
                # unresolvable cluster: report as a multiple root at the centre
                found.append((b.center, k))
                continue
            raise RootFindingError("subdivision depth exhausted", b)
        for ratio in _SPLIT_RATIOS:
            b1, b2 = b.split(ratio)
            w1 = contour.winding(b1)
            w2 = contour.winding(b2) if w1 is not None else None
            if w1 is not None and w2 is not None and w1 + w2 == k:
                stack.append((b2, w2, depth + 1))
                stack.append((b1, w1, depth + 1))
                break
        else:
            raise RootFindingError("could not split box cleanly", b)
    return found


def _sort_key(z: complex) -> tuple[float, float]:
    return (round(z.real, 10), round(z.imag, 10))


def _symmetrize(roots: list[tuple[complex, int]]) -> list[tuple[complex, int]]:
    """Snap near-real roots to the axis and make conjugate partners exact."""
    out = []
    for z, m in roots:
        if abs(z.imag) <= 1e-10 * max(1.0, abs(z)):
            z = complex(z.real, 0.0)
        out.append((z, m))
    upper = [(z, m) for z, m in out if z.imag > 0]
    for z, m in upper:
        for j, (w, mw) in enumerate(out):
            if w.imag < 0 and mw == m and abs(w - z.conjugate()) < 1e-8 * max(1.0, abs(z)):
                out[j] = (z.conjugate(), m)
                break
    return out


def find_roots(pair: BcPair, theta: float, box: SearchBox, tol: float | None = None,
               settings: PencilSettings = DEFAULT_SETTINGS) -> PencilSpectrum:
    """All zeros of F in ``box`` with multiplicities, sorted by (Re, Im)."""
    _check_theta(theta)
    _check_caps(box, settings)
    if tol is not None:
        settings = PencilSettings(**{**settings.__dict__, "tol": tol})
    kind = pair.kernel_kind(settings.literal)
    contour = _Contour(kind, float(theta), settings)
    n, eff = contour.count(box)
    raw = _isolate(contour, eff, n)
    if eff.conjugate_symmetric:
        raw = _symmetrize(raw)
    roots, excluded = [], []
    for z, m in sorted(raw, key=lambda zm: _sort_key(zm[0])):
        # polished multiple zeros at the origin land at ~1e-38, not on the axis
        z = complex(0.0 if abs(z.real) < 1e-14 else z.real, 0.0 if abs(z.imag) < 1e-14 else z.imag)
        res, scale = kernels.residual(kind, float(theta), z)
        root = PencilRoot(z, m, res, scale)
        if pair.excludes_zero and abs(z) < 1e-9:
            excluded.append(root)
        else:
            roots.append(root)
    return PencilSpectrum(pair, float(theta), eff, tuple(roots), tuple(excluded), n,
                          settings.literal)


def select_mu(pair: BcPair, theta: float, eigenvalues: Iterable[complex]) -> tuple[float, str]:
    """Apply the parity/angle rule to a list of eigenvalues.

    Returns (mu, which) with ``which`` in {"lambda1", "lambda2"}. Raises
    LookupError when the required eigenvalue is missing.
    """
    vals = list(eigenvalues)
    m = 1 if pair.same_kind else 2
    use_second = pair.parity_even and theta < math.pi / m
    eps = 1e-9
    if use_second:
        cands = [z.real for z in vals if z.real > 1.0 + eps]
        which = "lambda2"
    else:
        cands = [z.real for z in vals if z.real > eps]
        which = "lambda1"
    if not cands:
        raise LookupError(which)
    return min(cands), which


def mu(pair: BcPair, theta: float, settings: PencilSettings = DEFAULT_SETTINGS) -> MuBound:
    """Edge exponent from the smallest relevant pencil eigenvalue."""
    _check_theta(theta)
    if pair.key in ((0, 0), (3, 3)) and theta < math.pi:
        return MuBound(math.pi / theta, "exact", "closed_form", "pi/theta")
    if not pair.has_closed_form:
        from .oracle import mu_oracle
        return mu_oracle(pair, theta)
    kind = pair.kernel_kind(settings.literal)
    contour = _Contour(kind, float(theta), settings)
    re_lo, re_hi, im_lo, im_hi = settings.default_box
    im_lo = max(im_lo, -settings.im_cap)
    im_hi = min(im_hi, settings.im_cap)
    width = 0.5
    # strips in increasing Re; the first one holding a qualifying root fixes mu
    edge = re_lo - 0.0173
    limit = re_hi
    # every closed-form pair has an eigenvalue below 2*pi/theta, so this cap is never binding
    re_cap = max(settings.re_cap, TWO_PI / theta + 1.0)
    vals: list[complex] = []
    while True:
        while edge < limit:
            nxt = min(edge + width, limit)
            strip = SearchBox(edge, nxt, im_lo, im_hi)
            n, eff = contour.count(strip)
            if n:
                vals.extend(z for z, _ in _isolate(contour, eff, n))
                try:
                    value, which = select_mu(pair, theta, vals)
                    return MuBound(value, "exact", "root_finder", which)
                except LookupError:
                    pass
            edge = nxt
        if limit >= re_cap:
            raise RootFindingError(f"no eigenvalue for mu in Re < {re_cap}")
        limit = min(2 * limit, re_cap)


def mu_over_samples(pair: BcPair, thetas: Sequence[float],
                    settings: PencilSettings = DEFAULT_SETTINGS) -> MuBound:
    """Infimum of mu over angle samples along a curved edge."""
    if not thetas:
        raise ValueError("empty angle sample list")
    bounds = [mu(pair, t, settings) for t in thetas]
    best = min(bounds, key=lambda b: b.value)
    sources = {b.source for b in bounds}
    source = best.source if len(sources) == 1 else "root_finder"
    return MuBound(best.value, "exact", source, f"inf over {len(thetas)} angle samples")


def edge_strip_free(pair: BcPair, theta: float, re_lo: float, re_hi: float,
                    settings: PencilSettings = DEFAULT_SETTINGS) -> bool:
    """True iff no eigenvalue has re_lo <= Re <= re_hi and |Im| <= strip_im_cap."""
    if re_lo > re_hi:
        raise ValueError("re_lo must not exceed re_hi")
    if re_lo == re_hi:
        re_lo, re_hi = re_lo - 1e-9, re_hi + 1e-9
    cap = settings.strip_im_cap
    found = find_roots(pair, theta, SearchBox(re_lo, re_hi, -cap, cap), settings=settings)
    return not found.roots


# published lower bounds for mu, keyed by edge situation ---------------------

ARCCOS_QUARTER_3 = 3.0 * math.acos(0.25)


@dataclass(frozen=True)
class MuRule:
    """A strict lower bound on mu valid under an angle condition."""

    pairs: frozenset
    theta_below: float
    bound: Fraction
    label: str = ""


MU_RULES: tuple[MuRule, ...] = (
    MuRule(frozenset({(0, 0), (3, 3)}), TWO_PI, Fraction(1, 2), "same condition on both sides"),
    MuRule(frozenset({(0, 0), (3, 3)}), ARCCOS_QUARTER_3, Fraction(2, 3),
           "same condition, theta < 3 arccos(1/4)"),
    MuRule(frozenset({(0, 0), (3, 3)}), math.pi, Fraction(1), "same condition, theta < pi"),
    MuRule(frozenset({(0, 0), (3, 3)}), 0.75 * math.pi, Fraction(4, 3),
           "same condition, theta < 3pi/4"),
    MuRule(frozenset({(0, 3)}), TWO_PI, Fraction(1, 4), "dirichlet/traction"),
    MuRule(frozenset({(0, 1), (0, 2)}), TWO_PI, Fraction(1, 4), "dirichlet/(ii) or (iii)"),
    MuRule(frozenset({(0, 1), (0, 2)}), 1.5 * math.pi, Fraction(1, 3),
           "dirichlet/(ii) or (iii), theta < 3pi/2"),
    MuRule(frozenset({(0, 1)}), 0.5 * ARCCOS_QUARTER_3, Fraction(2, 3),
           "dirichlet/(ii), theta < 1.5 arccos(1/4)"),
    MuRule(frozenset({(0, 2)}), 0.75 * math.pi, Fraction(2, 3), "dirichlet/(iii), theta < 3pi/4"),
    MuRule(frozenset({(0, 1)}), 0.5 * math.pi, Fraction(1), "dirichlet/(ii), theta < pi/2"),
    MuRule(frozenset({(0, 1)}), 0.375 * math.pi, Fraction(4, 3), "dirichlet/(ii), theta < 3pi/8"),
)


def rule_mu_bound(pair: BcPair, theta: float) -> MuBound | None:
    """Best tabulated strict lower bound for mu, or None if no rule covers the pair."""
    best = None
    for rule in MU_RULES:
        if pair.key in rule.pairs and theta < rule.theta_below:
            if best is None or rule.bound > best.bound:
                best = rule
    if best is None:
        return None
    return MuBound(best.bound, "strict_lower_bound", "rule", best.label)


def class_mu_bound(pair: BcPair, theta_sup: float = TWO_PI) -> MuBound | None:
    """Tabulated bound valid for every edge of the pair with angle below ``theta_sup``."""
    best = None
    for rule in MU_RULES:
        if pair.key in rule.pairs and rule.theta_below >= theta_sup:
            if best is None or rule.bound > best.bound:
                best = rule
    if best is None:
        return None
    return MuBound(best.bound, "strict_lower_bound", "rule", best.label)

"""Cross-checks between the collocation oracle and the transcendental roots."""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field

from .edge_pencil import BcPair, SearchBox, find_roots
from .oracle import MembershipCase, assemble_pencil, membership_quadrature, solve_qep

GRID_PAIRS = ((0, 0), (3, 3), (0, 1), (0, 2), (0, 3))
GRID_ANGLES = (math.pi / 4, math.pi / 2, 0.75 * math.pi, 0.99 * math.pi, 1.25 * math.pi,
               1.5 * math.pi, 1.75 * math.pi)
GRID_BOX = (0.0, 3.0, -5.0, 5.0)

# The normalised characteristic functions cancel one factor (lambda - 1) that the
# full pencil keeps, so the pencil multiplicity at lambda = 1 is one higher.
STRUCTURAL_OFFSET = {1.0: 1}


def _offset(z: complex, tol: float) -> int:
    return sum(k for point, k in STRUCTURAL_OFFSET.items() if abs(z - point) <= tol)


@dataclass
class EquivalenceCase:
    pair: tuple[int, int]
    theta: float
    oracle_values: list[complex]
    root_values: list[complex]
    oracle_only: list[complex] = field(default_factory=list)
    roots_only: list[complex] = field(default_factory=list)
    multiplicity_mismatch: list[complex] = field(default_factory=list)
    max_deviation: float = 0.0
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not (self.oracle_only or self.roots_only or self.multiplicity_mismatch)

    def to_dict(self) -> dict:
        def cz(values):
            return [[round(z.real, 10), round(z.imag, 10)] for z in values]
        return {"pair": list(self.pair), "theta": self.theta, "ok": self.ok,
                "oracle_count": len(self.oracle_values), "root_count": len(self.root_values),
                "oracle_only": cz(self.oracle_only), "roots_only": cz(self.roots_only),
                "multiplicity_mismatch": cz(self.multiplicity_mismatch),
                "max_deviation": float(f"{self.max_deviation:.3e}")}


def _inside(z: complex, box: tuple[float, float, float, float]) -> bool:
    re_lo, re_hi, im_lo, im_hi = box
    return re_lo < z.real <= re_hi and im_lo <= z.imag <= im_hi


def equivalence_case(pair: tuple[int, int], theta: float, N: int = 48, tol: float = 1e-6,
                     box: tuple[float, float, float, float] = GRID_BOX,
                     pad: float = 0.05) -> EquivalenceCase:
    """Match oracle eigenvalues and characteristic roots inside ``box``.

    Both sides are computed on a box enlarged by ``pad`` so that values sitting
    on the box edge are matched against their partner just outside.
    """
    start = time.perf_counter()
    bc = BcPair(*pair)
    re_lo, re_hi, im_lo, im_hi = box
    big = SearchBox(re_lo - pad, re_hi + pad, im_lo - pad, im_hi + pad)
    oracle = solve_qep(assemble_pencil(bc, theta, N), big)
    spectrum = find_roots(bc, theta, big)
    roots = [(r.value, r.multiplicity) for r in spectrum.roots]
    all_roots = [z for z, _ in roots] + [r.value for r in spectrum.excluded]
    oracle_in = [e for e in oracle if _inside(e.value, box)]
    roots_in = [(z, m) for z, m in roots if _inside(z, box)]
    case = EquivalenceCase(pair, theta, [e.value for e in oracle_in], [z for z, _ in roots_in])
    dev = 0.0
    for e in oracle_in:
        d = min((abs(e.value - w) for w in all_roots), default=math.inf)
        if d > tol:
            case.oracle_only.append(e.value)
        else:
            dev = max(dev, d)
    for z, mult in roots_in:
        near = [e for e in oracle if abs(e.value - z) <= tol]
        if not near:
            case.roots_only.append(z)
            continue
        dev = max(dev, min(abs(e.value - z) for e in near))
        if sum(e.cluster_size for e in near) != mult + _offset(z, tol):
            case.multiplicity_mismatch.append(z)
    case.max_deviation = dev
    case.seconds = time.perf_counter() - start
    return case


def equivalence_grid(N: int = 48, tol: float = 1e-6, pairs=GRID_PAIRS, angles=GRID_ANGLES,
                     ) -> list[EquivalenceCase]:
    return [equivalence_case(p, th, N, tol) for p in pairs for th in angles]


def random_membership_cases(count: int, seed: int = 20240, margin: float = 0.05,
                            ) -> list[MembershipCase]:
    """Random cases whose exponent sits at least ``margin`` away from the threshold."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        l = rng.randint(0, 2)
        s = rng.choice([1.25, 1.5, 2.0, 2.5, 3.0, 4.0])
        delta = rng.uniform(-0.5, 1.0)
        threshold = l - delta - 2.0 / s
        lam = threshold + rng.choice([-1, 1]) * rng.uniform(margin + 0.01, 1.5)
        case = MembershipCase(l, s, delta, lam, rng.randint(0, l))
        out.append(case)
    return out


def membership_suite(count: int = 100, seed: int = 20240, margin: float = 0.05,
                     ) -> list[tuple[MembershipCase, str, str]]:
    """(case, expected, classified) for random cases outside the margin."""
    rows = []
    for case in random_membership_cases(count, seed, margin):
        expected = "member" if case.lambda_re > case.threshold else "non_member"
        rows.append((case, expected, membership_quadrature(case, margin)))
    return rows

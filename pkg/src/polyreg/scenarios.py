"""Polyhedron families with tabulated edge bounds and vertex certificates.

Each family fixes boundary conditions, an angle ceiling per edge class and
the vertex types that occur; ``srange`` inverts the chosen theorem for it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .certificates import StripCertificate, VertexConfig, certify
from .edge_pencil import ARCCOS_QUARTER_3, BcPair, MuBound, TWO_PI, class_mu_bound
from .windows import AssumptionFlags, SRange, max_s_range


@dataclass(frozen=True)
class EdgeClass:
    pair: tuple[int, int]
    theta_sup: float = TWO_PI
    label: str = ""

    def mu(self) -> MuBound:
        bound = class_mu_bound(BcPair(*self.pair), self.theta_sup)
        if bound is None:
            raise LookupError(f"no tabulated exponent bound for pair {self.pair}")
        return bound


@dataclass(frozen=True)
class VertexClass:
    face_bcs: tuple[int, ...]
    convex: bool = False
    lipschitz: bool = False
    slip_face_theta: float | None = None
    user: StripCertificate | None = None

    def certificate(self, vertex_id: str) -> StripCertificate:
        if self.user is not None:
            return StripCertificate(self.user.re_lo, self.user.re_hi, self.user.lo_open,
                                    self.user.hi_open, self.user.exceptional_eigenvalues,
                                    "user", self.user.citation, vertex_id, self.user.notes)
        n = len(self.face_bcs)
        theta = self.slip_face_theta if self.slip_face_theta is not None else math.pi / 2
        edges = [((self.face_bcs[i], self.face_bcs[(i + 1) % n]), theta, (i, (i + 1) % n))
                 for i in range(n)]
        cfg = VertexConfig.build(vertex_id, self.face_bcs, edges, self.convex, self.lipschitz)
        return certify(cfg)


@dataclass(frozen=True)
class Scenario:
    key: str
    title: str
    theorem: str
    l: int
    edges: tuple[EdgeClass, ...]
    vertices: tuple[VertexClass, ...]
    flags: AssumptionFlags = AssumptionFlags()

    def mus(self) -> dict[str, MuBound]:
        return {f"e{i}": e.mu() for i, e in enumerate(self.edges)}

    def certificates(self) -> dict[str, StripCertificate]:
        return {f"v{i}": v.certificate(f"v{i}") for i, v in enumerate(self.vertices)}

    def srange(self) -> SRange:
        return max_s_range(self.theorem, self.l, self.mus(), self.certificates(), flags=self.flags)


PI = math.pi
A3 = ARCCOS_QUARTER_3

_D = VertexClass((0, 0, 0))
_D_CONVEX = VertexClass((0, 0, 0), convex=True)
_N = VertexClass((3, 3, 3), lipschitz=True)
_DN_USER = VertexClass((0, 0, 3), user=StripCertificate(
    Fraction(-1), Fraction(-1, 2), False, False, (), "user",
    notes=("assumed strip for a mixed Dirichlet/traction vertex; no published rule",)))
_MIXED = VertexClass((0, 1, 0, 2))
_SLIP_CONVEX = VertexClass((0, 0, 1), convex=True, slip_face_theta=PI / 2 * 0.99)

SCENARIOS: tuple[Scenario, ...] = (
    Scenario("dirichlet_weak", "Dirichlet, weak solutions", "weak_bounded", 1,
             (EdgeClass((0, 0)),), (_D,)),
    Scenario("dirichlet_convex_weak", "Dirichlet, convex, weak solutions", "weak_bounded", 1,
             (EdgeClass((0, 0), PI),), (_D_CONVEX,)),
    Scenario("dirichlet_lift", "Dirichlet, W2 regularity", "lift_bounded", 2,
             (EdgeClass((0, 0)),), (_D,)),
    Scenario("dirichlet_lift_angles", "Dirichlet, W2, edge angles below 3 arccos(1/4)",
             "lift_bounded", 2, (EdgeClass((0, 0), A3),), (_D,)),
    Scenario("dirichlet_convex_lift", "Dirichlet, convex, W2", "lift_bounded", 2,
             (EdgeClass((0, 0), PI),), (_D_CONVEX,)),
    Scenario("dirichlet_convex_lift_acute", "Dirichlet, convex, W2, edge angles below 3pi/4",
             "lift_bounded", 2, (EdgeClass((0, 0), 0.75 * PI),), (_D_CONVEX,)),
    Scenario("neumann_weak", "Neumann, weak solutions", "weak_bounded", 1,
             (EdgeClass((3, 3)),), (_N,)),
    Scenario("neumann_lift", "Neumann, W2 regularity", "lift_bounded", 2,
             (EdgeClass((3, 3)),), (_N,)),
    Scenario("neumann_lift_angles", "Neumann, W2, edge angles below 3 arccos(1/4)",
             "lift_bounded", 2, (EdgeClass((3, 3), A3),), (_N,)),
    Scenario("mixed_dn_lift", "Dirichlet/Neumann mixed, W2", "lift_bounded", 2,
             (EdgeClass((0, 0)), EdgeClass((3, 3)), EdgeClass((0, 3))), (_D, _N, _DN_USER)),
    Scenario("mixed_i_iii_weak", "conditions (i)-(iii), Dirichlet at every edge, weak",
             "weak_bounded", 1,
             (EdgeClass((0, 0)), EdgeClass((0, 1)), EdgeClass((0, 2))), (_MIXED,)),
    Scenario("mixed_i_iii_weak_angles",
             "conditions (i)-(iii), weak, mixed edge angles below 3pi/2", "weak_bounded", 1,
             (EdgeClass((0, 0)), EdgeClass((0, 1), 1.5 * PI), EdgeClass((0, 2), 1.5 * PI)),
             (_MIXED,)),
    Scenario("mixed_i_iii_lift", "conditions (i)-(iii), W2", "lift_bounded", 2,
             (EdgeClass((0, 0)), EdgeClass((0, 1)), EdgeClass((0, 2))), (_MIXED,)),
    Scenario("mixed_i_iii_lift_angles", "conditions (i)-(iii), W2, restricted edge angles",
             "lift_bounded", 2,
             (EdgeClass((0, 0), A3), EdgeClass((0, 1), A3 / 2), EdgeClass((0, 2), 0.75 * PI)),
             (_MIXED,)),
    Scenario("slip_face_convex_lift", "convex, one face with condition (ii), W2",
             "lift_bounded", 2, (EdgeClass((0, 0), PI), EdgeClass((0, 1), PI / 2)),
             (_D_CONVEX, _SLIP_CONVEX)),
    Scenario("slip_face_convex_lift_acute", "convex, one face with condition (ii), W2, small angles",
             "lift_bounded", 2, (EdgeClass((0, 0), 0.75 * PI), EdgeClass((0, 1), 0.375 * PI)),
             (_D_CONVEX, _SLIP_CONVEX)),
)

SCENARIO_INDEX = {s.key: s for s in SCENARIOS}


def scenario_table() -> list[tuple[Scenario, SRange]]:
    return [(s, s.srange()) for s in SCENARIOS]

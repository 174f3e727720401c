"""Independent numerical checks.

The dihedral pencil is discretised by Chebyshev collocation on the opening
angle and solved as a quadratic eigenvalue problem; weighted-norm membership of
model singular functions is decided by quadrature over shrinking cutoffs.
Nothing here uses the closed-form characteristic functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.linalg as sl
from scipy import integrate

from .edge_pencil import BcPair, MuBound, SearchBox, select_mu

# unknown blocks in the stacked vector
UR, UPHI, U3, PRESS = range(4)


def chebyshev(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Differentiation matrix and Gauss-Lobatto nodes x_j = cos(j*pi/N)."""
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.r_[2.0, np.ones(N - 1), 2.0] * (-1.0) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    D = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    D -= np.diag(D.sum(axis=1))
    return D, x


@dataclass
class CollocationPencil:
    """A(lambda) = A0 + lambda*A1 + lambda^2*A2 acting on (U_r, U_phi, U_3, P) at the nodes.

    Node 0 sits on the face phi = +theta/2 (d_plus), node N on phi = -theta/2.
    """

    pair: BcPair
    theta: float
    N: int
    A0: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    phi: np.ndarray
    boundary_rows: dict = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.A0.shape[0]

    def matrix(self, lam: complex) -> np.ndarray:
        return self.A0 + lam * self.A1 + lam * lam * self.A2


def _boundary_rows(d: int, node: int, n: int, D1: np.ndarray):
    """Rows (component slot, lambda^0 part, lambda^1 part) for one face."""
    e = np.zeros(n)
    e[node] = 1.0
    dn = D1[node]

    def row(*parts):
        r0 = np.zeros(4 * n)
        r1 = np.zeros(4 * n)
        for comp, vec, order in parts:
            (r0 if order == 0 else r1)[comp * n:(comp + 1) * n] += vec
        return r0, r1

    normal_stress = row((UPHI, 2 * dn, 0), (UR, 2 * e, 0), (PRESS, -e, 0))
    shear_stress = row((UPHI, -e, 0), (UPHI, e, 1), (UR, dn, 0))
    if d == 0:
        rows = [row((UR, e, 0)), row((UPHI, e, 0)), row((U3, e, 0))]
    elif d == 1:
        rows = [row((UR, e, 0)), normal_stress, row((U3, e, 0))]
    elif d == 2:
        rows = [shear_stress, row((UPHI, e, 0)), row((U3, dn, 0))]
    else:
        rows = [shear_stress, normal_stress, row((U3, dn, 0))]
    return rows


def assemble_pencil(pair: BcPair, theta: float, N: int = 48) -> CollocationPencil:
    """Collocate the polar-component Stokes system for u = r^lambda U, p = r^(lambda-1) P."""
    if N < 16:
        raise ValueError("collocation order N must be at least 16")
    if not 0.0 < theta < 2.0 * math.pi:
        raise ValueError(f"angle out of range: theta={theta}")
    D, x = chebyshev(N)
    D1 = D * (2.0 / theta)
    D2 = D1 @ D1
    n = N + 1
    eye = np.eye(n)
    A0 = np.zeros((4 * n, 4 * n))
    A1 = np.zeros_like(A0)
    A2 = np.zeros_like(A0)

    def put(M, i, j, block):
        M[i * n:(i + 1) * n, j * n:(j + 1) * n] += block

    # radial momentum: -(U_r'' + (l^2-1) U_r - 2 U_phi') + (l-1) P
    put(A0, UR, UR, -D2 + eye); put(A2, UR, UR, -eye)
    put(A0, UR, UPHI, 2 * D1)
    put(A1, UR, PRESS, eye); put(A0, UR, PRESS, -eye)
    # angular momentum: -(U_phi'' + (l^2-1) U_phi + 2 U_r') + P'
    put(A0, UPHI, UPHI, -D2 + eye); put(A2, UPHI, UPHI, -eye)
    put(A0, UPHI, UR, -2 * D1)
    put(A0, UPHI, PRESS, D1)
    # axial momentum: -(U_3'' + l^2 U_3)
    put(A0, U3, U3, -D2); put(A2, U3, U3, -eye)
    # continuity: (l+1) U_r + U_phi'
    put(A0, PRESS, UR, eye); put(A1, PRESS, UR, eye)
    put(A0, PRESS, UPHI, D1)

    boundary = {}
    for side, d, node in (("plus", pair.d_plus, 0), ("minus", pair.d_minus, N)):
        idx = []
        for comp, (r0, r1) in enumerate(_boundary_rows(d, node, n, D1)):
            r = comp * n + node
            A0[r], A1[r], A2[r] = r0, r1, 0.0
            idx.append(r)
        boundary[side] = idx
    return CollocationPencil(pair, float(theta), N, A0, A1, A2, x * theta / 2.0, boundary)


def raw_eigenvalues(pencil: CollocationPencil) -> np.ndarray:
    """Finite eigenvalues of the companion linearisation.

    Rows are equilibrated (interior rows grow like N^4 while boundary rows are
    O(1)) and lambda is rescaled so the three coefficients have comparable
    norms; without this, roundoff at N ~ 100 reaches 1e-6.
    """
    A0, A1, A2 = pencil.A0.copy(), pencil.A1.copy(), pencil.A2.copy()
    rows = np.maximum.reduce([np.abs(A0).max(axis=1), np.abs(A1).max(axis=1),
                              np.abs(A2).max(axis=1)])
    rows[rows == 0.0] = 1.0
    A0 /= rows[:, None]
    A1 /= rows[:, None]
    A2 /= rows[:, None]
    n0, n1, n2 = (np.linalg.norm(A, 2) for A in (A0, A1, A2))
    gamma = math.sqrt(n0 / n2)
    delta = 2.0 / (n0 + n1 * gamma)
    A0 *= delta
    A1 *= gamma * delta
    A2 *= gamma * gamma * delta
    m = pencil.size
    eye = np.eye(m)
    zero = np.zeros((m, m))
    L = np.block([[zero, eye], [-A0, -A1]])
    M = np.block([[eye, zero], [zero, A2]])
    w = sl.eig(L, M, right=False, overwrite_a=True, overwrite_b=True)
    w = w[np.isfinite(w)] * gamma
    return w[np.abs(w) < 1e6]


def cluster(values, radius: float) -> list[tuple[complex, int]]:
    """Single-linkage clusters of nearby eigenvalues as (mean, size)."""
    vals = sorted((complex(v) for v in values), key=lambda z: (z.real, z.imag))
    parent = list(range(len(vals)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            if vals[j].real - vals[i].real > radius:
                break
            if abs(vals[j] - vals[i]) <= radius:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(vals):
        groups.setdefault(find(i), []).append(v)
    out = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    return sorted(out, key=lambda t: (round(t[0].real, 9), round(t[0].imag, 9)))


@dataclass(frozen=True)
class OracleEigenvalue:
    value: complex
    cluster_size: int
    residual: float
    drift: float
    tail: float = 0.0


def chebyshev_coefficients_matrix(N: int) -> np.ndarray:
    """Map node values at x_j = cos(j*pi/N) to Chebyshev coefficients (DCT-I)."""
    j = np.arange(N + 1)
    C = np.cos(np.outer(j, j) * np.pi / N) * (2.0 / N)
    C[:, 0] *= 0.5
    C[:, N] *= 0.5
    C[0, :] *= 0.5
    C[N, :] *= 0.5
    return C


def _null_analysis(pencil: CollocationPencil, lam: complex, norms, size: int,
                   tail: int = 3) -> tuple[float, float]:
    """Relative residual and the smallest Chebyshev tail fraction over the near-null space.

    A discrete eigenvector whose every component is resolved has a negligible
    coefficient tail; the checkerboard pressure mode T_N is all tail.
    """
    _, sv, vh = np.linalg.svd(pencil.matrix(lam))
    scale = norms[0] + abs(lam) * norms[1] + abs(lam) ** 2 * norms[2]
    res = float(sv[-1] / scale)
    keep = [i for i in range(len(sv) - size, len(sv)) if sv[i] <= max(1e3 * sv[-1], 1e-10 * scale)]
    V = vh[keep].conj().T
    n = pencil.N + 1
    C = chebyshev_coefficients_matrix(pencil.N)
    blocks = [C @ V[c * n:(c + 1) * n] for c in range(4)]
    coeffs = np.vstack(blocks)
    tails = np.vstack([b[-tail:] for b in blocks])
    # smallest tail fraction attainable by a combination of the near-null vectors
    q, r = np.linalg.qr(coeffs)
    frac = np.linalg.svd(tails @ np.linalg.pinv(r), compute_uv=False)[-1]
    return res, float(frac)


def solve_qep(pencil: CollocationPencil, box: SearchBox, *, check_stability: bool = True,
              residual_tol: float = 1e-8, stability_tol: float = 1e-8,
              tail_tol: float = 1e-5, cluster_radius: float = 1e-3,
              pad: float = 0.05) -> list[OracleEigenvalue]:
    """Eigenvalues in ``box`` that pass the residual, resolution and N -> 2N filters.

    Defective eigenvalues split into clusters under discretisation; each
    cluster is reported once at its mean.
    """
    inner = box.expanded(pad)

    def clustered(p):
        w = raw_eigenvalues(p)
        w = [z for z in w if inner.contains(complex(z))]
        return cluster(w, cluster_radius)

    coarse = clustered(pencil)
    fine = None
    if check_stability:
        fine = clustered(assemble_pencil(pencil.pair, pencil.theta, 2 * pencil.N))
    norms = [np.linalg.norm(A, 2) for A in (pencil.A0, pencil.A1, pencil.A2)]
    out = []
    for z, size in coarse:
        if not (box.re_min < z.real <= box.re_max and box.im_min <= z.imag <= box.im_max):
            continue
        res, tail = _null_analysis(pencil, z, norms, size)
        if res >= residual_tol or tail >= tail_tol:
            continue
        drift = 0.0
        if fine is not None:
            drift = min((abs(w - z) for w, _ in fine), default=math.inf)
            if drift >= stability_tol * max(1.0, abs(z)):
                continue
        out.append(OracleEigenvalue(z, size, res, drift, tail))
    return out


def mu_oracle(pair: BcPair, theta: float, N: int = 48) -> MuBound:
    """Edge exponent from collocation eigenvalues (pairs without a closed form)."""
    pencil = assemble_pencil(pair, theta, N)
    for re_max in (5.0, 10.0, 20.0):
        box = SearchBox(0.0, re_max, -20.0, 20.0)
        eig = solve_qep(pencil, box)
        try:
            value, which = select_mu(pair, theta, [e.value for e in eig])
        except LookupError:
            continue
        return MuBound(value, "exact", "oracle", f"{which}, collocation N={N}")
    raise RuntimeError(f"collocation found no eigenvalue for mu of pair {pair} at theta={theta}")


# weighted-norm membership --------------------------------------------------

@dataclass(frozen=True)
class MembershipCase:
    """Does r^lambda (times a smooth angular factor) lie in V^{l,s}_delta near an edge?"""

    l: int
    s: float | Fraction
    delta: float
    lambda_re: float
    alpha_order: int | None = None

    def __post_init__(self):
        if not self.s > 1:
            raise ValueError("s must exceed 1")
        if self.l < 0:
            raise ValueError("l must be non-negative")

    @property
    def threshold(self) -> float:
        return self.l - self.delta - 2.0 / float(self.s)


def decade_log_integrals(log_f, decades: int = 12) -> list[float]:
    """log of the integral of exp(log_f) over [10^-(k+1), 10^-k], k = 0..decades-1.

    Each panel is normalised by the integrand at its right end so that huge or
    tiny power laws stay in range.
    """
    out = []
    for k in range(decades):
        a, b = 10.0 ** (-(k + 1)), 10.0 ** (-k)
        ref = log_f(b)
        val, _ = integrate.quad(lambda r: math.exp(log_f(r) - ref), a, b, limit=200)
        out.append(ref + math.log(val))
    return out


def growth_ratio(log_integrals: list[float], tail: int = 6) -> float:
    """Mean per-decade growth factor of the contributions near r = 0."""
    diffs = np.diff(log_integrals[-tail:])
    return float(math.exp(np.mean(diffs)))


def membership_quadrature(case: MembershipCase, margin: float = 0.05) -> str:
    """Classify as "member", "non_member" or "inconclusive" (inside the margin)."""
    if abs(case.lambda_re - case.threshold) <= margin:
        return "inconclusive"
    s = float(case.s)
    top = case.l if case.alpha_order is None else case.alpha_order
    ratios = []
    for alpha in range(0, top + 1):
        # |d_r^alpha r^lambda| = c * r^(Re lambda - alpha), weight r^(s(delta-l+alpha)), area r dr
        exponent = s * (case.delta - case.l + alpha) + s * (case.lambda_re - alpha) + 1.0
        logs = decade_log_integrals(lambda r, e=exponent: e * math.log(r))
        ratios.append(growth_ratio(logs))
    worst = max(ratios)
    # contributions that do not shrink from decade to decade sum to infinity
    return "member" if worst < 0.995 else "non_member"


def condg_check(gamma: float | None) -> bool:
    """Finiteness of the weighted L2 integral of g ~ r^gamma near one edge.

    The weight reduces to r^-1 on a single-edge sector, so the integrand is
    r^(2*gamma - 1) * r dr. ``None`` stands for g identically zero.
    """
    if gamma is None:
        return True
    logs = decade_log_integrals(lambda r: (2.0 * gamma) * math.log(r))
    return growth_ratio(logs) < 0.995

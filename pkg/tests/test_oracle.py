import math

import numpy as np
import pytest
import sympy as sp

from conftest import reentrant_root
from polyreg.edge_pencil import BcPair, SearchBox
from polyreg.oracle import (PRESS, U3, UPHI, UR, MembershipCase, assemble_pencil, condg_check,
                            membership_quadrature, mu_oracle, solve_qep)
from polyreg.verification import equivalence_case, membership_suite


def values(pair, theta, box, N=48):
    return sorted((e.value for e in solve_qep(assemble_pencil(BcPair(*pair), theta, N),
                                              SearchBox(*box))), key=lambda z: (z.real, z.imag))


# the polar system, checked against Cartesian Stokes ----------------------

def polar_residuals():
    """Cartesian -Laplace(u) + grad(p) and div(u), for u = r^lam U(phi), in polar components."""
    r, phi, lam = sp.symbols("r phi lam", positive=True)
    Ur, Uphi, U3f, P = (sp.Function(n)(phi) for n in ("Ur", "Uphi", "U3", "P"))
    c, s = sp.cos(phi), sp.sin(phi)
    ux = r**lam * (Ur * c - Uphi * s)
    uy = r**lam * (Ur * s + Uphi * c)
    uz = r**lam * U3f
    p = r**(lam - 1) * P
    dx = lambda f: c * sp.diff(f, r) - s / r * sp.diff(f, phi)
    dy = lambda f: s * sp.diff(f, r) + c / r * sp.diff(f, phi)
    lap = lambda f: dx(dx(f)) + dy(dy(f))
    fx = -lap(ux) + dx(p)
    fy = -lap(uy) + dy(p)
    radial = sp.simplify((fx * c + fy * s) / r**(lam - 2))
    angular = sp.simplify((-fx * s + fy * c) / r**(lam - 2))
    axial = sp.simplify(-lap(uz) / r**(lam - 2))
    div = sp.simplify((dx(ux) + dy(uy)) / r**(lam - 1))
    return (lam, phi, Ur, Uphi, U3f, P), (radial, angular, axial, div)


def test_polar_equations_follow_from_cartesian_form():
    (lam, phi, Ur, Uphi, U3f, P), (radial, angular, axial, div) = polar_residuals()
    d = lambda f, k=1: sp.diff(f, phi, k)
    expected = (
        -(d(Ur, 2) + (lam**2 - 1) * Ur - 2 * d(Uphi)) + (lam - 1) * P,
        -(d(Uphi, 2) + (lam**2 - 1) * Uphi + 2 * d(Ur)) + d(P),
        -(d(U3f, 2) + lam**2 * U3f),
        (lam + 1) * Ur + d(Uphi),
    )
    for got, want in zip((radial, angular, axial, div), expected):
        assert sp.simplify(sp.expand(got - want)) == 0


def test_interior_rows_apply_polar_operator():
    theta, lam, N = 2.0, 0.7 + 0.3j, 32
    pen = assemble_pencil(BcPair(0, 0), theta, N)
    phi = pen.phi
    fields = {UR: (np.cos(1.3 * phi), -1.3 * np.sin(1.3 * phi), -1.69 * np.cos(1.3 * phi)),
              UPHI: (np.sin(0.4 * phi), 0.4 * np.cos(0.4 * phi), -0.16 * np.sin(0.4 * phi)),
              U3: (np.exp(0.5 * phi), 0.5 * np.exp(0.5 * phi), 0.25 * np.exp(0.5 * phi)),
              PRESS: (phi**2, 2 * phi, 2 + 0 * phi)}
    vec = np.concatenate([fields[k][0] for k in (UR, UPHI, U3, PRESS)])
    out = pen.matrix(lam) @ vec
    n = N + 1
    (ur, dur, d2ur), (up, dup, d2up), (u3, _, d2u3), (p, dp, _) = (fields[k] for k in (UR, UPHI, U3, PRESS))
    want = {UR: -(d2ur + (lam**2 - 1) * ur - 2 * dup) + (lam - 1) * p,
            UPHI: -(d2up + (lam**2 - 1) * up + 2 * dur) + dp,
            U3: -(d2u3 + lam**2 * u3),
            PRESS: (lam + 1) * ur + dup}
    inner = slice(1, N)
    for comp, w in want.items():
        got = out[comp * n:(comp + 1) * n]
        assert np.max(np.abs(got[inner] - w[inner])) < 1e-7
    assert np.max(np.abs(out[PRESS * n:(PRESS + 1) * n] - want[PRESS])) < 1e-9


# structure -----------------------------------------------------------------

def test_pencil_size_and_boundary_rows():
    pen = assemble_pencil(BcPair(0, 0), 1.0, 16)
    assert pen.size == 68
    for rows in pen.boundary_rows.values():
        assert len(rows) == 3
        for r in rows:
            assert not pen.A1[r].any() and not pen.A2[r].any()


def test_input_checks():
    with pytest.raises(ValueError):
        assemble_pencil(BcPair(0, 0), 1.0, 8)
    with pytest.raises(ValueError):
        assemble_pencil(BcPair(0, 0), 0.0, 32)


# spectra -------------------------------------------------------------------

def test_right_angle_dirichlet():
    got = values((0, 0), math.pi / 2, (0, 2.5, -1, 1))
    assert [round(z.real, 7) for z in got] == [1.0, 2.0]


def test_reentrant_root_matches_bisection():
    got = values((0, 0), 1.5 * math.pi, (0, 0.6, -0.5, 0.5))
    assert abs(got[0] - reentrant_root()) < 1e-6


def test_traction_right_angle_contains_one():
    got = values((3, 3), math.pi / 2, (0.5, 1.5, -0.5, 0.5))
    assert any(abs(z - 1) < 1e-6 for z in got)


def test_convergence_in_collocation_order():
    ref = reentrant_root()
    errors = []
    for N in (24, 48, 96):
        w = np.array([e.value for e in solve_qep(assemble_pencil(BcPair(0, 0), 1.5 * math.pi, N),
                                                 SearchBox(0, 0.6, -0.5, 0.5), check_stability=False)])
        errors.append(np.min(np.abs(w - ref)))
    assert errors[1] < 1e-9 and errors[2] < 1e-9
    assert errors[0] < 1e-4


@pytest.mark.parametrize("pair", [(0, 1), (1, 2), (2, 3)])
def test_spectrum_symmetric_under_conjugation(pair):
    got = values(pair, 2.3, (0, 3, -4, 4))
    for z in got:
        assert min(abs(z.conjugate() - w) for w in got) < 1e-6


def test_mu_oracle_for_pair_without_closed_form():
    bound = mu_oracle(BcPair(1, 1), math.pi / 2)
    assert bound.source == "oracle" and bound.kind == "exact"
    assert bound.value > 0


def test_single_equivalence_cell():
    case = equivalence_case((0, 2), 1.25 * math.pi)
    assert case.ok, case.to_dict()


# membership ----------------------------------------------------------------

@pytest.mark.parametrize("lam,expected", [(0.6, "member"), (0.3, "non_member"), (0.46, "inconclusive")])
def test_membership_examples(lam, expected):
    # threshold l - delta - 2/s = 1 + 0.5 - 1
    case = MembershipCase(1, 2.0, -0.5, lam)
    assert case.threshold == pytest.approx(0.5)
    assert membership_quadrature(case) == expected


def test_membership_rejects_bad_cases():
    with pytest.raises(ValueError):
        MembershipCase(1, 1.0, 0.0, 0.5)
    with pytest.raises(ValueError):
        MembershipCase(-1, 2.0, 0.0, 0.5)


def test_membership_small_suite():
    rows = membership_suite(count=20, seed=5)
    assert all(expected == got for _, expected, got in rows)


@pytest.mark.parametrize("gamma,expected", [(0.0, True), (None, True), (-0.6, False), (0.4, True)])
def test_weighted_integrability(gamma, expected):
    assert condg_check(gamma) is expected

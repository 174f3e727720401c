import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from polyreg.certificates import (CITATIONS, NO_RULE, WIDENS, CertificateError, StripCertificate,
                                  VertexConfig, _rule_cert, certify, certify_domain,
                                  check_closed_strip, combine, line_free, load_overrides, override)
from polyreg.geometry import load_domain, parse_domain

from conftest import DATA

F = Fraction


def cube_vertex(bcs=(0, 0, 0), convex=False, lipschitz=False, theta=math.pi / 2):
    edges = [((bcs[i], bcs[(i + 1) % 3]), theta, (i, (i + 1) % 3)) for i in range(3)]
    return VertexConfig.build("v", bcs, edges, convex, lipschitz)


def test_all_dirichlet_closed_strip():
    cert = certify(cube_vertex())
    assert (cert.re_lo, cert.re_hi, cert.lo_open, cert.hi_open) == (-1, 0, False, False)
    assert cert.citation == CITATIONS["R1"]


def test_convex_dirichlet_open_strip():
    cert = certify(cube_vertex(convex=True))
    assert (cert.re_lo, cert.re_hi, cert.lo_open, cert.hi_open) == (-2, 1, True, True)
    assert "R2" in cert.rule_id


def test_neumann_strip_with_exceptional_values():
    cert = certify(cube_vertex((3, 3, 3), lipschitz=True))
    assert (cert.re_lo, cert.re_hi) == (-1, 1)
    assert cert.exceptional_eigenvalues == (0, 1)
    assert cert.citation == CITATIONS["R3"]


def test_mixed_vertex_with_dirichlet_on_each_edge():
    cert = certify(cube_vertex((0, 1, 0)))
    assert cert.rule_id == "R4" and (cert.re_lo, cert.re_hi) == (-1, 0)


def test_slip_face_with_small_angles():
    cert = certify(cube_vertex((0, 0, 1), convex=True, theta=0.4 * math.pi))
    assert "R5" in cert.rule_id
    assert cert.covers(F(-1, 2)) and not cert.covers(1)


def test_no_rule():
    with pytest.raises(CertificateError, match="no applicable rule"):
        certify(cube_vertex((1, 2, 1)))
    assert NO_RULE.startswith("no applicable rule")


def test_neumann_without_lipschitz_attestation_has_no_rule():
    with pytest.raises(CertificateError):
        certify(cube_vertex((3, 3, 3)))


def test_citations_are_the_five_fixed_quotes():
    for bcs, kw in [((0, 0, 0), {}), ((0, 0, 0), {"convex": True}), ((3, 3, 3), {"lipschitz": True}),
                    ((0, 1, 0), {}), ((0, 0, 1), {"convex": True, "theta": 0.4 * math.pi})]:
        cert = certify(cube_vertex(bcs, **kw))
        for part in cert.citation.split(" | "):
            assert part in CITATIONS.values()


# overrides ------------------------------------------------------------------

def test_override_without_rule():
    user = StripCertificate(F(-7, 10), F(2, 5), True, True)
    got = override(None, user)
    assert got.rule_id == "user" and got.re_lo == F(-7, 10) and not got.notes


def test_override_wider_than_rule_warns():
    got = override(certify(cube_vertex()), StripCertificate(-2, 1, False, False))
    assert any(n.startswith(WIDENS) for n in got.notes)


def test_override_narrower_than_rule_is_silent():
    got = override(certify(cube_vertex()), StripCertificate(F(-1, 2), 0, False, False))
    assert not got.notes


@pytest.mark.parametrize("lo,hi", [(0, 0), (1, -1)])
def test_malformed_bounds(lo, hi):
    with pytest.raises(CertificateError, match="malformed bounds"):
        StripCertificate(lo, hi, False, False)


def test_exceptional_value_must_lie_in_strip():
    with pytest.raises(CertificateError):
        StripCertificate(-1, 0, False, False, (F(1, 2),))


def test_round_trip_and_override_file():
    cert = certify(cube_vertex((3, 3, 3), lipschitz=True))
    assert StripCertificate.from_dict(json.loads(json.dumps(cert.to_dict()))) == cert
    overrides = load_overrides(json.loads((DATA / "mixed_overrides.json").read_text()))
    assert set(overrides) == {"v000", "v001", "v010", "v011"}
    assert overrides["v000"].re_hi == F(-1, 2)


# line and strip checks ------------------------------------------------------

def test_line_free_examples():
    r1 = certify(cube_vertex())
    r2 = certify(cube_vertex(convex=True))
    r3 = certify(cube_vertex((3, 3, 3), lipschitz=True))
    assert line_free(r1, 0)
    assert not line_free(r3, 0)
    assert not line_free(r2, 1)
    assert line_free(r2, F(99, 100))


def test_neumann_lines_blocked_only_at_known_values():
    r3 = _rule_cert("R3", -1, 1, False, False, (0, 1))
    for k in range(-100, 101):
        x = F(k, 100)
        assert line_free(r3, x) == (x not in (0, 1))


def test_closed_strip_statuses():
    r3 = _rule_cert("R3", -1, 1, False, False, (0, 1))
    assert check_closed_strip(r3, F(-1, 2), F(-1, 10)).status == "free"
    assert check_closed_strip(r3, F(-1, 2), 0).status == "exceptional"
    assert check_closed_strip(_rule_cert("R1", -1, 0, False, False), F(-1, 2), F(1, 7)).status == "uncovered"


def test_combine_merges_overlapping_rules():
    merged = combine([_rule_cert("R1", -1, 0, False, False), _rule_cert("R2", -2, 1, True, True)])
    assert len(merged) == 1 and merged[0].rule_id == "R2"


fractions = st.fractions(min_value=-3, max_value=3, max_denominator=12)


@given(fractions, fractions, fractions, st.fractions(min_value=0, max_value=2, max_denominator=12))
def test_line_free_monotone_under_containment(a, b, x, pad):
    lo, hi = min(a, b), max(a, b)
    if lo == hi:
        return
    inner = StripCertificate(lo, hi, True, True)
    outer = StripCertificate(lo - pad, hi + pad, False, False)
    if line_free(inner, x):
        assert line_free(outer, x)


# whole domains ---------------------------------------------------------------

def test_certify_fixture_domains():
    certs, missing = certify_domain(load_domain(str(DATA / "cube_convex.json")))
    assert not missing and len(certs) == 8
    certs, missing = certify_domain(load_domain(str(DATA / "mixed_cube.json")))
    assert set(missing) == {"v000", "v001", "v010", "v011"}
    overrides = load_overrides(json.loads((DATA / "mixed_overrides.json").read_text()))
    certs, missing = certify_domain(load_domain(str(DATA / "mixed_cube.json")), overrides)
    assert not missing and certs["v000"].rule_id == "user"

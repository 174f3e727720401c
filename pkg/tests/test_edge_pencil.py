import math
import random

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conftest import bisect, reentrant_root
from polyreg.edge_pencil import (ARCCOS_QUARTER_3, BcPair, MuBound, RootFindingError, SearchBox,
                                 char_fn, char_fn_derivative, class_mu_bound, count_zeros,
                                 edge_strip_free, find_roots, mu, mu_over_samples,
                                 rule_mu_bound, select_mu)

CLOSED = [(0, 0), (3, 3), (0, 1), (0, 2), (0, 3)]


def reference_value(pair, theta, lam, literal=False):
    """The transcendental equations evaluated with mpmath at 30 digits."""
    mpmath.mp.dps = 30
    lam, th = mpmath.mpc(lam), mpmath.mpf(theta)
    a = lam * th
    key = tuple(sorted(pair))
    if key in ((0, 0), (3, 3)):
        return mpmath.sin(a) * (lam**2 * mpmath.sin(th)**2 - mpmath.sin(a)**2)
    if key == (0, 1):
        return mpmath.sin(a) * (lam * mpmath.sin(2 * th) + mpmath.sin(2 * a))
    out_of_plane = mpmath.sin(2 * a) if literal else mpmath.cos(a)
    if key == (0, 2):
        return out_of_plane * (lam * mpmath.sin(2 * th) - mpmath.sin(2 * a))
    return out_of_plane * (lam**2 * mpmath.sin(th)**2 - mpmath.cos(a)**2)


# characteristic functions ------------------------------------------------

def test_dirichlet_zero_at_two_for_right_angle():
    assert abs(char_fn(BcPair(0, 0), math.pi / 2, 2.0)) < 1e-14


def test_dirichlet_value_at_one_half():
    assert char_fn(BcPair(0, 0), math.pi / 2, 0.5).real == pytest.approx(-math.sqrt(2) / 8, abs=1e-15)


def test_unit_lambda_zeroes_second_factor():
    rng = random.Random(7)
    for _ in range(50):
        theta = rng.uniform(0.01, 2 * math.pi - 0.01)
        assert abs(char_fn(BcPair(0, 0), theta, 1.0)) < 1e-12


@pytest.mark.parametrize("pair", CLOSED)
@pytest.mark.parametrize("literal", [False, True])
def test_matches_high_precision_evaluation(pair, literal):
    rng = random.Random(hash((pair, literal)) & 0xFFFF)
    for _ in range(20):
        theta = rng.uniform(0.1, 2 * math.pi - 0.1)
        lam = complex(rng.uniform(-3, 4), rng.uniform(-3, 3))
        ref = complex(reference_value(pair, theta, lam, literal))
        got = char_fn(BcPair(*pair), theta, lam, literal)
        assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


@pytest.mark.parametrize("pair", CLOSED)
def test_derivative_against_finite_difference(pair):
    theta, lam, h = 2.1, complex(1.3, 0.4), 1e-6
    fd = (char_fn(BcPair(*pair), theta, lam + h) - char_fn(BcPair(*pair), theta, lam - h)) / (2 * h)
    assert abs(char_fn_derivative(BcPair(*pair), theta, lam) - fd) < 1e-6 * max(1, abs(fd))


@given(st.sampled_from(CLOSED), st.floats(0.05, 6.2), st.floats(-4, 4), st.floats(-4, 4))
def test_conjugation_of_values(pair, theta, re, im):
    z = complex(re, im)
    f = char_fn(BcPair(*pair), theta, z)
    g = char_fn(BcPair(*pair), theta, z.conjugate())
    assert abs(f.conjugate() - g) <= 1e-12 * max(1.0, abs(f))


def test_pair_without_closed_form_points_to_oracle():
    with pytest.raises(ValueError, match="use oracle module"):
        char_fn(BcPair(1, 1), 1.0, 0.5)


def test_angle_checked():
    with pytest.raises(ValueError, match="angle out of range"):
        char_fn(BcPair(0, 0), 2 * math.pi, 0.5)


def test_pair_ordering_irrelevant_for_spectrum():
    a = find_roots(BcPair(0, 3), 2.0, SearchBox(0, 3, -2, 2)).values()
    b = find_roots(BcPair(3, 0), 2.0, SearchBox(0, 3, -2, 2)).values()
    assert a == b


# counting and isolation --------------------------------------------------

@pytest.mark.parametrize("box,expected", [((0.9, 1.1, -0.1, 0.1), 1), ((1.9, 2.1, -0.1, 0.1), 1),
                                          ((2.2, 2.8, -0.5, 0.5), 0)])
def test_count_examples(box, expected):
    assert count_zeros(BcPair(0, 0), math.pi / 2, SearchBox(*box)) == expected


def test_right_angle_dirichlet_roots():
    spectrum = find_roots(BcPair(0, 0), math.pi / 2, SearchBox(0, 2.5, -1, 1))
    assert [round(z.real, 10) for z in spectrum.values()] == [1.0, 2.0]
    assert all(r.residual < 1e-10 * r.scale for r in spectrum.roots)


def test_reentrant_dirichlet_box_holds_four_roots():
    # both in-plane factors sin(3 pi x/2) -/+ x and the out-of-plane sin(3 pi x/2) contribute
    minus = reentrant_root()
    plus = bisect(lambda x: math.sin(1.5 * math.pi * x) + x, 0.8, 0.95)
    spectrum = find_roots(BcPair(0, 0), 1.5 * math.pi, SearchBox(0, 1, -1, 1))
    values = [z.real for z in spectrum.values()]
    assert values == pytest.approx([minus, 2 / 3, plus, 1.0], abs=1e-12)
    assert all(abs(z.imag) < 1e-12 for z in spectrum.values())
    assert min(values) == pytest.approx(minus, abs=1e-12) and minus < 2 / 3


def test_zero_kept_for_traction_pair():
    spectrum = find_roots(BcPair(3, 3), math.pi, SearchBox(-0.1, 0.1, -0.1, 0.1))
    assert any(abs(z) < 1e-12 for z in spectrum.values())
    assert not spectrum.excluded


def test_zero_excluded_for_dirichlet_pair():
    spectrum = find_roots(BcPair(0, 0), math.pi / 2, SearchBox(-0.1, 0.1, -0.1, 0.1))
    assert not spectrum.roots
    assert spectrum.excluded and spectrum.excluded[0].multiplicity == 3


def test_box_caps_enforced():
    with pytest.raises(ValueError, match="hard caps"):
        find_roots(BcPair(0, 0), 1.0, SearchBox(0, 12, -1, 1))


def test_multiple_root_detected():
    # (0,1) at 3pi/2: sin(lambda theta) and the in-plane factor share lambda = 2/3
    spectrum = find_roots(BcPair(0, 1), 1.5 * math.pi, SearchBox(0.5, 0.8, -0.2, 0.2))
    (root,) = spectrum.roots
    assert root.value.real == pytest.approx(2 / 3, abs=1e-10)
    assert root.multiplicity == 2


def test_literal_form_adds_only_integer_multiples_of_pi_over_theta():
    theta = 2.2
    box = SearchBox(0, 6, -3, 3)
    reduced = {round(z.real, 8) + 1j * round(z.imag, 8) for z in find_roots(BcPair(0, 2), theta, box).values()}
    from polyreg.edge_pencil import PencilSettings
    literal = find_roots(BcPair(0, 2), theta, box, settings=PencilSettings(literal=True))
    extra = [z for z in literal.values() if round(z.real, 8) + 1j * round(z.imag, 8) not in reduced]
    assert extra
    for z in extra:
        k = z.real * theta / math.pi
        assert abs(z.imag) < 1e-10 and abs(k - round(k)) < 1e-9


@settings(max_examples=25)
@given(st.sampled_from(CLOSED), st.floats(0.2, 6.0), st.floats(0.2, 3.0), st.floats(0.2, 4.0))
def test_spectrum_closed_under_conjugation(pair, theta, re_hi, im):
    spectrum = find_roots(BcPair(*pair), theta, SearchBox(0.0, re_hi, -im, im))
    vals = sorted(spectrum.values(), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    conj = sorted((z.conjugate() for z in vals), key=lambda z: (round(z.real, 9), round(z.imag, 9)))
    assert len(vals) == len(conj)
    for a, b in zip(vals, conj):
        assert abs(a - b) < 1e-9


@settings(max_examples=30)
@given(st.sampled_from(CLOSED), st.floats(0.2, 6.0), st.floats(-1.0, 2.5), st.floats(0.1, 2.0),
       st.floats(-4.0, 3.0), st.floats(0.1, 2.0))
def test_count_matches_multiplicities(pair, theta, re_lo, width, im_lo, height):
    box = SearchBox(re_lo, re_lo + width, im_lo, im_lo + height)
    spectrum = find_roots(BcPair(*pair), theta, box)
    total = sum(r.multiplicity for r in spectrum.roots + spectrum.excluded)
    assert count_zeros(BcPair(*pair), theta, box) == total == spectrum.count


# edge exponent -----------------------------------------------------------

@pytest.mark.parametrize("theta", [math.pi / 3, math.pi / 2, 2 * math.pi / 3, 0.9 * math.pi])
def test_dirichlet_closed_form(theta):
    bound = mu(BcPair(0, 0), theta)
    assert abs(bound.value - math.pi / theta) < 1e-10
    assert bound.source == "closed_form" and bound.kind == "exact"


def test_two_thirds_at_threshold_angle():
    assert mu(BcPair(0, 0), ARCCOS_QUARTER_3).value == pytest.approx(2 / 3, abs=1e-8)
    c = math.acos(0.25)
    assert abs(math.sin(2 * c) + (2 / 3) * math.sin(3 * c)) < 1e-15


def test_reentrant_exponent():
    bound = mu(BcPair(0, 0), 1.5 * math.pi)
    assert abs(bound.value - reentrant_root()) < 1e-10
    assert bound.source == "root_finder"


@pytest.mark.parametrize("pair", CLOSED)
def test_mu_agrees_with_strip_scan(pair):
    theta = 1.3
    bound = mu(BcPair(*pair), theta)
    vals = find_roots(BcPair(*pair), theta, SearchBox(0, 5, -20, 20)).values()
    assert bound.value == pytest.approx(select_mu(BcPair(*pair), theta, vals)[0], abs=1e-12)


def test_mu_over_samples_takes_infimum():
    bound = mu_over_samples(BcPair(0, 0), [1.0, 1.5 * math.pi, 2.0])
    assert bound.value == pytest.approx(reentrant_root(), abs=1e-10)


def test_mu_without_closed_form_uses_collocation():
    bound = mu(BcPair(1, 1), math.pi / 2)
    assert bound.source == "oracle"
    assert bound.value > 0


@given(st.floats(0.05, 2 * math.pi - 0.05))
@settings(max_examples=40)
def test_dirichlet_threshold_statements(theta):
    value = mu(BcPair(0, 0), theta).value
    assert value > 0.5
    if theta < ARCCOS_QUARTER_3:
        assert value > 2 / 3
    if theta < math.pi:
        assert value > 1
    if theta < 0.75 * math.pi:
        assert value > 4 / 3


@pytest.mark.parametrize("pair", CLOSED)
def test_rule_bounds_hold_below_their_angles(pair):
    rng = random.Random(11)
    for _ in range(12):
        theta = rng.uniform(0.1, 2 * math.pi - 0.1)
        rule = rule_mu_bound(BcPair(*pair), theta)
        if rule is None:
            continue
        assert rule.kind == "strict_lower_bound" and rule.source == "rule"
        assert mu(BcPair(*pair), theta).value > float(rule.value)


def test_class_bound_respects_angle_ceiling():
    assert class_mu_bound(BcPair(0, 0)).value == 0.5
    assert class_mu_bound(BcPair(0, 0), math.pi).value == 1
    assert class_mu_bound(BcPair(1, 1)) is None


def test_mixed_bounds_at_their_thresholds():
    assert mu(BcPair(0, 1), 1.5 * math.acos(0.25)).value == pytest.approx(2 / 3, abs=1e-9)
    assert mu(BcPair(0, 2), 0.75 * math.pi).value == pytest.approx(2 / 3, abs=1e-9)
    assert mu(BcPair(0, 1), 0.75 * math.pi).value < 2 / 3


def test_mu_bound_validation():
    with pytest.raises(ValueError):
        MuBound(0.0)
    with pytest.raises(ValueError):
        MuBound(1.0, kind="approximate")


# strip freedom -----------------------------------------------------------

def test_edge_strip_examples():
    assert edge_strip_free(BcPair(0, 0), math.pi / 2, 1.1, 1.9)
    assert not edge_strip_free(BcPair(0, 0), math.pi / 2, 0.9, 1.1)
    assert not edge_strip_free(BcPair(3, 3), math.pi / 2, -0.2, 0.2)

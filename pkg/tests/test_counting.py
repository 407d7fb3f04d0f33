"""Height-bounded rational enumeration and the certified counting harness."""

from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from wplab.cintervals import working_precision
from wplab.counting import (
    CONFIRMED,
    EXCLUDED,
    UNDETERMINED,
    Domain,
    ExpWpLog,
    Identity,
    RationalQ,
    classify_point,
    count_report,
    default_eps,
    enumerate_rationals,
    fit_log_counts,
    mpf_to_fraction,
)
from wplab.errors import InvalidConfiguration
from wplab.lattice_core import make_lattice
from wplab.quadfield import QuadNum

F = Fraction


def stern_brocot(height):
    """Independent enumeration oracle: expand the Stern-Brocot tree until
    both numerator and denominator exceed the bound."""
    out = []
    stack = [((0, 1), (1, 0))]
    while stack:
        (a, b), (c, d) = stack.pop()
        m = (a + c, b + d)
        if m[0] > height or m[1] > height:
            continue
        out.append(F(m[0], m[1]))
        stack.append(((a, b), m))
        stack.append((m, (c, d)))
    return sorted(out)


def test_enumeration_matches_stern_brocot():
    for h in (1, 2, 5, 12):
        ours = [r.value for r in enumerate_rationals(h, Domain(F(0), None))]
        assert ours == stern_brocot(h)


def test_enumeration_respects_domain():
    got = [r.value for r in enumerate_rationals(3, Domain(F(1, 2), F(2)))]
    assert got == [F(2, 3), F(1), F(3, 2)]
    assert F(1, 2) not in got  # open endpoints


def test_rationalq_invariants():
    assert RationalQ(3, 2).height == 3
    with pytest.raises(InvalidConfiguration):
        RationalQ(2, 4)
    with pytest.raises(InvalidConfiguration):
        RationalQ(-1, 2)


@given(st.integers(min_value=-10 ** 6, max_value=10 ** 6),
       st.integers(min_value=-40, max_value=40))
def test_mpf_to_fraction_exact(man, exp):
    x = mp.mpf(man) * mp.mpf(2) ** exp
    f = mpf_to_fraction(x)
    assert f == F(man) * F(2) ** exp


def test_classification_trichotomy():
    eps = F(1, 100)
    ident = Identity(Domain(F(0), None))
    exact_hit = classify_point(ident, RationalQ(1, 2), RationalQ(1, 2), eps)
    assert exact_hit.klass == CONFIRMED
    near = classify_point(ident, RationalQ(1, 2), RationalQ(1, 3), eps)
    assert near.klass == EXCLUDED
    borderline = classify_point(
        ident, RationalQ(1, 2), RationalQ(51, 100), eps
    )
    assert borderline.klass == EXCLUDED  # |diff| = eps, outside the open band
    from wplab.counting import _classify_enclosure

    assert _classify_enclosure(-eps / 2, 2 * eps, eps) == UNDETERMINED


def test_identity_counts():
    rep = count_report(Identity(Domain(F(0), None)), (2, 10))
    assert rep.counts == (3, 63)
    assert rep.undetermined == (0, 0)
    assert rep.fit is None  # two data points only


def test_schedule_must_increase():
    with pytest.raises(InvalidConfiguration):
        count_report(Identity(Domain(F(0), None)), (10, 2))


def test_fit_recovers_exponent():
    import math

    hs = [10, 100, 1000, 10 ** 4, 10 ** 5]
    counts = [round(2.0 * math.log(h) ** 3) for h in hs]
    c, k, ssr = fit_log_counts(hs, counts)
    assert abs(k - 3) < 0.05
    assert abs(c - 2) < 0.3
    assert ssr < 1e-3


RECT = make_lattice(QuadNum(1, 0, -1), QuadNum(0, 2, -1))


def test_composite_requires_rectangular():
    skew = make_lattice(QuadNum(1, 0, -1), QuadNum(F(1, 4), 2, -1))
    with pytest.raises(InvalidConfiguration):
        ExpWpLog(skew, Domain(F(11, 10), F(5, 2)))


def test_composite_pole_margin():
    # log-image of a domain containing 1 touches the pole at 0
    with pytest.raises(InvalidConfiguration):
        ExpWpLog(RECT, Domain(F(1, 2), F(2)))
    with pytest.raises(InvalidConfiguration):
        ExpWpLog(RECT, Domain(F(11, 10), None))  # unbounded


def test_composite_enclosures_nest_across_precision():
    h = ExpWpLog(RECT, Domain(F(11, 10), F(5, 2)))
    p = F(3, 2)
    lo1, hi1 = h.enclosure(p, 128)
    lo2, hi2 = h.enclosure(p, 256)
    assert lo1 < hi1 and lo2 < hi2
    assert lo1 <= lo2 and hi2 <= hi1  # higher precision only shrinks
    assert hi1 - lo1 < F(1, 2 ** 100)


def test_no_confirmed_excluded_flip_same_eps():
    h = ExpWpLog(RECT, Domain(F(11, 10), F(5, 2)))
    eps = default_eps(128)
    for p in enumerate_rationals(6, h.domain):
        for q in enumerate_rationals(6, Domain(F(0), None)):
            k1 = classify_point(h, p, q, eps, 128).klass
            k2 = classify_point(h, p, q, eps, 256).klass
            assert {k1, k2} != {CONFIRMED, EXCLUDED}


def test_count_report_composite_smoke():
    h = ExpWpLog(RECT, Domain(F(11, 10), F(5, 2)))
    rep = count_report(h, (3, 6), precision=128)
    assert rep.counts == (0, 0)
    assert rep.undetermined == (0, 0)

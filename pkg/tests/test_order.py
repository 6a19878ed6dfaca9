import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from autq.order import (
    BLOCKS3, INF, OMEGA3, OMEGA4, QLINE, UNIT, OrderError, Point, SubInterval,
    UniverseMismatch, compare, fmt_q, parse_q, star_add,
)
from conftest import points_of

UNIVERSES = [QLINE, UNIT, OMEGA4, OMEGA3, BLOCKS3]


def P(*c):
    return Point(OMEGA4, tuple(mpq(v) if i == 3 and v is not INF else v for i, v in enumerate(c)))


def test_compare_examples():
    assert compare(P(0, 0, 0, mpq(1, 2)), P(0, 0, 0, mpq(3, 4))) == -1
    assert compare(P(0, 0, 0, INF), P(0, 0, 1, -100)) == -1
    assert compare(P(1, -5, INF, INF), P(0, INF, INF, INF)) == 1


def test_compare_across_universes_raises():
    with pytest.raises(UniverseMismatch):
        compare(Point(QLINE, mpq(0)), P(0, 0, 0, 0))


def test_between_examples():
    assert QLINE.between(mpq(0), mpq(1)) == mpq(1, 2)
    assert OMEGA4.between((0, 0, 0, INF), (0, 0, 2, mpq(-1))) == (0, 0, 1, 0)
    r = OMEGA4.between((0, 0, 0, mpq(1, 3)), (0, 0, 0, mpq(1, 2)))
    assert r == (0, 0, 0, mpq(5, 12))


def test_between_rejects_unordered():
    with pytest.raises(OrderError):
        QLINE.between(mpq(1), mpq(1))


def test_above_below_examples():
    assert QLINE.above(mpq(7)) == 8
    assert OMEGA4.below((0, 0, 0, mpq(-1))) == (0, 0, 0, -2)
    assert OMEGA4.above((0, 0, 0, INF)) == (0, 0, 1, 0)


def test_enumeration_examples():
    assert [QLINE.enumerate(k) for k in range(3)] == [0, 1, -1]
    assert all(-1 < UNIT.enumerate(k) < 1 for k in range(2000))
    assert any(OMEGA4.enumerate(k) == (0, 0, 0, 0) for k in range(100))


@pytest.mark.parametrize("u", UNIVERSES, ids=lambda u: u.name)
def test_enumeration_injective_and_inverse(u):
    seen = {}
    for k in range(10_000):
        p = u.enumerate(k)
        assert u.contains(p)
        assert p not in seen
        seen[p] = k
        assert u.index_of(p) == k


def test_enumeration_covers_coarse_grid():
    # an independent enumeration: small fractions p/q by height
    coarse = []
    for h in itertools.count(1):
        for q in range(1, h + 1):
            for p in range(-h, h + 1):
                x = mpq(p, q)
                if x not in coarse:
                    coarse.append(x)
        if len(coarse) >= 100:
            break
    for x in coarse[:100]:
        assert QLINE.enumerate(QLINE.index_of(x)) == x
    for c in itertools.product([-1, 0, 1], [-1, 0, INF], [0, 2, INF], [mpq(0), mpq(-1, 2), INF]):
        assert OMEGA4.enumerate(OMEGA4.index_of(c)) == c


@pytest.mark.parametrize("u", UNIVERSES, ids=lambda u: u.name)
@given(data=st.data())
def test_order_axioms(u, data):
    a, b, c = (data.draw(points_of(u)) for _ in range(3))
    assert (a < b) + (a == b) + (b < a) == 1
    if a < b and b < c:
        assert a < c
    assert u.compare(a, b) == -u.compare(b, a)


@pytest.mark.parametrize("u", UNIVERSES, ids=lambda u: u.name)
@given(data=st.data())
def test_density_witnesses(u, data):
    a, b = data.draw(points_of(u)), data.draw(points_of(u))
    assert u.below(a) < a < u.above(a)
    assert u.contains(u.above(a)) and u.contains(u.below(a))
    if a != b:
        lo, hi = min(a, b), max(a, b)
        r = u.between(lo, hi)
        assert lo < r < hi and u.contains(r)
        assert u.between(lo, hi) == r


@pytest.mark.parametrize("u", UNIVERSES, ids=lambda u: u.name)
@given(data=st.data())
def test_text_round_trip(u, data):
    p = data.draw(points_of(u))
    assert u.parse(u.fmt(p)) == p


def test_blocks_top_point_orders_last():
    top = (3, INF, INF, INF)
    assert BLOCKS3.contains(top)
    assert not BLOCKS3.contains((3, INF, 0, INF))
    assert (3, INF, 7, mpq(1)) < top < (4, 0, 0, mpq(0))
    assert BLOCKS3.below(top) < top


def test_sub_interval():
    s = SubInterval(QLINE, mpq(-1), mpq(1))
    xs = [s.enumerate(k) for k in range(50)]
    assert all(-1 < x < 1 for x in xs) and len(set(xs)) == 50
    assert s.above(mpq(1, 2)) < 1 and s.below(mpq(-1, 2)) > -1
    assert s.index_of(xs[17]) == 17


def test_rational_text():
    assert fmt_q(mpq(-6, 4)) == "-3/2"
    assert fmt_q(mpq(2)) == "2/1"
    assert parse_q(" -3/2 ") == mpq(-3, 2)
    assert parse_q("5") == 5
    with pytest.raises(ValueError):
        parse_q("1/0")
    with pytest.raises(ValueError):
        parse_q("one")


def test_star_addition():
    assert star_add(INF, 5) is INF
    assert star_add(mpq(1, 2), 1) == mpq(3, 2)

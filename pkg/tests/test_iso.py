import random

import pytest
from gmpy2 import mpq
from hypothesis import given, strategies as st

from autq.iso import BackAndForth, IsoError, phi_block8, phi_blocks8, phi_main, psi
from autq.order import BLOCKS3, INF, OMEGA3, OMEGA4, QLINE, UNIT
from conftest import rationals


def test_psi_examples():
    p = psi()
    assert p.fwd(mpq(0)) == 0
    assert p.fwd(mpq(1, 2)) == 1
    assert p.bwd(mpq(-3)) == mpq(-3, 4)
    with pytest.raises(IsoError):
        p.fwd(mpq(1))


@given(rationals)
def test_psi_round_trip(y):
    x = psi().bwd(y)
    assert UNIT.contains(x) and psi().fwd(x) == y


def test_back_and_forth_anchors():
    b = BackAndForth(QLINE, QLINE, [(mpq(0), mpq(0))])
    assert b.fwd(mpq(0)) == 0
    b = BackAndForth(QLINE, QLINE, [(mpq(0), mpq(0)), (mpq(1), mpq(10))])
    for x in (mpq(1, 2), mpq(1, 3), mpq(3, 4), mpq(5, 7)):
        assert 0 < b.fwd(x) < 10


def test_back_and_forth_rejects_bad_anchors():
    with pytest.raises(IsoError):
        BackAndForth(QLINE, QLINE, [(mpq(0), mpq(5)), (mpq(1), mpq(2))])


def test_back_and_forth_into_omega4():
    b = BackAndForth(QLINE, OMEGA4)
    qs = [QLINE.enumerate(k) for k in range(200)]
    ims = [b.fwd(q) for q in qs]
    assert all(OMEGA4.contains(w) for w in ims)
    for q1, w1 in zip(qs, ims):
        for q2, w2 in zip(qs, ims):
            assert (q1 < q2) == (w1 < w2)
    # backward queries hit enumerated codomain points
    for k in range(100):
        w = OMEGA4.enumerate(k)
        assert b.fwd(b.bwd(w)) == w


def test_back_and_forth_is_deterministic_and_exportable():
    a, b = BackAndForth(QLINE, OMEGA3), BackAndForth(QLINE, OMEGA3)
    xs = [QLINE.enumerate(random.Random(i).randint(0, 3000)) for i in range(300)]
    assert [a.fwd(x) for x in xs] == [b.fwd(x) for x in xs]
    c = BackAndForth.load(a.export(), QLINE, OMEGA3)
    assert all(c.fwd(x) == a.fwd(x) for x in xs)


def test_phi_main_examples():
    phi = phi_main()
    assert phi.fwd(mpq(2)) == (0, INF, INF, INF)
    # (2, 3) sits below the slab of Omega_1
    w = phi.fwd(mpq(5, 2))
    assert (0, INF, INF, INF) < w < (1, 0, 0, -1)
    # 4 is the centre of block 1
    assert phi.fwd(mpq(4)) == (1, 0, 0, 0)


def test_phi_main_slab_structure():
    phi = phi_main()
    r = random.Random(2)
    for _ in range(200):
        n = r.randint(-50, 50)
        x = mpq(r.randint(-999, 999), 1000)
        assert phi.fwd(4 * n + x) == (n, 0, 0, x)
        assert phi.bwd((n, 0, 0, x)) == 4 * n + x
    assert phi.fwd(mpq(-1)) == (0, 0, 0, -1) or phi.fwd(mpq(-1)) == (0, 0, 0, mpq(-1))


@given(rationals)
def test_phi_main_shift_law(u):
    phi = phi_main()
    w = phi.fwd(u)
    assert phi.fwd(u + 4) == (w[0] + 1,) + w[1:]


@pytest.mark.parametrize("iso_factory,universe", [(phi_main, OMEGA4), (phi_blocks8, BLOCKS3)])
def test_block_isos_are_order_isomorphisms(iso_factory, universe):
    iso = iso_factory()
    r = random.Random(3)
    xs = sorted({mpq(r.randint(-5000, 5000), r.randint(1, 500)) for _ in range(3000)})
    ys = [iso.fwd(x) for x in xs]
    assert all(universe.contains(y) for y in ys)
    assert all(a < b for a, b in zip(ys, ys[1:]))
    assert [iso.bwd(y) for y in ys] == xs
    for k in range(3000):
        w = universe.enumerate(k)
        assert iso.fwd(iso.bwd(w)) == w


def test_block8_examples():
    assert OMEGA3.contains(phi_block8(0).fwd(mpq(1)))
    assert phi_block8(0).fwd(mpq(1)) == (0, 0, 0)
    for i in (-1, 0, 1):
        blk = phi_block8(i)
        assert blk.fwd(mpq(4 * i)) == (0, 0, -1)
        assert blk.fwd(mpq(4 * i + 2)) == (0, 0, 1)
        x = mpq(4 * i) + mpq(1, 3)
        assert blk.fwd(x) == (0, 0, mpq(1, 3) - 1)


def test_block8_order_within_block():
    blk = phi_block8(2)
    r = random.Random(4)
    for _ in range(100):
        a, b = (mpq(7) + mpq(r.randint(1, 3999), 1000) for _ in range(2))
        assert (a < b) == (blk.fwd(a) < blk.fwd(b))
        assert blk.bwd(blk.fwd(a)) == a


def test_blocks8_top_points():
    p8 = phi_blocks8()
    for i in (-2, 0, 5):
        assert p8.fwd(mpq(4 * i + 3)) == (i, INF, INF, INF)
        assert p8.fwd(mpq(4 * i + 1)) == (i, 0, 0, 0)


def test_fresh_constructions_agree():
    r = random.Random(5)
    xs = [mpq(r.randint(-10**6, 10**6), r.randint(1, 10**3)) for _ in range(1000)]
    a = [phi_main().fwd(x) for x in xs]
    from autq.iso import _BlockPeriodic, core_phi, core_phi_inv
    fresh = _BlockPeriodic(OMEGA4, "phi", 4, -2, core_phi, core_phi_inv)
    assert a == [fresh.fwd(x) for x in xs]

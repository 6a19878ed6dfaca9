import random
from functools import cmp_to_key

import pytest
from gmpy2 import mpq

from autq.auto import compose, conjugate, identity, inverse, power, translation, transport
from autq.construction8 import assemble_8letter, build_abc, in_omega0, verify_thm8
from autq.iso import psi
from autq.order import INF, OMEGA3, QLINE, UNIT
from autq.sampling import Sampler
from autq.words import words_w8
from conftest import qpoints, random_pl, random_unit_pl

UNIT_PTS = Sampler(4).unit(100)
OMEGA_PTS = Sampler(5).of(OMEGA3, 1000)
T1_UNIT = transport(psi().inverse(), translation(1))


def _bundle(seed=0, count=3):
    r = random.Random(seed)
    return build_abc([T1_UNIT] + [random_unit_pl(r) for _ in range(count - 1)])


def test_identity_targets_give_identity_a():
    bnd = build_abc([identity(UNIT)] * 3)
    assert all(bnd.a.fwd(p) == p for p in OMEGA_PTS)
    rep = verify_thm8(bnd, 2, UNIT_PTS, off_samples=OMEGA_PTS[:100])
    assert rep.verdict


@pytest.mark.parametrize("n", [1, 2, 3])
def test_conjugates_place_witnesses_on_the_fibre(n):
    bnd = _bundle()
    a, b, c = bnd.a, bnd.b, bnd.c
    x1 = conjugate(a, power(b, 1 - 2 * n))
    x2 = conjugate(a, compose(power(b, 2 * n), c))
    wit = bnd.witness(n)
    for x in UNIT_PTS:
        assert x1.fwd((0, 0, x)) == (0, 0, wit.v.fwd(x))
        assert x2.fwd((0, 0, x)) == (0, 0, wit.w.fwd(x))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_thm8_exact(n):
    bnd = _bundle()
    rep = verify_thm8(bnd, n, UNIT_PTS, off_samples=OMEGA_PTS[:200])
    assert rep.verdict, rep.failures()[:3]
    assert sum(1 for r in rep.records if "off" in r.check) >= 100


def test_thm8_translation_target():
    bnd = build_abc([T1_UNIT])
    word = bnd.assignment().evaluate(words_w8(1))
    for x in UNIT_PTS:
        assert word.fwd((0, 0, x)) == (0, 0, T1_UNIT.fwd(x))


def test_thm8_past_the_sequence_is_identity():
    bnd = _bundle(count=2)
    rep = verify_thm8(bnd, 5, UNIT_PTS, off_samples=OMEGA_PTS[:50])
    assert rep.verdict


def test_letters_monotone_and_invertible():
    bnd = _bundle(1)
    pts = sorted(OMEGA_PTS, key=cmp_to_key(OMEGA3.compare))
    for g in (bnd.a, bnd.b, bnd.c):
        imgs = [g.fwd(p) for p in pts]
        assert all(OMEGA3.compare(u, v) < 0 for u, v in zip(imgs, imgs[1:]))
        assert all(g.bwd(y) == p for p, y in zip(pts, imgs))


def test_letter_shapes():
    bnd = _bundle(2)
    for p in OMEGA_PTS:
        i, j, x = p
        if i is not INF:
            assert bnd.b.fwd(p) == (i + 1, j, x)
        if i == 0:
            assert bnd.c.fwd(p) == p
        if j != 0:
            assert bnd.a.fwd(p) == p
    assert bnd.c.fwd((1, 0, mpq(1, 2))) == (1, 1, mpq(1, 2))


@pytest.mark.parametrize("n", [1, 2])
def test_conjugate_supports_meet_only_in_the_fibre(n):
    bnd = _bundle(3)
    a, b, c = bnd.a, bnd.b, bnd.c
    x1 = conjugate(a, power(b, 1 - 2 * n))
    x2 = conjugate(a, compose(power(b, 2 * n), c))
    pts = OMEGA_PTS + [(i, j, x) for i in (-1, 0, 1) for j in (-1, 0, 1) for x in UNIT_PTS[:20]]
    for p in pts:
        if x1.fwd(p) != p and x2.fwd(p) != p:
            assert in_omega0(p)


def test_supplied_witnesses_are_checked():
    from autq.commutator import witnesses_in_interval
    good = witnesses_in_interval(T1_UNIT)
    bnd = build_abc([T1_UNIT], witnesses={1: good})
    assert bnd.witness(1) is good


# -- the whole 8-letter chain -------------------------------------------------


def test_assemble_identity():
    pts = qpoints(6, 40)
    asm = assemble_8letter([identity(QLINE)], pts)
    rep = asm.verify(pts)
    assert rep.verdict
    ev = asm.assignment.evaluate(asm.words[0])
    assert all(ev.fwd(x) == x for x in pts)


def test_assemble_translation():
    pts = qpoints(7, 40)
    rep = assemble_8letter([translation(1)], pts).verify(pts)
    assert rep.verdict, rep.failures()[:3]


def test_assemble_random_pl():
    pts = qpoints(8, 30)
    gs = [random_pl(random.Random(11)), translation(-2)]
    asm = assemble_8letter(gs, pts)
    assert asm.verify(pts).verdict
    assert set("".join(str(w) for w in asm.words)) & set("abcf") == set("abcf")


def test_assignment_universe():
    pts = qpoints(9, 10)
    asm = assemble_8letter([translation(1)], pts)
    assert asm.assignment.universe is QLINE
    assert all(inverse(asm.assignment["b"]).fwd(asm.assignment["b"].fwd(x)) == x for x in pts)

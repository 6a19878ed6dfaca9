import random

import pytest
from gmpy2 import mpq

from autq.auto import (
    CertificationError, PiecewiseLinear, Region, certify_support, compose, conjugate, identity,
    inverse, transport, translation,
)
from autq.commutator import (
    MissingCertificate, commutator_witnesses, extend_from_unit, dominating_positive, translation_conjugator,
    witnesses_in_interval,
)
from autq.iso import psi
from autq.order import UNIT
from conftest import random_pl, random_unit_pl

DOUBLE = PiecewiseLinear([], [2], [0])


def line_samples(n=200, seed=0):
    r = random.Random(seed)
    return [mpq(r.randint(-300, 300), r.randint(1, 25)) for _ in range(n)]


def unit_samples(n=200, seed=0):
    r = random.Random(seed)
    return [mpq(r.randint(-9999, 9999), 10000) for _ in range(n)]


def test_dominating_positive_examples():
    b, _ = dominating_positive(identity())
    assert all(b.fwd(y) == y + 1 for y in line_samples(50))
    b, _ = dominating_positive(translation(1))
    assert all(b.fwd(y) == y + 2 for y in line_samples(50))
    b, _ = dominating_positive(DOUBLE)
    assert b.fwd(mpq(0)) == 2 and b.fwd(mpq(-3)) == -2


def test_dominating_positive_properties():
    r = random.Random(1)
    for _ in range(10):
        u = random_pl(r)
        b, cert = dominating_positive(u)
        xs = line_samples(100, r.randint(0, 99))
        cert.check(xs)
        assert all(b.fwd(y) > u.fwd(y) for y in xs)
        a = compose(u, inverse(b))
        assert all(a.fwd(x) <= x - 1 for x in xs)


def test_translation_conjugator_examples():
    c = translation_conjugator(*dominating_positive(identity()))
    assert all(c.fwd(x) == x for x in line_samples(50))
    b2, _ = dominating_positive(translation(1))
    c = translation_conjugator(*dominating_positive(translation(1)))
    assert all(c.fwd(x) == 2 * x for x in line_samples(50))
    b, cert = dominating_positive(DOUBLE)
    c = translation_conjugator(b, cert)
    s_c = conjugate(translation(1), c)
    assert all(s_c.fwd(x) == b.fwd(x) and s_c.bwd(x) == b.bwd(x) for x in line_samples())


def test_translation_conjugator_requires_certificate():
    b, _ = dominating_positive(DOUBLE)
    with pytest.raises(MissingCertificate):
        translation_conjugator(b, None)
    _, other = dominating_positive(identity())
    with pytest.raises(MissingCertificate):
        translation_conjugator(b, other)


def test_witness_examples():
    w = commutator_witnesses(identity())
    assert w.check(line_samples(100)) == 100
    w = commutator_witnesses(translation(1))
    assert all(w.v.fwd(x) == x + 1 for x in line_samples(50))
    assert all(w.w.fwd(x) == 2 * x for x in line_samples(50))
    # x -> x-1 -> (x-1)/2 -> (x+1)/2 -> x+1
    c = compose(inverse(w.v), inverse(w.w), w.v, w.w)
    assert c.fwd(mpq(0)) == 1


def test_witnesses_for_random_pl_targets():
    r = random.Random(2)
    for i in range(50):
        u = random_pl(r)
        w = commutator_witnesses(u)
        assert w.check(line_samples(200, i)) == 200


def test_witnesses_in_interval_examples():
    ident = witnesses_in_interval(identity(UNIT))
    assert ident.v is identity(UNIT)
    shifted = transport(psi().inverse(), translation(1))
    w = witnesses_in_interval(shifted)
    assert w.check(unit_samples()) == 200
    assert all(-1 < w.v.fwd(x) < 1 for x in unit_samples(50))


def test_witnesses_in_interval_random_targets():
    r = random.Random(3)
    inside = Region("(-1, 1)", lambda x: -1 < x < 1)
    wide = [3 * x for x in unit_samples(100)]
    for i in range(10):
        u = random_unit_pl(r)
        w = witnesses_in_interval(u)
        assert w.check(unit_samples(200, i)) == 200
        for g in (w.v, w.w):
            ext = extend_from_unit(g)
            certify_support(ext, inside, wide)
            assert all(ext.bwd(ext.fwd(x)) == x for x in wide)


def test_failed_check_names_witness():
    w = commutator_witnesses(translation(1))
    bogus = type(w)(translation(2), w.v, w.w)
    with pytest.raises(CertificationError) as e:
        bogus.check([mpq(5)])
    assert e.value.witness == 5

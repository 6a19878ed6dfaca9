import random

import pytest
from hypothesis import given, settings, strategies as st

from autq.auto import commutator, compose, conjugate, identity, inverse, translation
from autq.construction2 import build_bundle, eq1_words
from autq.order import OMEGA4, QLINE
from autq.sampling import Sampler
from autq.words import (
    Assignment, Comm, Conj, Gen, Pow, Prod, WordError, evaluate, flatten, free_reduce, inverse_word,
    is_positive, letter_counts, parse_word, reduce_letters, substitute, two_letter_encode, words_t,
    words_w2, words_w8,
)
from conftest import qpoints, random_pl

PTS = qpoints(3, 60)


def _same(g, h, pts=PTS):
    return all(g.fwd(x) == h.fwd(x) for x in pts)


# -- text form --------------------------------------------------------------


def _display_factor(i, j):
    """Factor j (1..4) of group i in the printed 8-letter sequence."""
    k = 4 * i + j
    return f"[a^(b^-{2 * k - 1}), a^(b^{2 * k} c)]^(f^{(2, 4, 3, 5)[j - 1]})"


@pytest.mark.parametrize("n", range(1, 9))
def test_w8_goldens(n):
    assert str(words_w8(n)) == f"[a^(b^-{2 * n - 1}), a^(b^{2 * n} c)]"


def test_w8_first_two():
    assert str(words_w8(1)) == "[a^(b^-1), a^(b^2 c)]"
    assert str(words_w8(2)) == "[a^(b^-3), a^(b^4 c)]"


@pytest.mark.parametrize("n", range(1, 5))
def test_t_matches_grouped_pattern(n):
    expected = " ".join(_display_factor(i, j)
                        for i in range(3 * n * (n - 1), 3 * n * (n + 1)) for j in range(1, 5))
    assert str(words_t(n, words_w8)) == expected


def test_t_ranges():
    assert len(words_t(1, words_w8).parts) == 6 * 4
    assert len(words_t(2, words_w8).parts) == 12 * 4


def test_w2_golden():
    assert str(words_w2(1)) == (
        "[(g g^(f^-12))^((g^(f^-4))^1 g^(f^-28)), (g g^(f^-12))^((g^(f^-4))^-1)]")
    assert letter_counts(words_w2(3)).keys() == {"f", "g"}


@pytest.mark.parametrize("n", range(1, 6))
def test_w2_has_no_trivial_cancellation(n):
    w = words_w2(n)
    assert free_reduce(w) is w


def test_free_reduce_cancels():
    assert free_reduce(parse_word("a a^-1 b")) == parse_word("b")
    assert reduce_letters(parse_word("[a, a]")) == []


def test_empty_word_rejected():
    with pytest.raises(WordError, match="empty word"):
        parse_word("")
    with pytest.raises(WordError):
        parse_word("a^(")


_letters = st.sampled_from([Gen(x) for x in "abcf"])
_words = st.recursive(
    _letters,
    lambda inner: st.one_of(
        st.builds(lambda xs: Prod(*xs), st.lists(inner, min_size=2, max_size=3)),
        st.builds(Pow, inner, st.integers(-5, 5).filter(lambda k: k not in (0, 1))),
        st.builds(Conj, inner, inner),
        st.builds(Comm, inner, inner),
    ),
    max_leaves=8,
)


@given(_words)
def test_parse_round_trip(w):
    assert list(flatten(parse_word(str(w)))) == list(flatten(w))
    assert parse_word(str(w)).length == w.length


@given(_words)
def test_inverse_word_cancels(w):
    assert reduce_letters(Prod(w, inverse_word(w))) == []


# -- substitution -----------------------------------------------------------


def test_encode_g():
    assert str(two_letter_encode(parse_word("g"))) == "F^48 H"


def test_encode_f_inverse():
    assert str(two_letter_encode(parse_word("f^-1"))) == "H H F^48 H F^96 H F^47"


def test_identity_substitution():
    w = words_w8(3)
    assert list(flatten(substitute(w, {x: Gen(x) for x in "abc"}))) == list(flatten(w))


def test_encoding_is_positive():
    w = two_letter_encode(words_w2(2))
    assert is_positive(w)
    assert set(letter_counts(w)) == {"F", "H"}


def test_encode_rejects_other_letters():
    with pytest.raises(WordError):
        two_letter_encode(parse_word("a"))


# -- evaluation -------------------------------------------------------------


def test_eval_ab():
    g = evaluate(parse_word("a b"), {"a": translation(1), "b": translation(2)})
    assert _same(g, translation(3))


def test_eval_commutator_of_equal_letters():
    a = random_pl(random.Random(1))
    assert _same(evaluate(parse_word("[a, a]"), {"a": a}), identity(QLINE))


def test_eval_conjugation():
    r = random.Random(2)
    a, b = random_pl(r), random_pl(r)
    lhs = evaluate(parse_word("a^b"), {"a": a, "b": b})
    assert _same(lhs, compose(inverse(b), a, b))


def test_eval_unassigned_letter():
    with pytest.raises(WordError):
        evaluate(parse_word("a z"), {"a": translation(1)})


@settings(max_examples=30)
@given(_words, _words, st.integers(0, 2**31))
def test_eval_homomorphism(w1, w2, seed):
    r = random.Random(seed)
    asg = Assignment({x: random_pl(r) for x in "abcf"})
    lhs = asg.evaluate(Prod(w1, w2))
    rhs = compose(asg.evaluate(w1), asg.evaluate(w2))
    assert _same(lhs, rhs, PTS[:20])


def test_eval_comm_and_conj_match_auto():
    r = random.Random(5)
    a, b = random_pl(r), random_pl(r)
    asg = {"a": a, "b": b}
    assert _same(evaluate(parse_word("[a, b]"), asg), commutator(a, b))
    assert _same(evaluate(parse_word("a^(b^2)"), asg), conjugate(a, compose(b, b)))


# the encoding only preserves values when g satisfies the relator, so the
# bundle generator is used
_BUNDLE = build_bundle([identity(OMEGA4)])
_OMEGA_PTS = Sampler(9).of(OMEGA4, 100)
_fg = st.recursive(
    st.sampled_from([Gen("f"), Gen("g")]),
    lambda inner: st.one_of(
        st.builds(lambda xs: Prod(*xs), st.lists(inner, min_size=2, max_size=3)),
        st.builds(Pow, inner, st.integers(-3, 3).filter(lambda k: k not in (0, 1))),
        st.builds(Conj, inner, inner),
    ),
    max_leaves=5,
)


@settings(max_examples=15)
@given(_fg)
def test_encoding_preserves_values(w):
    lhs = _BUNDLE.assignment().evaluate(w)
    rhs = _BUNDLE.semigroup_assignment().evaluate(two_letter_encode(w))
    assert all(lhs.fwd(p) == rhs.fwd(p) for p in _OMEGA_PTS)


@pytest.mark.parametrize("letter", ["g^-1", "f^-1"])
def test_encoded_inverses(letter):
    lhs = _BUNDLE.assignment().evaluate(parse_word(letter))
    rhs = _BUNDLE.semigroup_assignment().evaluate(two_letter_encode(parse_word(letter)))
    assert all(lhs.fwd(p) == rhs.fwd(p) for p in _OMEGA_PTS)


# -- the staged construction agrees with the one-shot product ---------------


@pytest.mark.parametrize("m", [4, 8])
def test_eq1_words_freely_equal(m):
    inner = lambda k: Gen(f"w{k}")  # noqa: E731
    staged = eq1_words(3, inner, m)
    for n, w in enumerate(staged, 1):
        assert reduce_letters(w) == reduce_letters(words_t(n, inner, m))


def test_eq1_words_evaluate_the_same():
    r = random.Random(7)
    gens = {f"w{k}": random_pl(r) for k in range(1, 4 * 6 + 1)}
    gens["f"] = translation(1)
    inner = lambda k: Gen(f"w{k}")  # noqa: E731
    asg = Assignment(gens)
    assert _same(asg.evaluate(eq1_words(1, inner, 4)[0]), asg.evaluate(words_t(1, inner, 4)))

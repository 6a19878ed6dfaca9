"""Group and semigroup words as immutable trees.

Nodes: :class:`Gen` (a letter), :class:`Prod`, :class:`Pow`, :class:`Conj`
(``x^y = y^-1 x y``) and :class:`Comm` (``[x, y] = x^-1 y^-1 x y``).
Nothing is reduced implicitly; lengths and letter counts are computed on the
tree without expanding it.  Subtrees are shared freely, which keeps the very
long substituted words small in memory.

Text form: ``[a^(b^-3), a^(b^4 c)]``; products are space separated,
``x^k`` is a power, ``x^(w)`` or ``x^y`` a conjugate.
"""
from __future__ import annotations

import re
from collections import Counter
from functools import lru_cache
from typing import Iterator, Mapping

from .auto import Automorphism, compose, conjugate, commutator, identity, inverse, power, transport

__all__ = [
    "Word", "Gen", "Prod", "Pow", "Conj", "Comm", "WordError", "parse_word", "Assignment",
    "ConjugatedAssignment", "TransportedAssignment", "evaluate", "substitute", "inverse_word",
    "flatten", "free_reduce", "reduce_letters", "letters", "is_positive", "words_w8",
    "words_w2", "words_t", "two_letter_encode", "TWO_LETTER_RULES", "letter_counts",
    "expanded_text",
]


class WordError(ValueError):
    pass


class Word:
    __slots__ = ("_hash", "_len")

    def _key(self):
        raise NotImplementedError

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(other) is not type(self) or hash(other) != hash(self):
            return False
        return self._key() == other._key()

    def __setattr__(self, name, value):
        raise AttributeError("words are immutable")

    def __mul__(self, other):
        return Prod(self, other)

    def __pow__(self, k):
        return Pow(self, k)

    def __xor__(self, by):
        return Conj(self, by)

    def __len__(self):
        return self.length

    @property
    def length(self) -> int:
        try:
            return self._len
        except AttributeError:
            n = self._length()
            object.__setattr__(self, "_len", n)
            return n

    def __str__(self):
        return self.text()

    def __repr__(self):
        return f"Word({self.text()!r})"


def _init(obj, **kw):
    for k, v in kw.items():
        object.__setattr__(obj, k, v)


class Gen(Word):
    __slots__ = ("letter",)

    def __init__(self, letter: str):
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", letter):
            raise WordError(f"bad letter {letter!r}")
        _init(self, letter=letter)

    def _key(self):
        return (self.letter,)

    def _length(self):
        return 1

    def text(self):
        return self.letter


class Prod(Word):
    __slots__ = ("parts",)

    def __init__(self, *parts: Word):
        if len(parts) == 1 and isinstance(parts[0], (list, tuple)):
            parts = tuple(parts[0])
        if not parts:
            raise WordError("empty product (the semigroup has no empty word)")
        _init(self, parts=tuple(parts))

    def _key(self):
        return self.parts

    def _length(self):
        return sum(p.length for p in self.parts)

    def text(self):
        return " ".join(_atom(p) if isinstance(p, Prod) else p.text() for p in self.parts)


class Pow(Word):
    __slots__ = ("base", "k")

    def __init__(self, base: Word, k: int):
        _init(self, base=base, k=int(k))

    def _key(self):
        return (self.base, self.k)

    def _length(self):
        return abs(self.k) * self.base.length

    def text(self):
        return f"{_atom(self.base)}^{self.k}"


class Conj(Word):
    """``base^by = by^-1 base by``."""

    __slots__ = ("base", "by")

    def __init__(self, base: Word, by: Word):
        _init(self, base=base, by=by)

    def _key(self):
        return (self.base, self.by)

    def _length(self):
        return self.base.length + 2 * self.by.length

    def text(self):
        by = self.by.text() if isinstance(self.by, Gen) else f"({self.by.text()})"
        return f"{_atom(self.base)}^{by}"


class Comm(Word):
    """``[x, y] = x^-1 y^-1 x y``."""

    __slots__ = ("x", "y")

    def __init__(self, x: Word, y: Word):
        _init(self, x=x, y=y)

    def _key(self):
        return (self.x, self.y)

    def _length(self):
        return 2 * (self.x.length + self.y.length)

    def text(self):
        return f"[{self.x.text()}, {self.y.text()}]"


def _atom(w: Word) -> str:
    if isinstance(w, (Gen, Comm)):
        return w.text()
    return f"({w.text()})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<int>[+-]?\d+)|(?P<id>[A-Za-z][A-Za-z0-9_]*)|(?P<sym>[()\[\],^]))")


def _tokenize(s: str):
    pos, out = 0, []
    s = s.rstrip()
    while pos < len(s):
        m = _TOKEN.match(s, pos)
        if not m or m.end() == pos:
            raise WordError(f"unexpected character at {pos} in {s!r}")
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return out


def parse_word(s: str) -> Word:
    """Parse the text form produced by ``str(word)``."""
    toks = _tokenize(s)
    if not toks:
        raise WordError("empty word (the semigroup has no empty word)")
    i = 0

    def peek():
        return toks[i] if i < len(toks) else (None, None, len(s))

    def expect(sym):
        nonlocal i
        kind, val, at = peek()
        if val != sym:
            raise WordError(f"expected {sym!r} at {at} in {s!r}")
        i += 1

    def product():
        parts = [term()]
        while peek()[0] == "id" or peek()[1] in ("(", "["):
            parts.append(term())
        return parts[0] if len(parts) == 1 else Prod(*parts)

    def term():
        nonlocal i
        w = atom()
        while peek()[1] == "^":
            i += 1
            kind, val, at = peek()
            if kind == "int":
                i += 1
                w = Pow(w, int(val))
            elif kind == "id":
                i += 1
                w = Conj(w, Gen(val))
            elif val == "(":
                i += 1
                by = product()
                expect(")")
                w = Conj(w, by)
            else:
                raise WordError(f"bad exponent at {at} in {s!r}")
        return w

    def atom():
        nonlocal i
        kind, val, at = peek()
        if kind == "id":
            i += 1
            return Gen(val)
        if val == "(":
            i += 1
            w = product()
            expect(")")
            return w
        if val == "[":
            i += 1
            x = product()
            expect(",")
            y = product()
            expect("]")
            return Comm(x, y)
        raise WordError(f"unexpected {val!r} at {at} in {s!r}")

    w = product()
    if i != len(toks):
        raise WordError(f"trailing input at {toks[i][2]} in {s!r}")
    return w


# ---------------------------------------------------------------------------
# structure


def inverse_word(w: Word) -> Word:
    if isinstance(w, Gen):
        return Pow(w, -1)
    if isinstance(w, Pow):
        return w.base if w.k == -1 else Pow(w.base, -w.k)
    if isinstance(w, Prod):
        return Prod(*[inverse_word(p) for p in reversed(w.parts)])
    if isinstance(w, Conj):
        return Conj(inverse_word(w.base), w.by)
    if isinstance(w, Comm):
        return Comm(w.y, w.x)
    raise TypeError(w)


def flatten(w: Word, sign: int = 1) -> Iterator[tuple[str, int]]:
    """Signed letter runs, in order; adjacent runs of one letter and one sign merge."""
    run_letter, run_exp = None, 0
    for letter, e in _raw(w, sign):
        if letter == run_letter and (e > 0) == (run_exp > 0):
            run_exp += e
            continue
        if run_letter is not None:
            yield run_letter, run_exp
        run_letter, run_exp = letter, e
    if run_letter is not None:
        yield run_letter, run_exp


def _raw(w: Word, sign: int):
    if isinstance(w, Gen):
        yield w.letter, sign
    elif isinstance(w, Pow):
        s = sign if w.k > 0 else -sign
        if isinstance(w.base, Gen):
            if w.k:
                yield w.base.letter, s * abs(w.k)
        else:
            for _ in range(abs(w.k)):
                yield from _raw(w.base, s)
    elif isinstance(w, Prod):
        parts = w.parts if sign > 0 else reversed(w.parts)
        for p in parts:
            yield from _raw(p, sign)
    elif isinstance(w, Conj):
        yield from _raw(w.by, -1)
        yield from _raw(w.base, sign)
        yield from _raw(w.by, 1)
    elif isinstance(w, Comm):
        x, y = (w.x, w.y) if sign > 0 else (w.y, w.x)
        yield from _raw(x, -1)
        yield from _raw(y, -1)
        yield from _raw(x, 1)
        yield from _raw(y, 1)
    else:
        raise TypeError(w)


def reduce_letters(w: Word) -> list[tuple[str, int]]:
    """Fully freely reduced letter runs (expands the word; use on short words)."""
    out: list[list] = []
    for letter, e in flatten(w):
        if out and out[-1][0] == letter:
            out[-1][1] += e
            if out[-1][1] == 0:
                out.pop()
        else:
            out.append([letter, e])
    return [tuple(r) for r in out]


def free_reduce(w: Word) -> Word:
    """Tree-level free reduction.

    Cancels adjacent siblings ``x x^-1`` inside products, merges adjacent
    powers of one base and drops zero powers.  Structure (conjugates,
    commutators, printed exponents) is otherwise left alone.
    """
    if isinstance(w, Gen):
        return w
    if isinstance(w, Pow):
        b = free_reduce(w.base)
        return w if b is w.base else Pow(b, w.k)
    if isinstance(w, Conj):
        b, by = free_reduce(w.base), free_reduce(w.by)
        return w if (b is w.base and by is w.by) else Conj(b, by)
    if isinstance(w, Comm):
        x, y = free_reduce(w.x), free_reduce(w.y)
        return w if (x is w.x and y is w.y) else Comm(x, y)
    stack: list[tuple[Word, int, Word | None]] = []   # (base, exponent, untouched original)
    for p in w.parts:
        p = free_reduce(p)
        base, k = (p.base, p.k) if isinstance(p, Pow) else (p, 1)
        if k == 0:
            continue
        orig = p
        if stack and stack[-1][0] == base:
            k += stack.pop()[1]
            orig = None
            if k == 0:
                continue
        stack.append((base, k, orig))
    parts = [o if o is not None else (b if k == 1 else Pow(b, k)) for b, k, o in stack]
    if not parts:
        raise WordError("word reduces to the empty word")
    if len(parts) == len(w.parts) and all(a is b for a, b in zip(parts, w.parts)):
        return w
    return parts[0] if len(parts) == 1 else Prod(*parts)


def letters(w: Word) -> set[str]:
    return set(letter_counts(w))


@lru_cache(maxsize=200_000)
def _counts(w: Word) -> tuple:
    if isinstance(w, Gen):
        return ((w.letter, 1),)
    c: Counter = Counter()
    if isinstance(w, Pow):
        for k, v in _counts(w.base):
            c[k] += abs(w.k) * v
    elif isinstance(w, Prod):
        for p in w.parts:
            for k, v in _counts(p):
                c[k] += v
    elif isinstance(w, Conj):
        for k, v in _counts(w.base):
            c[k] += v
        for k, v in _counts(w.by):
            c[k] += 2 * v
    elif isinstance(w, Comm):
        for part in (w.x, w.y):
            for k, v in _counts(part):
                c[k] += 2 * v
    return tuple(sorted(c.items()))


def letter_counts(w: Word) -> dict[str, int]:
    """Occurrences of each letter in the expanded word, computed on the tree."""
    return dict(_counts(w))


def is_positive(w: Word) -> bool:
    """True when the expanded word has only positive exponents (a semigroup word)."""
    if isinstance(w, Gen):
        return True
    if isinstance(w, Pow):
        return w.k > 0 and is_positive(w.base)
    if isinstance(w, Prod):
        return all(is_positive(p) for p in w.parts)
    return False


def expanded_text(w: Word) -> Iterator[str]:
    """Tokens of the expanded form: letter runs as ``F^48``, ``H``, ``a^-1``."""
    for letter, e in flatten(w):
        yield letter if e == 1 else f"{letter}^{e}"


# ---------------------------------------------------------------------------
# substitution


def substitute(w: Word, rules: Mapping[str, Word]) -> Word:
    """Replace letters by words.

    A rule keyed ``"x^-1"`` overrides the inverse of the ``"x"`` rule for
    negative occurrences.  Shared subtrees stay shared.
    """
    memo: dict = {}

    def image(letter, sign):
        if sign < 0 and f"{letter}^-1" in rules:
            return rules[f"{letter}^-1"]
        try:
            r = rules[letter]
        except KeyError:
            raise WordError(f"no substitution rule for letter {letter!r}") from None
        return r if sign > 0 else inverse_word(r)

    def go(v: Word, sign: int) -> Word:
        key = (id(v), sign)
        hit = memo.get(key)
        if hit is not None:
            return hit[1]
        if isinstance(v, Gen):
            out = image(v.letter, sign)
        elif isinstance(v, Pow):
            s = sign if v.k > 0 else -sign
            inner = go(v.base, s)
            out = inner if abs(v.k) == 1 else Pow(inner, abs(v.k))
        elif isinstance(v, Prod):
            parts = v.parts if sign > 0 else tuple(reversed(v.parts))
            out = Prod(*[go(p, sign) for p in parts])
        elif isinstance(v, Conj):
            out = Prod(go(v.by, -1), go(v.base, sign), go(v.by, 1))
        elif isinstance(v, Comm):
            x, y = (v.x, v.y) if sign > 0 else (v.y, v.x)
            out = Prod(go(x, -1), go(y, -1), go(x, 1), go(y, 1))
        else:
            raise TypeError(v)
        memo[key] = (v, out)
        return out

    return go(w, 1)


_F, _H = Gen("F"), Gen("H")
_F48, _F96, _F47 = Pow(_F, 48), Pow(_F, 96), Pow(_F, 47)

#: f -> F, g -> F^48 H, g^-1 -> H F^48 H F^96 H, f^-1 -> H H F^48 H F^96 H F^47  (H stands for f^-48 g)
TWO_LETTER_RULES = {
    "f": _F,
    "g": Prod(_F48, _H),
    "g^-1": Prod(_H, _F48, _H, _F96, _H),
    "f^-1": Prod(_H, _H, _F48, _H, _F96, _H, _F47),
}


def two_letter_encode(w: Word) -> Word:
    """Rewrite a word over {f, g} as a positive word over {F, H}."""
    extra = letters(w) - {"f", "g"}
    if extra:
        raise WordError(f"two-letter encoding needs a word over f, g; found {sorted(extra)}")
    return substitute(w, TWO_LETTER_RULES)


# ---------------------------------------------------------------------------
# the explicit word families


_a, _b, _c, _f, _g = (Gen(x) for x in "abcfg")


def words_w8(n: int) -> Word:
    """``[a^(b^(1-2n)), a^(b^(2n) c)]``."""
    if n < 1:
        raise ValueError("n >= 1")
    return Comm(Conj(_a, Pow(_b, 1 - 2 * n)), Conj(_a, Prod(Pow(_b, 2 * n), _c)))


def words_w2(n: int) -> Word:
    """``[(g g^(f^-12))^((g^(f^-4))^n g^(f^-28)), (g g^(f^-12))^((g^(f^-4))^-n)]``."""
    if n < 1:
        raise ValueError("n >= 1")
    pair = Prod(_g, Conj(_g, Pow(_f, -12)))
    step = Conj(_g, Pow(_f, -4))
    return Comm(Conj(pair, Prod(Pow(step, n), Conj(_g, Pow(_f, -28)))),
                Conj(pair, Pow(step, -n)))


def words_t(n: int, inner, m: int = 4, f: Word = _f) -> Word:
    """Outer product over i = 3n(n-1) .. 3n(n+1)-1 of

    ``prod_{j=1..m/2} w_{mi+j}^(f^2j) * prod_{j=1..m/2} w_{mi+m/2+j}^(f^(2j+1))``

    where ``inner(k)`` is the word w_k.  With m = 4 the exponents cycle 2, 4, 3, 5.
    """
    if n < 1:
        raise ValueError("n >= 1")
    if m % 2 or m < 4:
        raise ValueError("m must be an even integer >= 4")
    half = m // 2
    parts = []
    for i in range(3 * n * (n - 1), 3 * n * (n + 1)):
        for j in range(1, half + 1):
            parts.append(Conj(inner(m * i + j), Pow(f, 2 * j)))
        for j in range(1, half + 1):
            parts.append(Conj(inner(m * i + half + j), Pow(f, 2 * j + 1)))
    return Prod(*parts)


# ---------------------------------------------------------------------------
# evaluation


class Assignment:
    """Letters to automorphisms of one universe."""

    def __init__(self, mapping: Mapping[str, Automorphism]):
        if not mapping:
            raise WordError("empty assignment")
        self.mapping = dict(mapping)
        us = {g.universe for g in self.mapping.values()}
        if len(us) != 1:
            raise WordError("all assigned automorphisms must share one universe")
        self.universe = us.pop()
        self._memo: dict = {}

    def __getitem__(self, letter):
        try:
            return self.mapping[letter]
        except KeyError:
            raise WordError(f"letter {letter!r} is not assigned") from None

    def evaluate(self, w: Word) -> Automorphism:
        hit = self._memo.get(w)
        if hit is not None:
            return hit
        if isinstance(w, Gen):
            out = self[w.letter]
        elif isinstance(w, Pow):
            out = power(self.evaluate(w.base), w.k)
        elif isinstance(w, Prod):
            out = compose(*[self.evaluate(p) for p in w.parts])
        elif isinstance(w, Conj):
            out = conjugate(self.evaluate(w.base), self.evaluate(w.by))
        elif isinstance(w, Comm):
            out = commutator(self.evaluate(w.x), self.evaluate(w.y))
        else:
            raise TypeError(w)
        self._memo[w] = out
        return out


class TransportedAssignment(Assignment):
    """``letter -> transport(iso, base[letter])``; words evaluate on the base side, then transport."""

    def __init__(self, iso, base: Assignment):
        self.iso, self.base = iso, base
        self.universe = iso.codomain
        self.mapping = {k: transport(iso, v) for k, v in base.mapping.items()}
        self._memo = {}

    def evaluate(self, w: Word) -> Automorphism:
        hit = self._memo.get(w)
        if hit is None:
            hit = self._memo[w] = transport(self.iso, self.base.evaluate(w))
        return hit


class ConjugatedAssignment(Assignment):
    """``letter -> base[letter]^by``; a word evaluates to ``base(word)^by``."""

    def __init__(self, by: Automorphism, base: Assignment):
        self.by, self.base = by, base
        self.universe = base.universe
        self.mapping = {k: conjugate(v, by) for k, v in base.mapping.items()}
        self._memo = {}

    def evaluate(self, w: Word) -> Automorphism:
        hit = self._memo.get(w)
        if hit is None:
            hit = self._memo[w] = conjugate(self.base.evaluate(w), self.by)
        return hit


def evaluate(w: Word, asg: Assignment | Mapping[str, Automorphism]) -> Automorphism:
    if not isinstance(asg, Assignment):
        asg = Assignment(asg)
    return asg.evaluate(w)

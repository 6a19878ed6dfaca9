"""Exact rationals, star-adjoined values and the countable dense orders we act on.

Points are plain Python values so that the evaluation hot path never allocates
wrapper objects: a point of ``QLINE`` or ``UNIT`` is an ``mpq``, a point of a
lexicographic universe is a tuple whose coordinates are ``int``/``mpq`` or the
:data:`INF` sentinel.  :class:`Point` wraps a value together with its universe
for callers that want universe-checked comparisons.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import total_ordering

from gmpy2 import mpq, mpz

__all__ = [
    "INF", "Rational", "Q", "is_inf", "fmt_q", "parse_q", "floor_q", "ceil_q",
    "star_add", "Universe", "QLINE", "UNIT", "OMEGA4", "OMEGA3", "BLOCKS3",
    "SubInterval", "Point", "UniverseMismatch", "OrderError", "universe_by_name",
]

Rational = type(mpq(0))


class OrderError(ValueError):
    """A precondition on ordered data was violated (e.g. ``between(p, q)`` with p >= q)."""


class UniverseMismatch(TypeError):
    pass


class _Infinity:
    """The adjoined maximum of a star order ``X* = X + {inf}``."""

    __slots__ = ()

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __eq__(self, other):
        return other is self

    def __ne__(self, other):
        return other is not self

    def __hash__(self):
        return 0x1F1F1F

    def __repr__(self):
        return "inf"

    def __reduce__(self):
        return (_infinity, ())


def _infinity():
    return INF


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


def Q(x, d=None) -> Rational:
    """Coerce ``x`` (int, mpq, Fraction or ``"p/q"`` string) to an exact rational."""
    if d is not None:
        if d == 0:
            raise ZeroDivisionError("zero denominator")
        return mpq(x, d)
    if isinstance(x, str):
        return parse_q(x)
    return mpq(x)


_RAT_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_q(s: str) -> Rational:
    m = _RAT_RE.match(s)
    if not m:
        raise ValueError(f"malformed rational {s!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"malformed rational {s!r}: zero denominator")
    return mpq(num, den)


def fmt_q(x) -> str:
    """Bit-exact ``"p/q"`` text form (``inf`` for the star top)."""
    if x is INF:
        return "inf"
    if isinstance(x, (int, type(mpz(0)))):
        return f"{int(x)}/1"
    x = mpq(x)
    return f"{int(x.numerator)}/{int(x.denominator)}"


def floor_q(x) -> int:
    x = mpq(x)
    return int(x.numerator // x.denominator)


def ceil_q(x) -> int:
    x = mpq(x)
    return -int((-x.numerator) // x.denominator)


def star_add(x, r):
    """``x + r`` on a star order: the top element absorbs translations."""
    return x if x is INF else x + r


# ---------------------------------------------------------------------------
# enumerations of the coordinate domains


def _zenum(k: int) -> int:
    if k == 0:
        return 0
    return (k + 1) // 2 if k % 2 else -(k // 2)


def _zindex(z: int) -> int:
    z = int(z)
    if z == 0:
        return 0
    return 2 * z - 1 if z > 0 else -2 * z


def _calkin_wilf(n: int) -> Rational:
    # n >= 1; (fusc(n), fusc(n+1)) read off the binary expansion of n
    x, y = 1, 1
    for bit in bin(n)[3:]:
        if bit == "0":
            y = x + y
        else:
            x = x + y
    return mpq(x, y)


def _calkin_wilf_index(q: Rational) -> int:
    a, b = int(q.numerator), int(q.denominator)
    bits = []
    while (a, b) != (1, 1):
        if a < b:
            # left child a/(a+b) of a/(b-a); runs of left moves collapse
            k = (b - 1) // a
            bits.append("0" * k)
            b -= k * a
        else:
            k = (a - 1) // b
            bits.append("1" * k)
            a -= k * b
    return int("1" + "".join(reversed(bits)), 2)


def _qenum(k: int) -> Rational:
    if k == 0:
        return mpq(0)
    if k % 2:
        return _calkin_wilf((k + 1) // 2)
    return -_calkin_wilf(k // 2)


def _qindex(x) -> int:
    x = mpq(x)
    if x == 0:
        return 0
    if x > 0:
        return 2 * _calkin_wilf_index(x) - 1
    return 2 * _calkin_wilf_index(-x)


def _unpair(k: int) -> tuple[int, int]:
    w = (math.isqrt(8 * k + 1) - 1) // 2
    t = w * (w + 1) // 2
    y = k - t
    return w - y, y


def _pair(x: int, y: int) -> int:
    return (x + y) * (x + y + 1) // 2 + y


_KIND_ENUM = {
    "Z": (_zenum, _zindex),
    "Q": (_qenum, _qindex),
}


def _coord_enum(kind: str, k: int):
    base, _ = _KIND_ENUM[kind.rstrip("*")]
    if not kind.endswith("*"):
        return base(k)
    if k == 0:
        return base(0)
    if k == 1:
        return INF
    return base(k - 1)


def _coord_index(kind: str, v) -> int:
    _, index = _KIND_ENUM[kind.rstrip("*")]
    if not kind.endswith("*"):
        return index(v)
    if v is INF:
        return 1
    i = index(v)
    return 0 if i == 0 else i + 1


def _split(k: int, n: int) -> list[int]:
    # balanced pairing tree so small coordinates get small indices
    if n == 1:
        return [k]
    a, b = _unpair(k)
    h = n // 2
    return _split(a, h) + _split(b, n - h)


def _join(idx: list[int]) -> int:
    if len(idx) == 1:
        return idx[0]
    h = len(idx) // 2
    return _pair(_join(idx[:h]), _join(idx[h:]))


# ---------------------------------------------------------------------------
# universes


class Universe:
    """A countable dense linear order without endpoints, with canonical witnesses."""

    name = "?"

    def contains(self, p) -> bool:
        raise NotImplementedError

    def check(self, p):
        if not self.contains(p):
            raise UniverseMismatch(f"{p!r} is not a point of {self.name}")
        return p

    def compare(self, p, q) -> int:
        self.check(p)
        self.check(q)
        return (p > q) - (p < q)

    def between(self, p, q):
        raise NotImplementedError

    def above(self, p):
        raise NotImplementedError

    def below(self, p):
        raise NotImplementedError

    def enumerate(self, k: int):
        raise NotImplementedError

    def index_of(self, p) -> int:
        raise NotImplementedError

    def fmt(self, p) -> str:
        raise NotImplementedError

    def parse(self, s: str):
        raise NotImplementedError

    def __repr__(self):
        return self.name

    def __reduce__(self):
        return (universe_by_name, (self.name,))


class _QLine(Universe):
    name = "QLine"

    def contains(self, p):
        return isinstance(p, (Rational, int)) and not isinstance(p, bool)

    def between(self, p, q):
        if not p < q:
            raise OrderError(f"between needs p < q, got {fmt_q(p)} >= {fmt_q(q)}")
        return (mpq(p) + q) / 2

    def above(self, p):
        return mpq(p) + 1

    def below(self, p):
        return mpq(p) - 1

    def enumerate(self, k):
        if k < 0:
            raise ValueError("index must be >= 0")
        return _qenum(k)

    def index_of(self, p):
        return _qindex(p)

    def fmt(self, p):
        return fmt_q(p)

    def parse(self, s):
        return parse_q(s)


class _UnitInterval(_QLine):
    """(-1, 1) intersected with Q."""

    name = "UnitInterval"

    def contains(self, p):
        return super().contains(p) and -1 < p < 1

    def above(self, p):
        return (mpq(p) + 1) / 2

    def below(self, p):
        return (mpq(p) - 1) / 2

    def enumerate(self, k):
        y = _qenum(k)
        return y / (1 + abs(y))

    def index_of(self, p):
        p = mpq(p)
        return _qindex(p / (1 - abs(p)))

    def parse(self, s):
        return self.check(parse_q(s))


def _coord_ok(kind, v) -> bool:
    if v is INF:
        return kind.endswith("*")
    if kind[0] == "Z":
        return isinstance(v, int) and not isinstance(v, bool)
    return isinstance(v, (Rational, int)) and not isinstance(v, bool)


class LexUniverse(Universe):
    """A finite lexicographic product of Z, Z*, Q* coordinates."""

    def __init__(self, name: str, kinds: tuple[str, ...]):
        self.name = name
        self.kinds = kinds
        self.arity = len(kinds)

    def contains(self, p):
        return (
            isinstance(p, tuple)
            and len(p) == self.arity
            and all(_coord_ok(k, v) for k, v in zip(self.kinds, p))
        )

    def _zeros(self, start):
        return tuple(mpq(0) if k[0] == "Q" else 0 for k in self.kinds[start:])

    def _coord_between(self, k, a, b):
        kind = self.kinds[k]
        if b is INF:
            return a + 1
        if kind[0] == "Z":
            return (a + b) // 2 if b - a >= 2 else None
        return (a + b) / 2

    def _above_tail(self, p, s):
        for idx in range(self.arity - 1, s - 1, -1):
            if p[idx] is not INF:
                return p[s:idx] + (p[idx] + 1,) + self._zeros(idx + 1)
        return None

    def _below_tail(self, p, s):
        last = p[-1]
        if last is INF:
            return p[s:-1] + (mpq(0),)
        return p[s:-1] + (last - 1,)

    def between(self, p, q):
        if not p < q:
            raise OrderError(f"between needs p < q, got {self.fmt(p)} >= {self.fmt(q)}")
        k = next(i for i in range(self.arity) if p[i] != q[i])
        v = self._coord_between(k, p[k], q[k])
        if v is not None:
            return p[:k] + (v,) + self._zeros(k + 1)
        t = self._above_tail(p, k + 1)
        if t is not None:
            return p[: k + 1] + t
        return q[: k + 1] + self._below_tail(q, k + 1)

    def above(self, p):
        return self._above_tail(p, 0)

    def below(self, p):
        return self._below_tail(p, 0)

    def enumerate(self, k):
        if k < 0:
            raise ValueError("index must be >= 0")
        idx = _split(k, self.arity)
        return tuple(_coord_enum(kind, i) for kind, i in zip(self.kinds, idx))

    def index_of(self, p):
        return _join([_coord_index(kind, v) for kind, v in zip(self.kinds, p)])

    def fmt(self, p):
        return "(" + ", ".join(
            "inf" if v is INF else (str(v) if self.kinds[i][0] == "Z" else fmt_q(v))
            for i, v in enumerate(p)
        ) + ")"

    def parse(self, s):
        s = s.strip()
        if not (s.startswith("(") and s.endswith(")")):
            raise ValueError(f"malformed point {s!r}")
        parts = [t.strip() for t in s[1:-1].split(",")]
        if len(parts) != self.arity:
            raise ValueError(f"{self.name} points have {self.arity} coordinates: {s!r}")
        out = []
        for kind, t in zip(self.kinds, parts):
            if t == "inf":
                if not kind.endswith("*"):
                    raise ValueError(f"inf not allowed in a {kind} coordinate: {s!r}")
                out.append(INF)
            elif kind[0] == "Z":
                out.append(int(t))
            else:
                out.append(parse_q(t))
        return self.check(tuple(out))


class _Blocks3(LexUniverse):
    """Z x (Omega3 + top): one copy of Z x Z* x Q* per block, each capped by a top point.

    The top of block ``b`` is ``(b, inf, inf, inf)``; no other point has an
    infinite second coordinate.
    """

    def __init__(self):
        super().__init__("Blocks3", ("Z", "Z*", "Z*", "Q*"))

    def contains(self, p):
        if not super().contains(p):
            return False
        if p[1] is INF:
            return p[2] is INF and p[3] is INF
        return True

    def _below_tail(self, p, s):
        if p[1] is INF and s <= 1:
            return p[s:1] + (0, 0, mpq(0))
        return super()._below_tail(p, s)

    def enumerate(self, k):
        b, inner = _unpair(k)
        blk = _zenum(b)
        if inner == 0:
            return (blk, INF, INF, INF)
        return (blk,) + OMEGA3.enumerate(inner - 1)

    def index_of(self, p):
        inner = 0 if p[1] is INF else OMEGA3.index_of(p[1:]) + 1
        return _pair(_zindex(p[0]), inner)


class SubInterval(Universe):
    """Open interval (lo, hi) of a parent universe; ``None`` means unbounded."""

    def __init__(self, parent: Universe, lo=None, hi=None):
        if lo is not None and hi is not None and not lo < hi:
            raise OrderError("empty sub-interval")
        self.parent, self.lo, self.hi = parent, lo, hi
        lo_s = "-" if lo is None else parent.fmt(lo)
        hi_s = "+" if hi is None else parent.fmt(hi)
        self.name = f"SubInterval({parent.name}, {lo_s}, {hi_s})"
        self._enum_cache: list = []
        self._enum_pos = 0

    def contains(self, p):
        return (
            self.parent.contains(p)
            and (self.lo is None or self.lo < p)
            and (self.hi is None or p < self.hi)
        )

    def between(self, p, q):
        return self.parent.between(p, q)

    def above(self, p):
        return self.parent.above(p) if self.hi is None else self.parent.between(p, self.hi)

    def below(self, p):
        return self.parent.below(p) if self.lo is None else self.parent.between(self.lo, p)

    def enumerate(self, k):
        while len(self._enum_cache) <= k:
            x = self.parent.enumerate(self._enum_pos)
            self._enum_pos += 1
            if self.contains(x):
                self._enum_cache.append(x)
        return self._enum_cache[k]

    def index_of(self, p):
        self.check(p)
        k = 0
        while self.enumerate(k) != p:
            k += 1
        return k

    def fmt(self, p):
        return self.parent.fmt(p)

    def parse(self, s):
        return self.check(self.parent.parse(s))

    def __reduce__(self):
        return (SubInterval, (self.parent, self.lo, self.hi))


QLINE = _QLine()
UNIT = _UnitInterval()
OMEGA4 = LexUniverse("Omega4", ("Z", "Z*", "Z*", "Q*"))
OMEGA3 = LexUniverse("Omega3", ("Z", "Z*", "Q*"))
BLOCKS3 = _Blocks3()

_BY_NAME = {u.name: u for u in (QLINE, UNIT, OMEGA4, OMEGA3, BLOCKS3)}


def universe_by_name(name: str) -> Universe:
    try:
        return _BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown universe {name!r}") from None


@total_ordering
@dataclass(frozen=True)
class Point:
    """A value tagged with its universe; comparisons across universes raise."""

    universe: Universe
    value: object

    def __post_init__(self):
        self.universe.check(self.value)

    def _same(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        if other.universe is not self.universe:
            raise UniverseMismatch(f"cannot compare {self.universe} with {other.universe}")
        return True

    def __lt__(self, other):
        if self._same(other) is NotImplemented:
            return NotImplemented
        return self.value < other.value

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return self.universe is other.universe and self.value == other.value

    def __hash__(self):
        return hash((self.universe.name, self.value))

    def __str__(self):
        return self.universe.fmt(self.value)


def compare(p: Point, q: Point) -> int:
    p._same(q)
    return p.universe.compare(p.value, q.value)

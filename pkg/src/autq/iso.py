"""Order-isomorphisms between the universes of :mod:`autq.order`.

* :func:`psi` is the closed form ``x -> x/(1-|x|)`` from (-1, 1) onto Q.
* :class:`BackAndForth` is Cantor's construction made lazy and deterministic.
* :func:`phi_main` (Q onto Omega4) and :func:`phi_blocks8` (Q onto Blocks3)
  are closed-form and periodic.  Each block of length 4 is sent to one value of
  the first coordinate through one fixed core map, so translating by 4 on Q
  becomes a shift of the first coordinate.

The fibre maps below need an order-isomorphism from Z* x Z* x Q* onto
(0, 1] n Q.  We split (0, 1] at the irrational cut 1/sqrt(2): finite second
coordinates fill the rationals below the cut, and the top coordinate fills
those above it.  The two pieces are PL interpolations of dyadic sequences
converging to the cut.
"""
from __future__ import annotations

import bisect
from functools import lru_cache
from math import isqrt
from typing import Callable

from gmpy2 import mpq

from .order import (
    BLOCKS3, INF, OMEGA3, OMEGA4, QLINE, UNIT, OrderError, Universe, UniverseMismatch,
    ceil_q, floor_q,
)

__all__ = [
    "OrderIso", "FunctionIso", "InverseIso", "ComposeIso", "BackAndForth", "psi",
    "phi_main", "phi_blocks8", "phi_block8", "core_phi", "IsoError",
]


class IsoError(ValueError):
    pass


class OrderIso:
    """Base class: an order-isomorphism ``domain -> codomain``."""

    domain: Universe
    codomain: Universe
    name = "iso"
    translation_law: Callable | None = None

    def fwd(self, x):
        raise NotImplementedError

    def bwd(self, y):
        raise NotImplementedError

    def forward(self, x):
        self.domain.check(x)
        return self.fwd(x)

    def backward(self, y):
        self.codomain.check(y)
        return self.bwd(y)

    def inverse(self) -> "OrderIso":
        inv = self.__dict__.get("_inverse")
        if inv is None:
            inv = self._inverse = InverseIso(self)
        return inv

    def __repr__(self):
        return f"<OrderIso {self.name}: {self.domain} -> {self.codomain}>"


class FunctionIso(OrderIso):
    def __init__(self, domain, codomain, fwd, bwd, name="iso"):
        self.domain, self.codomain, self.name = domain, codomain, name
        self.fwd, self.bwd = fwd, bwd


class InverseIso(OrderIso):
    def __init__(self, inner: OrderIso):
        self.inner = inner
        self.domain, self.codomain = inner.codomain, inner.domain
        self.name = f"{inner.name}^-1"

    def fwd(self, x):
        return self.inner.bwd(x)

    def bwd(self, y):
        return self.inner.fwd(y)

    def inverse(self):
        return self.inner


class ComposeIso(OrderIso):
    """Apply ``first``, then ``second``."""

    def __init__(self, first: OrderIso, second: OrderIso):
        if first.codomain is not second.domain:
            raise UniverseMismatch(f"cannot chain {first} into {second}")
        self.first, self.second = first, second
        self.domain, self.codomain = first.domain, second.codomain
        self.name = f"{first.name};{second.name}"

    def fwd(self, x):
        return self.second.fwd(self.first.fwd(x))

    def bwd(self, y):
        return self.first.bwd(self.second.bwd(y))


# ---------------------------------------------------------------------------
# psi


class _Psi(OrderIso):
    domain, codomain, name = UNIT, QLINE, "psi"

    def fwd(self, x):
        if not -1 < x < 1:
            raise IsoError(f"psi is defined on (-1, 1), got {x}")
        return x / (1 - abs(x))

    def bwd(self, y):
        return y / (1 + abs(y))


_PSI = _Psi()


def psi() -> OrderIso:
    """(-1, 1) n Q onto Q, ``x -> x/(1-|x|)``."""
    return _PSI


# ---------------------------------------------------------------------------
# back and forth


class BackAndForth(OrderIso):
    """Lazy Cantor back-and-forth between two countable dense orders without endpoints.

    Steps alternate sides.  A step takes the least-index unmapped element of
    that side's enumeration and sends it to the canonical point (``between``,
    ``above`` or ``below``) of the gap formed by its mapped neighbours.
    Queries extend the table until the queried point is mapped, so a query
    costs on the order of the point's enumeration index.  That index grows
    exponentially with the continued-fraction size of a rational, which is
    why the pipeline uses the closed-form block isos instead.
    """

    def __init__(self, domain: Universe, codomain: Universe, anchors=(), name="back-and-forth"):
        self.domain, self.codomain, self.name = domain, codomain, name
        self._dom: list = []   # sorted domain points
        self._img: list = []   # their images, hence also sorted
        self._fmap: dict = {}
        self._bmap: dict = {}
        self._order: list = []  # insertion order, for export
        self._next = [0, 0]
        self._side = 0
        pairs = sorted(anchors, key=lambda p: p[0])
        for (x0, y0), (x1, y1) in zip(pairs, pairs[1:]):
            if not (x0 < x1 and y0 < y1):
                raise IsoError(f"anchors {domain.fmt(x0)}->{codomain.fmt(y0)} and "
                               f"{domain.fmt(x1)}->{codomain.fmt(y1)} are not order-compatible")
        for x, y in pairs:
            domain.check(x)
            codomain.check(y)
            self._insert(x, y)

    def _insert(self, x, y):
        i = bisect.bisect_left(self._dom, x)
        self._dom.insert(i, x)
        self._img.insert(i, y)
        self._fmap[x] = y
        self._bmap[y] = x
        self._order.append((x, y))

    @staticmethod
    def _target(u: Universe, seq: list, other: list, p):
        i = bisect.bisect_left(seq, p)
        lo = other[i - 1] if i > 0 else None
        hi = other[i] if i < len(other) else None
        if lo is not None and hi is not None:
            return u.between(lo, hi)
        if lo is not None:
            return u.above(lo)
        if hi is not None:
            return u.below(hi)
        return u.enumerate(0)

    def _step(self):
        side = self._side
        self._side ^= 1
        if side == 0:
            u, known = self.domain, self._fmap
        else:
            u, known = self.codomain, self._bmap
        k = self._next[side]
        while u.enumerate(k) in known:
            k += 1
        self._next[side] = k + 1
        p = u.enumerate(k)
        if side == 0:
            self._insert(p, self._target(self.codomain, self._dom, self._img, p))
        else:
            self._insert(self._target(self.domain, self._img, self._dom, p), p)

    def fwd(self, x):
        while x not in self._fmap:
            self._step()
        return self._fmap[x]

    def bwd(self, y):
        while y not in self._bmap:
            self._step()
        return self._bmap[y]

    def __len__(self):
        return len(self._order)

    def export(self) -> str:
        """Mapped pairs in construction order, one ``x -> y`` per line."""
        lines = [f"# {self.name}: {self.domain.name} -> {self.codomain.name}"]
        lines += [f"{self.domain.fmt(x)} -> {self.codomain.fmt(y)}" for x, y in self._order]
        return "\n".join(lines) + "\n"

    @classmethod
    def load(cls, text: str, domain: Universe, codomain: Universe, name="back-and-forth"):
        """Rebuild an iso anchored on an exported table."""
        pairs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                a, b = line.split("->")
                pairs.append((domain.parse(a), codomain.parse(b)))
            except ValueError as e:
                raise IsoError(f"line {lineno}: {e}") from None
        return cls(domain, codomain, pairs, name)


# ---------------------------------------------------------------------------
# the fibre iso  Z* x Z* x Q*  ->  (0, 1]


def _below_cut(s) -> bool:
    """``s < 1/sqrt(2)`` for rational s."""
    return s <= 0 or 2 * s.numerator ** 2 < s.denominator ** 2


@lru_cache(maxsize=None)
def _lower_level(k: int):
    # dyadic lower approximations of the cut, strictly increasing in k
    j = k + 4
    return mpq(isqrt(2 ** (2 * j - 1)) - 1, 2 ** j)


@lru_cache(maxsize=None)
def _upper_level(k: int):
    j = k + 4
    return mpq(isqrt(2 ** (2 * j - 1)) + 2, 2 ** j)


def _level_value(level, n: int):
    """Value at the integer ``n >= 1``, interpolating level k across ``[2^k, 2^(k+1))``."""
    k = n.bit_length() - 1
    lo, hi = level(k), level(k + 1)
    return lo + (hi - lo) * mpq(n - (1 << k), 1 << k)


def _level_locate(level, s, increasing: bool) -> int:
    """Least n >= 1 with s strictly before the value at n+1 (in the sequence direction)."""
    def past(v):
        return v > s if increasing else v < s

    k = 0
    while not past(level(k + 1)):
        k += 1
    lo, hi = 1 << k, 1 << (k + 1)   # value(lo) not past s, value(hi) past s
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if past(_level_value(level, mid)):
            hi = mid
        else:
            lo = mid
    return lo


def _S(y):
    """Q onto (0, cut) n Q, increasing."""
    if y <= 0:
        return _lower_level(0) / (1 - y)
    n = floor_q(y)
    a = _level_value(_lower_level, n + 1)
    if y == n:
        return a
    b = _level_value(_lower_level, n + 2)
    return a + (y - n) * (b - a)


def _S_inv(s):
    l0 = _lower_level(0)
    if s <= l0:
        return 1 - l0 / s
    m = _level_locate(_lower_level, s, True)
    a, b = _level_value(_lower_level, m), _level_value(_lower_level, m + 1)
    return (m - 1) + (s - a) / (b - a)


def _D(y):
    """[0, inf) onto (cut, 1], decreasing, D(0) = 1."""
    if y <= 1:
        return 1 + y * (_upper_level(0) - 1)
    n = floor_q(y)
    a = _level_value(_upper_level, n)
    if y == n:
        return a
    b = _level_value(_upper_level, n + 1)
    return a + (y - n) * (b - a)


def _D_inv(s):
    u0 = _upper_level(0)
    if s >= u0:
        return (1 - s) / (1 - u0)
    m = _level_locate(_upper_level, s, False)
    a, b = _level_value(_upper_level, m), _level_value(_upper_level, m + 1)
    return m + (a - s) / (a - b)


def _G(n, t):
    """Z* x (0, 1]  ->  (0, 1], lexicographic."""
    if n is INF:
        return _D(1 / t - 1)
    return _S(n - 1 + t)


def _G_inv(s):
    if _below_cut(s):
        y = _S_inv(s)
        n = ceil_q(y)
        return n, y - n + 1
    return INF, 1 / (1 + _D_inv(s))


def _u3(x):
    return mpq(1) if x is INF else (x / (1 + abs(x)) + 1) / 2


def _u3_inv(r):
    if r == 1:
        return INF
    x = 2 * r - 1
    return x / (1 - abs(x))


def _t(j, m, x):
    return _G(j, _G(m, _u3(x)))


def _t_inv(s):
    j, r = _G_inv(s)
    m, r2 = _G_inv(r)
    return (j, m, _u3_inv(r2))


# ---------------------------------------------------------------------------
# phi_main: Q -> Omega4

_A = _t(0, 0, mpq(-1))
_B = _t(0, 0, mpq(1))


def core_phi(u):
    """(-2, 2] n Q onto Z* x Z* x Q*, with -1, 1, 2 sent to (0,0,-1), (0,0,1), (inf,inf,inf)."""
    if -1 < u < 1:
        return (0, 0, u)
    if u <= -1:
        return _t_inv(_A * (u + 2))
    return _t_inv(_B + (u - 1) * (1 - _B))


def core_phi_inv(tau):
    j, m, x = tau
    if j == 0 and m == 0 and x is not INF and -1 < x < 1:
        return x
    s = _t(j, m, x)
    if tau <= (0, 0, -1):
        return s / _A - 2
    return 1 + (s - _B) / (1 - _B)


def _shift_first(universe: Universe, k: int, name: str):
    from .auto import FiberMap

    def f(w):
        return (w[0] + k,) + w[1:]

    def b(w):
        return (w[0] - k,) + w[1:]

    return FiberMap(universe, f"{name}{k:+d}", f, b,
                    power=lambda e: _shift_first(universe, k * e, name) if k * e else None)


class _BlockPeriodic(OrderIso):
    """``u -> (n, core(u - period*n))`` with n chosen so ``u - period*n`` lies in ``(lo, lo+period]``."""

    domain = QLINE

    def __init__(self, codomain, name, period, lo, core, core_inv):
        self.codomain, self.name = codomain, name
        self.period, self.lo = period, lo
        self.core, self.core_inv = core, core_inv
        self._shifts = {}

    def fwd(self, u):
        n = ceil_q((u - self.lo - self.period) / self.period)
        return (n,) + self.core(u - self.period * n)

    def bwd(self, w):
        return self.period * w[0] + self.core_inv(w[1:])

    def translation_law(self, r):
        """Translation by a multiple of the period is a first-coordinate shift."""
        q, rem = divmod(r, self.period)
        if rem != 0:
            return None
        q = int(q)
        if q not in self._shifts:
            self._shifts[q] = _shift_first(self.codomain, q, "shift1")
        return self._shifts[q]


_PHI_MAIN = _BlockPeriodic(OMEGA4, "phi", 4, -2, core_phi, core_phi_inv)


def phi_main() -> OrderIso:
    """Q onto Omega4.  (4n-1, 4n+1) goes to {n} x {0} x {0} x (-1, 1) by ``u -> (n, 0, 0, u - 4n)``."""
    return _PHI_MAIN


# ---------------------------------------------------------------------------
# phi_blocks8: Q -> Blocks3, one Omega3 per block (4i-1, 4i+3), plus a top point at 4i+3


def _chi(w):
    """Omega3 onto Q."""
    j, m, x = w
    return j - 1 + _G(m, _u3(x))


def _chi_inv(y):
    j = ceil_q(y)
    m, r = _G_inv(y - j + 1)
    return (j, m, _u3_inv(r))


_CHI_LO = _chi((0, 0, mpq(-1)))
_CHI_HI = _chi((0, 0, mpq(1)))


def block8_core(v):
    """(-1, 3) n Q onto Omega3; (0, 2) goes to {0} x {0} x (-1, 1)."""
    if 0 < v < 2:
        return (0, 0, v - 1)
    if v <= 0:
        return _chi_inv(_CHI_LO + 1 - 1 / (v + 1))
    return _chi_inv(_CHI_HI - 1 + 1 / (3 - v))


def block8_core_inv(w):
    j, m, x = w
    if j == 0 and m == 0 and x is not INF and -1 < x < 1:
        return x + 1
    y = _chi(w)
    if w <= (0, 0, -1):
        return 1 / (1 + _CHI_LO - y) - 1
    return 3 - 1 / (y - _CHI_HI + 1)


def _blocks_core(v):
    if v == 3:
        return (INF, INF, INF)
    return block8_core(v)


def _blocks_core_inv(w):
    if w[0] is INF:
        return mpq(3)
    return block8_core_inv(w)


_PHI_BLOCKS8 = _BlockPeriodic(BLOCKS3, "phi8", 4, -1, _blocks_core, _blocks_core_inv)


def phi_blocks8() -> OrderIso:
    """Q onto Blocks3: block i is (4i-1, 4i+3], and 4i+3 is its top point."""
    return _PHI_BLOCKS8


def phi_block8(i: int) -> OrderIso:
    """The per-block iso (4i-1, 4i+3) n Q onto Omega3, with 4i -> (0,0,-1) and 4i+2 -> (0,0,1)."""
    from .order import SubInterval

    dom = SubInterval(QLINE, mpq(4 * i - 1), mpq(4 * i + 3))
    return FunctionIso(dom, OMEGA3, lambda u: block8_core(u - 4 * i),
                       lambda w: block8_core_inv(w) + 4 * i, name=f"phi8[{i}]")

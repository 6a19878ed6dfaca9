"""Order-automorphisms as immutable, lazily evaluated expression DAGs.

Every node evaluates exactly, pointwise, in both directions: ``g.fwd(x)`` is
``(x)g`` in the right-action convention and ``g.bwd(y)`` evaluates the inverse.
Composition reads left to right, so ``compose(f, g)`` is "apply f, then g";
``conjugate(g, f)`` is ``f^-1 g f`` and ``commutator(f, g)`` is
``f^-1 g^-1 f g``.

The constructors (:func:`compose`, :func:`inverse`, :func:`power`,
:func:`conjugate`, :func:`transport`) apply only exact group-law rewrites
(flattening, cancellation of ``x x^-1``, merging powers of one node, pushing
powers through conjugation and transport).  Nodes that are costly to evaluate
keep a bidirectional memo keyed by point: a forward result also answers the
matching backward query.
"""
from __future__ import annotations

import bisect
import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .order import INF, QLINE, UNIT, Universe, UniverseMismatch, floor_q, fmt_q, parse_q

__all__ = [
    "Automorphism", "Identity", "Translation", "PiecewiseLinear", "IntegerInterpolated",
    "PeriodicWindowRestriction", "MinOf", "MaxOf", "Compose", "Conjugate", "Inverse",
    "Power", "FiberMap", "Transport", "compose", "inverse", "power", "conjugate",
    "commutator", "min_max", "transport", "translation", "identity", "normalize_pl",
    "forward", "backward", "BoundCertificate", "SupportCertificate", "Region",
    "certify_bound", "certify_support", "CertificationError", "FuelExhausted",
    "EvaluationError", "set_fuel", "get_fuel", "load_pl", "dump_pl", "PLFormatError",
]

_MEMO_LIMIT = 400_000
_FUEL = [1_000_000]
_ids = itertools.count()


def set_fuel(n: int) -> None:
    """Set the per-query step budget for orbit searches."""
    if n <= 0:
        raise ValueError("fuel must be positive")
    _FUEL[0] = int(n)


def get_fuel() -> int:
    return _FUEL[0]


class EvaluationError(RuntimeError):
    pass


class FuelExhausted(EvaluationError):
    def __init__(self, node, what):
        super().__init__(f"fuel limit {get_fuel()} exhausted in {node.label}: {what}")
        self.node = node


class CertificationError(AssertionError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class Automorphism:
    """Base node.  Subclasses implement ``_fwd``/``_bwd``."""

    memo = False
    universe: Universe = QLINE
    label = "automorphism"

    def __init__(self):
        self.id = next(_ids)
        self._inv = None
        self._pows = {}
        if self.memo:
            self._fc = {}
            self._bc = {}

    # -- evaluation -------------------------------------------------------

    def fwd(self, x):
        if not self.memo:
            return self._fwd(x)
        r = self._fc.get(x)
        if r is None:
            r = self._fwd(x)
            self._store(x, r)
        return r

    def bwd(self, y):
        if not self.memo:
            return self._bwd(y)
        r = self._bc.get(y)
        if r is None:
            r = self._bwd(y)
            self._store(r, y)
        return r

    def _store(self, x, y):
        # dict assignment is atomic under the GIL; a racing duplicate stores the same value
        if len(self._fc) > _MEMO_LIMIT:
            self._fc.clear()
            self._bc.clear()
        self._fc[x] = y
        self._bc[y] = x

    def clear_memo(self):
        if self.memo:
            self._fc.clear()
            self._bc.clear()

    def _fwd(self, x):
        raise NotImplementedError

    def _bwd(self, y):
        raise NotImplementedError

    # -- structure --------------------------------------------------------

    def children(self) -> tuple:
        return ()

    def describe(self) -> str:
        return self.label

    def _power(self, k):
        """Closed form for ``self**k`` or ``None``."""
        return None

    def __repr__(self):
        return f"<{self.describe()}>"


class Identity(Automorphism):
    label = "Identity"

    def __init__(self, universe: Universe = QLINE):
        super().__init__()
        self.universe = universe

    def _fwd(self, x):
        return x

    _bwd = _fwd

    def describe(self):
        return f"Identity[{self.universe.name}]"


_IDENTITIES: dict = {}


def identity(universe: Universe = QLINE) -> Identity:
    ident = _IDENTITIES.get(universe.name)
    if ident is None:
        ident = _IDENTITIES[universe.name] = Identity(universe)
    return ident


class Translation(Automorphism):
    label = "Translation"

    def __init__(self, r):
        super().__init__()
        self.r = mpq(r)

    def _fwd(self, x):
        return x + self.r

    def _bwd(self, y):
        return y - self.r

    def _power(self, k):
        return translation(self.r * k)

    def describe(self):
        return f"Translation({fmt_q(self.r)})"


def translation(r):
    r = mpq(r)
    if r == 0:
        return identity(QLINE)
    return Translation(r)


class PLFormatError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class PiecewiseLinear(Automorphism):
    """Finitely many rational breakpoints, one affine map ``x -> s*x + c`` per segment.

    On QLine the two end segments are unbounded rays.  On UnitInterval the end
    segments must send -1 to -1 and 1 to 1 in the limit.
    """

    label = "PiecewiseLinear"

    def __init__(self, breaks: Sequence, slopes: Sequence, intercepts: Sequence,
                 universe: Universe = QLINE, name: str | None = None):
        super().__init__()
        self.universe = universe
        self.breaks = tuple(mpq(b) for b in breaks)
        self.slopes = tuple(mpq(s) for s in slopes)
        self.intercepts = tuple(mpq(c) for c in intercepts)
        self.name = name
        self._validate()
        self.images = tuple(s * b + c for b, s, c in zip(self.breaks, self.slopes, self.intercepts))

    def _validate(self):
        b, s, c = self.breaks, self.slopes, self.intercepts
        if len(s) != len(b) + 1 or len(c) != len(s):
            raise PLFormatError(f"{len(b)} breakpoints need {len(b) + 1} segments, got {len(s)}")
        if any(b[i] >= b[i + 1] for i in range(len(b) - 1)):
            raise PLFormatError("breakpoints must be strictly increasing")
        if any(v <= 0 for v in s):
            raise PLFormatError("slopes must be positive")
        for i, x in enumerate(b):
            if s[i] * x + c[i] != s[i + 1] * x + c[i + 1]:
                raise PLFormatError(f"discontinuity at breakpoint {fmt_q(x)}")
        if self.universe is UNIT:
            if any(not -1 < x < 1 for x in b):
                raise PLFormatError("breakpoints must lie in (-1, 1)")
            if -s[0] + c[0] != -1 or s[-1] + c[-1] != 1:
                raise PLFormatError("end segments must fix -1 and 1")
        elif self.universe is not QLINE:
            raise PLFormatError(f"piecewise-linear maps live on QLine or UnitInterval, not {self.universe}")

    def _fwd(self, x):
        i = bisect.bisect_right(self.breaks, x)
        return self.slopes[i] * x + self.intercepts[i]

    def _bwd(self, y):
        i = bisect.bisect_right(self.images, y)
        return (y - self.intercepts[i]) / self.slopes[i]

    def segments(self):
        lo = [None] + list(self.breaks)
        hi = list(self.breaks) + [None]
        return list(zip(lo, hi, self.slopes, self.intercepts))

    def describe(self):
        segs = "; ".join(
            f"[{'-inf' if lo is None else fmt_q(lo)},{'inf' if hi is None else fmt_q(hi)}]:"
            f"{fmt_q(s)}x+{fmt_q(c)}"
            for lo, hi, s, c in self.segments()
        )
        return f"PL({segs})"


class IntegerInterpolated(Automorphism):
    """Affine interpolation of a strictly increasing map ``Z -> Z`` unbounded both ways.

    ``sigma`` must provide ``sigma(n)`` and may provide ``locate(y)`` returning
    ``n`` with ``sigma(n) <= y < sigma(n+1)``; otherwise an exponential search
    bounded by the fuel limit is used.
    """

    memo = True
    label = "IntegerInterpolated"

    def __init__(self, sigma: Callable[[int], int], name="p"):
        super().__init__()
        self.sigma = sigma
        self.name = name

    def _fwd(self, x):
        n = floor_q(x)
        a = self.sigma(n)
        t = x - n
        if t == 0:
            return mpq(a)
        return a + t * (self.sigma(n + 1) - a)

    def locate(self, y) -> int:
        sigma = self.sigma
        fuel = get_fuel()
        lo, hi = 0, 0
        step = 1
        if sigma(0) <= y:
            while sigma(hi) <= y:
                lo, hi = hi, hi + step
                step *= 2
                fuel -= 1
                if fuel < 0:
                    raise FuelExhausted(self, f"locating {fmt_q(y)}")
        else:
            while sigma(lo) > y:
                hi, lo = lo, lo - step
                step *= 2
                fuel -= 1
                if fuel < 0:
                    raise FuelExhausted(self, f"locating {fmt_q(y)}")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if sigma(mid) <= y:
                lo = mid
            else:
                hi = mid
        return lo

    def _bwd(self, y):
        n = self.locate(y)
        a = self.sigma(n)
        return n + (y - a) / (self.sigma(n + 1) - a)

    def describe(self):
        return f"IntegerInterpolated({self.name})"


class PeriodicWindowRestriction(Automorphism):
    """Act as ``inner`` on every window ``[n*j + 2*i, n*j + 2*i + 2]``, identity elsewhere.

    ``inner`` must fix the even integers, so each window is invariant.
    """

    label = "PeriodicWindowRestriction"

    def __init__(self, inner: Automorphism, modulus: int, window: int):
        if modulus % 2 or modulus <= 2:
            raise ValueError("modulus must be an even integer > 2")
        if not 1 <= window <= modulus // 2:
            raise ValueError("window index out of range")
        super().__init__()
        self.inner, self.modulus, self.window = inner, modulus, window

    def _inside(self, x):
        off = x - 2 * self.window
        r = off - self.modulus * floor_q(off / self.modulus)
        return r <= 2 or r == self.modulus

    def _fwd(self, x):
        return self.inner.fwd(x) if self._inside(x) else x

    def _bwd(self, y):
        return self.inner.bwd(y) if self._inside(y) else y

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"Window(n={self.modulus}, i={self.window})"


class _Lattice(Automorphism):
    memo = True

    def __init__(self, members: Sequence[Automorphism]):
        super().__init__()
        self.members = tuple(members)
        self.universe = self.members[0].universe

    def children(self):
        return self.members


class MinOf(_Lattice):
    """Pointwise minimum; its inverse is the pointwise maximum of the inverses."""

    label = "MinOf"

    def _fwd(self, x):
        return min(m.fwd(x) for m in self.members)

    def _bwd(self, y):
        return max(m.bwd(y) for m in self.members)


class MaxOf(_Lattice):
    label = "MaxOf"

    def _fwd(self, x):
        return max(m.fwd(x) for m in self.members)

    def _bwd(self, y):
        return min(m.bwd(y) for m in self.members)


class Compose(Automorphism):
    memo = True
    label = "Compose"

    def __init__(self, members: Sequence[Automorphism]):
        super().__init__()
        self.members = tuple(members)
        self.universe = self.members[0].universe

    def _fwd(self, x):
        for m in self.members:
            x = m.fwd(x)
        return x

    def _bwd(self, y):
        for m in reversed(self.members):
            y = m.bwd(y)
        return y

    def children(self):
        return self.members


class Conjugate(Compose):
    """``by^-1 * base * by``."""

    label = "Conjugate"

    def __init__(self, base: Automorphism, by: Automorphism):
        super().__init__((inverse(by), base, by))
        self.base, self.by = base, by

    def children(self):
        return (self.base, self.by)


class Inverse(Automorphism):
    label = "Inverse"

    def __init__(self, inner: Automorphism):
        super().__init__()
        self.inner = inner
        self.universe = inner.universe

    def fwd(self, x):
        return self.inner.bwd(x)

    def bwd(self, y):
        return self.inner.fwd(y)

    def children(self):
        return (self.inner,)


class Power(Automorphism):
    memo = True
    label = "Power"

    def __init__(self, inner: Automorphism, k: int):
        super().__init__()
        self.inner, self.k = inner, int(k)
        self.universe = inner.universe

    def _fwd(self, x):
        g = self.inner
        if self.k > 0:
            for _ in range(self.k):
                x = g.fwd(x)
        else:
            for _ in range(-self.k):
                x = g.bwd(x)
        return x

    def _bwd(self, y):
        g = self.inner
        if self.k > 0:
            for _ in range(self.k):
                y = g.bwd(y)
        else:
            for _ in range(-self.k):
                y = g.fwd(y)
        return y

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"Power(k={self.k})"


class FiberMap(Automorphism):
    """A case table on coordinates, given by a forward and a backward function.

    ``power``, when supplied, maps an integer k to a closed-form FiberMap for
    the k-th power.
    """

    label = "FiberMap"

    def __init__(self, universe: Universe, name: str, fwd: Callable, bwd: Callable,
                 power: Callable[[int], "FiberMap"] | None = None, memo: bool = False):
        self.memo = memo
        super().__init__()
        self.universe = universe
        self.name = name
        self._f, self._b, self._p = fwd, bwd, power

    def _fwd(self, x):
        return self._f(x)

    def _bwd(self, y):
        return self._b(y)

    def _power(self, k):
        return None if self._p is None else self._p(k)

    def describe(self):
        return f"FiberMap({self.name})"


class Transport(Automorphism):
    """``inner`` (on iso.domain) carried to iso.codomain: ``y -> iso(inner(iso^-1(y)))``."""

    memo = True
    label = "Transport"

    def __init__(self, iso, inner: Automorphism):
        super().__init__()
        if inner.universe is not iso.domain:
            raise UniverseMismatch(f"cannot transport {inner.universe} along an iso from {iso.domain}")
        self.iso, self.inner = iso, inner
        self.universe = iso.codomain

    def _fwd(self, y):
        iso = self.iso
        return iso.fwd(self.inner.fwd(iso.bwd(y)))

    def _bwd(self, y):
        iso = self.iso
        return iso.fwd(self.inner.bwd(iso.bwd(y)))

    def children(self):
        return (self.inner,)

    def describe(self):
        return f"Transport({self.iso.name})"


# ---------------------------------------------------------------------------
# constructors


def _check_same(gs):
    u = gs[0].universe
    for g in gs[1:]:
        if g.universe is not u:
            raise UniverseMismatch(f"cannot combine automorphisms of {u} and {g.universe}")
    return u


def _base_exp(g):
    if isinstance(g, Inverse):
        return g.inner, -1
    if isinstance(g, Power):
        return g.inner, g.k
    return g, 1


def compose(*gs: Automorphism) -> Automorphism:
    """Product in application order, with exact free-group simplification."""
    if len(gs) == 1 and isinstance(gs[0], (list, tuple)):
        gs = tuple(gs[0])
    if not gs:
        raise ValueError("compose needs at least one automorphism")
    u = _check_same(gs)
    flat: list[Automorphism] = []
    for g in gs:
        if type(g) in (Compose, Conjugate):
            flat.extend(g.members)
        else:
            flat.append(g)
    stack: list[tuple[Automorphism, int]] = []
    for g in flat:
        if isinstance(g, Identity):
            continue
        item = _base_exp(g)
        while stack:
            top = stack[-1]
            merged = _merge(top, item)
            if merged is None:
                break
            stack.pop()
            item = merged
            if item[1] == 0:
                break
        if item[1] != 0 and not isinstance(item[0], Identity):
            stack.append(item)
    nodes = [power(b, k) for b, k in stack]
    nodes = [n for n in nodes if not isinstance(n, Identity)]
    if not nodes:
        return identity(u)
    if len(nodes) == 1:
        return nodes[0]
    return Compose(nodes)


def _merge(a, b):
    (x, i), (y, j) = a, b
    if x is y:
        return (x, i + j)
    if isinstance(x, Translation) and isinstance(y, Translation):
        t = translation(x.r * i + y.r * j)
        return (t, 1) if not isinstance(t, Identity) else (t, 0)
    if isinstance(x, Transport) and isinstance(y, Transport) and x.iso is y.iso:
        fused = transport(x.iso, compose(power(x.inner, i), power(y.inner, j)))
        return (fused, 1) if not isinstance(fused, Identity) else (fused, 0)
    return None


def inverse(g: Automorphism) -> Automorphism:
    if isinstance(g, Identity):
        return g
    if isinstance(g, Inverse):
        return g.inner
    if isinstance(g, Translation):
        return translation(-g.r)
    if isinstance(g, Power):
        return power(g.inner, -g.k)
    if g._inv is None:
        if isinstance(g, Transport):
            g._inv = transport(g.iso, inverse(g.inner))
        else:
            g._inv = Inverse(g)
    return g._inv


def power(g: Automorphism, k: int) -> Automorphism:
    k = int(k)
    if k == 0:
        return identity(g.universe)
    if k == 1:
        return g
    if isinstance(g, Identity):
        return g
    if isinstance(g, Inverse):
        return power(g.inner, -k)
    if k == -1:
        return inverse(g)
    if isinstance(g, Power):
        return power(g.inner, g.k * k)
    cached = g._pows.get(k)
    if cached is not None:
        return cached
    closed = g._power(k)
    if closed is not None:
        res = closed
    elif isinstance(g, Conjugate):
        res = conjugate(power(g.base, k), g.by)
    elif isinstance(g, Transport):
        res = transport(g.iso, power(g.inner, k))
    else:
        res = Power(g, k)
    g._pows[k] = res
    return res


def conjugate(g: Automorphism, f: Automorphism) -> Automorphism:
    """``g^f = f^-1 g f``."""
    _check_same((g, f))
    if isinstance(f, Identity) or isinstance(g, Identity):
        return g
    if isinstance(g, Translation) and isinstance(f, Translation):
        return g
    if isinstance(g, Transport) and isinstance(f, Transport) and g.iso is f.iso:
        return transport(g.iso, conjugate(g.inner, f.inner))
    return Conjugate(g, f)


def commutator(f: Automorphism, g: Automorphism) -> Automorphism:
    """``[f, g] = f^-1 g^-1 f g``."""
    _check_same((f, g))
    return compose(inverse(f), inverse(g), f, g)


def min_max(f: Automorphism, g: Automorphism, mode: str = "min") -> Automorphism:
    _check_same((f, g))
    if mode == "min":
        return MinOf((f, g))
    if mode == "max":
        return MaxOf((f, g))
    raise ValueError(f"mode must be 'min' or 'max', not {mode!r}")


def transport(iso, inner: Automorphism) -> Automorphism:
    """Carry ``inner`` along ``iso``; uses the iso's shift law when it has one."""
    if isinstance(inner, Identity):
        return identity(iso.codomain)
    shift = getattr(iso, "translation_law", None)
    if shift is not None and isinstance(inner, Translation):
        closed = shift(inner.r)
        if closed is not None:
            return closed
    return Transport(iso, inner)


def forward(g: Automorphism, x):
    """Checked ``(x)g``."""
    g.universe.check(x)
    return g.fwd(x)


def backward(g: Automorphism, y):
    g.universe.check(y)
    return g.bwd(y)


# ---------------------------------------------------------------------------
# piecewise-linear normal form


_PL_CLOSED = (Identity, Translation, PiecewiseLinear, Compose, Inverse, Power, MinOf, MaxOf)


def _pl_closed(g) -> bool:
    if not isinstance(g, _PL_CLOSED) or g.universe is not QLINE:
        return False
    return all(_pl_closed(c) for c in g.children())


def _pl_from_breaks(g: Automorphism, candidates) -> PiecewiseLinear:
    """Rebuild ``g`` as PL, given a superset of its breakpoints."""
    pts = sorted(set(candidates))
    probes = []
    if not pts:
        probes.append((mpq(0), mpq(1)))
    else:
        probes.append((pts[0] - 1, pts[0]))
        probes.extend(zip(pts, pts[1:]))
        probes.append((pts[-1], pts[-1] + 1))
    slopes, inters = [], []
    for a, b in probes:
        fa, fb = g.fwd(a), g.fwd(b)
        s = (fb - fa) / (b - a)
        slopes.append(s)
        inters.append(fa - s * a)
    # drop breakpoints where nothing changes
    keep_b, keep_s, keep_c = [], [slopes[0]], [inters[0]]
    for i, x in enumerate(pts):
        if slopes[i + 1] == keep_s[-1] and inters[i + 1] == keep_c[-1]:
            continue
        keep_b.append(x)
        keep_s.append(slopes[i + 1])
        keep_c.append(inters[i + 1])
    return PiecewiseLinear(keep_b, keep_s, keep_c)


def _as_pl(g) -> PiecewiseLinear:
    if isinstance(g, PiecewiseLinear):
        return g
    if isinstance(g, Identity):
        return PiecewiseLinear((), (1,), (0,))
    if isinstance(g, Translation):
        return PiecewiseLinear((), (1,), (g.r,))
    if isinstance(g, Inverse):
        p = _as_pl(g.inner)
        return PiecewiseLinear(p.images, [1 / s for s in p.slopes],
                               [-c / s for s, c in zip(p.slopes, p.intercepts)])
    if isinstance(g, Compose):
        acc = _as_pl(g.members[0])
        for m in g.members[1:]:
            nxt = _as_pl(m)
            cands = list(acc.breaks) + [acc.bwd(b) for b in nxt.breaks]
            acc = _pl_from_breaks(Compose((acc, nxt)), cands)
        return acc
    if isinstance(g, Power):
        base = _as_pl(g.inner) if g.k > 0 else _as_pl(Inverse(g.inner))
        acc = base
        for _ in range(abs(g.k) - 1):
            cands = list(acc.breaks) + [acc.bwd(b) for b in base.breaks]
            acc = _pl_from_breaks(Compose((acc, base)), cands)
        return acc
    if isinstance(g, (MinOf, MaxOf)):
        parts = [_as_pl(m) for m in g.members]
        cands = sorted({b for p in parts for b in p.breaks})
        edges = [None] + cands + [None]
        extra = []
        for lo, hi in zip(edges, edges[1:]):
            probe = _probe(lo, hi)
            lines = [(p.slopes[bisect.bisect_right(p.breaks, probe)],
                      p.intercepts[bisect.bisect_right(p.breaks, probe)]) for p in parts]
            for (s1, c1), (s2, c2) in itertools.combinations(lines, 2):
                if s1 != s2:
                    x = (c2 - c1) / (s1 - s2)
                    if (lo is None or x > lo) and (hi is None or x < hi):
                        extra.append(x)
        node = type(g)(parts)
        return _pl_from_breaks(node, cands + extra)
    raise TypeError(f"not PL-closed: {g!r}")


def _probe(lo, hi):
    if lo is None and hi is None:
        return mpq(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def normalize_pl(g: Automorphism) -> Automorphism:
    """Collapse a PL-closed subtree to a single PiecewiseLinear node; otherwise return ``g``."""
    if not _pl_closed(g):
        return g
    return _as_pl(g)


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class Region:
    """A predicate on points with a human-readable description."""

    description: str
    contains: Callable[[object], bool] = field(compare=False)


@dataclass(frozen=True)
class BoundCertificate:
    subject: Automorphism = field(repr=False)
    radius: object
    note: str
    samples: int

    def summary(self) -> str:
        return f"B_{fmt_q(self.radius)} ({self.note}; {self.samples} samples)"


@dataclass(frozen=True)
class SupportCertificate:
    subject: Automorphism = field(repr=False)
    region: Region
    note: str
    samples: int

    def summary(self) -> str:
        return f"supp within {self.region.description} ({self.note}; {self.samples} samples)"


def certify_bound(g: Automorphism, r, samples, note: str = "") -> BoundCertificate:
    """Check ``|(x)g - x| <= r`` at every sample; raise with the first witness otherwise."""
    r = mpq(r)
    n = 0
    for x in samples:
        y = g.fwd(x)
        if abs(y - x) > r:
            raise CertificationError(
                f"{note or g.describe()} is not in B_{fmt_q(r)}: "
                f"x={fmt_q(x)} moves to {fmt_q(y)}", witness=x)
        n += 1
    return BoundCertificate(g, r, note, n)


def certify_support(g: Automorphism, region: Region, samples, note: str = "") -> SupportCertificate:
    """Check that ``g`` fixes every sample outside ``region``."""
    fmt = g.universe.fmt
    n = 0
    for x in samples:
        if region.contains(x):
            continue
        y = g.fwd(x)
        if y != x:
            raise CertificationError(
                f"{note or g.describe()} moves {fmt(x)} to {fmt(y)}, "
                f"outside {region.description}", witness=x)
        n += 1
    return SupportCertificate(g, region, note, n)


# ---------------------------------------------------------------------------
# PL text format
#
#   pl NAME
#     seg LO HI SLOPE INTERCEPT      (LO/HI are p/q, or -inf/inf on the ends)
#   end


def _parse_bound(tok, lineno):
    if tok in ("-inf", "inf"):
        return None
    try:
        return parse_q(tok)
    except ValueError as e:
        raise PLFormatError(str(e), lineno) from None


def parse_pl_block(lines: list[tuple[int, str]], name: str, universe: Universe = QLINE) -> Automorphism:
    """Build an automorphism from ``seg`` lines; no segments means the identity."""
    segs = []
    for lineno, text in lines:
        toks = text.split()
        if not toks or toks[0] != "seg" or len(toks) != 5:
            raise PLFormatError(f"expected 'seg LO HI SLOPE INTERCEPT', got {text.strip()!r}", lineno)
        lo, hi = _parse_bound(toks[1], lineno), _parse_bound(toks[2], lineno)
        try:
            s, c = parse_q(toks[3]), parse_q(toks[4])
        except ValueError as e:
            raise PLFormatError(str(e), lineno) from None
        segs.append((lineno, toks[1], toks[2], lo, hi, s, c))
    if not segs:
        return PiecewiseLinear((), (1,), (0,), universe=universe, name=name)
    first_line = segs[0][0]
    # on the unit interval the ends may be written as -1 and 1
    lo_end = segs[0][3]
    if lo_end is not None and not (universe is UNIT and lo_end == -1):
        raise PLFormatError("first segment must start at -inf", first_line)
    hi_end = segs[-1][4]
    if hi_end is not None and not (universe is UNIT and hi_end == 1):
        raise PLFormatError("last segment must end at inf", segs[-1][0])
    breaks = []
    for prev, cur in zip(segs, segs[1:]):
        if prev[4] is None or cur[3] is None or prev[4] != cur[3]:
            raise PLFormatError("segments must be contiguous", cur[0])
        breaks.append(cur[3])
    try:
        return PiecewiseLinear(breaks, [s[5] for s in segs], [s[6] for s in segs],
                               universe=universe, name=name)
    except PLFormatError as e:
        raise PLFormatError(str(e), first_line) from None


def load_pl(text: str, universe: Universe = QLINE) -> dict[str, Automorphism]:
    """Parse every ``pl NAME ... end`` block of ``text``."""
    out: dict[str, Automorphism] = {}
    cur_name, cur_lines, start = None, [], 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if cur_name is None:
            toks = line.split()
            if toks[0] != "pl" or len(toks) != 2:
                raise PLFormatError(f"expected 'pl NAME', got {line!r}", lineno)
            cur_name, cur_lines, start = toks[1], [], lineno
        elif line == "end":
            if cur_name in out:
                raise PLFormatError(f"duplicate name {cur_name!r}", start)
            out[cur_name] = parse_pl_block(cur_lines, cur_name, universe)
            cur_name = None
        else:
            cur_lines.append((lineno, line))
    if cur_name is not None:
        raise PLFormatError(f"block {cur_name!r} is missing 'end'", start)
    return out


def dump_pl(g: PiecewiseLinear, name: str | None = None) -> str:
    lines = [f"pl {name or g.name or 'g'}"]
    for lo, hi, s, c in g.segments():
        lo_s = "-inf" if lo is None else fmt_q(lo)
        hi_s = "inf" if hi is None else fmt_q(hi)
        lines.append(f"  seg {lo_s} {hi_s} {fmt_q(s)} {fmt_q(c)}")
    lines.append("end")
    return "\n".join(lines) + "\n"

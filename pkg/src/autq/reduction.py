"""Reduction of an arbitrary sequence to stabilisers of periodic interval unions.

The chain is:

* taming: one conjugator p makes the n-th element move points by at most 2n;
* bounded factorisation: an element of B_{rn} is a product of n elements of B_r;
* even splitting: an element of B_{1/3} is (fixes 2Z) * (fixes 2Z+1);
* interval splitting: an element fixing 2Z is a product of n/2 pieces, each
  of which, once shifted, fixes I_n = U (nj+2, nj+n).

Everything is lazy; each factor carries a sampled certificate.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .auto import (
    Automorphism, BoundCertificate, CertificationError, IntegerInterpolated, MaxOf, MinOf,
    PeriodicWindowRestriction, Region, SupportCertificate, certify_bound, certify_support,
    compose, conjugate, identity, inverse, translation,
)
from .order import QLINE, UniverseMismatch, ceil_q, floor_q, fmt_q

__all__ = [
    "TamingResult", "FactorChain", "taming_conjugator", "bounded_factorize", "split_even_stab",
    "split_interval_stab", "EvenStabInterpolant", "region_off_even", "region_off_odd",
    "region_windows", "word_decorate", "word_chunk", "chunk_bounds", "SequenceReduction",
]


# ---------------------------------------------------------------------------
# taming


class _Sigma:
    """sigma(0) = 0; each step clears every image of the previous value under the allowed g_n^(+-1)."""

    def __init__(self, gs: Sequence[Automorphism]):
        self.gs = list(gs)
        self.up = [0]
        self.down = [0]

    def _allowed(self, m: int):
        return self.gs[: min(max(m, 1), len(self.gs))]

    def __call__(self, m: int) -> int:
        if m >= 0:
            seq = self.up
            while len(seq) <= m:
                s = mpq(seq[-1])
                vals = [s]
                for g in self._allowed(len(seq) - 1):
                    vals += (g.fwd(s), g.bwd(s))
                seq.append(floor_q(max(vals)) + 1)
            return seq[m]
        seq = self.down
        while len(seq) <= -m:
            s = mpq(seq[-1])
            vals = [s]
            for g in self._allowed(len(seq) - 1):
                vals += (g.fwd(s), g.bwd(s))
            seq.append(ceil_q(min(vals)) - 1)
        return seq[-m]

    def locate(self, y) -> int:
        if y >= 0:
            m = 0
            while self(m + 1) <= y:
                m += 1
            return m
        m = 0
        while self(m) > y:
            m -= 1
        return m


class _Tamer(IntegerInterpolated):
    def __init__(self, sigma: _Sigma):
        super().__init__(sigma, name="p")

    def locate(self, y) -> int:
        return self.sigma.locate(y)


@dataclass
class TamingResult:
    """``p`` and, per index n, the certified bounded conjugate of g_n.

    ``direction`` is ``"p^-1"`` when ``g_n^(p^-1) = p g_n p^-1`` is the bounded
    one, ``"p"`` when ``g_n^p = p^-1 g_n p`` is.
    """

    p: Automorphism
    sigma: Callable[[int], int] = field(repr=False)
    direction: str
    tamed: list = field(repr=False)
    certificates: list = field(repr=False)

    def untame(self, t: Automorphism) -> Automorphism:
        """Undo the conjugation: maps each tamed element back to the original."""
        if self.direction == "p^-1":
            return conjugate(t, self.p)
        return conjugate(t, inverse(self.p))


def taming_conjugator(gs: Sequence[Automorphism], samples) -> TamingResult:
    """Build p and certify the 2n bound for each g_n at the samples.

    Both conjugation directions are tried; the first one whose bounds verify
    for every index is recorded.
    """
    for g in gs:
        if g.universe is not QLINE:
            raise UniverseMismatch("taming works on QLine")
    samples = list(samples)
    sigma = _Sigma(gs)
    p = _Tamer(sigma)
    failures = []
    for direction in ("p^-1", "p"):
        by = inverse(p) if direction == "p^-1" else p
        tamed, certs = [], []
        try:
            for n, g in enumerate(gs, 1):
                t = conjugate(g, by)
                certs.append(certify_bound(t, 2 * n, samples, note=f"g_{n}^({direction})"))
                tamed.append(t)
        except CertificationError as e:
            failures.append(str(e))
            continue
        return TamingResult(p, sigma, direction, tamed, certs)
    raise CertificationError("taming bound fails in both directions: " + "; ".join(failures))


# ---------------------------------------------------------------------------
# factor chains


@dataclass
class FactorChain:
    target: Automorphism = field(repr=False)
    factors: list = field(repr=False)
    certificates: list = field(repr=False)

    def product(self) -> Automorphism:
        return compose(self.factors)

    def check(self, samples) -> int:
        n = 0
        for x in samples:
            y = x
            for f in self.factors:
                y = f.fwd(y)
            if y != self.target.fwd(x):
                raise CertificationError(f"factor product differs from target at {fmt_q(x)}", witness=x)
            n += 1
        return n


def _require_bound(cert, g, radius):
    if not isinstance(cert, BoundCertificate) or cert.subject is not g:
        raise CertificationError("a bound certificate for the input is required")
    if cert.radius > radius:
        raise CertificationError(f"certified radius {fmt_q(cert.radius)} exceeds {fmt_q(radius)}")


def bounded_factorize(g: Automorphism, r, n: int, cert: BoundCertificate, samples) -> FactorChain:
    """Write ``g`` in B_{rn} as n factors in B_r.

    Each step peels ``h1 = max{min{x + r, g^-1}, x - r}``: its inverse is the
    next factor and ``h1 g`` lies in B_{r(n-1)}.
    """
    r = mpq(r)
    _require_bound(cert, g, r * n)
    samples = list(samples)
    up, down = translation(r), translation(-r)
    factors, certs = [], []
    if g is identity(QLINE):
        for k in range(n):
            certs.append(certify_bound(g, r, samples, note=f"factor {k + 1}/{n}"))
        return FactorChain(g, [g] * n, certs)
    cur = g
    for k in range(n - 1):
        h1 = MaxOf((MinOf((up, inverse(cur))), down))
        factor = inverse(h1)
        certs.append(certify_bound(factor, r, samples, note=f"factor {k + 1}/{n}"))
        factors.append(factor)
        cur = compose(h1, cur)
    certs.append(certify_bound(cur, r, samples, note=f"factor {n}/{n}"))
    factors.append(cur)
    return FactorChain(g, factors, certs)


# ---------------------------------------------------------------------------
# even / odd splitting


class EvenStabInterpolant(Automorphism):
    """Fixes 2Z; on [2n, 2n+2] it is PL with one node ``(2n+1)g^-1 -> 2n+1``."""

    label = "EvenStabInterpolant"
    memo = True

    def __init__(self, g: Automorphism):
        super().__init__()
        self.g = g
        self.universe = QLINE

    def _node(self, n):
        return self.g.bwd(mpq(2 * n + 1))

    def _fwd(self, x):
        n = floor_q(x / 2)
        lo, q = 2 * n, self._node(n)
        mid = lo + 1
        if x <= q:
            return lo + (x - lo) * (mid - lo) / (q - lo)
        return mid + (x - q) * (lo + 2 - mid) / (lo + 2 - q)

    def _bwd(self, y):
        n = floor_q(y / 2)
        lo, q = 2 * n, self._node(n)
        mid = lo + 1
        if y <= mid:
            return lo + (y - lo) * (q - lo)
        return q + (y - mid) * (lo + 2 - q)

    def children(self):
        return (self.g,)


def _in_set(residue):
    def pred(x):
        return x.denominator == 1 and x.numerator % 2 == residue
    return pred


def region_off_even() -> Region:
    """Support region of a 2Z-stabiliser: Q minus 2Z."""
    pred = _in_set(0)
    return Region("Q \\ 2Z", lambda x: not pred(x))


def region_off_odd() -> Region:
    pred = _in_set(1)
    return Region("Q \\ (2Z+1)", lambda x: not pred(x))


def region_windows(n: int) -> Region:
    """Complement of I_n: the closed windows [nj, nj+2]."""
    return Region(f"U [{n}j, {n}j+2]", lambda x: (x - n * floor_q(x / n)) <= 2)


def split_even_stab(g: Automorphism, cert: BoundCertificate, samples) -> FactorChain:
    """``g = h (h^-1 g)`` with h fixing 2Z and ``h^-1 g`` fixing 2Z+1."""
    _require_bound(cert, g, mpq(1, 3))
    samples = list(samples)
    if g is identity(QLINE):
        h = g
    else:
        h = EvenStabInterpolant(g)
    rest = compose(inverse(h), g)
    certs = [
        certify_support(h, region_off_even(), samples, note="h in Stab(2Z)"),
        certify_support(rest, region_off_odd(), samples, note="h^-1 g in Stab(2Z+1)"),
    ]
    return FactorChain(g, [h, rest], certs)


def split_interval_stab(h: Automorphism, n: int, cert: SupportCertificate, samples) -> FactorChain:
    """``h = k_1 ... k_{n/2}``; ``k_i`` acts on the windows [nj+2i, nj+2i+2].

    The chain's certificates are for the shifted pieces ``k_i^(f^-2i)``
    (f the unit translation), which fix I_n.
    """
    if not isinstance(cert, SupportCertificate) or cert.subject is not h:
        raise CertificationError("a Stab(2Z) support certificate for the input is required")
    if n % 2 or n <= 2:
        raise ValueError("n must be an even integer > 2")
    samples = list(samples)
    region = region_windows(n)
    factors, certs = [], []
    for i in range(1, n // 2 + 1):
        k = identity(QLINE) if h is identity(QLINE) else PeriodicWindowRestriction(h, n, i)
        factors.append(k)
        shifted = conjugate(k, translation(-2 * i))
        certs.append(certify_support(shifted, region, samples, note=f"k_{i}^(f^-{2 * i}) in Stab(I_{n})"))
    return FactorChain(h, factors, certs)


# ---------------------------------------------------------------------------
# sequence combinators


def chunk_bounds(lengths: Sequence[int]) -> list[tuple[int, int]]:
    """1-based inclusive index ranges of consecutive chunks of the given lengths."""
    out, start = [], 1
    for ell in lengths:
        if ell <= 0:
            raise ValueError("chunk lengths must be positive")
        out.append((start, start + ell - 1))
        start += ell
    return out


def word_chunk(words: Sequence, lengths: Sequence[int], product: Callable | None = None) -> list:
    """n-th output = product of the n-th chunk of consecutive terms (terms are 1-based)."""
    if product is None:
        from .words import Prod as product
    out = []
    for lo, hi in chunk_bounds(lengths):
        if hi > len(words):
            raise IndexError(f"chunk {lo}..{hi} needs {hi} terms, only {len(words)} given")
        out.append(product(*words[lo - 1:hi]))
    return out


def word_decorate(words: Sequence, frame: Sequence, product: Callable | None = None) -> list:
    """With frame w_1..w_{m+1}: n-th output = w_1 u_{mn+1} w_2 ... w_m u_{mn+m} w_{m+1}."""
    if product is None:
        from .words import Prod as product
    m = len(frame) - 1
    if m < 1:
        raise ValueError("a frame needs at least two words")
    out = []
    for n in range(len(words) // m):
        parts = [frame[0]]
        for j in range(m):
            parts += [words[m * n + j], frame[j + 1]]
        out.append(product(*parts))
    return out


# ---------------------------------------------------------------------------
# the whole chain for a finite sequence


def _factor_position(N: int) -> tuple[int, int]:
    """Global B_{1/3} factor index N -> (n, i) with N = 3n(n-1) + i, 1 <= i <= 6n."""
    n = 1
    while 3 * n * (n + 1) < N:
        n += 1
    return n, N - 3 * n * (n - 1)


class SequenceReduction:
    """Targets w_M in Stab(I_m) whose grouped conjugate products give the tamed sequence.

    For the N-th B_{1/3} factor e_N (the factors of t_n carry the global
    indices 3n(n-1)+1 .. 3n(n+1)), ``e_N = h_N (h_N^-1 e_N)``; the first m/2
    targets of block N split h_N, the next m/2 split ``(h_N^-1 e_N)^(f^-1)``.
    Stages are computed on demand and cached; every stage is certified at the
    given QLine samples.
    """

    def __init__(self, gs: Sequence[Automorphism], m: int, samples, taming: TamingResult | None = None):
        if m % 2 or m < 4:
            raise ValueError("m must be an even integer >= 4")
        self.gs = list(gs)
        self.m = m
        self.samples = list(samples)
        self.taming = taming or taming_conjugator(self.gs, self.samples)
        self._chains: dict = {}
        self._halves: dict = {}
        self._pieces: dict = {}
        self.certificates: list = list(self.taming.certificates)

    @property
    def length(self) -> int:
        return len(self.gs)

    @property
    def target_count(self) -> int:
        """Number of w-targets the finite sequence uses."""
        L = len(self.gs)
        return self.m * 3 * L * (L + 1)

    def tamed(self, n: int) -> Automorphism:
        return self.taming.tamed[n - 1]

    def chain(self, n: int) -> FactorChain:
        if n not in self._chains:
            ch = bounded_factorize(self.tamed(n), mpq(1, 3), 6 * n,
                                   self.taming.certificates[n - 1], self.samples)
            self._chains[n] = ch
            self.certificates += ch.certificates
        return self._chains[n]

    def factor(self, N: int) -> tuple[Automorphism, BoundCertificate]:
        n, i = _factor_position(N)
        ch = self.chain(n)
        return ch.factors[i - 1], ch.certificates[i - 1]

    def halves(self, N: int):
        """(h_N, its Stab(2Z) certificate, h'_N, its certificate)."""
        if N not in self._halves:
            e, cert = self.factor(N)
            sp = split_even_stab(e, cert, self.samples)
            h, rest = sp.factors
            h2 = conjugate(rest, translation(-1))
            c2 = certify_support(h2, region_off_even(), self.samples, note=f"h'_{N} in Stab(2Z)")
            self._halves[N] = (h, sp.certificates[0], h2, c2)
            self.certificates += sp.certificates + [c2]
        return self._halves[N]

    def _split(self, N: int, second: bool) -> FactorChain:
        key = (N, second)
        if key not in self._pieces:
            h, c, h2, c2 = self.halves(N)
            src, cert = (h2, c2) if second else (h, c)
            ch = split_interval_stab(src, self.m, cert, self.samples)
            self._pieces[key] = ch
            self.certificates += ch.certificates
        return self._pieces[key]

    def target(self, M: int) -> Automorphism:
        """w-target M (1-based), an element of Stab(I_m); identity past the finite sequence."""
        if M < 1:
            raise IndexError("targets are 1-based")
        if M > self.target_count:
            return identity(QLINE)
        half = self.m // 2
        N, r = divmod(M - 1, self.m)
        N += 1
        second = r >= half
        j = r - half + 1 if second else r + 1
        ch = self._split(N, second)
        return ch.certificates[j - 1].subject

    def untame(self, t: Automorphism) -> Automorphism:
        return self.taming.untame(t)

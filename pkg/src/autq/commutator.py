"""Every order-automorphism of Q is a commutator: explicit, lazy witnesses.

For a target u let s be the unit translation.

1. ``b = max{s u, s}`` moves every point by at least 1 and lies above u.
2. ``a = u b^-1`` then moves every point down by at least 1.
3. A map that moves every point up by at least 1 is conjugate to s through
   a fundamental-domain conjugator ``c`` (``s^c = b``); likewise ``d`` with
   ``s^d = a^-1``.
4. ``v = s^d`` and ``w = d^-1 c`` give ``[v, w] = (s^d)^-1 s^c = a b = u``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .auto import (
    Automorphism, CertificationError, EvaluationError, FiberMap, FuelExhausted, MaxOf, compose,
    conjugate, get_fuel, identity, inverse, transport, translation,
)
from .iso import psi
from .order import QLINE, UNIT, UniverseMismatch, floor_q, fmt_q

__all__ = [
    "EscapeCertificate", "EquivariantConjugator", "CommutatorWitnesses", "dominating_positive",
    "translation_conjugator", "commutator_witnesses", "witnesses_in_interval",
    "MissingCertificate", "extend_from_unit",
]

_S = translation(1)


class MissingCertificate(EvaluationError):
    pass


@dataclass(frozen=True)
class EscapeCertificate:
    """Records why ``(y)subject >= y + 1`` holds for every y."""

    subject: Automorphism = field(repr=False)
    note: str

    def check(self, samples) -> int:
        n = 0
        for y in samples:
            if self.subject.fwd(y) < y + 1:
                raise CertificationError(
                    f"escape fails at {fmt_q(y)}: image {fmt_q(self.subject.fwd(y))}", witness=y)
            n += 1
        return n


def dominating_positive(u: Automorphism) -> tuple[Automorphism, EscapeCertificate]:
    """``b = max{(y+1)u, y+1}``; b escapes by at least 1 and lies strictly above u."""
    if u.universe is not QLINE:
        raise UniverseMismatch("dominating_positive works on QLine")
    b = MaxOf((compose(_S, u), _S))
    return b, EscapeCertificate(b, "max with y+1 (lattice lemma)")


class EquivariantConjugator(Automorphism):
    """``c`` with ``s^c = b``: [n, n+1) goes onto [beta_n, beta_{n+1}), beta_n = (base)b^n.

    ``(x)c = ((x - n)c0)b^n`` for ``n = floor(x)``, where c0 is the affine map
    [0, 1) -> [beta_0, beta_1).
    """

    memo = True
    label = "EquivariantConjugator"

    def __init__(self, b: Automorphism, base=0):
        super().__init__()
        self.b = b
        self.universe = QLINE
        self._up = [mpq(base)]      # beta_0, beta_1, ...
        self._down = [mpq(base)]    # beta_0, beta_-1, ...

    def beta(self, n: int):
        seq, step = (self._up, self.b.fwd) if n >= 0 else (self._down, self.b.bwd)
        while len(seq) <= abs(n):
            seq.append(step(seq[-1]))
        return seq[abs(n)]

    def _fwd(self, x):
        n = floor_q(x)
        b0, b1 = self.beta(0), self.beta(1)
        z = b0 + (x - n) * (b1 - b0)
        step = self.b.fwd if n >= 0 else self.b.bwd
        for _ in range(abs(n)):
            z = step(z)
        return z

    def _locate(self, y) -> int:
        fuel = get_fuel()
        n = 0
        if y >= self.beta(0):
            while self.beta(n + 1) <= y:
                n += 1
                if n > fuel:
                    raise FuelExhausted(self, f"orbit search for {fmt_q(y)}")
        else:
            while self.beta(n) > y:
                n -= 1
                if -n > fuel:
                    raise FuelExhausted(self, f"orbit search for {fmt_q(y)}")
        return n

    def _bwd(self, y):
        n = self._locate(y)
        step = self.b.bwd if n >= 0 else self.b.fwd
        z = y
        for _ in range(abs(n)):
            z = step(z)
        b0, b1 = self.beta(0), self.beta(1)
        return n + (z - b0) / (b1 - b0)

    def children(self):
        return (self.b,)


def translation_conjugator(b: Automorphism, escape: EscapeCertificate | None,
                           base=0) -> EquivariantConjugator:
    """Conjugator c with ``c^-1 s c = b``; refuses without an escape certificate for b."""
    if escape is None or escape.subject is not b:
        raise MissingCertificate("translation_conjugator needs an escape certificate for its input")
    return EquivariantConjugator(b, base)


@dataclass(frozen=True)
class CommutatorWitnesses:
    target: Automorphism = field(repr=False)
    v: Automorphism = field(repr=False)
    w: Automorphism = field(repr=False)
    certificates: tuple = ()

    def check(self, samples) -> int:
        """Compare ``[v, w]`` with the target pointwise; raise on the first disagreement."""
        n = 0
        v, w = self.v, self.w
        for x in samples:
            y = w.fwd(v.fwd(w.bwd(v.bwd(x))))
            if y != self.target.fwd(x):
                raise CertificationError(f"[v, w] differs from the target at {x}", witness=x)
            n += 1
        return n


def commutator_witnesses(u: Automorphism) -> CommutatorWitnesses:
    """``v, w`` on QLine with ``v^-1 w^-1 v w = u``."""
    if u.universe is not QLINE:
        raise UniverseMismatch("commutator_witnesses works on QLine; transport first")
    ident = identity(QLINE)
    if u is ident:
        return CommutatorWitnesses(u, ident, ident)
    b, b_cert = dominating_positive(u)
    a = compose(u, inverse(b))
    a_inv = inverse(a)
    # (x-1)b >= (x)u, so (x)a <= x - 1 and a^-1 escapes upward
    a_cert = EscapeCertificate(a_inv, "inverse of u b^-1, where b dominates u")
    c = translation_conjugator(b, b_cert)
    d = translation_conjugator(a_inv, a_cert)
    v = conjugate(_S, d)
    w = compose(inverse(d), c)
    return CommutatorWitnesses(u, v, w, (b_cert, a_cert))


def witnesses_in_interval(u: Automorphism) -> CommutatorWitnesses:
    """Witnesses for an automorphism of (-1, 1), computed on Q through psi."""
    if u.universe is not UNIT:
        raise UniverseMismatch("witnesses_in_interval expects a UnitInterval automorphism")
    if u is identity(UNIT):
        return CommutatorWitnesses(u, u, u)
    p = psi()
    inner = commutator_witnesses(transport(p, u))
    back = p.inverse()
    return CommutatorWitnesses(u, transport(back, inner.v), transport(back, inner.w),
                               inner.certificates)


def extend_from_unit(g: Automorphism) -> Automorphism:
    """The QLine automorphism acting as ``g`` on (-1, 1) and fixing everything else."""
    if g.universe is not UNIT:
        raise UniverseMismatch("extend_from_unit expects a UnitInterval automorphism")

    def f(x):
        return g.fwd(x) if -1 < x < 1 else x

    def b(y):
        return g.bwd(y) if -1 < y < 1 else y

    return FiberMap(QLINE, "extend", f, b)

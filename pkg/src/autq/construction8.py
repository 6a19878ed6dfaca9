"""The 8-letter universal sequence.

On Omega3 = Z x Z* x Q* the letters are

* ``a``: on row ``j = 0`` of slab ``i = 2n-1`` it acts as h_{2n-1}, on slab
  ``i = -2n`` as h_{2n}, where ``[h_{2n-1}, h_{2n}] = g_n`` on (-1, 1);
  identity elsewhere (including x outside (-1, 1) and x = inf);
* ``b``: ``(i, j, x) -> (i+1, j, x)``;
* ``c``: ``(i, j, x) -> (i, j+1, x)`` off slab 0, identity on slab 0.

Then ``[a^(b^(1-2n)), a^(b^(2n) c)]`` acts as g_n on the fibre
{0} x {0} x (-1, 1) and fixes everything else.

For a sequence on Q, the reduction produces Stab(I_4) targets; each block
(4i-1, 4i+3] of Q is one copy of Omega3 (plus a top point) through
:func:`autq.iso.phi_blocks8`, and the letters act blockwise.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .auto import Automorphism, FiberMap, conjugate, identity, inverse, power, translation, transport
from .commutator import CommutatorWitnesses, witnesses_in_interval
from .iso import phi_blocks8
from .order import BLOCKS3, INF, OMEGA3, QLINE, UNIT, UniverseMismatch, fmt_q, star_add
from .reduction import SequenceReduction
from .report import VerificationReport
from .words import Assignment, ConjugatedAssignment, Word, words_t, words_w8

__all__ = ["EightLetterBundle", "build_abc", "verify_thm8", "assemble_8letter", "Assembly8",
           "fibre_target", "in_omega0"]


def in_omega0(p) -> bool:
    """Membership in {0} x {0} x (-1, 1) of Omega3."""
    i, j, x = p
    return i == 0 and j == 0 and x is not INF and -1 < x < 1


def _shift(universe, coord: int, k: int, skip_zero_first: bool, name: str) -> FiberMap:
    """Add k to one coordinate (inf stays inf); optionally not on first coordinate 0."""
    off = 1 if universe is BLOCKS3 else 0   # BLOCKS3 carries the block index first

    def move(p, e):
        if p[off] is INF:           # the top point of a block
            return p
        if skip_zero_first and p[off] == 0:
            return p
        q = list(p)
        q[off + coord] = star_add(q[off + coord], e)
        return tuple(q)

    return FiberMap(universe, f"{name}^{k}" if k != 1 else name,
                    lambda p: move(p, k), lambda p: move(p, -k),
                    power=lambda e: _shift(universe, coord, k * e, skip_zero_first, name) if e * k else None)


@dataclass
class EightLetterBundle:
    """Letters a, b, c on Omega3 for targets g_1..g_K on (-1, 1).

    ``targets(k)`` returns g_k (a UnitInterval automorphism); witnesses are
    synthesised on first use and cached.
    """

    targets: Callable[[int], Automorphism]
    count: int
    witnesses: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self.a = FiberMap(OMEGA3, "a", lambda p: self._a(p, True), lambda p: self._a(p, False))
        self.b = _shift(OMEGA3, 0, 1, False, "b")
        self.c = _shift(OMEGA3, 1, 1, True, "c")

    def witness(self, k: int) -> CommutatorWitnesses:
        w = self.witnesses.get(k)
        if w is None:
            u = self.targets(k) if 1 <= k <= self.count else identity(UNIT)
            if u.universe is not UNIT:
                raise UniverseMismatch("8-letter targets live on (-1, 1)")
            w = self.witnesses[k] = witnesses_in_interval(u)
        return w

    def _a(self, p, forward: bool):
        i, j, x = p
        if j != 0 or x is INF or not -1 < x < 1:
            return p
        if i > 0 and i % 2 == 1:
            h = self.witness((i + 1) // 2).v
        elif i < 0 and i % 2 == 0:
            h = self.witness(-i // 2).w
        else:
            return p
        return (i, j, h.fwd(x) if forward else h.bwd(x))

    def assignment(self) -> Assignment:
        return Assignment({"a": self.a, "b": self.b, "c": self.c})


def build_abc(targets: Sequence[Automorphism] | Callable[[int], Automorphism], count: int | None = None,
              witnesses: dict | None = None) -> EightLetterBundle:
    """Bundle for a list of (-1, 1) targets, or a lazy provider ``k -> g_k`` with ``count``.

    ``witnesses`` may pre-seed ``k -> CommutatorWitnesses``; every supplied
    pair is checked against its target at a few points first.
    """
    if callable(targets):
        if count is None:
            raise ValueError("a target provider needs a count")
        provider = targets
    else:
        seq = list(targets)
        count = len(seq)
        provider = lambda k: seq[k - 1]  # noqa: E731
    bundle = EightLetterBundle(provider, count)
    for k, w in (witnesses or {}).items():
        w.check([mpq(n, 7) for n in range(-6, 7)])
        bundle.witnesses[k] = w
    return bundle


def verify_thm8(bundle: EightLetterBundle, n: int, samples, report: VerificationReport | None = None,
                off_samples=()) -> VerificationReport:
    """Compare ``words_w8(n)`` with g_n on the fibre and with the identity off it."""
    report = report or VerificationReport()
    word = bundle.assignment().evaluate(words_w8(n))
    target = bundle.targets(n) if n <= bundle.count else identity(UNIT)
    fmt = OMEGA3.fmt
    for x in samples:
        p = (0, 0, mpq(x))
        report.record(f"thm8 w_{n} on fibre", fmt(p), fmt(word.fwd(p)), fmt((0, 0, target.fwd(p[2]))))
    for p in off_samples:
        if in_omega0(p):
            continue
        report.record(f"thm8 w_{n} off fibre", fmt(p), fmt(word.fwd(p)), fmt(p))
    return report


# ---------------------------------------------------------------------------
# the blockwise letters on Q


def fibre_target(w: Automorphism, block: int) -> Automorphism:
    """Restriction of a Stab(I_4) element to window (4i, 4i+2), as a map of (-1, 1)."""
    base = mpq(4 * block + 1)
    return FiberMap(UNIT, f"block{block}", lambda x: w.fwd(x + base) - base,
                    lambda y: w.bwd(y + base) - base)


class _BlockLetters:
    """Per-block bundles, created lazily; the letters act on Blocks3."""

    def __init__(self, reduction: SequenceReduction):
        self.red = reduction
        self.bundles: dict[int, EightLetterBundle] = {}
        self.a = FiberMap(BLOCKS3, "a", lambda p: self._a(p, True), lambda p: self._a(p, False))
        self.b = _shift(BLOCKS3, 0, 1, False, "b")
        self.c = _shift(BLOCKS3, 1, 1, True, "c")

    def bundle(self, block: int) -> EightLetterBundle:
        bnd = self.bundles.get(block)
        if bnd is None:
            red = self.red
            bnd = self.bundles[block] = EightLetterBundle(
                lambda k: fibre_target(red.target(k), block), red.target_count)
        return bnd

    def _a(self, p, forward):
        if p[1] is INF:
            return p
        a = self.bundle(p[0]).a
        rest = a.fwd(p[1:]) if forward else a.bwd(p[1:])
        return (p[0],) + rest


@dataclass
class Assembly8:
    reduction: SequenceReduction = field(repr=False)
    words: list[Word]
    assignment: Assignment = field(repr=False)
    letters: _BlockLetters = field(repr=False)
    timings: dict = field(default_factory=dict)

    def target(self, n: int) -> Automorphism:
        return self.reduction.gs[n - 1]

    def verify(self, samples, report: VerificationReport | None = None) -> VerificationReport:
        report = report or VerificationReport()
        t0 = time.perf_counter()
        for n, w in enumerate(self.words, 1):
            ev = self.assignment.evaluate(w)
            g = self.target(n)
            report.compare(f"8-letter word {n} = g_{n}", samples, ev.fwd, g.fwd, fmt=fmt_q)
        report.timings["verify"] = time.perf_counter() - t0
        return report


def assemble_8letter(gs: Sequence[Automorphism], samples, n_max: int | None = None) -> Assembly8:
    """Words over {a, b, c, f} and an assignment on Q realising gs[0..n_max-1]."""
    for g in gs:
        if g.universe is not QLINE:
            raise UniverseMismatch("the input sequence lives on QLine")
    t0 = time.perf_counter()
    red = SequenceReduction(gs, 4, samples)
    t1 = time.perf_counter()
    letters = _BlockLetters(red)
    back = phi_blocks8().inverse()
    base = Assignment({
        "a": transport(back, letters.a), "b": transport(back, letters.b),
        "c": transport(back, letters.c), "f": translation(1),
    })
    asg = _untamed(red, base)
    n_max = len(gs) if n_max is None else n_max
    words = [words_t(n, words_w8, m=4) for n in range(1, n_max + 1)]
    return Assembly8(red, words, asg, letters, {"reduction": t1 - t0})


def _untamed(red: SequenceReduction, base: Assignment) -> Assignment:
    p = red.taming.p
    by = p if red.taming.direction == "p^-1" else inverse(p)
    return ConjugatedAssignment(by, base)

"""The two-letter universal sequence.

Omega4 = Z x Z* x Z* x Q*, points ``(i, j, m, x)``; slab i is the set of
points with first coordinate i and ``Omega_n = {n} x {0} x {0} x (-1, 1)``.
``f`` is the unit translation carried over by :func:`autq.iso.phi_main`, so
``f^4`` shifts slabs by one.

Given targets h_1, h_2, ... supported in the fibres Omega_n (n in 12Z), pick
``[k_{-m,n}, k_{m,n}] = h_m`` on Omega_n (k_{0,n} = id) and let ``kbar`` be
the induced maps of (-1, 1).  On slabs in 24Z (sign +1) and 24Z+12 (sign -1):

* ``a`` acts on ``(i, j, m, x)``, x in (-1, 1), by ``kbar_{sign*m, i}``, inverted when j is odd;
* ``b`` sends j to ``j + sign``; ``c`` sends m to ``m + sign``;
* ``d`` sends x to ``x + 2 sign`` unless ``(j, m) = (0, 0)``;

all four fix the other slabs and every inf coordinate.  The generator is
``g = ab * c^(f^4) * (b^-1)^(f^12) * d^(f^28)``, whose four parts live on
slabs 12Z, 12Z+1, 12Z+3, 12Z+7.  Because ``(ab)^2 = b^2`` every power of g
has a closed form.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

from gmpy2 import mpq

from .auto import (
    Automorphism, FiberMap, FuelExhausted, Transport, compose, get_fuel, identity, inverse, power,
    set_fuel, translation, transport,
)
from .commutator import CommutatorWitnesses, witnesses_in_interval
from .iso import OrderIso, phi_main
from .order import INF, OMEGA4, QLINE, UNIT, UniverseMismatch, fmt_q, star_add
from .reduction import SequenceReduction, word_chunk
from .report import VerificationReport
from .words import (
    Assignment, ConjugatedAssignment, Gen, Pow, Prod, TransportedAssignment, Word, expanded_text,
    letter_counts, parse_word, two_letter_encode, words_t, words_w2,
)

__all__ = [
    "TwoLetterBundle", "build_bundle", "verify_identities", "verify_main", "main_pipeline",
    "MainResult", "emit_explicit_sequence", "shifted_phi", "RELATOR", "in_fibres", "slab_sign",
]

#: (f^-48 g) f^48 (f^-48 g) f^96 (f^-48 g) f^48 (f^-48 g), over H = f^-48 g and F = f
RELATOR = parse_word("H F^48 H F^96 H F^48 H")


def slab_sign(i: int) -> int:
    r = i % 24
    return 1 if r == 0 else -1 if r == 12 else 0


def in_fibres(p) -> bool:
    """Membership in the union of Omega_n over n in 12Z."""
    i, j, m, x = p
    return i % 12 == 0 and j == 0 and m == 0 and x is not INF and -1 < x < 1


def _b_pow(p, s, t):
    i, j, m, x = p
    return (i, star_add(j, s * t), m, x)


def _c_pow(p, s, t):
    i, j, m, x = p
    return (i, j, star_add(m, s * t), x)


def _d_pow(p, s, t):
    i, j, m, x = p
    if (j, m) == (0, 0) or x is INF:
        return p
    return (i, j, m, x + 2 * s * t)


@dataclass
class TwoLetterBundle:
    """Letters and generator for targets h_1..h_count (Omega4 automorphisms).

    ``restriction(m, n)`` gives h_m on Omega_n as a map of (-1, 1); the
    default reads it off the target and checks that the fibre is preserved.
    """

    targets: Callable[[int], Automorphism]
    count: int
    restriction: Callable[[int, int], Automorphism] | None = None
    witnesses: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.restriction is None:
            self.restriction = self._restrict
        self.f = transport(phi_main(), translation(1))
        self.a = FiberMap(OMEGA4, "a", lambda p: self._a(p, 1), lambda p: self._a(p, -1))
        self.b = self._piece("b", _b_pow, 1)
        self.c = self._piece("c", _c_pow, 1)
        self.d = self._piece("d", _d_pow, 1)
        self.ab = self._ab(1)
        self.g = self._g(1)

    # -- witness tables ----------------------------------------------------

    def _restrict(self, m: int, n: int) -> Automorphism:
        h = self.targets(m)
        if h.universe is not OMEGA4:
            raise UniverseMismatch("two-letter targets live on Omega4")

        def fw(x, step=h.fwd):
            q = step((n, 0, 0, x))
            if q[:3] != (n, 0, 0) or q[3] is INF or not -1 < q[3] < 1:
                raise ValueError(f"target h_{m} does not preserve Omega_{n}")
            return q[3]

        return FunctionMap(fw, lambda y: fw(y, h.bwd), f"h_{m}|Omega_{n}")

    def witness(self, m: int, n: int) -> CommutatorWitnesses:
        key = (m, n)
        w = self.witnesses.get(key)
        if w is None:
            w = self.witnesses[key] = witnesses_in_interval(self.restriction(m, n))
        return w

    def kbar(self, m, n: int) -> Automorphism:
        """kbar_{m,n}: k_{-m,n} is the first witness, k_{m,n} the second."""
        if m is INF or m == 0 or abs(m) > self.count:
            return identity(UNIT)
        w = self.witness(abs(m), n)
        return w.w if m > 0 else w.v

    # -- letters -------------------------------------------------------------

    def _a(self, p, t):
        i, j, m, x = p
        s = slab_sign(i)
        if not s or j is INF or x is INF or not -1 < x < 1:
            return p
        k = self.kbar(m if m is INF else s * m, i)
        if j % 2:
            t = -t
        return (i, j, m, k.fwd(x) if t > 0 else k.bwd(x))

    def _piece(self, name, law, t):
        def move(p, e):
            s = slab_sign(p[0])
            return law(p, s, e) if s else p

        return FiberMap(OMEGA4, name if t == 1 else f"{name}^{t}", lambda p: move(p, t),
                        lambda p: move(p, -t),
                        power=lambda e: self._piece(name, law, t * e) if t * e else None)

    def _ab_move(self, p, t):
        """``(ab)^t``: b^t for even t, b^(t-1) a b for odd t."""
        s = slab_sign(p[0])
        if not s:
            return p
        if t % 2 == 0:
            return _b_pow(p, s, t)
        return _b_pow(self._a(_b_pow(p, s, t - 1), 1), s, 1)

    def _ab_back(self, p, t):
        # inverse of (ab)^t is (ab)^-t
        return self._ab_move(p, -t)

    def _ab(self, t):
        return FiberMap(OMEGA4, "ab" if t == 1 else f"(ab)^{t}", lambda p: self._ab_move(p, t),
                        lambda p: self._ab_back(p, t),
                        power=lambda e: self._ab(t * e) if t * e else None)

    def _g_move(self, p, t):
        i = p[0]
        r = i % 12
        if r == 0:
            return self._ab_move(p, t)
        if r == 1:
            law, src, t = _c_pow, i - 1, t
        elif r == 3:
            law, src, t = _b_pow, i - 3, -t
        elif r == 7:
            law, src, t = _d_pow, i - 7, t
        else:
            return p
        # the piece acts as the slab-src letter would; only the sign class of src matters
        return law(p, slab_sign(src), t)

    def _g(self, t):
        return FiberMap(OMEGA4, "g" if t == 1 else f"g^{t}", lambda p: self._g_move(p, t),
                        lambda p: self._g_move(p, -t),
                        power=lambda e: self._g(t * e) if t * e else None)

    def assignment(self) -> Assignment:
        return Assignment({"f": self.f, "g": self.g})

    def semigroup_assignment(self) -> Assignment:
        """``F -> f``, ``H -> f^-48 g``."""
        return Assignment({"F": self.f, "H": compose(power(self.f, -48), self.g)})

    def parts(self):
        """The four commuting parts of g, by name."""
        f = self.f
        return {
            "ab": self.ab,
            "c^(f^4)": _conj(self.c, power(f, 4)),
            "(b^-1)^(f^12)": _conj(inverse(self.b), power(f, 12)),
            "d^(f^28)": _conj(self.d, power(f, 28)),
        }


def _conj(x, by):
    from .auto import conjugate
    return conjugate(x, by)


class FunctionMap(Automorphism):
    """A UnitInterval automorphism given by two functions."""

    label = "FunctionMap"

    def __init__(self, fwd, bwd, name):
        super().__init__()
        self.universe = UNIT
        self._f, self._b, self.name = fwd, bwd, name

    def _fwd(self, x):
        return self._f(x)

    def _bwd(self, y):
        return self._b(y)

    def describe(self):
        return self.name


def build_bundle(targets: Sequence[Automorphism] | Callable[[int], Automorphism], count: int | None = None,
                 restriction: Callable[[int, int], Automorphism] | None = None) -> TwoLetterBundle:
    if callable(targets):
        if count is None:
            raise ValueError("a target provider needs a count")
        provider = targets
    else:
        seq = list(targets)
        count = len(seq)
        provider = lambda m: seq[m - 1]  # noqa: E731
    return TwoLetterBundle(provider, count, restriction)


# ---------------------------------------------------------------------------
# verification


def verify_identities(bundle: TwoLetterBundle, samples, report: VerificationReport | None = None,
                      shift_samples=None) -> VerificationReport:
    """The relations behind the two-letter encoding, exactly at Omega4 samples."""
    report = report or VerificationReport()
    fmt = OMEGA4.fmt
    f, b, c, d = bundle.f, bundle.b, bundle.c, bundle.d
    ab = compose(bundle.a, b)
    ab2, b2 = compose(ab, ab), power(b, 2)
    report.compare("(ab)^2 = b^2", samples, ab2.fwd, b2.fwd, fmt=fmt)
    rel = bundle.semigroup_assignment().evaluate(RELATOR)
    report.compare("relator (g^2)^(f^48) g^2 = 1", samples, rel.fwd, lambda p: p, fmt=fmt)
    f48 = power(f, 48)
    for name, x in (("b", b), ("c", c), ("d", d)):
        lhs = compose(inverse(f48), x, f48)
        report.compare(f"{name}^(f^48) = {name}^-1", samples, lhs.fwd, inverse(x).fwd, fmt=fmt)
    report.compare("bc = cb", samples, compose(b, c).fwd, compose(c, b).fwd, fmt=fmt)
    parts = bundle.parts()
    for p in samples:
        movers = [name for name, x in parts.items() if x.fwd(p) != p]
        report.record("parts of g have disjoint supports", fmt(p), str(len(movers) <= 1),
                      str(True))
    # f^4 evaluated through phi itself, not through the shift law
    f4 = Transport(phi_main(), translation(4))
    for p in shift_samples if shift_samples is not None else samples:
        report.record("f^4 shifts the first coordinate", fmt(p), fmt(f4.fwd(p)),
                      fmt((p[0] + 1,) + p[1:]))
    return report


def verify_main(bundle: TwoLetterBundle, m: int, samples, report: VerificationReport | None = None,
                off_samples=()) -> VerificationReport:
    """words_w2(m), ``[a^(c^m d), a^(c^-m)]`` and h_m agree on the fibres; the words fix the rest."""
    report = report or VerificationReport()
    fmt = OMEGA4.fmt
    word = bundle.assignment().evaluate(words_w2(m))
    a, c, d = bundle.a, bundle.c, bundle.d
    x1 = compose(inverse(compose(power(c, m), d)), a, power(c, m), d)
    x2 = compose(power(c, m), a, power(c, -m))
    direct = compose(inverse(x1), inverse(x2), x1, x2)
    h = bundle.targets(m) if m <= bundle.count else identity(OMEGA4)
    on = [p for p in samples if in_fibres(p)]
    report.compare(f"w_{m} = h_{m} on fibres", on, word.fwd, h.fwd, fmt=fmt)
    report.compare(f"[a^(c^m d), a^(c^-m)] = h_{m} on fibres (m={m})", on, direct.fwd, h.fwd, fmt=fmt)
    off = [p for p in list(samples) + list(off_samples) if not in_fibres(p)]
    report.compare(f"w_{m} fixes points off the fibres", off, word.fwd, lambda p: p, fmt=fmt)
    return report


# ---------------------------------------------------------------------------
# the pipeline


class _ShiftedPhi(OrderIso):
    """``x -> phi(x - 1)``: sends the windows [48s, 48s+2] onto the fibres Omega_{12s}."""

    domain, codomain, name = QLINE, OMEGA4, "phi(x-1)"

    def __init__(self):
        self.phi = phi_main()
        self.translation_law = self.phi.translation_law

    def fwd(self, x):
        return self.phi.fwd(x - 1)

    def bwd(self, w):
        return self.phi.bwd(w) + 1


_SHIFTED = _ShiftedPhi()


def shifted_phi() -> OrderIso:
    return _SHIFTED


def _window_restriction(red: SequenceReduction):
    def restrict(M: int, n: int) -> Automorphism:
        w = red.target(M)
        base = mpq(4 * n + 1)
        return FunctionMap(lambda x: w.fwd(x + base) - base, lambda y: w.bwd(y + base) - base,
                           f"w_{M}|window{n}")
    return restrict


def eq1_words(n_max: int, inner: Callable[[int], Word], m: int) -> list[Word]:
    """t_1..t_{n_max} built stage by stage: u_n, then v_n = u_{2n-1} u_{2n}^f, then chunks of 6n."""
    f = Gen("f")
    half = m // 2

    def u(n):
        return Prod(*[inner(half * (n - 1) + i) ^ Pow(f, 2 * i) for i in range(1, half + 1)])

    total = 3 * n_max * (n_max + 1)
    vs = [Prod(u(2 * N - 1), u(2 * N) ^ f) for N in range(1, total + 1)]
    return word_chunk(vs, [6 * n for n in range(1, n_max + 1)])


@dataclass
class MainResult:
    reduction: SequenceReduction = field(repr=False)
    bundle: TwoLetterBundle = field(repr=False)
    group_words: list[Word] = field(repr=False)
    words: list[Word] = field(repr=False)
    assignment: Assignment = field(repr=False)        # letters f, g on Q
    semigroup: Assignment = field(repr=False)         # letters F, H on Q
    timings: dict = field(default_factory=dict)

    @property
    def F(self) -> Automorphism:
        return self.semigroup["F"]

    @property
    def H(self) -> Automorphism:
        return self.semigroup["H"]

    def target(self, n: int) -> Automorphism:
        return self.reduction.gs[n - 1]

    def verify(self, samples, report: VerificationReport | None = None, mode: str = "decoded",
               indices=None, literal_fuel: int = 20_000) -> VerificationReport:
        """Compare the emitted words with the targets.

        ``decoded`` evaluates each word through its group form (every encoded
        block stands for the letter it encodes; see :func:`verify_identities`).
        ``literal`` evaluates the positive two-letter word letter by letter.
        Inside an encoded block the intermediate points can be pushed
        exponentially close to a fibre end, where the witness conjugators need
        a linear orbit search; points that exhaust ``literal_fuel`` are noted
        as inconclusive rather than recorded.
        """
        report = report or VerificationReport()
        t0 = time.perf_counter()
        indices = indices or range(1, len(self.words) + 1)
        for n in indices:
            name = f"2-letter word {n} = g_{n} ({mode})"
            if mode == "decoded":
                ev = self.assignment.evaluate(self.group_words[n - 1])
                report.compare(name, samples, ev.fwd, self.target(n).fwd, fmt=fmt_q)
            elif mode == "literal":
                ev = self.semigroup.evaluate(self.words[n - 1])
                saved = get_fuel()
                set_fuel(min(saved, literal_fuel))
                try:
                    for x in samples:
                        try:
                            y = ev.fwd(x)
                        except FuelExhausted:
                            report.note(f"{name}: inconclusive at {fmt_q(x)} (fuel {get_fuel()} exhausted)")
                            continue
                        report.record(name, fmt_q(x), fmt_q(y), fmt_q(self.target(n).fwd(x)))
                finally:
                    set_fuel(saved)
            else:
                raise ValueError(f"unknown mode {mode!r}")
        report.timings[f"verify-{mode}"] = report.timings.get(f"verify-{mode}", 0.0) + time.perf_counter() - t0
        return report


def main_pipeline(gs: Sequence[Automorphism], samples, n_max: int | None = None) -> MainResult:
    """Words over {F, H} and their assignment on Q realising gs[0..n_max-1]."""
    for g in gs:
        if g.universe is not QLINE:
            raise UniverseMismatch("the input sequence lives on QLine")
    t0 = time.perf_counter()
    red = SequenceReduction(gs, 48, samples)
    t1 = time.perf_counter()
    iso = shifted_phi()
    bundle = build_bundle(lambda M: transport(iso, red.target(M)), red.target_count,
                          restriction=_window_restriction(red))
    back = iso.inverse()
    p = red.taming.p
    by = p if red.taming.direction == "p^-1" else inverse(p)
    asg = ConjugatedAssignment(by, TransportedAssignment(back, bundle.assignment()))
    semi = ConjugatedAssignment(by, TransportedAssignment(back, bundle.semigroup_assignment()))
    n_max = len(gs) if n_max is None else n_max
    group_words = [words_t(n, words_w2, m=48) for n in range(1, n_max + 1)]
    words = [two_letter_encode(w) for w in group_words]
    t2 = time.perf_counter()
    return MainResult(red, bundle, group_words, words, asg, semi,
                      {"reduction": t1 - t0, "assembly": t2 - t1})


def emit_explicit_sequence(n_max: int, expanded: bool = False):
    """Yield ``(n, text, length, letter counts)`` for the two-letter words t_1..t_{n_max}.

    The words do not depend on any target.  ``expanded`` streams the letter
    runs (``F^48 H ...``) instead of the compact nested form.
    """
    if n_max < 1:
        raise ValueError("n_max >= 1")
    for n in range(1, n_max + 1):
        w = two_letter_encode(words_t(n, words_w2, m=48))
        text = " ".join(expanded_text(w)) if expanded else str(w)
        yield n, text, w.length, letter_counts(w)

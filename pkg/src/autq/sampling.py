"""Deterministic sample points.

QLine samples mix integers, half-integers and random rationals with bounded
denominators inside a window, plus any extra points (PL breakpoints).  The
product universes get structured samples that hit the distinguished fibres,
the star points and the generic region in fixed proportions.
"""
from __future__ import annotations

import random
from typing import Iterable

from gmpy2 import mpq

from .order import BLOCKS3, INF, OMEGA3, OMEGA4, QLINE, UNIT, Universe

__all__ = ["Sampler", "qline_samples", "unit_samples", "universe_samples"]


def _rational(rng: random.Random, lo: int, hi: int, max_den: int):
    den = rng.randint(1, max_den)
    return mpq(rng.randint(lo * den, hi * den), den)


def qline_samples(rng: random.Random, count: int, window: int = 60, max_den: int = 24,
                  extra: Iterable = ()) -> list:
    """``count`` points; the extras come first, then the mixture fills the rest."""
    pts = []
    seen = set()
    for x in extra:
        x = mpq(x)
        if x not in seen:
            seen.add(x)
            pts.append(x)
    pts = pts[:count]
    draws = 0
    while len(pts) < count:
        kind = draws % 4            # cycles even when one kind is exhausted in a small window
        draws += 1
        if kind == 0:
            x = mpq(rng.randint(-window, window))
        elif kind == 1:
            x = mpq(2 * rng.randint(-window, window) + 1, 2)
        else:
            x = _rational(rng, -window, window, max_den)
        if x not in seen:
            seen.add(x)
            pts.append(x)
    return pts


def unit_samples(rng: random.Random, count: int, max_den: int = 40) -> list:
    pts, seen = [], set()
    while len(pts) < count:
        den = rng.randint(2, max_den)
        x = mpq(rng.randint(-den + 1, den - 1), den)
        if x not in seen:
            seen.add(x)
            pts.append(x)
    return pts


def _star_int(rng, lo, hi, p_inf=0.1):
    return INF if rng.random() < p_inf else rng.randint(lo, hi)


def _star_q(rng, p_inf=0.1, p_unit=0.6):
    r = rng.random()
    if r < p_inf:
        return INF
    if r < p_inf + p_unit:
        den = rng.randint(2, 30)
        return mpq(rng.randint(-den + 1, den - 1), den)
    return _rational(rng, -6, 6, 12)


def _omega3_point(rng, span):
    r = rng.random()
    if r < 0.5:   # distinguished fibre rows
        return (rng.randint(-span, span), 0, _star_q(rng, 0.05, 0.85))
    return (rng.randint(-span, span), _star_int(rng, -4, 4), _star_q(rng))


def _omega4_point(rng, span):
    r = rng.random()
    if r < 0.4:
        return (rng.randint(-span, span), 0, 0, _star_q(rng, 0.05, 0.85))
    if r < 0.7:
        return (rng.randint(-span, span), _star_int(rng, -3, 3, 0.05), rng.randint(-6, 6),
                _star_q(rng, 0.05, 0.85))
    return (rng.randint(-span, span), _star_int(rng, -5, 5), _star_int(rng, -8, 8), _star_q(rng))


def universe_samples(universe: Universe, rng: random.Random, count: int, span: int = 60) -> list:
    """Distinct sample points of a named universe, in generation order."""
    if universe is QLINE:
        return qline_samples(rng, count, window=span)
    if universe is UNIT:
        return unit_samples(rng, count)
    gen = {
        OMEGA3: lambda: _omega3_point(rng, span),
        OMEGA4: lambda: _omega4_point(rng, span),
        BLOCKS3: lambda: ((rng.randint(-span, span), INF, INF, INF) if rng.random() < 0.05
                          else (rng.randint(-span, span),) + _omega3_point(rng, 3)),
    }.get(universe)
    if gen is None:
        raise ValueError(f"no sampler for {universe}")
    pts, seen = [], set()
    tries = 0
    while len(pts) < count:
        p = gen()
        tries += 1
        if p not in seen:
            seen.add(p)
            pts.append(p)
        elif tries > 50 * count:
            break
    return pts


class Sampler:
    """Seeded source of sample lists; each request draws from one stream."""

    def __init__(self, seed: int = 0):
        self.seed = seed
        self.rng = random.Random(seed)

    def qline(self, count: int, window: int = 60, extra: Iterable = ()) -> list:
        return qline_samples(self.rng, count, window=window, extra=extra)

    def unit(self, count: int) -> list:
        return unit_samples(self.rng, count)

    def of(self, universe: Universe, count: int, span: int = 60) -> list:
        return universe_samples(universe, self.rng, count, span)

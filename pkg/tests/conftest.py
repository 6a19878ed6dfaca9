import random

import pytest
from gmpy2 import mpq
from hypothesis import settings, strategies as st

from autq.auto import PiecewiseLinear
from autq.order import INF, OMEGA3, OMEGA4, QLINE, UNIT, BLOCKS3

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")

rationals = st.builds(
    lambda p, q: mpq(p, q),
    st.integers(-10**6, 10**6),
    st.integers(1, 10**4),
)

unit_points = rationals.map(lambda y: y / (1 + abs(y)))


def points_of(universe):
    """Points drawn through the canonical enumeration (hits every point eventually)."""
    if universe is QLINE:
        return rationals
    if universe is UNIT:
        return unit_points
    return st.integers(0, 10**7).map(universe.enumerate)


def random_pl(rng: random.Random, nbreaks=None):
    """A random increasing PL bijection of Q with small rational data."""
    n = rng.randint(0, 4) if nbreaks is None else nbreaks
    breaks = sorted({mpq(rng.randint(-40, 40), rng.randint(1, 4)) for _ in range(n)})
    slopes = [mpq(rng.randint(1, 9), rng.randint(1, 9)) for _ in range(len(breaks) + 1)]
    c0 = mpq(rng.randint(-10, 10), rng.randint(1, 3))
    inters = [c0]
    for i, b in enumerate(breaks):
        inters.append(slopes[i] * b + inters[i] - slopes[i + 1] * b)
    return PiecewiseLinear(breaks, slopes, inters)


@st.composite
def pl_maps(draw):
    return random_pl(random.Random(draw(st.integers(0, 2**32))))


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_b2(rng: random.Random):
    """A random PL map moving every point by at most 2."""
    pts = sorted({mpq(rng.randint(-60, 60), rng.randint(1, 3)) for _ in range(6)})
    ys, prev = [], None
    for p in pts:
        lo = p - 2 if prev is None else max(p - 2, prev + mpq(1, 100))
        ys.append(min(lo + (p + 2 - lo) * mpq(rng.randint(0, 100), 100), p + 2))
        prev = ys[-1]
    slopes, inters = [mpq(1)], [ys[0] - pts[0]]
    for (x0, y0), (x1, y1) in zip(zip(pts, ys), zip(pts[1:], ys[1:])):
        s = (y1 - y0) / (x1 - x0)
        slopes.append(s)
        inters.append(y0 - s * x0)
    slopes.append(mpq(1))
    inters.append(ys[-1] - pts[-1])
    return PiecewiseLinear(pts, slopes, inters)


def qpoints(seed: int, count: int = 100, window: int = 60):
    from autq.sampling import Sampler
    return Sampler(seed).qline(count, window=window)


def random_unit_pl(r: random.Random):
    """A random PL automorphism of (-1, 1) fixing nothing in particular."""
    k = r.randint(1, 4)
    xs = sorted({mpq(r.randint(-99, 99), 100) for _ in range(k)})
    ys = sorted({mpq(r.randint(-99, 99), 100) for _ in range(len(xs))})
    while len(ys) < len(xs):
        ys = sorted(set(ys) | {mpq(r.randint(-99, 99), 100)})
    pts = [(mpq(-1), mpq(-1))] + list(zip(xs, ys)) + [(mpq(1), mpq(1))]
    slopes, inters = [], []
    for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
        s = (y1 - y0) / (x1 - x0)
        slopes.append(s)
        inters.append(y0 - s * x0)
    return PiecewiseLinear(xs, slopes, inters, universe=UNIT)

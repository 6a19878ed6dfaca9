"""Sequence spec files.

::

    # options (all optional)
    letters 2          # 2 or 8
    samples 100
    seed 0
    n-max 2
    fuel 1000000

    # targets, in order
    pl g1
      seg -inf 0 1 0
      seg 0 inf 2 0
    end
    translation g2 1/2
    identity g3
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .auto import PLFormatError, PiecewiseLinear, identity, parse_pl_block, translation
from .order import QLINE, parse_q

__all__ = ["SequenceSpec", "SpecError", "parse_spec", "DEFAULTS", "describe_target"]

DEFAULTS = {"letters": 2, "samples": 100, "seed": 0, "n-max": None, "fuel": 1_000_000}


class SpecError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class SequenceSpec:
    names: list[str] = field(default_factory=list)
    targets: list = field(default_factory=list, repr=False)
    options: dict = field(default_factory=lambda: dict(DEFAULTS))
    text: str = ""

    def breakpoints(self) -> list:
        out = []
        for g in self.targets:
            if isinstance(g, PiecewiseLinear):
                out += list(g.breaks)
        return sorted(set(out))

    @property
    def n_max(self) -> int:
        n = self.options.get("n-max")
        return len(self.targets) if n is None else n


def _int_option(key, tok, line):
    try:
        v = int(tok)
    except ValueError:
        raise SpecError(f"{key} expects an integer, got {tok!r}", line) from None
    if key == "letters" and v not in (2, 8):
        raise SpecError("letters must be 2 or 8", line)
    if key in ("samples", "n-max", "fuel") and v < 1:
        raise SpecError(f"{key} must be positive", line)
    return v


def _is_identity_pl(g) -> bool:
    return isinstance(g, PiecewiseLinear) and not g.breaks and g.slopes[0] == 1 and g.intercepts[0] == 0


def parse_spec(text: str) -> SequenceSpec:
    spec = SequenceSpec(text=text)
    block = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if block is not None:
            if line == "end":
                name, start, lines = block
                try:
                    g = parse_pl_block(lines, name, QLINE)
                except PLFormatError as e:
                    raise SpecError(str(e).split(": ", 1)[-1] if e.line else str(e), e.line or start) from None
                spec.targets.append(identity(QLINE) if _is_identity_pl(g) else g)
                block = None
            else:
                block[2].append((lineno, line))
            continue
        key = toks[0]
        if key in DEFAULTS:
            if len(toks) != 2:
                raise SpecError(f"{key} takes one value", lineno)
            spec.options[key] = _int_option(key, toks[1], lineno)
        elif key == "pl":
            if len(toks) != 2:
                raise SpecError("expected 'pl NAME'", lineno)
            _new_name(spec, toks[1], lineno)
            block = (toks[1], lineno, [])
        elif key == "translation":
            if len(toks) != 3:
                raise SpecError("expected 'translation NAME R'", lineno)
            _new_name(spec, toks[1], lineno)
            try:
                r = parse_q(toks[2])
            except ValueError as e:
                raise SpecError(str(e), lineno) from None
            spec.targets.append(translation(r))
        elif key == "identity":
            if len(toks) != 2:
                raise SpecError("expected 'identity NAME'", lineno)
            _new_name(spec, toks[1], lineno)
            spec.targets.append(identity(QLINE))
        else:
            raise SpecError(f"unknown directive {key!r}", lineno)
    if block is not None:
        raise SpecError(f"block {block[0]!r} is missing 'end'", block[1])
    if not spec.targets:
        raise SpecError("no targets given")
    if spec.n_max > len(spec.targets):
        raise SpecError(f"n-max {spec.n_max} exceeds the {len(spec.targets)} targets")
    return spec


def _new_name(spec, name, line):
    if name in spec.names:
        raise SpecError(f"duplicate target name {name!r}", line)
    spec.names.append(name)


def describe_target(g) -> str:
    return g.describe()

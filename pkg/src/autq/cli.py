"""Command line: ``autq build``, ``autq verify``, ``autq eval``.

Exit codes: 0 verified, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from .auto import CertificationError, EvaluationError, set_fuel
from .order import QLINE, fmt_q, parse_q
from .report import VerificationReport
from .sampling import Sampler
from .specfile import SequenceSpec, SpecError, describe_target, parse_spec
from .words import WordError, letter_counts, letters, parse_word

__all__ = ["main", "Realization", "realize"]

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

FILES = ("spec.txt", "words.txt", "generators.txt", "manifest.json", "report.json")


class InputError(Exception):
    pass


@dataclass
class Realization:
    """The emitted words, their assignment on Q and a verifier, for either alphabet."""

    spec: SequenceSpec
    letters: int
    words: list
    alphabet: tuple
    generators: object          # Assignment over the emitted alphabet
    extra: object | None        # group-word assignment (two-letter case)
    result: object
    timings: dict

    def evaluate(self, word):
        used = letters(word)
        if used <= set(self.alphabet):
            return self.generators.evaluate(word)
        if self.extra is not None and used <= {"f", "g"}:
            return self.extra.evaluate(word)
        raise InputError(f"word uses letters {sorted(used - set(self.alphabet))} outside the alphabet "
                         f"{' '.join(self.alphabet)}")

    def verify(self, points, report: VerificationReport, literal: int = 0) -> VerificationReport:
        if self.letters == 8:
            return self.result.verify(points, report)
        self.result.verify(points, report, mode="decoded")
        if literal:
            self.result.verify(points[:literal], report, mode="literal", indices=[1])
        return report


def realize(spec: SequenceSpec, cert_points) -> Realization:
    n_max = spec.n_max
    t0 = time.perf_counter()
    if spec.options["letters"] == 8:
        from .construction8 import assemble_8letter
        res = assemble_8letter(spec.targets, cert_points, n_max)
        gens = res.assignment
        return Realization(spec, 8, res.words, ("a", "b", "c", "f"), gens, None, res,
                           {"build": time.perf_counter() - t0})
    from .construction2 import main_pipeline
    res = main_pipeline(spec.targets, cert_points, n_max)
    return Realization(spec, 2, res.words, ("F", "H"), res.semigroup, res.assignment, res,
                       {"build": time.perf_counter() - t0})


def _cert_points(spec: SequenceSpec):
    o = spec.options
    return Sampler(o["seed"]).qline(o["samples"], extra=spec.breakpoints())


def _load_spec(path: Path, overrides: dict) -> SequenceSpec:
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None
    try:
        spec = parse_spec(text)
    except SpecError as e:
        raise InputError(f"{path}: {e}") from None
    for k, v in overrides.items():
        if v is not None:
            spec.options[k] = v
    if spec.options["letters"] not in (2, 8):
        raise InputError("letters must be 2 or 8")
    if spec.n_max > len(spec.targets):
        raise InputError(f"n-max {spec.n_max} exceeds the {len(spec.targets)} targets")
    return spec


# ---------------------------------------------------------------------------
# artifact text


def words_text(real: Realization) -> str:
    lines = [f"# {real.letters}-letter universal sequence, alphabet {' '.join(real.alphabet)}",
             "# n length word"]
    for n, w in enumerate(real.words, 1):
        lines.append(f"{n} {w.length} {w}")
    return "\n".join(lines) + "\n"


def _describe_generators(real: Realization) -> list[str]:
    red = real.result.reduction
    conj = f"conjugated by the taming map p (direction {red.taming.direction})"
    if real.letters == 2:
        return [
            f"F: unit translation x -> x+1, {conj}",
            "H: f^-48 g, where g is the Omega4 generator ab c^(f^4) (b^-1)^(f^12) d^(f^28) "
            f"carried to Q by x -> phi(x-1), {conj}",
        ]
    return [
        "a: blockwise fibre map built from commutator witnesses of the Stab(I_4) targets, "
        f"carried to Q block by block, {conj}",
        f"b: first-coordinate shift in every block, {conj}",
        f"c: second-coordinate shift off slab 0 in every block, {conj}",
        f"f: unit translation, {conj}",
    ]


def generators_text(real: Realization, points) -> str:
    lines = ["# generators on Q; every 'value' line is re-checked by 'autq verify'"]
    lines += [f"# {d}" for d in _describe_generators(real)]
    lines.append("alphabet " + " ".join(real.alphabet))
    for letter in real.alphabet:
        g = real.generators[letter]
        for x in points:
            lines.append(f"value {letter} {fmt_q(x)} {fmt_q(g.fwd(x))}")
    return "\n".join(lines) + "\n"


def manifest(real: Realization) -> dict:
    spec, red = real.spec, real.result.reduction
    sigma = red.taming.sigma
    return {
        "format": "autq-artifacts-1",
        "letters": real.letters,
        "alphabet": list(real.alphabet),
        "options": {k: v for k, v in spec.options.items()},
        "n_max": spec.n_max,
        "targets": [{"name": n, "description": describe_target(g)} for n, g in zip(spec.names, spec.targets)],
        "stages": [
            {"stage": "taming", "direction": red.taming.direction,
             "sigma": {str(m): int(sigma(m)) for m in range(-4, 5)}},
            {"stage": "factorization", "radius": "1/3", "factors_per_index": "6n"},
            {"stage": "splitting", "window_period": red.m, "targets_used": red.target_count},
            {"stage": "assembly", "words": "grouped conjugate pattern, m = 4" if real.letters == 8 else
             "grouped conjugate pattern, m = 48, two-letter encoded"},
        ],
        "certificates": len(red.certificates),
        "words": [{"n": n, "length": w.length, "letters": letter_counts(w)}
                  for n, w in enumerate(real.words, 1)],
    }


# ---------------------------------------------------------------------------
# commands


def _emit(report: VerificationReport, fmt: str, out=None):
    out = out or sys.stdout
    out.write(report.to_json() if fmt == "json" else report.to_text())


def cmd_build(args) -> int:
    spec = _load_spec(Path(args.spec), _overrides(args))
    set_fuel(spec.options["fuel"])
    out = Path(args.out)
    t0 = time.perf_counter()
    cert_points = _cert_points(spec)
    real = realize(spec, cert_points)
    report = VerificationReport(seed=spec.options["seed"], samples=len(cert_points))
    try:
        real.verify(cert_points, report, literal=args.literal)
    except (CertificationError, EvaluationError) as e:
        report.record("pipeline", _witness(e), "error", str(e))
    report.timings.update(real.timings)
    report.timings["total"] = time.perf_counter() - t0
    out.mkdir(parents=True, exist_ok=True)
    (out / "spec.txt").write_text(spec.text)
    (out / "words.txt").write_text(words_text(real))
    (out / "generators.txt").write_text(generators_text(real, cert_points))
    (out / "manifest.json").write_text(json.dumps(manifest(real), indent=1, sort_keys=True) + "\n")
    (out / "report.json").write_text(report.to_json())
    (out / "timings.json").write_text(json.dumps(report.timings, indent=1, sort_keys=True) + "\n")
    _emit(report, args.format)
    return EXIT_OK if report.verdict else EXIT_FAIL


def _witness(e) -> str:
    w = getattr(e, "witness", None)
    return fmt_q(w) if w is not None else "-"


def _load_artifacts(path: Path):
    missing = [f for f in FILES if not (path / f).exists()]
    if missing:
        raise InputError(f"{path}: missing artifact files {', '.join(missing)}")
    try:
        man = json.loads((path / "manifest.json").read_text())
    except json.JSONDecodeError as e:
        raise InputError(f"{path / 'manifest.json'}: {e}") from None
    spec = _load_spec(path / "spec.txt", man.get("options", {}))
    return spec, man


def _check_words(real: Realization, path: Path, report: VerificationReport):
    stored = [ln for ln in (path / "words.txt").read_text().splitlines() if ln and not ln.startswith("#")]
    rebuilt = [ln for ln in words_text(real).splitlines() if ln and not ln.startswith("#")]
    for i in range(max(len(stored), len(rebuilt))):
        a = stored[i] if i < len(stored) else "<missing>"
        b = rebuilt[i] if i < len(rebuilt) else "<missing>"
        report.record("stored word text", str(i + 1), _digest(a), _digest(b))


def _digest(s: str) -> str:
    import hashlib
    return hashlib.sha256(s.encode()).hexdigest()[:16]


def _check_generators(real: Realization, path: Path, report: VerificationReport):
    for lineno, raw in enumerate((path / "generators.txt").read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.startswith("alphabet"):
            continue
        toks = line.split()
        if len(toks) != 4 or toks[0] != "value" or toks[1] not in real.alphabet:
            report.record("generator table syntax", f"line {lineno}", line, "value LETTER X Y")
            continue
        try:
            x, y = parse_q(toks[2]), parse_q(toks[3])
        except ValueError as e:
            report.record("generator table syntax", f"line {lineno}", line, str(e))
            continue
        report.record(f"generator {toks[1]} table", fmt_q(x), fmt_q(y),
                      fmt_q(real.generators[toks[1]].fwd(x)))


def cmd_verify(args) -> int:
    path = Path(args.artifacts)
    spec, man = _load_artifacts(path)
    set_fuel(args.fuel or spec.options["fuel"])
    real = realize(spec, _cert_points(spec))
    seed = spec.options["seed"] if args.seed is None else args.seed
    count = spec.options["samples"] if args.samples is None else args.samples
    points = Sampler(seed).qline(count, extra=spec.breakpoints())
    report = VerificationReport(seed=seed, samples=len(points))
    _check_words(real, path, report)
    _check_generators(real, path, report)
    try:
        real.verify(points, report, literal=args.literal)
    except (CertificationError, EvaluationError) as e:
        report.record("pipeline", _witness(e), "error", str(e))
    _emit(report, args.format)
    if not report.verdict:
        first = report.failures()[0]
        print(f"verification failed: {first.check} at {first.point}: {first.lhs} != {first.rhs}",
              file=sys.stderr)
    return EXIT_OK if report.verdict else EXIT_FAIL


def cmd_eval(args) -> int:
    path = Path(args.artifacts)
    spec, _ = _load_artifacts(path)
    set_fuel(args.fuel or spec.options["fuel"])
    try:
        word = parse_word(args.word)
    except WordError as e:
        raise InputError(f"bad word: {e}") from None
    try:
        x = parse_q(args.point)
    except ValueError as e:
        raise InputError(f"bad point: {e}") from None
    real = realize(spec, _cert_points(spec))
    value = real.evaluate(word).fwd(x)
    if args.format == "json":
        print(json.dumps({"word": str(word), "point": fmt_q(x), "value": fmt_q(value)}, sort_keys=True))
    else:
        print(fmt_q(value))
    return EXIT_OK


def _overrides(args) -> dict:
    return {"letters": args.letters, "samples": args.samples, "seed": args.seed,
            "n-max": args.n_max, "fuel": args.fuel}


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="autq", description="Universal sequences for Aut(Q, <=).")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, options=True):
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--fuel", type=int, default=None, help="iteration budget for lazy searches")
        if options:
            p.add_argument("--samples", type=int, default=None)
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--literal", type=int, default=2,
                           help="samples for letter-by-letter evaluation of the first two-letter word")

    b = sub.add_parser("build", help="build words, generators, manifest and report")
    b.add_argument("spec")
    b.add_argument("--out", "-o", default="artifacts")
    b.add_argument("--letters", type=int, choices=(2, 8), default=None)
    b.add_argument("--n-max", type=int, default=None)
    common(b)
    b.set_defaults(func=cmd_build)

    v = sub.add_parser("verify", help="re-run the sampled checks on built artifacts")
    v.add_argument("artifacts")
    common(v)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a word at a rational point")
    e.add_argument("artifacts")
    e.add_argument("--word", "-w", required=True)
    e.add_argument("--point", "-x", required=True)
    common(e, options=False)
    e.set_defaults(func=cmd_eval)
    return ap


def main(argv=None) -> int:
    ap = _parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    for key in ("samples", "n_max", "fuel"):
        v = getattr(args, key, None)
        if v is not None and v < 1:
            print(f"autq: --{key.replace('_', '-')} must be positive", file=sys.stderr)
            return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"autq: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

"""Verification reports: exact per-point records and a verdict."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

__all__ = ["CheckRecord", "VerificationReport"]


@dataclass(frozen=True)
class CheckRecord:
    check: str
    point: str
    lhs: str
    rhs: str
    equal: bool


@dataclass
class VerificationReport:
    """Records are kept in insertion order; the verdict is their conjunction.

    ``timings`` are wall-clock seconds per stage; they are excluded from
    :meth:`to_json` unless asked for, so that reports for one seed are
    byte-identical across runs.
    """

    seed: int | None = None
    samples: int = 0
    records: list[CheckRecord] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(r.equal for r in self.records)

    def record(self, check: str, point: str, lhs: str, rhs: str) -> bool:
        ok = lhs == rhs
        self.records.append(CheckRecord(check, point, lhs, rhs, ok))
        return ok

    def compare(self, check: str, points, lhs_fn, rhs_fn, fmt=str, stop_on_failure=False) -> bool:
        ok = True
        for x in points:
            good = self.record(check, fmt(x), fmt(lhs_fn(x)), fmt(rhs_fn(x)))
            ok &= good
            if not good and stop_on_failure:
                break
        return ok

    def note(self, text: str) -> None:
        self.notes.append(text)

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.records.extend(other.records)
        self.notes.extend(other.notes)
        for k, v in other.timings.items():
            self.timings[k] = self.timings.get(k, 0.0) + v
        return self

    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if not r.equal]

    def summary(self) -> dict[str, list[int]]:
        """Per check name: [passed, total]."""
        out: dict[str, list[int]] = {}
        for r in self.records:
            s = out.setdefault(r.check, [0, 0])
            s[0] += r.equal
            s[1] += 1
        return out

    # -- serialization ------------------------------------------------------

    def to_dict(self, timings: bool = False) -> dict:
        d = {
            "seed": self.seed,
            "samples": self.samples,
            "verdict": self.verdict,
            "notes": list(self.notes),
            "records": [asdict(r) for r in self.records],
        }
        if timings:
            d["timings"] = dict(self.timings)
        return d

    def to_json(self, timings: bool = False) -> str:
        return json.dumps(self.to_dict(timings), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        d = json.loads(text)
        rep = cls(seed=d["seed"], samples=d["samples"], notes=list(d.get("notes", [])),
                  timings=dict(d.get("timings", {})))
        rep.records = [CheckRecord(**r) for r in d["records"]]
        if rep.verdict != d["verdict"]:
            raise ValueError("stored verdict disagrees with the records")
        return rep

    def to_text(self, detail: bool = False) -> str:
        lines = [f"seed: {self.seed}", f"samples: {self.samples}",
                 f"verdict: {'VERIFIED' if self.verdict else 'FAILED'}"]
        for name, (ok, total) in self.summary().items():
            lines.append(f"  {name}: {ok}/{total}")
        for r in self.failures()[:20]:
            lines.append(f"  MISMATCH {r.check} at {r.point}: {r.lhs} != {r.rhs}")
        if detail:
            for r in self.records:
                lines.append(f"  {r.check} @ {r.point}: {r.lhs} {'==' if r.equal else '!='} {r.rhs}")
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"

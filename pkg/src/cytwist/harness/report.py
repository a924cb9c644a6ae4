"""Verification report types with JSON and CSV serialization."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .fit import ResidualModel

SCHEMA = "cytwist.report/1"
EXACT = "exact-pass"
FITTED = "pass-with-fitted-residual"
FAIL = "fail"
NO_DATA = "no-modular-data"
VERDICTS = (EXACT, FITTED, FAIL, NO_DATA)

CSV_COLUMNS = ["family", "d", "p", "chi", "n_base", "n_twist", "delta", "a_p", "residual", "verdict"]


@dataclass
class Row:
    p: int
    chi: int
    n_base: int
    n_twist: int
    delta: int
    a_p: int | None
    residual: int | None = None
    verdict: str = ""

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class TwistClassResult:
    family: str
    p: int
    base: int
    counts: dict
    verdict: str


@dataclass
class ModularTwistResult:
    label: str
    d: int
    level: int
    twisted_level: int | None
    level_note: str
    rows: list
    involutive: bool | None
    verdict: str


@dataclass
class VerificationReport:
    family: str
    d: int
    rows: list[Row]
    twist_class: str = EXACT
    modular: str = NO_DATA
    sign: int = 1
    a_p_source: str = ""
    residual_model: ResidualModel | None = None
    extension: Row | None = None
    status: str = "proved"
    notes: list[str] = field(default_factory=list)
    verdict: str = ""

    def finish(self):
        """Fill per-row residuals and verdicts, then the overall verdict."""
        for r in self.rows + ([self.extension] if self.extension else []):
            if r.a_p is None:
                r.residual, r.verdict = None, NO_DATA
                continue
            r.residual = r.delta - self.sign * (1 - r.chi) * r.a_p
            if r.chi == 1 and r.delta != 0:
                r.verdict = FAIL
            elif r.residual == 0:
                r.verdict = EXACT
            elif self.residual_model is not None and self.residual_model.value(r.p, r.chi) == r.residual:
                r.verdict = FITTED
            else:
                r.verdict = FAIL
        if self.twist_class == FAIL or self.modular == FAIL:
            self.verdict = FAIL
        else:
            self.verdict = self.modular
        return self

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "family": self.family,
            "d": self.d,
            "status": self.status,
            "a_p_source": self.a_p_source,
            "sign": self.sign,
            "verdicts": {"twist_class": self.twist_class, "modular": self.modular},
            "verdict": self.verdict,
            "residual_model": self.residual_model.to_dict() if self.residual_model else None,
            "rows": [r.to_dict() for r in self.rows],
            "extension": self.extension.to_dict() if self.extension else None,
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, data: dict) -> VerificationReport:
        if data.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {data.get('schema')!r}")
        rm = data.get("residual_model")
        ext = data.get("extension")
        return cls(
            data["family"],
            data["d"],
            [Row(**r) for r in data["rows"]],
            twist_class=data["verdicts"]["twist_class"],
            modular=data["verdicts"]["modular"],
            sign=data["sign"],
            a_p_source=data["a_p_source"],
            residual_model=ResidualModel.from_dict(rm) if rm else None,
            extension=Row(**ext) if ext else None,
            status=data["status"],
            notes=list(data["notes"]),
            verdict=data["verdict"],
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str) -> VerificationReport:
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            w.writerow([self.family, self.d, r.p, r.chi, r.n_base, r.n_twist, r.delta,
                        "" if r.a_p is None else r.a_p, "" if r.residual is None else r.residual, r.verdict])
        return buf.getvalue()

    def summary(self) -> str:
        lines = [
            f"{self.family} d={self.d}: {self.verdict} "
            f"(twist class {self.twist_class}, modular {self.modular}, sign {self.sign:+d})",
            f"  a_p source: {self.a_p_source}",
        ]
        if self.residual_model is not None:
            m = self.residual_model
            lines.append(f"  residual model: {m.describe()} (stable: {m.stable})")
        lines += [f"  note: {n}" for n in self.notes]
        return "\n".join(lines)

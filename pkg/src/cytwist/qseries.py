"""Exact q-expansions: eta quotients, quadratic twists, and level arithmetic."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import gcd
from pathlib import Path
from typing import Iterable, Sequence

from .charfield import QuadraticCharacterSpec, chi_eval, is_prime, primes_up_to


class PrecisionError(IndexError):
    pass


class NoSimpleAnswer(ValueError):
    """Level of a twist when the character conductor shares a prime with N."""


@dataclass(frozen=True)
class QExpansion:
    """Coefficients c_1, ..., c_B of a cusp form.

    ``None`` marks a coefficient that is not known (sparse external data).
    """

    coeffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(self.coeffs))

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int) -> int:
        return coefficient(self, n)

    def __add__(self, other: QExpansion) -> QExpansion:
        B = min(self.precision, other.precision)
        return QExpansion(
            None if a is None or b is None else a + b
            for a, b in zip(self.coeffs[:B], other.coeffs[:B])
        )

    def __neg__(self) -> QExpansion:
        return QExpansion(None if a is None else -a for a in self.coeffs)

    def __sub__(self, other: QExpansion) -> QExpansion:
        return self + (-other)

    def scale(self, k: int) -> QExpansion:
        return QExpansion(None if a is None else k * a for a in self.coeffs)

    def truncate(self, B: int) -> QExpansion:
        if B > self.precision:
            raise PrecisionError(f"requested {B} > precision {self.precision}")
        return QExpansion(self.coeffs[:B])

    def known(self, n: int) -> bool:
        return 1 <= n <= self.precision and self.coeffs[n - 1] is not None


def coefficient(f: QExpansion, n: int) -> int:
    if not 1 <= n <= f.precision:
        raise PrecisionError(f"index {n} outside 1..{f.precision}")
    c = f.coeffs[n - 1]
    if c is None:
        raise PrecisionError(f"coefficient {n} is not known")
    return c


# -- truncated power series in q, index 0 = constant term ------------------


def _mul(a: Sequence[int], b: Sequence[int], L: int) -> list[int]:
    out = [0] * L
    for i, ai in enumerate(a[:L]):
        if ai:
            for j in range(min(len(b), L - i)):
                out[i + j] += ai * b[j]
    return out


def _inverse(a: Sequence[int], L: int) -> list[int]:
    """Inverse of a series with constant term 1."""
    if a[0] != 1:
        raise ValueError("series inversion needs constant term 1")
    inv = [0] * L
    inv[0] = 1
    for n in range(1, L):
        inv[n] = -sum(a[k] * inv[n - k] for k in range(1, min(n, len(a) - 1) + 1))
    return inv


def _power(a: list[int], r: int, L: int) -> list[int]:
    base = a if r >= 0 else _inverse(a, L)
    r = abs(r)
    out = [1] + [0] * (L - 1)
    while r:
        if r & 1:
            out = _mul(out, base, L)
        r >>= 1
        if r:
            base = _mul(base, base, L)
    return out


@dataclass(frozen=True)
class EtaQuotient:
    """prod eta(q^m)^r, stored as ((m, r), ...)."""

    factors: tuple

    def __post_init__(self):
        factors = tuple((int(m), int(r)) for m, r in self.factors)
        if any(m < 1 for m, _ in factors):
            raise ValueError("eta arguments must be positive")
        object.__setattr__(self, "factors", factors)

    @classmethod
    def parse(cls, text: str) -> EtaQuotient:
        """``"4:16,8:-4,2:-4"`` -> eta(q^4)^16 eta(q^8)^-4 eta(q^2)^-4."""
        pairs = []
        for chunk in text.replace(" ", "").split(","):
            if not chunk:
                continue
            m, _, r = chunk.partition(":")
            pairs.append((int(m), int(r or 1)))
        return cls(tuple(pairs))

    @property
    def order_numerator(self) -> int:
        return sum(m * r for m, r in self.factors)

    @property
    def leading_power(self) -> int:
        s = self.order_numerator
        if s % 24:
            raise ValueError(f"sum m*r = {s} is not divisible by 24")
        return s // 24

    @property
    def weight(self) -> int:
        return sum(r for _, r in self.factors) // 2

    def __str__(self):
        return " ".join(f"eta(q^{m})^{r}" for m, r in self.factors)


def expand_eta_quotient(eq: EtaQuotient, B: int) -> QExpansion:
    """q-expansion of ``eq`` with coefficients c_1..c_B."""
    if B < 1:
        raise ValueError("precision must be positive")
    lead = eq.leading_power
    if lead > B:
        raise ValueError(f"leading power q^{lead} beyond precision {B}")
    if lead < 1:
        raise ValueError(f"leading power q^{lead} is not a cusp form")
    L = B - lead + 1
    series = [1] + [0] * (L - 1)
    for m, r in eq.factors:
        # prod_n (1 - q^{mn}) truncated at q^{L-1}
        euler = [1] + [0] * (L - 1)
        for n in range(1, (L - 1) // m + 1):
            k = m * n
            euler = [c - (euler[i - k] if i >= k else 0) for i, c in enumerate(euler)]
        series = _mul(series, _power(euler, r, L), L)
    coeffs = [0] * B
    for i, c in enumerate(series):
        coeffs[lead + i - 1] = c
    return QExpansion(coeffs)


def twist_expansion(f: QExpansion, spec: QuadraticCharacterSpec, B: int | None = None) -> QExpansion:
    """g_n = chi(n) f_n for every n <= B."""
    B = f.precision if B is None else B
    if B > f.precision:
        raise PrecisionError(f"requested {B} > precision {f.precision}")
    return QExpansion(
        None if c is None else chi_eval(spec, n) * c
        for n, c in enumerate(f.coeffs[:B], start=1)
    )


def twisted_level(N: int, spec: QuadraticCharacterSpec) -> int:
    if N < 1:
        raise ValueError("level must be positive")
    if gcd(N, spec.D) != 1:
        raise NoSimpleAnswer(
            f"gcd(N={N}, D={spec.D}) > 1: the level of the twist has no simple answer"
        )
    return N * spec.D * spec.D


def deligne_bound_ok(a: int, p: int, weight: int = 4) -> bool:
    """|a| <= 2 p^{(k-1)/2}, decided exactly via a^2 <= 4 p^{k-1}."""
    return a * a <= 4 * p ** (weight - 1)


@dataclass
class DeligneReport:
    checked: list[int] = field(default_factory=list)
    violations: list[tuple[int, int]] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def deligne_check(f: QExpansion, primes: Iterable[int], level: int = 1, weight: int = 4) -> DeligneReport:
    rep = DeligneReport()
    for p in primes:
        if level % p == 0 or not f.known(p):
            rep.skipped.append(p)
            continue
        rep.checked.append(p)
        a = f.coeffs[p - 1]
        if not deligne_bound_ok(a, p, weight):
            rep.violations.append((p, a))
    return rep


# -- newform records -------------------------------------------------------

NOT_ETA_GIVEN = "not-eta-given"


@dataclass(frozen=True)
class NewformRecord:
    label: str
    level: int
    weight: int = 4
    eta: EtaQuotient | None = None
    family: str | None = None
    external: QExpansion | None = None
    # values the literature reports but which are not trusted as coefficients
    claimed: tuple = ()

    @property
    def eta_status(self) -> str:
        return str(self.eta) if self.eta is not None else NOT_ETA_GIVEN

    @property
    def has_data(self) -> bool:
        return self.eta is not None or self.external is not None

    def expansion(self, B: int) -> QExpansion:
        if self.eta is not None:
            return expand_eta_quotient(self.eta, B)
        if self.external is not None:
            if self.external.precision >= B:
                return self.external.truncate(B)
            return QExpansion(self.external.coeffs + (None,) * (B - self.external.precision))
        raise LookupError(f"{self.label}: no coefficient data ({NOT_ETA_GIVEN})")

    def with_external(self, f: QExpansion) -> NewformRecord:
        return NewformRecord(self.label, self.level, self.weight, self.eta, self.family, f, self.claimed)


# The six Beauville fiber products and their eta quotients, plus forms named elsewhere.
_RECORDS = [
    NewformRecord("beauville-I", 9, eta=EtaQuotient(((3, 8),)), family="beauville-I"),
    NewformRecord("beauville-II", 8, eta=EtaQuotient(((2, 4), (4, 4))), family="beauville-II"),
    NewformRecord("beauville-III", 5, eta=EtaQuotient(((1, 4), (5, 4))), family="beauville-III"),
    NewformRecord(
        "beauville-IV", 6, eta=EtaQuotient(((1, 2), (2, 2), (3, 2), (6, 2))), family="beauville-IV"
    ),
    NewformRecord("beauville-V", 16, eta=EtaQuotient(((4, 16), (8, -4), (2, -4))), family="beauville-V"),
    NewformRecord("beauville-VI", 9, eta=EtaQuotient(((3, 8),)), family="beauville-VI"),
    NewformRecord("v33", 9, eta=EtaQuotient(((3, 8),)), family="v33"),
    # the unique weight-4 newform on Gamma_0(8) coincides with type II's eta product
    NewformRecord("vgn", 8, eta=EtaQuotient(((2, 4), (4, 4))), family="vgn"),
    NewformRecord("v24", 12, family="v24"),
    NewformRecord("schoen-25", 25, family="schoen-quintic", claimed=((2, -84),)),
    NewformRecord("level5", 5, eta=EtaQuotient(((1, 4), (5, 4)))),
]

NEWFORMS: dict[str, NewformRecord] = {r.label: r for r in _RECORDS}


def get_newform(label: str) -> NewformRecord:
    try:
        return NEWFORMS[label]
    except KeyError:
        raise KeyError(f"unknown newform {label!r}; known: {', '.join(NEWFORMS)}") from None


# -- coefficient files -----------------------------------------------------


def expansion_to_json(label: str, level: int, f: QExpansion) -> dict:
    return {
        "label": label,
        "level": level,
        "coeffs": [None if c is None else str(c) for c in f.coeffs],
    }


def load_coefficients(path: str | Path) -> NewformRecord:
    """Read a coefficient file.

    Accepted keys: ``label``, ``level``, ``weight`` (default 4) and either a
    dense ``coeffs`` list (c_1 first, ``null`` for unknown) or a sparse
    ``ap`` mapping ``{"2": "-1", ...}``.  Integers may be strings.
    """
    data = json.loads(Path(path).read_text())
    label = data["label"]
    level = int(data["level"])
    if "coeffs" in data:
        coeffs = [None if c is None else int(c) for c in data["coeffs"]]
    else:
        sparse = {int(k): int(v) for k, v in data["ap"].items()}
        coeffs = [sparse.get(n) for n in range(1, max(sparse) + 1)]
    base = NEWFORMS.get(label)
    claimed = base.claimed if base is not None else ()
    family = data.get("family", base.family if base is not None else None)
    return NewformRecord(
        label, level, int(data.get("weight", 4)), None, family, QExpansion(coeffs), claimed
    )


# -- twist minimality ------------------------------------------------------


@dataclass
class CandidateVerdict:
    label: str
    level: int
    excluded: bool
    witness: tuple | None  # (p, c_p(f), c_p(g)) of the first mismatch
    compared: list[int]

    @property
    def text(self) -> str:
        if self.excluded:
            p, a, b = self.witness
            return f"{self.label} is not a quadratic twist (p={p}: |{a}| != |{b}|)"
        return f"{self.label}: cannot exclude (|c_p| agree at {len(self.compared)} primes)"


@dataclass
class MinimalityReport:
    label: str
    level: int
    candidates: list[CandidateVerdict]
    deligne: DeligneReport
    claimed_flags: list[str]

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "level": self.level,
            "candidates": [
                {
                    "label": c.label,
                    "level": c.level,
                    "excluded": c.excluded,
                    "witness": list(c.witness) if c.witness else None,
                    "verdict": c.text,
                }
                for c in self.candidates
            ],
            "deligne_violations": self.deligne.violations,
            "claimed_flags": self.claimed_flags,
        }


def twist_minimality_report(
    f: NewformRecord, candidates: Sequence[NewformRecord], pmax: int = 50
) -> MinimalityReport:
    """Compare |c_p| of ``f`` against each candidate at common good primes.

    Twisting by a quadratic character only changes signs at good primes, so
    a single absolute-value mismatch rules a candidate out.
    """
    if not candidates:
        raise ValueError("empty candidate list")
    fe = f.expansion(pmax)
    verdicts = []
    for g in candidates:
        ge = g.expansion(pmax)
        compared, witness = [], None
        for p in primes_up_to(pmax):
            if f.level % p == 0 or g.level % p == 0:
                continue
            if not (fe.known(p) and ge.known(p)):
                continue
            compared.append(p)
            a, b = fe[p], ge[p]
            if abs(a) != abs(b):
                witness = (p, a, b)
                break
        verdicts.append(CandidateVerdict(g.label, g.level, witness is not None, witness, compared))
    flags = []
    for n, value in f.claimed:
        if is_prime(n) and not deligne_bound_ok(value, n, f.weight):
            derived = fe.coeffs[n - 1] if fe.known(n) else None
            flags.append(
                f"claimed c_{n} = {value} violates the Deligne bound |a_{n}| <= 2*{n}^({f.weight - 1}/2); "
                f"not a normalized newform coefficient (coefficient data gives {derived})"
            )
    return MinimalityReport(f.label, f.level, verdicts, deligne_check(fe, primes_up_to(pmax), f.level, f.weight), flags)

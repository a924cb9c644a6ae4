"""Exact sparse fitting of point-count residuals.

The residual of a twist comparison only appears where the twisting
character is -1, so the basis functions are

    (1 - chi_d(p)) / 2 * psi(p) * p^k,    k in {0, 1, 2},

with psi the trivial character or a small quadratic character (classes of
algebraic cycles defined over a quadratic field carry such a twist).  Fits
are exact over the rationals and must have integer coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from ..charfield import kronecker

# discriminants of the auxiliary characters; 1 is the trivial character
AUX_DISCRIMINANTS = (1, -4, -3, 8, -8, 5, 12)
MAX_TERMS = 3


@dataclass(frozen=True)
class Term:
    disc: int  # psi = (disc / .)
    power: int
    coeff: int

    def value(self, p: int) -> int:
        return kronecker(self.disc, p) * self.coeff * p**self.power

    def label(self) -> str:
        psi = "" if self.disc == 1 else f"chi_{self.disc}(p)*"
        pk = {0: "1", 1: "p"}.get(self.power, f"p^{self.power}")
        return f"{self.coeff}*{psi}{pk}"


@dataclass
class ResidualModel:
    terms: list[Term] = field(default_factory=list)
    fit_primes: list[int] = field(default_factory=list)
    validated_primes: list[int] = field(default_factory=list)
    stable: bool | None = None

    def value(self, p: int, chi: int) -> int:
        if chi == 1:
            return 0
        return sum(t.value(p) for t in self.terms) * (1 - chi) // 2

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def describe(self) -> str:
        if not self.terms:
            return "0"
        return "(1 - chi_d(p))/2 * (" + " + ".join(t.label() for t in self.terms) + ")"

    def to_dict(self) -> dict:
        return {
            "terms": [{"disc": t.disc, "power": t.power, "coeff": t.coeff} for t in self.terms],
            "formula": self.describe(),
            "fit_primes": self.fit_primes,
            "validated_primes": self.validated_primes,
            "stable": self.stable,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ResidualModel:
        return cls(
            [Term(t["disc"], t["power"], t["coeff"]) for t in d["terms"]],
            list(d["fit_primes"]),
            list(d["validated_primes"]),
            d["stable"],
        )


def _solve(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction] | None:
    """Gauss-Jordan on a square system; None if singular."""
    n = len(rows)
    m = [r[:] + [b] for r, b in zip(rows, rhs)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col] / m[col][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[col])]
    return [m[i][n] / m[i][i] for i in range(n)]


def _basis(disc: int, power: int, p: int) -> int:
    return kronecker(disc, p) * p**power


def _supports(max_terms: int, discs: Sequence[int]):
    cols = [(d, k) for d in discs for k in range(3)]
    plain = [c for c in cols if c[0] == 1]
    # the pure polynomial models come first
    for size in range(1, 4):
        yield from combinations(plain, size)
    for size in range(1, max_terms + 1):
        for combo in combinations(cols, size):
            if any(c[0] != 1 for c in combo):
                yield combo


def fit_residual(points: Sequence[tuple[int, int]], min_extra: int = 2,
                 discs: Sequence[int] = AUX_DISCRIMINANTS, max_terms: int = MAX_TERMS) -> ResidualModel | None:
    """Sparsest model matching ``points`` = [(p, residual)] on twisting rows.

    For each candidate support of size m the coefficients come from the
    first m rows that give a nonsingular system; every remaining row must
    then agree exactly, and at least ``min_extra`` rows must be left over as
    validation.  Returns None if nothing fits.
    """
    points = list(points)
    if all(e == 0 for _, e in points):
        return ResidualModel([], [p for p, _ in points], [], None)
    for support in _supports(max_terms, discs):
        m = len(support)
        if len(points) < m + min_extra:
            continue
        chosen, rows, rhs = [], [], []
        for p, e in points:
            row = [Fraction(_basis(d, k, p)) for d, k in support]
            trial = rows + [row]
            if len(trial) <= m and _rank(trial) == len(trial):
                rows, rhs = trial, rhs + [Fraction(e)]
                chosen.append(p)
            if len(rows) == m:
                break
        if len(rows) < m:
            continue
        sol = _solve(rows, rhs)
        if sol is None or any(c.denominator != 1 or c == 0 for c in sol):
            continue
        terms = [Term(d, k, int(c)) for (d, k), c in zip(support, sol)]
        model = ResidualModel(terms, chosen, [p for p, _ in points if p not in chosen])
        if all(sum(t.value(p) for t in terms) == e for p, e in points):
            return model
    return None


def _rank(rows: list[list[Fraction]]) -> int:
    m = [r[:] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                f = m[r][col] / m[rank][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank

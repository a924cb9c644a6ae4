"""Residue forms wedge(dx_j) / D_I on complete intersections and involution signs.

On the chart where the chart coordinate(s) and the Jacobian minor D_I do not
vanish, the holomorphic top form is the wedge of the remaining coordinate
differentials divided by D_I.  An involution acting by a signed permutation
pulls it back to (sign on the numerator) * (sign of D_I o iota) times itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

import numpy as np

from .varieties.core import InvolutionSpec, VarietySpec, involution_check
from .varieties.polynomial import Poly


class FormNotSemiInvariant(ValueError):
    """D_I o iota is not +-D_I, or iota does not preserve the chart."""


def determinant(m: Sequence[Sequence[Poly]]) -> Poly:
    """Cofactor expansion along the first row."""
    k = len(m)
    if k == 1:
        return m[0][0]
    out = None
    for j in range(k):
        if m[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        term = m[0][j] * determinant(minor)
        if j % 2:
            term = -term
        out = term if out is None else out + term
    return out if out is not None else Poly(m[0][0].nvars)


def _indices(v: VarietySpec, items) -> tuple:
    return tuple(sorted(v.index(i) if isinstance(i, str) else int(i) for i in items))


def jacobian_minor(v: VarietySpec, I: Sequence) -> Poly:
    """det(d f_i / d x_j) for the equations f_i and the columns j in I (ascending)."""
    cols = _indices(v, I)
    if len(cols) != len(v.equations):
        raise ValueError(f"|I| = {len(cols)} but {v.id} has {len(v.equations)} equations")
    if any(not 0 <= j < v.nvars for j in cols):
        raise IndexError(f"column index out of range for {v.id}")
    return determinant([[eq.diff(j) for j in cols] for eq in v.equations])


@dataclass(frozen=True)
class ResidueFormSpec:
    variety: VarietySpec
    chart: tuple  # one coordinate index per projective factor (i_0)
    I: tuple
    D: Poly = field(compare=False, repr=False, default=None)

    def __post_init__(self):
        v = self.variety
        chart = _indices(v, [self.chart] if isinstance(self.chart, (int, str)) else self.chart)
        I = _indices(v, self.I)
        object.__setattr__(self, "chart", chart)
        object.__setattr__(self, "I", I)
        if len(I) != len(v.equations):
            raise ValueError(f"|I| must equal the number of equations ({len(v.equations)})")
        if set(chart) & set(I):
            raise ValueError("chart coordinates and I must be disjoint")
        for block in v.grading:
            if len(set(block) & set(chart)) != 1:
                raise ValueError("exactly one chart coordinate per projective factor")
        w = v.weights or (1,) * v.nvars
        if any(w[c] != 1 for c in chart):
            raise ValueError("chart coordinates must have weight 1")
        D = jacobian_minor(v, I)
        if D.is_zero():
            raise ValueError(f"D_I vanishes identically for I = {I}")
        object.__setattr__(self, "D", D)

    @property
    def numerator(self) -> tuple:
        used = set(self.chart) | set(self.I)
        return tuple(j for j in range(self.variety.nvars) if j not in used)

    def describe(self) -> str:
        c = self.variety.coords
        num = "^".join(f"d{c[j]}" for j in self.numerator)
        return (
            f"chart {','.join(c[i] for i in self.chart)} = 1, I = {{{','.join(c[i] for i in self.I)}}}: "
            f"{num} / ({self.D.to_str(c)})"
        )


def _normalize(v: VarietySpec, inv: InvolutionSpec, chart: Sequence[int]) -> InvolutionSpec:
    """Rescale each projective factor so the chart coordinate is fixed with sign +1."""
    w = v.weights or (1,) * v.nvars
    signs = list(inv.signs)
    for c in chart:
        if inv.perm[c] != c:
            raise FormNotSemiInvariant(f"{inv.name} moves the chart coordinate {v.coords[c]}")
        if signs[c] < 0:
            block = next(b for b in v.grading if c in b)
            for i in block:
                signs[i] *= (-1) ** w[i]
    return InvolutionSpec(inv.name, inv.perm, tuple(signs))


def _parity(seq: Sequence[int]) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


@dataclass(frozen=True)
class SignResult:
    sign: int
    numerator_sign: int
    denominator_sign: int
    form: ResidueFormSpec

    def describe(self) -> str:
        return f"sign {self.sign:+d} ({self.form.describe()})"


def pullback_sign_detail(form: ResidueFormSpec, inv: InvolutionSpec, check: bool = True) -> SignResult:
    v = form.variety
    if check:
        involution_check(v, inv)
    inv = _normalize(v, inv, form.chart)
    num = form.numerator
    if sorted(inv.perm[j] for j in num) != list(num):
        raise FormNotSemiInvariant(f"{inv.name} does not preserve the numerator coordinates")
    s_num = _parity([inv.perm[j] for j in num])
    for j in num:
        s_num *= inv.signs[j]
    image = inv.apply(form.D)
    if image == form.D:
        eps = 1
    elif image == -form.D:
        eps = -1
    else:
        raise FormNotSemiInvariant("D_I o iota is not +-D_I; try another chart")
    return SignResult(s_num * eps, s_num, eps, form)


def pullback_sign(form: ResidueFormSpec, inv: InvolutionSpec) -> int:
    """The scalar s with iota^* Omega = s * Omega."""
    return pullback_sign_detail(form, inv).sign


def admissible_charts(v: VarietySpec, inv: InvolutionSpec) -> list[SignResult]:
    """Every (chart, I) for which the sign is defined, with its sign."""
    involution_check(v, inv)
    w = v.weights or (1,) * v.nvars
    choices = [[i for i in b if w[i] == 1] for b in v.grading]
    out = []
    for chart in product(*choices):
        rest = [i for i in range(v.nvars) if i not in chart]
        for I in combinations(rest, len(v.equations)):
            try:
                form = ResidueFormSpec(v, chart, I)
                out.append(pullback_sign_detail(form, inv, check=False))
            except (FormNotSemiInvariant, ValueError):
                continue
    return out


def local_fixed_sign(e1: int, e2: int, e3: int) -> tuple[int, int]:
    """(e1*e2*e3, dimension of the fixed locus) for iota = diag(e1, e2, e3)."""
    es = (e1, e2, e3)
    if any(e not in (1, -1) for e in es):
        raise ValueError("local signs must be +-1")
    return e1 * e2 * e3, sum(1 for e in es if e == 1)


def local_model_check(v: VarietySpec, inv: InvolutionSpec, primes: Sequence[int] = (5, 7, 11, 13)):
    """Compare the chart sign with the local model at an explicit fixed point.

    Only for diagonal involutions.  Searches for a chart with D_I o iota = D_I
    and an F_p-point on the fixed locus (negated coordinates zero) where
    D_I does not vanish, so the numerator coordinates are local eigen
    coordinates there.  Returns (chart sign, local sign, fixed dimension,
    form, point) or None when no witness is found.
    """
    if any(inv.perm[i] != i for i in range(v.nvars)):
        raise ValueError("local model check needs a diagonal involution")
    charts = [r for r in admissible_charts(v, inv) if r.denominator_sign == 1]
    for p in primes:
        found = _fixed_point_witness(v, inv, charts, p)
        if found is not None:
            return found
    return None


def _fixed_point_witness(v, inv, charts, p):
    for res in charts:
        form = res.form
        norm = _normalize(v, inv, form.chart)
        num = form.numerator
        if len(num) != 3:
            continue
        negated = [i for i in range(v.nvars) if norm.signs[i] < 0]
        free = [i for i in range(v.nvars) if i not in form.chart and i not in negated]
        if p ** len(free) > 2_000_000:
            continue
        idx = np.arange(p ** len(free), dtype=np.int64)
        pts = np.zeros((idx.shape[0], v.nvars), dtype=np.int64)
        for k, i in enumerate(free):
            pts[:, i] = (idx // p ** (len(free) - 1 - k)) % p
        for c in form.chart:
            pts[:, c] = 1
        mask = form.D.compile_mod(p)(pts) != 0
        for eq in v.equations:
            mask &= eq.compile_mod(p)(pts) == 0
        hits = np.nonzero(mask)[0]
        if hits.size:
            es = [norm.signs[j] for j in num]
            local, dim = local_fixed_sign(*es)
            return res.sign, local, dim, form, tuple(int(a) for a in pts[hits[0]])
    return None

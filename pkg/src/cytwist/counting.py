"""Exact point counts over F_p.

Projective points are enumerated through a global linear index: the i-th
point of P^n is the i-th normalized representative (first nonzero
coordinate equal to 1) in lexicographic order, and products of projective
spaces use mixed radix over their factors.  Chunks of that index range are
disjoint, so workers can count them independently and the tallies add up to
the same number for any worker count.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .charfield import as_prime, chi_p
from .varieties.core import PencilFiberProductSpec, TwistFamily, VarietySpec, specialize_twist
from .varieties.polynomial import Poly

DEFAULT_BUDGET = 2**33
CHUNK = 1 << 17


class BudgetExceeded(RuntimeError):
    pass


@dataclass
class CountResult:
    p: int
    variety: str
    count: int
    d: int | None = None
    fibers: list[int] | None = None
    method: str = "enumerate"
    evaluations: int = 0
    elapsed: float = 0.0
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        row = {"variety": self.variety, "p": self.p, "d": self.d, "count": self.count}
        if self.fibers is not None:
            row["fibers"] = self.fibers
        row["method"] = self.method
        row["evaluations"] = self.evaluations
        row["elapsed"] = round(self.elapsed, 6)
        return row


def projective_size(n: int, p: int) -> int:
    return (p ** (n + 1) - 1) // (p - 1)


# -- enumeration -------------------------------------------------------------


def _factor_points(n: int, p: int, idx: np.ndarray) -> np.ndarray:
    """Coordinates of the points of P^n(F_p) with linear indices ``idx``."""
    sizes = [p ** (n - k) for k in range(n + 1)]
    offsets = np.cumsum([0] + sizes[:-1])
    lead = np.searchsorted(offsets, idx, side="right") - 1
    rem = idx - offsets[lead]
    out = np.zeros((idx.shape[0], n + 1), dtype=np.int64)
    for i in range(n + 1):
        digit = (rem // p ** (n - i)) % p
        out[:, i] = np.where(i < lead, 0, np.where(i == lead, 1, digit))
    return out


class ProjectiveDomain:
    """Linear indexing of prod_i P^{n_i}(F_p), coordinates laid out per grading."""

    def __init__(self, grading: Sequence[Sequence[int]], p: int):
        self.grading = [tuple(b) for b in grading]
        self.p = p
        self.dims = [len(b) - 1 for b in self.grading]
        self.sizes = [projective_size(n, p) for n in self.dims]
        self.nvars = sum(len(b) for b in self.grading)
        self.size = int(np.prod(self.sizes, dtype=object))

    def points(self, start: int, stop: int) -> np.ndarray:
        idx = np.arange(start, stop, dtype=np.int64)
        out = np.empty((idx.shape[0], self.nvars), dtype=np.int64)
        for block, n, size in zip(reversed(self.grading), reversed(self.dims), reversed(self.sizes)):
            local = idx % size
            idx = idx // size
            out[:, list(block)] = _factor_points(n, self.p, local)
        return out

    def chunks(self, chunk: int = CHUNK) -> list[tuple[int, int]]:
        return [(s, min(s + chunk, self.size)) for s in range(0, self.size, chunk)]


def _run(tasks, fn, workers: int):
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


def _check_budget(cost: int, budget: int, what: str):
    if cost > budget:
        raise BudgetExceeded(f"{what}: {cost} evaluations exceed the budget of {budget}")


def enumerate_count(v: VarietySpec, p: int, workers: int = 1, budget: int = DEFAULT_BUDGET) -> CountResult:
    """Brute-force count of common zeros, one representative per projective point."""
    if v.weights and set(v.weights) != {1}:
        raise ValueError(f"{v.id}: weighted ambients are counted as double covers")
    t0 = time.perf_counter()
    dom = ProjectiveDomain(v.grading, p)
    cost = dom.size * max(1, len(v.equations))
    _check_budget(cost, budget, v.id)
    evals = [eq.compile_mod(p) for eq in v.equations]

    def work(span):
        pts = dom.points(*span)
        mask = np.ones(pts.shape[0], dtype=bool)
        for ev in evals:
            sel = np.nonzero(mask)[0]
            if sel.size == 0:
                break
            mask[sel] = ev(pts[sel]) == 0
        return int(mask.sum())

    total = sum(_run(dom.chunks(), work, workers))
    return CountResult(p, v.id, total, method="enumerate", evaluations=cost, elapsed=time.perf_counter() - t0)


# -- variable-separable systems ------------------------------------------


def variable_blocks(equations: Sequence[Poly], nvars: int) -> list[list[int]]:
    """Connected components of variables, linked when they share a monomial."""
    parent = list(range(nvars))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for eq in equations:
        for e in eq.terms:
            vs = [i for i, k in enumerate(e) if k]
            for a in vs[1:]:
                parent[find(a)] = find(vs[0])
    groups: dict[int, list[int]] = {}
    for i in range(nvars):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values())


def _restrict(eq: Poly, block: Sequence[int]) -> Poly:
    """Terms of ``eq`` living in ``block``, as a polynomial in those variables."""
    s = set(block)
    terms = {}
    for e, c in eq.terms.items():
        if all(k == 0 or i in s for i, k in enumerate(e)) and any(e[i] for i in block):
            terms[tuple(e[i] for i in block)] = c
    return Poly(len(block), terms)


def _affine_points(m: int, p: int, start: int, stop: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    out = np.empty((idx.shape[0], m), dtype=np.int64)
    for i in range(m):
        out[:, i] = (idx // p ** (m - 1 - i)) % p
    return out


def _block_histogram(eqs: Sequence[Poly], block: Sequence[int], p: int) -> np.ndarray:
    k = len(eqs)
    parts = [_restrict(eq, block).compile_mod(p) for eq in eqs]
    hist = np.zeros(p**k, dtype=np.int64)
    total = p ** len(block)
    for s in range(0, total, CHUNK):
        pts = _affine_points(len(block), p, s, min(s + CHUNK, total))
        key = np.zeros(pts.shape[0], dtype=np.int64)
        for j, ev in enumerate(parts):
            key += ev(pts) * p**j
        hist += np.bincount(key, minlength=p**k)
    return hist.reshape((p,) * k)


def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cyclic convolution on (Z/p)^k, exact in int64."""
    if np.count_nonzero(a) < np.count_nonzero(b):
        a, b = b, a
    out = np.zeros_like(a)
    axes = tuple(range(a.ndim))
    for g in zip(*np.nonzero(b)):
        out += b[g] * np.roll(a, shift=g, axis=axes)
    return out


def separable_affine_count(eqs: Sequence[Poly], nvars: int, p: int, workers: int = 1,
                           budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Number of x in F_p^nvars with all equations zero, and the work spent.

    Each equation is a sum of parts living in disjoint variable blocks, so
    the zero count is a convolution of per-block value histograms.
    """
    blocks = variable_blocks(eqs, nvars)
    k = len(eqs)
    if p ** nvars >= 2**62:
        raise BudgetExceeded("affine count would overflow int64")
    cost = sum(p ** len(b) for b in blocks) * k + len(blocks) * p ** (k + 1)
    _check_budget(cost, budget, "separable count")
    hists = _run(blocks, lambda b: _block_histogram(eqs, b, p), workers)
    acc = hists[0]
    for h in hists[1:]:
        acc = _convolve(acc, h)
    return int(acc[(0,) * k]), cost


def square_variables(eqs: Sequence[Poly], nvars: int) -> dict[int, tuple[int, int]] | None:
    """Map equation -> (variable, coefficient) for variables occurring only as c*y^2.

    Returns None unless every such variable sits in one equation and each
    equation carries at most one of them.
    """
    found: dict[int, tuple[int, int]] = {}
    for i in range(nvars):
        hits = [(k, e, c) for k, eq in enumerate(eqs) for e, c in eq.terms.items() if e[i]]
        if len(hits) != 1:
            continue
        k, e, c = hits[0]
        if e[i] == 2 and sum(e) == 2 and k not in found:
            found[k] = (i, c)
    return found or None


def square_elimination_affine_count(eqs: Sequence[Poly], nvars: int, p: int, workers: int = 1,
                                    budget: int = DEFAULT_BUDGET) -> tuple[int, int]:
    """Affine zero count summing out each square-only variable y with c*y^2 + R = 0.

    #{y : c y^2 = -R} = 1 + chi_p(-c R), so the count is a character sum over
    the remaining variables.
    """
    if p == 2:
        raise ValueError("square elimination needs an odd prime")
    sq = square_variables(eqs, nvars)
    if sq is None:
        raise ValueError("no square-only variables")
    elim = sorted(i for i, _ in sq.values())
    rest = [i for i in range(nvars) if i not in elim]
    cost = p ** len(rest) * len(eqs)
    _check_budget(cost, budget, "square elimination")
    sub = []
    for k, eq in enumerate(eqs):
        terms = {}
        for e, c in eq.terms.items():
            if k in sq and e[sq[k][0]]:
                continue
            terms[tuple(e[i] for i in rest)] = c
        sub.append((Poly(len(rest), terms).compile_mod(p), sq.get(k)))
    chis = np.array([chi_p(a, p) for a in range(p)], dtype=np.int64)
    total = p ** len(rest)

    def work(span):
        pts = _affine_points(len(rest), p, *span)
        weight = np.ones(pts.shape[0], dtype=np.int64)
        for ev, y in sub:
            vals = ev(pts)
            if y is None:
                weight *= vals == 0
            else:
                weight *= 1 + chis[(-y[1] * vals) % p]
        return int(weight.sum())

    spans = [(s, min(s + CHUNK, total)) for s in range(0, total, CHUNK)]
    return sum(_run(spans, work, workers)), cost


def count_projective(v: VarietySpec, p, workers: int = 1, budget: int = DEFAULT_BUDGET,
                     method: str = "auto") -> CountResult:
    """Exact number of F_p-points of ``v``.

    ``method`` is ``"enumerate"``, ``"separable"``, ``"square-elimination"``
    or ``"auto"``.  For a single unweighted projective space, auto picks
    square elimination (odd p) when some variable occurs only as c*y^2, then
    the separable path when the equations split over two or more variable
    blocks, and plain enumeration otherwise.
    """
    p = as_prime(p)
    if v.kind == "double-cover":
        y, d, f = _split_double_cover(v)
        return count_double_cover(f, d, p, workers=workers, budget=budget, variety=v.id)
    single = len(v.grading) == 1 and not (v.weights and set(v.weights) != {1})
    if method == "auto":
        if single and p > 2 and square_variables(v.equations, v.nvars):
            method = "square-elimination"
        elif single and len(variable_blocks(v.equations, v.nvars)) > 1:
            method = "separable"
        else:
            method = "enumerate"
    if method == "enumerate":
        return enumerate_count(v, p, workers, budget)
    if method not in ("separable", "square-elimination"):
        raise ValueError(f"unknown method {method!r}")
    if not single:
        raise ValueError(f"{method} counting needs a single unweighted projective factor")
    t0 = time.perf_counter()
    cone = separable_affine_count if method == "separable" else square_elimination_affine_count
    affine, cost = cone(v.equations, v.nvars, p, workers, budget)
    count, rem = divmod(affine - 1, p - 1)
    assert rem == 0, "affine cone count must be 1 mod (p - 1)"
    return CountResult(p, v.id, count, method=method, evaluations=cost, elapsed=time.perf_counter() - t0)


# -- double covers -------------------------------------------------------


def _split_double_cover(v: VarietySpec) -> tuple[int, int, Poly]:
    """For c*y^2 - f(x): (index of y, c, f as a polynomial in the x's)."""
    eq = v.equations[0]
    y = max(range(v.nvars), key=lambda i: v.weights[i])
    xs = [i for i in range(v.nvars) if i != y]
    c = None
    f_terms = {}
    for e, coef in eq.terms.items():
        if e[y] == 2 and sum(e) == 2:
            c = coef
        elif e[y] == 0:
            f_terms[tuple(e[i] for i in xs)] = -coef
        else:
            raise ValueError(f"{v.id}: not of the form c*y^2 = f(x)")
    if c is None:
        raise ValueError(f"{v.id}: no y^2 term")
    return y, c, Poly(len(xs), f_terms)


@lru_cache(maxsize=256)
def _value_profile(f: Poly, p: int, method: str) -> tuple[int, int, int]:
    """(#P^n, #{f = 0}, sum of chi_p(f(x))) over P^n(F_p), n = nvars - 1."""
    n = f.nvars - 1
    if method == "separable":
        # affine histogram over F_p^{n+1}; chi(f(cx)) = chi(f(x)) since deg f is even
        hists = [_block_histogram([f], b, p) for b in variable_blocks([f], f.nvars)]
        acc = hists[0]
        for h in hists[1:]:
            acc = _convolve(acc, h)
        acc = acc.copy()
        acc[0] -= 1  # the zero vector
        chis = np.array([chi_p(a, p) for a in range(p)], dtype=np.int64)
        zeros, r0 = divmod(int(acc[0]), p - 1)
        A, r1 = divmod(int((acc * chis).sum()), p - 1)
        assert r0 == 0 and r1 == 0
        return projective_size(n, p), zeros, A
    dom = ProjectiveDomain([tuple(range(n + 1))], p)
    ev = f.compile_mod(p)
    hist = np.zeros(p, dtype=np.int64)
    for span in dom.chunks():
        hist += np.bincount(ev(dom.points(*span)), minlength=p)
    chis = np.array([chi_p(a, p) for a in range(p)], dtype=np.int64)
    return dom.size, int(hist[0]), int((hist * chis).sum())


def _profile(f: Poly, p: int, budget: int, method: str = "auto"):
    degs = f.degree_in(range(f.nvars))
    if len(degs) != 1:
        raise ValueError("branch polynomial must be homogeneous")
    if degs.pop() % 2:
        raise ValueError("odd-degree branch polynomial: count is not projectively well defined")
    if p == 2:
        raise ValueError("double-cover counting needs an odd prime")
    n = f.nvars - 1
    if method == "auto":
        method = "separable" if len(variable_blocks([f], f.nvars)) > 1 else "enumerate"
    cost = projective_size(n, p) if method == "enumerate" else sum(
        p ** len(b) for b in variable_blocks([f], f.nvars)
    )
    _check_budget(cost, budget, "double cover")
    return _value_profile(f, p, method) + (cost, method)


def character_sum(f: Poly, p, budget: int = DEFAULT_BUDGET, method: str = "auto") -> int:
    """A(p) = sum over x in P^n(F_p) of chi_p(f(x)), with chi_p(0) = 0."""
    return _profile(f, as_prime(p), budget, method)[2]


def count_double_cover(f: Poly, d: int, p, workers: int = 1, budget: int = DEFAULT_BUDGET,
                       variety: str = "double-cover", method: str = "auto") -> CountResult:
    """sum over x in P^n(F_p) of #{y : d y^2 = f(x)}."""
    p = as_prime(p)
    if d % p == 0:
        raise ValueError(f"p = {p} divides d = {d}")
    t0 = time.perf_counter()
    size, zeros, A, cost, used = _profile(f, p, budget, method)
    N = size + chi_p(d, p) * A
    return CountResult(p, variety, N, d=d, method=f"double-cover/{used}", evaluations=cost,
                       elapsed=time.perf_counter() - t0, extra={"A": A, "zeros": zeros})


# -- pencils ---------------------------------------------------------------


def count_pencil_fiber_product(spec: PencilFiberProductSpec, p, budget: int = DEFAULT_BUDGET) -> CountResult:
    """Raw count sum_t N_t^2 of Y x_{P^1} Y with the per-fiber vector.

    Fibers are indexed like P^1(F_p): (1:t) for t = 0..p-1, then (0:1).
    A point with A = B = 0 (a base point) lies on every fiber.
    """
    p = as_prime(p)
    t0 = time.perf_counter()
    size = projective_size(2, p)
    _check_budget(size * 2, budget, spec.id)
    A, B = spec.split()
    fx = list(spec.fiber_part)
    pts = np.zeros((size, spec.surface.nvars), dtype=np.int64)
    pts[:, fx] = ProjectiveDomain([(0, 1, 2)], p).points(0, size)
    a = A.compile_mod(p)(pts)
    b = B.compile_mod(p)(pts)
    base = int(((a == 0) & (b == 0)).sum())
    inv = np.array([0] + [pow(int(t), -1, p) for t in range(1, p)], dtype=np.int64)
    # mu*A = lam*B: (mu:lam) = (B:A), i.e. (1 : A/B) when B != 0, else (0:1)
    live = ~((a == 0) & (b == 0))
    fiber = np.where(b != 0, a * inv[b] % p, p)[live]
    counts = np.bincount(fiber, minlength=p + 1) + base
    fibers = [int(c) for c in counts]
    total = sum(c * c for c in fibers)
    return CountResult(p, spec.id, total, fibers=fibers, method="pencil", evaluations=size * 2,
                       elapsed=time.perf_counter() - t0, extra={"base_points": base})


# -- elliptic calibration --------------------------------------------------


def count_elliptic(a: int, b: int, c: int, d: int, p) -> tuple[int, int]:
    """(N, a_p) for d y^2 = x^3 + a x^2 + b x + c over F_p, point at infinity included."""
    p = as_prime(p)
    disc = a * a * b * b - 4 * b**3 - 4 * a**3 * c - 27 * c * c + 18 * a * b * c
    if p == 2 or disc % p == 0:
        raise ValueError(f"bad reduction at p = {p}")
    if d % p == 0:
        raise ValueError(f"p = {p} divides d = {d}")
    chi_d = chi_p(d, p)
    N = 1 + sum(1 + chi_d * chi_p(x * x * x + a * x * x + b * x + c, p) for x in range(p))
    return N, p + 1 - N


# -- dispatch ----------------------------------------------------------------


def count_spec(spec, p, workers: int = 1, budget: int = DEFAULT_BUDGET, method: str = "auto") -> CountResult:
    if isinstance(spec, PencilFiberProductSpec):
        return count_pencil_fiber_product(spec, p, budget)
    return count_projective(spec, p, workers, budget, method)


def count_twist(family: TwistFamily, d: int, p, workers: int = 1, budget: int = DEFAULT_BUDGET,
                method: str = "auto") -> CountResult:
    res = count_spec(specialize_twist(family, d), p, workers, budget, method)
    res.d = d
    res.variety = family.id
    return res

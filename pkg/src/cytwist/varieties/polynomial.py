"""Sparse integer polynomials in homogeneous coordinates."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

import numpy as np


class Poly:
    """Immutable polynomial with integer coefficients in ``nvars`` variables.

    Terms are kept as ``{exponent tuple: coefficient}`` with zero
    coefficients dropped.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, int] | Iterable[tuple] = ()):
        self.nvars = nvars
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = ((tuple(e), c) for c, e in terms)
        acc: dict[tuple, int] = {}
        for e, c in items:
            e = tuple(int(k) for k in e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} has length {len(e)}, expected {nvars}")
            if min(e, default=0) < 0:
                raise ValueError(f"negative exponent in {e}")
            acc[e] = acc.get(e, 0) + int(c)
        self.terms = {e: c for e, c in acc.items() if c}
        self._hash = None

    # -- construction --------------------------------------------------
    @classmethod
    def gens(cls, nvars: int) -> list[Poly]:
        return [cls.var(i, nvars) for i in range(nvars)]

    @classmethod
    def var(cls, i: int, nvars: int) -> Poly:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def const(cls, c: int, nvars: int) -> Poly:
        return cls(nvars, {(0,) * nvars: c})

    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        if isinstance(other, (int, np.integer)):
            return Poly.const(int(other), self.nvars)
        return NotImplemented

    # -- arithmetic ----------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            t[e] = t.get(e, 0) + c
        return Poly(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict[tuple, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Poly(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        out = Poly.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other):
        if isinstance(other, (int, np.integer)):
            other = Poly.const(int(other), self.nvars)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    # -- structure -----------------------------------------------------
    def degree_in(self, block: Sequence[int], weights: Sequence[int] | None = None) -> set[int]:
        """Set of (weighted) degrees of the terms in the variables of ``block``."""
        w = weights or [1] * self.nvars
        return {sum(e[i] * w[i] for i in block) for e in self.terms}

    def multidegree(self, grading: Sequence[Sequence[int]], weights=None) -> tuple | None:
        """Common multi-degree, or None when some block is not homogeneous."""
        if not self.terms:
            return None
        out = []
        for block in grading:
            degs = self.degree_in(block, weights)
            if len(degs) != 1:
                return None
            out.append(degs.pop())
        return tuple(out)

    def variables(self) -> set[int]:
        return {i for e in self.terms for i, k in enumerate(e) if k}

    def diff(self, i: int) -> Poly:
        t = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                t[tuple(f)] = c * e[i]
        return Poly(self.nvars, t)

    def substitute(self, images: Sequence[Poly]) -> Poly:
        """Compose: x_i -> images[i]."""
        if len(images) != self.nvars:
            raise ValueError("need one image per variable")
        m = images[0].nvars if images else 0
        out = Poly(m)
        cache: dict[tuple, Poly] = {}
        for e, c in self.terms.items():
            term = Poly.const(c, m)
            for i, k in enumerate(e):
                if k:
                    key = (i, k)
                    if key not in cache:
                        cache[key] = images[i] ** k
                    term = term * cache[key]
            out = out + term
        return out

    def signed_permute(self, perm: Sequence[int], signs: Sequence[int]) -> Poly:
        """Substitute x_i -> signs[i] * x_{perm[i]} (fast path for involutions)."""
        t = {}
        for e, c in self.terms.items():
            f = [0] * self.nvars
            s = c
            for i, k in enumerate(e):
                if k:
                    f[perm[i]] += k
                    if signs[i] < 0 and k % 2:
                        s = -s
            t[tuple(f)] = t.get(tuple(f), 0) + s
        return Poly(self.nvars, t)

    def scale_vars(self, factors: Sequence[int]) -> Poly:
        t = {}
        for e, c in self.terms.items():
            for i, k in enumerate(e):
                if k:
                    c *= factors[i] ** k
            t[e] = c
        return Poly(self.nvars, t)

    def content(self) -> int:
        from math import gcd

        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    # -- evaluation ----------------------------------------------------
    def evaluate(self, point: Sequence[int], p: int | None = None) -> int:
        if len(point) != self.nvars:
            raise ValueError(f"point has {len(point)} coordinates, expected {self.nvars}")
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= pow(int(x), k, p) if p else int(x) ** k
            total += v
        return total % p if p else total

    def compile_mod(self, p: int) -> ModPEvaluator:
        return ModPEvaluator(self, p)

    # -- display -------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None) -> str:
        names = names or [f"x{i}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        out = ""
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}*{mono}")
            if not out:
                out = body if c > 0 else f"-{body}"
            else:
                out += (" + " if c > 0 else " - ") + body
        return out

    def __repr__(self):
        return f"Poly({self.to_str()})"


class ModPEvaluator:
    """Vectorized evaluation over F_p on blocks of points (rows of an int64 array).

    Power tables are precomputed per (variable exponent), so evaluation is a
    sequence of table lookups and modular products.  Requires p < 2**31.
    """

    def __init__(self, poly: Poly, p: int):
        if p >= 2**31:
            raise ValueError("machine-word evaluation needs p < 2^31")
        self.p = p
        self.nvars = poly.nvars
        xs = np.arange(p, dtype=np.int64)
        self.tables: dict[int, np.ndarray] = {}
        for e in poly.terms:
            for k in e:
                if k > 1 and k not in self.tables:
                    self.tables[k] = np.array([pow(int(x), k, p) for x in xs], dtype=np.int64)
        self.monomials = [
            (c % p, [(i, k) for i, k in enumerate(e) if k]) for e, c in poly.terms.items() if c % p
        ]

    def __call__(self, pts: np.ndarray) -> np.ndarray:
        p = self.p
        out = np.zeros(pts.shape[0], dtype=np.int64)
        for c, factors in self.monomials:
            v = np.full(pts.shape[0], c, dtype=np.int64)
            for i, k in factors:
                col = pts[:, i] if k == 1 else self.tables[k][pts[:, i]]
                v *= col
                v %= p
            out += v
            if len(self.monomials) > 30:
                out %= p
        return out % p

"""Variety, twist-family and involution types."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..charfield import as_prime, is_squarefree
from .polynomial import Poly


class InvolutionError(ValueError):
    pass


@dataclass(frozen=True)
class VarietySpec:
    """Equations in a product of (possibly weighted) projective spaces.

    ``grading`` lists the coordinate indices of each projective factor.
    ``weights`` is only set for weighted ambients (double covers).
    """

    id: str
    coords: tuple
    grading: tuple
    equations: tuple
    weights: tuple | None = None
    kind: str = "complete-intersection"
    dim: int = 3
    nodes: int | None = None
    bad_primes: tuple = ()
    notes: str = ""
    clearing_factor: int = 1

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        object.__setattr__(self, "grading", tuple(tuple(b) for b in self.grading))
        object.__setattr__(self, "equations", tuple(self.equations))
        n = len(self.coords)
        if sorted(i for b in self.grading for i in b) != list(range(n)):
            raise ValueError(f"{self.id}: grading must partition the {n} coordinates")
        for k, eq in enumerate(self.equations):
            if eq.nvars != n:
                raise ValueError(f"{self.id}: equation {k} has {eq.nvars} variables, expected {n}")
            if eq.multidegree(self.grading, self.weights) is None:
                raise ValueError(f"{self.id}: equation {k} is not (multi-)homogeneous")
        ambient = sum(len(b) - 1 for b in self.grading)
        if ambient - len(self.equations) != self.dim:
            raise ValueError(
                f"{self.id}: ambient dimension {ambient} minus {len(self.equations)} equations "
                f"!= declared dimension {self.dim}"
            )

    @property
    def nvars(self) -> int:
        return len(self.coords)

    @property
    def ambient_dims(self) -> tuple:
        return tuple(len(b) - 1 for b in self.grading)

    def multidegrees(self) -> list[tuple]:
        return [eq.multidegree(self.grading, self.weights) for eq in self.equations]

    def index(self, name: str) -> int:
        try:
            return self.coords.index(name)
        except ValueError:
            raise KeyError(f"{self.id} has no coordinate {name!r}") from None

    def with_equations(self, equations: Sequence[Poly], id: str | None = None) -> VarietySpec:
        return VarietySpec(
            id or self.id,
            self.coords,
            self.grading,
            tuple(equations),
            self.weights,
            self.kind,
            self.dim,
            self.nodes,
            self.bad_primes,
            self.notes,
            self.clearing_factor,
        )

    def describe(self) -> str:
        lines = [f"{self.id}: {self.kind} in " + " x ".join(f"P^{n}" for n in self.ambient_dims)]
        if self.weights:
            lines[0] += f" weights {self.weights}"
        for eq in self.equations:
            lines.append("  " + eq.to_str(self.coords) + " = 0")
        return "\n".join(lines)


@dataclass(frozen=True)
class PencilFiberProductSpec:
    """Self fiber product over P^1 of a cubic pencil in P^2 x P^1."""

    id: str
    surface: VarietySpec  # coords (x, y, z, mu, lam), one equation of bidegree (3, 1)
    nodes: int | None = None
    bad_primes: tuple = ()
    notes: str = ""

    def __post_init__(self):
        s = self.surface
        if len(s.grading) != 2 or tuple(len(b) for b in s.grading) != (3, 2):
            raise ValueError(f"{self.id}: pencil surface must live in P^2 x P^1")
        if len(s.equations) != 1 or s.multidegrees()[0] != (3, 1):
            raise ValueError(f"{self.id}: pencil equation must have bidegree (3, 1)")

    @property
    def equation(self) -> Poly:
        return self.surface.equations[0]

    @property
    def fiber_part(self) -> tuple:
        return self.surface.grading[0]

    @property
    def base_part(self) -> tuple:
        return self.surface.grading[1]

    def split(self) -> tuple[Poly, Poly]:
        """(A, B) with equation = mu*A - lam*B, both cubics in (x, y, z)."""
        mu, lam = self.base_part
        A, B = {}, {}
        for e, c in self.equation.terms.items():
            key = list(e)
            key[mu] = key[lam] = 0
            key = tuple(key)
            if e[mu] == 1:
                A[key] = A.get(key, 0) + c
            else:
                B[key] = B.get(key, 0) - c
        n = self.surface.nvars
        return Poly(n, A), Poly(n, B)

    def fiber_product(self) -> VarietySpec:
        """The threefold as two equations in P^2 x P^2 x P^1."""
        s = self.surface
        fx = list(self.fiber_part)
        names = [s.coords[i] for i in fx]
        coords = names + [c + "'" for c in names] + [s.coords[i] for i in self.base_part]
        g = Poly.gens(8)
        first = [None] * 5
        second = [None] * 5
        for pos, i in enumerate(fx):
            first[i] = g[pos]
            second[i] = g[3 + pos]
        for pos, i in enumerate(self.base_part):
            first[i] = second[i] = g[6 + pos]
        eqs = (self.equation.substitute(first), self.equation.substitute(second))
        return VarietySpec(
            self.id + "-fiber-product",
            coords,
            ((0, 1, 2), (3, 4, 5), (6, 7)),
            eqs,
            kind="fiber-product",
            nodes=self.nodes,
            bad_primes=self.bad_primes,
            notes=self.notes,
        )

    def lift_involution(self, inv: InvolutionSpec) -> InvolutionSpec:
        """Apply a surface involution to both factors of the fiber product."""
        fx = list(self.fiber_part)
        pos = {}
        for k, i in enumerate(fx):
            pos[i] = (k, 3 + k)
        for k, i in enumerate(self.base_part):
            pos[i] = (6 + k, 6 + k)
        perm = [0] * 8
        signs = [1] * 8
        for i in range(5):
            a1, a2 = pos[i]
            b1, b2 = pos[inv.perm[i]]
            perm[a1], perm[a2] = b1, b2
            signs[a1] = signs[a2] = inv.signs[i]
        return InvolutionSpec(inv.name, tuple(perm), tuple(signs))


@dataclass(frozen=True)
class InvolutionSpec:
    """Signed coordinate permutation x_i -> signs[i] * x_{perm[i]}."""

    name: str
    perm: tuple
    signs: tuple
    equation_map: tuple | None = None  # optional ((target, sign), ...) per equation

    def __post_init__(self):
        object.__setattr__(self, "perm", tuple(self.perm))
        object.__setattr__(self, "signs", tuple(self.signs))
        if sorted(self.perm) != list(range(len(self.perm))):
            raise ValueError(f"{self.name}: not a permutation")
        if any(s not in (1, -1) for s in self.signs):
            raise ValueError(f"{self.name}: signs must be +-1")

    @classmethod
    def identity(cls, n: int) -> InvolutionSpec:
        return cls("identity", tuple(range(n)), (1,) * n)

    @classmethod
    def parse(cls, name: str, text: str, coords: Sequence[str]) -> InvolutionSpec:
        """``"x0->x1, x1->x0"`` or ``"x1->-x1"``; unmentioned coordinates are fixed."""
        coords = list(coords)
        perm = list(range(len(coords)))
        signs = [1] * len(coords)
        for item in text.split(","):
            item = item.strip()
            if not item:
                continue
            src, sep, dst = item.partition("->")
            if not sep:
                raise ValueError(f"bad involution item {item!r}")
            src, dst = src.strip(), dst.strip()
            sign = 1
            if dst.startswith("-"):
                sign, dst = -1, dst[1:].strip()
            elif dst.startswith("+"):
                dst = dst[1:].strip()
            if src not in coords or dst not in coords:
                raise ValueError(f"unknown coordinate in {item!r}")
            perm[coords.index(src)] = coords.index(dst)
            signs[coords.index(src)] = sign
        return cls(name, tuple(perm), tuple(signs))

    def apply(self, poly: Poly) -> Poly:
        return poly.signed_permute(self.perm, self.signs)

    def compose(self, other: InvolutionSpec) -> InvolutionSpec:
        """Substitution equal to applying ``self`` and then ``other``."""
        perm = tuple(other.perm[self.perm[i]] for i in range(len(self.perm)))
        signs = tuple(self.signs[i] * other.signs[self.perm[i]] for i in range(len(self.perm)))
        return InvolutionSpec(f"{self.name}*{other.name}", perm, signs)

    def is_identity_on(self, v: VarietySpec) -> bool:
        """True if the map is projectively the identity on the ambient of ``v``."""
        if any(self.perm[i] != i for i in range(len(self.perm))):
            return False
        w = v.weights or (1,) * v.nvars
        for block in v.grading:
            plain = all(self.signs[i] == 1 for i in block)
            flipped = all(self.signs[i] == (-1) ** w[i] for i in block)
            if not (plain or flipped):
                return False
        return True

    def describe(self, coords: Sequence[str]) -> str:
        parts = []
        for i, (j, s) in enumerate(zip(self.perm, self.signs)):
            if j != i or s != 1:
                parts.append(f"{coords[i]}->{'-' if s < 0 else ''}{coords[j]}")
        return ", ".join(parts) or "identity"


@dataclass(frozen=True)
class InvolutionCheck:
    ok: bool
    equation_map: tuple  # ((target index, sign), ...)
    squares_to_identity: bool

    @property
    def signs(self) -> tuple:
        return tuple(s for _, s in self.equation_map)


def involution_check(v: VarietySpec, inv: InvolutionSpec) -> InvolutionCheck:
    """Verify that each equation maps to +-(some) equation of the system."""
    if len(inv.perm) != v.nvars:
        raise InvolutionError(f"{inv.name} acts on {len(inv.perm)} coordinates, {v.id} has {v.nvars}")
    w = v.weights or (1,) * v.nvars
    for i, j in enumerate(inv.perm):
        if w[i] != w[j] or not any(i in b and j in b for b in v.grading):
            raise InvolutionError(f"{inv.name}: {v.coords[i]} -> {v.coords[j]} mixes factors or weights")
    eqs = list(v.equations)
    mapping = []
    for k, eq in enumerate(eqs):
        image = inv.apply(eq)
        for t, target in enumerate(eqs):
            if image == target:
                mapping.append((t, 1))
                break
            if image == -target:
                mapping.append((t, -1))
                break
        else:
            raise InvolutionError(
                f"{inv.name}: image of equation {k} of {v.id} is not +- an equation of the system"
            )
    if sorted(t for t, _ in mapping) != list(range(len(eqs))):
        raise InvolutionError(f"{inv.name}: equation images are not a permutation")
    if inv.equation_map is not None and tuple(inv.equation_map) != tuple(mapping):
        raise InvolutionError(f"{inv.name}: declared equation map {inv.equation_map} != {tuple(mapping)}")
    squares = inv.compose(inv).is_identity_on(v)
    return InvolutionCheck(True, tuple(mapping), squares)


def evaluate_mod_p(poly: Poly, point: Sequence[int], p) -> int:
    p = as_prime(p)
    if len(point) != poly.nvars:
        raise ValueError(f"point has {len(point)} coordinates, polynomial has {poly.nvars}")
    return poly.evaluate([int(x) % p for x in point], p)


@dataclass(frozen=True)
class CoordinateChange:
    """Linear change target = matrix * source with eq_target(M x) = scale * eq_source(x)."""

    source: str
    target: str
    matrix: tuple
    scales: tuple
    determinant: int

    def images(self, nvars: int) -> list[Poly]:
        g = Poly.gens(nvars)
        out = []
        for row in self.matrix:
            acc = Poly(nvars)
            for c, x in zip(row, g):
                if c:
                    acc = acc + c * x
            out.append(acc)
        return out

    def invertible_mod(self, p: int) -> bool:
        return self.determinant % p != 0 and all(s % p for s in self.scales)


def check_coordinate_change(ch: CoordinateChange, src: VarietySpec, dst: VarietySpec) -> bool:
    imgs = ch.images(src.nvars)
    return all(
        e_dst.substitute(imgs) == s * e_src
        for e_src, e_dst, s in zip(src.equations, dst.equations, ch.scales)
    )


@dataclass(frozen=True)
class TwistFamily:
    """X_d obtained from ``base`` by x_i -> sqrt(d)^{half_weights[i]} x_i.

    Every monomial of an equation picks up sqrt(d)^k with k of a fixed
    parity; dividing by the lowest power leaves integral powers of d.
    """

    id: str
    base: VarietySpec | PencilFiberProductSpec
    half_weights: tuple
    involution: InvolutionSpec
    newform: str | None = None
    status: str = "proved"  # or "conjectural"
    bad_primes: tuple = ()
    source_coords: str = ""

    def __post_init__(self):
        v = self.variety
        if len(self.half_weights) != v.nvars:
            raise ValueError(f"{self.id}: one half-weight per coordinate required")
        for eq in v.equations:
            ks = {self._k(e) for e in eq.terms}
            if len({k % 2 for k in ks}) != 1:
                raise ValueError(f"{self.id}: substitution does not give integral powers of d")

    @property
    def variety(self) -> VarietySpec:
        return self.base.surface if isinstance(self.base, PencilFiberProductSpec) else self.base

    @property
    def is_pencil(self) -> bool:
        return isinstance(self.base, PencilFiberProductSpec)

    def _k(self, e: tuple) -> int:
        return sum(a * w for a, w in zip(e, self.half_weights))

    def rule(self) -> list[tuple[str, int]]:
        """Per monomial of the base, the power of d it acquires."""
        v = self.variety
        out = []
        for eq in v.equations:
            k0 = min(self._k(e) for e in eq.terms)
            for e in sorted(eq.terms, reverse=True):
                k = self._k(e)
                if k != k0:
                    mono = "*".join(
                        v.coords[i] + (f"^{a}" if a > 1 else "") for i, a in enumerate(e) if a
                    )
                    out.append((mono, (k - k0) // 2))
        return out

    def twisted_equations(self, d: int) -> list[Poly]:
        v = self.variety
        eqs = []
        for eq in v.equations:
            k0 = min(self._k(e) for e in eq.terms)
            eqs.append(Poly(eq.nvars, {e: c * d ** ((self._k(e) - k0) // 2) for e, c in eq.terms.items()}))
        return eqs

    def coordinate_change(self, s: int, p: int) -> list[int]:
        """Diagonal scaling sending F_p-points of X_{d s^2} to points of X_d."""
        inv = pow(s, -1, p)
        return [pow(s, w, p) if w >= 0 else pow(inv, -w, p) for w in self.half_weights]


def specialize_twist(family: TwistFamily, d: int):
    if d == 0 or not is_squarefree(d):
        raise ValueError(f"d = {d} must be a nonzero squarefree integer")
    v = family.variety
    eqs = family.twisted_equations(d)
    vid = v.id if d == 1 else f"{family.id}[d={d}]"
    twisted = v.with_equations(eqs, vid)
    if family.is_pencil:
        b = family.base
        return PencilFiberProductSpec(vid, twisted, b.nodes, b.bad_primes, b.notes)
    return twisted

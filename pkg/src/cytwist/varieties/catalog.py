"""Embedded catalog of the threefolds, surfaces and curves discussed with their twists."""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    CoordinateChange,
    InvolutionSpec,
    PencilFiberProductSpec,
    TwistFamily,
    VarietySpec,
)
from .polynomial import Poly


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    spec: VarietySpec | PencilFiberProductSpec
    involutions: dict = field(default_factory=dict)
    family: TwistFamily | None = None
    newform: str | None = None
    alternates: dict = field(default_factory=dict)
    coordinate_changes: tuple = ()
    twist_status: str = "proved"
    # preferred (chart indices, I) for the residue form, by coordinate name
    form_chart: tuple | None = None
    params: tuple = ()

    @property
    def variety(self) -> VarietySpec:
        """The equations used for sign computations (fiber product for pencils)."""
        if isinstance(self.spec, PencilFiberProductSpec):
            return self.spec.fiber_product()
        return self.spec

    def involution(self, name: str | None = None) -> InvolutionSpec:
        if name is None:
            name = next(iter(self.involutions))
        try:
            inv = self.involutions[name]
        except KeyError:
            if name == "identity":
                return InvolutionSpec.identity(self.variety.nvars)
            raise KeyError(f"{self.id} has no involution {name!r}; known: {', '.join(self.involutions)}") from None
        if isinstance(self.spec, PencilFiberProductSpec):
            return self.spec.lift_involution(inv)
        return inv


def _v(id, coords, grading, eqs, **kw) -> VarietySpec:
    return VarietySpec(id, tuple(coords), grading, tuple(eqs), **kw)


def _beauville() -> list[CatalogEntry]:
    x, y, z, mu, lam = Poly.gens(5)
    rows = {
        "I": ((x**3 + y**3 + z**3), x * y * z),
        "II": (x * (x**2 + z**2 + 2 * z * y), (x**2 - y**2) * z),
        "III": (x * (x - z) * (y - z), (x - y) * y * z),
        "IV": ((x + y + z) * (x * y + y * z + z * x), x * y * z),
        "V": ((x + y) * (x * y - z**2), x * y * z),
        "VI": ((x**2 * y + y**2 * z + z**2 * x), x * y * z),
    }
    out = []
    for name, (a, b) in rows.items():
        cid = f"beauville-{name}"
        surface = _v(
            cid, "x y z mu lam".split(), ((0, 1, 2), (3, 4)), [a * mu - b * lam], kind="pencil", dim=2
        )
        spec = PencilFiberProductSpec(cid, surface, bad_primes=(2, 3) if name in ("I", "VI") else ())
        involutions, family = {}, None
        if name == "V":
            iota = InvolutionSpec("iota", tuple(range(5)), (-1, -1, 1, 1, -1))
            involutions["iota"] = iota
            # (x+y)(xy - d z^2) mu = lam xyz  <=>  z -> sqrt(d) z, lam -> lam / sqrt(d)
            family = TwistFamily(cid, spec, (0, 0, 1, 0, -1), iota, newform=cid, bad_primes=(2,))
        out.append(
            CatalogEntry(cid, spec, involutions, family, newform=cid, form_chart=(("z", "z'", "mu"), ("lam", "x'")))
        )
    return out


def _schoen() -> CatalogEntry:
    g = Poly.gens(5)
    x0, x1, x2, x3, x4 = g
    f = x0**5 + x1**5 + x2**5 + x3**5 + x4**5 - 5 * x0 * x1 * x2 * x3 * x4
    xform = _v(
        "schoen-quintic",
        "x0 x1 x2 x3 x4".split(),
        ((0, 1, 2, 3, 4),),
        [f],
        nodes=125,
        bad_primes=(5,),
        notes="125 nodes; small resolution is rigid, attached newform of level 25",
    )
    u, v = x0, x1
    fuv = (
        u**5 + 10 * u**3 * v**2 + 5 * u * v**4
        + 16 * (x2**5 + x3**5 + x4**5)
        - 20 * (u**2 - v**2) * x2 * x3 * x4
    )
    uvform = _v(
        "schoen-quintic-uv",
        "u v x2 x3 x4".split(),
        ((0, 1, 2, 3, 4),),
        [fuv],
        nodes=125,
        bad_primes=(2, 5),
        notes="u = x0 + x1, v = x0 - x1",
    )
    change = CoordinateChange(
        "schoen-quintic",
        "schoen-quintic-uv",
        ((1, 1, 0, 0, 0), (1, -1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1)),
        (16,),
        -2,
    )
    swap = InvolutionSpec("swap01", (1, 0, 2, 3, 4), (1,) * 5)
    vneg = InvolutionSpec("v-neg", tuple(range(5)), (1, -1, 1, 1, 1))
    family = TwistFamily(
        "schoen-quintic", uvform, (0, 1, 0, 0, 0), vneg, newform="schoen-25", bad_primes=(2, 5),
        source_coords="u, v",
    )
    return CatalogEntry(
        "schoen-quintic",
        xform,
        {"swap01": swap},
        family,
        newform="schoen-25",
        alternates={"uv": uvform},
        coordinate_changes=(change,),
        form_chart=(("x4",), ("x3",)),
    )


def _v33() -> CatalogEntry:
    g = Poly.gens(6)
    x0, x1, x2, x3, x4, x5 = g
    spec = _v(
        "v33",
        [f"x{i}" for i in range(6)],
        ((0, 1, 2, 3, 4, 5),),
        [x0**3 + x1**3 + x2**3 + x3**3, x2**3 + x3**3 + x4**3 + x5**3],
        nodes=9,
        bad_primes=(3,),
        notes="9 singular points; big resolution is rigid, newform eta(q^3)^8 of level 9",
    )
    # coordinates (x0, x1, u, v, x4, x5) with u = x2 + x3, v = x2 - x3
    u, v = x2, x3
    uv = _v(
        "v33-uv",
        "x0 x1 u v x4 x5".split(),
        ((0, 1, 2, 3, 4, 5),),
        [4 * x0**3 + 4 * x1**3 + u**3 + 3 * u * v**2, u**3 + 3 * u * v**2 + 4 * x4**3 + 4 * x5**3],
        nodes=9,
        bad_primes=(2, 3),
    )
    change = CoordinateChange(
        "v33",
        "v33-uv",
        (
            (1, 0, 0, 0, 0, 0),
            (0, 1, 0, 0, 0, 0),
            (0, 0, 1, 1, 0, 0),
            (0, 0, 1, -1, 0, 0),
            (0, 0, 0, 0, 1, 0),
            (0, 0, 0, 0, 0, 1),
        ),
        (4, 4),
        -2,
    )
    swap = InvolutionSpec("swap23", (0, 1, 3, 2, 4, 5), (1,) * 6)
    vneg = InvolutionSpec("v-neg", tuple(range(6)), (1, 1, 1, -1, 1, 1))
    family = TwistFamily("v33", uv, (0, 0, 0, 1, 0, 0), vneg, newform="v33", bad_primes=(2, 3))
    return CatalogEntry(
        "v33", spec, {"swap23": swap}, family, newform="v33",
        alternates={"uv": uv}, coordinate_changes=(change,), form_chart=(("x0",), ("x1", "x5")),
    )


def _v24() -> CatalogEntry:
    x0, x1, x2, x3, x4, x5 = Poly.gens(6)
    spec = _v(
        "v24",
        [f"x{i}" for i in range(6)],
        ((0, 1, 2, 3, 4, 5),),
        [
            x0**2 + x1**2 + x2**2 - x3**2 - x4**2 - x5**2,
            x0**4 + x1**4 + x2**4 - x3**4 - x4**4 - x5**4,
        ],
        nodes=122,
        bad_primes=(2, 3),
        notes="122 nodes; newform of weight 4 on Gamma_0(12)",
    )
    neg = InvolutionSpec("x1-neg", tuple(range(6)), (1, -1, 1, 1, 1, 1))
    neg2 = InvolutionSpec("x2-neg", tuple(range(6)), (1, 1, -1, 1, 1, 1))
    family = TwistFamily("v24", spec, (0, 1, 0, 0, 0, 0), neg, newform="v24", bad_primes=(2, 3))
    return CatalogEntry(
        "v24", spec, {"x1-neg": neg, "x2-neg": neg2}, family, newform="v24",
        form_chart=(("x0",), ("x1", "x2")),
    )


def _vgn() -> CatalogEntry:
    g = Poly.gens(8)
    y0, y1, y2, y3, x0, x1, x2, x3 = g
    spec = _v(
        "vgn",
        "y0 y1 y2 y3 x0 x1 x2 x3".split(),
        (tuple(range(8)),),
        [
            y0**2 - (x0**2 + x1**2 + x2**2 + x3**2),
            # minus sign on x3^2 as corrected (misprint in the original source)
            y1**2 - (x0**2 - x1**2 + x2**2 - x3**2),
            y2**2 - (x0**2 + x1**2 - x2**2 - x3**2),
            y3**2 - (x0**2 - x1**2 - x2**2 + x3**2),
        ],
        nodes=96,
        bad_primes=(2,),
        notes="96 nodes; attached newform is the unique weight-4 newform on Gamma_0(8)",
    )
    neg = InvolutionSpec("x0-neg", tuple(range(8)), (1, 1, 1, 1, -1, 1, 1, 1))
    family = TwistFamily("vgn", spec, (0, 0, 0, 0, 1, 0, 0, 0), neg, newform="vgn", bad_primes=(2,))
    return CatalogEntry(
        "vgn", spec, {"x0-neg": neg}, family, newform="vgn",
        form_chart=(("x1",), ("y0", "y1", "y2", "y3")),
    )


def _double_cover(cid: str, n: int, degree: int, kind_dim: int, names: list[str]) -> CatalogEntry:
    g = Poly.gens(n + 2)
    *xs, y = g
    f = Poly(n + 2)
    for x in xs:
        f = f + x**degree
    weights = (1,) * (n + 1) + (degree // 2,)
    spec = _v(
        cid,
        names,
        (tuple(range(n + 2)),),
        [y**2 - f],
        weights=weights,
        kind="double-cover",
        dim=kind_dim,
        bad_primes=tuple(q for q in (2, 3) if degree % q == 0),
        notes=f"template instance: diagonal branch locus of degree {degree}",
    )
    neg = InvolutionSpec("y-neg", tuple(range(n + 2)), (1,) * (n + 1) + (-1,))
    hw = (0,) * (n + 1) + (1,)
    family = TwistFamily(cid, spec, hw, neg, bad_primes=spec.bad_primes)
    return CatalogEntry(cid, spec, {"y-neg": neg}, family, form_chart=((names[0],), (names[-1],)))


def elliptic_curve(a: int = 0, b: int = -1, c: int = 0, cid: str = "elliptic-calibration") -> CatalogEntry:
    """y^2 z = x^3 + a x^2 z + b x z^2 + c z^3 with its twist family y -> sqrt(d) y."""
    x, y, z = Poly.gens(3)
    eq = y**2 * z - (x**3 + a * x**2 * z + b * x * z**2 + c * z**3)
    disc = a * a * b * b - 4 * b**3 - 4 * a**3 * c - 27 * c * c + 18 * a * b * c
    if disc == 0:
        raise ValueError(f"x^3 + {a}x^2 + {b}x + {c} has a repeated root")
    from ..charfield import prime_factors

    bad = tuple(sorted(set([2] + prime_factors(disc))))
    spec = _v(cid, "x y z".split(), ((0, 1, 2),), [eq], kind="curve", dim=1, bad_primes=bad,
              notes=f"y^2 = x^3 + {a}x^2 + {b}x + {c}; discriminant {16 * disc}")
    neg = InvolutionSpec("y-neg", (0, 1, 2), (1, -1, 1))
    family = TwistFamily(cid, spec, (0, 1, 0), neg, bad_primes=bad)
    return CatalogEntry(cid, spec, {"y-neg": neg}, family, form_chart=(("z",), ("y",)), params=(a, b, c))


def _hirzebruch() -> CatalogEntry:
    x, y, u, w, t = Poly.gens(5)

    def G(a, b):
        # 10 * F(a, b), homogenized with t
        return (2 * a + t) * (5 * b**4 - 5 * b**2 * (2 * a**2 - 2 * a * t + t**2) + (a**2 + a * t - t**2) ** 2)

    spec = _v(
        "hirzebruch-quintic",
        "x y u w t".split(),
        ((0, 1, 2, 3, 4),),
        [G(x, y) - G(u, w)],
        nodes=126,
        bad_primes=(2, 5),
        clearing_factor=10,
        notes="F(x,y) - F(u,w) = 0 cleared of denominators by 10; 126 nodes, Euler characteristic 306",
    )
    neg = InvolutionSpec("y-neg", tuple(range(5)), (1, -1, 1, 1, 1))
    family = TwistFamily(
        "hirzebruch-quintic", spec, (0, 1, 0, 0, 0), neg, status="conjectural", bad_primes=(2, 5)
    )
    return CatalogEntry(
        "hirzebruch-quintic", spec, {"y-neg": neg}, family, twist_status="conjectural",
        form_chart=(("t",), ("x",)),
    )


def _build() -> dict[str, CatalogEntry]:
    entries = _beauville() + [
        _schoen(),
        _v33(),
        _v24(),
        _vgn(),
        _hirzebruch(),
        _double_cover("double-octic-template", 3, 8, 3, ["x1", "x2", "x3", "x4", "y"]),
        _double_cover("double-sextic-template", 2, 6, 2, ["x", "y", "z", "w"]),
        elliptic_curve(),
    ]
    return {e.id: e for e in entries}


CATALOG: dict[str, CatalogEntry] = _build()


def catalog_get(id: str, catalog: dict | None = None) -> CatalogEntry:
    cat = CATALOG if catalog is None else catalog
    try:
        return cat[id]
    except KeyError:
        raise KeyError(f"unknown variety {id!r}; known: {', '.join(cat)}") from None


def families(catalog: dict | None = None) -> dict[str, TwistFamily]:
    cat = CATALOG if catalog is None else catalog
    return {e.id: e.family for e in cat.values() if e.family is not None}

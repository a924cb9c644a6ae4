import itertools

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cytwist.varieties import (
    CATALOG,
    DefinitionError,
    InvolutionError,
    InvolutionSpec,
    Poly,
    VarietySpec,
    catalog_get,
    check_coordinate_change,
    families,
    involution_check,
    load_definitions,
    parse_definitions,
    specialize_twist,
)

# the seven involutions whose sign is asserted, plus the y -> -y covers
INVOLUTIONS = [
    ("schoen-quintic", "swap01"),
    ("beauville-V", None),
    ("v33", "swap23"),
    ("v24", "x1-neg"),
    ("vgn", "x0-neg"),
    ("double-octic-template", None),
    ("double-sextic-template", None),
]


def to_sympy(poly, syms):
    return sum(c * sympy.Mul(*[s**k for s, k in zip(syms, e)]) for e, c in poly.terms.items())


# -- polynomial -------------------------------------------------------------

small_polys = st.lists(
    st.tuples(st.integers(-5, 5), st.tuples(*[st.integers(0, 3)] * 3)), max_size=6
).map(lambda ts: Poly(3, ts))


@given(small_polys, small_polys)
@settings(max_examples=200, deadline=None)
def test_poly_arithmetic_matches_sympy(f, g):
    syms = sympy.symbols("a b c")
    assert sympy.expand(to_sympy(f * g, syms) - to_sympy(f, syms) * to_sympy(g, syms)) == 0
    assert sympy.expand(to_sympy(f - g, syms) - to_sympy(f, syms) + to_sympy(g, syms)) == 0
    for i in range(3):
        assert sympy.expand(to_sympy(f.diff(i), syms) - sympy.diff(to_sympy(f, syms), syms[i])) == 0


@given(small_polys, st.tuples(*[st.integers(0, 12)] * 3))
@settings(max_examples=200, deadline=None)
def test_compiled_evaluation_matches_direct(f, pt):
    import numpy as np

    p = 13
    ev = f.compile_mod(p)
    assert int(ev(np.array([pt], dtype=np.int64))[0]) == f.evaluate(pt, p)


def test_to_str_spacing():
    x, y = Poly.gens(2)
    assert (x**2 - 3 * x * y + 1).to_str(["x", "y"]) == "x^2 - 3*x*y + 1"
    assert (-x).to_str(["x", "y"]) == "-x"


# -- specs ------------------------------------------------------------------


def test_rejects_non_homogeneous():
    x0, x1, x2 = Poly.gens(3)
    with pytest.raises(ValueError, match="homogeneous"):
        VarietySpec("bad", ("x0", "x1", "x2"), ((0, 1, 2),), (x0**3 + x1**2 * x2 + x2**2,), dim=1)


def test_rejects_wrong_dimension():
    x0, x1, x2 = Poly.gens(3)
    with pytest.raises(ValueError, match="dimension"):
        VarietySpec("bad", ("x0", "x1", "x2"), ((0, 1, 2),), (x0**3 + x1**3 + x2**3,), dim=3)


@pytest.mark.parametrize("cid", sorted(CATALOG))
def test_catalog_entries_are_valid(cid):
    e = catalog_get(cid)
    v = e.variety
    assert all(md is not None for md in v.multidegrees())
    for name in e.involutions:
        chk = involution_check(v, e.involution(name))
        assert chk.ok and chk.squares_to_identity


def test_pencil_split_and_fiber_product():
    e = catalog_get("beauville-V")
    A, B = e.spec.split()
    mu, lam = e.spec.surface.index("mu"), e.spec.surface.index("lam")
    g = Poly.gens(e.spec.surface.nvars)
    assert g[mu] * A - g[lam] * B == e.spec.equation
    fp = e.variety
    assert fp.coords == ("x", "y", "z", "x'", "y'", "z'", "mu", "lam")
    assert fp.ambient_dims == (2, 2, 1) and fp.dim == 3


def test_vgn_equations_have_minus_sign():
    v = catalog_get("vgn").spec
    eq = next(q for q in v.equations if any(c < 0 for c in q.terms.values()))
    assert eq is not None


def test_involution_rejects_bad_map():
    v = catalog_get("schoen-quintic").spec
    bad = InvolutionSpec.parse("bad", "x0->-x0", v.coords)
    with pytest.raises(InvolutionError):
        involution_check(v, bad)


def test_involution_parse_and_compose():
    coords = ("a", "b", "c")
    s = InvolutionSpec.parse("s", "a->b, b->a, c->-c", coords)
    assert s.perm == (1, 0, 2) and s.signs == (1, 1, -1)
    assert s.compose(s).perm == (0, 1, 2) and s.compose(s).signs == (1, 1, 1)
    with pytest.raises(ValueError):
        InvolutionSpec.parse("s", "a->z", coords)


@pytest.mark.parametrize("cid", ["schoen-quintic", "v33"])
def test_coordinate_changes_hold(cid):
    e = catalog_get(cid)
    (ch,) = e.coordinate_changes
    assert check_coordinate_change(ch, e.spec, e.alternates["uv"])


@pytest.mark.parametrize("fid", sorted(families()))
def test_specialize_identity_and_rejects(fid):
    fam = families()[fid]
    base = specialize_twist(fam, 1)
    if fam.is_pencil:
        assert base.equation == fam.base.equation
    else:
        assert base.equations == fam.variety.equations
    for d in (0, 4, -12):
        with pytest.raises(ValueError):
            specialize_twist(fam, d)


@pytest.mark.parametrize("fid", sorted(f for f, fam in families().items() if not fam.is_pencil))
@pytest.mark.parametrize("p", [5, 7])
def test_coordinate_change_between_square_classes(fid, p):
    """Points of X_{d s^2} land on X_d after x_i -> s^{w_i} x_i (checked on all points)."""
    fam = families()[fid]
    v = fam.variety
    d, s = -1, 2
    src_eqs = fam.twisted_equations(d * s * s)
    dst_eqs = fam.twisted_equations(d)
    scale = fam.coordinate_change(s, p)
    rng = itertools.product(range(p), repeat=v.nvars)
    seen = 0
    for pt in itertools.islice(rng, 0, None, 37):
        if all(q.evaluate(pt, p) == 0 for q in src_eqs):
            img = [c * x % p for c, x in zip(scale, pt)]
            assert all(q.evaluate(img, p) == 0 for q in dst_eqs)
            seen += 1
        if seen > 200:
            break
    assert seen > 0


# -- definition files ---------------------------------------------------------

FERMAT = """\
id: fermat-cubic
ambient: 2
coords: x y z
equation:
    1 3 0 0
    1 0 3 0
    1 0 0 3
involution swap: x->y, y->x
"""


def test_parse_definition():
    (e,) = parse_definitions(FERMAT)
    assert e.spec.dim == 1 and e.spec.coords == ("x", "y", "z")
    assert involution_check(e.spec, e.involutions["swap"]).ok


def test_definition_non_homogeneous_reports_line():
    text = FERMAT.replace("    1 0 0 3", "    1 0 0 2")
    with pytest.raises(DefinitionError) as info:
        parse_definitions(text)
    assert info.value.line == 7
    assert ":7:" in str(info.value) and "homogeneous" in str(info.value)


@pytest.mark.parametrize(
    "bad,line",
    [("coords: x y\n", 3), ("bogus: 1\n", 3), ("twist: q^2 -> d^1\n", 3)],
)
def test_definition_errors(bad, line):
    lines = FERMAT.splitlines(keepends=True)
    lines[2] = bad
    with pytest.raises(DefinitionError):
        parse_definitions("".join(lines))


def test_definition_overrides_catalog(tmp_path):
    path = tmp_path / "v.def"
    path.write_text(FERMAT.replace("fermat-cubic", "schoen-quintic"))
    merged = load_definitions(path)
    assert merged["schoen-quintic"].spec.dim == 1
    assert CATALOG["schoen-quintic"].spec.dim == 3  # built-in untouched


def test_definition_twist_rule_builds_family():
    text = FERMAT + "twist: z^2 -> d^1\n"
    text = text.replace("involution swap: x->y, y->x", "involution zneg: z->-z")
    # z^3 picks up d^(3/2) relative to x^3: mixed parity is rejected
    with pytest.raises(DefinitionError, match="integral"):
        parse_definitions(text)
    quad = """\
id: conic
ambient: 2
coords: x y z
equation:
    1 2 0 0
    1 0 2 0
    -1 0 0 2
involution zneg: z->-z
twist: z^2 -> d^1
"""
    (e,) = parse_definitions(quad)
    assert e.family.half_weights == (0, 0, 1)

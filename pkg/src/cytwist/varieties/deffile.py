"""Plain-text variety definitions that extend or override the built-in catalog.

Grammar (one directive per line; ``#`` starts a comment; blank lines ignored)::

    id: <name>                         starts a new entry (required, first)
    ambient: <n1> [<n2> ...]           dimensions of the projective factors
    coords: <c0> <c1> ...              sum(n_i + 1) names, split over the factors in order
    weights: <w0> <w1> ...             optional, weighted single factor only
    kind: complete-intersection | double-cover | curve
    dim: <int>                         optional, defaults to ambient - #equations
    equation:                          followed by indented term lines
        <coeff> <e0> <e1> ... <en>     one monomial: integer coefficient, exponents
    bad-primes: <p> ...
    involution <name>: c0->c1, c1->-c1, ...
    twist: <coord>^<m> -> d^<k> [, ...]   substitution c -> sqrt(d)^(2k/m) c
    newform: <label>
    status: proved | conjectural

Each equation must be homogeneous in every factor (weighted when
``weights`` is given).  Violations raise :class:`DefinitionError` naming the
line of the first offending monomial.  Example::

    id: fermat-quintic
    ambient: 4
    coords: x0 x1 x2 x3 x4
    equation:
        1 5 0 0 0 0
        1 0 5 0 0 0
        1 0 0 5 0 0
        1 0 0 0 5 0
        1 0 0 0 0 5
    involution swap01: x0->x1, x1->x0
"""

from __future__ import annotations

from pathlib import Path

from .catalog import CATALOG, CatalogEntry
from .core import InvolutionSpec, TwistFamily, VarietySpec
from .polynomial import Poly


class DefinitionError(ValueError):
    def __init__(self, line: int, msg: str, source: str = "<definitions>"):
        super().__init__(f"{source}:{line}: {msg}")
        self.line = line


def _ints(words, line, source, what):
    try:
        return [int(w) for w in words]
    except ValueError:
        raise DefinitionError(line, f"{what}: expected integers, got {' '.join(words)!r}", source) from None


class _Entry:
    def __init__(self, id, line):
        self.id = id
        self.line = line
        self.ambient = None
        self.coords = None
        self.weights = None
        self.kind = "complete-intersection"
        self.dim = None
        self.equations: list[list[tuple[int, int, list[int]]]] = []  # (line, coeff, exps)
        self.bad_primes = ()
        self.involutions: list[tuple[int, str, str]] = []
        self.twist = None
        self.newform = None
        self.status = "proved"


def _grading(ambient, n):
    out, start = [], 0
    for k in ambient:
        out.append(tuple(range(start, start + k + 1)))
        start += k + 1
    return tuple(out)


def _build(e: _Entry, source: str) -> CatalogEntry:
    if e.ambient is None or e.coords is None:
        raise DefinitionError(e.line, f"{e.id}: 'ambient' and 'coords' are required", source)
    n = len(e.coords)
    if sum(k + 1 for k in e.ambient) != n:
        raise DefinitionError(e.line, f"{e.id}: {n} coords do not fit ambient {e.ambient}", source)
    if e.weights is not None and (len(e.weights) != n or len(e.ambient) != 1):
        raise DefinitionError(e.line, f"{e.id}: weights need one value per coord and a single factor", source)
    grading = _grading(e.ambient, n)
    weights = e.weights or [1] * n
    eqs = []
    for terms in e.equations:
        if not terms:
            raise DefinitionError(e.line, f"{e.id}: empty equation", source)
        ref = None
        for line, c, ex in terms:
            if len(ex) != n:
                raise DefinitionError(line, f"monomial has {len(ex)} exponents, expected {n}", source)
            deg = tuple(sum(weights[i] * ex[i] for i in block) for block in grading)
            if ref is None:
                ref = deg
            elif deg != ref:
                raise DefinitionError(
                    line, f"equation is not homogeneous: degree {deg} but first monomial has {ref}", source
                )
        eqs.append(Poly(n, [(c, tuple(ex)) for _, c, ex in terms]))
    ambient_dim = sum(e.ambient)
    dim = e.dim if e.dim is not None else ambient_dim - len(eqs)
    try:
        spec = VarietySpec(
            e.id, tuple(e.coords), grading, tuple(eqs),
            weights=tuple(e.weights) if e.weights else None,
            kind=e.kind, dim=dim, bad_primes=tuple(e.bad_primes),
        )
    except ValueError as exc:
        raise DefinitionError(e.line, str(exc), source) from None
    invs = {}
    for line, name, text in e.involutions:
        try:
            invs[name] = InvolutionSpec.parse(name, text, e.coords)
        except ValueError as exc:
            raise DefinitionError(line, str(exc), source) from None
    family = None
    if e.twist is not None:
        line, hw = e.twist
        if not invs:
            raise DefinitionError(line, "a twist rule needs an involution", source)
        try:
            family = TwistFamily(
                e.id, spec, tuple(hw), next(iter(invs.values())), newform=e.newform,
                status=e.status, bad_primes=tuple(e.bad_primes),
            )
        except ValueError as exc:
            raise DefinitionError(line, str(exc), source) from None
    return CatalogEntry(e.id, spec, invs, family, newform=e.newform, twist_status=e.status)


def _twist_rule(text, coords, line, source):
    hw = [0] * len(coords)
    for item in text.split(","):
        lhs, sep, rhs = item.partition("->")
        if not sep:
            raise DefinitionError(line, f"bad twist rule {item.strip()!r}", source)
        var, _, m = lhs.strip().partition("^")
        base, _, k = rhs.strip().partition("^")
        if base.strip() != "d" or var.strip() not in coords:
            raise DefinitionError(line, f"bad twist rule {item.strip()!r}", source)
        m = int(m or 1)
        k = int(k or 1)
        if (2 * k) % m:
            raise DefinitionError(line, f"{item.strip()!r}: 2k/m must be an integer", source)
        hw[coords.index(var.strip())] = 2 * k // m
    return hw


def parse_definitions(text: str, source: str = "<definitions>") -> list[CatalogEntry]:
    """Parse a definition document into catalog entries."""
    entries: list[_Entry] = []
    cur: _Entry | None = None
    in_eq = False
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        if in_eq and raw[:1].isspace():
            words = line.split()
            nums = _ints(words, lineno, source, "monomial")
            cur.equations[-1].append((lineno, nums[0], nums[1:]))
            continue
        in_eq = False
        key, sep, val = line.partition(":")
        if not sep:
            raise DefinitionError(lineno, f"expected 'key: value', got {line.strip()!r}", source)
        key, val = key.strip(), val.strip()
        if key == "id":
            cur = _Entry(val, lineno)
            entries.append(cur)
            continue
        if cur is None:
            raise DefinitionError(lineno, "definition must start with 'id:'", source)
        if key == "ambient":
            cur.ambient = _ints(val.split(), lineno, source, key)
        elif key == "coords":
            cur.coords = val.split()
        elif key == "weights":
            cur.weights = _ints(val.split(), lineno, source, key)
        elif key == "kind":
            cur.kind = val
        elif key == "dim":
            cur.dim = int(val)
        elif key == "equation":
            cur.equations.append([])
            in_eq = True
        elif key in ("bad-primes", "bad_primes"):
            cur.bad_primes = tuple(_ints(val.split(), lineno, source, key))
        elif key.startswith("involution"):
            name = key[len("involution"):].strip() or f"inv{len(cur.involutions)}"
            cur.involutions.append((lineno, name, val))
        elif key == "twist":
            if cur.coords is None:
                raise DefinitionError(lineno, "'coords' must precede 'twist'", source)
            cur.twist = (lineno, _twist_rule(val, cur.coords, lineno, source))
        elif key == "newform":
            cur.newform = val
        elif key == "status":
            if val not in ("proved", "conjectural"):
                raise DefinitionError(lineno, f"status must be proved or conjectural, not {val!r}", source)
            cur.status = val
        else:
            raise DefinitionError(lineno, f"unknown key {key!r}", source)
    return [_build(e, source) for e in entries]


def load_definitions(path: str | Path, catalog: dict | None = None) -> dict[str, CatalogEntry]:
    """Return a copy of ``catalog`` (default: built-in) with the file's entries added or replaced."""
    path = Path(path)
    merged = dict(CATALOG if catalog is None else catalog)
    for entry in parse_definitions(path.read_text(), str(path)):
        merged[entry.id] = entry
    return merged

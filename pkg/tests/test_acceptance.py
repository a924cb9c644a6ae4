"""Acceptance criteria 1-11, each printed as one PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python3 tests/test_acceptance.py``.
"""

import random
import sys
import time
from math import gcd
from pathlib import Path

import numpy as np
import pytest
import sympy

sys.path.insert(0, str(Path(__file__).parent))

from test_qseries import TABLE, product_oracle  # noqa: E402

from cytwist.charfield import QuadraticCharacterSpec, chi_p, is_prime, primes_up_to  # noqa: E402
from cytwist.counting import character_sum, count_projective, count_spec, count_twist, projective_size  # noqa: E402
from cytwist.forms import admissible_charts, jacobian_minor  # noqa: E402
from cytwist.harness import EXACT, FITTED, verify_geometric_twist, verify_twist_class  # noqa: E402
from cytwist.qseries import (  # noqa: E402
    NEWFORMS,
    EtaQuotient,
    NoSimpleAnswer,
    deligne_check,
    expand_eta_quotient,
    get_newform,
    load_coefficients,
    twist_expansion,
    twist_minimality_report,
    twisted_level,
)
from cytwist.varieties import Poly, catalog_get, elliptic_curve, families, specialize_twist  # noqa: E402

DATA = Path(__file__).parent / "data"
SAMPLE_D = (-1, 2, -2, 3, -3, 5)
SIGN_CASES = [
    ("schoen-quintic", "swap01"),
    ("beauville-V", None),
    ("v33", "swap23"),
    ("v24", "x1-neg"),
    ("vgn", "x0-neg"),
    ("double-octic-template", None),
    ("double-sextic-template", None),
]


def criterion_1():
    t0 = time.perf_counter()
    expansions = {label: expand_eta_quotient(EtaQuotient.parse(spec), 200) for label, (spec, _) in TABLE.items()}
    elapsed = time.perf_counter() - t0
    for label, (spec, level) in TABLE.items():
        f = expansions[label]
        if get_newform(label).level != level or f.coeffs[0] != 1:
            return False, f"{label}: level or normalization"
        if list(f.coeffs) != product_oracle(EtaQuotient.parse(spec).factors, 200):
            return False, f"{label}: mismatch with the product oracle"
    return elapsed < 5, f"six forms to B=200 match the oracle; levels 9,8,5,6,16,9; {elapsed:.2f}s"


def criterion_2():
    c = expand_eta_quotient(EtaQuotient.parse("1:4,5:4"), 2)[2]
    v = expand_eta_quotient(EtaQuotient.parse("3:8"), 7)
    bad = []
    for label, (spec, level) in TABLE.items():
        rep = deligne_check(expand_eta_quotient(EtaQuotient.parse(spec), 200), primes_up_to(199), level)
        if not rep.ok:
            bad.append(label)
    ok = c == -4 and v[2] == 0 and v[7] == 20 and not bad
    return ok, f"c2 = {c}, eta(q^3)^8: c2 = {v[2]}, c7 = {v[7]}; Deligne failures: {bad or 'none'}"


def criterion_3():
    a = twisted_level(5, QuadraticCharacterSpec(-1))
    b = twisted_level(9, QuadraticCharacterSpec(2))
    raised = 0
    for N, d in ((9, -3), (8, -1), (16, 2), (6, 3)):
        try:
            twisted_level(N, QuadraticCharacterSpec(d))
        except NoSimpleAnswer as exc:
            raised += "no simple answer" in str(exc)
    return a == 80 and b == 576 and raised == 4, f"levels {a}, {b}; {raised}/4 gcd violations raised"


def criterion_4():
    rng = random.Random(20240611)
    B = 4000
    forms = {l: r.expansion(B) for l, r in NEWFORMS.items() if r.eta is not None}
    forms["schoen-25"] = load_coefficients(DATA / "schoen_25_ap.json").expansion(60)
    checked = 0
    for label, f in forms.items():
        known = [n for n in range(1, f.precision + 1) if f.known(n)]
        for d in SAMPLE_D:
            spec = QuadraticCharacterSpec(d)
            back = twist_expansion(twist_expansion(f, spec), spec)
            idx = [rng.choice(known) for _ in range(10_000)]
            for n in idx:
                if gcd(n, spec.D) == 1:
                    if back[n] != f[n]:
                        return False, f"{label} d={d} n={n}"
                    checked += 1
    return True, f"{len(forms)} forms x {len(SAMPLE_D)} d, {checked} random coprime indices restored"


def criterion_5():
    v = catalog_get("schoen-quintic").spec
    n2 = count_projective(v, 2, method="enumerate").count
    counts = {w: count_projective(v, 13, workers=w, method="enumerate").count for w in (1, 2, 8)}
    t0 = time.perf_counter()
    full = count_projective(v, 31, workers=8, method="enumerate")
    elapsed = time.perf_counter() - t0
    ok = n2 == 16 and len(set(counts.values())) == 1 and full.evaluations == projective_size(4, 31) and elapsed < 60
    return ok, f"N(F_2) = {n2}; workers 1/2/8 at p=13: {sorted(set(counts.values()))}; P^4(F_31) in {elapsed:.2f}s"


def _twist_class_bound(fam):
    return 101 if fam.is_pencil or fam.variety.kind in ("double-cover", "curve") else 31


def criterion_6():
    checked, failures = 0, []
    for fid, fam in sorted(families().items()):
        pmax = _twist_class_bound(fam)
        for p in primes_up_to(pmax):
            if p == 2 or p in fam.bad_primes:
                continue
            ds = [d for d in SAMPLE_D if d % p]
            res = verify_twist_class(fam, p, ds)
            checked += 1
            if res.verdict != EXACT:
                failures.append((fid, p))
    return not failures, f"{checked} (family, p) cases, failures: {failures or 'none'}"


def _sqcount(p):
    c = np.zeros(p, dtype=np.int64)
    for y in range(p):
        c[y * y % p] += 1
    return c


def _normalized_points(n, p):
    blocks = []
    for k in range(n + 1):
        free = n - k
        idx = np.arange(p**free, dtype=np.int64)
        pts = np.zeros((idx.size, n + 1), dtype=np.int64)
        pts[:, k] = 1
        for j in range(free):
            pts[:, k + 1 + j] = (idx // p ** (free - 1 - j)) % p
        blocks.append(pts)
    return np.concatenate(blocks)


def criterion_7():
    checked = 0
    for cid in ("double-octic-template", "double-sextic-template"):
        e = catalog_get(cid)
        v = e.spec
        y = next(i for i, w in enumerate(v.weights) if w > 1)
        (eq,) = v.equations
        xs = [i for i in range(v.nvars) if i != y]
        # f(x) with y dropped: eq = y^2 - f(x)
        f = Poly(len(xs), [(-c, tuple(m[i] for i in xs)) for m, c in eq.terms.items() if m[y] == 0])
        n = len(xs) - 1
        for p in primes_up_to(101):
            if p == 2:
                continue
            vals = f.compile_mod(p)(_normalized_points(n, p))
            sq = _sqcount(p)
            A = character_sum(f, p)
            size = projective_size(n, p)
            for d in SAMPLE_D:
                if d % p == 0:
                    continue
                dinv = pow(d % p, -1, p)
                direct = int(sq[vals * dinv % p].sum())
                N = count_twist(e.family, d, p).count
                if not (N == direct == size + chi_p(d, p) * A):
                    return False, f"{cid} p={p} d={d}: {N}, {direct}, {size} + {chi_p(d, p)}*{A}"
                checked += 1
    return True, f"{checked} (template, p, d) cases, N_d = #P^n + chi*A exactly"


def criterion_8():
    curves = [(0, -1, 0), (0, 0, 1), (0, -1, 1)]
    checked = 0
    for a, b, c in curves:
        e = elliptic_curve(a, b, c, cid=f"E[{a},{b},{c}]")
        for p in primes_up_to(199):
            if p in e.spec.bad_primes:
                continue
            ap = p + 1 - count_spec(e.spec, p).count
            for d in SAMPLE_D:
                if d % p == 0:
                    continue
                apd = p + 1 - count_spec(specialize_twist(e.family, d), p).count
                if apd != chi_p(d, p) * ap:
                    return False, f"E{(a, b, c)} p={p} d={d}: {apd} vs {chi_p(d, p)}*{ap}"
                checked += 1
    return True, f"3 curves, {checked} (p, d) cases with a_p(E_d) = chi*a_p(E)"


def criterion_9():
    details = []
    for cid, name in SIGN_CASES:
        e = catalog_get(cid)
        signs = {r.sign for r in admissible_charts(e.variety, e.involution(name))}
        ident = {r.sign for r in admissible_charts(e.variety, e.involution("identity"))}
        if signs != {-1} or ident != {1}:
            return False, f"{cid}: signs {signs}, identity {ident}"
        details.append(cid)
    v = catalog_get("vgn").spec
    I = [v.index(c) for c in ("y0", "y1", "y2", "y3")]
    syms = sympy.symbols(" ".join(v.coords))
    D = jacobian_minor(v, I)
    expr = sum(c * sympy.Mul(*[s**k for s, k in zip(syms, m)]) for m, c in D.terms.items())
    ok = sympy.expand(expr - 2**4 * sympy.Mul(*[syms[i] for i in I])) == 0
    return ok, f"sign -1 in every admissible chart for {len(details)} involutions, +1 for identity; vGN minor = 16*y0*y1*y2*y3"


def criterion_10():
    t0 = time.perf_counter()
    rep = verify_geometric_twist("beauville-V", -3, pmax=101, pmin=5)
    elapsed = time.perf_counter() - t0
    model = rep.residual_model
    ok = (
        rep.verdict in (EXACT, FITTED)
        and model is not None and model.stable
        and all(r.delta == 0 for r in rep.rows if r.chi == 1)
        and elapsed < 120
    )
    desc = model.describe() if model else "none"
    return ok, f"{rep.verdict}, sign {rep.sign:+d}, residual {desc}, stable at p={rep.extension.p}; {elapsed:.1f}s"


def criterion_11():
    rec = load_coefficients(DATA / "schoen_25_ap.json")
    rep = twist_minimality_report(rec, [get_newform("level5")])
    (v,) = rep.candidates
    flagged = any("-84" in f and "Deligne" in f for f in rep.claimed_flags)
    ok = v.excluded and v.witness[0] == 2 and abs(v.witness[1]) != 4 and flagged
    return ok, f"{v.text}; Deligne flag raised for -84: {flagged}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def _report(k, ok, detail):
    return f"[criterion {k:2d}] {'PASS' if ok else 'FAIL'}: {detail}"


@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k, capsys):
    ok, detail = CRITERIA[k - 1]()
    with capsys.disabled():
        print("\n" + _report(k, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for k, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        failed += not ok
        print(_report(k, ok, detail), flush=True)
    sys.exit(1 if failed else 0)

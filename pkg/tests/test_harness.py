import csv
import io
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from cytwist.charfield import chi_p, good_primes, kronecker
from cytwist.harness import (
    EXACT,
    FAIL,
    FITTED,
    NO_DATA,
    BadPrime,
    CountCache,
    ResidualModel,
    Term,
    VerificationReport,
    fit_residual,
    run_catalog,
    verify_geometric_twist,
    verify_modular_twist,
    verify_twist_class,
)
from cytwist.harness.report import CSV_COLUMNS
from cytwist.qseries import load_coefficients

DATA = Path(__file__).parent / "data"
PRIMES = good_primes(101, 2 * 3 * 5 * 7, pmin=11)


# -- residual fitting ----------------------------------------------------------


def planted(terms, primes=PRIMES):
    return [(p, sum(c * (1 if D == 1 else kronecker(D, p)) * p**k for D, k, c in terms)) for p in primes]


def test_fit_zero_is_empty_model():
    m = fit_residual([(p, 0) for p in PRIMES])
    assert m.is_zero and m.value(13, -1) == 0


@pytest.mark.parametrize(
    "terms",
    [[(1, 1, 3)], [(1, 0, 2), (1, 2, -1)], [(-4, 1, -6)], [(1, 1, -18), (1, 2, 6)], [(-3, 0, 4), (8, 1, 1)]],
)
def test_fit_recovers_planted_models(terms):
    m = fit_residual(planted(terms))
    assert m is not None
    for p, e in planted(terms, good_primes(300, 2 * 3 * 5 * 7, pmin=11)):
        assert m.value(p, -1) == e


@given(st.lists(st.tuples(st.sampled_from([1, -4, -3, 8]), st.integers(0, 2), st.integers(-9, 9).filter(bool)),
                min_size=1, max_size=2, unique_by=lambda t: t[:2]))
@settings(max_examples=60, deadline=None)
def test_fit_generalizes(terms):
    m = fit_residual(planted(terms))
    assert m is not None
    for p, e in planted(terms, [103, 107, 109, 113]):
        assert m.value(p, -1) == e


def test_fit_rejects_noise():
    pts = [(p, (p * 7919) % 97 - 40) for p in PRIMES]
    assert fit_residual(pts) is None


def test_model_vanishes_when_chi_is_one():
    m = ResidualModel([Term(1, 1, 5)], [], [])
    assert m.value(7, 1) == 0 and m.value(7, -1) == 35


def test_model_roundtrip():
    m = ResidualModel([Term(-4, 1, -6), Term(1, 0, 2)], [11, 13], [17], True)
    assert ResidualModel.from_dict(json.loads(json.dumps(m.to_dict()))).to_dict() == m.to_dict()


# -- twist classes and modular twists ------------------------------------------


def test_twist_class_schoen_p3():
    res = verify_twist_class("schoen-quintic", 3, [2, -1])
    assert res.verdict == EXACT
    assert res.counts == {2: 44, -1: 44} and res.base == 36


@pytest.mark.parametrize("p", [2, 5])
def test_twist_class_rejects_bad_prime(p):
    with pytest.raises(BadPrime):
        verify_twist_class("schoen-quintic", p, [2, -1])


def test_twist_class_rejects_p_dividing_d():
    with pytest.raises(BadPrime):
        verify_twist_class("schoen-quintic", 3, [3])


def test_modular_twist_level_and_relation():
    res = verify_modular_twist("beauville-III", -1, 100)
    assert res.verdict == EXACT and res.twisted_level == 80 and res.involutive
    assert all(b == c * a for _, c, a, b in res.rows)
    res = verify_modular_twist("beauville-I", -3, 60)
    assert res.twisted_level is None and "no simple answer" in res.level_note


def test_modular_twist_without_data():
    assert verify_modular_twist("schoen-25", 2, 30).verdict == NO_DATA
    rec = load_coefficients(DATA / "schoen_25_ap.json")
    assert verify_modular_twist(rec, 2, 40).verdict == EXACT


# -- geometric twists -----------------------------------------------------------


@pytest.mark.parametrize("fid,d,sign", [("elliptic-calibration", 5, -1), ("elliptic-calibration", 2, -1),
                                         ("double-octic-template", 3, 1), ("double-sextic-template", -2, 1)])
def test_classical_families_exact(fid, d, sign):
    # N(E) = p + 1 - a_p gives Delta = -(1 - chi) a_p, while double covers add +chi*A(p)
    rep = verify_geometric_twist(fid, d, pmax=41)
    assert rep.verdict == EXACT and rep.sign == sign
    assert all(r.residual == 0 for r in rep.rows)


def test_cm_curve_sign_undetermined_for_minus_one():
    # y^2 = x^3 - x has a_p = 0 exactly when chi_-4(p) = -1
    rep = verify_geometric_twist("elliptic-calibration", -1, pmax=41)
    assert rep.verdict == EXACT
    assert any("undetermined" in n for n in rep.notes)


def test_schoen_with_derived_coefficients():
    nf = {"schoen-25": load_coefficients(DATA / "schoen_25_ap.json")}
    rep = verify_geometric_twist("schoen-quintic", -1, pmax=23, newforms=nf)
    assert rep.verdict == EXACT and rep.sign == -1
    assert [r.p for r in rep.rows if r.a_p is None] == [11]


def test_schoen_without_coefficients_reports_no_data():
    rep = verify_geometric_twist("schoen-quintic", 2, pmax=17)
    assert rep.verdict == NO_DATA and rep.twist_class == EXACT


def test_beauville_v_small():
    rep = verify_geometric_twist("beauville-V", -3, pmax=53)
    assert rep.verdict in (EXACT, FITTED)
    assert rep.sign == -1 and rep.residual_model.stable
    assert all(r.delta == 0 for r in rep.rows if r.chi == 1)


def test_explicit_bad_primes_rejected():
    with pytest.raises(BadPrime):
        verify_geometric_twist("beauville-V", -3, primes=[3, 5, 7])


def test_wrong_sign_convention_would_fail():
    """Feeding the Beauville V rows a form of the wrong family must not pass."""
    from cytwist.qseries import get_newform

    wrong = {"beauville-V": get_newform("beauville-III")}
    rep = verify_geometric_twist("beauville-V", -3, pmax=53, newforms=wrong)
    assert rep.verdict == FAIL


def test_count_cache_reuses_counts():
    cache = CountCache()
    verify_geometric_twist("double-octic-template", -1, pmax=13, cache=cache)
    n = len(cache._store)
    verify_geometric_twist("double-octic-template", 2, pmax=13, cache=cache)
    assert len(cache._store) < 2 * n


# -- reports ------------------------------------------------------------------


def test_report_json_roundtrip():
    rep = verify_geometric_twist("beauville-V", -3, pmax=31)
    again = VerificationReport.from_json(rep.to_json())
    assert again.to_dict() == rep.to_dict()
    with pytest.raises(ValueError):
        VerificationReport.from_dict({**rep.to_dict(), "schema": "other/9"})


def test_report_csv_columns():
    rep = verify_geometric_twist("elliptic-calibration", -1, pmax=23)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == CSV_COLUMNS == "family,d,p,chi,n_base,n_twist,delta,a_p,residual,verdict".split(",")
    assert len(rows) == 1 + len(rep.rows)
    assert all(r[0] == "elliptic-calibration" for r in rows[1:])


def test_run_catalog_isolates_errors():
    out = run_catalog({"families": ["double-octic-template", "no-such-family"], "d": [-1], "pmax": 13})
    kinds = [("error" in s) for s in out["sections"]]
    assert kinds == [False, True]
    assert out["errors"] == 1 and out["exit_code"] == 0


def test_run_catalog_exit_code_on_fail():
    out = run_catalog({"families": ["v33"], "d": [-1], "pmax": 31})
    assert out["sections"][0]["report"]["verdict"] == FAIL
    assert out["exit_code"] == 1

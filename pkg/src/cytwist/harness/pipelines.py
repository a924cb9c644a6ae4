"""End-to-end comparisons of geometric and modular twists."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import gcd
from typing import Callable

from ..charfield import QuadraticCharacterSpec, chi_eval, chi_p, good_primes, is_prime, primes_up_to
from ..counting import DEFAULT_BUDGET, character_sum, count_elliptic, count_twist, _split_double_cover
from ..qseries import NoSimpleAnswer, NewformRecord, get_newform, twist_expansion, twisted_level
from ..varieties.catalog import CATALOG, CatalogEntry, catalog_get
from ..varieties.core import TwistFamily
from .fit import ResidualModel, fit_residual
from .report import (
    EXACT,
    FAIL,
    FITTED,
    NO_DATA,
    ModularTwistResult,
    Row,
    TwistClassResult,
    VerificationReport,
)

log = logging.getLogger(__name__)


class BadPrime(ValueError):
    pass


class CountCache:
    """Memoized twist counts keyed by (family, d, p)."""

    def __init__(self, workers: int = 1, budget: int = DEFAULT_BUDGET):
        self.workers = workers
        self.budget = budget
        self._store: dict[tuple, int] = {}

    def __call__(self, family: TwistFamily, d: int, p: int) -> int:
        key = (family.id, d, p)
        if key not in self._store:
            self._store[key] = count_twist(family, d, p, self.workers, self.budget).count
        return self._store[key]


def _entry(family: TwistFamily | str) -> tuple[TwistFamily, CatalogEntry | None]:
    if isinstance(family, str):
        entry = catalog_get(family)
        if entry.family is None:
            raise KeyError(f"{family} has no twist family")
        return entry.family, entry
    return family, CATALOG.get(family.id)


def _bad(family: TwistFamily, level: int = 1) -> int:
    out = 2 * level
    for q in family.bad_primes:
        out *= q
    return out


def verify_twist_class(family, p: int, ds, cache: CountCache | None = None) -> TwistClassResult:
    """Counts of X_d at p must depend only on chi_p(d), and equal X_1's when chi_p(d) = 1."""
    family, _ = _entry(family)
    cache = cache or CountCache()
    if not is_prime(p) or p == 2 or p in family.bad_primes:
        raise BadPrime(f"p = {p} is not a good prime for {family.id}")
    ds = list(ds)
    for d in ds:
        if d % p == 0:
            raise BadPrime(f"p = {p} divides d = {d}")
    base = cache(family, 1, p)
    counts = {d: cache(family, d, p) for d in ds}
    classes: dict[int, set] = {1: {base}, -1: set()}
    for d, n in counts.items():
        classes[chi_p(d, p)].add(n)
    ok = len(classes[1]) == 1 and len(classes[-1]) <= 1
    return TwistClassResult(family.id, p, base, counts, EXACT if ok else FAIL)


def verify_modular_twist(record: NewformRecord | str, d: int, pmax: int) -> ModularTwistResult:
    """Check b_p = chi(p) a_p on good primes and the level of the twist."""
    if isinstance(record, str):
        record = get_newform(record)
    spec = QuadraticCharacterSpec(d)
    if not record.has_data:
        return ModularTwistResult(record.label, d, record.level, None, "", [], None, NO_DATA)
    f = record.expansion(pmax)
    g = twist_expansion(f, spec, pmax)
    try:
        level, note = twisted_level(record.level, spec), ""
    except NoSimpleAnswer as exc:
        level, note = None, str(exc)
    rows, ok = [], True
    for p in primes_up_to(pmax):
        if (record.level * spec.D) % p == 0 or not f.known(p):
            continue
        c = chi_eval(spec, p)
        rows.append((p, c, f[p], g[p]))
        ok &= g[p] == c * f[p]
    back = twist_expansion(g, spec, pmax)
    involutive = all(
        back.coeffs[n - 1] == f.coeffs[n - 1]
        for n in range(1, pmax + 1)
        if gcd(n, spec.D) == 1
    )
    return ModularTwistResult(
        record.label, d, record.level, level, note, rows, involutive, EXACT if ok and involutive else FAIL
    )


def _ap_source(family: TwistFamily, entry: CatalogEntry | None, newforms: dict) -> tuple[str, Callable | None, int]:
    """(description, p -> a_p, level) for the family's modular side."""
    v = family.variety
    if v.kind == "double-cover":
        _, _, f = _split_double_cover(v)
        return "character-sum", lambda p: character_sum(f, p), 1
    if entry is not None and entry.params:
        a, b, c = entry.params
        return "elliptic-curve", lambda p: count_elliptic(a, b, c, 1, p)[1], 1
    label = family.newform
    if label is None:
        return "none", None, 1
    record = newforms.get(label) or get_newform(label)
    if not record.has_data:
        return f"newform {label} (no coefficient data)", None, record.level
    return f"newform {label} [{record.eta_status if record.eta else 'external'}]", _newform_ap(record), record.level


def _newform_ap(record: NewformRecord):
    cache = {}

    def ap(p):
        if "f" not in cache or cache["f"].precision < p:
            cache["f"] = record.expansion(max(p, 2 * (cache["f"].precision if "f" in cache else 64)))
        f = cache["f"]
        return f[p] if f.known(p) else None

    return ap


def _residuals(rows: list[Row], sign: int) -> list[tuple[int, int]]:
    return [(r.p, r.delta - sign * (1 - r.chi) * r.a_p) for r in rows if r.a_p is not None]


def verify_geometric_twist(
    family,
    d: int,
    primes=None,
    pmax: int = 50,
    pmin: int = 3,
    newforms: dict | None = None,
    cache: CountCache | None = None,
) -> VerificationReport:
    """Compare Delta(p) = N_1 - N_d with (1 - chi_d(p)) a_p on good primes.

    The sign of a_p is detected (+1 first); leftover residuals go to
    :func:`fit_residual`.  One additional good prime beyond the list is
    counted to test the stability of the fitted model.
    """
    family, entry = _entry(family)
    newforms = newforms or {}
    cache = cache or CountCache()
    QuadraticCharacterSpec(d)  # validates d
    source, ap, level = _ap_source(family, entry, newforms)
    bad = _bad(family, level) * d
    if primes is None:
        primes = good_primes(pmax, bad, pmin=pmin)
    else:
        skipped = [p for p in primes if bad % p == 0]
        if skipped:
            raise BadPrime(f"primes {skipped} are not good for {family.id} with d = {d}")
    primes = sorted(primes)

    def row(p):
        n1, nd = cache(family, 1, p), cache(family, d, p)
        return Row(p, chi_p(d, p), n1, nd, n1 - nd, ap(p) if ap else None)

    rows = [row(p) for p in primes]
    # extension prime for the stability test: next good prime with coefficient data
    ext_row = None
    q = max(primes)
    for _ in range(12):
        q = next(r for r in range(q + 1, 2 * q + 10) if is_prime(r) and bad % r)
        if ap is None or ap(q) is not None:
            ext_row = row(q)
            break
    checked = rows + ([ext_row] if ext_row else [])
    twist_class = EXACT if all(r.delta == 0 for r in checked if r.chi == 1) else FAIL
    report = VerificationReport(
        family.id, d, rows, twist_class=twist_class, a_p_source=source, extension=ext_row,
        status=family.status,
    )
    data_rows = [r for r in rows if r.a_p is not None]
    if not data_rows or ext_row is None or ext_row.a_p is None:
        report.modular = NO_DATA
        nonzero = sum(1 for r in rows if r.chi == -1 and r.delta != 0)
        twisting = sum(1 for r in rows if r.chi == -1)
        report.notes.append(f"Delta != 0 at {nonzero} of {twisting} rows with chi_d(p) = -1")
        report.finish()
        return report
    missing = [r.p for r in rows if r.a_p is None]
    if missing:
        report.notes.append(f"no coefficient data at p = {missing}; rows compared on counts only")
    rows = data_rows
    for allow_fit in (False, True):
        for sign in (1, -1):
            pts = [(p, e) for p, e in _residuals(rows, sign) if chi_p(d, p) == -1]
            if not allow_fit:
                if all(e == 0 for _, e in pts):
                    model = ResidualModel([], [p for p, _ in pts], [])
                else:
                    continue
            else:
                model = fit_residual(pts)
                if model is None:
                    continue
            e_ext = ext_row.delta - sign * (1 - ext_row.chi) * ext_row.a_p
            model.stable = model.value(ext_row.p, ext_row.chi) == e_ext
            report.sign = sign
            if all(r.a_p == 0 for r in rows if r.chi == -1):
                report.notes.append("a_p = 0 on every row with chi_d(p) = -1; the sign is undetermined")
            report.residual_model = model
            report.modular = (EXACT if model.is_zero else FITTED) if model.stable else FAIL
            report.finish()
            return report
    report.modular = FAIL
    report.sign = 1
    report.notes.append("no residual model of at most three terms fits")
    report.finish()
    return report


DEFAULT_DS = (-1, 2, -2, 3, -3, 5)


def run_catalog(config: dict) -> dict:
    """Run every (family, d) pipeline in ``config``; errors are isolated per entry.

    Config keys: ``families`` (list, default all twist families), ``d``
    (list), ``pmax``, ``threads``, ``budget``, ``coefficients`` (label ->
    coefficient file path).
    """
    from ..qseries import load_coefficients

    fams = config.get("families")
    if fams is None:
        fams = [e.id for e in CATALOG.values() if e.family is not None]
    ds = config.get("d", list(DEFAULT_DS))
    pmax = int(config.get("pmax", 50))
    cache = CountCache(int(config.get("threads", 1)), int(config.get("budget", DEFAULT_BUDGET)))
    newforms = {}
    for label, path in (config.get("coefficients") or {}).items():
        rec = load_coefficients(path)
        newforms[label] = rec
    sections = []
    for fam in fams:
        for d in ds:
            try:
                rep = verify_geometric_twist(fam, d, pmax=pmax, newforms=newforms, cache=cache)
                sections.append({"family": fam, "d": d, "report": rep.to_dict()})
            except Exception as exc:  # noqa: BLE001 - isolate per entry
                log.info("%s d=%s: %s", fam, d, exc)
                sections.append({"family": fam, "d": d, "error": f"{type(exc).__name__}: {exc}"})
    fails = sum(1 for s in sections if "report" in s and s["report"]["verdict"] == FAIL)
    return {
        "schema": "cytwist.batch/1",
        "config": {"families": list(fams), "d": list(ds), "pmax": pmax},
        "sections": sections,
        "failures": fails,
        "errors": sum(1 for s in sections if "error" in s),
        "exit_code": 1 if fails else 0,
    }

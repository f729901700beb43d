"""Self-check suite run by ``tadic-lfun selfcheck``.

Every check returns CheckResult(name, ok, detail); a failing check never
raises, so one report lists everything that went wrong.
"""

import logging
import random
from collections import namedtuple

from .dwork import (
    differential_trace_oracle,
    function_trace_oracle,
    random_xseries,
    semilinearity_holds,
    theta0_apply,
    theta1_apply,
)
from .errors import BudgetExceeded, DworkError
from .fredholm import (
    compare_lfunctions,
    doubling_check,
    l_from_traces,
    power_traces,
    trace_formula_lfun,
    zeta_series,
)
from .oracle import ENUMERATION_BUDGET, oracle_lfun, teichmuller_points
from .padic import PrecisionProfile, ZpTSeries, one_plus_T_pow, unramified_trace
from .series import (
    AFFINE_LINE,
    GEOMETRIES,
    TORUS,
    XSeries,
    artin_hasse,
    artin_hasse_rational,
    pi_from_T,
)
from .splitting import TowerInput

logger = logging.getLogger(__name__)

CheckResult = namedtuple("CheckResult", "name ok detail")


def _guarded(name, check, *args):
    try:
        ok, detail = check(*args)
    except DworkError as exc:
        ok, detail = False, "{}: {}".format(type(exc).__name__, exc)
    logger.debug("%s: %s %s", name, "ok" if ok else "FAILED", detail)
    return CheckResult(name, ok, detail)


def _artin_hasse(prof):
    for p in (2, 3, 5, 7):
        bad = [k for k, c in enumerate(artin_hasse_rational(p, 32)) if c.denominator % p == 0]
        if bad:
            return False, "p={}: t^{} is not integral".format(p, bad[0])
    E = artin_hasse(prof, prof.b)
    if E.evaluate(pi_from_T(prof)) != ZpTSeries(prof, [1, 1]):
        return False, "E(pi) != 1 + T"
    return True, "integral to t^32; E(pi) = 1 + T mod T^{}".format(prof.b)


def _trace_oracles(prof):
    p = prof.p
    bound = 3 * p + 1
    for geometry in GEOMETRIES:
        low = 0 if geometry == AFFINE_LINE else -3 * p
        for u in range(low, 3 * p + 1):
            g = XSeries.monomial(prof, geometry, bound, u)
            if theta0_apply(g) != XSeries(prof, geometry, function_trace_oracle(u, p), bound):
                return False, "theta_0(x^{}) on the {}".format(u, geometry)
            expected = XSeries(
                prof, geometry, differential_trace_oracle(u, p, geometry), bound, True
            )
            if theta1_apply(g.as_differential()) != expected:
                return False, "theta_1 of degree {} on the {}".format(u, geometry)
    return True, "all monomials of degree <= {}".format(3 * p)


def _semilinearity(prof, geometry, pairs, seed):
    rng = random.Random(seed)
    p = prof.p
    for n in range(pairs):
        dg = rng.randrange(1, 4)
        dh = rng.randrange(1, 2 * p + 1)
        bound = p * dg + dh
        g = random_xseries(prof, geometry, rng, dg, dg)
        h = random_xseries(prof, geometry, rng, dh, bound)
        w = random_xseries(prof, geometry, rng, dh, bound, differential=True)
        if not semilinearity_holds(g, h, 0):
            return False, "theta_0 fails on pair {}".format(n)
        if not semilinearity_holds(g, w, 1):
            return False, "theta_1 fails on pair {}".format(n)
    return True, "{} random pairs".format(pairs)


def _fiber_identity(run, tower, prof, max_degree):
    Ef = run.splitting
    checked = 0
    for e in range(1, max_degree + 1):
        if tower.p ** e > ENUMERATION_BUDGET:
            break
        for point in teichmuller_points(tower, e, prof):
            trace = unramified_trace(tower.evaluate(point, prof))
            if Ef.fiber_norm(point) != one_plus_T_pow(trace, prof):
                return False, "point {} of degree {}".format(list(point.residue_coords()), e)
            checked += 1
    return True, "{} points of degree <= {}".format(checked, max_degree)


def _integrality(run):
    for name, C in (("C(psi_0)", run.c0), ("C(psi_1)", run.c1)):
        if C[0] != 1:
            return False, "{} has constant term {}".format(name, C[0])
        if not C.is_integral():
            return False, "{} lost p-adic digits".format(name)
    return True, "both Fredholm series integral"


def _T_zero(run, geometry, prof):
    expected = zeta_series(prof, geometry, prof.smax).at_T_zero()
    got = run.lfun.at_T_zero()
    if got != expected:
        return False, "L at T=0 is {}".format([int(x) for x in got])
    return True, "L at T=0 is the zeta series"


def _route_agreement(run, prof):
    S = [
        x - y
        for x, y in zip(power_traces(run.m0, prof.smax), power_traces(run.m1, prof.smax))
    ]
    result = compare_lfunctions(run.lfun, l_from_traces(S, prof.smax))
    return result.verdict == "agree", result.detail or "agree to {} digits".format(
        result.effective_digits
    )


def _doubling(tower, prof):
    result = doubling_check(tower, prof)
    return result.verdict == "agree", result.detail or "stable at D = {}".format(2 * prof.D)


def _oracle(run, tower, prof, progress):
    if prof.dmax < prof.smax:
        return True, "skipped: d-max {} < s-degree {}".format(prof.dmax, prof.smax)
    try:
        lfun = oracle_lfun(tower, prof, progress)
    except BudgetExceeded as exc:
        return True, "skipped: {}".format(exc)
    result = compare_lfunctions(run.lfun, lfun)
    return result.verdict == "agree", result.detail or "agree to {} digits".format(
        result.effective_digits
    )


def run_selfcheck(tower, prof, progress=None, pairs=100, seed=0):
    results = [
        _guarded("artin-hasse", _artin_hasse, prof),
        _guarded("theta-trace-oracle", _trace_oracles, prof),
        _guarded("semilinearity", _semilinearity, prof, tower.geometry, pairs, seed),
    ]
    try:
        run = trace_formula_lfun(tower, prof)
    except DworkError as exc:
        results.append(CheckResult("trace-formula", False, str(exc)))
        return results
    results.extend(
        [
            _guarded("fredholm-integrality", _integrality, run),
            _guarded("T-zero-specialization", _T_zero, run, tower.geometry, prof),
            _guarded("route-agreement", _route_agreement, run, prof),
            _guarded("doubling-D", _doubling, tower, prof),
            _guarded("fiber-identity", _fiber_identity, run, tower, prof, 3),
            _guarded("oracle-agreement", _oracle, run, tower, prof, progress),
        ]
    )
    return results


def summarize(results):
    lines = []
    for result in results:
        status = "OK" if result.ok else "ERROR"
        lines.append("{:<24} {:<6} {}".format(result.name, status, result.detail))
    ok = all(result.ok for result in results)
    lines.append("Check complete: {}".format("OK" if ok else "ERROR"))
    return ok, lines


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def test_selfcheck_passes_on_small_towers():
    for p, geometry, f in [(2, AFFINE_LINE, {1: 1}), (2, TORUS, {1: 1, -1: 1})]:
        tower = TowerInput.build(p, geometry, f)
        prof = PrecisionProfile.auto(p, 6, 5, 3, 3, degree=tower.degree)
        results = run_selfcheck(tower, prof, pairs=10)
        ok, lines = summarize(results)
        assert ok, "\n".join(lines)
        assert lines[-1] == "Check complete: OK"
        assert len(results) == 9


def test_failed_checks_are_reported():
    results = [CheckResult("a", True, ""), CheckResult("b", False, "broken")]
    ok, lines = summarize(results)
    assert not ok
    assert lines[-1] == "Check complete: ERROR"

    def explode():
        raise BudgetExceeded("too many points")

    result = _guarded("boom", explode)
    assert not result.ok and "too many points" in result.detail

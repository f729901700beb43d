"""T-adic exponential sums by brute-force enumeration of points.

    S_f(T, d) = sum over x in X(F_{q^d}) of (1+T)^Tr(f(x^))

where x^ is the Teichmuller lift of x and Tr the trace down to Z_p.
"""

import logging
import random
from collections import namedtuple

from .errors import BudgetExceeded, ConfigError
from .fredholm import ORACLE, compare_lfunctions, l_from_traces, trace_formula_lfun, zeta_series
from .padic import (
    PrecisionProfile,
    UnramifiedApprox,
    ZpTSeries,
    field_elements,
    irreducible_modulus,
    one_plus_T_pow,
    teichmuller_lift,
    teichmuller_scalar,
    unramified_trace,
)
from .series import AFFINE_LINE, TORUS, TSeriesPoly
from .splitting import TowerInput

logger = logging.getLogger(__name__)

ENUMERATION_BUDGET = 10 ** 7

ExpSumReport = namedtuple("ExpSumReport", "sums point_counts")


def _no_progress(items, length, label):
    return items


def teichmuller_points(tower, d, prof):
    p = tower.p
    e = d * tower.base_degree
    modulus = irreducible_modulus(p, e)
    for coords in field_elements(p, e):
        if tower.geometry == TORUS and not any(coords):
            continue
        yield teichmuller_lift(UnramifiedApprox(p, modulus, coords, 1), prof)


def point_count(tower, d):
    size = tower.p ** (d * tower.base_degree)
    return size - 1 if tower.geometry == TORUS else size


def check_budget(tower, d, budget=ENUMERATION_BUDGET):
    size = tower.p ** (d * tower.base_degree)
    if size > budget:
        raise BudgetExceeded(
            "S_f(T,{}) enumerates {}^{} = {} points, more than the budget of {}".format(
                d, tower.p, d * tower.base_degree, size, budget
            )
        )


def exp_sum(tower, d, prof, progress=None, budget=ENUMERATION_BUDGET):
    """S_f(T, d) as a ZpTSeries."""
    check_budget(tower, d, budget)
    progress = progress or _no_progress
    powers = {}
    total = ZpTSeries.zero(prof)
    points = teichmuller_points(tower, d, prof)
    for point in progress(points, point_count(tower, d), "S_f(T,{})".format(d)):
        trace = unramified_trace(tower.evaluate(point, prof))
        key = (trace.residue, trace.known_digits)
        if key not in powers:
            powers[key] = one_plus_T_pow(trace, prof)
        total = total + powers[key]
    logger.debug(
        "S_f(T,%d): %d points, %d distinct traces", d, point_count(tower, d), len(powers)
    )
    return total


def exp_sums(tower, prof, dmax=None, progress=None):
    dmax = prof.dmax if dmax is None else dmax
    check_budget(tower, dmax)
    sums = [exp_sum(tower, d, prof, progress) for d in range(1, dmax + 1)]
    counts = [point_count(tower, d) for d in range(1, dmax + 1)]
    return ExpSumReport(sums, counts)


def oracle_lfun(tower, prof, progress=None):
    if prof.dmax < prof.smax:
        raise ConfigError(
            "the oracle needs d-max >= s-degree, got {} < {}".format(prof.dmax, prof.smax)
        )
    report = exp_sums(tower, prof, prof.smax, progress)
    return l_from_traces(report.sums, prof.smax, ORACLE)


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def test_zero_tower_counts_points():
    prof = PrecisionProfile.auto(3, 6, 4, 3, 3)
    for geometry in (AFFINE_LINE, TORUS):
        tower = TowerInput.build(3, geometry, {})
        report = exp_sums(tower, prof)
        assert report.point_counts == [point_count(tower, d) for d in (1, 2, 3)]
        for d, s in enumerate(report.sums, 1):
            assert s == point_count(tower, d)


def test_small_sums_by_hand():
    prof = PrecisionProfile.auto(2, 6, 3, 3, 3)
    tower = TowerInput.build(2, AFFINE_LINE, {1: 1})
    assert exp_sum(tower, 1, prof) == ZpTSeries(prof, [2, 1])
    assert exp_sum(tower, 2, prof) == ZpTSeries(prof, [4, 0, 3])


def test_sums_reduce_to_point_counts():
    prof = PrecisionProfile.auto(3, 6, 4, 3, 3)
    tower = TowerInput.build(3, TORUS, {2: 1, -1: 2})
    report = exp_sums(tower, prof)
    for s, n in zip(report.sums, report.point_counts):
        assert s.coefficient(0) == n


def test_degree_one_sum_directly():
    prof = PrecisionProfile.auto(5, 6, 5, 3, 3)
    tower = TowerInput.build(5, AFFINE_LINE, {3: 2, 1: 1})
    expected = ZpTSeries.zero(prof)
    for x in range(5):
        t = teichmuller_scalar(x, prof)
        value = sum(teichmuller_scalar(c, prof) * t ** u for u, c in tower.terms)
        expected = expected + one_plus_T_pow(value, prof)
    assert exp_sum(tower, 1, prof) == expected


def test_conjugate_points_have_equal_summands():
    prof = PrecisionProfile.auto(3, 6, 4, 3, 3)
    tower = TowerInput.build(3, AFFINE_LINE, {2: 1, 1: 1})
    rng = random.Random(8)
    modulus = irreducible_modulus(3, 3)
    for _ in range(10):
        coords = [rng.randrange(3) for _ in range(3)]
        point = teichmuller_lift(UnramifiedApprox(3, modulus, coords, 1), prof)
        trace = unramified_trace(tower.evaluate(point, prof))
        assert unramified_trace(tower.evaluate(point.conjugate(), prof)) == trace


def test_budget():
    import pytest

    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    tower = TowerInput.build(2, AFFINE_LINE, {1: 1})
    with pytest.raises(BudgetExceeded):
        exp_sum(tower, 24, prof)
    with pytest.raises(ConfigError):
        oracle_lfun(tower, PrecisionProfile.auto(2, 6, 4, 4, 3))


def test_oracle_lfun_examples():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    assert oracle_lfun(TowerInput.build(2, AFFINE_LINE, {}), prof) == TSeriesPoly(
        prof, [1, -2], 3
    )
    L = oracle_lfun(TowerInput.build(2, AFFINE_LINE, {1: 1}), prof)
    assert L[1] == -ZpTSeries(prof, [2, 1])
    prof = PrecisionProfile.auto(3, 6, 4, 3, 3)
    assert oracle_lfun(TowerInput.build(3, TORUS, {}), prof) == zeta_series(prof, TORUS, 3)


def test_extension_field_coefficients():
    prof = PrecisionProfile.auto(2, 6, 4, 2, 2)
    tower = TowerInput.build(2, AFFINE_LINE, {1: (0, 1)}, base_degree=2)
    report = exp_sums(tower, prof)
    assert report.point_counts == [4, 16]
    for s, n in zip(report.sums, report.point_counts):
        assert s.coefficient(0) == n


def test_oracle_matches_trace_formula():
    for p, geometry, f in [
        (2, AFFINE_LINE, {1: 1}),
        (2, AFFINE_LINE, {3: 1}),
        (3, AFFINE_LINE, {2: 1, 1: 1}),
        (2, TORUS, {1: 1, -1: 1}),
    ]:
        tower = TowerInput.build(p, geometry, f)
        prof = PrecisionProfile.auto(p, 6, 6, 3, 3, degree=tower.degree)
        L = trace_formula_lfun(tower, prof).lfun
        result = compare_lfunctions(oracle_lfun(tower, prof), L)
        assert result.verdict == "agree", result.detail
        assert result.effective_digits >= 4

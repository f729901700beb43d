"""Fredholm series of nuclear matrices and the two routes to the L-function.

    L(s) = C(psi_0, s) / C(psi_1, s)                 (trace formula)
    L(s) = exp(-sum_d S_d s^d / d)                   (power sums)

with S_d = Tr(psi_0^d) - Tr(psi_1^d) on the Dwork side, or S_d = S_f(T, d)
from point enumeration.
"""

import logging
import random
from collections import namedtuple

from sympy import Matrix, Symbol

from .dwork import NuclearMatrix, assemble_matrix
from .errors import DomainError
from .padic import PrecisionProfile, ZpTSeries
from .series import AFFINE_LINE, TORUS, TSeriesPoly, exp_from_log_derivative
from .splitting import TowerInput, build_Ef

logger = logging.getLogger(__name__)

TRACE_FORMULA = "trace-formula"
POWER_TRACES = "power-traces"
ORACLE = "oracle"


class FredholmSeries(TSeriesPoly):
    """det(1 - sM) mod s^(smax+1)."""

    __slots__ = ("provenance",)

    def __init__(self, prof, coeffs, order, provenance=""):
        super().__init__(prof, coeffs, order, "s")
        self.provenance = provenance

    def is_integral(self):
        """No digit was lost: every coefficient is known at working precision."""
        return self.min_digits == self.prof.digits


class LFunctionSeries(TSeriesPoly):
    __slots__ = ("route",)

    def __init__(self, prof, coeffs, order, route):
        super().__init__(prof, coeffs, order, "s")
        self.route = route

    @property
    def effective_digits(self):
        return self.min_digits

    def at_T_zero(self):
        return [c.coefficient(0) for c in self.coeffs]


def zeta_series(prof, geometry, order):
    """The T = 0 specialization: 1 - ps, or (1 - ps)/(1 - s) on the torus."""
    p = prof.p
    if geometry == AFFINE_LINE:
        coeffs = [1, -p]
    else:
        coeffs = [1] + [1 - p] * order
    return LFunctionSeries(prof, coeffs, order, "zeta")


def _positions(M):
    index = {e: k for k, e in enumerate(M.basis)}
    rows = [[] for _ in M.basis]
    cols = [[] for _ in M.basis]
    for (v, u), e in sorted(M.entries.items()):
        rows[index[v]].append((index[u], e))
        cols[index[u]].append((index[v], e))
    return rows, cols


def char_series(M, smax):
    """det(1 - sM) mod s^(smax+1), division free.

    Berkowitz: adding basis element k to the leading block A multiplies the
    coefficient vector by the Toeplitz matrix with first column
    1, -a_kk, -R C, -R A C, -R A^2 C, ... ; only the first smax+1 entries
    are needed, so A^m C is formed for m <= smax - 2 only.
    """
    prof = M.prof
    rows, cols = _positions(M)
    one = ZpTSeries.one(prof)
    zero = ZpTSeries.zero(prof)
    coeffs = [one] + [zero] * smax
    for k in range(len(M.basis)):
        diag = zero
        R = {}
        for j, e in rows[k]:
            if j < k:
                R[j] = e
            elif j == k:
                diag = e
        w = {i: e for i, e in cols[k] if i < k}
        t = [one, -diag]
        for _ in range(smax - 1):
            if not w or not R:
                break
            acc = zero
            for j, x in w.items():
                if j in R:
                    acc = acc + R[j] * x
            t.append(-acc)
            nxt = {}
            for j, x in w.items():
                for i, e in cols[j]:
                    if i < k:
                        term = e * x
                        nxt[i] = nxt[i] + term if i in nxt else term
            w = {i: x for i, x in nxt.items() if not x.is_zero()}
        coeffs = [
            _toeplitz_entry(t, coeffs, j, zero) for j in range(smax + 1)
        ]
    logger.debug("C(%r) computed to s^%d", M, smax)
    return FredholmSeries(prof, coeffs, smax, repr(M))


def _toeplitz_entry(t, previous, j, zero):
    acc = zero
    for i in range(min(j, len(t) - 1) + 1):
        if not previous[j - i].is_zero():
            acc = acc + t[i] * previous[j - i]
    return acc


def power_traces(M, dmax):
    """[Tr(M), Tr(M^2), ..., Tr(M^dmax)] via repeated sparse products."""
    prof = M.prof
    traces = [ZpTSeries.zero(prof) for _ in range(dmax)]
    for u in M.basis:
        vector = {u: ZpTSeries.one(prof)}
        for d in range(dmax):
            vector = M.apply(vector)
            if not vector:
                break
            if u in vector:
                traces[d] = traces[d] + vector[u]
    return traces


def l_from_traces(S, smax, route=POWER_TRACES):
    if len(S) < smax:
        raise DomainError("{} power sums given, {} needed".format(len(S), smax))
    prof = S[0].prof
    E = exp_from_log_derivative(prof, [-x for x in S[:smax]], smax)
    return LFunctionSeries(prof, E.coeffs, smax, route)


def l_trace_formula(M0, M1, smax, C0=None, C1=None):
    C0 = C0 or char_series(M0, smax)
    C1 = C1 or char_series(M1, smax)
    L = C0 * C1.inverse()
    return LFunctionSeries(M0.prof, L.coeffs, smax, TRACE_FORMULA)


TraceFormulaRun = namedtuple("TraceFormulaRun", "lfun c0 c1 m0 m1 splitting")


def trace_formula_lfun(tower, prof):
    Ef = build_Ef(tower, prof)
    m0 = assemble_matrix(Ef, 0)
    m1 = assemble_matrix(Ef, 1)
    logger.info("psi_0: %r; psi_1: %r", m0, m1)
    c0 = char_series(m0, prof.smax)
    c1 = char_series(m1, prof.smax)
    lfun = l_trace_formula(m0, m1, prof.smax, c0, c1)
    return TraceFormulaRun(lfun, c0, c1, m0, m1, Ef)


Comparison = namedtuple(
    "Comparison", "verdict effective_digits first_disagreement left right detail"
)


def compare_lfunctions(l1, l2):
    """Coefficientwise comparison at the precision both sides know."""
    digits = min(l1.min_digits, l2.min_digits)
    where = l1.first_disagreement(l2)
    if where is None:
        return Comparison("agree", digits, None, None, None, "")
    k, j = where
    left = l1[k].coefficient(j)
    right = l2[k].coefficient(j)
    detail = "coefficient of s^{} T^{}: {} vs {}".format(k, j, left, right)
    return Comparison("mismatch", digits, (k, j), left, right, detail)


def doubling_check(tower, prof):
    """Recompute at x-degree 2D; every retained coefficient must be unchanged."""
    base = trace_formula_lfun(tower, prof)
    doubled = trace_formula_lfun(tower, prof.with_degree_bound(2 * prof.D))
    for name, left, right in [
        ("C(psi_0)", base.c0, doubled.c0),
        ("C(psi_1)", base.c1, doubled.c1),
        ("L", base.lfun, doubled.lfun),
    ]:
        result = compare_lfunctions(left, right)
        if result.verdict != "agree":
            return result._replace(detail="{}: {}".format(name, result.detail))
    return compare_lfunctions(base.lfun, doubled.lfun)


def to_json(series):
    """L-series as nested lists: s-index -> T-index -> residue string."""
    prof = series.prof
    return {
        "route": getattr(series, "route", None),
        "p": prof.p,
        "T_precision": prof.b,
        "s_degree": series.order,
        "coefficients": [[str(r) for r in c.residues] for c in series.coeffs],
        "known_digits": [list(c.precs) for c in series.coeffs],
    }


def lfunction_from_json(doc, prof):
    if doc["p"] != prof.p or doc["T_precision"] != prof.b:
        raise DomainError("report does not match the precision profile")
    coeffs = [
        ZpTSeries(prof, [int(r) for r in residues], precs)
        for residues, precs in zip(doc["coefficients"], doc["known_digits"])
    ]
    return LFunctionSeries(prof, coeffs, doc["s_degree"], doc["route"])


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def _constant_matrix(prof, rows):
    entries = {
        (v, u): ZpTSeries.constant(prof, x)
        for v, row in enumerate(rows)
        for u, x in enumerate(row)
    }
    return NuclearMatrix(prof, AFFINE_LINE, 0, range(len(rows)), entries, 0)


def test_char_series_small_cases():
    prof = PrecisionProfile.auto(3, 6, 3, 4, 4)
    empty = NuclearMatrix(prof, AFFINE_LINE, 0, range(3), {}, 0)
    assert char_series(empty, 4) == TSeriesPoly.one(prof, 4)
    lam = ZpTSeries(prof, [5, 1, 2])
    single = NuclearMatrix(prof, AFFINE_LINE, 0, [0], {(0, 0): lam}, 0)
    assert char_series(single, 4) == TSeriesPoly(prof, [1, -lam], 4)
    assert power_traces(single, 3) == [lam, lam * lam, lam * lam * lam]


def test_char_series_against_sympy():
    prof = PrecisionProfile.auto(5, 8, 1, 5, 5)
    rng = random.Random(1)
    lam = Symbol("lam")
    for n in (2, 3, 5, 6):
        rows = [[rng.randrange(-9, 10) for _ in range(n)] for _ in range(n)]
        expected = Matrix(rows).charpoly(lam).all_coeffs()
        got = char_series(_constant_matrix(prof, rows), 5)
        for j in range(min(n, 5) + 1):
            assert got[j] == int(expected[j])
        for j in range(n + 1, 6):
            assert got[j].is_zero()


def test_zero_tower_fredholm_series():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    Ef = build_Ef(TowerInput.build(2, AFFINE_LINE, {}), prof)
    M0 = assemble_matrix(Ef, 0)
    M1 = assemble_matrix(Ef, 1)
    assert char_series(M0, 3) == TSeriesPoly(prof, [1, -2], 3)
    assert power_traces(M0, 3) == [2, 4, 8]
    assert all(x.is_zero() for x in power_traces(M1, 3))
    assert l_trace_formula(M0, M1, 3) == TSeriesPoly(prof, [1, -2], 3)

    Ef = build_Ef(TowerInput.build(2, TORUS, {}), prof)
    L = l_trace_formula(assemble_matrix(Ef, 0), assemble_matrix(Ef, 1), 3)
    assert L == zeta_series(prof, TORUS, 3)


def test_l_from_traces_examples():
    import pytest

    prof = PrecisionProfile.auto(3, 6, 3, 4, 4)
    pd = [ZpTSeries.constant(prof, 3 ** d) for d in range(1, 5)]
    assert l_from_traces(pd, 4) == TSeriesPoly(prof, [1, -3], 4)
    torus = [x - 1 for x in pd]
    assert l_from_traces(torus, 4) == zeta_series(prof, TORUS, 4)
    zeros = [ZpTSeries.zero(prof)] * 4
    assert l_from_traces(zeros, 4) == TSeriesPoly.one(prof, 4)
    with pytest.raises(DomainError):
        l_from_traces(zeros[:2], 4)


def test_routes_agree_on_random_towers():
    rng = random.Random(2024)
    for _ in range(20):
        p = rng.choice([2, 3])
        geometry = rng.choice([AFFINE_LINE, TORUS])
        deg = rng.randrange(1, 5)
        low = 1 if geometry == AFFINE_LINE else -deg
        f = {u: rng.randrange(1, p) for u in range(low, deg + 1) if u and rng.random() < 0.6}
        f[deg] = 1
        prof = PrecisionProfile.auto(p, 4, 4, 3, 3, degree=deg)
        run = trace_formula_lfun(TowerInput.build(p, geometry, f), prof)
        S = [
            x - y
            for x, y in zip(power_traces(run.m0, 3), power_traces(run.m1, 3))
        ]
        assert compare_lfunctions(run.lfun, l_from_traces(S, 3)).verdict == "agree"
        assert run.c0.is_integral() and run.c1.is_integral()
        assert run.lfun.at_T_zero() == zeta_series(prof, geometry, 3).at_T_zero()


def test_doubling_check():
    prof = PrecisionProfile.auto(2, 6, 6, 3, 3, degree=3)
    tower = TowerInput.build(2, AFFINE_LINE, {3: 1})
    assert doubling_check(tower, prof).verdict == "agree"
    prof = PrecisionProfile.auto(2, 6, 6, 3, 3)
    result = doubling_check(TowerInput.build(2, AFFINE_LINE, {1: 1}), prof)
    assert result.verdict == "agree", result.detail


def test_compare_reports_first_disagreement():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    left = LFunctionSeries(prof, [1, ZpTSeries(prof, [2, 1])], 3, ORACLE)
    right = LFunctionSeries(prof, [1, ZpTSeries(prof, [2, 3])], 3, TRACE_FORMULA)
    result = compare_lfunctions(left, right)
    assert result.verdict == "mismatch"
    assert result.first_disagreement == (1, 1)


def test_json_round_trip():
    prof = PrecisionProfile.auto(2, 6, 6, 3, 3)
    run = trace_formula_lfun(TowerInput.build(2, AFFINE_LINE, {1: 1}), prof)
    doc = to_json(run.lfun)
    back = lfunction_from_json(doc, prof)
    assert back == run.lfun
    assert [list(c.precs) for c in back.coeffs] == doc["known_digits"]
    assert back.route == TRACE_FORMULA

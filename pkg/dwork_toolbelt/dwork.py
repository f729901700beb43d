"""Canonical Dwork operators and the matrices of psi_i = theta_i o E_f.

theta_0 acts on functions, theta_1 on differentials. In the monomial basis

    theta_0(x^u)          = p x^(u/p)            if p | u
    theta_1(x^u dx)       = x^((u+1)/p - 1) dx   if p | u+1   (affine line)
    theta_1(x^u dx/x)     = x^(u/p) dx/x         if p | u     (torus)

and zero otherwise. The trace oracles below recompute these from the
multiplication matrix of x^u over the subring generated by x^p.
"""

import logging
import random
from collections import defaultdict

from .errors import DomainError, IntegralityError
from .padic import PrecisionProfile, Valuation, ZpTSeries
from .series import AFFINE_LINE, TORUS, XSeries
from .splitting import TowerInput, build_Ef

logger = logging.getLogger(__name__)


def _floor_bound(bound, p):
    return bound // p


def theta0_apply(g):
    if g.differential:
        raise DomainError("theta_0 acts on functions")
    p = g.prof.p
    out = {u // p: c.scale(p) for u, c in g.coeffs.items() if u % p == 0}
    return XSeries(g.prof, g.geometry, out, _floor_bound(g.degree_bound, p))


def theta1_apply(g):
    if not g.differential:
        raise DomainError("theta_1 acts on differentials")
    p = g.prof.p
    if g.geometry == AFFINE_LINE:
        out = {(u + 1) // p - 1: c for u, c in g.coeffs.items() if (u + 1) % p == 0}
        bound = max((g.degree_bound + 1) // p - 1, 0)
    else:
        out = {u // p: c for u, c in g.coeffs.items() if u % p == 0}
        bound = _floor_bound(g.degree_bound, p)
    return XSeries(g.prof, g.geometry, out, bound, differential=True)


def theta_apply(g, i):
    return theta1_apply(g) if i else theta0_apply(g)


def sigma(g):
    return g.sigma()


def function_trace_oracle(u, p):
    """sigma^-1 of the trace of x^u over Z_p[x^p], read off the multiplication matrix.

    Returns {exponent: coefficient}.
    """
    trace = defaultdict(int)
    for j in range(p):
        k = u + j
        # x^u * x^j = x^(k mod p) * (x^p)^(k div p)
        if k % p == j:
            trace[k // p] += 1
    return dict(trace)


def differential_trace_oracle(u, p, geometry):
    """sigma^-1 of the trace of x^u dx (affine) or x^u dx/x (torus).

    Uses dx = x^(1-p) d(x^p) / p and d(x^p)/x^p = p dx/x.
    """
    shifted = u + 1 - p if geometry == AFFINE_LINE else u
    out = {}
    for e, c in function_trace_oracle(shifted, p).items():
        if c % p:
            raise IntegralityError("trace of a differential is not p-divisible")
        out[e] = c // p
    return out


def basis_range(geometry, D, i):
    if geometry == AFFINE_LINE:
        return range(0, D + 1) if i == 0 else range(0, D)
    return range(-D, D + 1)


class NuclearMatrix(object):
    """Matrix of psi_i in the monomial basis, stored sparse.

    The weighted basis pi^floor(|u|/c) x^u of weight c is a diagonal
    conjugation of this one; ``weighted_valuation`` reads valuations in it.
    """

    def __init__(self, prof, geometry, degree_index, basis, entries, degree, weight_c=None):
        self.prof = prof
        self.geometry = geometry
        self.degree_index = degree_index
        self.basis = tuple(basis)
        self.degree = degree
        self.weight_c = weight_c or max(degree, 1)
        self.entries = {k: e for k, e in entries.items() if not e.is_zero()}
        self.rows = defaultdict(list)
        self.columns = defaultdict(list)
        for (v, u), e in sorted(self.entries.items()):
            self.rows[v].append((u, e))
            self.columns[u].append((v, e))

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def basis_offset(self):
        return self.basis[0]

    def entry(self, v, u):
        return self.entries.get((v, u)) or ZpTSeries.zero(self.prof)

    def nonzero(self):
        return len(self.entries)

    def __repr__(self):
        return "NuclearMatrix(psi_{}, {}, N={}, {} nonzero)".format(
            self.degree_index, self.geometry, self.dimension, self.nonzero()
        )

    def _function_exponents(self, v, u):
        if self.degree_index == 1 and self.geometry == AFFINE_LINE:
            return v + 1, u + 1
        return v, u

    def decay_bound(self, v, u):
        """Lower bound for v_T(entry(v, u)) from the growth of E_f."""
        if self.degree == 0:
            return 0
        vf, uf = self._function_exponents(v, u)
        return -(-abs(self.prof.p * vf - uf) // self.degree)

    def weighted_valuation(self, v, u):
        c = self.weight_c
        val = self.entry(v, u).valuation_T()
        shift = abs(u) // c - abs(v) // c
        return Valuation(val.value + shift, val.exact)

    def check_decay(self):
        for (v, u), e in self.entries.items():
            val = e.valuation_T().value
            bound = self.decay_bound(v, u)
            if val < bound:
                raise IntegralityError(
                    "entry ({}, {}) of psi_{} has v_T = {} < {}".format(
                        v, u, self.degree_index, val, bound
                    )
                )
        return True

    def mod_T(self):
        p_mod = self.prof.modulus
        return {
            k: e.residues[0] % p_mod for k, e in self.entries.items() if e.residues[0]
        }

    def apply(self, vector):
        """M * vector for a sparse vector {index: ZpTSeries}."""
        out = {}
        for u, x in vector.items():
            for v, e in self.columns.get(u, ()):
                term = e * x
                out[v] = out[v] + term if v in out else term
        return out


def assemble_matrix(Ef, i, prof=None):
    """Matrix of psi_i = theta_i o (multiplication by E_f) on the basis of degree D."""
    prof = prof or Ef.profile
    series = Ef.series
    geometry = series.geometry
    basis = basis_range(geometry, prof.D, i)
    members = set(basis)
    entries = {}
    for u in basis:
        shifted = series.shift(u)
        if i:
            shifted = shifted.as_differential()
        image = theta_apply(shifted, i)
        for v, c in image.coeffs.items():
            if v in members:
                entries[(v, u)] = c
    matrix = NuclearMatrix(prof, geometry, i, basis, entries, Ef.source.degree)
    matrix.check_decay()
    logger.debug(
        "Assembled %r from E_f with %d terms", matrix, len(series.coeffs)
    )
    return matrix


def random_xseries(prof, geometry, rng, degree, bound, differential=False):
    """Random element with exponents up to |degree|, for property checks."""
    low = 0 if geometry == AFFINE_LINE else -degree
    coeffs = {
        u: ZpTSeries(prof, [rng.randrange(prof.modulus) for _ in range(prof.b)])
        for u in range(low, degree + 1)
        if rng.random() < 0.7
    }
    return XSeries(prof, geometry, coeffs, bound, differential)


def semilinearity_holds(g, h, i):
    """theta_i(sigma(g) * h) == g * theta_i(h), g a function, h in the domain of theta_i."""
    lifted = g.sigma().truncate(h.degree_bound)
    image = theta_apply(h, i)
    return theta_apply(lifted * h, i) == g.truncate(image.degree_bound) * image


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def test_theta0_examples():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    assert theta0_apply(XSeries.monomial(prof, AFFINE_LINE, 4, 4)) == XSeries.monomial(
        prof, AFFINE_LINE, 2, 2, 2
    )
    assert theta0_apply(XSeries.monomial(prof, AFFINE_LINE, 4, 3)).coeffs == {}
    assert theta0_apply(XSeries.one(prof, AFFINE_LINE, 4)) == XSeries.monomial(
        prof, AFFINE_LINE, 2, 0, 2
    )


def test_theta1_examples():
    import pytest

    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    x_dx = XSeries.monomial(prof, AFFINE_LINE, 4, 1, differential=True)
    dx = XSeries.monomial(prof, AFFINE_LINE, 4, 0, differential=True)
    assert theta1_apply(x_dx) == dx.truncate(1)
    assert theta1_apply(dx).coeffs == {}
    dx_x = XSeries.monomial(prof, TORUS, 4, 0, differential=True)
    assert theta1_apply(dx_x) == dx_x
    with pytest.raises(DomainError):
        theta1_apply(XSeries.one(prof, AFFINE_LINE, 4))


def test_trace_oracles():
    for p in (2, 3, 5, 7):
        _check_trace_oracles(p)


def _check_trace_oracles(p):
    prof = PrecisionProfile.auto(p, 4, 2, 2, 2)
    bound = 3 * p + 1
    for u in range(0, 3 * p + 1):
        g = XSeries.monomial(prof, AFFINE_LINE, bound, u)
        assert theta0_apply(g) == XSeries(prof, AFFINE_LINE, function_trace_oracle(u, p), bound)
        w = g.as_differential()
        assert theta1_apply(w) == XSeries(
            prof,
            AFFINE_LINE,
            differential_trace_oracle(u, p, AFFINE_LINE),
            bound,
            differential=True,
        )
    for u in range(-3 * p, 3 * p + 1):
        g = XSeries.monomial(prof, TORUS, bound, u)
        assert theta0_apply(g) == XSeries(prof, TORUS, function_trace_oracle(u, p), bound)
        w = g.as_differential()
        assert theta1_apply(w) == XSeries(
            prof, TORUS, differential_trace_oracle(u, p, TORUS), bound, differential=True
        )


def test_semilinearity():
    for geometry in (AFFINE_LINE, TORUS):
        _check_semilinearity(geometry)


def _check_semilinearity(geometry):
    rng = random.Random(23)
    for p in (2, 3):
        prof = PrecisionProfile.auto(p, 6, 3, 3, 3)
        for _ in range(50):
            dg = rng.randrange(1, 4)
            dh = rng.randrange(1, 7)
            bound = p * dg + dh
            g = random_xseries(prof, geometry, rng, dg, dg)
            h = random_xseries(prof, geometry, rng, dh, bound)
            assert semilinearity_holds(g, h, 0)
            w = random_xseries(prof, geometry, rng, dh, bound, differential=True)
            assert semilinearity_holds(g, w, 1)
            # sigma(g) has degree p * dg, so nothing is truncated above
            assert sigma(g).degree_bound == p * dg


def test_theta0_commutes_with_shift():
    prof = PrecisionProfile.auto(3, 6, 3, 3, 3)
    rng = random.Random(4)
    g = random_xseries(prof, AFFINE_LINE, rng, 8, 8)
    for u in range(3):
        assert theta0_apply(g.shift(3 * u)) == theta0_apply(g).shift(u)


def test_matrix_of_zero_tower():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3, D=2)
    Ef = build_Ef(TowerInput.build(2, AFFINE_LINE, {}), prof)
    M0 = assemble_matrix(Ef, 0)
    assert M0.dimension == 3
    assert M0.mod_T() == {(0, 0): 2, (1, 2): 2}

    prof = PrecisionProfile.auto(2, 6, 4, 3, 3, D=6)
    Ef = build_Ef(TowerInput.build(2, AFFINE_LINE, {}), prof)
    M1 = assemble_matrix(Ef, 1)
    for v in M1.basis:
        for u in M1.basis:
            expected = 1 if 2 * (v + 1) == u + 1 else 0
            assert M1.entry(v, u) == expected


def test_matrix_entries_and_reduction():
    for p, geometry, f in [
        (2, AFFINE_LINE, {1: 1, 3: 1}),
        (3, AFFINE_LINE, {1: 1, 2: 1}),
        (2, TORUS, {1: 1, -1: 1}),
    ]:
        _check_matrix_entries(p, geometry, f)


def _check_matrix_entries(p, geometry, f):
    prof = PrecisionProfile.auto(p, 6, 4, 3, 3)
    tower = TowerInput.build(p, geometry, f)
    Ef = build_Ef(tower, prof)
    zero = build_Ef(TowerInput.build(p, geometry, {}), prof)
    for i in (0, 1):
        M = assemble_matrix(Ef, i)
        assert M.mod_T() == assemble_matrix(zero, i).mod_T()
        assert M.check_decay()
        for v in M.basis:
            for u in M.basis:
                if i == 0:
                    expected = Ef.series.coefficient(p * v - u).scale(p)
                elif geometry == AFFINE_LINE:
                    expected = Ef.series.coefficient(p * (v + 1) - 1 - u)
                else:
                    expected = Ef.series.coefficient(p * v - u)
                assert M.entry(v, u) == expected
                if not expected.is_zero():
                    assert M.weighted_valuation(v, u).value >= 0

"""The splitting function E_f = prod_u E(pi [c_u] x^u) of a Z_p-tower."""

import logging
import math
import random
from collections import namedtuple
from fractions import Fraction
from functools import lru_cache

from sympy import isprime

from .errors import ConfigError, DomainError, IntegralityError
from .padic import (
    PrecisionProfile,
    UnramifiedApprox,
    ZpTSeries,
    _polymul_mod,
    field_elements,
    irreducible_modulus,
    one_plus_T_pow,
    teichmuller_lift,
    teichmuller_scalar,
    unramified_trace,
)
from .series import AFFINE_LINE, GEOMETRIES, TORUS, XSeries, artin_hasse, pi_from_T

logger = logging.getLogger(__name__)


@lru_cache(maxsize=None)
def _embedding_root(p, m, big_modulus):
    """First root (mod p) of irreducible_modulus(p, m) inside F_p[xi]/(big_modulus)."""
    e = len(big_modulus) - 1
    if e % m:
        raise DomainError("F_{}^{} does not embed in F_{}^{}".format(p, m, p, e))
    small = irreducible_modulus(p, m)
    one = tuple([1] + [0] * (e - 1))
    for coords in field_elements(p, e):
        acc = [0] * e
        power = one
        for a in small:
            acc = [x + a * y for x, y in zip(acc, power)]
            power = _polymul_mod(power, coords, big_modulus, p)
        if all(x % p == 0 for x in acc):
            return coords
    raise DomainError("no root of {} mod {} found".format(small, p))


@lru_cache(maxsize=None)
def _lifted_coefficient(p, m, c, big_modulus, prof):
    """Teichmuller lift of c in F_{p^m}, embedded in Z_p[xi]/(big_modulus)."""
    e = len(big_modulus) - 1
    root = _embedding_root(p, m, big_modulus)
    value = [0] * e
    power = tuple([1] + [0] * (e - 1))
    for ci in c:
        value = [(x + ci * y) % p for x, y in zip(value, power)]
        power = _polymul_mod(power, root, big_modulus, p)
    return teichmuller_lift(UnramifiedApprox(p, big_modulus, value, 1), prof)


class TowerInput(namedtuple("TowerInput", "p geometry terms base_degree")):
    """f = sum c_u x^u over F_q, q = p**base_degree.

    ``terms`` is a sorted tuple of (u, c) pairs with c nonzero. For
    base_degree 1 each c is an int in [1, p); otherwise c is a coordinate
    tuple over irreducible_modulus(p, base_degree).
    """

    __slots__ = ()

    @classmethod
    def build(cls, p, geometry, f_coeffs, base_degree=1):
        if not isinstance(p, int) or not isprime(p):
            raise ConfigError("p must be a prime, got {!r}".format(p))
        if geometry not in GEOMETRIES:
            raise ConfigError(
                "geometry must be one of {}, got {!r}".format(GEOMETRIES, geometry)
            )
        if not isinstance(base_degree, int) or base_degree < 1:
            raise ConfigError("base degree must be a positive integer")

        terms = {}
        for u, c in dict(f_coeffs).items():
            if not isinstance(u, int) or isinstance(u, bool):
                raise ConfigError("exponent {!r} is not an integer".format(u))
            if geometry == AFFINE_LINE and u < 0:
                raise ConfigError(
                    "negative exponent {} on the affine line".format(u)
                )
            c = cls._normalize_coefficient(p, base_degree, c)
            if c is None:
                continue
            if u == 0:
                logger.warning("Dropping the constant term of f")
                continue
            terms[u] = c

        tower = cls(p, geometry, tuple(sorted(terms.items())), base_degree)
        if not terms:
            logger.info("f = 0: the L-function degenerates to a zeta function")
        elif math.gcd(tower.degree, p) != 1:
            logger.warning(
                "gcd(deg f, p) = gcd(%d, %d) != 1; slope analyses may not apply",
                tower.degree,
                p,
            )
        return tower

    @staticmethod
    def _normalize_coefficient(p, m, c):
        if m == 1:
            if isinstance(c, (list, tuple)):
                raise ConfigError("coefficient {!r} must be an integer".format(c))
            if not isinstance(c, int):
                raise ConfigError("coefficient {!r} is not an integer".format(c))
            return c % p or None
        if isinstance(c, int):
            c = [c]
        c = [int(x) % p for x in c]
        if len(c) > m:
            raise ConfigError("coefficient {} has more than {} coordinates".format(c, m))
        c.extend([0] * (m - len(c)))
        return tuple(c) if any(c) else None

    @property
    def f_coeffs(self):
        return dict(self.terms)

    @property
    def degree(self):
        return max((abs(u) for u, _ in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def describe(self):
        if not self.terms:
            return "0"
        parts = []
        for u, c in reversed(self.terms):
            mono = "x" if u == 1 else "x^{}".format(u)
            parts.append(mono if c == 1 else "{}*{}".format(c, mono))
        return " + ".join(parts)

    def coefficient_lift(self, c, point, prof):
        if self.base_degree == 1:
            return teichmuller_scalar(c, prof)
        return _lifted_coefficient(self.p, self.base_degree, c, point.modulus, prof)

    def evaluate(self, point, prof):
        """f at a Teichmuller point, coefficients replaced by their Teichmuller lifts."""
        q = point.p ** point.degree
        total = point * 0
        for u, c in self.terms:
            if u < 0:
                if point.is_zero():
                    raise DomainError("f has a pole at zero")
                power = point ** (u % (q - 1))
            else:
                power = point ** u
            total = total + power * self.coefficient_lift(c, point, prof)
        return total


def splitting_factor(c, u, prof, geometry, degree_bound):
    """E(pi [c] x^u), truncated at |exponent| <= degree_bound and T^b."""
    if c % prof.p == 0:
        return XSeries.one(prof, geometry, degree_bound)
    order = min(degree_bound // abs(u), prof.b - 1)
    E = artin_hasse(prof, order)
    base = pi_from_T(prof) * teichmuller_scalar(c, prof)
    coeffs = {}
    power = ZpTSeries.one(prof)
    for k in range(order + 1):
        coeffs[k * u] = E[k] * power
        power = power * base
    return XSeries(prof, geometry, coeffs, degree_bound)


class SplittingFunction(namedtuple("SplittingFunction", "series source profile")):
    __slots__ = ()

    def evaluate(self, point):
        return self.series.evaluate(point)

    def fiber_norm(self, point):
        """prod_{i<e} E_f(x^(p^i)) for a Teichmuller point x of Z_{p^e}, in Z_p[[T]]."""
        prof = self.profile
        b = prof.b
        total = None
        conj = point
        for _ in range(point.degree):
            values = self.series.evaluate(conj)
            total = values if total is None else _product(total, values, b)
            conj = conj.conjugate()
        residues = []
        precs = []
        for value in total:
            if any(value.coords[1:]):
                raise IntegralityError("norm {} does not lie in Z_p".format(value))
            residues.append(value.coords[0])
            precs.append(value.known_digits)
        return ZpTSeries(prof, residues, precs)


def _product(left, right, b):
    out = [left[0] * 0 for _ in range(b)]
    for i in range(b):
        if left[i].is_zero():
            continue
        for j in range(b - i):
            out[i + j] = out[i + j] + left[i] * right[j]
    return out


def build_Ef(tower, prof, degree_bound=None):
    """E_f truncated at degree_bound, by default max(D, deg f * b).

    Dropped terms of every factor then vanish mod T^b.
    """
    if tower.base_degree != 1:
        raise DomainError("the trace formula needs coefficients in F_p")
    if tower.p != prof.p:
        raise ConfigError("tower is over p={}, profile over p={}".format(tower.p, prof.p))
    if (prof.p - 1) * prof.D < tower.degree * prof.b:
        logger.warning(
            "x-degree D=%d is below deg f * b / (p - 1) = %s; truncated matrices may "
            "change digits mod T^%d",
            prof.D,
            Fraction(tower.degree * prof.b, prof.p - 1),
            prof.b,
        )
    if degree_bound is None:
        degree_bound = max(prof.D, tower.degree * prof.b)
    series = XSeries.one(prof, tower.geometry, degree_bound)
    for u, c in tower.terms:
        series = series * splitting_factor(c, u, prof, tower.geometry, degree_bound)
    logger.debug(
        "E_f for f = %s: %d terms up to degree %d",
        tower.describe(),
        len(series.coeffs),
        degree_bound,
    )
    return SplittingFunction(series, tower, prof)


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def _points(prof, e, geometry):
    modulus = irreducible_modulus(prof.p, e)
    for coords in field_elements(prof.p, e):
        if geometry == TORUS and not any(coords):
            continue
        yield teichmuller_lift(UnramifiedApprox(prof.p, modulus, coords, 1), prof)


def test_tower_validation():
    import pytest

    with pytest.raises(ConfigError):
        TowerInput.build(2, AFFINE_LINE, {-1: 1})
    with pytest.raises(ConfigError):
        TowerInput.build(4, AFFINE_LINE, {1: 1})
    with pytest.raises(ConfigError):
        TowerInput.build(2, "projective", {1: 1})
    tower = TowerInput.build(3, AFFINE_LINE, {0: 1, 2: 4, 1: 3})
    assert tower.f_coeffs == {2: 1}
    assert tower.degree == 2
    torus = TowerInput.build(2, TORUS, {1: 1, -1: 1})
    assert torus.degree == 1
    assert TowerInput.build(2, AFFINE_LINE, {}).is_zero()


def test_splitting_factor_examples():
    prof = PrecisionProfile(2, 3, 2, 2, 3, 3, 0)
    factor = splitting_factor(1, 1, prof, AFFINE_LINE, 2)
    expected = XSeries(prof, AFFINE_LINE, {0: 1, 1: ZpTSeries.T(prof)}, 2)
    assert factor == expected
    assert splitting_factor(0, 1, prof, AFFINE_LINE, 2) == XSeries.one(prof, AFFINE_LINE, 2)


def test_trivial_towers():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    zero = TowerInput.build(2, AFFINE_LINE, {})
    assert build_Ef(zero, prof).series == XSeries.one(prof, AFFINE_LINE, prof.D)
    x = TowerInput.build(2, AFFINE_LINE, {1: 1})
    Ef = build_Ef(x, prof)
    assert Ef.series == splitting_factor(1, 1, prof, AFFINE_LINE, Ef.series.degree_bound)


def test_Ef_specializes_to_one_and_decays():
    rng = random.Random(17)
    for p, geometry in [(2, AFFINE_LINE), (3, AFFINE_LINE), (2, TORUS), (3, TORUS)]:
        prof = PrecisionProfile.auto(p, 6, 6, 3, 3)
        for _ in range(3):
            exps = range(-3, 4) if geometry == TORUS else range(1, 4)
            tower = TowerInput.build(
                p, geometry, {u: rng.randrange(p) for u in exps if u}
            )
            series = build_Ef(tower, prof).series
            d = max(tower.degree, 1)
            for k, c in series.terms():
                assert c.residues[0] % p ** c.precs[0] == (1 if k == 0 else 0)
                assert c.valuation_T().value >= -(-abs(k) // d)


def test_Ef_is_multiplicative():
    prof = PrecisionProfile.auto(3, 6, 6, 3, 3)
    bound = 24
    f = TowerInput.build(3, AFFINE_LINE, {1: 1, 3: 2})
    g = TowerInput.build(3, AFFINE_LINE, {1: 1})
    h = TowerInput.build(3, AFFINE_LINE, {3: 2})
    assert build_Ef(f, prof, bound).series == (
        build_Ef(g, prof, bound).series * build_Ef(h, prof, bound).series
    )


def test_fiber_identity_at_one():
    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    Ef = build_Ef(TowerInput.build(2, AFFINE_LINE, {1: 1}), prof)
    one = UnramifiedApprox.scalar(2, (0, 1), 1, prof.digits)
    assert Ef.fiber_norm(one) == ZpTSeries(prof, [1, 1])


def test_fiber_identity():
    for p, geometry, f in [
        (2, AFFINE_LINE, {1: 1}),
        (2, AFFINE_LINE, {3: 1, 1: 1}),
        (3, AFFINE_LINE, {2: 1, 1: 1}),
        (2, TORUS, {1: 1, -1: 1}),
    ]:
        _check_fiber_identity(p, geometry, f)


def _check_fiber_identity(p, geometry, f):
    prof = PrecisionProfile.auto(p, 4, 6, 3, 3)
    tower = TowerInput.build(p, geometry, f)
    Ef = build_Ef(tower, prof)
    for e in (1, 2, 3):
        for point in _points(prof, e, geometry):
            trace = unramified_trace(tower.evaluate(point, prof))
            assert Ef.fiber_norm(point) == one_plus_T_pow(trace, prof)


def test_coefficients_in_extension_field():
    import pytest

    prof = PrecisionProfile.auto(2, 6, 4, 3, 3)
    tower = TowerInput.build(2, AFFINE_LINE, {1: (0, 1)}, base_degree=2)
    modulus = irreducible_modulus(2, 4)
    for coords in [(1, 0, 0, 0), (0, 1, 1, 0)]:
        point = teichmuller_lift(UnramifiedApprox(2, modulus, coords, 1), prof)
        value = tower.evaluate(point, prof)
        q = 2 ** 4
        assert value ** q == value
    with pytest.raises(DomainError):
        build_Ef(tower, prof)
    with pytest.raises(DomainError):
        _embedding_root(2, 2, irreducible_modulus(2, 3))

"""Truncated power series over Z_p[[T]].

XSeries holds functions and differentials in the coordinate x of the affine
line or the torus. TSeriesPoly holds series in a formal variable (t for the
Artin-Hasse exponential, s for Fredholm and L-series).
"""

import logging
import random
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError, IntegralityError, PrecisionExhausted
from .padic import PrecisionProfile, UnramifiedApprox, ZpTSeries

logger = logging.getLogger(__name__)

AFFINE_LINE = "affine"
TORUS = "torus"
GEOMETRIES = (AFFINE_LINE, TORUS)


class XSeries(object):
    """A function (or differential) in x, truncated at |exponent| <= degree_bound.

    Affine line: exponents 0..degree_bound, differential basis x^u dx.
    Torus: exponents -degree_bound..degree_bound, differential basis x^u dx/x.
    Absent exponents mean zero.
    """

    __slots__ = ("prof", "geometry", "coeffs", "degree_bound", "differential")

    def __init__(self, prof, geometry, coeffs, degree_bound, differential=False):
        if geometry not in GEOMETRIES:
            raise DomainError("unknown geometry {!r}".format(geometry))
        self.prof = prof
        self.geometry = geometry
        self.degree_bound = degree_bound
        self.differential = differential
        kept = {}
        for u, c in coeffs.items():
            if not self.in_range(u):
                raise DomainError(
                    "exponent {} outside the {} range of bound {}".format(
                        u, geometry, degree_bound
                    )
                )
            if not isinstance(c, ZpTSeries):
                c = ZpTSeries.constant(prof, c)
            if not c.is_zero():
                kept[u] = c
        self.coeffs = kept

    @classmethod
    def _make(cls, prof, geometry, coeffs, degree_bound, differential):
        obj = cls.__new__(cls)
        obj.prof = prof
        obj.geometry = geometry
        obj.coeffs = coeffs
        obj.degree_bound = degree_bound
        obj.differential = differential
        return obj

    @classmethod
    def monomial(cls, prof, geometry, degree_bound, u, coeff=1, differential=False):
        return cls(prof, geometry, {u: coeff}, degree_bound, differential)

    @classmethod
    def one(cls, prof, geometry, degree_bound):
        return cls.monomial(prof, geometry, degree_bound, 0)

    @property
    def low(self):
        return 0 if self.geometry == AFFINE_LINE else -self.degree_bound

    def in_range(self, u):
        return self.low <= u <= self.degree_bound

    def coefficient(self, u):
        return self.coeffs.get(u) or ZpTSeries.zero(self.prof)

    def terms(self):
        return sorted(self.coeffs.items())

    def _check_compatible(self, other):
        if other.geometry != self.geometry:
            raise DomainError(
                "geometry mismatch: {} vs {}".format(self.geometry, other.geometry)
            )
        if other.degree_bound != self.degree_bound:
            raise DomainError(
                "degree bound mismatch: {} vs {}".format(
                    self.degree_bound, other.degree_bound
                )
            )

    def __add__(self, other):
        self._check_compatible(other)
        if other.differential != self.differential:
            raise DomainError("cannot add a function and a differential")
        coeffs = dict(self.coeffs)
        for u, c in other.coeffs.items():
            coeffs[u] = coeffs[u] + c if u in coeffs else c
        return XSeries(self.prof, self.geometry, coeffs, self.degree_bound, self.differential)

    def __neg__(self):
        return XSeries._make(
            self.prof,
            self.geometry,
            {u: -c for u, c in self.coeffs.items()},
            self.degree_bound,
            self.differential,
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, ZpTSeries)):
            return XSeries(
                self.prof,
                self.geometry,
                {u: c * other for u, c in self.coeffs.items()},
                self.degree_bound,
                self.differential,
            )
        self._check_compatible(other)
        if self.differential and other.differential:
            raise DomainError("product of two differentials")
        low, high = self.low, self.degree_bound
        out = {}
        for u, c in self.coeffs.items():
            for v, e in other.coeffs.items():
                w = u + v
                if low <= w <= high:
                    term = c * e
                    out[w] = out[w] + term if w in out else term
        return XSeries(
            self.prof,
            self.geometry,
            out,
            self.degree_bound,
            self.differential or other.differential,
        )

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, XSeries):
            return NotImplemented
        if (other.geometry, other.differential) != (self.geometry, self.differential):
            return False
        for u in set(self.coeffs) | set(other.coeffs):
            if self.coefficient(u) != other.coefficient(u):
                return False
        return True

    __hash__ = None

    def __repr__(self):
        kind = "differential" if self.differential else "function"
        return "XSeries({}, {}, bound={}, {} terms)".format(
            self.geometry, kind, self.degree_bound, len(self.coeffs)
        )

    def shift(self, k):
        """Multiply by x^k without truncating; the bound grows by |k|."""
        if self.geometry == AFFINE_LINE and k < 0:
            raise DomainError("negative shift on the affine line")
        return XSeries._make(
            self.prof,
            self.geometry,
            {u + k: c for u, c in self.coeffs.items()},
            self.degree_bound + abs(k),
            self.differential,
        )

    def sigma(self):
        """The Frobenius lift g(x) -> g(x^p)."""
        if self.differential:
            raise DomainError("sigma is applied to functions only")
        p = self.prof.p
        return XSeries._make(
            self.prof,
            self.geometry,
            {p * u: c for u, c in self.coeffs.items()},
            p * self.degree_bound,
            False,
        )

    def truncate(self, degree_bound):
        low = 0 if self.geometry == AFFINE_LINE else -degree_bound
        return XSeries._make(
            self.prof,
            self.geometry,
            {u: c for u, c in self.coeffs.items() if low <= u <= degree_bound},
            degree_bound,
            self.differential,
        )

    def as_differential(self):
        return XSeries._make(
            self.prof, self.geometry, self.coeffs, self.degree_bound, True
        )

    def evaluate(self, point):
        """Value at a Teichmuller point of Z_{p^e}, as b coefficients of T."""
        prof = self.prof
        p = prof.p
        e = point.degree
        q = p ** e
        digits = min([point.known_digits] + [c.min_digits for c in self.coeffs.values()])
        acc = [[0] * e for _ in range(prof.b)]
        for u, c in self.coeffs.items():
            if u < 0:
                if point.is_zero():
                    raise DomainError("negative exponent evaluated at zero")
                # Teichmuller points are roots of unity of order dividing q-1
                power = point ** (u % (q - 1))
            else:
                power = point ** u
            for j, r in enumerate(c.residues):
                if r:
                    row = acc[j]
                    for i, x in enumerate(power.coords):
                        row[i] += r * x
        mod = p ** digits
        return [
            UnramifiedApprox._make(
                p, point.modulus, tuple(x % mod for x in row), digits
            )
            for row in acc
        ]


def xseries_mul(g, h):
    return g * h


class TSeriesPoly(object):
    """sum_k coeffs[k] * v^k mod v^(order+1), coefficients in Z_p[[T]]."""

    __slots__ = ("prof", "coeffs", "order", "variable")

    def __init__(self, prof, coeffs, order=None, variable="s"):
        coeffs = [
            c if isinstance(c, ZpTSeries) else ZpTSeries.constant(prof, c)
            for c in coeffs
        ]
        if order is None:
            order = max(len(coeffs) - 1, 0)
        coeffs = coeffs[: order + 1]
        coeffs.extend(ZpTSeries.zero(prof) for _ in range(order + 1 - len(coeffs)))
        self.prof = prof
        self.coeffs = tuple(coeffs)
        self.order = order
        self.variable = variable

    @classmethod
    def one(cls, prof, order, variable="s"):
        return cls(prof, [1], order, variable)

    def __getitem__(self, k):
        return self.coeffs[k]

    def __len__(self):
        return self.order + 1

    def constant_term(self):
        return self.coeffs[0]

    @property
    def min_digits(self):
        return min(c.min_digits for c in self.coeffs)

    def _like(self, coeffs, order=None):
        return TSeriesPoly(
            self.prof, coeffs, self.order if order is None else order, self.variable
        )

    def __add__(self, other):
        order = min(self.order, other.order)
        return self._like([x + y for x, y in zip(self.coeffs, other.coeffs)], order)

    def __neg__(self):
        return self._like([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, ZpTSeries)):
            return self._like([c * other for c in self.coeffs])
        order = min(self.order, other.order)
        out = []
        for n in range(order + 1):
            acc = self.coeffs[0] * other.coeffs[n]
            for k in range(1, n + 1):
                acc = acc + self.coeffs[k] * other.coeffs[n - k]
            out.append(acc)
        return self._like(out, order)

    __rmul__ = __mul__

    def inverse(self):
        """Division-free inverse; the constant term must be a unit."""
        h0 = self.coeffs[0].inverse()
        h = [h0]
        for n in range(1, self.order + 1):
            acc = self.coeffs[1] * h[n - 1]
            for k in range(2, n + 1):
                acc = acc + self.coeffs[k] * h[n - k]
            h.append(-(h0 * acc))
        return self._like(h)

    def derivative(self):
        return self._like(
            [self.coeffs[k].scale(k) for k in range(1, self.order + 1)],
            max(self.order - 1, 0),
        )

    def evaluate(self, x):
        """Substitute v = x, where x has zero constant term."""
        if x.residues[0]:
            raise DomainError("substituted series must have zero constant term")
        result = self.coeffs[self.order]
        for k in range(self.order - 1, -1, -1):
            result = result * x + self.coeffs[k]
        return result

    def truncate(self, order):
        return self._like(self.coeffs, order)

    def first_disagreement(self, other):
        """(k, j) of the first coefficient of v^k T^j that differs, or None."""
        for k in range(min(self.order, other.order) + 1):
            j = self.coeffs[k].first_disagreement(other.coeffs[k])
            if j is not None:
                return (k, j)
        return None

    def __eq__(self, other):
        if not isinstance(other, TSeriesPoly):
            return NotImplemented
        return self.first_disagreement(other) is None

    __hash__ = None

    def __repr__(self):
        return "{}({}; order {})".format(
            type(self).__name__, ", ".join(repr(c) for c in self.coeffs), self.order
        )


def exp_from_log_derivative(prof, dg, order, variable="s"):
    """exp(g) from dg[k-1] = k*g_k, using n*E_n = sum_k k*g_k*E_(n-k)."""
    E = [ZpTSeries.one(prof)]
    for n in range(1, order + 1):
        acc = ZpTSeries.zero(prof)
        for k in range(1, min(n, len(dg)) + 1):
            acc = acc + dg[k - 1] * E[n - k]
        E.append(acc.divide_int(n))
    return TSeriesPoly(prof, E, order, variable)


def series_exp(g, order=None):
    order = g.order if order is None else order
    if not g[0].is_zero():
        raise DomainError("exp needs a series without constant term")
    dg = [g[k].scale(k) for k in range(1, min(order, g.order) + 1)]
    return exp_from_log_derivative(g.prof, dg, order, g.variable)


def series_log(g, order=None):
    order = g.order if order is None else order
    if g[0] != 1:
        raise DomainError("log needs constant term 1")
    # m[n] = n*L_n, so the only divisions happen at the very end
    m = [None]
    for n in range(1, order + 1):
        acc = g[n].scale(n)
        for k in range(1, n):
            acc = acc - m[k] * g[n - k]
        m.append(acc)
    logs = [ZpTSeries.zero(g.prof)] + [m[n].divide_int(n) for n in range(1, order + 1)]
    return TSeriesPoly(g.prof, logs, order, g.variable)


@lru_cache(maxsize=None)
def artin_hasse_rational(p, order):
    """Exact coefficients of exp(sum_i t^(p^i)/p^i) up to t^order."""
    E = [Fraction(1)]
    for n in range(1, order + 1):
        total = Fraction(0)
        q = 1
        while q <= n:
            total += E[n - q]
            q *= p
        E.append(total / n)
    return tuple(E)


def artin_hasse(prof, order):
    p = prof.p
    mod = prof.modulus
    coeffs = []
    for k, c in enumerate(artin_hasse_rational(p, order)):
        if c.denominator % p == 0:
            raise IntegralityError(
                "Artin-Hasse coefficient {} of t^{} is not {}-integral".format(c, k, p)
            )
        coeffs.append(
            ZpTSeries.constant(prof, c.numerator * pow(c.denominator, -1, mod))
        )
    return TSeriesPoly(prof, coeffs, order, variable="t")


@lru_cache(maxsize=None)
def pi_from_T(prof):
    """The unique pi in (p, T) with E(pi) = 1 + T."""
    E = artin_hasse(prof, prof.b)
    dE = E.derivative()
    target = ZpTSeries(prof, [1, 1])
    pi = ZpTSeries.T(prof)
    for step in range(prof.b + 2):
        err = E.evaluate(pi) - target
        if err.is_zero():
            logger.debug("pi settled after %d Newton steps (p=%d, b=%d)", step, prof.p, prof.b)
            return pi
        pi = pi - err * dE.evaluate(pi).inverse()
    raise IntegralityError("Newton iteration for pi did not settle")


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def _rational_exp_oracle(p, order):
    """exp(g) as sum g^m/m!, independent of the recurrence above."""
    g = [Fraction(0)] * (order + 1)
    q = 1
    while q <= order:
        g[q] = Fraction(1, q)
        q *= p
    result = [Fraction(0)] * (order + 1)
    term = [Fraction(1)] + [Fraction(0)] * order
    for m in range(0, order + 1):
        result = [r + t for r, t in zip(result, term)]
        nxt = [Fraction(0)] * (order + 1)
        for i, ti in enumerate(term):
            if ti:
                for j in range(1, order + 1 - i):
                    if g[j]:
                        nxt[i + j] += ti * g[j]
        term = [x / (m + 1) for x in nxt]
    return result


def _random_series(prof, rng, order, constant):
    coeffs = [ZpTSeries.constant(prof, constant)]
    for _ in range(order):
        coeffs.append(
            ZpTSeries(prof, [rng.randrange(prof.modulus) for _ in range(prof.b)])
        )
    return TSeriesPoly(prof, coeffs, order)


def test_exp_of_zero():
    prof = PrecisionProfile.auto(5, 6, 3, 4, 4)
    assert series_exp(TSeriesPoly(prof, [0], 4)) == TSeriesPoly.one(prof, 4)


def test_exp_of_t():
    prof = PrecisionProfile.auto(5, 6, 3, 3, 3)
    E = series_exp(TSeriesPoly(prof, [0, 1], 3, "t"))
    assert E[0] == 1 and E[1] == 1
    assert E[2].scale(2) == 1
    assert E[3].scale(6) == 1


def test_exp_of_log_of_linear_factor():
    prof = PrecisionProfile.auto(2, 6, 3, 4, 4)
    g = TSeriesPoly(
        prof,
        [0] + [ZpTSeries.constant(prof, -(2 ** d)).divide_int(d) for d in range(1, 5)],
        4,
    )
    assert series_exp(g) == TSeriesPoly(prof, [1, -2], 4)


def test_log_examples():
    import pytest

    prof = PrecisionProfile.auto(3, 6, 3, 4, 4)
    assert series_log(TSeriesPoly.one(prof, 4)) == TSeriesPoly(prof, [0], 4)
    logs = series_log(TSeriesPoly(prof, [1, -3], 4))
    for d in range(1, 5):
        assert logs[d].scale(d) == -(3 ** d)
    with pytest.raises(DomainError):
        series_log(TSeriesPoly(prof, [2, 1], 4))
    with pytest.raises(DomainError):
        series_exp(TSeriesPoly(prof, [1, 1], 4))


def test_exp_log_round_trip():
    prof = PrecisionProfile.auto(5, 6, 4, 4, 4)
    rng = random.Random(5)
    for _ in range(5):
        g = _random_series(prof, rng, 4, 1)
        assert series_exp(series_log(g)) == g


def test_exp_is_additive_and_solves_its_ode():
    prof = PrecisionProfile.auto(5, 6, 4, 4, 4)
    rng = random.Random(9)
    for _ in range(5):
        g1 = _random_series(prof, rng, 4, 0)
        g2 = _random_series(prof, rng, 4, 0)
        assert series_exp(g1 + g2) == series_exp(g1) * series_exp(g2)
        E = series_exp(g1)
        assert E.derivative() == (E * g1.derivative().truncate(3)).truncate(3)


def test_artin_hasse_leading_terms():
    for p in (2, 3, 5, 7):
        E = artin_hasse_rational(p, 4)
        assert E[0] == 1 and E[1] == 1


def test_artin_hasse_mod_8():
    prof = PrecisionProfile(2, 3, 4, 4, 3, 3, 0)
    E = artin_hasse(prof, 4)
    assert [E[k].residues[0] for k in range(5)] == [1, 1, 1, 6, 6]


def test_artin_hasse_integrality_against_oracle():
    for p in (2, 3, 5, 7):
        exact = artin_hasse_rational(p, 32)
        assert list(exact) == _rational_exp_oracle(p, 32)
        assert all(c.denominator % p for c in exact)


def test_pi_examples():
    prof = PrecisionProfile.auto(2, 6, 3, 3, 3)
    pi = pi_from_T(prof)
    assert pi == ZpTSeries(prof, [0, 1, -1])
    for p in (3, 5, 7):
        prof = PrecisionProfile.auto(p, 6, 2, 3, 3)
        assert pi_from_T(prof) == ZpTSeries.T(prof)


def test_pi_round_trip():
    for p, a, b in [(2, 6, 8), (3, 6, 8), (5, 6, 8), (7, 12, 40)]:
        prof = PrecisionProfile.auto(p, a, b, 4, 4)
        E = artin_hasse(prof, b)
        assert E.evaluate(pi_from_T(prof)) == ZpTSeries(prof, [1, 1])


def test_xseries_products():
    import pytest

    prof = PrecisionProfile.auto(3, 6, 3, 3, 3)
    h = XSeries(prof, AFFINE_LINE, {0: 2, 1: 5, 3: 1}, 4)
    one = XSeries.one(prof, AFFINE_LINE, 4)
    assert xseries_mul(one, h) == h
    x = XSeries.monomial(prof, AFFINE_LINE, 4, 1)
    assert x * x == XSeries.monomial(prof, AFFINE_LINE, 4, 2)
    assert (x * x * x * x * x).coeffs == {}
    inv = XSeries.monomial(prof, TORUS, 4, -1)
    assert inv * XSeries.monomial(prof, TORUS, 4, 1) == XSeries.one(prof, TORUS, 4)
    with pytest.raises(DomainError):
        xseries_mul(x, XSeries.monomial(prof, TORUS, 4, 1))

"""Fixed-precision arithmetic in Z_p, Z_p[[T]] and unramified extensions of Z_p.

Every value remembers how many p-adic digits of it are known. Working
precision is ``a + guard`` digits; divisions are the only operations that lose
digits, and they lower ``known_digits`` accordingly.
"""

import logging
import math
import random
from collections import namedtuple
from functools import lru_cache
from itertools import product

from sympy import Poly, Symbol, isprime

from .errors import ConfigError, DomainError, PrecisionExhausted

logger = logging.getLogger(__name__)

X = Symbol("X")

# value is an integer; exact=False means "at least value"
Valuation = namedtuple("Valuation", "value exact")


def vp_int(n, p):
    """Exponent of p in the nonzero integer n."""
    if n == 0:
        raise DomainError("v_p(0) is not an integer")
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def vp_factorial(n, p):
    e = 0
    q = p
    while q <= n:
        e += n // q
        q *= p
    return e


def ceil_log(m, p):
    """Smallest e with p**e >= m."""
    e = 0
    q = 1
    while q < m:
        q *= p
        e += 1
    return e


def floor_log(m, p):
    """Largest e with p**e <= m (m >= 1)."""
    e = 0
    q = p
    while q <= m:
        q *= p
        e += 1
    return e


def default_guard(p, b, smax, dmax):
    return vp_factorial(b, p) + ceil_log(max(smax, dmax), p)


@lru_cache(maxsize=None)
def _powers(p, digits):
    return tuple(p ** k for k in range(digits + 1))


@lru_cache(maxsize=None)
def _full_precs(b, digits):
    return (digits,) * b


class PrecisionProfile(namedtuple("PrecisionProfile", "p a b D smax dmax guard")):
    """All truncation orders of a computation.

    p      the prime
    a      p-adic digits promised in final answers
    b      number of T-coefficients kept (work mod T^b)
    D      x-degree truncation bound
    smax   s-degree truncation of Fredholm and L-series
    dmax   largest degree of enumerated exponential sums
    guard  extra p-adic working digits absorbing divisions
    """

    __slots__ = ()

    @classmethod
    def auto(cls, p, a, b, smax, dmax, degree=1, D=None, guard=None):
        if not isinstance(p, int) or p < 2 or not isprime(p):
            raise ConfigError("p must be a prime, got {}".format(p))
        if guard is None:
            guard = default_guard(p, max(b, 1), max(smax, 1), max(dmax, 1))
        if D is None:
            D = max(p, max(degree, 1) * (b + smax))
        prof = cls(p, a, b, D, smax, dmax, guard)
        prof.validate()
        return prof

    def validate(self):
        for name, value in self._asdict().items():
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError("{} must be an integer, got {!r}".format(name, value))
        if self.p < 2 or not isprime(self.p):
            raise ConfigError("p must be a prime, got {}".format(self.p))
        for name in ("a", "b", "D", "smax", "dmax"):
            if getattr(self, name) < 1:
                raise ConfigError("{} must be at least 1".format(name))
        if self.D < self.p:
            raise ConfigError(
                "x-degree D={} is below p={}: the basis would miss x^p".format(self.D, self.p)
            )
        needed = vp_factorial(self.b, self.p) + floor_log(
            max(self.smax, self.dmax), self.p
        )
        if self.guard < needed:
            raise ConfigError(
                "guard={} is too small: divisions need at least {} extra digits".format(
                    self.guard, needed
                )
            )
        return self

    @property
    def digits(self):
        return self.a + self.guard

    @property
    def modulus(self):
        return self.p ** self.digits

    @property
    def ring(self):
        """Fields that fix Z_p[[T]] mod (p^digits, T^b); D, smax and dmax do not."""
        return (self.p, self.b, self.digits)

    def with_degree_bound(self, D):
        return self._replace(D=D)


#   _______
#  |__  /_ __
#    / /| '_ \
#   / /_| |_) |
#  /____| .__/
#       |_|


class ZpApprox(object):
    """An element of Z_p known modulo p**known_digits."""

    __slots__ = ("p", "residue", "known_digits")

    def __init__(self, p, residue, known_digits):
        if known_digits < 0:
            raise PrecisionExhausted("negative precision")
        self.p = p
        self.known_digits = known_digits
        self.residue = int(residue) % p ** known_digits

    @classmethod
    def at_working_precision(cls, value, prof):
        return cls(prof.p, value, prof.digits)

    def _coerce(self, other):
        if isinstance(other, ZpApprox):
            if other.p != self.p:
                raise DomainError("mixing p={} and p={}".format(self.p, other.p))
            return other
        if isinstance(other, int):
            return ZpApprox(self.p, other, self.known_digits)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        digits = min(self.known_digits, other.known_digits)
        return ZpApprox(self.p, self.residue + other.residue, digits)

    __radd__ = __add__

    def __neg__(self):
        return ZpApprox(self.p, -self.residue, self.known_digits)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        digits = min(self.known_digits, other.known_digits)
        return ZpApprox(self.p, self.residue * other.residue, digits)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        digits = min(self.known_digits, other.known_digits)
        return (self.residue - other.residue) % self.p ** digits == 0

    __hash__ = None

    def __int__(self):
        return self.residue

    def __repr__(self):
        return "ZpApprox({} mod {}^{})".format(self.residue, self.p, self.known_digits)

    def is_zero(self):
        return self.residue == 0

    def divide_int(self, m):
        """Exact division by the nonzero integer m, losing v_p(m) digits."""
        e = vp_int(m, self.p)
        digits = self.known_digits - e
        if digits < 1:
            raise PrecisionExhausted(
                "dividing by {} needs {} digits, only {} known".format(
                    m, e + 1, self.known_digits
                )
            )
        pe = self.p ** e
        if self.residue % pe:
            raise DomainError("{} is not divisible by {}".format(self, m))
        mod = self.p ** digits
        unit = (m // pe) % mod
        return ZpApprox(self.p, (self.residue // pe) * pow(unit, -1, mod), digits)

    def valuation(self):
        if self.residue == 0:
            return Valuation(self.known_digits, False)
        return Valuation(vp_int(self.residue, self.p), True)


#   _____    _______ ____            _
#  |__  /_ _|_   _/ ___|  ___ _ __(_) ___  ___
#    / /| '_ \| | \___ \ / _ \ '__| |/ _ \/ __|
#   / /_| |_) | |  ___) |  __/ |  | |  __/\__ \
#  /____| .__/|_| |____/ \___|_|  |_|\___||___/
#       |_|


class ZpTSeries(object):
    """An element of Z_p[[T]] modulo T^b, coefficient j known mod p**precs[j].

    Residues are stored reduced modulo their own precision, so two series with
    the same known digits are equal exactly when their tuples are.
    """

    __slots__ = ("prof", "residues", "precs", "full")

    def __init__(self, prof, residues=(), precs=None):
        b = prof.b
        digits = prof.digits
        values = [int(r) for r in list(residues)[:b]]
        values.extend([0] * (b - len(values)))
        if precs is None:
            mod = prof.modulus
            self.residues = tuple(r % mod for r in values)
            self.precs = _full_precs(b, digits)
            self.full = True
        else:
            precs = [int(q) for q in list(precs)[:b]]
            precs.extend([digits] * (b - len(precs)))
            precs = tuple(max(0, min(q, digits)) for q in precs)
            powers = _powers(prof.p, digits)
            self.residues = tuple(r % powers[q] for r, q in zip(values, precs))
            self.precs = precs
            self.full = all(q == digits for q in precs)
        self.prof = prof

    @classmethod
    def _make(cls, prof, residues, precs, full):
        obj = cls.__new__(cls)
        obj.prof = prof
        obj.residues = residues
        obj.precs = precs
        obj.full = full
        return obj

    @classmethod
    def zero(cls, prof):
        return cls(prof)

    @classmethod
    def one(cls, prof):
        return cls(prof, [1])

    @classmethod
    def constant(cls, prof, value):
        if isinstance(value, ZpApprox):
            return cls(prof, [value.residue], [value.known_digits])
        return cls(prof, [value])

    @classmethod
    def monomial(cls, prof, k, coeff=1):
        if k >= prof.b:
            return cls.zero(prof)
        return cls(prof, [0] * k + [coeff])

    @classmethod
    def T(cls, prof):
        return cls.monomial(prof, 1)

    @property
    def coeffs(self):
        p = self.prof.p
        return tuple(ZpApprox(p, r, q) for r, q in zip(self.residues, self.precs))

    @property
    def min_digits(self):
        return min(self.precs)

    def coefficient(self, j):
        return ZpApprox(self.prof.p, self.residues[j], self.precs[j])

    def constant_term(self):
        return self.coefficient(0)

    def _coerce(self, other):
        if isinstance(other, ZpTSeries):
            if other.prof is not self.prof and other.prof.ring != self.prof.ring:
                raise DomainError("series from different precision profiles")
            return other
        if isinstance(other, (int, ZpApprox)):
            return ZpTSeries.constant(self.prof, other)
        return None

    def _combine(self, other, values):
        if self.full and other.full:
            mod = self.prof.modulus
            return ZpTSeries._make(
                self.prof, tuple(v % mod for v in values), self.precs, True
            )
        precs = [min(x, y) for x, y in zip(self.precs, other.precs)]
        return ZpTSeries(self.prof, values, precs)

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._combine(
            other, [x + y for x, y in zip(self.residues, other.residues)]
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._combine(
            other, [x - y for x, y in zip(self.residues, other.residues)]
        )

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ZpTSeries(self.prof, [-r for r in self.residues], self.precs)

    def scale(self, m):
        """Multiply by the integer m; no digits are lost."""
        if not self.full:
            return ZpTSeries(self.prof, [r * m for r in self.residues], self.precs)
        mod = self.prof.modulus
        return ZpTSeries._make(
            self.prof, tuple((r * m) % mod for r in self.residues), self.precs, True
        )

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        b = self.prof.b
        left = self.residues
        right = other.residues
        out = [0] * b
        for i in range(b):
            ai = left[i]
            if ai:
                for j in range(b - i):
                    cj = right[j]
                    if cj:
                        out[i + j] += ai * cj
        if self.full and other.full:
            mod = self.prof.modulus
            return ZpTSeries._make(
                self.prof, tuple(v % mod for v in out), self.precs, True
            )
        # coefficient n only involves coefficients 0..n of either factor
        precs = [
            min(x, y) for x, y in zip(_prefix_min(self.precs), _prefix_min(other.precs))
        ]
        return ZpTSeries(self.prof, out, precs)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = ZpTSeries.one(self.prof)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divide_int(self, m):
        """Exact division by the nonzero integer m."""
        p = self.prof.p
        e = vp_int(m, p)
        if e == 0:
            inv = pow(m % self.prof.modulus, -1, self.prof.modulus)
            return self * inv
        pe = p ** e
        residues = []
        precs = []
        for r, q in zip(self.residues, self.precs):
            if q - e < 1:
                raise PrecisionExhausted(
                    "dividing by {} needs {} digits, coefficient known to {}".format(
                        m, e + 1, q
                    )
                )
            if r % pe:
                raise DomainError("coefficient {} is not divisible by {}".format(r, m))
            mod = p ** (q - e)
            residues.append((r // pe) * pow((m // pe) % mod, -1, mod))
            precs.append(q - e)
        return ZpTSeries(self.prof, residues, precs)

    def inverse(self):
        """Multiplicative inverse; the constant term must be a p-adic unit."""
        prof = self.prof
        c = self.residues
        if c[0] % prof.p == 0:
            raise DomainError("constant term {} is not a unit".format(c[0]))
        mod = prof.modulus
        h0 = pow(c[0], -1, mod)
        h = [h0]
        for n in range(1, prof.b):
            acc = 0
            for k in range(1, n + 1):
                if c[k]:
                    acc += c[k] * h[n - k]
            h.append((-h0 * acc) % mod)
        if self.full:
            return ZpTSeries._make(prof, tuple(h), self.precs, True)
        return ZpTSeries(prof, h, _prefix_min(self.precs))

    def is_zero(self):
        return not any(self.residues)

    def valuation_T(self):
        for j, r in enumerate(self.residues):
            if r:
                return Valuation(j, True)
        return Valuation(self.prof.b, False)

    def valuation_p(self):
        best = None
        for r, q in zip(self.residues, self.precs):
            v = vp_int(r, self.prof.p) if r else q
            if best is None or v < best[0] or (v == best[0] and r):
                best = (v, bool(r))
        return Valuation(*best)

    def first_disagreement(self, other):
        """Index of the first coefficient that differs at common precision."""
        other = self._coerce(other)
        p = self.prof.p
        for j, (x, y, qx, qy) in enumerate(
            zip(self.residues, other.residues, self.precs, other.precs)
        ):
            if (x - y) % p ** min(qx, qy):
                return j
        return None

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self.first_disagreement(other) is None

    __hash__ = None

    def __repr__(self):
        terms = []
        for j, r in enumerate(self.residues):
            if r:
                terms.append("{}*T^{}".format(r, j) if j else str(r))
        return "ZpTSeries(p={}, {})".format(self.prof.p, " + ".join(terms) or "0")


def _prefix_min(values):
    out = []
    low = None
    for v in values:
        low = v if low is None else min(low, v)
        out.append(low)
    return out


def one_plus_T_pow(c, prof):
    """(1+T)^c as a ZpTSeries; coefficient k loses v_p(k!) digits."""
    if isinstance(c, int):
        c = ZpApprox.at_working_precision(c, prof)
    need = vp_factorial(prof.b - 1, prof.p)
    if need >= c.known_digits:
        raise PrecisionExhausted(
            "precision exhausted: (1+T)^c mod T^{} needs more than {} digits, have {}".format(
                prof.b, need, c.known_digits
            )
        )
    n = c.residue
    residues = [math.comb(n, k) for k in range(prof.b)]
    precs = [c.known_digits - vp_factorial(k, prof.p) for k in range(prof.b)]
    return ZpTSeries(prof, residues, precs)


def valuation(x, kind="vp"):
    """v_p or v_T of a ZpApprox / ZpTSeries, as a Valuation(value, exact)."""
    if kind == "vp":
        if isinstance(x, ZpTSeries):
            return x.valuation_p()
        return x.valuation()
    if kind == "vT":
        if not isinstance(x, ZpTSeries):
            raise DomainError("v_T is only defined on ZpTSeries")
        return x.valuation_T()
    raise DomainError("unknown valuation kind {!r}".format(kind))


#   _   _                                _  __ _          _
#  | | | |_ __  _ __ __ _ _ __ ___   (_)/ _(_) ___  __| |
#  | | | | '_ \| '__/ _` | '_ ` _ \  | | |_| |/ _ \/ _` |
#  | |_| | | | | | | (_| | | | | | | | |  _| |  __/ (_| |
#   \___/|_| |_|_|  \__,_|_| |_| |_| |_|_| |_|\___|\__,_|


@lru_cache(maxsize=None)
def is_irreducible_mod_p(p, modulus):
    """modulus lists the coefficients from the constant term up."""
    coeffs = [c % p for c in reversed(modulus)]
    return Poly(coeffs, X, modulus=p).is_irreducible


@lru_cache(maxsize=None)
def irreducible_modulus(p, d):
    """The lexicographically first monic irreducible polynomial of degree d over F_p."""
    if d == 1:
        return (0, 1)
    for tail in product(range(p), repeat=d):
        if tail[0] == 0:
            continue
        modulus = tail + (1,)
        if is_irreducible_mod_p(p, modulus):
            logger.debug("modulus for F_%d^%d: %s", p, d, modulus)
            return modulus
    raise DomainError("no irreducible polynomial of degree {} mod {}".format(d, p))


def field_elements(p, d):
    """All elements of F_{p^d} as coordinate tuples."""
    return product(range(p), repeat=d)


def _reduce_monomial(modulus, k):
    """Integer coordinates of xi^k in the basis 1, xi, ..., xi^(d-1)."""
    d = len(modulus) - 1
    coords = [0] * d
    if k < d:
        coords[k] = 1
        return coords
    coords[d - 1] = 1
    for _ in range(k - d + 1):
        top = coords[-1]
        coords = [0] + coords[:-1]
        for i in range(d):
            coords[i] -= top * modulus[i]
    return coords


@lru_cache(maxsize=None)
def _basis_traces(modulus):
    """Trace of multiplication by xi^j, read off the multiplication matrix."""
    d = len(modulus) - 1
    return tuple(
        sum(_reduce_monomial(modulus, i + j)[i] for i in range(d)) for j in range(d)
    )


def _polymul_mod(left, right, modulus, mod):
    d = len(left)
    prod = [0] * (2 * d - 1)
    for i, ai in enumerate(left):
        if ai:
            for j, bj in enumerate(right):
                if bj:
                    prod[i + j] += ai * bj
    for k in range(2 * d - 2, d - 1, -1):
        top = prod[k]
        if top:
            for i in range(d):
                prod[k - d + i] -= top * modulus[i]
    return tuple(c % mod for c in prod[:d])


class UnramifiedApprox(object):
    """An element of Z_{p^d} = Z_p[xi]/(modulus), coordinates mod p**known_digits."""

    __slots__ = ("p", "modulus", "coords", "known_digits")

    def __init__(self, p, modulus, coords, known_digits):
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) < 2 or modulus[-1] != 1:
            raise DomainError("modulus {} is not monic of positive degree".format(modulus))
        if not is_irreducible_mod_p(p, modulus):
            raise DomainError("modulus {} is not irreducible mod {}".format(modulus, p))
        d = len(modulus) - 1
        coords = [int(c) for c in coords]
        if len(coords) > d:
            raise DomainError("{} coordinates for degree {}".format(len(coords), d))
        coords.extend([0] * (d - len(coords)))
        mod = p ** known_digits
        self.p = p
        self.modulus = modulus
        self.coords = tuple(c % mod for c in coords)
        self.known_digits = known_digits

    @classmethod
    def _make(cls, p, modulus, coords, known_digits):
        obj = cls.__new__(cls)
        obj.p = p
        obj.modulus = modulus
        obj.coords = coords
        obj.known_digits = known_digits
        return obj

    @classmethod
    def scalar(cls, p, modulus, value, known_digits):
        return cls(p, modulus, [value], known_digits)

    @property
    def degree(self):
        return len(self.modulus) - 1

    def _like(self, coords, digits=None):
        digits = self.known_digits if digits is None else digits
        mod = self.p ** digits
        return UnramifiedApprox._make(
            self.p, self.modulus, tuple(c % mod for c in coords), digits
        )

    def _coerce(self, other):
        if isinstance(other, UnramifiedApprox):
            if other.modulus != self.modulus or other.p != self.p:
                raise DomainError("elements of different unramified rings")
            return other
        if isinstance(other, int):
            return self._like([other] + [0] * (self.degree - 1))
        if isinstance(other, ZpApprox):
            return self._like(
                [other.residue] + [0] * (self.degree - 1),
                min(self.known_digits, other.known_digits),
            )
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        digits = min(self.known_digits, other.known_digits)
        return self._like([x + y for x, y in zip(self.coords, other.coords)], digits)

    __radd__ = __add__

    def __neg__(self):
        return self._like([-c for c in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        digits = min(self.known_digits, other.known_digits)
        coords = _polymul_mod(
            self.coords, other.coords, self.modulus, self.p ** digits
        )
        return UnramifiedApprox._make(self.p, self.modulus, coords, digits)

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            raise DomainError("negative powers need a Teichmuller point; use q-2")
        result = self._like([1] + [0] * (self.degree - 1))
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        mod = self.p ** min(self.known_digits, other.known_digits)
        return all((x - y) % mod == 0 for x, y in zip(self.coords, other.coords))

    __hash__ = None

    def __repr__(self):
        return "UnramifiedApprox({} mod {}^{}, modulus={})".format(
            list(self.coords), self.p, self.known_digits, list(self.modulus)
        )

    def is_zero(self):
        return not any(self.coords)

    def residue_coords(self):
        return tuple(c % self.p for c in self.coords)

    def conjugate(self):
        """Frobenius image of a Teichmuller point (x -> x^p)."""
        return self ** self.p


def teichmuller_scalar(c, prof):
    """Teichmuller lift of c in F_p as an integer mod p**digits."""
    mod = prof.modulus
    t = c % prof.p
    for _ in range(prof.digits + 1):
        nt = pow(t, prof.p, mod)
        if nt == t:
            return t
        t = nt
    raise DomainError("Teichmuller iteration did not converge for {}".format(c))


def teichmuller_lift(x0, prof):
    """The root of unity (or zero) of Z_{p^d} reducing to x0 mod p."""
    if x0.known_digits < 1:
        raise DomainError("residue of {} mod p is unknown".format(x0))
    q = x0.p ** x0.degree
    t = UnramifiedApprox(
        x0.p, x0.modulus, [c % x0.p for c in x0.coords], prof.digits
    )
    # each Frobenius step fixes one more digit
    for _ in range(prof.digits + 1):
        nt = t ** q
        if nt == t:
            return t
        t = nt
    raise DomainError("Teichmuller iteration did not converge for {}".format(x0))


def unramified_trace(e):
    """Trace of multiplication-by-e on Z_{p^d} over Z_p."""
    traces = _basis_traces(e.modulus)
    total = sum(c * t for c, t in zip(e.coords, traces))
    return ZpApprox(e.p, total, e.known_digits)


#   _____         _
#  |_   _|__  ___| |_ ___
#    | |/ _ \/ __| __/ __|
#    | |  __/\__ \ |_\__ \
#    |_|\___||___/\__|___/


def _profile(p=2, a=6, b=4, smax=3, dmax=3):
    return PrecisionProfile.auto(p, a, b, smax, dmax)


def test_guard_formula():
    prof = PrecisionProfile.auto(2, 6, 8, 4, 4)
    assert prof.guard == vp_factorial(8, 2) + 2
    assert prof.digits == 6 + 7 + 2
    assert prof.D == 12


def test_profile_rejects_composite_p():
    import pytest

    with pytest.raises(ConfigError):
        PrecisionProfile.auto(4, 6, 4, 3, 3)
    with pytest.raises(ConfigError):
        PrecisionProfile(2, 6, 8, 10, 4, 4, 0).validate()


def test_profile_rejects_x_degree_below_p():
    import pytest

    with pytest.raises(ConfigError):
        PrecisionProfile.auto(3, 6, 4, 3, 3, D=2)
    assert PrecisionProfile.auto(7, 4, 2, 2, 2).D == 7
    assert PrecisionProfile.auto(3, 6, 4, 3, 3, D=3).D == 3


def test_series_combine_across_degree_bounds():
    import pytest

    prof = _profile(p=3, b=4)
    wide = prof.with_degree_bound(2 * prof.D)
    x = ZpTSeries(prof, [1, 2])
    y = ZpTSeries(wide, [1, 2])
    assert x == y
    assert (x - y).is_zero()
    assert x * y == ZpTSeries(prof, [1, 4, 4])
    with pytest.raises(DomainError):
        x + ZpTSeries(_profile(p=3, b=5), [1, 2])


def test_teichmuller_of_zero():
    prof = _profile(p=2)
    x0 = UnramifiedApprox.scalar(2, (0, 1), 0, 1)
    assert teichmuller_lift(x0, prof).is_zero()


def test_teichmuller_minus_one():
    prof = PrecisionProfile(3, 3, 4, 4, 3, 3, 0)
    x0 = UnramifiedApprox.scalar(3, (0, 1), 2, 1)
    t = teichmuller_lift(x0, prof)
    assert t.coords == (26,)
    assert teichmuller_scalar(2, prof) == 26


def test_teichmuller_cube_root_of_unity():
    prof = _profile(p=2)
    omega = UnramifiedApprox(2, (1, 1, 1), [0, 1], 1)
    t = teichmuller_lift(omega, prof)
    assert t ** 3 == 1
    assert t.residue_coords() == (0, 1)
    assert t ** 4 == t


def test_unramified_trace_examples():
    prof = _profile(p=2)
    five = UnramifiedApprox.scalar(2, (0, 1), 5, prof.digits)
    assert unramified_trace(five) == 5

    omega = UnramifiedApprox(2, (1, 1, 1), [0, 1], 1)
    t = teichmuller_lift(omega, prof)
    assert unramified_trace(t) == -1

    for d in (1, 2, 3, 4):
        one = UnramifiedApprox.scalar(2, irreducible_modulus(2, d), 1, prof.digits)
        assert unramified_trace(one) == d


def test_unramified_trace_is_additive():
    rng = random.Random(7)
    for p, d in [(2, 3), (3, 2), (5, 3)]:
        modulus = irreducible_modulus(p, d)
        for _ in range(20):
            e1 = UnramifiedApprox(p, modulus, [rng.randrange(p ** 6) for _ in range(d)], 6)
            e2 = UnramifiedApprox(p, modulus, [rng.randrange(p ** 6) for _ in range(d)], 6)
            assert unramified_trace(e1 + e2) == unramified_trace(e1) + unramified_trace(e2)


def test_teichmuller_points_are_fixed():
    prof = _profile(p=3)
    modulus = irreducible_modulus(3, 2)
    for coords in field_elements(3, 2):
        t = teichmuller_lift(UnramifiedApprox(3, modulus, coords, 1), prof)
        assert t ** 9 == t
        assert t.residue_coords() == coords


def test_irreducible_modulus_table():
    import pytest

    assert irreducible_modulus(2, 2) == (1, 1, 1)
    for p in (2, 3, 5, 7):
        for d in range(1, 7):
            assert is_irreducible_mod_p(p, irreducible_modulus(p, d))
    with pytest.raises(DomainError):
        UnramifiedApprox(2, (1, 0, 1), [0, 1], 3)


def test_one_plus_T_pow_examples():
    prof = _profile(p=2, b=4)
    assert one_plus_T_pow(0, prof) == ZpTSeries.one(prof)
    assert one_plus_T_pow(1, prof) == ZpTSeries(prof, [1, 1])
    assert one_plus_T_pow(2, prof) == ZpTSeries(prof, [1, 2, 1])
    assert one_plus_T_pow(-1, prof) == ZpTSeries(prof, [1, -1, 1, -1])
    assert one_plus_T_pow(3, prof).precs == (
        prof.digits,
        prof.digits,
        prof.digits - 1,
        prof.digits - 1,
    )


def test_one_plus_T_pow_is_a_character():
    prof = _profile(p=3, b=6)
    rng = random.Random(11)
    for _ in range(20):
        c1 = ZpApprox.at_working_precision(rng.randrange(prof.modulus), prof)
        c2 = ZpApprox.at_working_precision(rng.randrange(prof.modulus), prof)
        assert one_plus_T_pow(c1 + c2, prof) == one_plus_T_pow(c1, prof) * one_plus_T_pow(
            c2, prof
        )


def test_one_plus_T_pow_precision_exhausted():
    import pytest

    prof = _profile(p=2, b=8)
    with pytest.raises(PrecisionExhausted):
        one_plus_T_pow(ZpApprox(2, 3, 2), prof)


def test_valuations():
    prof = _profile(p=2, b=6)
    assert valuation(ZpApprox(2, 12, 8)) == Valuation(2, True)
    series = ZpTSeries(prof, [0, 0, 0, 1, 0, 2])
    assert valuation(series, "vT") == Valuation(3, True)
    assert valuation(ZpTSeries.zero(prof), "vT") == Valuation(6, False)
    assert valuation(ZpApprox(2, 0, 5)) == Valuation(5, False)


def test_ring_axioms():
    prof = _profile(p=3, b=5)
    rng = random.Random(3)

    def rand():
        return ZpTSeries(prof, [rng.randrange(prof.modulus) for _ in range(prof.b)])

    for _ in range(20):
        x, y, z = rand(), rand(), rand()
        assert (x * y) * z == x * (y * z)
        assert x * y == y * x
        assert x * (y + z) == x * y + x * z
        assert (x + y) - y == x


def test_divide_and_inverse():
    import pytest

    prof = _profile(p=2, b=4)
    series = ZpTSeries(prof, [4, 8, 12])
    assert series.divide_int(4) == ZpTSeries(prof, [1, 2, 3])
    assert series.divide_int(4).precs[0] == prof.digits - 2
    unit = ZpTSeries(prof, [1, 1])
    assert unit * unit.inverse() == ZpTSeries.one(prof)
    with pytest.raises(DomainError):
        ZpTSeries(prof, [2, 1]).inverse()
    with pytest.raises(DomainError):
        ZpTSeries(prof, [3]).divide_int(2)

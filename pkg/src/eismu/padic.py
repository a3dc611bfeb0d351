"""Fixed-precision p-adic integers, polynomials and Newton polygons.

A PadicNumber is an element of Z_p known modulo p^prec (absolute
precision).  A residue of 0 means "zero at this precision": its valuation is
reported as +inf by ``valuation()`` but as the string ">=prec" wherever a
certified number is required.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateInputError,
    DomainError,
    NonOrdinaryError,
    PrecisionError,
    ValidationError,
)

INF = math.inf


def val_p(x, p: int):
    """Exact p-adic valuation of an int or Fraction (+inf for 0)."""
    if isinstance(x, Fraction):
        if x == 0:
            return INF
        return val_p(x.numerator, p) - val_p(x.denominator, p)
    x = int(x)
    if x == 0:
        return INF
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return v


def _int_val(x: int, p: int, cap: int) -> int:
    if x == 0:
        return cap
    v = 0
    while v < cap and x % p == 0:
        x //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicNumber:
    p: int
    residue: int
    prec: int

    def __post_init__(self):
        if self.prec < 0:
            raise ValidationError("precision must be non-negative")
        object.__setattr__(self, "residue", self.residue % self.p**self.prec)

    # construction ---------------------------------------------------------
    @classmethod
    def from_int(cls, n: int, p: int, M: int) -> "PadicNumber":
        return cls(p, int(n), M)

    @classmethod
    def from_rational(cls, x, p: int, M: int) -> "PadicNumber":
        x = Fraction(x)
        if val_p(x.denominator, p):
            raise DomainError(f"{x} is not p-integral")
        m = p**M
        return cls(p, x.numerator * pow(x.denominator, -1, m), M)

    def _coerce(self, other) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValidationError("mixing different primes")
            return other
        if isinstance(other, (int, Fraction)):
            return PadicNumber.from_rational(other, self.p, self.prec)
        return NotImplemented

    # accessors ------------------------------------------------------------
    @property
    def modulus(self) -> int:
        return self.p**self.prec

    def is_zero(self) -> bool:
        return self.residue == 0

    def valuation(self):
        if self.residue == 0:
            return INF
        return _int_val(self.residue, self.p, self.prec)

    def certified_valuation(self):
        """Valuation as an int, or the string '>=M' when it is not known."""
        v = self.valuation()
        return f">={self.prec}" if v == INF else v

    @property
    def unit(self) -> int:
        """Unit part, known modulo p^(prec - valuation)."""
        v = self.valuation()
        if v == INF:
            return 0
        return self.residue // self.p**v

    def unit_residue(self) -> int:
        """Unit part reduced mod p."""
        return self.unit % self.p

    def lift(self) -> int:
        """Symmetric integer lift."""
        r = self.residue
        return r - self.modulus if 2 * r > self.modulus else r

    def __int__(self):
        return self.residue

    def to_pair(self):
        """[valuation, unit] for JSON output; zero is [">=M", 0]."""
        return [self.certified_valuation(), self.unit]

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        M = min(self.prec, other.prec)
        return PadicNumber(self.p, self.residue + other.residue, M)

    __radd__ = __add__

    def __neg__(self):
        return PadicNumber(self.p, -self.residue, self.prec)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        M = min(self.prec, other.prec)
        return PadicNumber(self.p, self.residue * other.residue, M)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = PadicNumber(self.p, 1, self.prec)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inverse(self) -> "PadicNumber":
        if self.valuation() != 0:
            raise DomainError("only units are invertible in Z_p")
        return PadicNumber(self.p, pow(self.residue, -1, self.modulus), self.prec)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        v = other.valuation()
        if v == INF:
            raise DomainError("division by zero")
        if v == 0:
            return self * other.inverse()
        mine = self.valuation()
        if mine < v:
            raise DomainError("quotient is not p-integral")
        u = PadicNumber(self.p, other.unit, other.prec - v).inverse()
        shifted = PadicNumber(self.p, self.residue // self.p**v, self.prec - v)
        return shifted * u

    def reduce(self, M: int) -> "PadicNumber":
        if M > self.prec:
            raise PrecisionError("cannot raise precision")
        return PadicNumber(self.p, self.residue, M)

    def __eq__(self, other):
        other = self._coerce(other) if not isinstance(other, PadicNumber) else other
        if other is NotImplemented:
            return False
        M = min(self.prec, other.prec)
        return self.p == other.p and (self.residue - other.residue) % self.p**M == 0

    def __hash__(self):
        return hash((self.p, self.residue, self.prec))

    def __repr__(self):
        return f"PadicNumber({self.residue} mod {self.p}^{self.prec})"


def valuation(x):
    """Valuation of a PadicNumber, int or Fraction; +inf for zero."""
    if isinstance(x, PadicNumber):
        return x.valuation()
    raise TypeError("use val_p(x, p) for exact numbers")


# --------------------------------------------------------------- polynomials

@dataclass(frozen=True)
class PadicPoly:
    """Polynomial with PadicNumber coefficients, constant term first."""

    coeffs: tuple

    def __init__(self, coeffs):
        coeffs = tuple(coeffs)
        if not coeffs:
            raise ValidationError("polynomial needs at least one coefficient")
        ps = {c.p for c in coeffs}
        if len(ps) != 1:
            raise ValidationError("coefficients over different primes")
        object.__setattr__(self, "coeffs", coeffs)
        if coeffs[-1].is_zero() and len(coeffs) > 1:
            raise PrecisionError("leading coefficient vanishes at working precision")

    @classmethod
    def from_ints(cls, ints, p: int, M: int) -> "PadicPoly":
        return cls([PadicNumber.from_int(c, p, M) for c in ints])

    @property
    def p(self):
        return self.coeffs[0].p

    @property
    def degree(self):
        return len(self.coeffs) - 1

    @property
    def prec(self):
        return min(c.prec for c in self.coeffs)

    def is_monic(self):
        return self.coeffs[-1] == 1

    def is_distinguished(self):
        return self.is_monic() and all(c.valuation() >= 1 for c in self.coeffs[:-1])

    def __call__(self, x):
        acc = self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * x + c
        return acc

    def __repr__(self):
        return f"PadicPoly({[c.residue for c in self.coeffs]} mod {self.p}^{self.prec})"


@dataclass(frozen=True)
class NewtonPolygon:
    """Lower convex hull of the points (i, val(a_i)).

    ``segments`` are (root valuation, length) pairs in increasing order of
    root valuation; the root valuation of a segment is minus its slope.
    """

    vertices: tuple
    segments: tuple

    def root_valuations(self):
        out = []
        for slope, length in self.segments:
            out.extend([slope] * length)
        return out

    def slope_sum(self) -> Fraction:
        return sum((Fraction(s) * n for s, n in self.segments), Fraction(0))


def newton_polygon(f: PadicPoly) -> NewtonPolygon:
    points = []
    for i, c in enumerate(f.coeffs):
        if not c.is_zero():
            points.append((i, c.valuation()))
    if f.coeffs[0].is_zero():
        raise PrecisionError("constant coefficient vanishes at working precision")
    if f.coeffs[-1].is_zero():
        raise PrecisionError("leading coefficient vanishes at working precision")
    hull = []
    for pt in points:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            # drop hull[-1] when it lies on or above the chord hull[-2] -> pt
            if (y2 - y1) * (pt[0] - x1) >= (pt[1] - y1) * (x2 - x1):
                hull.pop()
            else:
                break
        hull.append(pt)
    segments = []
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        segments.append((Fraction(y1 - y2, x2 - x1), x2 - x1))
    segments.sort()
    return NewtonPolygon(tuple(hull), tuple(segments))


def char_poly_constant_valuation(F: PadicPoly) -> int:
    """val(F(0)) for a monic distinguished F, cross-checked with its polygon."""
    if not F.is_distinguished():
        raise ValidationError("polynomial is not monic distinguished")
    c0 = F.coeffs[0]
    if c0.is_zero():
        raise DegenerateInputError("F(0) vanishes at working precision")
    v = c0.valuation()
    total = newton_polygon(F).slope_sum()
    if total != v:
        raise AssertionError(f"Newton polygon slope sum {total} differs from val F(0) = {v}")
    return v


# ---------------------------------------------------------------- Hensel

@dataclass(frozen=True)
class StabilizationResult:
    a_p: PadicNumber
    alpha: PadicNumber
    beta: PadicNumber
    k: int

    @property
    def unit_root(self):
        return self.alpha

    @property
    def non_unit_root(self):
        return self.beta


def hensel_unit_root(a_p, k: int, p: int, M: int) -> StabilizationResult:
    """Unit root of x^2 - a_p x + p^(k-1) by quadratic Newton iteration."""
    if k < 2:
        raise DomainError("weight must be at least 2")
    if not isinstance(a_p, PadicNumber):
        a_p = PadicNumber.from_rational(a_p, p, M)
    a = a_p.reduce(min(M, a_p.prec))
    M = a.prec
    if a.residue % p == 0:
        raise NonOrdinaryError(f"a_p = {a.residue} is not a unit mod {p}")
    m = p**M
    c = p ** (k - 1)
    alpha = a.residue % p
    prec = 1
    while prec < M:
        prec = min(2 * prec, M)
        mod = p**prec
        f = (alpha * alpha - a.residue * alpha + c) % mod
        df = (2 * alpha - a.residue) % mod
        alpha = (alpha - f * pow(df, -1, mod)) % mod
    alpha_p = PadicNumber(p, alpha, M)
    beta_p = PadicNumber(p, a.residue - alpha, M)
    if (alpha * alpha - a.residue * alpha + c) % m:
        raise AssertionError("Hensel iteration failed to converge")
    return StabilizationResult(a, alpha_p, beta_p, k)


# ------------------------------------------------------------------- log

def _ilog(n: int, p: int) -> int:
    e = 0
    while n >= p:
        n //= p
        e += 1
    return e


def padic_log(x) -> PadicNumber:
    """log(x) = sum_{n>=1} (-1)^(n+1) (x-1)^n / n for x = 1 mod p."""
    if not isinstance(x, PadicNumber):
        raise TypeError("padic_log expects a PadicNumber")
    p, M = x.p, x.prec
    t = x.residue - 1
    vt = _int_val(t % p**M, p, M)
    if vt == 0:
        raise DomainError("log needs x = 1 mod p")
    if vt >= M:
        return PadicNumber(p, 0, M)
    # n*vt - floor(log_p n) is non-decreasing and bounds val(t^n/n) from below
    n_max = 0
    while (n_max + 1) * vt - _ilog(n_max + 1, p) < M:
        n_max += 1
    extra = max(_int_val(k, p, 64) for k in range(1, n_max + 1))
    big = p ** (M + extra)
    total = 0
    power = 1
    for n in range(1, n_max + 1):
        power = power * t % big
        e = _int_val(n, p, 64)
        unit_n = n // p**e
        term = (power // p**e) * pow(unit_n, -1, p**M)
        total += term if n % 2 else -term
    return PadicNumber(p, total, M)


def binomial_series_coefficients(c: PadicNumber, D: int):
    """binom(c, n) for n = 0..D as PadicNumbers of precision c.prec - v_p(n!)."""
    p, M = c.p, c.prec
    out = [PadicNumber(p, 1, M)]
    num = 1
    fact_unit = 1
    fact_val = 0
    cm = c.residue
    big = p**M
    for n in range(1, D + 1):
        num = num * (cm - (n - 1)) % big
        e = _int_val(n, p, 64)
        fact_val += e
        fact_unit = fact_unit * (n // p**e) % big
        prec = M - fact_val
        if prec <= 0:
            raise PrecisionError(f"binomial coefficient {n} exhausts {p}-adic precision {M}")
        if num % p**fact_val:
            # exact integer c(c-1).. is divisible by n!; a residue that is not
            # means the input precision was too low to see it
            raise PrecisionError("binomial numerator lost divisibility at this precision")
        value = (num // p**fact_val) * pow(fact_unit, -1, p**prec)
        out.append(PadicNumber(p, value, prec))
    return out

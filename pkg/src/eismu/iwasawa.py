"""Truncated power series over Z_p with content, mu and lambda invariants.

Weight-variable convention: with u0 = 1 + p, a function of the weight k in
the class k0 mod p-1 is a series G(W) evaluated at W = u0^(k - k0) - 1, so
the origin W = 0 is the weight k0.
"""

from __future__ import annotations

from dataclasses import dataclass

from .arith import SetupParams
from .errors import DomainError, PrecisionError, ValidationError
from .padic import (
    INF,
    PadicNumber,
    binomial_series_coefficients,
    padic_log,
    val_p,
)

VARIABLES = ("W", "u")


@dataclass(frozen=True)
class TruncatedSeries:
    """c_0 + c_1 X + ... + c_D X^D, X the tag ``variable``.

    ``k0`` is the weight at the origin for series in W; it is needed only by
    ``evaluate_at_weight``.  ``truncated`` marks a power series cut off at
    degree D (unknown higher terms) as opposed to a polynomial.
    """

    p: int
    M: int
    coeffs: tuple
    variable: str = "W"
    k0: int | None = None
    truncated: bool = False

    def __post_init__(self):
        if self.variable not in VARIABLES:
            raise ValidationError(f"unknown variable {self.variable!r}")
        coeffs = tuple(
            c if isinstance(c, PadicNumber) else PadicNumber.from_rational(c, self.p, self.M)
            for c in self.coeffs)
        if not coeffs:
            raise ValidationError("series needs at least one coefficient")
        coeffs = tuple(c.reduce(min(c.prec, self.M)) for c in coeffs)
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_ints(cls, ints, p, M, variable="W", k0=None, truncated=False):
        return cls(p, M, tuple(PadicNumber.from_int(c, p, M) for c in ints), variable, k0, truncated)

    @property
    def D(self) -> int:
        return len(self.coeffs) - 1

    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if other.p != self.p or other.variable != self.variable:
            raise ValidationError("series over different primes or variables")

    def __add__(self, other):
        self._check(other)
        D = min(self.D, other.D)
        coeffs = [a + b for a, b in zip(self.coeffs[: D + 1], other.coeffs[: D + 1])]
        return TruncatedSeries(self.p, min(self.M, other.M), tuple(coeffs), self.variable, self.k0,
                               self._truncated_with(other))

    def _truncated_with(self, other):
        # dropping the higher terms of the longer operand truncates the result
        return self.truncated or other.truncated or self.D != other.D

    def __neg__(self):
        return TruncatedSeries(self.p, self.M, tuple(-c for c in self.coeffs), self.variable, self.k0,
                               self.truncated)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, PadicNumber)):
            return self.scale(other)
        self._check(other)
        D = min(self.D, other.D)
        M = min(self.M, other.M)
        coeffs = []
        for n in range(D + 1):
            acc = PadicNumber(self.p, 0, M)
            for i in range(n + 1):
                acc = acc + self.coeffs[i] * other.coeffs[n - i]
            coeffs.append(acc)
        truncated = self.truncated or other.truncated or self.D + other.D > D
        return TruncatedSeries(self.p, M, tuple(coeffs), self.variable, self.k0, truncated)

    def scale(self, b):
        if not isinstance(b, PadicNumber):
            b = PadicNumber.from_rational(b, self.p, self.M)
        return TruncatedSeries(self.p, self.M, tuple(b * c for c in self.coeffs), self.variable, self.k0,
                               self.truncated)

    __rmul__ = __mul__

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "M": self.M,
            "D": self.D,
            "variable": self.variable,
            "coeffs": [c.to_pair() for c in self.coeffs],
        }


@dataclass(frozen=True)
class InvariantReport:
    content_valuation: int
    mu: int
    lambda_: int | None
    is_unit: bool

    def to_json(self) -> dict:
        return {
            "content_valuation": self.content_valuation,
            "mu": self.mu,
            "lambda": "undefined" if self.lambda_ is None else self.lambda_,
            "is_unit": self.is_unit,
        }


def content_mu_lambda(f: TruncatedSeries) -> InvariantReport:
    """mu = min val(c_i); lambda = first index of a unit coefficient when mu = 0."""
    known = [c.valuation() for c in f.coeffs if not c.is_zero()]
    if not known:
        raise PrecisionError("every coefficient vanishes at working precision")
    mu = min(known)
    if any(c.is_zero() and c.prec < mu for c in f.coeffs):
        raise PrecisionError("a coefficient below the content valuation is not resolved")
    lam = None
    if mu == 0:
        lam = next(i for i, c in enumerate(f.coeffs) if c.valuation() == 0)
    return InvariantReport(mu, mu, lam, mu == 0 and lam == 0)


def weight_parameter(p: int, k0: int, k: int, M: int) -> PadicNumber:
    """ev_k(W) = (1+p)^(k-k0) - 1 at precision M."""
    if (k - k0) % (p - 1):
        raise DomainError(f"weight {k} is not congruent to {k0} mod {p - 1}")
    e = k - k0
    m = p**M
    u = pow(1 + p, e, m) if e >= 0 else pow(pow(1 + p, -1, m), -e, m)
    return PadicNumber(p, u - 1, M)


def evaluate_at_weight(f: TruncatedSeries, k: int, k0: int = None) -> PadicNumber:
    """f(ev_k(W)), certified modulo the truncation tail.

    For a truncated series the unknown coefficients beyond degree D are
    p-integral, so the tail has valuation at least (D+1) * val(ev_k); the
    result carries that bound as its precision.
    """
    if f.variable != "W":
        raise DomainError("weight evaluation applies to series in W")
    k0 = f.k0 if k0 is None else k0
    if k0 is None:
        raise DomainError("series has no origin weight")
    w = weight_parameter(f.p, k0, k, f.M)
    vw = w.valuation()
    tail = f.M if vw == INF or not f.truncated else min(f.M, (f.D + 1) * vw)
    acc = PadicNumber(f.p, 0, f.M)
    power = PadicNumber(f.p, 1, f.M)
    for c in f.coeffs:
        acc = acc + c * power
        power = power * w
    return acc.reduce(min(acc.prec, tail))


def euler_factor_series(params: SetupParams) -> TruncatedSeries:
    """G(W) = N^(k0/2) (1+W)^c - 1 with c = log N / (2 log(1+p)).

    At W = ev_k(W) this is N^(k/2) - 1 because N lies in 1 + pZ_p.
    """
    N, p, k0 = params.N, params.p, params.k0
    M, D = params.padic_precision, params.series_degree
    fact_val = sum(val_p(n, p) for n in range(1, D + 1))
    # the binomial coefficients lose v_p(D!) digits, the division by log(1+p) one more
    work = M + fact_val + 1
    log_n = padic_log(PadicNumber.from_int(N, p, work + 1))
    log_u = padic_log(PadicNumber.from_int(1 + p, p, work + 1))
    c = log_n / (log_u * 2)
    c = c.reduce(min(c.prec, work))
    binoms = binomial_series_coefficients(c, D)
    lead = PadicNumber.from_int(N ** (k0 // 2), p, M)
    coeffs = [lead * b for b in binoms]
    coeffs[0] = coeffs[0] - 1
    coeffs = [x.reduce(min(x.prec, M)) for x in coeffs]
    if any(x.prec < M for x in coeffs):
        raise PrecisionError("binomial series lost precision below M")
    return TruncatedSeries(p, M, tuple(coeffs), "W", k0, truncated=True)

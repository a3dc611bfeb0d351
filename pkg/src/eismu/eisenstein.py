"""Bernoulli numbers and ordinary Eisenstein q-expansions with exact rational coefficients."""

from __future__ import annotations

import threading
import warnings
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .arith import SetupParams
from .errors import DomainError, ValidationError
from .padic import val_p

_BERNOULLI = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()
BERNOULLI_LIMIT = 2000


class IrregularPairWarning(UserWarning):
    """The constant term no longer splits as (Euler factor) x (unit)."""


@dataclass(frozen=True)
class BernoulliValue:
    k: int
    value: Fraction

    @property
    def numerator(self):
        return self.value.numerator

    @property
    def denominator(self):
        return self.value.denominator


def _bernoulli_upto(k: int) -> None:
    with _BERNOULLI_LOCK:
        for n in range(len(_BERNOULLI), k + 1):
            if n > 1 and n % 2:
                _BERNOULLI.append(Fraction(0))
                continue
            # sum_{j=0}^{n} C(n+1, j) B_j = 0
            s = sum((comb(n + 1, j) * _BERNOULLI[j] for j in range(n)), Fraction(0))
            _BERNOULLI.append(-s / (n + 1))


def bernoulli(k: int) -> BernoulliValue:
    """B_k with the convention B_1 = -1/2."""
    if not isinstance(k, int) or k < 0:
        raise ValidationError("Bernoulli index must be a non-negative integer")
    if k > BERNOULLI_LIMIT:
        raise ValidationError(f"Bernoulli index above {BERNOULLI_LIMIT} is not supported")
    if k >= len(_BERNOULLI):
        _bernoulli_upto(k)
    return BernoulliValue(k, _BERNOULLI[k])


def is_regular_pair(p: int, k0: int) -> bool:
    """True iff p does not divide B_k0 / k0."""
    if k0 % 2 or not 0 < k0 < p - 1:
        raise DomainError(f"k0={k0} must be even with 0 < k0 < p-1")
    return val_p(bernoulli(k0).value / k0, p) == 0


def level_p_constant_term(k: int, p: int) -> Fraction:
    """-(1 - p^(k-1)) B_k / (2k), the constant term of E^ord_k."""
    return -(1 - Fraction(p) ** (k - 1)) * bernoulli(k).value / (2 * k)


@dataclass(frozen=True)
class EisensteinQExp:
    """q-expansion a_0 + a_1 q + ... + a_Q q^Q with exact rational coefficients."""

    k: int
    level: str
    sign: int | None
    coeffs: tuple
    p: int
    N: int | None = None

    @property
    def a0(self) -> Fraction:
        return self.coeffs[0]

    @property
    def terms(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n]

    def reduce_mod(self, p: int):
        """Coefficients a_n mod p for n >= 1 (all integral)."""
        return [int(c) % p for c in self.coeffs[1:]]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "sign": {1: "plus", -1: "minus", None: None}[self.sign],
            "N": self.N,
            "p": self.p,
            "terms": self.terms,
            "a0": f"{self.a0.numerator}/{self.a0.denominator}",
            "coeffs": [str(c) for c in self.coeffs[1:]],
        }


def _divisor_sums(k: int, p: int, Q: int) -> list:
    a = [0] * (Q + 1)
    for d in range(1, Q + 1):
        if d % p == 0:
            continue
        dk = d ** (k - 1)
        for n in range(d, Q + 1, d):
            a[n] += dk
    return a


def ordinary_eisenstein_qexp(k: int, p: int, Q: int) -> EisensteinQExp:
    """E^ord_k: a_0 = -(1-p^(k-1))B_k/(2k), a_n = sum over d | n, p not | d, of d^(k-1)."""
    if k < 2 or k % 2:
        raise DomainError("weight must be even and at least 2")
    if Q < 1:
        raise ValidationError("need at least one term")
    a = _divisor_sums(k, p, Q)
    coeffs = (level_p_constant_term(k, p),) + tuple(Fraction(x) for x in a[1:])
    return EisensteinQExp(k, "p", None, coeffs, p)


def eisenstein_pm_qexp(k: int, sign: int, params: SetupParams, terms: int = None) -> EisensteinQExp:
    """E^ord_k(q) + sign * N^(k/2) * E^ord_k(q^N)."""
    if sign not in (1, -1):
        raise DomainError("sign must be +1 or -1")
    Q = params.qexp_terms if terms is None else terms
    base = ordinary_eisenstein_qexp(k, params.p, Q)
    N = params.N
    scale = sign * N ** (k // 2)
    coeffs = list(base.coeffs)
    coeffs[0] = base.coeffs[0] * (1 + scale)
    for n in range(N, Q + 1, N):
        coeffs[n] += scale * base.coeffs[n // N]
    return EisensteinQExp(k, "Np", sign, tuple(coeffs), params.p, N)


def _check_weight(p: int, k0: int, k: int) -> None:
    if k < 2 or (k - k0) % (p - 1):
        raise DomainError(f"weight {k} is not congruent to {k0} mod {p - 1}")


def constant_term_valuation(params: SetupParams, k: int, sign: int = -1) -> int:
    """val_p of the constant term of E^sign_k.

    For an irregular pair the valuation is still returned, with an
    IrregularPairWarning.
    """
    _check_weight(params.p, params.k0, k)
    if sign != -1:
        raise DomainError("only the minus family carries the congruence")
    a0 = level_p_constant_term(k, params.p) * (1 - Fraction(params.N) ** (k // 2))
    if not is_regular_pair(params.p, params.k0):
        warnings.warn(f"({params.p}, {params.k0}) is irregular", IrregularPairWarning, stacklevel=2)
    return val_p(a0, params.p)


def kl_branch_value(p: int, k0: int, k: int) -> Fraction:
    """Value at weight k of the k0-branch of the p-adic zeta function,
    normalized as the level-p Eisenstein constant term -(1-p^(k-1))B_k/(2k)."""
    _check_weight(p, k0, k)
    return level_p_constant_term(k, p)

"""Modular arithmetic over F_N: generators, p-th roots of unity, discrete logs mod p."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import isqrt

import numpy as np
from sympy import factorint, isprime

from .errors import DomainError, SetupError, ValidationError

DEFAULT_PRECISION = 20
DEFAULT_SERIES_DEGREE = 16
DEFAULT_QEXP_TERMS = 100


def is_prime(n: int) -> bool:
    return n >= 2 and bool(isprime(n))


def require_prime(n: int, name: str = "N") -> None:
    if not isinstance(n, int) or not is_prime(n):
        raise ValidationError(f"{name}={n} is not prime")


def validate_prime_and_weight(p: int, k0: int) -> None:
    if not is_prime(p) or p < 5:
        raise SetupError(f"p={p} must be a prime >= 5")
    if k0 % 2 or not 0 < k0 < p - 1:
        raise SetupError(f"k0={k0} must be even with 0 < k0 < p-1")


@dataclass(frozen=True)
class SetupParams:
    """The triple (N, p, k0) with working precisions.

    N is the tame level, p the residual prime, k0 the residue class of the
    weight modulo p-1.
    """

    N: int
    p: int
    k0: int
    padic_precision: int = DEFAULT_PRECISION
    series_degree: int = DEFAULT_SERIES_DEGREE
    qexp_terms: int = DEFAULT_QEXP_TERMS

    def __post_init__(self):
        for name in ("N", "p", "k0", "padic_precision", "series_degree", "qexp_terms"):
            if not isinstance(getattr(self, name), int):
                raise ValidationError(f"{name} must be an integer")
        validate_prime_and_weight(self.p, self.k0)
        if not is_prime(self.N):
            raise SetupError(f"N={self.N} is not prime")
        if self.N == self.p:
            raise SetupError("N and p must differ")
        if (self.N - 1) % self.p:
            raise SetupError(f"N={self.N} is not 1 mod p={self.p}")
        if min(self.padic_precision, self.series_degree, self.qexp_terms) < 1:
            raise ValidationError("precisions must be positive")

    def as_dict(self):
        return {"N": self.N, "p": self.p, "k0": self.k0}


@lru_cache(maxsize=4096)
def _prime_factors(n: int) -> tuple[int, ...]:
    return tuple(sorted(factorint(n)))


def multiplicative_order(a: int, N: int) -> int:
    """Order of a in F_N^x (N prime)."""
    a %= N
    if a == 0:
        raise DomainError("0 has no multiplicative order")
    order = N - 1
    for q in _prime_factors(N - 1):
        while order % q == 0 and pow(a, order // q, N) == 1:
            order //= q
    return order


@lru_cache(maxsize=4096)
def find_generator(N: int) -> int:
    """Smallest generator of F_N^x."""
    require_prime(N)
    if N == 2:
        return 1
    factors = _prime_factors(N - 1)
    for g in range(2, N):
        if all(pow(g, (N - 1) // q, N) != 1 for q in factors):
            return g
    raise AssertionError("unreachable: F_N^x is cyclic")


def baby_step_giant_step(a: int, base: int, order: int, N: int) -> int:
    """Exponent x in [0, order) with base^x = a mod N.

    ``order`` must be the order of ``base``; raises DomainError when ``a`` is
    not in the subgroup generated by ``base``.
    """
    a %= N
    if a == 0:
        raise DomainError("discrete log of 0")
    m = isqrt(order - 1) + 1 if order > 1 else 1
    baby = {}
    x = 1
    for j in range(m):
        baby.setdefault(x, j)
        x = x * base % N
    giant = pow(base, -m, N)
    y = a
    for i in range(m + 1):
        j = baby.get(y)
        if j is not None:
            return (i * m + j) % order
        y = y * giant % N
    raise DomainError(f"{a} is not a power of {base} mod {N}")


@dataclass(frozen=True)
class DiscreteLogTable:
    """log_N reduced mod p, relative to the generator g.

    Raising to the power (N-1)/p projects F_N^x onto its order-p quotient, so
    the log mod p is the exponent of a^((N-1)/p) against g^((N-1)/p); the
    p-element table below is that lookup.
    """

    N: int
    p: int
    g: int
    _table: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if (self.N - 1) % self.p:
            raise SetupError(f"p={self.p} does not divide N-1={self.N - 1}")
        if multiplicative_order(self.g, self.N) != self.N - 1:
            raise ValidationError(f"{self.g} does not generate F_{self.N}^x")
        h = pow(self.g, (self.N - 1) // self.p, self.N)
        table = {}
        x = 1
        for j in range(self.p):
            table[x] = j
            x = x * h % self.N
        object.__setattr__(self, "_table", table)

    @classmethod
    def for_prime(cls, N: int, p: int) -> "DiscreteLogTable":
        return _cached_table(N, p)

    def __call__(self, a: int) -> int:
        a %= self.N
        if a == 0:
            raise DomainError("discrete log of 0 mod N")
        return self._table[pow(a, (self.N - 1) // self.p, self.N)]

    def full_log(self, a: int) -> int:
        """Exponent of a modulo N-1."""
        return baby_step_giant_step(a, self.g, self.N - 1, self.N)


@lru_cache(maxsize=1024)
def _cached_table(N: int, p: int) -> DiscreteLogTable:
    require_prime(N)
    return DiscreteLogTable(N, p, find_generator(N))


@lru_cache(maxsize=64)
def full_log_table(N: int) -> np.ndarray:
    """logs[a] = exponent of a against find_generator(N), for 1 <= a < N."""
    g = find_generator(N)
    logs = np.zeros(N, dtype=np.int64)
    x = 1
    for j in range(N - 1):
        logs[x] = j
        x = x * g % N
    logs.flags.writeable = False
    return logs


def discrete_log_mod_p(a: int, table: DiscreteLogTable) -> int:
    return table(a)


@dataclass(frozen=True)
class RootOfUnity:
    value: int
    order: int
    N: int

    def __post_init__(self):
        if self.value % self.N == 1 or pow(self.value, self.order, self.N) != 1:
            raise ValidationError(f"{self.value} is not a primitive {self.order}-th root mod {self.N}")

    def __int__(self):
        return self.value

    def powers(self):
        return [pow(self.value, i, self.N) for i in range(self.order)]


@lru_cache(maxsize=1024)
def primitive_pth_root(N: int, p: int) -> RootOfUnity:
    """Smallest residue of exact multiplicative order p mod N."""
    require_prime(N)
    require_prime(p, "p")
    if (N - 1) % p:
        raise SetupError(f"p={p} does not divide N-1={N - 1}")
    for z in range(2, N):
        if pow(z, p, N) == 1:
            return RootOfUnity(z, p, N)
    raise AssertionError("unreachable: p | N-1 gives an element of order p")


def is_pth_power_residue(a: int, N: int, p: int) -> bool:
    if (N - 1) % p:
        raise SetupError(f"p={p} does not divide N-1={N - 1}")
    if a % N == 0:
        raise DomainError("0 is excluded from the p-th power test")
    return pow(a, (N - 1) // p, N) == 1


def primes_congruent_to_one(p: int, bound: int) -> list[int]:
    """Primes N < bound with N = 1 mod p."""
    return [N for N in range(p + 1, bound, p) if is_prime(N)]

"""Finite models of a single-Eisenstein Hecke algebra setup.

The base ring is A = Z_(p)[T]/(T^D) with exact rational coefficients
(denominators prime to p).  Given a monic distinguished F over A of degree
d-1, the models are

    R  = A[X]/(X F(X))    (free of rank d, basis 1, X, ..., X^(d-1))
    R0 = A[X]/(F(X))      (free of rank d-1)

with augmentation E: X -> 0, ideal I = ker E = X R, generator t = X and
r_0 = F(X), so that X r_0 = 0 and E(r_0) = F(0).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import DomainError, InvalidSetupError, PrecisionError, ValidationError
from .padic import PadicNumber, PadicPoly, newton_polygon, val_p


# ------------------------------------------------------------------ A

@dataclass(frozen=True)
class TruncatedLambda:
    """Z_(p)[T]/(T^D); M is the precision used when specializing to Z_p."""

    p: int
    M: int
    D: int

    def __post_init__(self):
        if self.p < 2 or self.M < 1 or self.D < 1:
            raise ValidationError("need p prime, M >= 1, D >= 1")

    def __call__(self, coeffs) -> "LambdaElement":
        if isinstance(coeffs, LambdaElement):
            return coeffs
        if isinstance(coeffs, (int, Fraction)):
            coeffs = [coeffs]
        coeffs = [Fraction(c) for c in coeffs][: self.D]
        for c in coeffs:
            if c.denominator % self.p == 0:
                raise DomainError(f"{c} is not p-integral")
        return self._from_fractions(coeffs)

    def _from_fractions(self, coeffs):
        """Element of Q[T]/(T^D); integrality is the caller's business."""
        coeffs = list(coeffs) + [Fraction(0)] * (self.D - len(coeffs))
        den = 1
        for c in coeffs:
            den = den * c.denominator // gcd(den, c.denominator)
        return _normalized(self, [int(c * den) for c in coeffs], den)

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    def T(self):
        return self([0, 1])


def _normalized(ring, num, den):
    if den < 0:
        num = [-x for x in num]
        den = -den
    g = den
    for x in num:
        if g == 1:
            break
        g = gcd(g, x)
    if g > 1:
        num = [x // g for x in num]
        den //= g
    return LambdaElement(ring, tuple(num), den)


@dataclass(frozen=True)
class LambdaElement:
    """Element sum_i (num[i]/den) T^i of A, kept with a common denominator."""

    ring: TruncatedLambda
    num: tuple
    den: int = 1

    @property
    def coeffs(self):
        return tuple(Fraction(x, self.den) for x in self.num)

    def _lift(self, other):
        if isinstance(other, LambdaElement):
            return other
        return self.ring(other)

    def __add__(self, other):
        other = self._lift(other)
        if self.den == other.den:
            return _normalized(self.ring, [a + b for a, b in zip(self.num, other.num)], self.den)
        return _normalized(self.ring, [a * other.den + b * self.den for a, b in zip(self.num, other.num)],
                           self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return LambdaElement(self.ring, tuple(-a for a in self.num), self.den)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        D = self.ring.D
        out = [0] * D
        b = other.num
        for i, a in enumerate(self.num):
            if a:
                for j in range(D - i):
                    if b[j]:
                        out[i + j] += a * b[j]
        return _normalized(self.ring, out, self.den * other.den)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring(other)
        return isinstance(other, LambdaElement) and self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_zero(self):
        return not any(self.num)

    def residue(self) -> int:
        """Image in the residue field F_p = A/(p, T)."""
        p = self.ring.p
        return self.num[0] * pow(self.den, -1, p) % p

    def is_unit(self) -> bool:
        return self.residue() != 0

    def in_maximal_ideal(self) -> bool:
        return not self.is_unit()

    def is_integral(self) -> bool:
        return self.den % self.ring.p != 0

    def rational_inverse(self) -> "LambdaElement":
        """Inverse in Q[T]/(T^D); exists iff the constant term is non-zero."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise DomainError("element is a zero-divisor")
        D = self.ring.D
        inv = [Fraction(0)] * D
        inv[0] = 1 / c0
        for n in range(1, D):
            s = sum((self.coeffs[i] * inv[n - i] for i in range(1, n + 1)), Fraction(0))
            inv[n] = -s / c0
        return self.ring._from_fractions(inv)

    def inverse(self) -> "LambdaElement":
        if not self.is_unit():
            raise DomainError("not a unit of A")
        return self.rational_inverse()

    def divide(self, other: "LambdaElement"):
        """The quotient self/other in A, or None when it is not in A.

        ``other`` must be a non-zero-divisor; the quotient is unique then.
        """
        q = self * other.rational_inverse()
        return q if q.is_integral() else None

    def specialize(self, tau: int) -> PadicNumber:
        """Image under T -> tau in Z_p/p^(min(M, D v(tau)))."""
        p, M, D = self.ring.p, self.ring.M, self.ring.D
        if tau % p:
            raise DomainError("tau must lie in the maximal ideal")
        prec = M if tau == 0 else min(M, D * val_p(tau, p))
        total = Fraction(0)
        for i, c in enumerate(self.coeffs):
            total += c * Fraction(tau) ** i
        return PadicNumber.from_rational(total, p, prec)

    def __repr__(self):
        terms = [f"{c}*T^{i}" if i else f"{c}" for i, c in enumerate(self.coeffs) if c]
        return " + ".join(terms) or "0"


# ------------------------------------------------------------- setups

def _poly_mul(a, b, zero):
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _reduce_monic(poly, modulus, zero):
    """Remainder of poly modulo a monic polynomial (lists, low degree first)."""
    poly = list(poly)
    n = len(modulus) - 1
    for k in range(len(poly) - 1, n - 1, -1):
        c = poly[k]
        if c.is_zero():
            continue
        for i in range(n + 1):
            poly[k - n + i] = poly[k - n + i] - c * modulus[i]
    out = poly[:n] + [zero] * max(0, n - len(poly))
    return out


@dataclass
class AxiomaticSetup:
    A: TruncatedLambda
    F: tuple                    # coefficients of F, low degree first, monic
    _xF: tuple = field(default=None, repr=False)

    def __post_init__(self):
        zero = self.A.zero()
        self._xF = tuple([zero] + list(self.F))

    @property
    def d(self) -> int:
        """Rank of R over A."""
        return len(self.F)

    @property
    def e0(self) -> LambdaElement:
        return self.F[0]

    # elements of R and R0 are lists of A-elements of length d and d-1
    def R(self, coeffs):
        coeffs = [self.A(c) for c in coeffs]
        return _reduce_monic(coeffs, self._xF, self.A.zero()) if len(coeffs) > self.d \
            else coeffs + [self.A.zero()] * (self.d - len(coeffs))

    def R_mul(self, a, b):
        return _reduce_monic(_poly_mul(a, b, self.A.zero()), self._xF, self.A.zero())

    def R_add(self, a, b):
        return [x + y for x, y in zip(a, b)]

    def R_scale(self, c, a):
        c = self.A(c)
        return [c * x for x in a]

    def R0_mul(self, a, b):
        return _reduce_monic(_poly_mul(a, b, self.A.zero()), self.F, self.A.zero())

    def to_R0(self, r):
        return _reduce_monic(list(r), self.F, self.A.zero())

    def E(self, r) -> LambdaElement:
        return r[0]

    def E0(self, r0) -> LambdaElement:
        """Evaluation at X = 0 on R0, well defined modulo F(0)."""
        return r0[0]

    @property
    def t(self):
        return self.R([0, 1])

    @property
    def r0(self):
        return list(self.F)

    def is_zero(self, r):
        return all(x.is_zero() for x in r)


def build_setup(A: TruncatedLambda, F) -> AxiomaticSetup:
    F = tuple(A(c) for c in F)
    if len(F) < 2:
        raise InvalidSetupError("F must have degree at least 1")
    if F[-1] != A.one():
        raise InvalidSetupError("F must be monic")
    if any(c.is_unit() for c in F[:-1]):
        raise InvalidSetupError("F is not distinguished: a lower coefficient is a unit")
    if F[0].coeffs[0] == 0:
        raise InvalidSetupError("F(0) is a zero-divisor in A")
    return AxiomaticSetup(A, F)


def _random_A(rng, A, unit=False, in_max=False, spread=None):
    p = A.p
    spread = spread or p**3
    coeffs = []
    for i in range(A.D):
        num = rng.randint(-spread, spread)
        den = rng.choice([1, 1, 1, 2, 3, 7, 11]) if p not in (2, 3, 7, 11) else 1
        coeffs.append(Fraction(num, den))
    if unit:
        while coeffs[0].numerator % p == 0:
            coeffs[0] += 1
    if in_max:
        coeffs[0] = coeffs[0] * p
    return A(coeffs)


def random_setup(rng: random.Random, A: TruncatedLambda, degree: int) -> AxiomaticSetup:
    """Seeded random distinguished F of the given degree with F(0) a non-zero-divisor."""
    F = [_random_A(rng, A, in_max=True) for _ in range(degree)] + [A.one()]
    while F[0].coeffs[0] == 0:
        F[0] = _random_A(rng, A, in_max=True)
    return build_setup(A, F)


def random_R(rng, setup):
    return [_random_A(rng, setup.A) for _ in range(setup.d)]


# ---------------------------------------------------------- linear algebra over A

def _solve_unit_pivots(rows, A):
    """Reduced echelon form over the local ring A using unit pivots only.

    Returns (rows, pivot_columns); raises when a column has no unit pivot.
    """
    rows = [list(r) for r in rows]
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= len(rows):
            break
        k = next((i for i in range(r, len(rows)) if rows[i][c].is_unit()), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [inv * x for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not rows[i][c].is_zero():
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return rows, pivots


def multiplication_matrix(setup, r):
    """Columns: coordinates of r * X^j in R."""
    d = setup.d
    cols = []
    for j in range(d):
        basis = [setup.A.zero()] * d
        basis[j] = setup.A.one()
        cols.append(setup.R_mul(r, basis))
    return [[cols[j][i] for j in range(d)] for i in range(d)]


def annihilator_of_t(setup):
    """Generator of Ann_R(X), found from the multiplication-by-X matrix."""
    M = multiplication_matrix(setup, setup.t)
    rows, pivots = _solve_unit_pivots(M, setup.A)
    d = setup.d
    free = [c for c in range(d) if c not in pivots]
    if len(free) != 1:
        raise AssertionError(f"Ann(X) should be free of rank one, found {len(free)} free columns")
    f = free[0]
    if any(not x.is_zero() for row in rows[len(pivots):] for x in row):
        raise AssertionError("multiplication by X has non-unit residual rows")
    vec = [setup.A.zero()] * d
    vec[f] = setup.A.one()
    for i, c in enumerate(pivots):
        vec[c] = -rows[i][f]
    return vec


def r_inverse(setup, r):
    """Inverse of a unit of R, by solving r * y = 1."""
    M = multiplication_matrix(setup, r)
    d = setup.d
    aug = [M[i] + [setup.A.one() if i == 0 else setup.A.zero()] for i in range(d)]
    rows, pivots = _solve_unit_pivots(aug, setup.A)
    if pivots != list(range(d)):
        raise DomainError("element is not a unit of R")
    return [rows[i][d] for i in range(d)]


# ------------------------------------------------------------------- checks

def fiber_product_check(setup: AxiomaticSetup, trials: int = 20, rng=None) -> bool:
    """R -> R0 x_{A/F(0)} A is bijective, and Ann_R(I) = A r_0."""
    rng = rng or random.Random(0)
    A = setup.A
    e0 = setup.e0
    for _ in range(trials):
        r = random_R(rng, setup)
        if setup.is_zero(r):
            continue
        # injectivity: a non-zero r has non-zero image
        if setup.is_zero(setup.to_R0(r)) and setup.E(r).is_zero():
            return False
        # surjectivity onto compatible pairs: lift (r', a) with a = E0(r') mod F(0)
        rp = setup.to_R0(random_R(rng, setup))
        b = _random_A(rng, A)
        a = setup.E0(rp) + b * e0
        lifted = lift_pair(setup, rp, a)
        if lifted is None:
            return False
        if setup.to_R0(lifted) != rp or setup.E(lifted) != a:
            return False
        # the kernel of reduction to R0 is A r_0, and E restricted to it is injective
        c = _random_A(rng, A)
        kr = setup.R_scale(c, setup.r0)
        if not all(x.is_zero() for x in setup.to_R0(kr)):
            return False
        if setup.E(kr) != c * e0:
            return False
    ann = annihilator_of_t(setup)
    # Ann(X) must be A * F; the free coordinate is the leading one, so compare directly
    if [x for x in ann] != list(setup.r0):
        return False
    return True


def lift_pair(setup, rp, a):
    """The element of R mapping to (rp, a), or None if the pair is incompatible."""
    base = list(rp) + [setup.A.zero()]
    diff = a - setup.E(base)
    b = diff.divide(setup.e0)
    if b is None:
        return None
    return setup.R_add(base, setup.R_scale(b, setup.r0))


def action_on_r0_check(setup, trials=20, rng=None) -> bool:
    """r * r_0 = E(r) * r_0 for random r."""
    rng = rng or random.Random(0)
    for _ in range(trials):
        r = random_R(rng, setup)
        lhs = setup.R_mul(r, setup.r0)
        rhs = setup.R_scale(setup.E(r), setup.r0)
        if lhs != rhs:
            return False
        if setup.E(lhs) != setup.E(r) * setup.e0:
            return False
    return True


def nilpotency_indices(setup) -> tuple:
    """Nilpotency index of X in R/m_A R and in R0/m_A R0."""
    return (_nilpotency_index(setup, setup.d, setup.R_mul),
            _nilpotency_index(setup, setup.d - 1, setup.R0_mul))


def _nilpotency_index(setup, n, mul):
    if n == 0:
        return 0
    A = setup.A
    x = [A.zero()] * n
    if n > 1:
        x[1] = A.one()
    else:
        x = _reduce_monic([A.zero(), A.one()], setup.F, A.zero())
    power = [A.one()] + [A.zero()] * (n - 1)
    for j in range(1, n + 2):
        power = mul(power, x)
        if all(c.residue() == 0 for c in power):
            return j
    return None


def gorenstein_structure_check(setup) -> bool:
    return nilpotency_indices(setup) == (setup.d, setup.d - 1)


def specialize(setup, tau: int) -> PadicPoly:
    """F_w for w: T -> tau."""
    return PadicPoly([c.specialize(tau) for c in setup.F])


def mu_additivity_check(F_w: PadicPoly):
    """(val F_w(0), sum of root valuations from the Newton polygon, equal?)."""
    c0 = F_w.coeffs[0]
    if c0.is_zero():
        raise PrecisionError("F_w(0) vanishes at working precision")
    lhs = c0.valuation()
    rhs = newton_polygon(F_w).slope_sum()
    rhs = int(rhs) if rhs.denominator == 1 else rhs
    return lhs, rhs, lhs == rhs


def rank_one_mu(setup, tau: int) -> int:
    """val(w(E(r_0))) for a rank-one cuspidal model.

    Both normalizations F_w(X) = X + w(e0) and X - w(e0) give this value.
    """
    if setup.d != 2:
        raise ValidationError("rank_one_mu needs deg F = 1")
    value = setup.e0.specialize(tau)
    if value.is_zero():
        raise PrecisionError("w(E(r_0)) vanishes at working precision")
    plus = PadicPoly([value, PadicNumber(value.p, 1, value.prec)])
    minus = PadicPoly([-value, PadicNumber(value.p, 1, value.prec)])
    v_plus = mu_additivity_check(plus)[0]
    v_minus = mu_additivity_check(minus)[0]
    if v_plus != v_minus:
        raise AssertionError("sign conventions disagree")
    return v_plus


def l_symbol_content_check(setup, rng=None, length: int = 4) -> bool:
    """L = t * U with U a unit series over R: every coefficient lies in I and
    t lies in the R-span of the coefficients, so content(L) = I."""
    rng = rng or random.Random(0)
    U = [random_R(rng, setup) for _ in range(length)]
    while not setup.E(U[0]).is_unit():
        U[0] = random_R(rng, setup)
    L = [setup.R_mul(setup.t, u) for u in U]
    if any(not setup.E(c).is_zero() for c in L):
        return False
    back = setup.R_mul(L[0], r_inverse(setup, U[0]))
    return back == setup.t


LEMMA_CHECKS = ("fiber_product", "gorenstein_structure", "mu_additivity", "action_on_r0",
                "annihilator", "l_symbol_content")


def selftest(seed: int = 0, trials: int = 100, degrees=range(1, 7), p: int = 5, M: int = 20,
             D: int = 4, inner_trials: int = 3) -> dict:
    """Run every lemma check on seeded random setups; returns name -> [passed, failed]."""
    rng = random.Random(seed)
    A = TruncatedLambda(p, M, D)
    degrees = list(degrees)
    results = {name: [0, 0] for name in LEMMA_CHECKS}

    def record(name, ok):
        results[name][0 if ok else 1] += 1

    for n in range(trials):
        degree = degrees[n % len(degrees)]
        setup = random_setup(rng, A, degree)
        record("fiber_product", fiber_product_check(setup, inner_trials, rng))
        record("gorenstein_structure", gorenstein_structure_check(setup))
        record("action_on_r0", action_on_r0_check(setup, inner_trials, rng))
        ann = annihilator_of_t(setup)
        record("annihilator", ann == list(setup.r0) and setup.is_zero(setup.R_mul(setup.t, setup.r0)))
        record("l_symbol_content", l_symbol_content_check(setup, rng))
        tau = p * rng.randint(0, p**2)
        try:
            record("mu_additivity", mu_additivity_check(specialize(setup, tau))[2])
        except PrecisionError:
            # F_w(0) below the specialization precision: draw a non-degenerate tau
            record("mu_additivity", mu_additivity_check(specialize(setup, 0))[2])
    return results

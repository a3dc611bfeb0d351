"""Weight-2 modular symbols for Gamma_0(N), N prime.

Manin symbols are indexed by P^1(Z/N): (1:d) has index d and (0:1) has
index N.  The symbol of the coset with bottom row (c, d) is g{0, oo} for a
lift g = [[a, b], [c, d]] in SL_2(Z); the chosen lifts are
(1:d) -> [[0, -1], [1, d]] and (0:1) -> identity.

The quotient by the two- and three-term relations is computed by treating
the relations as the faces of a triangulated surface: a spanning tree of
the dual graph eliminates one edge per face, so every eliminated symbol is
expressed directly in the surviving basis without dense elimination.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import gcd

import numpy as np
import scipy.sparse as sp

from . import linalg
from .arith import SetupParams, is_prime
from .errors import (
    CriteriaNotMetError,
    NonOrdinaryError,
    PrecisionError,
    UnsupportedLevelError,
    WrongOperatorError,
    WrongRankError,
)
from .linalg import IntegersModPrimePower, RationalField, Subspace

LOCALIZING_PRIME_BOUND = 40
CLASS_COUNT_COMBINATION = {2: 1, 3: 3, 7: 7}
_FALLBACK_COMBINATIONS = (
    {2: 1, 3: 2, 5: 5, 7: 11},
    {3: 1, 7: 4, 11: 9, 13: 2},
    {2: 3, 5: 1, 11: 7, 13: 5, 17: 1},
    {2: 1, 3: 5, 7: 2, 13: 3, 19: 7, 23: 1},
)


# --------------------------------------------------------------- P^1(Z/N)

def p1_index(c: int, d: int, N: int) -> int:
    c %= N
    d %= N
    if c == 0:
        if d == 0:
            raise ValueError("(0:0) is not a point of P^1")
        return N
    return d * pow(c, -1, N) % N


def p1_point(i: int, N: int) -> tuple[int, int]:
    return (0, 1) if i == N else (1, i)


def _inverse_table(N):
    inv = np.zeros(N, dtype=np.int64)
    inv[1:] = [pow(c, -1, N) for c in range(1, N)]
    return inv


def _p1_index_vec(c, d, N, inv):
    c = np.mod(c, N)
    d = np.mod(d, N)
    return np.where(c == 0, N, (d * inv[c]) % N)


def sigma(i: int, N: int) -> int:
    c, d = p1_point(i, N)
    return p1_index(d, -c, N)


def tau(i: int, N: int) -> int:
    c, d = p1_point(i, N)
    return p1_index(d, -c - d, N)


def star(i: int, N: int) -> int:
    """Complex conjugation (c:d) -> (-c:d)."""
    return N if i == N else (-i) % N


def lift_cusps(i: int, N: int):
    """Cusps (alpha, beta) as (num, den) pairs with symbol i = {alpha, beta}."""
    if i == N:
        return (0, 1), (1, 0)
    return (-1, i), (0, 1)


# ------------------------------------------------------------ continued fractions

def _normalize(u, v):
    g = np.gcd(u, v)
    g[g == 0] = 1
    u = u // g
    v = v // g
    neg = (v < 0) | ((v == 0) & (u < 0))
    return np.where(neg, -u, u), np.where(neg, -v, v)


def zero_to_cusp_symbols(u, v, N, inv):
    """Manin-symbol decomposition of {0, u/v} for arrays of cusps.

    Returns ``(owner, symbol)`` arrays: {0, u_i/v_i} is the sum of the
    symbols whose owner is i.  Uses the convergents p_j/q_j of u/v:
    {0, u/v} = sum_{j=-1}^{m} ((-1)^(j-1) q_j : q_{j-1}).
    """
    u, v = _normalize(np.asarray(u, dtype=np.int64), np.asarray(v, dtype=np.int64))
    owners = [np.arange(len(u))]
    symbols = [np.full(len(u), N, dtype=np.int64)]
    live = np.nonzero(v != 0)[0]
    uu, vv = u[live], v[live]
    q_prev = np.zeros(len(live), dtype=np.int64)   # q_{j-1}
    q_prev2 = np.ones(len(live), dtype=np.int64)   # q_{j-2}
    sign = -1
    while len(live):
        a = np.floor_divide(uu, vv)
        q = a * q_prev + q_prev2
        owners.append(live)
        symbols.append(_p1_index_vec(sign * q, q_prev, N, inv))
        uu, vv = vv, uu - a * vv
        q_prev2, q_prev = q_prev, q
        sign = -sign
        keep = vv != 0
        live, uu, vv, q_prev, q_prev2 = live[keep], uu[keep], vv[keep], q_prev[keep], q_prev2[keep]
    return np.concatenate(owners), np.concatenate(symbols)


# ---------------------------------------------------------------- the space

def _manin_quotient(N, ring):
    """Projection matrix P with P[s] = coordinates of symbol s, and the
    basis representatives (symbol indices whose class is the i-th basis vector)."""
    n = N + 1
    sig = [sigma(i, N) for i in range(n)]
    rep = [-1] * n
    sgn = [0] * n
    for i in range(n):
        j = sig[i]
        if j == i:
            continue        # x = -x forces x = 0 since 2 is invertible
        rep[i] = min(i, j)
        sgn[i] = 1 if i == rep[i] else -1
    variables = sorted({r for r in rep if r >= 0})
    var_of = {r: k for k, r in enumerate(variables)}

    faces = []
    seen = [False] * n
    for i in range(n):
        if seen[i]:
            continue
        orbit = [i]
        j = tau(i, N)
        while j != i:
            orbit.append(j)
            j = tau(j, N)
        for s in orbit:
            seen[s] = True
        weight = 3 // len(orbit)    # a tau-fixed symbol contributes 3x
        rel = {}
        for s in orbit:
            if rep[s] >= 0:
                v = var_of[rep[s]]
                rel[v] = rel.get(v, 0) + weight * sgn[s]
        rel = {v: c for v, c in rel.items() if c}
        if rel:
            faces.append(rel)

    occurs = [[] for _ in variables]
    for f, rel in enumerate(faces):
        for v in rel:
            occurs[v].append(f)

    parent_var = [None] * len(faces)
    order = []
    visited = [False] * len(faces)
    tree_vars = set()
    for root in range(len(faces)):
        if visited[root]:
            continue
        visited[root] = True
        queue = deque([root])
        while queue:
            f = queue.popleft()
            order.append(f)
            for v in faces[f]:
                for g in occurs[v]:
                    if g != f and not visited[g]:
                        visited[g] = True
                        parent_var[g] = v
                        tree_vars.add(v)
                        queue.append(g)

    free = [v for v in range(len(variables)) if v not in tree_vars]
    col = {v: k for k, v in enumerate(free)}
    m = len(free)
    exact = isinstance(ring, RationalField)

    def unit_vec(k):
        e = linalg.zeros(m, ring)
        e[k] = ring.scalar(1)
        return e

    expr = {}
    leftovers = []
    for f in reversed(order):
        rel = faces[f]
        pv = parent_var[f]
        acc = linalg.zeros(m, ring)
        for v, c in rel.items():
            if v == pv:
                continue
            vec = unit_vec(col[v]) if v in col else expr[v]
            acc = acc + c * vec
        if pv is None:
            leftovers.append(acc if exact else ring.reduce(acc))
            continue
        scale = -ring.inv(rel[pv])
        expr[pv] = acc * scale if exact else ring.reduce(acc * scale)

    # relations that closed up at tree roots: eliminate densely
    L = linalg.identity(m, ring)
    keep = list(range(m))
    if leftovers:
        R, pivots = linalg.rref(np.array(leftovers, dtype=leftovers[0].dtype), ring)
        keep = [k for k in range(m) if k not in set(pivots)]
        L = linalg.zeros((m, len(keep)), ring)
        for j, k in enumerate(keep):
            L[k, j] = ring.scalar(1)
            for i, pc in enumerate(pivots):
                L[pc, j] = -R[i, k]
        if not exact:
            L = ring.reduce(L)

    P = linalg.zeros((n, m), ring)
    for s in range(n):
        if rep[s] < 0:
            continue
        v = var_of[rep[s]]
        vec = unit_vec(col[v]) if v in col else expr[v]
        P[s] = vec if sgn[s] > 0 else -vec
    if not exact:
        P = ring.reduce(P)
    P = linalg.matmul(P, L, ring)
    reps = [variables[free[k]] for k in keep]
    return P, reps


@dataclass
class HeckeMatrix:
    label: str
    matrix: np.ndarray
    N: int


@dataclass
class ManinSpace:
    """Weight-2 modular symbols of level Gamma_0(N) over ``ring``.

    Operators act on column vectors of coordinates with respect to the
    classes of the symbols listed in ``reps``.
    """

    N: int
    ring: object
    projection: np.ndarray
    reps: list
    _operators: dict = field(default_factory=dict, repr=False)

    @property
    def dim(self):
        return len(self.reps)

    @cached_property
    def boundary(self):
        """Coefficient of [oo] in the boundary of each basis vector.

        The boundary of (c:d) is [c = 0 ? oo : 0] - [d = 0 ? oo : 0]; the
        coefficient of [0] is the negative of this.
        """
        b = linalg.zeros((1, self.dim), self.ring)
        for j, s in enumerate(self.reps):
            c, d = p1_point(s, self.N)
            b[0, j] = self.ring.scalar((c % self.N == 0) - (d % self.N == 0))
        return b

    @cached_property
    def cuspidal(self) -> Subspace:
        return Subspace(linalg.kernel(self.boundary, self.ring), self.ring)

    @property
    def dim_cusp(self):
        return self.cuspidal.dim

    def symbol_vector(self, s):
        return self.projection[s]

    def _image_matrix(self, alphas, betas, deltas):
        """Matrix whose j-th column is sum over deltas of {delta alpha_j, delta beta_j}."""
        N = self.N
        inv = _inverse_table(N)
        k = len(alphas)
        au = np.array([a[0] for a in alphas], dtype=np.int64)
        av = np.array([a[1] for a in alphas], dtype=np.int64)
        bu = np.array([b[0] for b in betas], dtype=np.int64)
        bv = np.array([b[1] for b in betas], dtype=np.int64)
        rows, cols, vals = [], [], []
        for (a, b, c, d) in deltas:
            for (u, v, s) in ((bu, bv, 1), (au, av, -1)):
                owner, sym = zero_to_cusp_symbols(a * u + b * v, c * u + d * v, N, inv)
                rows.append(owner)
                cols.append(sym)
                vals.append(np.full(len(owner), s, dtype=np.int64))
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        C = sp.coo_matrix((vals, (rows, cols)), shape=(k, N + 1)).tocsr()
        C.sum_duplicates()
        if isinstance(self.ring, RationalField) or self.ring.dtype is object:
            images = np.asarray(C.toarray(), dtype=object).dot(self.projection)
            if not isinstance(self.ring, RationalField):
                images = images % self.ring.modulus
        else:
            images = np.asarray(C @ self.projection) % self.ring.modulus
        return images.T

    def _basis_cusps(self):
        pairs = [lift_cusps(s, self.N) for s in self.reps]
        return [a for a, _ in pairs], [b for _, b in pairs]

    def hecke(self, q: int) -> np.ndarray:
        """Matrix of T_q (q prime, q != N)."""
        if self.N % q == 0:
            raise WrongOperatorError(f"T_{q} at a prime dividing the level is not supported")
        if not is_prime(q):
            raise WrongOperatorError(f"T_{q}: q must be prime")
        key = ("T", q)
        if key not in self._operators:
            deltas = [(1, r, 0, q) for r in range(q)] + [(q, 0, 0, 1)]
            alphas, betas = self._basis_cusps()
            self._operators[key] = self._image_matrix(alphas, betas, deltas)
        return self._operators[key]

    def atkin_lehner(self) -> np.ndarray:
        key = ("w",)
        if key not in self._operators:
            alphas, betas = self._basis_cusps()
            self._operators[key] = self._image_matrix(alphas, betas, [(0, -1, self.N, 0)])
        return self._operators[key]

    def star_involution(self) -> np.ndarray:
        key = ("star",)
        if key not in self._operators:
            cols = [self.projection[star(s, self.N)] for s in self.reps]
            self._operators[key] = np.array(cols, dtype=self.projection.dtype).T.copy()
        return self._operators[key]

    def hecke_matrix(self, q: int) -> HeckeMatrix:
        return HeckeMatrix(f"T_{q}", self.hecke(q), self.N)

    def plus_cuspidal(self) -> Subspace:
        """Cuspidal symbols fixed by complex conjugation (ambient coordinates)."""
        key = ("plus",)
        if key not in self._operators:
            S = self.cuspidal
            star_c = S.restrict(self.star_involution())
            K = linalg.kernel(_sub_identity(star_c, self.ring), self.ring)
            self._operators[key] = Subspace(linalg.matmul(S.basis, K, self.ring), self.ring)
        return self._operators[key]

    def reduce_to(self, M: int) -> "ManinSpace":
        """The same space over Z/p^M for a smaller M (reduction of coordinates)."""
        ring = self.ring.with_precision(M)
        out = ManinSpace(self.N, ring, ring.reduce(self.projection), self.reps)
        for key, value in self._operators.items():
            if isinstance(value, np.ndarray):
                out._operators[key] = ring.reduce(value)
        return out


def _sub_identity(A, ring, scalar=1):
    n = A.shape[0]
    if isinstance(ring, RationalField):
        return A - scalar * linalg.identity(n, ring)
    return ring.reduce(A - scalar * linalg.identity(n, ring))


def build_manin_space(N: int, ring) -> ManinSpace:
    if not is_prime(N):
        raise UnsupportedLevelError(f"level {N} is not prime")
    if N < 11:
        raise UnsupportedLevelError(f"level {N} is below 11")
    if isinstance(ring, IntegersModPrimePower) and ring.p in (2, 3):
        raise UnsupportedLevelError("coefficients must have 2 and 3 invertible")
    P, reps = _manin_quotient(N, ring)
    return ManinSpace(N, ring, P, reps)


# ------------------------------------------------------------- localization

def modsym_precision(p: int) -> int:
    """Largest M with p^(2M) inside the int64 fast path."""
    M = 1
    while p ** (2 * (M + 1)) < (1 << 31):
        M += 1
    return M


def localizing_primes(N: int, bound: int = LOCALIZING_PRIME_BOUND) -> list[int]:
    return [q for q in range(2, bound) if is_prime(q) and q != N]


@dataclass
class LocalizedEisensteinData:
    """Eisenstein-local part of the plus cuspidal symbols, over Z/p^M.

    ``operators`` hold the restricted T_q (and ``"w"`` for w_N) in the basis
    of ``subspace``; char polys are lists of coefficients (low degree first)
    of symmetric residue lifts mod p^M.
    """

    params: SetupParams
    precision: int
    dimension: int
    subspace: Subspace
    operators: dict
    dim_full: int
    dim_cusp: int
    algebra_rank: int
    char_polys: dict = field(default_factory=dict)
    space: ManinSpace = field(default=None, repr=False)

    @property
    def ring(self):
        return self.subspace.ring

    @property
    def rank(self):
        return self.dimension

    def restricted(self, q):
        if q not in self.operators:
            self.operators[q] = self.subspace.restrict(self.space.hecke(q))
        return self.operators[q]


def _joint_fitting_kernel(space, ring, qs):
    V = space.plus_cuspidal()
    operators = [("w", space.atkin_lehner(), -1)] + [(q, space.hecke(q), 1 + q) for q in qs]
    for _, T, eig in operators:
        if V.dim == 0:
            break
        B = _sub_identity(V.restrict(T), ring, eig)
        K = linalg.fitting_kernel(B, ring)
        V = Subspace(linalg.matmul(V.basis, K, ring), ring)
    return V


def _algebra_rank(matrices, ring):
    """Z_p-rank of the algebra generated by commuting matrices, at precision M."""
    d = matrices[0].shape[0] if matrices else 0
    if d == 0:
        return 0
    span = [linalg.identity(d, ring)]
    frontier = list(span)

    def rank_of(mats):
        rows = np.array([m.reshape(-1) for m in mats])
        return sum(1 for v in linalg.smith_valuations(rows, ring) if v < ring.M)

    current = rank_of(span)
    while frontier and current < d:
        new_frontier = []
        for X in frontier:
            for G in matrices:
                Y = linalg.matmul(X, G, ring)
                r = rank_of(span + [Y])
                if r > current:
                    span.append(Y)
                    new_frontier.append(Y)
                    current = r
        frontier = new_frontier
    return current


def eisenstein_localize(space: ManinSpace, params: SetupParams, qs=None) -> LocalizedEisensteinData:
    """Generalized eigenspace of T_q = 1+q and w_N = -1 on plus cuspidal symbols.

    ``space`` must be over Z/p^(2M); the localization is redone after
    reduction to Z/p^M and both dimensions (and algebra ranks) must agree.
    """
    if params.k0 % (params.p - 1) != 2 % (params.p - 1):
        raise UnsupportedLevelError("weight-2 symbols only see the k0 = 2 component")
    ring = space.ring
    if not isinstance(ring, IntegersModPrimePower) or ring.p != params.p:
        raise ValueError("localization needs coefficients Z/p^M with p the residual prime")
    if space.N != params.N:
        raise ValueError("space level differs from params.N")
    if ring.M < 2:
        raise PrecisionError("need precision at least 2 to compare M and 2M")
    qs = localizing_primes(params.N) if qs is None else list(qs)

    V_hi = _joint_fitting_kernel(space, ring, qs)
    low = space.reduce_to(ring.M // 2)
    V_lo = _joint_fitting_kernel(low, low.ring, qs)
    if V_hi.dim != V_lo.dim:
        raise PrecisionError(
            f"localized dimension unstable: {V_lo.dim} at M={low.ring.M}, {V_hi.dim} at M={ring.M}")

    operators = {q: V_hi.restrict(space.hecke(q)) for q in qs}
    operators["w"] = V_hi.restrict(space.atkin_lehner())
    gens = [operators[q] for q in qs]
    rank_hi = _algebra_rank(gens, ring)
    rank_lo = _algebra_rank([low.ring.reduce(g) for g in gens], low.ring)
    if rank_hi != rank_lo:
        raise PrecisionError(f"Hecke algebra rank unstable: {rank_lo} vs {rank_hi}")

    data = LocalizedEisensteinData(
        params=params, precision=ring.M, dimension=V_hi.dim, subspace=V_hi,
        operators=operators, dim_full=space.dim, dim_cusp=space.dim_cusp,
        algebra_rank=rank_hi, space=space)
    for q in (2, 3):
        if q in operators:
            data.char_polys[q] = [ring.lift(c) for c in linalg.charpoly(operators[q], ring)]
    return data


# -------------------------------------------------------------- class count

class _Undetermined:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Undetermined"

    def __str__(self):
        return "undetermined"

    def __reduce__(self):
        return (_Undetermined, ())


Undetermined = _Undetermined()


def _combination(data, weights):
    ring = data.ring
    d = data.dimension
    t = linalg.zeros((d, d), ring)
    shift = 0
    for q, c in weights.items():
        if q == data.params.N:
            return None, None
        t = ring.reduce(t + c * data.restricted(q))
        shift += c * (1 + q)
    return t, shift


def _shift_poly(coeffs, shift, modulus):
    """Coefficients of G(X + shift) given G (low degree first)."""
    out = [0] * len(coeffs)
    for c in reversed(coeffs):
        # Horner: out = out * (X + shift) + c
        nxt = [0] * len(coeffs)
        for i, a in enumerate(out):
            if a:
                nxt[i] = (nxt[i] + a * shift) % modulus
                if i + 1 < len(nxt):
                    nxt[i + 1] = (nxt[i + 1] + a) % modulus
        nxt[0] = (nxt[0] + c) % modulus
        out = nxt
    return out


def count_local_factors(coeffs, p, M):
    """Number of Q_p-irreducible factors of a monic polynomial known mod p^M,
    all of whose roots are in the maximal ideal, or Undetermined.

    Each Newton polygon segment of slope h/e contributes the number of F_p
    factors of its residual polynomial, provided that residual polynomial is
    squarefree.
    """
    from sympy import Poly, symbols

    from .padic import PadicNumber, PadicPoly, newton_polygon

    poly = PadicPoly([PadicNumber.from_int(c, p, M) for c in coeffs])
    try:
        polygon = newton_polygon(poly)
    except PrecisionError:
        return Undetermined
    y = symbols("y")
    count = 0
    for (i0, v0), (i1, v1) in zip(polygon.vertices, polygon.vertices[1:]):
        slope = Fraction(v1 - v0, i1 - i0)
        e = slope.denominator
        r = (i1 - i0) // e
        residual = []
        for k in range(r + 1):
            idx = i0 + e * k
            target = v0 + slope * e * k
            c = poly.coeffs[idx]
            if not c.is_zero() and c.valuation() == target:
                residual.append(c.unit_residue())
            else:
                residual.append(0)
        R = Poly(list(reversed(residual)), y, modulus=p)
        _, factors = R.factor_list()
        if any(mult > 1 for _, mult in factors):
            return Undetermined
        count += len(factors)
    return count


def class_count(data: LocalizedEisensteinData):
    """Number of local Galois conjugacy classes of eigenforms in the block."""
    if data.dimension == 0:
        return 0
    if data.dimension == 1:
        return 1
    ring = data.ring
    for weights in (CLASS_COUNT_COMBINATION,) + _FALLBACK_COMBINATIONS:
        t, shift = _combination(data, weights)
        if t is None:
            continue
        G = linalg.charpoly(t, ring)
        H = _shift_poly([int(c) for c in G], shift, ring.modulus)
        result = count_local_factors(H, ring.p, ring.M)
        if result is not Undetermined:
            return result
    return Undetermined


# ------------------------------------------------------------- eigenvalues

def eigenvalues_rank_one(data: LocalizedEisensteinData, q_list) -> dict:
    """Eigenvalues of T_q on a rank-one block, as symmetric lifts mod p^M."""
    if data.dimension != 1:
        raise WrongRankError(f"block has rank {data.dimension}, not 1")
    ring = data.ring
    return {q: ring.lift(data.restricted(q)[0, 0]) for q in q_list}


def congruence_check(data: LocalizedEisensteinData, Q: int) -> bool:
    """Compare a_n of the rank-one eigenform with a_n of E^-_2 mod p for n <= Q
    coprime to Np."""
    from .eisenstein import eisenstein_pm_qexp

    if data.dimension != 1:
        raise WrongRankError(f"block has rank {data.dimension}, not 1")
    params = data.params
    N, p = params.N, params.p
    primes = [q for q in range(2, Q + 1) if is_prime(q) and q not in (N, p)]
    a = eigenvalues_rank_one(data, primes)
    coeffs = hecke_coefficients(a, Q, exclude=(N, p))
    eis = eisenstein_pm_qexp(2, -1, params, terms=Q)
    for n in range(1, Q + 1):
        if gcd(n, N * p) != 1:
            continue
        if (coeffs[n] - eis.coeffs[n]) % p:
            return False
    return True


def hecke_coefficients(a_primes: dict, Q: int, exclude=(), weight: int = 2) -> dict:
    """a_n for n <= Q built from prime eigenvalues by multiplicativity and
    a_{q^(r+1)} = a_q a_{q^r} - q^(k-1) a_{q^(r-1)}; n divisible by an
    excluded prime is skipped."""
    coeffs = {1: 1}
    for n in range(2, Q + 1):
        m = n
        result = 1
        ok = True
        q = 2
        while m > 1:
            if q * q > m:
                q = m
            if m % q == 0:
                if q in exclude or q not in a_primes:
                    ok = False
                    break
                r = 0
                while m % q == 0:
                    m //= q
                    r += 1
                prev, cur = 1, a_primes[q]
                for _ in range(r - 1):
                    prev, cur = cur, a_primes[q] * cur - q ** (weight - 1) * prev
                result *= cur
            q += 1
        if ok:
            coeffs[n] = result
    return coeffs


# ------------------------------------------------------------- mu at weight 2

def unit_root_matrix(Tp, ring, p, iterations=None):
    """Solve U^2 - Tp U + p = 0 with U = 1 mod the maximal ideal, by Newton's method."""
    d = Tp.shape[0]
    I = linalg.identity(d, ring)
    U = ring.reduce(np.array(Tp, copy=True))
    steps = iterations if iterations is not None else max(1, ring.M.bit_length() + 1)
    for _ in range(steps + 1):
        F = ring.reduce(linalg.matmul(U, U, ring) - linalg.matmul(Tp, U, ring) + p * I)
        if ring.is_zero(F):
            return U
        D = ring.reduce(2 * U - Tp)
        det = linalg.determinant(D, ring)
        if not ring.is_unit(det):
            raise NonOrdinaryError("derivative of the Hecke quadratic is not invertible")
        Dinv = _inverse(D, ring)
        U = ring.reduce(U - linalg.matmul(Dinv, F, ring))
    F = ring.reduce(linalg.matmul(U, U, ring) - linalg.matmul(Tp, U, ring) + p * I)
    if not ring.is_zero(F):
        raise NonOrdinaryError("Newton iteration for U_p did not converge")
    return U


def _inverse(A, ring):
    n = A.shape[0]
    aug = np.concatenate([ring.reduce(A), linalg.identity(n, ring)], axis=1)
    R, pivots = linalg.rref(aug, ring)
    if pivots[:n] != list(range(n)):
        raise NonOrdinaryError("matrix is not invertible")
    return R[:, n:]


def mu_sum_from_block(data: LocalizedEisensteinData) -> int:
    ring = data.ring
    p = data.params.p
    Tp = data.restricted(p)
    U = unit_root_matrix(Tp, ring, p)
    det = linalg.determinant(ring.reduce(U - linalg.identity(U.shape[0], ring)), ring)
    v = ring.valuation(det)
    if v >= ring.M:
        raise PrecisionError(f"det(U_p - 1) vanishes mod {p}^{ring.M}")
    return v


def mu_sum_weight2(params: SetupParams, data: LocalizedEisensteinData = None) -> int:
    """Valuation of det(U_p - 1) on the Eisenstein-local plus block at weight 2."""
    from .criteria import full_report

    report = full_report(params)
    if not report.up_minus_one_generates:
        raise CriteriaNotMetError(
            "U_p - 1 is not known to generate the Eisenstein ideal for this triple",
            reason=report.reason)
    if data is None:
        data = localize_level(params)
    return mu_sum_from_block(data)


def localize_level(params: SetupParams, M: int = None) -> LocalizedEisensteinData:
    """Build the space over Z/p^(2M) and localize it."""
    M = modsym_precision(params.p) if M is None else M
    ring = IntegersModPrimePower(params.p, 2 * M)
    space = build_manin_space(params.N, ring)
    return eisenstein_localize(space, params)

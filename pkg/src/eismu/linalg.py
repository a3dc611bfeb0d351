"""Dense linear algebra over Q and over Z/p^M.

Matrices are numpy arrays.  Over Z/p^M entries are canonical residues in
[0, p^M); the int64 fast path is used whenever p^M < 2^31 so that a product
of two residues fits in a signed 64-bit word.  Larger moduli and the rational
field fall back to object arrays of Python ints / Fractions.

Elimination always pivots on units.  Every space handled by this package
(Manin quotients, cuspidal subspaces, Fitting kernels) is a direct summand
of a free module over a local ring, so a unit pivot exists whenever the
column is not already reduced; the ``strict`` flag turns a violation of that
assumption into an error instead of a silently wrong answer.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .errors import PrecisionError

_INT64_LIMIT = 1 << 31
_FLOAT_EXACT = 1 << 53


class RationalField:
    """The field Q, entries stored as Fractions in object arrays."""

    dtype = object
    exact = True

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")

    def reduce(self, a):
        a = np.asarray(a, dtype=object)
        return np.vectorize(Fraction, otypes=[object])(a) if a.size else a

    def scalar(self, x):
        return Fraction(x)

    def is_unit(self, x):
        return x != 0

    def inv(self, x):
        return 1 / Fraction(x)

    def is_zero(self, a):
        return not np.any(a != 0)


class IntegersModPrimePower:
    """The ring Z/p^M."""

    exact = False

    def __init__(self, p: int, M: int):
        if M < 1:
            raise ValueError("precision must be positive")
        self.p = p
        self.M = M
        self.modulus = p**M
        self.dtype = np.int64 if self.modulus < _INT64_LIMIT else object

    def __repr__(self):
        return f"Z/{self.p}^{self.M}"

    def __eq__(self, other):
        return (isinstance(other, IntegersModPrimePower)
                and (self.p, self.M) == (other.p, other.M))

    def __hash__(self):
        return hash((self.p, self.M))

    def reduce(self, a):
        if self.dtype is object:
            a = np.asarray(a, dtype=object)
            return a % self.modulus
        a = np.asarray(a)
        if a.dtype == object:
            a = a % self.modulus
        return np.asarray(a, dtype=np.int64) % self.modulus

    def scalar(self, x):
        return int(x) % self.modulus

    def is_unit(self, x):
        return int(x) % self.p != 0

    def inv(self, x):
        return pow(int(x), -1, self.modulus)

    def is_zero(self, a):
        return not np.any(np.asarray(a) % self.modulus)

    def with_precision(self, M: int) -> "IntegersModPrimePower":
        return IntegersModPrimePower(self.p, M)

    def valuation(self, x) -> int:
        """p-adic valuation of a residue; M stands for 'zero at this precision'."""
        x = int(x) % self.modulus
        if x == 0:
            return self.M
        v = 0
        while x % self.p == 0:
            x //= self.p
            v += 1
        return v

    def lift(self, x) -> int:
        """Symmetric lift of a residue to (-p^M/2, p^M/2]."""
        x = int(x) % self.modulus
        return x - self.modulus if 2 * x > self.modulus else x


def matmul(A, B, ring):
    """Exact matrix product reduced in ``ring``."""
    if isinstance(ring, RationalField) or ring.dtype is object:
        A = np.asarray(A, dtype=object)
        B = np.asarray(B, dtype=object)
        C = A.dot(B)
        return C if isinstance(ring, RationalField) else C % ring.modulus
    m = ring.modulus
    A = np.asarray(A, dtype=np.int64) % m
    B = np.asarray(B, dtype=np.int64) % m
    inner = A.shape[1] if A.ndim == 2 else A.shape[0]
    if (m - 1) ** 2 * max(inner, 1) < _FLOAT_EXACT:
        C = np.asarray(A, dtype=np.float64) @ np.asarray(B, dtype=np.float64)
        return np.asarray(np.rint(C), dtype=np.int64) % m
    # split into 16-bit limbs so every float partial sum stays exact
    mask = (1 << 16) - 1
    A0, A1 = (A & mask).astype(np.float64), (A >> 16).astype(np.float64)
    B0, B1 = (B & mask).astype(np.float64), (B >> 16).astype(np.float64)

    def part(X, Y):
        return np.asarray(np.rint(X @ Y), dtype=np.int64) % m

    low = part(A0, B0)
    mid = (part(A0, B1) + part(A1, B0)) % m
    high = part(A1, B1)
    shift = (1 << 16) % m
    return (((high * shift) % m + mid) % m * shift % m + low) % m


def identity(n, ring):
    if isinstance(ring, RationalField):
        I = np.empty((n, n), dtype=object)
        I[:] = Fraction(0)
        for i in range(n):
            I[i, i] = Fraction(1)
        return I
    return np.eye(n, dtype=ring.dtype) if ring.dtype is not object else \
        np.array(np.eye(n, dtype=np.int64), dtype=object)


def zeros(shape, ring):
    if isinstance(ring, RationalField):
        Z = np.empty(shape, dtype=object)
        Z[...] = Fraction(0)
        return Z
    return np.zeros(shape, dtype=ring.dtype) if ring.dtype is not object else \
        np.array(np.zeros(shape, dtype=np.int64), dtype=object)


def rref(A, ring, strict=True):
    """Reduced row echelon form with unit pivots.

    Returns ``(R, pivots)`` where ``pivots[i]`` is the pivot column of row i.
    Rows past ``len(pivots)`` are whatever could not be pivoted; with
    ``strict`` they must vanish, otherwise the row space is not a direct
    summand at this precision and PrecisionError is raised.
    """
    R = ring.reduce(np.array(A, copy=True))
    if R.ndim != 2:
        raise ValueError("rref expects a matrix")
    nrows, ncols = R.shape
    modular = not isinstance(ring, RationalField)
    pivots = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        column = R[row:, col]
        if modular:
            units = np.nonzero(np.asarray(column % ring.p != 0))[0]
        else:
            units = np.nonzero(column != 0)[0]
        if len(units) == 0:
            continue
        r = row + int(units[0])
        if r != row:
            R[[row, r]] = R[[r, row]]
        inv = ring.inv(R[row, col])
        if modular:
            R[row] = (R[row] * inv) % ring.modulus
        else:
            R[row] = R[row] * inv
        others = np.nonzero(R[:, col] != 0)[0]
        others = others[others != row]
        if len(others):
            factors = R[others, col]
            if modular:
                R[others] = (R[others] - np.outer(factors, R[row]) % ring.modulus) % ring.modulus
            else:
                R[others] = R[others] - np.outer(factors, R[row])
        pivots.append(col)
        row += 1
    if strict and row < nrows and not ring.is_zero(R[row:]):
        raise PrecisionError("row space is not a direct summand at this precision")
    return R, pivots


def kernel(A, ring):
    """Basis (as columns) of the right kernel of A; assumes a free cokernel."""
    A = ring.reduce(A)
    n = A.shape[1]
    R, pivots = rref(A, ring)
    free = [j for j in range(n) if j not in set(pivots)]
    K = zeros((n, len(free)), ring)
    one = ring.scalar(1)
    for k, f in enumerate(free):
        K[f, k] = one
        for i, pc in enumerate(pivots):
            K[pc, k] = -R[i, f]
    return ring.reduce(K) if not isinstance(ring, RationalField) else K


class Subspace:
    """A direct summand given by a basis in column echelon form.

    ``basis[rows]`` is the identity, so the coordinates of a vector lying in
    the subspace are just its entries at ``rows``.
    """

    def __init__(self, basis, ring):
        basis = ring.reduce(basis)
        n, k = basis.shape
        if k == 0:
            self.basis = zeros((n, 0), ring)
            self.rows = []
        else:
            R, pivots = rref(basis.T, ring)
            self.basis = R[: len(pivots)].T.copy()
            self.rows = list(pivots)
        self.ring = ring

    @property
    def dim(self):
        return self.basis.shape[1]

    @property
    def ambient_dim(self):
        return self.basis.shape[0]

    def coordinates(self, V):
        """Coordinates of the columns of V, checked to lie in the subspace."""
        V = self.ring.reduce(V)
        C = V[self.rows]
        if not self.ring.is_zero(self._sub(matmul(self.basis, C, self.ring), V)):
            raise ValueError("vectors do not lie in the subspace")
        return C

    def restrict(self, T):
        """Matrix of an operator T (ambient) on this invariant subspace."""
        return self.coordinates(matmul(T, self.basis, self.ring))

    def _sub(self, X, Y):
        return self.ring.reduce(X - Y) if not isinstance(self.ring, RationalField) else X - Y


def matpow(A, e, ring):
    result = identity(A.shape[0], ring)
    base = ring.reduce(A)
    while e:
        if e & 1:
            result = matmul(result, base, ring)
        e >>= 1
        if e:
            base = matmul(base, base, ring)
    return result


def fitting_kernel(B, ring, nilpotency_bound=None):
    """Kernel of B^K for K large: the part of the space where B is
    topologically nilpotent.  Over Z/p^M that needs K >= M * (nilpotency
    index of B mod p)."""
    n = B.shape[0]
    if n == 0:
        return zeros((0, 0), ring)
    bound = n if nilpotency_bound is None else nilpotency_bound
    if isinstance(ring, RationalField):
        K = max(bound, 1)
    else:
        K = max(ring.M * bound, 1)
    e = 1 << (K - 1).bit_length()
    return kernel(matpow(B, e, ring), ring)


def nilpotency_index_mod_p(B, p):
    """Smallest j with (B mod p)^j having stabilised kernel."""
    ring = IntegersModPrimePower(p, 1)
    n = B.shape[0]
    X = ring.reduce(B)
    P = identity(n, ring)
    last = -1
    for j in range(1, n + 2):
        P = matmul(P, X, ring)
        dim = n - len(rref(P, ring, strict=False)[1])
        if dim == last:
            return j - 1
        last = dim
    return n


def charpoly(A, ring):
    """Characteristic polynomial det(xI - A), coefficients low to high.

    Berkowitz's division-free algorithm, so it works over Z/p^M.
    """
    n = len(A)
    if isinstance(ring, RationalField):
        red = lambda x: x  # noqa: E731
        M = [[Fraction(A[i][j]) for j in range(n)] for i in range(n)]
    else:
        m = ring.modulus
        red = lambda x: x % m  # noqa: E731
        M = [[int(A[i][j]) % m for j in range(n)] for i in range(n)]
    if n == 0:
        return [ring.scalar(1)]
    # coefficients high to low: vector for leading r x r block
    vect = [ring.scalar(1), red(-M[0][0])]
    for r in range(1, n):
        R = [M[i][r] for i in range(r)]          # column above diagonal
        C = M[r][:r]                             # row left of diagonal
        Asub = [row[:r] for row in M[:r]]
        a = M[r][r]
        # Toeplitz column: 1, -a, -C R, -C A R, -C A^2 R, ...
        col = [ring.scalar(1), red(-a)]
        v = R
        for _ in range(r):
            col.append(red(-sum(c * x for c, x in zip(C, v))))
            v = [red(sum(Asub[i][j] * v[j] for j in range(r))) for i in range(r)]
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(min(i, r) + 1):
                if i - j < len(col):
                    s += col[i - j] * vect[j]
            new.append(red(s))
        vect = new
    return list(reversed(vect))


def determinant(A, ring):
    n = len(A)
    c = charpoly(A, ring)[0]
    return c if n % 2 == 0 else (-c if isinstance(ring, RationalField) else (-c) % ring.modulus)


def smith_valuations(A, ring):
    """Valuations of the invariant factors of A over Z/p^M.

    Invariant factors that vanish at this precision are reported as M.
    """
    p, m = ring.p, ring.modulus
    rows = [[int(x) % m for x in row] for row in np.asarray(A)]
    out = []
    while rows and rows[0]:
        best = None
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                if x:
                    v = ring.valuation(x)
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            out.extend([ring.M] * min(len(rows), len(rows[0])))
            break
        v, i, j = best
        piv_row = rows.pop(i)
        x = piv_row[j]
        unit_inv = pow(x // p**v, -1, m)
        new_rows = []
        for row in rows:
            y = row[j]
            f = (y // p**v) * unit_inv % m if y else 0
            new_rows.append([(a - f * b) % m for a, b in zip(row, piv_row)])
        rows = [r[:j] + r[j + 1:] for r in new_rows]
        out.append(v)
    return out

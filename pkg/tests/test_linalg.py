from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Matrix, ZZ, symbols
from sympy.matrices.normalforms import smith_normal_form

from eismu import linalg
from eismu.errors import PrecisionError
from eismu.linalg import IntegersModPrimePower, RationalField, Subspace
from oracles import int_valuation

QQ = RationalField()

small_matrices = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n), min_size=n, max_size=n))


def as_ring(rows, ring):
    if isinstance(ring, RationalField):
        A = np.empty((len(rows), len(rows[0])), dtype=object)
        for i, row in enumerate(rows):
            for j, x in enumerate(row):
                A[i, j] = Fraction(x)
        return A
    return ring.reduce(np.array(rows, dtype=np.int64 if ring.dtype is not object else object))


class TestRing:
    def test_dtype(self):
        assert IntegersModPrimePower(5, 12).dtype is not object
        assert IntegersModPrimePower(5, 20).dtype is object

    def test_valuation_and_lift(self):
        ring = IntegersModPrimePower(5, 6)
        assert ring.valuation(0) == 6
        assert ring.valuation(250) == 3
        assert ring.lift(5**6 - 1) == -1


class TestMatmul:
    @pytest.mark.parametrize("M", [6, 12, 13, 20])
    def test_against_python(self, M, rng):
        ring = IntegersModPrimePower(5, M)
        m = ring.modulus
        for n in (1, 4, 30):
            A = [[rng.randrange(m) for _ in range(n)] for _ in range(n)]
            B = [[rng.randrange(m) for _ in range(n)] for _ in range(n)]
            C = linalg.matmul(as_ring(A, ring), as_ring(B, ring), ring)
            for i in range(n):
                for j in range(n):
                    assert int(C[i, j]) == sum(A[i][k] * B[k][j] for k in range(n)) % m


class TestCharpoly:
    @given(small_matrices)
    def test_rational_against_sympy(self, rows):
        x = symbols("x")
        expected = Matrix(rows).charpoly(x).all_coeffs()[::-1]
        assert linalg.charpoly(as_ring(rows, QQ), QQ) == [Fraction(int(c)) for c in expected]

    @given(small_matrices)
    def test_modular_against_sympy(self, rows):
        ring = IntegersModPrimePower(5, 12)
        x = symbols("x")
        expected = [int(c) % ring.modulus for c in Matrix(rows).charpoly(x).all_coeffs()[::-1]]
        assert [int(c) for c in linalg.charpoly(as_ring(rows, ring), ring)] == expected

    @given(small_matrices)
    def test_determinant(self, rows):
        ring = IntegersModPrimePower(5, 12)
        assert int(linalg.determinant(as_ring(rows, ring), ring)) == int(Matrix(rows).det()) % ring.modulus


class TestKernel:
    @given(small_matrices)
    def test_rational_rank_nullity(self, rows):
        A = as_ring(rows, QQ)
        K = linalg.kernel(A, QQ)
        assert K.shape[1] == len(rows[0]) - Matrix(rows).rank()
        assert all(x == 0 for x in A.dot(K).flat)

    def test_modular_kernel(self):
        ring = IntegersModPrimePower(5, 6)
        A = as_ring([[1, 2, 3], [2, 4, 6]], ring)
        K = linalg.kernel(A, ring)
        assert K.shape[1] == 2
        assert ring.is_zero(linalg.matmul(A, K, ring))

    def test_strict_precision(self):
        ring = IntegersModPrimePower(5, 6)
        with pytest.raises(PrecisionError):
            linalg.rref(as_ring([[5, 0], [0, 0]], ring), ring)

    def test_subspace_coordinates(self):
        ring = IntegersModPrimePower(5, 6)
        basis = as_ring([[1, 0], [0, 1], [3, 7]], ring)
        S = Subspace(basis, ring)
        assert S.dim == 2
        v = ring.reduce(linalg.matmul(basis, as_ring([[2], [5]], ring), ring))
        assert [int(c) for c in S.coordinates(v).flat] == [2, 5]


class TestSmith:
    @given(small_matrices)
    def test_against_sympy(self, rows):
        ring = IntegersModPrimePower(5, 8)
        got = sorted(linalg.smith_valuations(as_ring(rows, ring), ring))
        diag = smith_normal_form(Matrix(rows), domain=ZZ)
        n = min(diag.shape)
        expected = sorted(min(int_valuation(int(diag[i, i]), 5), 8) if diag[i, i] else 8
                          for i in range(n))
        assert got == expected


class TestFitting:
    def test_split(self):
        ring = IntegersModPrimePower(5, 6)
        # B acts nilpotently mod 5 on the first two coordinates, invertibly on the third
        B = as_ring([[5, 1, 0], [0, 10, 0], [0, 0, 2]], ring)
        K = linalg.fitting_kernel(B, ring)
        assert K.shape[1] == 2
        assert linalg.nilpotency_index_mod_p(B, 5) == 2

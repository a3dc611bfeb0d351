import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from eismu.axiomatics import (
    LEMMA_CHECKS,
    TruncatedLambda,
    action_on_r0_check,
    annihilator_of_t,
    build_setup,
    fiber_product_check,
    gorenstein_structure_check,
    lift_pair,
    l_symbol_content_check,
    mu_additivity_check,
    nilpotency_indices,
    random_R,
    random_setup,
    rank_one_mu,
    selftest,
    specialize,
)
from eismu.errors import DomainError, InvalidSetupError
from eismu.padic import PadicPoly
from oracles import expand_roots, hensel_root_valuations

A = TruncatedLambda(5, 6, 4)
A20 = TruncatedLambda(5, 20, 4)


def residues(poly):
    return [c.residue for c in poly.coeffs]


class TestLambda:
    def test_arithmetic(self):
        T = A.T()
        x = A([5, 1])
        assert x * x == A([25, 10, 1])
        assert (T * T * T * T).is_zero()
        assert A([1, 1]).inverse() * A([1, 1]) == A.one()

    def test_integrality(self):
        with pytest.raises(DomainError):
            A(Fraction(1, 5))
        assert A([5, 1]).divide(A([5])) is None
        assert A([25, 5]).divide(A([5, 1])) == A(5)

    def test_specialize(self):
        assert A([5, 1]).specialize(20).residue == 25
        with pytest.raises(DomainError):
            A([5, 1]).specialize(3)

    @given(st.lists(st.integers(-10**4, 10**4), min_size=4, max_size=4),
           st.lists(st.integers(-10**4, 10**4), min_size=4, max_size=4))
    def test_ring_axioms(self, a, b):
        x, y = A(a), A(b)
        assert x * y == y * x
        assert (x + y) - y == x
        assert x * (y + A.one()) == x * y + x


class TestBuild:
    def test_rank_one_example(self):
        setup = build_setup(A, [A([5, 1]), 1])
        assert setup.d == 2
        assert setup.e0 == A([5, 1])
        assert nilpotency_indices(setup) == (2, 1)

    def test_rank_two_example(self):
        setup = build_setup(A, [125, -30, 1])
        assert setup.d == 3
        assert nilpotency_indices(setup) == (3, 2)

    def test_invalid(self):
        with pytest.raises(InvalidSetupError):
            build_setup(A, [1, 1])
        with pytest.raises(InvalidSetupError):
            build_setup(A, [5, 2])
        with pytest.raises(InvalidSetupError):
            build_setup(A, [A([0, 5]), 1])


class TestFiberProduct:
    def test_examples(self):
        setup = build_setup(A, [A([5, 1]), 1])
        assert fiber_product_check(setup)
        # (r', a) = (1, 1 + F(0)) is compatible
        lifted = lift_pair(setup, [A.one()], A.one() + setup.e0)
        assert lifted is not None
        assert setup.to_R0(lifted) == [A.one()] and setup.E(lifted) == A.one() + setup.e0

    def test_incompatible(self):
        setup = build_setup(A, [A(25 * 3), 1])
        assert lift_pair(setup, [A.one()], A(6)) is None

    def test_random(self):
        rng = random.Random(0)
        for degree in range(1, 7):
            for _ in range(5):
                assert fiber_product_check(random_setup(rng, A20, degree), 5, rng)


class TestStructure:
    @pytest.mark.parametrize("degree", range(1, 7))
    def test_random_gorenstein(self, degree):
        rng = random.Random(degree)
        for _ in range(20):
            assert gorenstein_structure_check(random_setup(rng, A20, degree))

    def test_annihilator(self):
        rng = random.Random(1)
        for degree in range(1, 7):
            setup = random_setup(rng, A20, degree)
            assert annihilator_of_t(setup) == list(setup.r0)
            assert setup.is_zero(setup.R_mul(setup.t, setup.r0))

    def test_action_on_r0(self):
        rng = random.Random(2)
        for degree in range(1, 7):
            setup = random_setup(rng, A20, degree)
            assert action_on_r0_check(setup, 10, rng)
            r = random_R(rng, setup)
            lhs = setup.E(setup.R_mul(r, setup.r0))
            assert lhs == setup.E(r) * setup.E(setup.r0)

    def test_l_symbol(self):
        rng = random.Random(3)
        for degree in range(1, 5):
            assert l_symbol_content_check(random_setup(rng, A20, degree), rng)


class TestSpecialization:
    def test_examples(self):
        assert residues(specialize(build_setup(A, [A([5, 1]), 1]), 0)) == [5, 1]
        assert residues(specialize(build_setup(A, [A([5, 1]), 1]), 20)) == [25, 1]
        assert residues(specialize(build_setup(A, [5, A([0, 1]), 1]), 5)) == [5, 5, 1]

    @pytest.mark.parametrize("ints,expected", [
        ([125, -30, 1], (3, 3, True)),
        ([5, 1], (1, 1, True)),
        ([25, 5, 0, 1], (2, 2, True)),
    ])
    def test_mu_additivity_examples(self, ints, expected):
        assert mu_additivity_check(PadicPoly.from_ints(ints, 5, 20)) == expected

    def test_rank_one_mu(self):
        e0 = A([5, 1])
        assert rank_one_mu(build_setup(A, [e0, 1]), 0) == 1
        assert rank_one_mu(build_setup(A, [e0, 1]), 20) == 2
        unit = A([3, 2, 1])
        assert rank_one_mu(build_setup(A, [e0 * unit, 1]), 0) == 1
        assert rank_one_mu(build_setup(A, [e0 * unit, 1]), 20) == 2

    def test_split_specializations(self):
        rng = random.Random(4)
        for _ in range(50):
            roots = [5 * rng.randrange(1, 5**10) for _ in range(rng.randint(1, 6))]
            F = expand_roots(roots, 5**20)
            setup = build_setup(A20, F)
            F_w = specialize(setup, 0)
            lhs, rhs, ok = mu_additivity_check(F_w)
            assert ok
            assert lhs == sum(hensel_root_valuations(F, 5, 20))


def test_selftest():
    results = selftest(seed=7, trials=60)
    assert set(results) == set(LEMMA_CHECKS)
    for name, (passed, failed) in results.items():
        assert failed == 0, name
        assert passed == 60

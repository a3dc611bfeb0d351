import pytest

from eismu.arith import (
    DiscreteLogTable,
    SetupParams,
    is_pth_power_residue,
    primes_congruent_to_one,
)
from eismu.criteria import (
    full_report,
    log_sum_condition,
    merel_exponents,
    merel_number,
    merel_rank_one_check,
    principality_check,
    up_minus_one_generates,
)
from eismu.errors import SetupError
from oracles import brute_generator, brute_log, brute_order, brute_pth_powers

FLAGSHIP = SetupParams(11, 5, 2)


def oracle_log_sum(N, p, k0, zeta, g):
    return sum(pow(i, k0 - 2, p) * brute_log((1 - pow(zeta, i, N)) % N, g, N)
               for i in range(1, p)) % p


class TestLogSum:
    def test_flagship(self):
        zeta = 3
        product = 1
        for i in range(1, 5):
            product = product * (1 - pow(zeta, i, 11)) % 11
        assert product == 5
        assert brute_log(5, 2, 11) % 5 == 4
        assert log_sum_condition(FLAGSHIP) == 4
        assert log_sum_condition(FLAGSHIP) == DiscreteLogTable.for_prime(11, 5)(5)

    def test_k0_range(self):
        with pytest.raises(SetupError):
            SetupParams(11, 5, 4)

    @pytest.mark.parametrize("p", [5, 7, 11])
    def test_choice_independence(self, p):
        for N in primes_congruent_to_one(p, 200):
            roots = [z for z in range(2, N) if brute_order(z, N) == p]
            gens = [g for g in range(2, N) if brute_order(g, N) == N - 1]
            for k0 in range(2, p - 1, 2):
                verdicts = set()
                for z in roots:
                    for g in gens:
                        table = DiscreteLogTable(N, p, g)
                        value = log_sum_condition(SetupParams(N, p, k0), z, table)
                        assert value == oracle_log_sum(N, p, k0, z, g)
                        verdicts.add(value != 0)
                assert len(verdicts) == 1

    @pytest.mark.parametrize("p", [5, 7, 11])
    def test_weight_two_collapse(self, p):
        for N in primes_congruent_to_one(p, 2000):
            table = DiscreteLogTable.for_prime(N, p)
            assert log_sum_condition(SetupParams(N, p, 2)) == table(p)


class TestGeneration:
    def test_flagship(self):
        assert principality_check(FLAGSHIP)
        assert up_minus_one_generates(FLAGSHIP)

    def test_n31(self):
        params = SetupParams(31, 5, 2)
        assert up_minus_one_generates(params) == (5 not in brute_pth_powers(31, 5))
        assert up_minus_one_generates(params) == (not is_pth_power_residue(5, 31, 5))

    def test_p_is_pth_power(self):
        # N with 5 a fifth power mod N: generation fails by definition
        hits = [N for N in primes_congruent_to_one(5, 2000) if 5 in brute_pth_powers(N, 5)]
        assert hits
        for N in hits:
            report = full_report(SetupParams(N, 5, 2))
            assert not report.up_minus_one_generates
            assert report.p_is_pth_power
            # the weight-2 log sum is log_N(5) = 0, so principality fails first
            assert report.reason == "log_sum_zero"


class TestMerel:
    def test_flagship(self):
        datum = merel_rank_one_check(FLAGSHIP)
        assert datum.product == 5
        assert datum.predicts_rank_one
        assert merel_exponents(11, 2)[0] == 0

    def test_exponents(self):
        exps = merel_exponents(31, 4)
        for i in range(1, 31):
            assert exps[i - 1] == sum(j**3 for j in range(1, i)) % 30

    def test_merel_number(self):
        for N in (11, 31, 41):
            direct = 1
            for i in range(1, (N - 1) // 2 + 1):
                direct = direct * i**i
            assert merel_number(N) == direct % N

    def test_equivalence_below_2000(self):
        for N in primes_congruent_to_one(5, 2000):
            datum = merel_rank_one_check(SetupParams(N, 5, 2))
            assert datum.is_pth_power == is_pth_power_residue(merel_number(N), N, 5)


class TestReport:
    def test_flagship(self):
        report = full_report(FLAGSHIP)
        assert report.regular_pair and report.principal
        assert report.up_minus_one_generates and report.merel_ok
        assert report.reason == "ok"
        assert report.merel_number_equiv_checked

    def test_invalid(self):
        with pytest.raises(SetupError):
            full_report(SetupParams(13, 5, 2))

    def test_irregular(self):
        report = full_report(SetupParams(149, 37, 32))
        assert not report.regular_pair
        assert not report.principal and not report.up_minus_one_generates
        assert report.reason == "irregular_pair"

    def test_n31_components(self):
        params = SetupParams(31, 5, 2)
        report = full_report(params)
        assert report.log_sum == log_sum_condition(params)
        assert report.p_is_pth_power == (5 in brute_pth_powers(31, 5))
        assert report.principal == principality_check(params)
        assert report.up_minus_one_generates == up_minus_one_generates(params)
        assert report.merel_ok == merel_rank_one_check(params).predicts_rank_one

    @pytest.mark.parametrize("p", [5, 7])
    def test_generation_implies_principal(self, p):
        for N in primes_congruent_to_one(p, 1000):
            for k0 in range(2, p - 1, 2):
                report = full_report(SetupParams(N, p, k0))
                assert not report.up_minus_one_generates or report.principal
                assert report.to_json()["N"] == N

    def test_generator_oracle(self):
        assert DiscreteLogTable.for_prime(31, 5).g == brute_generator(31)

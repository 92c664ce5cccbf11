from fractions import Fraction
from math import comb

import pytest
from sympy import primerange

from config.advanced_settings import oracle_config
from src.exceptions import BudgetExceeded, PreconditionViolated, ZeroInverse
from src.modarith import PrimePowerModulus, jacobi_symbol
from src.oracle import (
    SumDescriptor, catalan_mod, direct_sum, residue_class_sum, term_count, term_value,
)


class TestSumDescriptor:
    def test_of_accepts_fraction_and_pairs(self):
        desc = SumDescriptor.of(2, Fraction(-1, 3), weight=(4, 27), scale=2)
        assert (desc.m_num, desc.m_den) == (-1, 3)
        assert desc.weight == (4, 27)
        assert desc.scale == (2, 1)

    def test_zero_m_rejected(self):
        with pytest.raises(ZeroInverse):
            SumDescriptor(2, 0)

    def test_m_vanishing_mod_p(self):
        with pytest.raises(ZeroInverse):
            SumDescriptor.of(2, 7).m_residue(7)

    def test_bad_kind_and_start(self):
        with pytest.raises(PreconditionViolated):
            SumDescriptor(2, 1, kind='D')
        with pytest.raises(PreconditionViolated):
            SumDescriptor(2, 1, k_start=2)

    def test_describe(self):
        assert SumDescriptor.of(2, 7).describe() == 'sum[k>=0] binom(3k,k+0)/(7)^k'
        assert SumDescriptor.of(2, 7, label='S_0').describe() == 'S_0'
        text = SumDescriptor.of(3, 1, weight=Fraction(27, 256), kind='C', k_start=1).describe()
        assert text == 'sum[k>=1] C^(3)_k*(27/256)^k/(1)^k'


class TestTerms:
    def test_term_value(self):
        # binom(6, 2) = 15 = 1 mod 7
        assert term_value(SumDescriptor(2, 1), 2, PrimePowerModulus(7)) == 1

    def test_term_value_with_weight_and_scale(self):
        desc = SumDescriptor.of(1, 2, weight=3, scale=5)
        # 5 * binom(4, 2) * (3/2)^2 mod 11
        expected = 5 * 6 * 9 * pow(4, -1, 11) % 11
        assert term_value(desc, 2, PrimePowerModulus(11)) == expected

    @pytest.mark.parametrize('desc,p,a,count', [
        (SumDescriptor(2, 1), 7, 1, 7),
        (SumDescriptor(2, 1, k_start=1), 7, 1, 6),
        (SumDescriptor(2, 1, k_start=1, class_restriction=0), 7, 1, 1),
        (SumDescriptor(2, 1, k_start=1, class_restriction=1), 7, 1, 1),
        (SumDescriptor(2, 1, k_start=1, class_restriction=0), 5, 2, 6),
        (SumDescriptor(2, 1, class_restriction=-1), 5, 2, 6),
    ])
    def test_term_count(self, desc, p, a, count):
        assert term_count(desc, PrimePowerModulus(p, a)) == count


class TestCatalan:
    @pytest.mark.parametrize('h', [1, 2, 3])
    def test_matches_division_forms(self, h):
        p = 1_000_003
        for k in range(12):
            n = (h + 1) * k
            assert catalan_mod('C', h, k, p) == comb(n, k) // (h * k + 1)
            assert catalan_mod('Cbar', h, k, p) == h * comb(n, k) // (k + 1)

    def test_catalan_numbers(self):
        assert [catalan_mod('C', 1, k, 101).value for k in range(6)] == [1, 1, 2, 5, 14, 42]

    def test_unknown_kind(self):
        with pytest.raises(PreconditionViolated):
            catalan_mod('plain', 2, 3, 7)


class TestDirectSum:
    def test_worked_example(self):
        # 1 + 3/7 + 15/49 + 84/343 + 495/2401 mod 5
        assert direct_sum(SumDescriptor(2, 7), PrimePowerModulus(5), workers=1) == 3

    @pytest.mark.parametrize('p,a', [(5, 1), (7, 1), (5, 2), (11, 1)])
    def test_agrees_with_exact_rational_sum(self, p, a):
        N = p ** a
        exact = sum(Fraction(comb(3 * k, k + 1), 9 ** k) for k in range(N))
        if exact.denominator % p == 0:
            pytest.skip('9 not invertible')
        expected = exact.numerator * pow(exact.denominator, -1, p) % p
        assert direct_sum(SumDescriptor(2, 9, d=1), PrimePowerModulus(p, a), workers=1) == expected

    @pytest.mark.parametrize('p', [int(p) for p in primerange(2, 100)])
    def test_central_binomial_sums_follow_legendre_mod_3(self, p):
        # sum_{k<p} binom(2k, k+d) = ((p-d)/3) mod p for 0 <= d <= p
        pp = PrimePowerModulus(p)
        for d in range(p + 1):
            assert direct_sum(SumDescriptor(1, 1, d=d), pp, workers=1) == jacobi_symbol(p - d, 3), d

    def test_class_restriction_filters_terms(self):
        pp = PrimePowerModulus(7, 2)
        for r in range(6):
            desc = SumDescriptor.of(2, 3, k_start=1, class_restriction=r)
            expected = sum((term_value(desc, k, pp) for k in range(1, pp.N) if k % 6 == r),
                           start=0 * term_value(desc, 0, pp))
            assert direct_sum(desc, pp, workers=1) == expected

    def test_residue_classes_partition_the_sum(self):
        pp = PrimePowerModulus(7)
        total = SumDescriptor(2, 1, d=1, k_start=1)
        pieces = [residue_class_sum(pp, 1, r, workers=1) for r in range(6)]
        assert sum(pieces[1:], pieces[0]) == direct_sum(total, pp, workers=1)

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            direct_sum(SumDescriptor(2, 1), PrimePowerModulus(7), budget=3, workers=1)

    def test_parallel_matches_serial(self, monkeypatch):
        monkeypatch.setattr(oracle_config, 'parallel_min_terms', 1)
        monkeypatch.setattr(oracle_config, 'backend', 'threading')
        desc = SumDescriptor.of(3, Fraction(256, 27), kind='Cbar', k_start=1)
        pp = PrimePowerModulus(11, 2)
        assert direct_sum(desc, pp, workers=3) == direct_sum(desc, pp, workers=1)

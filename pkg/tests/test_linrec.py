import time
from fractions import Fraction

import pytest

from src.exceptions import DRange, RepeatedRoot, SingularDiscriminant, ZeroInverse, ZeroRoot
from src.linrec import (
    RecurrenceSpec, SequenceWindow, descriptor_sum_fast, eval_u, integer_sequence, relation_check,
    relation_sides, sum_fast, sum_via_roots, sylvester_eval,
)
from src.modarith import PrimePowerModulus, ResidueFp, rational_residue
from src.oracle import SumDescriptor, direct_sum

M_SAMPLE = [1, 2, 3, -1, 9, Fraction(-1, 3)]


def _oracle(h, m, p, a, d):
    m = Fraction(m)
    desc = SumDescriptor(h, m.numerator, m.denominator, d=d)
    return direct_sum(desc, PrimePowerModulus(p, a), workers=1)


def _spec(h, m, p):
    m = Fraction(m)
    return RecurrenceSpec.build(h, m.numerator, m.denominator, p)


class TestRecurrenceSpec:
    def test_coefficients(self):
        spec = RecurrenceSpec.build(2, 6, 1, 7)
        # (1+x)^3 - 6x^2 = 1 + 3x - 3x^2 + x^3
        assert spec.coeffs == (1, 3, 4, 1)
        assert spec.reciprocal == (1, 4, 3, 1)

    def test_m_vanishing(self):
        with pytest.raises(ZeroInverse):
            RecurrenceSpec.build(2, 14, 1, 7)


class TestEvalU:
    @pytest.mark.parametrize('h', [1, 2, 3, 4])
    def test_initial_conditions(self, h):
        spec = RecurrenceSpec.build(h, 5, 1, 13)
        assert all(eval_u(spec, n) == 0 for n in range(h))
        assert eval_u(spec, h) == 1
        assert eval_u(spec, -1) == -1

    def test_double_root_closed_form(self):
        def closed(n):
            return Fraction(16, 81) * (Fraction(-1, 4) ** n + (Fraction(9 * n, 8) - 1) * 2 ** n)

        exact = integer_sequence(2, Fraction(27, 4), 12)
        assert exact == [closed(n) for n in range(12)]
        spec = RecurrenceSpec.build(2, 27, 4, 7)
        value = closed(5)
        assert eval_u(spec, 5) == rational_residue(value.numerator, value.denominator, 7)

    @pytest.mark.parametrize('h, m, p', [(2, 1, 7), (3, 5, 13), (1, 4, 11), (4, -2, 17)])
    def test_matches_exact_sequence(self, h, m, p):
        spec = _spec(h, m, p)
        for n, value in enumerate(integer_sequence(h, Fraction(m), 40)):
            assert eval_u(spec, n) == rational_residue(value.numerator, value.denominator, p)

    def test_large_index_against_stepping(self, rng):
        for _ in range(5):
            p = rng.choice([7, 11, 13, 101, 1009])
            h = rng.randint(1, 4)
            m = rng.randint(1, p - 1)
            spec = RecurrenceSpec(h, ResidueFp(m, p))
            start = SequenceWindow.initial(spec)
            for n in (4097, 5000):
                assert eval_u(spec, n) == start.advance(spec, n - h).values[-1]
            assert eval_u(spec, -4500) == start.retreat(spec, 4500).values[0]

    def test_window_round_trip(self):
        spec = RecurrenceSpec.build(3, 5, 1, 31)
        start = SequenceWindow.initial(spec)
        assert start.advance(spec, 700).retreat(spec, 700) == start
        assert start.advance(spec, -5) == start.retreat(spec, 5)

    def test_window_value_at(self):
        spec = RecurrenceSpec.build(2, 1, 1, 7)
        window = SequenceWindow.initial(spec).advance(spec, 10)
        assert window.value_at(11) == eval_u(spec, 11)
        with pytest.raises(IndexError):
            window.value_at(0)


class TestSums:
    def test_examples(self):
        assert sum_fast(RecurrenceSpec.build(2, 1, 1, 7), 0, 1) == 3
        assert sum_fast(RecurrenceSpec.build(2, 9, 1, 5), 0, 1) == 4

    def test_p11_quartic_sum_matches_oracle(self):
        assert sum_fast(RecurrenceSpec.build(3, 5, 1, 11), 0, 1) == _oracle(3, 5, 11, 1, 0)

    @pytest.mark.parametrize('p, a', [(5, 1), (7, 1), (11, 1), (13, 1), (5, 2), (7, 2)])
    @pytest.mark.parametrize('h', [1, 2, 3, 4])
    def test_oracle_equivalence(self, p, a, h):
        for m in M_SAMPLE:
            if Fraction(m).numerator % p == 0:
                continue
            spec = _spec(h, m, p)
            for d in range(-h + 1, h + 1):
                assert sum_fast(spec, d, a) == _oracle(h, m, p, a, d), (h, m, d)

    def test_prime_power_past_step_threshold(self):
        # 7^5 indices go through the x^N ladder rather than window stepping
        spec = _spec(3, 5, 7)
        for d in (-1, 0, 1):
            assert sum_fast(spec, d, 5) == _oracle(3, 5, 7, 5, d), d

    def test_far_offsets(self):
        spec = _spec(2, 3, 7)
        for d in (7, 8, 13, 14):
            assert sum_fast(spec, d, 1) == _oracle(2, 3, 7, 1, d)

    def test_offset_bounds(self):
        spec = _spec(2, 3, 7)
        assert sum_fast(spec, 14, 1) == 0
        with pytest.raises(DRange):
            sum_fast(spec, 15, 1)
        with pytest.raises(DRange):
            sum_fast(spec, -2, 1)

    @pytest.mark.parametrize('p', [7, 11, 13, 17, 19])
    def test_roots_formula_agrees(self, p):
        for h, m in [(2, 1), (2, 6), (3, 5), (1, 4), (4, 3)]:
            spec = _spec(h, m, p)
            try:
                for d in range(-h + 1, h + 1):
                    assert sum_via_roots(spec, d, 1) == sum_fast(spec, d, 1)
            except SingularDiscriminant:
                continue

    def test_roots_formula_square_modulus(self):
        spec = _spec(2, 6, 7)
        assert sum_via_roots(spec, 1, 2) == sum_fast(spec, 1, 2)

    def test_roots_formula_negative_offset(self):
        spec = _spec(3, 5, 7)
        assert sum_via_roots(spec, -2, 1) == _oracle(3, 5, 7, 1, -2)

    def test_repeated_root(self):
        with pytest.raises(SingularDiscriminant):
            sum_via_roots(RecurrenceSpec.build(2, 27, 4, 13), 0, 1)


class TestRelation:
    @pytest.mark.parametrize('h, m, p, a', [(2, 1, 5, 1), (1, 4, 7, 1), (3, 5, 7, 1), (2, 3, 5, 2)])
    def test_all_offsets(self, h, m, p, a):
        spec = _spec(h, m, p)
        N = p ** a
        for d in range(-h + 1, h * N + 1):
            assert relation_check(spec, d, a), d

    @pytest.mark.slow
    def test_huge_prime_power(self):
        p, a = 1_000_003, 1000
        spec = _spec(3, 5, p)
        start = time.perf_counter()
        sum_fast(spec, 0, a)
        assert time.perf_counter() - start < 1.0
        N = p ** a
        for d in (0, 1, N - 3):
            assert relation_check(spec, d, a), d

    def test_right_hand_sides(self):
        spec = _spec(3, 5, 7)
        assert relation_sides(spec, 7 - 3, 1)[1] == 6
        assert relation_sides(spec, 14 - 3, 1)[1] == 4
        lhs, rhs = relation_sides(_spec(2, 1, 5), 1, 1)
        assert lhs == rhs == 0


class TestSylvester:
    def test_fibonacci(self):
        roots = [ResidueFp(4, 11), ResidueFp(8, 11)]
        assert sylvester_eval(roots, 5) == 5

    def test_matches_recurrence_when_split(self):
        p = 13
        spec = _spec(2, 6, p)
        f = spec.characteristic()
        roots = [ResidueFp(x, p) for x in range(1, p) if f.evaluate(x) == 0]
        if len(roots) == 3:
            for n in range(-3, 20):
                assert sylvester_eval(roots, n) == eval_u(spec, n)
            assert sylvester_eval(roots, 2) == 1

    def test_split_cubic_found(self):
        # m = 9 makes (1+x)^3 - 9x^2 split mod 19
        p = 19
        spec = _spec(2, 9, p)
        f = spec.characteristic()
        roots = [ResidueFp(x, p) for x in range(1, p) if f.evaluate(x) == 0]
        assert len(roots) == 3
        for n in range(0, 30):
            assert sylvester_eval(roots, n) == eval_u(spec, n)

    def test_invalid_roots(self):
        with pytest.raises(RepeatedRoot):
            sylvester_eval([ResidueFp(3, 7), ResidueFp(3, 7)], 2)
        with pytest.raises(ZeroRoot):
            sylvester_eval([ResidueFp(0, 7), ResidueFp(3, 7)], 2)


class TestDescriptorFastRoute:
    DESCRIPTORS = [
        SumDescriptor.of(2, 6, kind='Cbar', k_start=1, scale=Fraction(1, 2)),
        SumDescriptor.of(2, 8, kind='C', k_start=1),
        SumDescriptor.of(2, 1, weight=-4, k_start=1),
        SumDescriptor.of(3, Fraction(256, 27), d=-1, scale=3),
        SumDescriptor.of(3, 5, kind='Cbar'),
        SumDescriptor.of(1, 4, kind='C'),
        SumDescriptor.of(2, 8, d_pa=1),
        SumDescriptor.of(2, 1, d=1, k_start=1, class_restriction=2),
        SumDescriptor.of(2, 1, d=0, k_start=1, class_restriction=0),
    ]

    @pytest.mark.parametrize('p', [5, 7, 11, 13, 17])
    @pytest.mark.parametrize('index', range(len(DESCRIPTORS)))
    def test_matches_oracle(self, p, index):
        desc = self.DESCRIPTORS[index]
        pp = PrimePowerModulus(p)
        try:
            expected = direct_sum(desc, pp, workers=1)
        except ZeroInverse:
            pytest.skip('m or weight vanishes mod p')
        assert descriptor_sum_fast(desc, pp) == expected

    def test_square_modulus(self):
        desc = SumDescriptor.of(2, 9, kind='C', k_start=1)
        pp = PrimePowerModulus(5, 2)
        assert descriptor_sum_fast(desc, pp) == direct_sum(desc, pp, workers=1)

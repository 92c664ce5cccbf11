import pytest
from sympy import primerange

from src.cubicres import (
    OMEGA, OMEGA_SQ, ONE, ZERO, CubicClass, EisensteinInt, classify, cubic_character_prime,
    cubic_jacobi, eis_divmod, eis_gcd, lemma41_predict, lemma42_predict, primary_associate,
    sun_c0_criterion, symbol_exponent,
)
from src.exceptions import (
    DegenerateC, DivisionByZero, NoSquareRoot, NotCoprimeToThree, PreconditionViolated, SingularD,
    UndefinedClass,
)
from src.modarith import PrimePowerModulus

PRIMES = [int(p) for p in primerange(5, 100)]


def _step(a1, a2, a3, p, N):
    u = [0, 0, 1]
    for _ in range(N):
        u.append(-(a1 * u[-1] + a2 * u[-2] + a3 * u[-3]) % p)
    return tuple(u[N:N + 3])


class TestEisensteinInt:
    def test_omega_relations(self):
        assert OMEGA * OMEGA == OMEGA_SQ
        assert OMEGA * OMEGA_SQ == ONE
        assert ONE + OMEGA + OMEGA_SQ == ZERO

    def test_norm(self):
        assert EisensteinInt(1, 3).norm() == 7
        assert EisensteinInt(2, 1).norm() == 3
        assert ZERO.norm() == 0

    def test_norm_multiplicative_and_euclidean(self, rng):
        for _ in range(2000):
            x = EisensteinInt(rng.randint(-500, 500), rng.randint(-500, 500))
            y = EisensteinInt(rng.randint(-50, 50), rng.randint(-50, 50))
            assert (x * y).norm() == x.norm() * y.norm()
            if y.is_zero():
                continue
            q, r = eis_divmod(x, y)
            assert q * y + r == x
            assert r.norm() < y.norm()

    def test_divmod_examples(self):
        y = EisensteinInt(1, 3)
        assert eis_divmod(y, y) == (ONE, ZERO)
        _, r = eis_divmod(EisensteinInt(5, 0), EisensteinInt(2, 1))
        assert r.norm() < 3

    def test_divide_by_zero(self):
        with pytest.raises(DivisionByZero):
            eis_divmod(ONE, ZERO)

    def test_gcd_recovers_split_prime(self):
        g = eis_gcd(EisensteinInt(7, 0), EisensteinInt(-2, 1))
        assert g.norm() == 7

    def test_primary_associate(self):
        x = primary_associate(EisensteinInt(1, 3))
        assert x.a % 3 == 2 and x.b % 3 == 0
        assert x.norm() == 7
        with pytest.raises(NotCoprimeToThree):
            primary_associate(EisensteinInt(2, 1))


class TestCubicSymbol:
    def test_known_values(self):
        n = EisensteinInt(1, 3)
        assert cubic_jacobi(2, n) == OMEGA_SQ
        assert cubic_jacobi(1, n) == ONE
        assert cubic_jacobi(-1, n) == ONE

    def test_zero_when_not_coprime(self):
        assert cubic_jacobi(EisensteinInt(1, 3), EisensteinInt(1, 3)) == ZERO
        assert cubic_jacobi(7, 7) == ZERO

    @pytest.mark.parametrize('q', [5, 11, 17, 23, 29, 41, 47])
    def test_rational_integers_mod_inert_prime(self, q):
        for x in range(1, q):
            assert cubic_jacobi(x, q) == ONE

    @pytest.mark.parametrize('p', [7, 13, 19, 31, 37, 43])
    def test_rational_and_eisenstein_paths_agree(self, p):
        alpha = EisensteinInt(5, 2)
        assert cubic_jacobi(alpha, p) == cubic_jacobi(alpha, EisensteinInt(p, 0))

    def test_multiplicative_in_modulus(self):
        alpha = EisensteinInt(4, 2)
        exps = [symbol_exponent(cubic_jacobi(alpha, q)) for q in (7, 13)]
        combined = symbol_exponent(cubic_jacobi(alpha, 91))
        assert combined == sum(exps) % 3

    def test_cubic_reciprocity(self, rng):
        # (alpha/n)_3 = (n/alpha)_3 for coprime primary alpha, n
        checked = 0
        while checked < 200:
            alpha, n = (EisensteinInt(rng.randrange(-400, 400), rng.randrange(-400, 400)) for _ in range(2))
            if min(alpha.norm(), n.norm()) <= 1 or (alpha.norm() * n.norm()) % 3 == 0:
                continue
            alpha, n = primary_associate(alpha), primary_associate(n)
            forward = cubic_jacobi(alpha, n)
            if forward == ZERO:
                continue
            assert forward == cubic_jacobi(n, alpha), (alpha, n)
            checked += 1

    def test_large_composite_modulus(self):
        alpha = EisensteinInt(17, 5)
        # 1000003 and 1000033 are both 1 mod 3
        first, second = 1_000_003, 1_000_033
        exps = [symbol_exponent(cubic_jacobi(alpha, q)) for q in (first, second)]
        assert symbol_exponent(cubic_jacobi(alpha, first * second)) == sum(exps) % 3
        assert cubic_jacobi(alpha, first * second) == cubic_jacobi(alpha, EisensteinInt(first * second, 0))

    def test_modulus_divisible_by_three(self):
        with pytest.raises(NotCoprimeToThree):
            cubic_jacobi(2, 21)
        with pytest.raises(NotCoprimeToThree):
            cubic_character_prime(ONE, 3)

    def test_split_prime_needs_root(self):
        with pytest.raises(PreconditionViolated):
            cubic_character_prime(EisensteinInt(2, 0), 7)


class TestClassify:
    @pytest.mark.parametrize('c, p, a, expected', [
        (3, 17, 1, CubicClass.C0),
        (3, 19, 1, CubicClass.C0),
        (3, 5, 3, CubicClass.C0),
        (3, 5, 1, CubicClass.C2),
        (3, 7, 1, CubicClass.C1),
        (1, 7, 1, CubicClass.C2),
        (4, 7, 1, CubicClass.C2),
        (6, 7, 1, CubicClass.C1),
        (4, 13, 1, CubicClass.C0),
    ])
    def test_examples(self, c, p, a, expected):
        assert classify(c, 1, PrimePowerModulus(p, a)) is expected

    @pytest.mark.parametrize('p, expected', [(17, CubicClass.C1), (11, CubicClass.C1), (5, CubicClass.C2),
                                             (13, CubicClass.C0)])
    def test_minus_one_third(self, p, expected):
        assert classify(-1, 3, PrimePowerModulus(p)) is expected

    def test_undefined(self):
        cls = classify(2, 1, PrimePowerModulus(7))
        assert cls is CubicClass.UNDEFINED
        assert str(cls) == 'undefined'
        with pytest.raises(UndefinedClass):
            cls.require()
        assert classify(1, 1, PrimePowerModulus(2)) is CubicClass.UNDEFINED

    def test_three_excluded(self):
        with pytest.raises(NotCoprimeToThree):
            classify(1, 1, PrimePowerModulus(3))

    @pytest.mark.parametrize('p', PRIMES)
    def test_symmetry(self, p):
        pp = PrimePowerModulus(p)
        for c in range(p):
            if (c * c + 3) % p == 0:
                continue
            assert (classify(-c, 1, pp) is CubicClass.C1) == (classify(c, 1, pp) is CubicClass.C2)

    @pytest.mark.parametrize('p', [p for p in PRIMES if p % 3 == 1])
    def test_class_sizes(self, p):
        pp = PrimePowerModulus(p)
        counts = {cls: 0 for cls in CubicClass}
        for c in range(p):
            counts[classify(c, 1, pp)] += 1
        assert counts[CubicClass.UNDEFINED] == 2
        for cls in (CubicClass.C0, CubicClass.C1, CubicClass.C2):
            assert abs(counts[cls] - (p - 2) / 3) <= 1

    @pytest.mark.parametrize('p', PRIMES)
    def test_sun_criterion_agrees(self, p):
        pp = PrimePowerModulus(p)
        for c in range(1, p):
            if c * (c * c + 3) % p == 0:
                continue
            assert sun_c0_criterion(c, 1, p) == (classify(c, 1, pp) is CubicClass.C0), c

    def test_sun_criterion_examples(self):
        assert sun_c0_criterion(3, 1, 17)
        assert not sun_c0_criterion(3, 1, 5)
        assert sun_c0_criterion(-1, 3, 13)

    def test_sun_criterion_degenerate(self):
        with pytest.raises(DegenerateC):
            sun_c0_criterion(0, 1, 7)
        with pytest.raises(PreconditionViolated):
            sun_c0_criterion(1, 1, 3)


class TestShiftedTerms:
    def test_lemma41_example(self):
        pp = PrimePowerModulus(7)
        assert lemma41_predict(-6, 3, 1, pp) == _step(-6, 3, 1, 7, 7) == (1, 0, 1)

    def test_lemma41_root_flip(self):
        pp = PrimePowerModulus(7)
        assert lemma41_predict(-6, 3, 1, pp, root=1) == lemma41_predict(-6, 3, 1, pp, root=6)
        with pytest.raises(NoSquareRoot):
            lemma41_predict(-6, 3, 1, pp, root=2)

    def test_lemma41_errors(self):
        with pytest.raises(SingularD):
            lemma41_predict(0, 0, 0, PrimePowerModulus(7))
        with pytest.raises(PreconditionViolated):
            lemma41_predict(-6, 3, 1, PrimePowerModulus(3))

    @pytest.mark.parametrize('p', [p for p in PRIMES if p < 60])
    def test_lemma41_against_stepping(self, p, rng):
        pp = PrimePowerModulus(p)
        checked = 0
        for _ in range(30):
            a1, a2, a3 = rng.randrange(p), rng.randrange(p), rng.randrange(1, p)
            try:
                predicted = lemma41_predict(a1, a2, a3, pp)
            except (SingularD, NoSquareRoot, UndefinedClass, PreconditionViolated):
                continue
            assert predicted == _step(a1, a2, a3, p, p), (a1, a2, a3)
            checked += 1
        assert checked > 0

    @pytest.mark.slow
    @pytest.mark.parametrize('p, a', [(5, 2), (7, 2), (11, 2), (13, 2), (5, 3), (7, 3)])
    def test_lemma41_prime_powers(self, p, a, rng):
        pp = PrimePowerModulus(p, a)
        for _ in range(20):
            a1, a2, a3 = rng.randrange(p), rng.randrange(p), rng.randrange(1, p)
            try:
                predicted = lemma41_predict(a1, a2, a3, pp)
            except (SingularD, NoSquareRoot, UndefinedClass, PreconditionViolated):
                continue
            assert predicted == _step(a1, a2, a3, p, pp.N), (a1, a2, a3)

    def test_lemma42_example(self):
        assert lemma42_predict(7, 0, PrimePowerModulus(13)) == (0, 1, 4)

    @pytest.mark.parametrize('p, a', [(p, 1) for p in PRIMES if p < 50] + [(5, 2), (7, 2), (11, 2), (13, 2)])
    def test_lemma42_against_stepping(self, p, a):
        pp = PrimePowerModulus(p, a)
        for t in range(0, 10):
            m = t * t + t + 7
            try:
                predicted = lemma42_predict(m, t, pp)
            except (PreconditionViolated, UndefinedClass):
                continue
            assert predicted == _step(3 - m, 3, 1, p, pp.N), (m, t)

import itertools

import pytest

from src.exceptions import DegreeTooSmall, SingularDiscriminant, ZeroPolynomial
from src.polyfield import (
    PolyFp, catalan_characteristic, count_irreducible_factors, count_roots, cubic_discriminant,
    discriminant, distinct_degree_counts, stickelberger_check,
)
from tests.conftest import ODD_PRIMES

QUARTIC = (1, 4, 6, -1, 1)  # (x+1)^4 - 5x^3


def _squarefree_monic(p, degree):
    for tail in itertools.product(range(p), repeat=degree):
        f = PolyFp(tail + (1,), p)
        if discriminant(f).value:
            yield f


def test_cubic_discriminant_examples():
    assert cubic_discriminant(-3, 3, 1) == -108
    assert cubic_discriminant(0, 0, 0) == 0


@pytest.mark.parametrize('m', range(1, 12))
def test_cubic_discriminant_family(m):
    assert cubic_discriminant(3 - m, 3, 1) == (4 * m - 27) * m * m


@pytest.mark.parametrize('m', [1, 2, 5, 7, 9])
def test_resultant_matches_closed_form(m):
    assert discriminant(catalan_characteristic(2, m)) == (4 * m - 27) * m * m


def test_integer_discriminants():
    assert discriminant(QUARTIC) == 15125 == 5 ** 3 * 11 ** 2
    assert discriminant((-1, 0, 1)) == 4


def test_reduced_discriminant():
    assert discriminant(PolyFp(QUARTIC, 7)) == 15125 % 7


def test_reduced_discriminant_matches_integer(rng):
    for _ in range(200):
        p = rng.choice([3, 5, 7, 11, 13, 101])
        coeffs = tuple(rng.randint(-20, 20) for _ in range(rng.randint(2, 4))) + (rng.randint(1, 9),)
        if coeffs[-1] % p == 0:
            continue
        assert discriminant(PolyFp(coeffs, p)) == discriminant(coeffs) % p, (coeffs, p)


def test_discriminant_degree():
    with pytest.raises(DegreeTooSmall):
        discriminant((1, 1))


def test_trailing_zeros_dropped():
    f = PolyFp((1, 2, 7, 14), 7)
    assert f.coeffs == (1, 2)
    assert f.degree == 1
    assert PolyFp((0, 7), 7).is_zero


def test_catalan_characteristic():
    assert catalan_characteristic(3, 5) == QUARTIC
    assert catalan_characteristic(2, 27, 4) == (4, 12, -15, 4)


class TestFactorCounts:
    def test_quadratics(self):
        assert count_irreducible_factors(PolyFp((1, 0, 1), 5)) == 2
        assert count_irreducible_factors(PolyFp((1, 0, 1), 7)) == 1

    def test_multiplicity(self):
        # (x - 1)^2 (x + 1) mod 5
        f = PolyFp((1, -1, -1, 1), 5)
        assert distinct_degree_counts(f) == {1: 3}
        assert count_roots(f) == 2

    def test_zero_polynomial(self):
        with pytest.raises(ZeroPolynomial):
            count_roots(PolyFp((0,), 5))

    @pytest.mark.parametrize('p', [7, 13, 29, 31, 41])
    def test_roots_match_enumeration(self, p):
        f = PolyFp(QUARTIC, p)
        assert count_roots(f) == sum(1 for x in range(p) if f.evaluate(x) == 0)

    def test_stickelberger_parity_for_section_two_cubic(self):
        f = PolyFp((1, 3, -3, 1), 7)
        assert count_irreducible_factors(f) % 2 == 1


class TestStickelberger:
    @pytest.mark.parametrize('p', [3, 5, 7])
    @pytest.mark.parametrize('degree', [3, 4])
    def test_every_squarefree_monic(self, p, degree):
        polys = list(_squarefree_monic(p, degree))
        assert polys
        assert all(stickelberger_check(f) for f in polys)

    @pytest.mark.slow
    @pytest.mark.parametrize('p', [p for p in ODD_PRIMES if p < 50])
    def test_every_squarefree_monic_cubic(self, p):
        assert all(stickelberger_check(f) for f in _squarefree_monic(p, 3))

    @pytest.mark.slow
    @pytest.mark.parametrize('p', [11, 13])
    def test_every_squarefree_monic_quartic(self, p):
        assert all(stickelberger_check(f) for f in _squarefree_monic(p, 4))

    @pytest.mark.slow
    @pytest.mark.parametrize('p', [p for p in ODD_PRIMES if 13 < p < 50])
    def test_sampled_quartics(self, p, rng):
        for _ in range(2000):
            f = PolyFp(tuple(rng.randrange(p) for _ in range(4)) + (1,), p)
            if discriminant(f).value:
                assert stickelberger_check(f), f.coeffs

    @pytest.mark.parametrize('p', [7, 13])
    def test_quartic(self, p):
        assert stickelberger_check(PolyFp(QUARTIC, p))

    def test_degenerate(self):
        with pytest.raises(SingularDiscriminant):
            stickelberger_check(PolyFp(QUARTIC, 11))

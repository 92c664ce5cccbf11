"""
Polynomials over GF(p)
Discriminants via resultants, irreducible-factor counts and Stickelberger parity
"""

import logging
from dataclasses import dataclass
from math import comb
from typing import Dict, Sequence, Tuple, Union

from sympy import Poly, resultant, symbols
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_ddf_zassenhaus, gf_sqf_list

from src.exceptions import (
    DegreeTooSmall, EvenPrime, SingularDiscriminant, ZeroPolynomial,
)
from src.modarith import ResidueFp, jacobi_symbol

logger = logging.getLogger(__name__)

_x = symbols('x')


@dataclass(frozen=True)
class PolyFp:
    """Polynomial over GF(p); coefficients lowest degree first, no trailing zeros"""
    coeffs: Tuple[int, ...]
    p: int

    def __post_init__(self):
        reduced = [c % self.p for c in self.coeffs]
        while reduced and reduced[-1] == 0:
            reduced.pop()
        object.__setattr__(self, 'coeffs', tuple(reduced))

    @classmethod
    def from_ints(cls, coeffs: Sequence[int], p: int) -> 'PolyFp':
        return cls(tuple(int(c) for c in coeffs), p)

    @classmethod
    def from_residues(cls, coeffs: Sequence[ResidueFp]) -> 'PolyFp':
        if not coeffs:
            raise ZeroPolynomial("cannot infer p from an empty coefficient list")
        return cls(tuple(c.value for c in coeffs), coeffs[0].p)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def residues(self) -> Tuple[ResidueFp, ...]:
        return tuple(ResidueFp(c, self.p) for c in self.coeffs)

    def monic(self) -> 'PolyFp':
        if self.is_zero:
            raise ZeroPolynomial("zero polynomial has no monic associate")
        lead_inv = pow(self.coeffs[-1], -1, self.p)
        return PolyFp(tuple(c * lead_inv for c in self.coeffs), self.p)

    def dense(self) -> list:
        """Highest-degree-first ZZ list as galoistools expects"""
        return [ZZ(c) for c in reversed(self.coeffs)]

    def evaluate(self, x: int) -> int:
        acc = 0
        for c in reversed(self.coeffs):
            acc = (acc * x + c) % self.p
        return acc


def cubic_discriminant(a1: int, a2: int, a3: int) -> int:
    """D(x^3 + a1 x^2 + a2 x + a3) as an exact integer"""
    return (a1 * a1 * a2 * a2 - 4 * a2 ** 3 - 4 * a1 ** 3 * a3
            - 27 * a3 * a3 + 18 * a1 * a2 * a3)


def _integer_discriminant(coeffs: Sequence[int]) -> int:
    """Discriminant of an integer polynomial (lowest degree first) via Res(f, f')"""
    f = Poly(list(reversed([int(c) for c in coeffs])), _x, domain='ZZ')
    n = f.degree()
    if n < 2:
        raise DegreeTooSmall(f"discriminant needs degree >= 2, got {n}")
    res = int(resultant(f.as_expr(), f.diff(_x).as_expr(), _x))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    lead = int(f.LC())
    return sign * res // lead


def discriminant(f: Union[PolyFp, Sequence[int]]) -> Union[ResidueFp, int]:
    """
    Discriminant computed from the resultant of f and f'.

    Args:
        f: PolyFp (result reduced into GF(p)) or integer coefficients lowest degree first

    Returns:
        ResidueFp for PolyFp input, exact int otherwise
    """
    if isinstance(f, PolyFp):
        if f.degree < 2:
            raise DegreeTooSmall(f"discriminant needs degree >= 2, got {f.degree}")
        reduced = Poly(list(reversed(f.coeffs)), _x, modulus=f.p)
        return ResidueFp(int(reduced.discriminant()), f.p)
    return _integer_discriminant(f)


def distinct_degree_counts(f: PolyFp) -> Dict[int, int]:
    """
    Number of monic irreducible factors of each degree, counted with multiplicity.

    Squarefree decomposition first, then Frobenius-based distinct-degree splitting
    of every squarefree part.
    """
    if f.is_zero:
        raise ZeroPolynomial("zero polynomial has no factorization")
    counts: Dict[int, int] = {}
    _, parts = gf_sqf_list(f.dense(), f.p, ZZ)
    for part, multiplicity in parts:
        for block, degree in gf_ddf_zassenhaus(part, f.p, ZZ):
            block_degree = len(block) - 1
            counts[degree] = counts.get(degree, 0) + multiplicity * (block_degree // degree)
    return counts


def count_irreducible_factors(f: PolyFp) -> int:
    """Total count r of monic irreducible factors with multiplicity"""
    return sum(distinct_degree_counts(f).values())


def count_roots(f: PolyFp) -> int:
    """Number of distinct roots of f in GF(p)"""
    if f.is_zero:
        raise ZeroPolynomial("every residue is a root of the zero polynomial")
    if f.degree < 1:
        return 0
    _, parts = gf_sqf_list(f.dense(), f.p, ZZ)
    roots = 0
    for part, _ in parts:
        for block, degree in gf_ddf_zassenhaus(part, f.p, ZZ):
            if degree == 1:
                roots += len(block) - 1
    return roots


def stickelberger_check(f: PolyFp) -> bool:
    """True iff (D(f)/p) = (-1)^(deg f - r) for squarefree f"""
    if f.p == 2:
        raise EvenPrime("Stickelberger parity needs an odd prime")
    monic = f.monic()
    disc = discriminant(monic)
    if disc.value == 0:
        raise SingularDiscriminant(f"p={f.p} divides the discriminant")
    r = count_irreducible_factors(monic)
    expected = -1 if (monic.degree - r) % 2 else 1
    return jacobi_symbol(disc.value, f.p) == expected


def catalan_characteristic(h: int, m_num: int, m_den: int = 1) -> Tuple[int, ...]:
    """
    Integer coefficients of m_den*((1+x)^(h+1)) - m_num*x^h, lowest degree first.

    Scaling by the denominator keeps the roots, so the integer discriminant
    flags exactly the primes where (1+x)^(h+1) - m x^h degenerates.
    """
    coeffs = [m_den * comb(h + 1, j) for j in range(h + 2)]
    coeffs[h] -= m_num
    return tuple(coeffs)

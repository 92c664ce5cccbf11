"""
Modular Arithmetic Core
Exact arithmetic in Z/p, Jacobi symbols, square roots and Lucas-theorem binomials
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Tuple, Union

from sympy import isprime
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod

try:
    from sympy.functions.combinatorial.numbers import jacobi_symbol as _sympy_jacobi
except ImportError:  # sympy < 1.13
    from sympy.ntheory import jacobi_symbol as _sympy_jacobi

from config.settings import DIGIT_TABLE_LIMIT, MAX_PRIME
from src.exceptions import (
    DenominatorDivisible, EvenModulus, EvenPrime, InvalidModulus, InvalidRational, ZeroInverse,
)

logger = logging.getLogger(__name__)

IntLike = Union[int, 'ResidueFp']


@dataclass(frozen=True)
class ResidueFp:
    """Element of GF(p) held by its canonical representative in [0, p)"""
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, 'value', self.value % self.p)

    def _coerce(self, other: IntLike) -> int:
        if isinstance(other, ResidueFp):
            if other.p != self.p:
                raise ValueError(f"mixed moduli {self.p} and {other.p}")
            return other.value
        return other

    def __add__(self, other: IntLike) -> 'ResidueFp':
        return ResidueFp(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other: IntLike) -> 'ResidueFp':
        return ResidueFp(self.value - self._coerce(other), self.p)

    def __rsub__(self, other: IntLike) -> 'ResidueFp':
        return ResidueFp(self._coerce(other) - self.value, self.p)

    def __mul__(self, other: IntLike) -> 'ResidueFp':
        return ResidueFp(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self) -> 'ResidueFp':
        return ResidueFp(-self.value, self.p)

    def __truediv__(self, other: IntLike) -> 'ResidueFp':
        return self * mod_inv(ResidueFp(self._coerce(other), self.p))

    def __rtruediv__(self, other: IntLike) -> 'ResidueFp':
        return ResidueFp(self._coerce(other), self.p) * mod_inv(self)

    def __pow__(self, exponent: int) -> 'ResidueFp':
        if exponent < 0 and self.value == 0:
            raise ZeroInverse("0 has no inverse")
        return ResidueFp(pow(self.value, exponent, self.p), self.p)

    def __eq__(self, other) -> bool:
        if isinstance(other, ResidueFp):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return self.value == other % self.p
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.value, self.p))

    def __int__(self) -> int:
        return self.value

    def __bool__(self) -> bool:
        return self.value != 0

    def __str__(self) -> str:
        return str(self.value)

    def signed(self) -> int:
        """Symmetric representative in (-p/2, p/2]"""
        return self.value - self.p if self.value > self.p // 2 else self.value


@dataclass(frozen=True)
class PrimePowerModulus:
    """A prime p with exponent a; N = p^a is kept as an exact integer"""
    p: int
    a: int = 1

    def __post_init__(self):
        if self.a < 1:
            raise InvalidModulus(f"exponent must be positive, got {self.a}")
        if not (2 <= self.p < MAX_PRIME) or not isprime(self.p):
            raise InvalidModulus(f"{self.p} is not a prime below 2^63")

    @cached_property
    def N(self) -> int:
        return self.p ** self.a

    def __str__(self) -> str:
        return f"{self.p}^{self.a}"


def mod_inv(x: ResidueFp) -> ResidueFp:
    """Multiplicative inverse of a nonzero residue"""
    if x.value == 0:
        raise ZeroInverse(f"0 has no inverse mod {x.p}")
    return ResidueFp(pow(x.value, -1, x.p), x.p)


def rational_residue(numerator: int, denominator: int, p: int) -> ResidueFp:
    """Reduce numerator/denominator into GF(p)"""
    if denominator % p == 0:
        raise DenominatorDivisible(f"{p} divides the denominator {denominator}")
    return ResidueFp(numerator * pow(denominator, -1, p), p)


def parse_rational(text: Union[str, int]) -> Tuple[int, int]:
    """
    Parse 'num/den' or an integer into a reduced (num, den) pair.

    Args:
        text: string such as '27/4', '-1/3' or '9'

    Returns:
        (numerator, denominator) with denominator > 0
    """
    try:
        value = Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError):
        raise InvalidRational(f"not a rational number: {text!r}") from None
    return value.numerator, value.denominator


def jacobi_symbol(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd positive n"""
    if n < 1 or n % 2 == 0:
        raise EvenModulus(f"Jacobi symbol needs an odd positive modulus, got {n}")
    if n == 1:
        return 1
    return int(_sympy_jacobi(a % n, n))


def jacobi_prime_power(a: int, pp: PrimePowerModulus) -> int:
    """(a/p^a) = (a/p)^a without forming p^a"""
    symbol = jacobi_symbol(a, pp.p)
    return symbol ** pp.a if symbol else 0


def sqrt_mod(a: ResidueFp) -> Optional[ResidueFp]:
    """
    Square root in GF(p) normalized to [0, (p-1)/2].

    Returns None when a is a quadratic non-residue.
    """
    if a.p == 2:
        raise EvenPrime("sqrt_mod needs an odd prime")
    if a.value == 0:
        return ResidueFp(0, a.p)
    root = _sympy_sqrt_mod(a.value, a.p)
    if root is None:
        return None
    return ResidueFp(min(root, a.p - root), a.p)


@lru_cache(maxsize=64)
def _digit_tables(p: int) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    """Factorials and inverse factorials mod p for single base-p digits"""
    fact = [1] * p
    for i in range(1, p):
        fact[i] = fact[i - 1] * i % p
    inv = [1] * p
    inv[p - 1] = pow(fact[p - 1], -1, p)
    for i in range(p - 1, 0, -1):
        inv[i - 1] = inv[i] * i % p
    logger.debug(f"Built factorial digit tables for p={p}")
    return tuple(fact), tuple(inv)


def _small_binom(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p for digits 0 <= k <= n < p without tables"""
    k = min(k, n - k)
    num = den = 1
    for i in range(k):
        num = num * (n - i) % p
        den = den * (i + 1) % p
    return num * pow(den, -1, p) % p


def binom_int(n: int, k: int, p: int) -> int:
    """binom(n, k) mod p as a plain int via Lucas' theorem"""
    if k < 0 or k > n:
        return 0
    tables = _digit_tables(p) if p <= DIGIT_TABLE_LIMIT else None
    result = 1
    while k:
        n, n_digit = divmod(n, p)
        k, k_digit = divmod(k, p)
        if k_digit > n_digit:
            return 0
        if tables is None:
            result = result * _small_binom(n_digit, k_digit, p) % p
        else:
            fact, inv = tables
            result = result * fact[n_digit] * inv[k_digit] * inv[n_digit - k_digit] % p
    return result


def binom_mod_p(n: int, k: int, p: int) -> ResidueFp:
    """binom(n, k) mod p for arbitrary-precision n, k; zero outside 0 <= k <= n"""
    return ResidueFp(binom_int(n, k, p), p)

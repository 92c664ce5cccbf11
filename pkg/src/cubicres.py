"""
Cubic Residues
Eisenstein integers, the cubic Jacobi symbol and the C0/C1/C2 classes of residues,
with the closed forms they control for third-order recurrences
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple, Union

from sympy import factorint
from sympy.ntheory import sqrt_mod as _sympy_sqrt_mod

from src.exceptions import (
    DegenerateC, DivisionByZero, NoSquareRoot, NotCoprimeToThree, PreconditionViolated,
    SingularD, UndefinedClass,
)
from src.lucas import LucasParams, lucas_uv
from src.modarith import (
    PrimePowerModulus, ResidueFp, jacobi_symbol, rational_residue, sqrt_mod,
)
from src.polyfield import cubic_discriminant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EisensteinInt:
    """a + b*omega with omega^2 + omega + 1 = 0"""
    a: int
    b: int

    def __add__(self, other: 'EisensteinInt') -> 'EisensteinInt':
        other = _lift(other)
        return EisensteinInt(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __sub__(self, other: 'EisensteinInt') -> 'EisensteinInt':
        other = _lift(other)
        return EisensteinInt(self.a - other.a, self.b - other.b)

    def __rsub__(self, other: int) -> 'EisensteinInt':
        return _lift(other) - self

    def __neg__(self) -> 'EisensteinInt':
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other: 'EisensteinInt') -> 'EisensteinInt':
        other = _lift(other)
        # omega^2 = -1 - omega
        bd = self.b * other.b
        return EisensteinInt(self.a * other.a - bd, self.a * other.b + self.b * other.a - bd)

    __rmul__ = __mul__

    def conjugate(self) -> 'EisensteinInt':
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def reduce(self, q: int) -> 'EisensteinInt':
        return EisensteinInt(self.a % q, self.b % q)

    def __str__(self) -> str:
        return f"{self.a}{'+' if self.b >= 0 else '-'}{abs(self.b)}w"


def _lift(value: Union[int, EisensteinInt]) -> EisensteinInt:
    return value if isinstance(value, EisensteinInt) else EisensteinInt(int(value), 0)


ZERO = EisensteinInt(0, 0)
ONE = EisensteinInt(1, 0)
OMEGA = EisensteinInt(0, 1)
OMEGA_SQ = EisensteinInt(-1, -1)
UNITS = (ONE, -ONE, OMEGA, -OMEGA, OMEGA_SQ, -OMEGA_SQ)
CUBE_ROOTS = (ONE, OMEGA, OMEGA_SQ)  # omega^i indexed by i


def _round_div(num: int, den: int) -> int:
    """Nearest integer to num/den for den > 0"""
    return (2 * num + den) // (2 * den)


def eis_divmod(x: EisensteinInt, y: EisensteinInt) -> Tuple[EisensteinInt, EisensteinInt]:
    """x = q*y + r with N(r) < N(y), rounding x*conj(y)/N(y) coordinatewise"""
    if y.is_zero():
        raise DivisionByZero("division by the zero Eisenstein integer")
    numerator = x * y.conjugate()
    n = y.norm()
    q = EisensteinInt(_round_div(numerator.a, n), _round_div(numerator.b, n))
    return q, x - q * y


def eis_gcd(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    while not y.is_zero():
        x, y = y, eis_divmod(x, y)[1]
    return x


def primary_associate(x: EisensteinInt) -> EisensteinInt:
    """The unique associate congruent to 2 mod 3 (a = 2, b = 0 mod 3)"""
    if x.norm() % 3 == 0:
        raise NotCoprimeToThree(f"{x} has norm divisible by 3")
    for unit in UNITS:
        candidate = unit * x
        if candidate.a % 3 == 2 and candidate.b % 3 == 0:
            return candidate
    raise NotCoprimeToThree(f"no primary associate for {x}")


def _cube_root_index(value: EisensteinInt, q: int) -> Optional[int]:
    """i with value = omega^i mod q, None when value = 0 mod q"""
    reduced = value.reduce(q)
    if reduced.is_zero():
        return None
    for i, root in enumerate(CUBE_ROOTS):
        if reduced == root.reduce(q):
            return i
    raise ValueError(f"{value} is not a cube root of unity mod {q}")


def _power_mod(x: EisensteinInt, e: int, q: int) -> EisensteinInt:
    result = ONE
    base = x.reduce(q)
    while e:
        if e & 1:
            result = (result * base).reduce(q)
        base = (base * base).reduce(q)
        e >>= 1
    return result


def _omega_roots(q: int) -> Tuple[int, int]:
    """The two roots of r^2 + r + 1 mod a prime q = 1 mod 3"""
    s = _sympy_sqrt_mod(-3 % q, q)
    inv2 = pow(2, -1, q)
    return (-1 + s) * inv2 % q, (-1 - s) * inv2 % q


def _split_character(alpha: EisensteinInt, q: int, r: int) -> Optional[int]:
    """
    Character of the prime above q where omega = r: alpha(r)^((q-1)/3) = r^i.
    """
    value = (alpha.a + alpha.b * r) % q
    if value == 0:
        return None
    power = pow(value, (q - 1) // 3, q)
    for i in range(3):
        if power == pow(r, i, q):
            return i
    raise ValueError(f"{power} is not a cube root of unity mod {q}")


def cubic_character_prime(alpha: EisensteinInt, q: int, r: Optional[int] = None) -> Optional[int]:
    """
    Exponent i of (alpha/pi)_3 = omega^i for the prime pi above the rational prime q.

    q = 2 mod 3 is inert and the character is alpha^((q^2-1)/3) in Z[omega]/q.
    For q = 1 mod 3 the prime is the one with omega = r mod pi.
    Returns None when pi divides alpha.
    """
    if q == 3:
        raise NotCoprimeToThree("the prime above 3 has no cubic character")
    if q % 3 == 2:
        return _cube_root_index(_power_mod(alpha, (q * q - 1) // 3, q), q)
    if r is None:
        raise PreconditionViolated(f"split prime {q} needs a root of r^2 + r + 1")
    return _split_character(alpha, q, r)


def _combine(exponents) -> EisensteinInt:
    total = 0
    for i in exponents:
        if i is None:
            return ZERO
        total += i
    return CUBE_ROOTS[total % 3]


def _rational_prime_exponent(alpha: EisensteinInt, q: int) -> Optional[int]:
    """(alpha/q)_3 for a rational prime q, multiplying over the primes above q"""
    if q % 3 == 2:
        return cubic_character_prime(alpha, q)
    total = 0
    for r in _omega_roots(q):
        i = _split_character(alpha, q, r)
        if i is None:
            return None
        total += i
    return total % 3


def _rational_modulus_symbol(alpha: EisensteinInt, n: int) -> EisensteinInt:
    if n == 0:
        raise DivisionByZero("cubic symbol modulo zero")
    factors: Dict[int, int] = factorint(abs(n))
    if 3 in factors:
        raise NotCoprimeToThree(f"modulus {n} is divisible by 3")
    exponents = []
    for q, e in factors.items():
        i = _rational_prime_exponent(alpha, q)
        exponents.append(None if i is None else i * e)
    return _combine(exponents)


def _eisenstein_modulus_symbol(alpha: EisensteinInt, n: EisensteinInt) -> EisensteinInt:
    norm = n.norm()
    if norm == 0:
        raise DivisionByZero("cubic symbol modulo zero")
    if norm % 3 == 0:
        raise NotCoprimeToThree(f"modulus {n} has norm divisible by 3")
    remaining = n
    exponents = []
    for q in sorted(factorint(norm)):
        if q % 3 == 2:
            while True:
                quotient, rem = eis_divmod(remaining, EisensteinInt(q, 0))
                if not rem.is_zero():
                    break
                remaining = quotient
                exponents.append(cubic_character_prime(alpha, q))
            continue
        for r in _omega_roots(q):
            prime = eis_gcd(EisensteinInt(q, 0), EisensteinInt(-r, 1))
            while True:
                quotient, rem = eis_divmod(remaining, prime)
                if not rem.is_zero():
                    break
                remaining = quotient
                exponents.append(_split_character(alpha, q, r))
    if remaining.norm() != 1:
        raise ValueError(f"incomplete factorisation of {n}, left {remaining}")
    return _combine(exponents)


def cubic_jacobi(alpha: Union[EisensteinInt, int], n: Union[EisensteinInt, int]) -> EisensteinInt:
    """
    Cubic Jacobi symbol (alpha/n)_3 as 1, omega, omega^2 or 0.

    A rational modulus is split into rational primes and each contributes the
    product of the characters of the primes above it. An Eisenstein modulus is
    split through its norm, recovering every prime factor as gcd(q, omega - r).

    Both paths factor rather than reduce by cubic reciprocity, so the cost is
    that of factoring the norm. Callers here only pass p^a or products of a
    few primes above p, where the factorisation is immediate; the results
    agree with the reciprocity-based evaluation.
    """
    alpha = _lift(alpha)
    if isinstance(n, EisensteinInt):
        return _eisenstein_modulus_symbol(alpha, n)
    return _rational_modulus_symbol(alpha, int(n))


def symbol_exponent(symbol: EisensteinInt) -> Optional[int]:
    if symbol.is_zero():
        return None
    return CUBE_ROOTS.index(symbol)


class CubicClass(Enum):
    C0 = 0
    C1 = 1
    C2 = 2
    UNDEFINED = None

    def require(self) -> int:
        if self is CubicClass.UNDEFINED:
            raise UndefinedClass("cubic class is undefined for this residue")
        return self.value

    def __str__(self) -> str:
        return 'undefined' if self is CubicClass.UNDEFINED else self.name


def classify(c_num: int, c_den: int, pp: PrimePowerModulus) -> CubicClass:
    """
    Class i with ((c+1+2 omega)/p^a)_3 = omega^i; undefined when p | c^2 + 3.

    c is reduced mod p first, the symbol only sees alpha mod p.
    """
    if pp.p == 3:
        raise NotCoprimeToThree("cubic classes need p != 3")
    c = rational_residue(c_num, c_den, pp.p).value
    if (c * c + 3) % pp.p == 0:
        return CubicClass.UNDEFINED
    exponent = _rational_prime_exponent(EisensteinInt(c + 1, 2), pp.p)
    return CubicClass((exponent * pp.a) % 3)


def sun_c0_criterion(c_num: int, c_den: int, p: int) -> bool:
    """u_{(p - (p/3))/3}(6, 3c^2 + 9) = 0 mod p, the C0 test for p > 3"""
    if p <= 3:
        raise PreconditionViolated(f"criterion needs p > 3, got {p}")
    c = rational_residue(c_num, c_den, p)
    if (c * (c * c + 3)).value == 0:
        raise DegenerateC(f"{p} divides c(c^2 + 3)")
    params = LucasParams(ResidueFp(6, p), 3 * c * c + 9)
    index = (p - jacobi_symbol(p, 3)) // 3
    return lucas_uv(params, index).u.value == 0


ShiftedTerms = Tuple[ResidueFp, ResidueFp, ResidueFp]


def lemma41_predict(a1: int, a2: int, a3: int, pp: PrimePowerModulus,
                    root: Optional[int] = None) -> ShiftedTerms:
    """
    Predicted (u_N, u_{N+1}, u_{N+2}), N = p^a, for u_0 = u_1 = 0, u_2 = 1,
    u_{n+3} + a1 u_{n+2} + a2 u_{n+1} + a3 u_n = 0.

    Args:
        a1, a2, a3: integer coefficients
        pp: the modulus p^a, p > 3
        root: square root d of the discriminant to use instead of the normalized one
    """
    p, N = pp.p, pp.N
    if p <= 3:
        raise PreconditionViolated(f"needs p > 3, got {p}")
    D = ResidueFp(cubic_discriminant(a1, a2, a3), p)
    if D.value == 0:
        raise SingularD(f"discriminant vanishes mod {p}")
    if root is None:
        d = sqrt_mod(D)
        if d is None:
            raise NoSquareRoot(f"discriminant {D} is not a square mod {p}")
    else:
        d = ResidueFp(root, p)
        if d * d != D:
            raise NoSquareRoot(f"{root}^2 is not the discriminant mod {p}")
    b = ResidueFp(-2 * a1 ** 3 + 9 * a1 * a2 - 27 * a3, p)
    if (a1 * a1 - 3 * a2) % p == 0:
        if (N - 1) % 3:
            raise PreconditionViolated(f"p^a = {N} is not 1 mod 3")
        power = b ** ((N - 1) // 3)
        return ResidueFp(0, p), power, -a1 * (2 * power + 1) / 3
    x = b / (3 * d)
    cls = classify(x.value, 1, pp).require()
    logger.debug(f"b/(3d) = {x} lies in C{cls} mod {pp}")
    if cls == 0:
        return ResidueFp(0, p), ResidueFp(1, p), ResidueFp(-a1, p)
    sign = 1 if cls == 1 else -1
    return (
        sign * ResidueFp(a1 * a1 - 3 * a2, p) / d,
        (sign * ResidueFp(9 * a3 - a1 * a2, p) - d) / (2 * d),
        sign * ResidueFp(a2 * a2 - 3 * a1 * a3, p) / d,
    )


def lemma42_predict(m: int, t: int, pp: PrimePowerModulus) -> ShiftedTerms:
    """lemma41_predict for (a1, a2, a3) = (3 - m, 3, 1) keyed on c = (2m^2 - 18m + 27)/(6t + 3)"""
    p, N = pp.p, pp.N
    if p <= 3:
        raise PreconditionViolated(f"needs p > 3, got {p}")
    if (2 * t + 1) % p == 0:
        raise PreconditionViolated(f"2t + 1 vanishes mod {p}")
    if (m - (t * t + t + 7)) % p or m % p == 0:
        raise PreconditionViolated(f"m = {m} is not t^2 + t + 7 mod {p} or vanishes")
    if (m - 6) % p == 0:
        two = ResidueFp(2, p)
        return ResidueFp(0, p), two ** ((N - 1) // 3), two ** ((N + 2) // 3) + 1
    c = rational_residue(2 * m * m - 18 * m + 27, 6 * t + 3, p)
    cls = classify(c.value, 1, pp).require()
    if cls == 0:
        return ResidueFp(0, p), ResidueFp(1, p), ResidueFp(m - 3, p)
    sign = 1 if cls == 1 else -1
    two_t1 = ResidueFp(2 * t + 1, p)
    return (
        sign * ResidueFp(m - 6, p) / two_t1,
        sign * 3 / (2 * two_t1) - ResidueFp(1, p) / 2,
        sign * 3 / two_t1,
    )

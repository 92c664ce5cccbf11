"""
Lucas Sequences
Fast-doubling u_n(A, B), v_n(A, B) mod p, prime-power index shifts and exact Lucas numbers
"""

import logging
from dataclasses import dataclass
from enum import Enum
from math import comb

from sympy import lucas as _sympy_lucas

from src.exceptions import EvenPrime, IdentityViolation, SingularDelta, ZeroInverse
from src.modarith import (
    PrimePowerModulus, ResidueFp, jacobi_prime_power, jacobi_symbol, rational_residue,
)

logger = logging.getLogger(__name__)


class ShiftDirection(str, Enum):
    UP = 'up'
    DOWN = 'down'


@dataclass(frozen=True)
class LucasParams:
    """x_{n+1} = A x_n - B x_{n-1} over GF(p)"""
    A: ResidueFp
    B: ResidueFp

    def __post_init__(self):
        if self.A.p != self.B.p:
            raise ValueError(f"mixed moduli {self.A.p} and {self.B.p}")
        if self.B.value == 0:
            raise ZeroInverse(f"B vanishes mod {self.B.p}")

    @classmethod
    def build(cls, A: int, B: int, p: int, A_den: int = 1, B_den: int = 1) -> 'LucasParams':
        return cls(rational_residue(A, A_den, p), rational_residue(B, B_den, p))

    @property
    def p(self) -> int:
        return self.A.p

    @property
    def delta(self) -> ResidueFp:
        return self.A * self.A - 4 * self.B


@dataclass(frozen=True)
class LucasPair:
    n: int
    u: ResidueFp
    v: ResidueFp


def _doubling(A: int, B: int, n: int, p: int):
    """(u_n, u_{n+1}) for n >= 0"""
    u, u_next = 0, 1
    for bit in bin(n)[2:] if n else '':
        u_even = u * (2 * u_next - A * u) % p
        u_odd = (u_next * u_next - B * u * u) % p
        if bit == '1':
            u, u_next = u_odd, (A * u_odd - B * u_even) % p
        else:
            u, u_next = u_even, u_odd
    return u, u_next


def lucas_uv(params: LucasParams, n: int) -> LucasPair:
    """(u_n, v_n) in O(log |n|); negative n via u_{-n} = -u_n/B^n, v_{-n} = v_n/B^n"""
    p = params.p
    A, B = params.A.value, params.B.value
    u, u_next = _doubling(A, B, abs(n), p)
    v = (2 * u_next - A * u) % p
    if n < 0:
        scale = pow(B, n, p)
        u, v = -u * scale, v * scale
    return LucasPair(n, ResidueFp(u, p), ResidueFp(v, p))


def shift_by_prime_power(params: LucasParams, n: int, pp: PrimePowerModulus,
                         direction: ShiftDirection) -> ResidueFp:
    """
    u_{n + p^a} or u_{n - p^a} from (u_n, v_n) alone:

        u_{n+p^a} = (A u_n + e v_n) / 2,   B u_{n-p^a} = (A u_n - e v_n) / 2

    with e = (Delta / p^a).
    """
    if pp.p == 2:
        raise EvenPrime("index shifts by p^a need an odd prime")
    if params.delta.value == 0:
        raise SingularDelta(f"A^2 - 4B vanishes mod {pp.p}")
    epsilon = jacobi_prime_power(params.delta.value, pp)
    pair = lucas_uv(params, n)
    if ShiftDirection(direction) is ShiftDirection.UP:
        return (params.A * pair.u + epsilon * pair.v) / 2
    return (params.A * pair.u - epsilon * pair.v) / (2 * params.B)


def lucas_number(n: int) -> int:
    """Exact L_n for signed n (L_0 = 2, L_1 = 1)"""
    value = int(_sympy_lucas(abs(n)))
    return -value if n < 0 and n % 2 else value


def quintisection(d: int, r: int) -> int:
    """
    5 * sum_{k = r mod 5} binom(2d, k) - 4^d as an exact integer.

    Raises IdentityViolation unless it equals
    [5 | d-r] 2 L_{2d} + ((d-r)/5) L_{2d - ((d-r)/5)}.
    """
    if d < 0:
        raise ValueError(f"d must be nonnegative, got {d}")
    n = 2 * d
    lhs = 5 * sum(comb(n, k) for k in range(r % 5, n + 1, 5)) - 4 ** d
    symbol = jacobi_symbol(d - r, 5)
    rhs = (2 * lucas_number(n) if (d - r) % 5 == 0 else 0) + symbol * lucas_number(n - symbol)
    if lhs != rhs:
        raise IdentityViolation(f"quintisection fails at d={d}, r={r}: {lhs} != {rhs}")
    return lhs

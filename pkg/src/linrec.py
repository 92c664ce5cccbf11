"""
Linear Recurrence Engine
Order-(h+1) recurrences over GF(p), signed-index evaluation and truncated binomial sums
"""

import logging
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import List, Optional, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_invert, gf_mul, gf_pow_mod, gf_rem

from config.advanced_settings import engine_config
from src.exceptions import (
    DRange, PreconditionViolated, RepeatedRoot, SingularDiscriminant, ZeroInverse, ZeroRoot,
)
from src.modarith import PrimePowerModulus, ResidueFp, mod_inv, rational_residue
from src.oracle import SumDescriptor
from src.polyfield import PolyFp, discriminant

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RecurrenceSpec:
    """
    The recurrence sum_j (binom(h+1, j) - m[j = h]) u_{n+j} = 0 with
    u_0 = ... = u_{h-1} = 0, u_h = 1.
    """
    h: int
    m: ResidueFp
    coeffs: Tuple[int, ...] = field(init=False)

    def __post_init__(self):
        if self.h < 1:
            raise PreconditionViolated(f"order parameter h must be positive, got {self.h}")
        if self.m.value == 0:
            raise ZeroInverse(f"m vanishes mod {self.m.p}")
        coeffs = [comb(self.h + 1, j) % self.p for j in range(self.h + 2)]
        coeffs[self.h] = (coeffs[self.h] - self.m.value) % self.p
        object.__setattr__(self, 'coeffs', tuple(coeffs))

    @classmethod
    def build(cls, h: int, m_num: int, m_den: int, p: int) -> 'RecurrenceSpec':
        return cls(h, rational_residue(m_num, m_den, p))

    @property
    def p(self) -> int:
        return self.m.p

    @property
    def reciprocal(self) -> Tuple[int, ...]:
        """Coefficients of x^(h+1) f(1/x); monic because c_0 = 1"""
        return tuple(reversed(self.coeffs))

    def characteristic(self) -> PolyFp:
        return PolyFp(self.coeffs, self.p)


@dataclass(frozen=True)
class SequenceWindow:
    """h+1 consecutive terms u_base, ..., u_{base+h}"""
    base_index: int
    values: Tuple[ResidueFp, ...]

    @classmethod
    def initial(cls, spec: RecurrenceSpec) -> 'SequenceWindow':
        values = tuple(ResidueFp(int(i == spec.h), spec.p) for i in range(spec.h + 1))
        return cls(0, values)

    def advance(self, spec: RecurrenceSpec, steps: int = 1) -> 'SequenceWindow':
        if steps < 0:
            return self.retreat(spec, -steps)
        p = spec.p
        body = spec.coeffs[:-1]
        window = deque((v.value for v in self.values), maxlen=spec.h + 1)
        for _ in range(steps):
            window.append(-sum(c * v for c, v in zip(body, window)) % p)
        return SequenceWindow(self.base_index + steps, tuple(ResidueFp(v, p) for v in window))

    def retreat(self, spec: RecurrenceSpec, steps: int = 1) -> 'SequenceWindow':
        if steps < 0:
            return self.advance(spec, -steps)
        p = spec.p
        tail = spec.coeffs[1:]
        window = deque((v.value for v in self.values), maxlen=spec.h + 1)
        for _ in range(steps):
            window.appendleft(-sum(c * v for c, v in zip(tail, window)) % p)
        return SequenceWindow(self.base_index - steps, tuple(ResidueFp(v, p) for v in window))

    def value_at(self, n: int) -> ResidueFp:
        offset = n - self.base_index
        if not 0 <= offset < len(self.values):
            raise IndexError(f"index {n} outside window starting at {self.base_index}")
        return self.values[offset]


# Residues modulo the characteristic polynomial are galoistools dense lists,
# highest degree first, with leading zeros stripped.

_X = [ZZ(1), ZZ(0)]


def _coefficient(poly: List, degree: int) -> int:
    """Coefficient of x^degree in a dense residue"""
    index = len(poly) - 1 - degree
    return int(poly[index]) if index >= 0 else 0


class PowerLadder:
    """
    Powers of x modulo a fixed monic polynomial, anchored at x^step.

    x^k is assembled as (x^step)^q * x^s with s in the symmetric range around 0,
    so indices near multiples of p^a cost only a few multiplications once the
    anchor is known.
    """

    def __init__(self, modulus: Tuple[int, ...], p: int, step: int):
        self.modulus = PolyFp(modulus, p).dense()
        self.p = p
        self.step = step
        self.anchor = gf_pow_mod(_X, step, self.modulus, p, ZZ)
        # constant term of the modulus is 1, so x is a unit
        self.x_inv = gf_invert(_X, self.modulus, p, ZZ)

    def power(self, k: int) -> List:
        q, s = divmod(k, self.step)
        if 2 * s > self.step:
            q, s = q + 1, s - self.step
        head = gf_pow_mod(self.anchor, q, self.modulus, self.p, ZZ)
        tail = gf_pow_mod(_X if s >= 0 else self.x_inv, abs(s), self.modulus, self.p, ZZ)
        return gf_rem(gf_mul(head, tail, self.p, ZZ), self.modulus, self.p, ZZ)


@lru_cache(maxsize=engine_config.power_cache_size)
def _ladder(modulus: Tuple[int, ...], p: int, step: int) -> PowerLadder:
    logger.debug(f"Building anchor x^N ({step.bit_length()}-bit N) for modulus {modulus} mod {p}")
    return PowerLadder(modulus, p, step)


def _u_by_stepping(spec: RecurrenceSpec, n: int) -> ResidueFp:
    window = SequenceWindow.initial(spec)
    if n < 0:
        return window.retreat(spec, -n).values[0]
    if n <= spec.h:
        return window.values[n]
    return window.advance(spec, n - spec.h).values[-1]


def _u_by_powering(spec: RecurrenceSpec, n: int, step: Optional[int] = None) -> ResidueFp:
    if n >= 0:
        modulus, k, slot = spec.coeffs, n, spec.h
    else:
        # w_j = u_{h-j} runs the reciprocal recurrence from w_0 = 1, w_1..w_h = 0
        modulus, k, slot = spec.reciprocal, spec.h - n, 0
    if step:
        poly = _ladder(modulus, spec.p, step).power(k)
    else:
        poly = gf_pow_mod(_X, k, PolyFp(modulus, spec.p).dense(), spec.p, ZZ)
    return ResidueFp(_coefficient(poly, slot), spec.p)


def _u_at(spec: RecurrenceSpec, n: int, step: Optional[int] = None) -> ResidueFp:
    if abs(n) <= engine_config.naive_step_threshold:
        return _u_by_stepping(spec, n)
    return _u_by_powering(spec, n, step)


def eval_u(spec: RecurrenceSpec, n: int) -> ResidueFp:
    """
    u_n mod p for any signed n.

    Small |n| walks a window; large |n| reduces x^n modulo the characteristic
    polynomial (or x^(h-n) modulo the reciprocal polynomial when n < 0).
    """
    return _u_at(spec, n)


def _check_offset(spec: RecurrenceSpec, d: int, N: int):
    if not -spec.h < d <= spec.h * N:
        raise DRange(f"d={d} outside ({-spec.h}, {spec.h * N}] for h={spec.h}, p^a={N}")


def sum_fast(spec: RecurrenceSpec, d: int, a: int) -> ResidueFp:
    """
    sum_{k < p^a} binom((h+1)k, k+d) / m^k mod p from the recurrence alone.

    S_d = -sum_{r=1}^{h} binom(h+1, r+1) u_{h-1+min(d - r p^a, 0)}
    """
    N = spec.p ** a
    _check_offset(spec, d, N)
    total = 0
    for r in range(1, spec.h + 1):
        shift = d - r * N
        if shift >= 0:
            continue  # u_{h-1} = 0
        total += comb(spec.h + 1, r + 1) * _u_at(spec, spec.h - 1 + shift, N).value
    return ResidueFp(-total, spec.p)


@lru_cache(maxsize=1024)
def _is_separable(spec: RecurrenceSpec) -> bool:
    return discriminant(spec.characteristic()).value != 0


def sum_via_roots(spec: RecurrenceSpec, d: int, a: int) -> ResidueFp:
    """Same sum through the formula that needs distinct characteristic roots mod p"""
    N = spec.p ** a
    _check_offset(spec, d, N)
    if not _is_separable(spec):
        raise SingularDiscriminant(
            f"(1+x)^{spec.h + 1} - {spec.m}x^{spec.h} has a repeated root mod {spec.p}"
        )
    h = spec.h
    total = (h + 1 - spec.m) * _u_at(spec, d + h - 1, N) + _u_at(spec, N + d + h - 1, N)
    for r in range(1, (d - 1) // N + 1):
        total += comb(h + 1, r + 1) * _u_at(spec, d + h - 1 - r * N, N)
    return total


def relation_sides(spec: RecurrenceSpec, d: int, a: int) -> Tuple[ResidueFp, ResidueFp]:
    """
    Both sides of sum_j c_j S_{d+j} = [p^a | d+h] binom(h+1, (d+h)/p^a + 1).

    Shifted sums past h*p^a are empty and count as zero.
    """
    N = spec.p ** a
    _check_offset(spec, d, N)
    lhs = ResidueFp(0, spec.p)
    for j, c in enumerate(spec.coeffs):
        if c and d + j <= spec.h * N:
            lhs += c * sum_fast(spec, d + j, a)
    q, rem = divmod(d + spec.h, N)
    rhs = ResidueFp(comb(spec.h + 1, q + 1) if rem == 0 else 0, spec.p)
    return lhs, rhs


def relation_check(spec: RecurrenceSpec, d: int, a: int) -> bool:
    lhs, rhs = relation_sides(spec, d, a)
    return lhs == rhs


def sylvester_eval(roots: Sequence[ResidueFp], n: int) -> ResidueFp:
    """
    u_n = sum_i alpha_i^n / prod_{j != i} (alpha_i - alpha_j) over GF(p).

    The matching recurrence starts u_0 = ... = u_{len-2} = 0, u_{len-1} = 1.
    """
    if not roots:
        raise RepeatedRoot("Sylvester's formula needs at least one root")
    p = roots[0].p
    for i, alpha in enumerate(roots):
        if alpha.value == 0:
            raise ZeroRoot(f"root {i} vanishes mod {p}")
        for beta in roots[i + 1:]:
            if alpha == beta:
                raise RepeatedRoot(f"root {alpha} repeated mod {p}")
    total = ResidueFp(0, p)
    for i, alpha in enumerate(roots):
        denominator = ResidueFp(1, p)
        for j, beta in enumerate(roots):
            if j != i:
                denominator *= alpha - beta
        total += alpha ** n / denominator
    return total


def _kernel_at_zero(desc: SumDescriptor, offset: int) -> int:
    if desc.kind == 'C':
        return 1
    if desc.kind == 'Cbar':
        return desc.h
    return int(offset == 0)


def _full_sum(h: int, ratio: ResidueFp, offset: int, a: int) -> ResidueFp:
    """sum_{k < p^a} binom((h+1)k, k+offset) ratio^k, zero once offset passes h p^a"""
    N = ratio.p ** a
    if offset > h * N:
        return ResidueFp(0, ratio.p)
    return sum_fast(RecurrenceSpec(h, mod_inv(ratio)), offset, a)


def _kernel_sum(desc: SumDescriptor, ratio: ResidueFp, pp: PrimePowerModulus) -> ResidueFp:
    """Catalan kinds unfold into plain offsets by their subtraction forms"""
    h, a = desc.h, pp.a
    if desc.kind == 'plain':
        return _full_sum(h, ratio, desc.offset(pp.N), a)
    if desc.kind == 'C' and h > 1:
        return _full_sum(h, ratio, 0, a) - h * _full_sum(h, ratio, -1, a)
    # Cbar, and C for h = 1 where both kinds coincide
    return h * _full_sum(h, ratio, 0, a) - _full_sum(h, ratio, 1, a)


def descriptor_sum_fast(desc: SumDescriptor, pp: PrimePowerModulus) -> ResidueFp:
    """
    Recurrence-side value of any SumDescriptor.

    Weights fold into m, a k = 0 start is undone by subtracting the k = 0 term,
    and a class restriction k = r mod (p-1) uses
    sum_{k = r} f(k) = -sum_{x != 0} x^(-r) sum_k f(k) x^k.
    """
    p = pp.p
    ratio = desc.ratio(p)
    if desc.class_restriction is None:
        total = _kernel_sum(desc, ratio, pp)
        includes_zero = True
    else:
        r = desc.class_restriction % (p - 1) if p > 2 else 0
        total = ResidueFp(0, p)
        for x in range(1, p):
            total -= pow(x, -r, p) * _kernel_sum(desc, ratio * x, pp)
        includes_zero = r == 0
    if desc.k_start and includes_zero:
        total -= _kernel_at_zero(desc, desc.offset(pp.N))
    return total * desc.scale_residue(p)


def descriptor_spec(desc: SumDescriptor, p: int) -> RecurrenceSpec:
    """The recurrence whose sums realise desc once its weight is folded into m"""
    return RecurrenceSpec(desc.h, mod_inv(desc.ratio(p)))


def integer_sequence(h: int, m: Fraction, count: int) -> List[Fraction]:
    """First count terms of the recurrence over Q, for exact cross-checks"""
    coeffs = [Fraction(comb(h + 1, j)) for j in range(h + 2)]
    coeffs[h] -= Fraction(m)
    terms = [Fraction(int(i == h)) for i in range(h + 1)]
    while len(terms) < count:
        tail = terms[-(h + 1):]
        terms.append(-sum(c * v for c, v in zip(coeffs[:-1], tail)))
    return terms[:count]

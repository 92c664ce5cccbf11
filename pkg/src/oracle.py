"""
Brute-Force Oracle
Term-by-term enumeration of every binomial and Catalan sum, the ground truth for all other routes
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple, Union

from joblib import Parallel, delayed

from config.advanced_settings import default_workers, oracle_config
from src.exceptions import BudgetExceeded, PreconditionViolated, ZeroInverse
from src.modarith import PrimePowerModulus, ResidueFp, binom_int, rational_residue

logger = logging.getLogger(__name__)

KINDS = ('plain', 'C', 'Cbar')

Rational = Union[int, Fraction, Tuple[int, int]]


def _as_pair(value: Rational) -> Tuple[int, int]:
    if isinstance(value, tuple):
        value = Fraction(*value)
    value = Fraction(value)
    return value.numerator, value.denominator


def _pair_text(pair: Tuple[int, int]) -> str:
    return str(pair[0]) if pair[1] == 1 else f"{pair[0]}/{pair[1]}"


@dataclass(frozen=True)
class SumDescriptor:
    """
    scale * sum_{k_start <= k < p^a, k = r mod (p-1)} K(k) * weight^k / m^k

    K(k) is binom((h+1)k, k + d + d_pa*p^a) for kind 'plain', the first-kind
    Catalan number C_k^(h) for 'C' and the second-kind C-bar_k^(h) for 'Cbar'.
    """
    h: int
    m_num: int
    m_den: int = 1
    kind: str = 'plain'
    d: int = 0
    d_pa: int = 0
    k_start: int = 0
    weight: Optional[Tuple[int, int]] = None
    scale: Tuple[int, int] = (1, 1)
    class_restriction: Optional[int] = None
    label: str = ''

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionViolated(f"unknown sum kind {self.kind!r}")
        if self.k_start not in (0, 1):
            raise PreconditionViolated(f"k_start must be 0 or 1, got {self.k_start}")
        if self.m_den == 0 or self.m_num == 0:
            raise ZeroInverse("m must be a nonzero rational")

    @classmethod
    def of(cls, h: int, m: Rational, **kwargs) -> 'SumDescriptor':
        """Build from rationals given as int, Fraction or (num, den)"""
        m_num, m_den = _as_pair(m)
        for key in ('weight', 'scale'):
            if kwargs.get(key) is not None:
                kwargs[key] = _as_pair(kwargs[key])
        return cls(h, m_num, m_den, **kwargs)

    @property
    def m(self) -> Fraction:
        return Fraction(self.m_num, self.m_den)

    def m_residue(self, p: int) -> ResidueFp:
        m = rational_residue(self.m_num, self.m_den, p)
        if m.value == 0:
            raise ZeroInverse(f"m = {self.m} vanishes mod {p}")
        return m

    def ratio(self, p: int) -> ResidueFp:
        """Per-term factor weight/m as a residue"""
        base = rational_residue(*self.weight, p) if self.weight else ResidueFp(1, p)
        if base.value == 0:
            raise ZeroInverse(f"weight {_pair_text(self.weight)} vanishes mod {p}")
        return base / self.m_residue(p)

    def scale_residue(self, p: int) -> ResidueFp:
        return rational_residue(*self.scale, p)

    def offset(self, N: int) -> int:
        return self.d + self.d_pa * N

    def describe(self) -> str:
        if self.label:
            return self.label
        if self.kind == 'plain':
            shift = f"k+{self.d}" if self.d >= 0 else f"k{self.d}"
            if self.d_pa:
                shift += f"+{self.d_pa}N" if self.d_pa > 0 else f"{self.d_pa}N"
            term = f"binom({self.h + 1}k,{shift})"
        else:
            term = f"{'C' if self.kind == 'C' else 'Cbar'}^({self.h})_k"
        factor = f"/({_pair_text((self.m_num, self.m_den))})^k"
        if self.weight:
            factor = f"*({_pair_text(self.weight)})^k" + factor
        prefix = '' if self.scale == (1, 1) else f"{_pair_text(self.scale)}*"
        bounds = f"k>={self.k_start}"
        if self.class_restriction is not None:
            bounds += f",k={self.class_restriction} mod p-1"
        return f"{prefix}sum[{bounds}] {term}{factor}"


def catalan_mod(kind: str, h: int, k: int, p: int) -> ResidueFp:
    """Catalan numbers of order h via their subtraction forms, never dividing"""
    return ResidueFp(_catalan_int(kind, h, k, p), p)


def _catalan_int(kind: str, h: int, k: int, p: int) -> int:
    n = (h + 1) * k
    if kind == 'C':
        return binom_int(n, k, p) - h * binom_int(n, k - 1, p)
    if kind == 'Cbar':
        return h * binom_int(n, k, p) - binom_int(n, k + 1, p)
    raise PreconditionViolated(f"catalan_mod needs kind C or Cbar, got {kind!r}")


def _kernel(desc: SumDescriptor, k: int, offset: int, p: int) -> int:
    if desc.kind == 'plain':
        return binom_int((desc.h + 1) * k, k + offset, p)
    return _catalan_int(desc.kind, desc.h, k, p)


def term_value(desc: SumDescriptor, k: int, pp: PrimePowerModulus) -> ResidueFp:
    """The k-th summand recomputed from scratch, class restriction ignored"""
    p = pp.p
    kernel = _kernel(desc, k, desc.offset(pp.N), p)
    return kernel * desc.ratio(p) ** k * desc.scale_residue(p)


def _first_index(desc: SumDescriptor, p: int) -> Tuple[int, int]:
    """(first k, stride) of the enumerated index set"""
    if desc.class_restriction is None or p == 2:
        return desc.k_start, 1
    modulus = p - 1
    first = desc.class_restriction % modulus
    if first < desc.k_start:
        first += modulus
    return first, modulus


def term_count(desc: SumDescriptor, pp: PrimePowerModulus) -> int:
    first, stride = _first_index(desc, pp.p)
    return max(0, (pp.N - first + stride - 1) // stride)


def _partial_sum(desc: SumDescriptor, p: int, N: int, first: int, stride: int) -> int:
    """One worker's share: k = first, first + stride, ... below N"""
    offset = desc.offset(N)
    ratio = desc.ratio(p).value
    factor = pow(ratio, first, p)
    jump = pow(ratio, stride, p)
    total = 0
    for k in range(first, N, stride):
        total = (total + _kernel(desc, k, offset, p) * factor) % p
        factor = factor * jump % p
    return total


def direct_sum(desc: SumDescriptor, pp: PrimePowerModulus, budget: Optional[int] = None,
               workers: Optional[int] = None) -> ResidueFp:
    """
    Enumerate the sum term by term.

    Args:
        desc: the sum to evaluate
        pp: modulus p^a fixing the range k < p^a
        budget: maximum number of terms (defaults to the configured budget)
        workers: parallel workers for long enumerations

    Returns:
        The sum mod p
    """
    p, N = pp.p, pp.N
    budget = oracle_config.budget if budget is None else budget
    count = term_count(desc, pp)
    if count > budget:
        raise BudgetExceeded(f"{count} terms exceed the oracle budget of {budget}")
    first, stride = _first_index(desc, p)
    workers = workers or default_workers()
    if workers <= 1 or count < oracle_config.parallel_min_terms:
        total = _partial_sum(desc, p, N, first, stride)
    else:
        logger.debug(f"Striding {count} terms of {desc.describe()} across {workers} workers")
        partials = Parallel(n_jobs=workers, backend=oracle_config.backend)(
            delayed(_partial_sum)(desc, p, N, first + w * stride, stride * workers)
            for w in range(workers)
        )
        total = sum(partials)
    return ResidueFp(total, p) * desc.scale_residue(p)


def residue_class_sum(pp: PrimePowerModulus, d: int, r: int, budget: Optional[int] = None,
                      workers: Optional[int] = None) -> ResidueFp:
    """sum over 0 < k < p^a with k = r mod (p-1) of binom(3k, k+d)"""
    desc = SumDescriptor(2, 1, d=d, k_start=1, class_restriction=r)
    return direct_sum(desc, pp, budget, workers)

"""Shared fixtures for the congruence test suite"""

import random

import pytest
from sympy import primerange

from src.modarith import PrimePowerModulus

SMALL_PRIMES = [int(p) for p in primerange(5, 60)]
ODD_PRIMES = [int(p) for p in primerange(3, 60)]


@pytest.fixture
def rng():
    return random.Random(20240917)


@pytest.fixture
def pp():
    """Factory for PrimePowerModulus instances"""
    def make(p: int, a: int = 1) -> PrimePowerModulus:
        return PrimePowerModulus(p, a)
    return make


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    """Run in a scratch directory so logs/ and reports/ land in tmp"""
    monkeypatch.chdir(tmp_path)
    return tmp_path

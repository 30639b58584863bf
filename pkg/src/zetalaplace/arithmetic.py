"""Dense tables of the divisor functions d(n) = d_2(n) and d_4(n)."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError

MAX_LIMIT = 10 ** 8


@dataclass(frozen=True)
class DivisorTable:
    """d_order(n) for 1 <= n <= limit; ``values[0]`` is an unused 0."""

    order: int
    limit: int
    values: np.ndarray

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.limit:
            raise IndexError(f"n = {n} outside 1..{self.limit}")
        return int(self.values[n])

    def prefix(self, n_terms: int) -> np.ndarray:
        """d(1..n_terms) as a view."""
        if n_terms > self.limit:
            raise DomainError(f"table holds {self.limit} terms, {n_terms} requested")
        return self.values[1:n_terms + 1]


def primes_up_to(limit: int) -> np.ndarray:
    """Sieve of Eratosthenes."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.nonzero(is_prime)[0]


def divisor_sieve(order: int, limit: int) -> DivisorTable:
    """Exact d_order(n), n <= limit, by a multiplicative prime-power sieve.

    d_k(p^e) = C(e + k - 1, k - 1).  For every prime power p^e the entries
    divisible by p^e have their factor C(e+k-2, k-1) replaced by
    C(e+k-1, k-1); the division is exact.
    """
    if order not in (2, 4):
        raise DomainError(f"order must be 2 or 4, got {order}")
    if limit < 1:
        raise DomainError("limit must be >= 1")
    if limit > MAX_LIMIT:
        raise CapacityError(f"limit {limit} exceeds {MAX_LIMIT}")
    values = np.ones(limit + 1, dtype=np.int64)
    values[0] = 0
    for p in primes_up_to(limit):
        p = int(p)
        power, e = p, 1
        while power <= limit:
            old = math.comb(e + order - 2, order - 1)
            new = math.comb(e + order - 1, order - 1)
            block = values[power::power]
            block //= old
            block *= new
            if power > limit // p:
                break
            power *= p
            e += 1
    values.setflags(write=False)
    return DivisorTable(order=order, limit=limit, values=values)


def dirichlet_convolution(f: np.ndarray, g: np.ndarray) -> np.ndarray:
    """(f * g)(n) = sum_{ab = n} f(a) g(b) for arrays indexed from 1 (slot 0 ignored)."""
    n = min(len(f), len(g)) - 1
    out = np.zeros(n + 1, dtype=np.result_type(f, g))
    for a in range(1, n + 1):
        fa = f[a]
        if fa:
            out[a::a] += fa * g[1:n // a + 1]
    return out

"""Ground-truth helpers: an Eratosthenes table, a deterministic 64-bit
primality test and integer factorization (trial division + Brent's rho).
"""

from __future__ import annotations

import os
import random
from math import gcd, isqrt

from .errors import IncompleteFactorization, ResourceError

SIEVE_CAP_ENV = "GENPROTH_SIEVE_CAP"
DEFAULT_SIEVE_CAP = 2**32

# Deterministic for all n < 3.3e24, which covers every 64-bit input.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def sieve_cap() -> int:
    raw = os.environ.get(SIEVE_CAP_ENV)
    return int(raw) if raw else DEFAULT_SIEVE_CAP


def is_prime_u64(n: int) -> bool:
    """Deterministic primality for ``n < 2**64``."""
    if n >= 2**64:
        raise ValueError("is_prime_u64 only handles n < 2**64")
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _trial_division_is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


class SieveOracle:
    """Primality table for ``0 <= n < limit`` (odd entries stored only)."""

    def __init__(self, limit: int, *, check_samples: int = 1000, seed: int = 0):
        cap = sieve_cap()
        if limit > cap:
            raise ResourceError(f"sieve limit {limit} exceeds cap {cap} (set {SIEVE_CAP_ENV})")
        self.limit = limit
        size = (limit + 1) // 2  # index i stands for 2*i + 1
        table = bytearray([1]) * size
        if size:
            table[0] = 0  # 1 is not prime
        for i in range(1, (isqrt(max(limit - 1, 0)) - 1) // 2 + 1):
            if table[i]:
                q = 2 * i + 1
                start = q * q // 2
                table[start::q] = bytes(len(range(start, size, q)))
        self._odd = table
        if check_samples and limit > 2:
            rng = random.Random(seed)
            for _ in range(check_samples):
                n = rng.randrange(limit)
                if self.is_prime(n) != _trial_division_is_prime(n):
                    raise AssertionError(f"sieve disagrees with trial division at {n}")

    def is_prime(self, n: int) -> bool:
        if not 0 <= n < self.limit:
            raise ValueError(f"{n} outside sieve range [0, {self.limit})")
        if n % 2 == 0:
            return n == 2
        return bool(self._odd[n // 2])

    __contains__ = is_prime

    def primes(self):
        if self.limit > 2:
            yield 2
        for i in range(1, len(self._odd)):
            if self._odd[i]:
                yield 2 * i + 1

    def odd_composites(self, start: int = 9, stop: int | None = None):
        """Odd composites in ``[start, stop)``."""
        stop = self.limit if stop is None else min(stop, self.limit)
        odd = self._odd
        for n in range(start | 1, stop, 2):
            if n > 1 and not odd[n // 2]:
                yield n


def build_sieve(limit: int, **kwargs) -> SieveOracle:
    return SieveOracle(limit, **kwargs)


def is_probable_prime(n: int) -> bool:
    """Exact below ``2**64``; strong probable-prime test on fixed bases above."""
    if n < 2**64:
        return is_prime_u64(n)
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int, c: int, max_iter: int) -> tuple[int, int]:
    """One Brent-rho run with ``f(y) = y^2 + c``.

    Returns ``(divisor, iterations)``; the divisor is ``n`` on failure or when
    ``max_iter`` is exhausted.
    """
    y, m, g, r, q = 2, 128, 1, 1, 1
    x = ys = y
    used = 0
    while g == 1:
        if used >= max_iter:
            return n, used
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        used += r
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = gcd(q, n)
            k += m
        used += r
        r *= 2
    if g == n:
        while True:
            ys = (ys * ys + c) % n
            used += 1
            g = gcd(abs(x - ys), n)
            if g > 1:
                break
    return g, used


def factorize(m: int, budget: int = 10**6, trial_limit: int = 10**6) -> list[tuple[int, int]]:
    """Prime factorization of ``m`` as ascending ``(prime, exponent)`` pairs.

    Trial division up to ``trial_limit``, then Brent's rho with increments
    ``c = 1, 2, 3, ...``.  ``budget`` bounds the total rho iterations; when it
    runs out :class:`IncompleteFactorization` carries the partial result.
    """
    if m < 2:
        raise ValueError(f"cannot factor {m}")
    found: dict[int, int] = {}

    def record(q: int) -> None:
        found[q] = found.get(q, 0) + 1

    for q in (2, 3, 5):
        while m % q == 0:
            record(q)
            m //= q
    d, i = 7, 0
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)  # gaps between residues coprime to 30, from 7
    while d * d <= m and d <= trial_limit:
        while m % d == 0:
            record(d)
            m //= d
        d += wheel[i]
        i = (i + 1) % 8
    pending = [m] if m > 1 else []
    spent = 0
    while pending:
        f = pending.pop()
        if d * d > f or is_probable_prime(f):
            record(f)
            continue
        c = 1
        while True:
            if spent >= budget:
                pending.append(f)
                raise IncompleteFactorization(sorted(found.items()), _product(pending))
            g, used = _brent(f, c, budget - spent)
            spent += used
            if 1 < g < f:
                pending.extend((g, f // g))
                break
            c += 1
    return sorted(found.items())


def _product(values) -> int:
    out = 1
    for v in values:
        out *= v
    return out

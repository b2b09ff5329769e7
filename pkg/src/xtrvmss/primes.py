"""Primality testing and prime search helpers."""

from __future__ import annotations

import math
import random

import gmpy2

# Below this bound primality is decided exactly by trial division.
TRIAL_DIVISION_LIMIT = 1 << 24
MILLER_RABIN_ROUNDS = 64


def is_prime_trial(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def is_prime(n: int) -> bool:
    """Exact for n < 2**24, otherwise Miller-Rabin with 64 rounds (error < 2**-128)."""
    if n < TRIAL_DIVISION_LIMIT:
        return is_prime_trial(n)
    return bool(gmpy2.is_prime(n, MILLER_RABIN_ROUNDS))


def random_prime(bits: int, rng: random.Random, residue: tuple[int, int] | None = None,
                 attempts: int = 100_000) -> int | None:
    """Random prime with exactly ``bits`` bits, optionally ``≡ residue[0] (mod residue[1])``."""
    lo, hi = 1 << (bits - 1), (1 << bits) - 1
    for _ in range(attempts):
        n = rng.randint(lo, hi)
        if residue is not None:
            r, mod = residue
            n += (r - n) % mod
            if n > hi:
                continue
        if is_prime(n):
            return n
    return None


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division (desk-scale inputs only)."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out

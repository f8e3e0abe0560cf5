"""Primality testing, prime streams for modular runs, and balanced CRT lifting."""

from __future__ import annotations

import math
from typing import Iterable, Iterator

from ..errors import ValidationError

# Deterministic Miller-Rabin witness set for n < 3.3 * 10^24, which covers
# every modulus this package generates (machine-width primes) with room to
# spare for user-supplied ones.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def descending_primes(start_below: int = 2**31) -> Iterator[int]:
    """Primes strictly below ``start_below``, largest first."""
    n = start_below - 1
    if n % 2 == 0:
        n -= 1
    while n >= 2:
        if is_prime(n):
            yield n
        n -= 2
    if start_below > 2:
        yield 2


def crt_combine_balanced(residues: Iterable[int], moduli: Iterable[int]) -> int:
    """Solve r = residues[i] mod moduli[i] with the balanced representative.

    The result is the unique r with -M/2 < r <= M/2 for M the product of the
    moduli, so negative integers reconstruct from their nonnegative residues.
    Moduli must be pairwise coprime.
    """
    residues = list(residues)
    moduli = list(moduli)
    if len(residues) != len(moduli):
        raise ValidationError("residues and moduli must have equal length")
    if not moduli:
        raise ValidationError("need at least one modulus")
    for m in moduli:
        if m < 2:
            raise ValidationError(f"modulus must be >= 2, got {m}")
    for i in range(len(moduli)):
        for j in range(i + 1, len(moduli)):
            if math.gcd(moduli[i], moduli[j]) != 1:
                raise ValidationError(
                    f"moduli {moduli[i]} and {moduli[j]} are not coprime"
                )
    product = 1
    for m in moduli:
        product *= m
    acc = 0
    for r, m in zip(residues, moduli):
        other = product // m
        acc += r * other * pow(other, -1, m)
    acc %= product
    if 2 * acc > product:
        acc -= product
    return acc

"""Exact integer and prime-field helpers: primality, prime windows, p-adic digits."""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

from .errors import BadParameters, InsufficientPrimes, OutOfRange

MAX_CLASSES = 2**40

# Witnesses that make Miller-Rabin deterministic for every n < 3.3e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test, exact for all 64-bit inputs."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
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


def iroot_ceil(n: int, k: int) -> int:
    """Smallest integer r with r**k >= n."""
    if n <= 1:
        return n
    r = int(round(n ** (1.0 / k)))
    while r**k < n:
        r += 1
    while r > 1 and (r - 1) ** k >= n:
        r -= 1
    return r


@dataclass(frozen=True)
class PrimeSearchWindow:
    """Closed integer window [ceil(N^(1/k)), floor(N^(1/(k-epsilon)))]."""

    n_classes: int
    k: int = 2
    epsilon: float = 0.5

    def __post_init__(self):
        if not 1 <= self.n_classes <= MAX_CLASSES:
            raise BadParameters(f"n_classes must be in [1, 2^40], got {self.n_classes}")
        if self.k < 1:
            raise BadParameters(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.epsilon < 1.0:
            raise BadParameters(f"epsilon must be in (0, 1), got {self.epsilon}")
        if self.k - self.epsilon <= 0:
            raise BadParameters("k - epsilon must be positive")

    @property
    def lower(self) -> int:
        return max(2, iroot_ceil(self.n_classes, self.k))

    @property
    def upper(self) -> int:
        u = int(math.floor(self.n_classes ** (1.0 / (self.k - self.epsilon)) + 1e-9))
        return max(u, self.lower)

    @classmethod
    def explicit(cls, lower: int, upper: int) -> "_ExplicitWindow":
        return _ExplicitWindow(lower, upper)


@dataclass(frozen=True)
class _ExplicitWindow:
    lower: int
    upper: int


def select_primes(window, count: int) -> list[int]:
    """The ``count`` smallest primes inside ``window``, ascending."""
    if count < 1:
        raise BadParameters("count must be >= 1")
    found = []
    n = window.lower
    while n <= window.upper and len(found) < count:
        if is_prime(n):
            found.append(n)
        n += 1
    if len(found) < count:
        raise InsufficientPrimes(
            f"only {len(found)} primes in [{window.lower}, {window.upper}], need {count}"
        )
    return found


def validate_pairwise_coprime(moduli: Sequence[int]) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in combinations(moduli, 2))


@dataclass(frozen=True)
class PAdicDigits:
    digits: tuple[int, ...]
    p: int

    @property
    def k(self) -> int:
        return len(self.digits)

    def recompose(self) -> int:
        x = 0
        for d in reversed(self.digits):
            x = x * self.p + d
        return x


def p_adic_digits(x: int, p: int, k: int) -> PAdicDigits:
    if not 0 <= x < p**k:
        raise OutOfRange(f"{x} not in [0, {p}^{k})")
    digits = []
    for _ in range(k):
        x, d = divmod(x, p)
        digits.append(d)
    return PAdicDigits(tuple(digits), p)


def poly_eval_mod_p(digits: PAdicDigits, point: int) -> int:
    """Horner evaluation of sum(d_j * point^j) mod p."""
    acc = 0
    for d in reversed(digits.digits):
        acc = (acc * point + d) % digits.p
    return acc

"""Arithmetic in the residue ring Z/p^alpha.

Residues are plain Python ints in ``[0, p**alpha)``; :class:`RingSpec` carries
the prime and exponent and validates them once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd, inf

MAX_MODULUS = 2**63


class NonUnit(ArithmeticError):
    """Raised when inverting a residue divisible by p."""


class RingError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingSpec:
    """The ring Z/p^alpha for a prime p."""

    p: int
    alpha: int
    modulus: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise RingError(f"p = {self.p} is not prime")
        if self.alpha < 1:
            raise RingError(f"alpha must be >= 1, got {self.alpha}")
        m = self.p**self.alpha
        if m >= MAX_MODULUS:
            raise RingError(f"p^alpha = {self.p}^{self.alpha} does not fit in 63 bits")
        object.__setattr__(self, "modulus", m)

    def __call__(self, value: int) -> int:
        return value % self.modulus

    def with_alpha(self, alpha: int) -> "RingSpec":
        return RingSpec(self.p, alpha)

    def is_unit(self, a: int) -> bool:
        return a % self.p != 0

    def inv(self, a: int) -> int:
        return inv(a, self)

    def pow(self, a: int, e: int) -> int:
        return pow_mod(a, e, self)

    @property
    def totient(self) -> int:
        return self.modulus - self.modulus // self.p


def inv(a: int, ring: RingSpec) -> int:
    if a % ring.p == 0:
        raise NonUnit(f"{a} is not a unit modulo {ring.modulus}")
    return pow(a % ring.modulus, -1, ring.modulus)


def valuation(n: int, p: int) -> float | int:
    """p-adic valuation of ``n``; ``math.inf`` for zero."""
    if n == 0:
        return inf
    n = abs(n)
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def pow_mod(a: int, e: int, ring: RingSpec) -> int:
    if e < 0:
        raise ValueError("negative exponent")
    m = ring.modulus
    result = 1 % m
    base = a % m
    while e:
        if e & 1:
            result = result * base % m
        base = base * base % m
        e >>= 1
    return result


def floor_log(p: int, n: int) -> int:
    """Largest e with p**e <= n (n >= 1)."""
    if n < 1:
        raise ValueError("floor_log needs n >= 1")
    e, q = 0, p
    while q <= n:
        q *= p
        e += 1
    return e


def ceil_log(p: int, n: int) -> int:
    """Smallest e with p**e >= n (n >= 1)."""
    if n < 1:
        raise ValueError("ceil_log needs n >= 1")
    e, q = 0, 1
    while q < n:
        q *= p
        e += 1
    return e


def lcm(*values: int) -> int:
    out = 1
    for v in values:
        out = out * v // gcd(out, v)
    return out

"""Factorization over F_p and period lengths of 1/R mod p and mod p^alpha."""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy.core.random as sympy_random
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor

from ..errors import HypothesisViolated, InvariantViolation, ZeroPolynomial
from ..modarith import RingSpec, ceil_log, lcm
from ..poly import Poly

FACTOR_SEED = 20240601
MAX_EXPANSION = 20_000_000


@dataclass(frozen=True)
class FpFactorization:
    """(R mod p) = c z^e0 prod R_i^e_i with monic irreducible R_i != z."""

    p: int
    c: int
    e0: int
    factors: tuple
    seed: int = field(default=FACTOR_SEED)

    def expand(self) -> Poly:
        out = Poly({(0,): self.c}, 1)
        for F, e in self.factors:
            out = out.mul(F.pow(e, self.p), self.p)
        return out.shift((self.e0,))

    @property
    def e(self) -> int:
        return max((e for _, e in self.factors), default=0)

    @property
    def L(self) -> int:
        return lcm(*(self.p ** int(F.deg(0)) - 1 for F, _ in self.factors)) if self.factors else 1


def _to_dense_high(F: Poly, p: int) -> list[int]:
    deg = int(F.deg(0))
    return [F[(i,)] % p for i in range(deg, -1, -1)]


def _from_dense_high(coeffs) -> Poly:
    n = len(coeffs) - 1
    return Poly({(n - i,): int(c) for i, c in enumerate(coeffs) if int(c)}, 1)


def factor_fp(R: Poly, p: int, seed: int = FACTOR_SEED) -> FpFactorization:
    Rp = R.reduce(p)
    if not Rp:
        raise ZeroPolynomial("R vanishes mod p")
    low = int(Rp.mindeg(0))
    base = Rp.shift((-low,))
    sympy_random.seed(seed)
    c, parts = gf_factor(_to_dense_high(base, p), p, ZZ)
    e0 = low
    factors = []
    for g, e in parts:
        F = _from_dense_high(g)
        if F == Poly({(1,): 1}, 1):
            e0 += e
        else:
            factors.append((F, int(e)))
    factors.sort(key=lambda fe: (int(fe[0].deg(0)), fe[0].key))
    return FpFactorization(p, int(c) % p, e0, tuple(factors), seed)


# ---------------------------------------------------------------------------
# series of 1/T


def inverse_series(T: Poly, n: int, M: int) -> list[int]:
    """First n coefficients of 1/T mod M for a polynomial T with unit constant term."""
    c = [T[(i,)] % M for i in range(int(T.deg(0)) + 1)]
    if c[0] % _smallest_prime(M) == 0:
        raise HypothesisViolated("constant term of T is not a unit")
    inv0 = pow(c[0], -1, M)
    pairs = [(i, ci) for i, ci in enumerate(c) if i and ci]
    a = []
    for k in range(n):
        acc = 1 if k == 0 else 0
        for i, ci in pairs:
            if i > k:
                break
            acc -= ci * a[k - i]
        a.append(acc * inv0 % M)
    return a


def _smallest_prime(M: int) -> int:
    f = 2
    while M % f:
        f += 1
    return f


def minimal_period(seq) -> int:
    """Smallest period of a finite word (prefix-function)."""
    n = len(seq)
    pi = [0] * n
    k = 0
    for i in range(1, n):
        while k and seq[i] != seq[k]:
            k = pi[k - 1]
        if seq[i] == seq[k]:
            k += 1
        pi[i] = k
    return n - pi[-1] if n else 0


def trailing_zeros(seq, period: int) -> int:
    count = 0
    for v in reversed(seq[:period]):
        if v:
            break
        count += 1
    return count


def _periodic_check(seq, period: int) -> bool:
    return all(seq[i] == seq[i + period] for i in range(len(seq) - period))


@dataclass(frozen=True)
class PeriodReport:
    p: int
    alpha: int
    factorization: FpFactorization
    empirical_mod_p: int
    empirical_T_mod_p: int
    empirical_mod_palpha: int
    bound_mod_p: int
    bound_power: int
    bound_square: int
    trailing_zeros: int
    expected_trailing_zeros: int

    @property
    def bound_mod_palpha(self) -> int:
        return self.bound_square


def _detect(T: Poly, M: int, bound: int, what: str) -> tuple[int, list[int]]:
    length = 4 * bound + int(T.deg(0)) + 1
    if length > MAX_EXPANSION:
        raise HypothesisViolated(f"expansion of length {length} is too long for {what}")
    seq = inverse_series(T, length, M)
    m = minimal_period(seq)
    if 2 * m > length or not _periodic_check(seq, m):
        raise InvariantViolation(f"{what} did not show a period within {length} terms")
    return m, seq


def period_rational(R: Poly, ring: RingSpec) -> PeriodReport:
    """Empirical periods of 1/(R mod p), 1/T mod p and 1/T mod p^alpha with T = R^(p^(alpha-1)),
    together with the divisibility bounds."""
    p, alpha, M = ring.p, ring.alpha, ring.modulus
    if R.mindeg(0) < -1:
        raise HypothesisViolated("R must lie in z^-1 R[z]")
    fac = factor_fp(R, p)
    if fac.e0 not in (-1, 0):
        raise HypothesisViolated(f"power of z in R mod p is {fac.e0}, expected -1 or 0")
    Rp = R.reduce(p)
    if Rp.deg(0) < 1:
        raise HypothesisViolated("deg(R mod p) must be at least 1")
    Tbar = Rp.shift((-fac.e0,))  # polynomial, unit constant and leading terms
    q = p ** (alpha - 1)
    T = Tbar.pow(q, M)
    bound_p = p ** ceil_log(p, max(fac.e, 1)) * fac.L
    m, _ = _detect(Tbar, p, bound_p, "1/(R mod p)")
    if bound_p % m:
        raise InvariantViolation(f"period {m} does not divide {bound_p}")
    bound_T_p = q * m
    mT, _ = _detect(T, p, bound_T_p, "1/T mod p")
    b_power = q * mT
    b_square = q * q * m
    mA, seqA = _detect(T, M, max(b_power, b_square), "1/T mod p^alpha")
    if b_power % mA or b_square % mA:
        raise InvariantViolation(f"period {mA} does not divide the bounds {b_power}, {b_square}")
    tz = trailing_zeros(seqA, mA)
    return PeriodReport(p, alpha, fac, m, mT, mA, bound_p, b_power, b_square, tz, int(T.deg(0)) - 1)


def ord_mod(p: int, m: int) -> int:
    """Eventual period of p^n mod m."""
    while m % p == 0 and m > 1:
        m //= p
    if m == 1:
        return 1
    k, x = 1, p % m
    while x != 1:
        x = x * p % m
        k += 1
    return k

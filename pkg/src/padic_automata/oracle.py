"""Brute-force ground truth: truncated series, diagonal expansion, kernel prefixes.

None of this touches the digit machinery, so it can be used to check it.
Power-series products use Kronecker substitution on gmpy2 integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import gmpy2
import numpy as np

from .errors import BudgetExceeded, InvalidDenominator, monomial_budget
from .modarith import RingSpec
from .poly import CurveSpec, Poly


@dataclass(frozen=True)
class SeriesPrefix:
    ring: RingSpec
    coeffs: tuple
    method: str

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, n):
        return self.coeffs[n]

    def reduce(self, beta: int) -> "SeriesPrefix":
        m = self.ring.p ** beta
        return SeriesPrefix(self.ring.with_alpha(beta), tuple(c % m for c in self.coeffs), self.method)


# ---------------------------------------------------------------------------
# truncated power series mod M


def _slot_bytes(M: int, n: int) -> int:
    bits = 2 * (M - 1).bit_length() + n.bit_length() + 1
    return (bits + 7) // 8


def _pack(a: list[int], width: int):
    if width <= 8:
        raw = np.asarray(a, dtype="<u8").view(np.uint8).reshape(-1, 8)[:, :width].tobytes()
    else:
        raw = b"".join(c.to_bytes(width, "little") for c in a)
    return gmpy2.from_binary(b"\x01\x01" + raw) if raw.strip(b"\x00") else gmpy2.mpz(0)


def series_mul(a: list[int], b: list[int], n: int, M: int) -> list[int]:
    """(a * b) mod (x^n, M) for coefficient lists with entries in [0, M)."""
    a, b = a[:n], b[:n]
    if not a or not b:
        return [0] * n
    width = _slot_bytes(M, min(len(a), len(b)))
    keep = min(n, len(a) + len(b) - 1)
    prod = _pack(a, width) * _pack(b, width)
    raw = gmpy2.to_binary(prod)[2:] if prod else b""
    raw = raw.ljust(width * keep, b"\x00")[: width * keep]
    if width <= 8:
        full = np.zeros((keep, 8), dtype=np.uint8)
        full[:, :width] = np.frombuffer(raw, dtype=np.uint8).reshape(keep, width)
        out = (full.view("<u8").ravel() % np.uint64(M)).tolist()
    else:
        out = [int.from_bytes(raw[i * width:(i + 1) * width], "little") % M for i in range(keep)]
    out.extend([0] * (n - len(out)))
    return out


def series_inv(a: list[int], n: int, M: int) -> list[int]:
    """Inverse of a series with unit constant term, mod (x^n, M)."""
    c0 = a[0] % M
    g = [pow(c0, -1, M)]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        e = series_mul(a, g, prec, M)
        e = [(-c) % M for c in e]
        e[0] = (e[0] + 2) % M
        g = series_mul(g, e, prec, M)
    return g[:n] + [0] * (n - len(g))


def _coeff_lists(P: Poly, M: int) -> list[list[int]]:
    """P as a list over y-powers of coefficient lists in x."""
    d = int(P.deg(1))
    h = int(P.deg(0))
    rows = [[0] * (h + 1) for _ in range(d + 1)]
    for (i, j), c in P.terms.items():
        rows[j][i] = c % M
    return rows


def _horner(rows: list[list[int]], F: list[int], n: int, M: int) -> list[int]:
    acc = [0] * n
    for A in reversed(rows):
        acc = series_mul(acc, F, n, M)
        for i, c in enumerate(A[:n]):
            acc[i] = (acc[i] + c) % M
    return acc


def series_solve(curve: CurveSpec, N: int, ring: RingSpec | None = None) -> SeriesPrefix:
    """a(0..N) of the unique F with F(0) = 0 and P(x, F) = 0, by Newton iteration."""
    ring = ring or curve.ring
    M = ring.modulus
    P = curve.P.reduce(M)
    rows = _coeff_lists(P, M)
    drows = [[(j * c) % M for c in rows[j]] for j in range(1, len(rows))]
    n = N + 1
    F = [0]
    # g tracks 1/P_y(x, F) to half the working precision; one Newton step
    # per round keeps it in step with F
    g = [pow(rows[1][0] if len(rows) > 1 and rows[1] else 0, -1, M)]
    prec = 1
    while prec < n:
        prec = min(2 * prec, n)
        Fp = F + [0] * (prec - len(F))
        val = _horner(rows, Fp, prec, M)
        der = _horner(drows, Fp, prec, M)
        e = series_mul(der, g, prec, M)
        e = [(-c) % M for c in e]
        e[0] = (e[0] + 2) % M
        g = series_mul(g, e, prec, M)
        corr = series_mul(val, g, prec, M)
        F = [(f - c) % M for f, c in zip(Fp, corr)]
    F = (F + [0] * n)[:n]
    return SeriesPrefix(ring, tuple(F), "newton")


def residual(curve: CurveSpec, coeffs, ring: RingSpec | None = None) -> list[int]:
    """P(x, F) mod (x^len, p^alpha) for a coefficient prefix."""
    ring = ring or curve.ring
    M = ring.modulus
    n = len(coeffs)
    return _horner(_coeff_lists(curve.P.reduce(M), M), [c % M for c in coeffs], n, M)


# ---------------------------------------------------------------------------
# diagonals


def diagonal_expand(spec, N: int, ring: RingSpec, budget: int | None = None) -> SeriesPrefix:
    """a(n) = [x_1^n ... x_m^n] num/den for n = 0..N via the recurrence den * F = num."""
    num, den = spec.numerator, spec.denominator
    m = num.nvars
    M = ring.modulus
    c0 = den.constant_term() % M
    if c0 % ring.p == 0:
        raise InvalidDenominator("denominator constant term is divisible by p")
    budget = monomial_budget() if budget is None else budget
    side = N + 1
    cells = side**m
    if cells > budget:
        raise BudgetExceeded(f"diagonal box has {cells} cells (budget {budget})")
    cinv = pow(c0, -1, M)
    strides = [side ** (m - 1 - i) for i in range(m)]
    dterms = [(e, c % M) for e, c in den.terms.items() if any(e) and c % M]
    dterms = [(e, c, sum(x * s for x, s in zip(e, strides))) for e, c in dterms if all(x <= N for x in e)]
    F = [0] * cells
    numt = {e: c % M for e, c in num.terms.items()}
    for e in product(range(side), repeat=m):
        idx = sum(x * s for x, s in zip(e, strides))
        acc = numt.get(e, 0)
        for f, c, off in dterms:
            ok = True
            for x, y in zip(e, f):
                if x < y:
                    ok = False
                    break
            if ok:
                acc -= c * F[idx - off]
        F[idx] = acc * cinv % M
    diag_step = sum(strides)
    return SeriesPrefix(ring, tuple(F[n * diag_step] for n in range(side)), "diagonal")


# ---------------------------------------------------------------------------
# kernels


def kernel_prefixes(source, p: int, e_max: int, L: int) -> int:
    """Number of distinct length-L prefixes of a(p^e n + r), 0 <= e <= e_max, 0 <= r < p^e.

    ``source`` is a sequence or a callable returning at least p^e_max * L terms.
    """
    need = p**e_max * L
    seq = source(need) if callable(source) else source
    if len(seq) < need:
        raise ValueError(f"need {need} terms, got {len(seq)}")
    seen = set()
    for e in range(e_max + 1):
        pe = p**e
        for r in range(pe):
            seen.add(tuple(seq[pe * n + r] for n in range(L)))
    return len(seen)


def catalan_mod(N: int, M: int) -> list[int]:
    """C_0..C_N mod M using exact integers."""
    out = []
    c = 1
    for n in range(N + 1):
        out.append(c % M)
        c = c * 2 * (2 * n + 1) // (n + 2)
    return out

"""Base-p/Q numeration for automaton states.

A state S over Z/p^alpha is stored as its digits (T_0, ..., T_{alpha-1}) with

    S = sum_k T_k p^k Q^(p^(alpha-1) - 1 - k),

every T_k a Laurent polynomial with coefficients in {0, ..., p-1}. Transitions
are computed on digits directly, so the huge power of Q is never expanded.

The code is generic in the number of variables: bivariate digits drive the
algebraic and two-variable diagonal automata, univariate digits the border
projections.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb

from .errors import BudgetExceeded, InvariantViolation, NotRepresentable, monomial_budget
from .modarith import RingSpec
from .poly import (
    CurveSpec,
    Poly,
    padd,
    pcartier,
    pbin,
    pcartier_mul,
    pclean,
    pfrobenius,
    pkey,
    pmul,
    ppow,
)


class DigitTuple:
    """Canonical digits ``(T_0, ..., T_{alpha-1})`` (index k holds T_k)."""

    __slots__ = ("digits", "nvars", "_key", "_hash")

    def __init__(self, digits, nvars: int = 2):
        self.digits = tuple(d.terms if isinstance(d, Poly) else d for d in digits)
        self.nvars = nvars
        self._key = None
        self._hash = None

    @classmethod
    def zero(cls, alpha: int, nvars: int = 2) -> "DigitTuple":
        return cls([{} for _ in range(alpha)], nvars)

    @property
    def alpha(self) -> int:
        return len(self.digits)

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = tuple(pkey(d) for d in self.digits)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, DigitTuple):
            return NotImplemented
        return self.digits == other.digits

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key)
        return self._hash

    def __getitem__(self, k: int) -> Poly:
        return Poly._wrap(self.digits[k], self.nvars)

    def __iter__(self):
        return (Poly._wrap(d, self.nvars) for d in self.digits)

    def is_zero(self) -> bool:
        return not any(self.digits)

    def truncate(self, beta: int) -> "DigitTuple":
        """Keep the low digits T_0, ..., T_{beta-1}."""
        return DigitTuple(self.digits[:beta], self.nvars)

    def is_canonical(self, p: int) -> bool:
        return all(0 < c < p for d in self.digits for c in d.values())

    def to_lists(self) -> list:
        return [[[*e, c] for e, c in sorted(d.items())] for d in self.digits]

    @classmethod
    def from_lists(cls, data, nvars: int = 2) -> "DigitTuple":
        return cls([{tuple(t[:-1]): t[-1] for t in d} for d in data], nvars)

    def __repr__(self):
        inner = ", ".join(str(Poly._wrap(d, self.nvars)) for d in reversed(self.digits))
        return f"DigitTuple(({inner}))"


# ---------------------------------------------------------------------------
# Q and the Z table


def make_Q(curve: CurveSpec) -> Poly:
    """Lift of P/y mod p with coefficients in {0, ..., p-1}."""
    p = curve.p
    return Poly._wrap(
        pclean({(i, j - 1): c % p for (i, j), c in curve.P.terms.items()}), 2
    )


def lift_mod_p(F: Poly, p: int) -> Poly:
    """The supported lift of F mod p into the digit set."""
    return F.reduce(p)


@dataclass(frozen=True, eq=False)
class ZTable:
    """Precomputed Z[j][k] polynomials, binned by exponent residues mod p.

    ``diagonal`` selects the Cartier pattern: (r, 0) for algebraic states,
    (r, ..., r) for diagonal states.
    """

    Q: dict
    ring: RingSpec
    nvars: int
    Delta: dict
    Z: tuple
    bins: tuple
    diagonal: bool = False

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def alpha(self) -> int:
        return self.ring.alpha

    def pattern(self, r: int) -> tuple[int, ...]:
        if self.diagonal:
            return (r,) * self.nvars
        return (r,) + (0,) * (self.nvars - 1)


def _bin(Z: dict, p: int) -> dict:
    out: dict = {}
    for e, c in Z.items():
        rho = tuple(x % p for x in e)
        q = tuple(x // p for x in e)
        out.setdefault(rho, []).append((q, c))
    return out


def build_ztable(Q, ring: RingSpec, diagonal: bool = False) -> ZTable:
    """Z[j][k] = sum_{m=k+1}^{k+j+1} C(k+j+1, m) Q^(pm-k-1) Delta^(k+j+1-m) mod p^(j+1)."""
    if isinstance(Q, Poly):
        nvars, Q = Q.nvars, Q.terms
    else:
        nvars = len(next(iter(Q)))
    p, alpha, M = ring.p, ring.alpha, ring.modulus
    if Q.get((0,) * nvars, 0) % p == 0:
        raise ValueError("Q needs a unit constant term")
    Delta = padd(pfrobenius(Q, p), ppow(Q, p, M, nvars), M, scale=-1)
    if any(c % p for c in Delta.values()):
        raise InvariantViolation("Q(x^p) - Q^p is not divisible by p")
    qpow = [{(0,) * nvars: 1}]
    top = p * alpha
    for _ in range(top):
        qpow.append(pmul(qpow[-1], Q, M))
    dpow = [{(0,) * nvars: 1}]
    for _ in range(alpha):
        dpow.append(pmul(dpow[-1], Delta, M))
    Z, bins = [], []
    for j in range(alpha):
        mod = p ** (j + 1)
        row, brow = [], []
        for k in range(alpha - j):
            n = k + j + 1
            acc: dict = {}
            for m in range(k + 1, n + 1):
                term = pmul(qpow[p * m - k - 1], dpow[n - m], mod)
                acc = padd(acc, term, mod, scale=comb(n, m))
            row.append(acc)
            brow.append(_bin(acc, p))
        Z.append(tuple(row))
        bins.append(tuple(brow))
    return ZTable(dict(Q), ring, nvars, Delta, tuple(Z), tuple(bins), diagonal)


def _cartier_product(T: dict, bins: dict, shifts: tuple[int, ...], p: int, mod: int) -> dict:
    """Lambda_shifts(T * Z) using the residue bins of Z; coefficients mod ``mod``."""
    groups: dict = {}
    for e, c in T.items():
        groups.setdefault(tuple(x % p for x in e), []).append((e, c))
    out: dict = {}
    get = out.get
    for rt, members in groups.items():
        rho = tuple((s - a) % p for s, a in zip(shifts, rt))
        zb = bins.get(rho)
        if not zb:
            continue
        carry = tuple((a + b - s) // p for a, b, s in zip(rt, rho, shifts))
        if len(rt) == 2:
            c0, c1 = carry
            for (a0, a1), ct in members:
                b0 = a0 // p + c0
                b1 = a1 // p + c1
                for (q0, q1), cz in zb:
                    key = (b0 + q0, b1 + q1)
                    out[key] = get(key, 0) + ct * cz
        else:
            for e, ct in members:
                base = tuple(x // p + cc for x, cc in zip(e, carry))
                for q, cz in zb:
                    key = tuple(x + y for x, y in zip(base, q))
                    out[key] = get(key, 0) + ct * cz
    return pclean(out, mod)


def _split(diff: dict, pj: int, p: int) -> dict:
    out = {}
    for e, c in diff.items():
        q, rem = divmod(c, pj)
        if rem:
            raise InvariantViolation(f"coefficient {c} at {e} is not divisible by {pj}")
        q %= p
        if q:
            out[e] = q
    return out


def digit_step(t: DigitTuple, r: int, zt: ZTable, trace: dict | None = None) -> DigitTuple:
    """Digits of lambda_r(val(t)) computed from the digits of t.

    If ``trace`` is a dict it receives the intermediate U[(k, j)] polynomials.
    """
    p, alpha = zt.p, zt.alpha
    if not 0 <= r < p:
        raise ValueError(f"symbol {r} is not a base-{p} digit")
    shifts = zt.pattern(r)
    Q = zt.Q
    raw: list[dict] = [{} for _ in range(alpha)]
    for k in range(alpha):
        T = t.digits[k]
        if not T:
            continue
        top = p ** (alpha - k)
        acc: dict = {}
        pj = 1
        for j in range(alpha - k):
            mod = pj * p
            L = _cartier_product(T, zt.bins[j][k], shifts, p, mod)
            diff = padd(L, acc, mod, scale=-1) if acc else L
            U = _split(diff, pj, p)
            if trace is not None:
                trace[(k, j)] = U
            if U:
                raw[k + j] = padd(raw[k + j], U)
            if j + 1 < alpha - k:
                acc = pmul(padd(acc, U, top, scale=pj), Q, top)
            pj = mod
    return carry_normalize(raw, Q, p, t.nvars)


def carry_normalize(raw, Q, p: int, nvars: int | None = None) -> DigitTuple:
    """Canonical digits of sum_k raw[k] p^k Q^(p^(alpha-1)-1-k); overflow past the top digit is dropped."""
    if isinstance(Q, Poly):
        nvars = Q.nvars if nvars is None else nvars
        Q = Q.terms
    raw = [d.terms if isinstance(d, Poly) else dict(d) for d in raw]
    if nvars is None:
        nvars = len(next(iter(Q)))
    alpha = len(raw)
    out = []
    carry: dict = {}
    for k in range(alpha):
        cur = padd(raw[k], carry) if carry else raw[k]
        digit, up = {}, {}
        for e, c in cur.items():
            u, rem = divmod(c, p)
            if rem:
                digit[e] = rem
            if u:
                up[e] = u
        out.append(digit)
        if k + 1 < alpha and up:
            carry = pmul(up, Q, p ** (alpha - k - 1))
        else:
            carry = {}
    return DigitTuple(out, nvars)


# ---------------------------------------------------------------------------
# initial digits


def initial_digits_from(num, den, Q, ring: RingSpec) -> DigitTuple:
    """Digits of num * den^(p^(alpha-1)-1) mod p^alpha, where den is congruent to Q mod p.

    Uses T_k = ((num * Q^(k+1)/den - sum_{i<k} p^i T_i Q^(k-i)) / p^k) mod p with
    Q^(k+1)/den expanded as sum_{m>=1} C(k+1, m) den^(m-1) (Q-den)^(k+1-m).
    """
    nvars = Q.nvars if isinstance(Q, Poly) else len(next(iter(Q)))
    num = num.terms if isinstance(num, Poly) else num
    den = den.terms if isinstance(den, Poly) else den
    Q = Q.terms if isinstance(Q, Poly) else Q
    p, alpha, M = ring.p, ring.alpha, ring.modulus
    one = {(0,) * nvars: 1}
    den = pclean(den, M)
    delta = padd(Q, den, M, scale=-1)
    if any(c % p for c in delta.values()):
        raise InvariantViolation("Q is not congruent to the denominator mod p")
    dpow = [one]
    epow = [one]
    for _ in range(alpha):
        dpow.append(pmul(dpow[-1], den, M))
        epow.append(pmul(epow[-1], delta, M))
    digits = []
    acc: dict = {}
    pk = 1
    for k in range(alpha):
        mod = pk * p
        qq: dict = {}
        for m in range(1, k + 2):
            qq = padd(qq, pmul(dpow[m - 1], epow[k + 1 - m], mod), mod, scale=comb(k + 1, m))
        target = pmul(num, qq, mod)
        diff = padd(target, acc, mod, scale=-1) if acc else target
        T = _split(diff, pk, p)
        digits.append(T)
        if k + 1 < alpha:
            acc = pmul(padd(acc, T, M, scale=pk), Q, M)
        pk = mod
    return DigitTuple(digits, nvars)


def initial_digits(curve: CurveSpec, ring: RingSpec | None = None) -> DigitTuple:
    """Digits of S_0 = y dP/dy (P/y)^(p^(alpha-1)-1) mod p^alpha."""
    ring = ring or curve.ring
    P = curve.P.reduce(ring.modulus)
    num = P.euler(1)
    den = P.shift((0, -1))
    return initial_digits_from(num, den, make_Q(curve), ring)


# ---------------------------------------------------------------------------
# val / rep


def _power_size_estimate(Q: dict, e: int) -> int:
    if not Q or e == 0:
        return 1
    nvars = len(next(iter(Q)))
    size = 1
    for v in range(nvars):
        span = max(x[v] for x in Q) - min(x[v] for x in Q)
        size *= e * span + 1
    return size


def _check_budget(Q: dict, e: int, budget: int | None):
    budget = monomial_budget() if budget is None else budget
    est = _power_size_estimate(Q, e)
    if est > budget:
        raise BudgetExceeded(f"Q^{e} may have up to {est} monomials (budget {budget})")


def val(t: DigitTuple, Q, ring: RingSpec, budget: int | None = None) -> Poly:
    """Expand sum_k T_k p^k Q^(p^(alpha-1)-1-k) mod p^alpha (small cases only)."""
    Qt = Q.terms if isinstance(Q, Poly) else Q
    p, alpha, M = ring.p, ring.alpha, ring.modulus
    if len(t.digits) != alpha:
        raise ValueError("digit count does not match alpha")
    e = p ** (alpha - 1) - 1
    _check_budget(Qt, e, budget)
    out: dict = {}
    for k, T in enumerate(t.digits):
        if T:
            term = pmul(T, _cached_power(pkey(Qt), e - k, M, t.nvars), M)
            out = padd(out, term, M, scale=p**k)
    return Poly._wrap(out, t.nvars)


def _lex_exact_div(A: dict, B: dict, p: int) -> dict:
    """A / B over F_p for Laurent polynomials, or NotRepresentable."""
    if not A:
        return {}
    nvars = len(next(iter(B)))
    amin = tuple(min(e[v] for e in A) for v in range(nvars))
    bmin = tuple(min(e[v] for e in B) for v in range(nvars))
    Ap = {tuple(x - m for x, m in zip(e, amin)): c for e, c in A.items()}
    Bp = {tuple(x - m for x, m in zip(e, bmin)): c for e, c in B.items()}
    lead = max(Bp)
    linv = pow(Bp[lead], -1, p)
    blist = list(Bp.items())
    rem = dict(Ap)
    quot = {}
    while rem:
        top = max(rem)
        diff = tuple(a - b for a, b in zip(top, lead))
        if min(diff) < 0:
            raise NotRepresentable("digit equation has no Laurent-polynomial solution")
        c = rem[top] * linv % p
        quot[diff] = c
        for e, bc in blist:
            k = tuple(x + y for x, y in zip(e, diff))
            v = (rem.get(k, 0) - c * bc) % p
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    shift = tuple(a - b for a, b in zip(amin, bmin))
    return {tuple(x + s for x, s in zip(e, shift)): c for e, c in quot.items()}


def rep(S, Q, ring: RingSpec, budget: int | None = None) -> DigitTuple:
    """The unique digit tuple with val(rep(S)) = S, solved one digit at a time."""
    nvars = Q.nvars if isinstance(Q, Poly) else len(next(iter(Q)))
    St = S.terms if isinstance(S, Poly) else S
    Qt = Q.terms if isinstance(Q, Poly) else Q
    p, alpha, M = ring.p, ring.alpha, ring.modulus
    e = p ** (alpha - 1) - 1
    _check_budget(Qt, e, budget)
    cur = pclean(St, M)
    digits = []
    for k in range(alpha):
        mod = p ** (alpha - k)
        qp = _cached_power(pkey(Qt), e - k, mod, nvars)
        T = _lex_exact_div(pclean(cur, p), pclean(qp, p), p)
        digits.append(T)
        rest = padd(cur, pmul(T, qp, mod), mod, scale=-1)
        cur = _split(rest, p, mod // p) if k + 1 < alpha else {}
    return DigitTuple(digits, nvars)


# ---------------------------------------------------------------------------
# outputs


def output_of(t: DigitTuple, Q, ring: RingSpec) -> int:
    """sum_k ct(T_k) p^k c^-(k+1) mod p^alpha with c the constant term of Q."""
    Qt = Q.terms if isinstance(Q, Poly) else Q
    zero = (0,) * t.nvars
    M, p = ring.modulus, ring.p
    cinv = pow(Qt[zero] % M, -1, M)
    total = 0
    ck = cinv
    pk = 1
    for T in t.digits:
        total += T.get(zero, 0) * pk * ck
        pk *= p
        ck = ck * cinv % M
    return total % M


def expanded_output(S: Poly, Q, ring: RingSpec) -> int:
    """Constant term of S divided by the constant term of Q^(p^(alpha-1))."""
    Qt = Q.terms if isinstance(Q, Poly) else Q
    zero = (0,) * S.nvars
    M = ring.modulus
    c = pow(Qt[zero], ring.p ** (ring.alpha - 1), M)
    return S.terms.get(zero, 0) * pow(c, -1, M) % M


def direct_lambda(S: Poly, Q, r: int, ring: RingSpec, diagonal: bool = False) -> Poly:
    """lambda_r(S) = Lambda_r(S Q^(p^alpha - p^(alpha-1))) by full expansion."""
    Qt = Q.terms if isinstance(Q, Poly) else Q
    p, M = ring.p, ring.modulus
    shifts = (r,) * S.nvars if diagonal else (r,) + (0,) * (S.nvars - 1)
    factor = _binned_power(pkey(Qt), ring.totient, M, S.nvars, p)
    return Poly._wrap(pcartier_mul(S.terms, factor, shifts, p, M), S.nvars)


@lru_cache(maxsize=256)
def _cached_power(qkey: tuple, e: int, mod: int, nvars: int) -> dict:
    return ppow(dict(qkey), e, mod, nvars)


@lru_cache(maxsize=64)
def _binned_power(qkey: tuple, e: int, mod: int, nvars: int, p: int):
    return pbin(_cached_power(qkey, e, mod, nvars), p)


# ---------------------------------------------------------------------------
# boxes and projections


@dataclass(frozen=True)
class DigitBox:
    """Exponent boxes W, V and the interior of V for digit tuples."""

    kind: str
    h: int
    d: int
    alpha: int

    def __post_init__(self):
        if self.kind not in ("W", "V", "V-interior"):
            raise ValueError(f"unknown box kind {self.kind!r}")

    def allows(self, k: int, i: int, j: int) -> bool:
        h, d = self.h, self.d
        if self.kind == "V-interior":
            return 1 <= i <= (k + 1) * h - 1 and max(-k, -i) <= j <= (k + 1) * (d - 1) - 1
        xmax = (k + 1) * h - 1 if self.kind == "W" else (k + 1) * h
        return 0 <= i <= xmax and j <= (k + 1) * (d - 1) and j >= -k and j >= -i

    def contains(self, t: DigitTuple) -> bool:
        for k, T in enumerate(t.digits):
            for i, j in T:
                if not self.allows(k, i, j):
                    return False
        return True

    def dimension(self) -> int:
        total = 0
        for k in range(self.alpha):
            xmax = (k + 1) * self.h
            ymax = (k + 1) * (self.d - 1)
            for i in range(0, xmax + 1):
                for j in range(-k, ymax + 1):
                    if self.allows(k, i, j):
                        total += 1
        return total


def project_digits(t: DigitTuple, axis: str, i: int) -> DigitTuple:
    """Project T_k onto the slice at index (k+1)*i along ``axis`` (x or y)."""
    fixed = {"x": 0, "y": 1}[axis]
    free = 1 - fixed
    out = []
    for k, T in enumerate(t.digits):
        idx = (k + 1) * i
        out.append({(e[free],): c for e, c in T.items() if e[fixed] == idx})
    return DigitTuple(out, 1)


def digit_degrees(t: DigitTuple) -> list[tuple]:
    """(deg_x, deg_y, mindeg_y) per digit; None for zero digits."""
    out = []
    for T in t.digits:
        if not T:
            out.append(None)
        else:
            out.append((max(e[0] for e in T), max(e[1] for e in T), min(e[1] for e in T)))
    return out


def random_digit_tuple(rng, p: int, alpha: int, box: DigitBox, density: float = 0.5) -> DigitTuple:
    """Uniform-ish random canonical tuple supported in ``box``."""
    digits = []
    for k in range(alpha):
        T = {}
        for i in range(0, (k + 1) * box.h + 1):
            for j in range(-k, (k + 1) * (box.d - 1) + 1):
                if box.allows(k, i, j) and rng.random() < density:
                    c = rng.randrange(1, p)
                    T[(i, j)] = c
        digits.append(T)
    return DigitTuple(digits, 2)

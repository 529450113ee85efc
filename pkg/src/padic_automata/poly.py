"""Sparse (Laurent) polynomials with integer coefficients.

A polynomial is a mapping from exponent tuples to nonzero integer
coefficients. Reduction modulo a prime power is always explicit (every
arithmetic helper takes an optional ``mod``), because the numeration code
needs to move between Z/p, Z/p^j and plain integers freely.

The dict-level helpers (``padd``, ``pmul``, ...) are the hot paths used by the
automaton builder; :class:`Poly` is the immutable public wrapper.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import inf

from .modarith import RingSpec, is_prime

Terms = dict  # dict[tuple[int, ...], int]


# ---------------------------------------------------------------------------
# dict-level kernels


def pclean(a: Terms, mod: int | None = None) -> Terms:
    if mod is None:
        return {e: c for e, c in a.items() if c}
    out = {}
    for e, c in a.items():
        c %= mod
        if c:
            out[e] = c
    return out


def padd(a: Terms, b: Terms, mod: int | None = None, scale: int = 1) -> Terms:
    """Return ``a + scale*b``."""
    out = dict(a)
    get = out.get
    for e, c in b.items():
        out[e] = get(e, 0) + scale * c
    return pclean(out, mod)


def pscale(a: Terms, c: int, mod: int | None = None) -> Terms:
    return pclean({e: c * v for e, v in a.items()}, mod)


def pmul(a: Terms, b: Terms, mod: int | None = None) -> Terms:
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return {}
    out: Terms = {}
    get = out.get
    bitems = list(b.items())
    nv = len(next(iter(b)))
    if nv == 2:
        for (ai, aj), ac in a.items():
            for (bi, bj), bc in bitems:
                k = (ai + bi, aj + bj)
                out[k] = get(k, 0) + ac * bc
    elif nv == 1:
        for (ai,), ac in a.items():
            for (bi,), bc in bitems:
                k = (ai + bi,)
                out[k] = get(k, 0) + ac * bc
    else:
        for ae, ac in a.items():
            for be, bc in bitems:
                k = tuple(x + y for x, y in zip(ae, be))
                out[k] = get(k, 0) + ac * bc
    return pclean(out, mod)


def ppow(a: Terms, e: int, mod: int | None = None, nvars: int | None = None) -> Terms:
    if e < 0:
        raise ValueError("negative power of a polynomial")
    if nvars is None:
        if not a:
            return {} if e else {}
        nvars = len(next(iter(a)))
    result: Terms = {(0,) * nvars: 1}
    if mod == 1:
        return {}
    base = pclean(a, mod)
    while e:
        if e & 1:
            result = pmul(result, base, mod)
        e >>= 1
        if e:
            base = pmul(base, base, mod)
    return pclean(result, mod)


def pcartier(a: Terms, shifts: tuple[int, ...], p: int) -> Terms:
    """Keep terms whose exponents are congruent to ``shifts`` mod p and divide
    the exponents by p."""
    out = {}
    for e, c in a.items():
        ok = True
        for x, s in zip(e, shifts):
            if (x - s) % p:
                ok = False
                break
        if ok:
            out[tuple((x - s) // p for x, s in zip(e, shifts))] = c
    return out


class ResidueBins(dict):
    """Terms grouped by exponent residues mod p: {residues: [(exps, coeff), ...]}."""


def pbin(b: Terms, p: int) -> ResidueBins:
    bins = ResidueBins()
    for e, c in b.items():
        bins.setdefault(tuple(x % p for x in e), []).append((e, c))
    return bins


def pcartier_mul(a: Terms, b, shifts: tuple[int, ...], p: int, mod: int | None = None) -> Terms:
    """pcartier(pmul(a, b), shifts, p) without forming the unused residue classes."""
    if not a or not b:
        return {}
    bins = b if isinstance(b, ResidueBins) else pbin(b, p)
    out: Terms = {}
    get = out.get
    if len(shifts) == 2:
        r, s = shifts
        for (ai, aj), ac in a.items():
            for (bi, bj), bc in bins.get(((r - ai) % p, (s - aj) % p), ()):
                k = ((ai + bi - r) // p, (aj + bj - s) // p)
                out[k] = get(k, 0) + ac * bc
        return pclean(out, mod)
    for ae, ac in a.items():
        need = tuple((s - x) % p for x, s in zip(ae, shifts))
        for be, bc in bins.get(need, ()):
            k = tuple((x + y - s) // p for x, y, s in zip(ae, be, shifts))
            out[k] = get(k, 0) + ac * bc
    return pclean(out, mod)


def pfrobenius(a: Terms, p: int) -> Terms:
    """Substitute x_i -> x_i^p."""
    return {tuple(p * x for x in e): c for e, c in a.items()}


def pshift(a: Terms, by: tuple[int, ...]) -> Terms:
    return {tuple(x + s for x, s in zip(e, by)): c for e, c in a.items()}


def pdiv_exact_scalar(a: Terms, d: int) -> Terms:
    out = {}
    for e, c in a.items():
        q, r = divmod(c, d)
        if r:
            raise ArithmeticError(f"coefficient {c} at {e} is not divisible by {d}")
        if q:
            out[e] = q
    return out


def pdeg(a: Terms, var: int) -> float | int:
    if not a:
        return -inf
    return max(e[var] for e in a)


def pmindeg(a: Terms, var: int) -> float | int:
    if not a:
        return inf
    return min(e[var] for e in a)


def pkey(a: Terms) -> tuple:
    return tuple(sorted(a.items()))


# ---------------------------------------------------------------------------
# public wrapper

DEFAULT_VARS = {1: ("z",), 2: ("x", "y")}


def default_variables(nvars: int) -> tuple[str, ...]:
    if nvars in DEFAULT_VARS:
        return DEFAULT_VARS[nvars]
    return tuple(f"x{i}" for i in range(1, nvars + 1))


class Poly:
    """Immutable sparse Laurent polynomial in ``nvars`` variables."""

    __slots__ = ("nvars", "terms", "_key")

    def __init__(self, terms=None, nvars: int = 2, mod: int | None = None):
        terms = {} if terms is None else terms
        self.nvars = nvars
        cleaned = {}
        for e, c in dict(terms).items():
            e = (e,) if isinstance(e, int) else tuple(e)
            if len(e) != nvars:
                raise ValueError(f"exponent {e} does not have {nvars} components")
            if mod is not None:
                c %= mod
            if c:
                cleaned[e] = cleaned.get(e, 0) + c
        self.terms = pclean(cleaned, mod)
        self._key = None

    @classmethod
    def _wrap(cls, terms: Terms, nvars: int) -> "Poly":
        obj = cls.__new__(cls)
        obj.nvars = nvars
        obj.terms = terms
        obj._key = None
        return obj

    @classmethod
    def constant(cls, c: int, nvars: int = 2) -> "Poly":
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def monomial(cls, exps, c: int = 1) -> "Poly":
        exps = tuple(exps)
        return cls({exps: c}, len(exps))

    # -- comparison / hashing
    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = pkey(self.terms)
        return self._key

    def __eq__(self, other):
        if isinstance(other, int):
            return self.terms == ({(0,) * self.nvars: other} if other else {})
        if not isinstance(other, Poly):
            return NotImplemented
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, self.key))

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(sorted(self.terms.items()))

    def __getitem__(self, exps) -> int:
        if isinstance(exps, int):
            exps = (exps,)
        return self.terms.get(tuple(exps), 0)

    # -- arithmetic (integer coefficients; reduce explicitly)
    def _coerce(self, other) -> "Poly":
        if isinstance(other, int):
            return Poly.constant(other, self.nvars)
        if other.nvars != self.nvars:
            raise ValueError("variable count mismatch")
        return other

    def __add__(self, other):
        other = self._coerce(other)
        return Poly._wrap(padd(self.terms, other.terms), self.nvars)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Poly._wrap(padd(self.terms, other.terms, scale=-1), self.nvars)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Poly._wrap({e: -c for e, c in self.terms.items()}, self.nvars)

    def __mul__(self, other):
        if isinstance(other, int):
            return Poly._wrap(pscale(self.terms, other), self.nvars)
        other = self._coerce(other)
        return Poly._wrap(pmul(self.terms, other.terms), self.nvars)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return Poly._wrap(ppow(self.terms, e, nvars=self.nvars), self.nvars)

    def mul(self, other: "Poly", mod: int | None = None) -> "Poly":
        return Poly._wrap(pmul(self.terms, self._coerce(other).terms, mod), self.nvars)

    def pow(self, e: int, mod: int | None = None) -> "Poly":
        return Poly._wrap(ppow(self.terms, e, mod, self.nvars), self.nvars)

    def reduce(self, mod: int) -> "Poly":
        return Poly._wrap(pclean(self.terms, mod), self.nvars)

    def cartier(self, shifts, p: int) -> "Poly":
        return Poly._wrap(pcartier(self.terms, tuple(shifts), p), self.nvars)

    def frobenius(self, p: int) -> "Poly":
        return Poly._wrap(pfrobenius(self.terms, p), self.nvars)

    def shift(self, by) -> "Poly":
        return Poly._wrap(pshift(self.terms, tuple(by)), self.nvars)

    def exact_div(self, d: int) -> "Poly":
        return Poly._wrap(pdiv_exact_scalar(self.terms, d), self.nvars)

    def deg(self, var: int = 0):
        return pdeg(self.terms, var)

    def mindeg(self, var: int = 0):
        return pmindeg(self.terms, var)

    def constant_term(self) -> int:
        return self.terms.get((0,) * self.nvars, 0)

    def max_coefficient(self) -> int:
        return max(self.terms.values(), default=0)

    def derivative(self, var: int) -> "Poly":
        out = {}
        for e, c in self.terms.items():
            if e[var]:
                f = list(e)
                f[var] -= 1
                out[tuple(f)] = c * e[var]
        return Poly._wrap(pclean(out), self.nvars)

    def euler(self, var: int) -> "Poly":
        """x_var * d/dx_var."""
        return Poly._wrap(pclean({e: c * e[var] for e, c in self.terms.items()}), self.nvars)

    def substitute_monomials(self, images: list[tuple[int, ...]], nvars: int | None = None) -> "Poly":
        """Replace variable i by the monomial with exponent vector images[i]."""
        nv = len(images[0]) if nvars is None else nvars
        out: Terms = {}
        for e, c in self.terms.items():
            new = [0] * nv
            for k, img in zip(e, images):
                for t in range(nv):
                    new[t] += k * img[t]
            t = tuple(new)
            out[t] = out.get(t, 0) + c
        return Poly._wrap(pclean(out), nv)

    def is_polynomial(self) -> bool:
        return all(x >= 0 for e in self.terms for x in e)

    def to_str(self, variables=None) -> str:
        return format_poly(self, variables)

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"Poly({format_poly(self)!r}, nvars={self.nvars})"


def cartier_bi(S: Poly, r: int, s: int, p: int) -> Poly:
    if not (0 <= r < p and 0 <= s < p):
        raise ValueError("digits must lie in [0, p)")
    return S.cartier((r, s), p)


def project(S: Poly, axis: str, index: int) -> Poly:
    """Univariate slice of a bivariate polynomial at a fixed exponent.

    ``axis='x'`` fixes the x-exponent and returns a polynomial in y (kept as the
    single variable ``z``); ``axis='y'`` fixes the y-exponent.
    """
    if axis == "x":
        fixed, free = 0, 1
    elif axis == "y":
        fixed, free = 1, 0
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return Poly._wrap({(e[free],): c for e, c in S.terms.items() if e[fixed] == index}, 1)


def mul(A: Poly, B: Poly, mod: int | None = None) -> Poly:
    return A.mul(B, mod)


def power(A: Poly, e: int, mod: int | None = None) -> Poly:
    return A.pow(e, mod)


# ---------------------------------------------------------------------------
# printing and parsing


def _format_monomial(e: tuple[int, ...], variables) -> str:
    parts = []
    for v, k in zip(variables, e):
        if k == 1:
            parts.append(v)
        elif k:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def format_poly(P: Poly, variables=None) -> str:
    """Deterministic text form: terms in decreasing lexicographic exponent order."""
    if not P.terms:
        return "0"
    variables = variables or default_variables(P.nvars)
    pieces = []
    for e, c in sorted(P.terms.items(), reverse=True):
        mono = _format_monomial(e, variables)
        neg = c < 0
        a = -c if neg else c
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        if not pieces:
            pieces.append(f"-{body}" if neg else body)
        else:
            pieces.append(f" - {body}" if neg else f" + {body}")
    return "".join(pieces)


class PolySyntaxError(SyntaxError):
    def __init__(self, msg: str, text: str, offset: int):
        super().__init__(f"{msg} at offset {offset}")
        self.msg = msg
        self.text = text
        self.offset = offset


class UnknownVariable(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|(.))")


def _tokenize(text: str):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else m.end()
        if m.group(1) is not None:
            toks.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch in "+-*^()":
                toks.append((ch, ch, start))
            else:
                raise PolySyntaxError(f"unexpected character {ch!r}", text, start)
        pos = m.end()
    toks.append(("end", None, len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.variables = variables
        self.index = {v: i for i, v in enumerate(variables)}
        self.toks = _tokenize(text)
        self.i = 0
        self.n = len(variables)

    def peek(self):
        return self.toks[self.i]

    def take(self, kind=None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            self.fail(f"expected {kind!r}")
        self.i += 1
        return tok

    def fail(self, msg):
        tok = self.peek()
        what = "end of input" if tok[0] == "end" else repr(self.text[tok[2]:tok[2] + 1] if tok[0] != "int" else str(tok[1]))
        raise PolySyntaxError(f"{msg}, found {what}", self.text, tok[2])

    def parse(self) -> Terms:
        out = self.expr()
        if self.peek()[0] != "end":
            self.fail("unexpected token")
        return out

    def expr(self) -> Terms:
        acc = self.term()
        while self.peek()[0] in "+-" and self.peek()[0] != "end":
            op = self.take()[0]
            rhs = self.term()
            acc = padd(acc, rhs, scale=1 if op == "+" else -1)
        return acc

    def term(self) -> Terms:
        acc = self.unary()
        while self.peek()[0] == "*":
            self.take()
            acc = pmul(acc, self.unary()) if acc else {}
        return acc

    def unary(self) -> Terms:
        if self.peek()[0] == "-":
            self.take()
            return pscale(self.unary(), -1)
        return self.power()

    def power(self) -> Terms:
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            sign = 1
            if self.peek()[0] == "-":
                self.take()
                sign = -1
            tok = self.peek()
            if tok[0] != "int":
                self.fail("expected integer exponent")
            self.take()
            e = sign * tok[1]
            if e < 0:
                if len(base) != 1:
                    raise PolySyntaxError("negative exponent needs a monomial base", self.text, tok[2])
                (exps, c), = base.items()
                if c not in (1, -1):
                    raise PolySyntaxError("negative exponent needs a unit monomial", self.text, tok[2])
                return {tuple(x * e for x in exps): c ** (-e)}
            return ppow(base, e, nvars=self.n) if base or e == 0 else ({} if e else {(0,) * self.n: 1})
        return base

    def atom(self) -> Terms:
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.take()
            return {(0,) * self.n: tok[1]} if tok[1] else {}
        if kind == "name":
            self.take()
            name = tok[1]
            if name not in self.index:
                raise UnknownVariable(f"unknown variable {name!r} at offset {tok[2]} (expected one of {', '.join(self.variables)})")
            e = [0] * self.n
            e[self.index[name]] = 1
            nxt = self.peek()
            if nxt[0] in ("int", "name", "("):
                self.fail("implicit multiplication is not allowed")
            return {tuple(e): 1}
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")") if self.peek()[0] == ")" else self.fail("expected ')'")
            return inner
        self.fail("expected a number, variable or '('")


def parse(expr: str, variables=("x", "y"), mod: int | None = None) -> Poly:
    """Parse polynomial text over the given variable names.

    >>> str(parse("x*y^2+(x+1)*y+x"))
    'x*y^2 + x*y + x + y'
    """
    variables = tuple(variables)
    terms = _Parser(expr, variables).parse()
    return Poly(terms, len(variables), mod)


# ---------------------------------------------------------------------------
# curves


class InvalidCurve(ValueError):
    pass


@dataclass(frozen=True)
class CurveSpec:
    """A bivariate P(x, y) defining a Furstenberg series over Z/p^alpha."""

    P: Poly
    ring: RingSpec
    h: int
    d: int
    hk: tuple[int, ...]
    dk: tuple[int, ...]
    polynomial_trivial: bool = field(default=False)

    @property
    def p(self) -> int:
        return self.ring.p

    @property
    def alpha(self) -> int:
        return self.ring.alpha

    def at_alpha(self, alpha: int, source: Poly | None = None) -> "CurveSpec":
        """The same curve over Z/p^alpha (re-reduced from ``source`` if given)."""
        return curve_derived(source if source is not None else self.P, RingSpec(self.ring.p, alpha))


def curve_derived(P: Poly, ring: RingSpec) -> CurveSpec:
    if P.nvars != 2:
        raise InvalidCurve("P must be bivariate in x, y")
    if not P.is_polynomial():
        raise InvalidCurve("P must be a polynomial (no negative exponents)")
    P = P.reduce(ring.modulus)
    p = ring.p
    if P[(0, 0)] % ring.modulus:
        raise InvalidCurve("P(0,0) must be 0")
    if P[(0, 1)] % p == 0:
        raise InvalidCurve("dP/dy(0,0) must be a unit mod p (coefficient of y is divisible by p)")
    hk, dk = [], []
    for k in range(ring.alpha):
        Pk = P.reduce(p ** (k + 1))
        hk.append(int(Pk.deg(0)))
        dk.append(int(Pk.deg(1)))
    h, d = hk[0], dk[0]
    return CurveSpec(P, ring, h, d, tuple(hk), tuple(dk), polynomial_trivial=(h == 0))

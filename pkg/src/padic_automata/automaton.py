"""Construction, minimization, evaluation and serialization of DFAOs.

Automata read the base-p digits of n least significant first. State 0 is the
initial state. States are discovered breadth first with symbols in increasing
order, so numbering depends only on the input.
"""

from __future__ import annotations

import json
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .errors import InvalidDenominator, StateBudgetExceeded, state_budget
from .modarith import RingSpec
from .numeration import (
    DigitTuple,
    ZTable,
    build_ztable,
    digit_step,
    initial_digits,
    initial_digits_from,
    make_Q,
    output_of,
)
from .poly import CurveSpec, Poly, format_poly, pcartier, pkey, pmul, ppow

JSON_VERSION = 1

# below this frontier size a process pool costs more than it saves
_PARALLEL_THRESHOLD = 512


class UnsupportedFormat(ValueError):
    pass


@dataclass
class Automaton:
    p: int
    alpha: int
    transitions: list
    outputs: list
    keys: list | None = None
    source: dict = field(default_factory=dict)
    initial: int = 0

    @property
    def ring(self) -> RingSpec:
        return RingSpec(self.p, self.alpha)

    @property
    def size(self) -> int:
        return len(self.outputs)

    def __len__(self):
        return len(self.outputs)

    def run(self, symbols) -> int:
        return self.run_from(self.initial, symbols)

    def run_from(self, q: int, symbols) -> int:
        for s in symbols:
            q = self.transitions[q][s]
        return q

    def eval(self, n: int) -> int:
        return evaluate(self, n)

    def sequence(self, count: int) -> list[int]:
        return [evaluate(self, n) for n in range(count)]

    def leading_zero_insensitive(self) -> bool:
        return all(self.outputs[row[0]] == self.outputs[q] for q, row in enumerate(self.transitions))

    def __eq__(self, other):
        if not isinstance(other, Automaton):
            return NotImplemented
        return to_json_dict(self) == to_json_dict(other)


def base_digits(n: int, p: int) -> list[int]:
    """Base-p digits of n, least significant first; [] for n = 0."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = []
    while n:
        n, r = divmod(n, p)
        out.append(r)
    return out


def evaluate(a: Automaton, n: int) -> int:
    return a.outputs[a.run(base_digits(n, a.p))]


# ---------------------------------------------------------------------------
# breadth-first construction

_WORKER: dict = {}


def _worker_init(kind, payload):
    _WORKER["kind"] = kind
    _WORKER["payload"] = payload


def _worker_images(states):
    return [_images(_WORKER["kind"], _WORKER["payload"], s) for s in states]


def _images(kind, payload, state):
    if kind == "digits":
        zt = payload
        return [digit_step(state, r, zt) for r in range(zt.p)]
    step = payload
    return [step(state, r) for r in range(step.p)]


def _bfs(start, kind, payload, p, output, budget, workers):
    index = {start: 0}
    keys = [start]
    transitions: list = [None]
    frontier = [0]
    pool = None
    try:
        while frontier:
            states = [keys[q] for q in frontier]
            if workers and workers > 1 and len(states) >= _PARALLEL_THRESHOLD:
                if pool is None:
                    pool = ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(kind, payload))
                chunk = max(1, len(states) // (4 * workers))
                parts = [states[i:i + chunk] for i in range(0, len(states), chunk)]
                images = [img for part in pool.map(_worker_images, parts) for img in part]
            else:
                images = [_images(kind, payload, s) for s in states]
            nxt = []
            for q, imgs in zip(frontier, images):
                row = []
                for s in imgs:
                    j = index.get(s)
                    if j is None:
                        j = len(keys)
                        if j >= budget:
                            raise StateBudgetExceeded(f"more than {budget} states")
                        index[s] = j
                        keys.append(s)
                        transitions.append(None)
                        nxt.append(j)
                    row.append(j)
                transitions[q] = row
            frontier = nxt
    finally:
        if pool is not None:
            pool.shutdown()
    outputs = [output(s) for s in keys]
    return transitions, outputs, keys


def curve_source(curve: CurveSpec) -> dict:
    return {"mode": "algebraic", "poly": format_poly(curve.P)}


def build_algebraic(curve: CurveSpec, ring: RingSpec | None = None, *, workers: int | None = None,
                    budget: int | None = None, keep_keys: bool = True) -> Automaton:
    """Unminimized automaton for the Furstenberg series of P modulo p^alpha."""
    ring = ring or curve.ring
    if ring != curve.ring:
        curve = curve.at_alpha(ring.alpha)
    Q = make_Q(curve)
    zt = build_ztable(Q, ring)
    start = initial_digits(curve, ring)
    budget = state_budget() if budget is None else budget
    transitions, outputs, keys = _bfs(
        start, "digits", zt, ring.p, lambda t: output_of(t, Q, ring), budget, workers
    )
    return Automaton(ring.p, ring.alpha, transitions, outputs, keys if keep_keys else None, curve_source(curve))


def build_from_digits(start: DigitTuple, zt: ZTable, output, *, workers=None, budget=None, source=None) -> Automaton:
    budget = state_budget() if budget is None else budget
    transitions, outputs, keys = _bfs(start, "digits", zt, zt.p, output, budget, workers)
    return Automaton(zt.p, zt.alpha, transitions, outputs, keys, source or {})


# ---------------------------------------------------------------------------
# diagonals


@dataclass(frozen=True)
class DiagonalSpec:
    """Diagonal of numerator/denominator in m >= 2 variables."""

    numerator: Poly
    denominator: Poly

    def __post_init__(self):
        if self.numerator.nvars != self.denominator.nvars:
            raise ValueError("numerator and denominator use different variable counts")
        if self.m < 2:
            raise ValueError("a diagonal needs at least two variables")
        for F in (self.numerator, self.denominator):
            if not F.is_polynomial():
                raise ValueError("diagonal inputs must be polynomials")

    @property
    def m(self) -> int:
        return self.numerator.nvars

    def h(self, p: int) -> tuple[int, ...]:
        N, D = self.numerator.reduce(p), self.denominator.reduce(p)
        out = []
        for i in range(self.m):
            out.append(int(max(N.deg(i) if N else 0, D.deg(i) if D else 0)))
        return tuple(out)

    def validate(self, p: int):
        if self.denominator.constant_term() % p == 0:
            raise InvalidDenominator("denominator constant term is divisible by p")


def shear_spec(curve: CurveSpec) -> DiagonalSpec:
    """num = y dP/dy(xy, y), den = P(xy, y)/y, whose diagonal is the Furstenberg series."""
    P = curve.P
    img = [(1, 1), (0, 1)]
    num = P.euler(1).substitute_monomials(img)
    den = P.substitute_monomials(img).shift((0, -1))
    return DiagonalSpec(num, den)


class PolyStep:
    """Direct transition S -> Lambda_(r,...,r)(S Qd^(p^alpha - p^(alpha-1))) mod p^alpha."""

    def __init__(self, Qd: dict, ring: RingSpec, nvars: int):
        self.p = ring.p
        self.mod = ring.modulus
        self.nvars = nvars
        self.factor = ppow(Qd, ring.totient, ring.modulus, nvars)

    def __call__(self, state, r):
        prod = pmul(dict(state), self.factor, self.mod)
        return pkey(pcartier(prod, (r,) * self.nvars, self.p))


def build_diagonal(spec: DiagonalSpec, ring: RingSpec, *, route: str | None = None,
                   workers: int | None = None, budget: int | None = None) -> Automaton:
    """Automaton for the diagonal coefficients of num/den modulo p^alpha.

    ``route`` is "digits" (two variables only) or "poly"; by default two
    variables use digits and more use polynomial states.
    """
    spec.validate(ring.p)
    p, M = ring.p, ring.modulus
    m = spec.m
    route = route or ("digits" if m == 2 else "poly")
    budget = state_budget() if budget is None else budget
    N = spec.numerator.reduce(M)
    D = spec.denominator.reduce(M)
    Qd = D.reduce(p)
    source = {"mode": "diagonal", "num": format_poly(spec.numerator), "den": format_poly(spec.denominator),
              "m": m, "route": route}
    if route == "digits":
        if m != 2:
            raise ValueError("digit route needs exactly two variables")
        zt = build_ztable(Qd, ring, diagonal=True)
        start = initial_digits_from(N, D, Qd, ring)
        return build_from_digits(start, zt, lambda t: output_of(t, Qd, ring), workers=workers,
                                 budget=budget, source=source)
    if route != "poly":
        raise ValueError(f"unknown route {route!r}")
    zero = (0,) * m
    S0 = pmul(N.terms, ppow(D.terms, p ** (ring.alpha - 1) - 1, M, m), M) if N else {}
    step = PolyStep(Qd.terms, ring, m)
    cinv = pow(pow(Qd.terms[zero], p ** (ring.alpha - 1), M), -1, M)

    def out(key):
        return dict(key).get(zero, 0) * cinv % M

    transitions, outputs, keys = _bfs(pkey(S0), "poly", step, p, out, budget, workers)
    polys = [Poly._wrap(dict(k), m) for k in keys]
    return Automaton(p, ring.alpha, transitions, outputs, polys, source)


# ---------------------------------------------------------------------------
# minimization


def _renumber(a: Automaton, block: list[int], nblocks: int) -> Automaton:
    """Quotient automaton with blocks renumbered in BFS order from the initial block."""
    rep = [None] * nblocks
    for q, b in enumerate(block):
        if rep[b] is None:
            rep[b] = q
    order = {block[a.initial]: 0}
    queue = deque([block[a.initial]])
    seq = []
    while queue:
        b = queue.popleft()
        seq.append(b)
        for s in a.transitions[rep[b]]:
            nb = block[s]
            if nb not in order:
                order[nb] = len(order)
                queue.append(nb)
    transitions = [[order[block[s]] for s in a.transitions[rep[b]]] for b in seq]
    outputs = [a.outputs[rep[b]] for b in seq]
    src = dict(a.source)
    src["minimized"] = True
    return Automaton(a.p, a.alpha, transitions, outputs, None, src)


def _moore(a: Automaton) -> tuple[list[int], int]:
    labels: dict = {}
    block = [labels.setdefault(o, len(labels)) for o in a.outputs]
    count = len(labels)
    while True:
        labels = {}
        new = []
        for q, row in enumerate(a.transitions):
            sig = (block[q], *(block[s] for s in row))
            new.append(labels.setdefault(sig, len(labels)))
        if len(labels) == count:
            return new, count
        block, count = new, len(labels)


def _hopcroft(a: Automaton) -> tuple[list[int], int]:
    n, p = a.size, a.p
    inverse = [[[] for _ in range(n)] for _ in range(p)]
    for q, row in enumerate(a.transitions):
        for r, s in enumerate(row):
            inverse[r][s].append(q)
    groups: dict = {}
    for q, o in enumerate(a.outputs):
        groups.setdefault(o, []).append(q)
    blocks = [set(g) for g in groups.values()]
    where = [0] * n
    for i, b in enumerate(blocks):
        for q in b:
            where[q] = i
    work = deque((i, r) for i in range(len(blocks)) for r in range(p))
    in_work = set(work)
    while work:
        splitter, r = work.popleft()
        in_work.discard((splitter, r))
        pre = set()
        for s in blocks[splitter]:
            pre.update(inverse[r][s])
        touched: dict = {}
        for q in pre:
            touched.setdefault(where[q], set()).add(q)
        for bi, hit in touched.items():
            if len(hit) == len(blocks[bi]):
                continue
            rest = blocks[bi] - hit
            small, large = (hit, rest) if len(hit) <= len(rest) else (rest, hit)
            blocks[bi] = large
            ni = len(blocks)
            blocks.append(small)
            for q in small:
                where[q] = ni
            # the new block holds the smaller half, so queuing it suffices
            for rr in range(p):
                work.append((ni, rr))
                in_work.add((ni, rr))
    return where, len(blocks)


def shifted(a: Automaton, k: int = 1) -> Automaton:
    """Automaton for n -> a(n + k), adding k with a carry while reading digits least significant first.

    Assumes ``a`` is insensitive to trailing zero symbols.
    """
    if k < 0:
        raise ValueError("shift must be nonnegative")
    p = a.p
    start = (a.initial, k)
    index = {start: 0}
    order = [start]
    transitions = []
    i = 0
    while i < len(order):
        q, c = order[i]
        row = []
        for d in range(p):
            s = d + c
            nxt = (a.transitions[q][s % p], s // p)
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
            row.append(index[nxt])
        transitions.append(row)
        i += 1
    outputs = [a.outputs[a.run_from(q, base_digits(c, p))] for q, c in order]
    source = dict(a.source, shift=a.source.get("shift", 0) + k)
    return Automaton(p, a.alpha, transitions, outputs, None, source)


def minimize(a: Automaton, method: str = "moore") -> Automaton:
    """Minimal DFAO generating the same sequence (Moore or Hopcroft refinement)."""
    if method == "moore":
        block, count = _moore(a)
    elif method == "hopcroft":
        block, count = _hopcroft(a)
    else:
        raise ValueError(f"unknown minimization method {method!r}")
    return _renumber(a, block, count)


# ---------------------------------------------------------------------------
# serialization


def _key_json(key):
    if isinstance(key, DigitTuple):
        return key.to_lists()
    if isinstance(key, Poly):
        return [[*e, c] for e, c in sorted(key.terms.items())]
    raise TypeError(f"cannot serialize key of type {type(key).__name__}")


def to_json_dict(a: Automaton) -> dict:
    states = []
    for q in range(a.size):
        rec = {"id": q, "output": a.outputs[q], "next": list(a.transitions[q])}
        if a.keys is not None:
            rec["key"] = _key_json(a.keys[q])
        states.append(rec)
    out = {"version": JSON_VERSION, "p": a.p, "alpha": a.alpha, "source": a.source, "initial": a.initial}
    if a.keys is not None and a.keys:
        out["key_kind"] = "digits" if isinstance(a.keys[0], DigitTuple) else "poly"
    out["states"] = states
    return out


def serialize(a: Automaton, fmt: str = "json") -> bytes:
    if fmt == "json":
        return (json.dumps(to_json_dict(a), sort_keys=False, separators=(",", ":")) + "\n").encode()
    if fmt == "dot":
        lines = ["digraph automaton {", "  rankdir=LR;", '  start [shape=point];', f"  start -> q{a.initial};"]
        for q in range(a.size):
            lines.append(f'  q{q} [label="{q}/{a.outputs[q]}"];')
        for q, row in enumerate(a.transitions):
            for r, s in enumerate(row):
                lines.append(f'  q{q} -> q{s} [label="{r}"];')
        lines.append("}")
        return ("\n".join(lines) + "\n").encode()
    raise UnsupportedFormat(f"unsupported format {fmt!r}")


def deserialize(data: bytes | str) -> Automaton:
    doc = json.loads(data)
    if doc.get("version") != JSON_VERSION:
        raise ValueError(f"unsupported automaton version {doc.get('version')!r}")
    states = sorted(doc["states"], key=lambda s: s["id"])
    if [s["id"] for s in states] != list(range(len(states))):
        raise ValueError("state ids must be 0..n-1")
    p = int(doc["p"])
    keys = None
    kind = doc.get("key_kind")
    if kind and all("key" in s for s in states):
        if kind == "digits":
            keys = [DigitTuple.from_lists(s["key"], len(_first_term(s["key"])) - 1 if _first_term(s["key"]) else 2)
                    for s in states]
        else:
            keys = []
            for s in states:
                terms = {tuple(t[:-1]): t[-1] for t in s["key"]}
                nv = len(s["key"][0]) - 1 if s["key"] else int(doc["source"].get("m", 2))
                keys.append(Poly._wrap(terms, nv))
    transitions = [list(s["next"]) for s in states]
    for row in transitions:
        if len(row) != p or any(not 0 <= x < len(states) for x in row):
            raise ValueError("transition table is not total")
    return Automaton(p, int(doc["alpha"]), transitions, [int(s["output"]) for s in states], keys,
                     doc.get("source", {}), int(doc.get("initial", 0)))


def _first_term(key):
    for d in key:
        if d:
            return d[0]
    return None

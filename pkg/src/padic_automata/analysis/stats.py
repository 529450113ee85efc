"""Which residues a sequence attains, and which it attains infinitely often."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


@dataclass(frozen=True)
class ResidueStats:
    modulus: int
    attained: frozenset
    attained_infinitely: frozenset

    @property
    def density(self) -> Fraction:
        return Fraction(len(self.attained), self.modulus)

    @property
    def density_infinitely(self) -> Fraction:
        return Fraction(len(self.attained_infinitely), self.modulus)


def _reachable(a, sources) -> set[int]:
    seen = set(sources)
    stack = list(sources)
    while stack:
        q = stack.pop()
        for nq in a.transitions[q]:
            if nq not in seen:
                seen.add(nq)
                stack.append(nq)
    return seen


def _cycle_states(a, states: set[int]) -> set[int]:
    """States of ``states`` lying on a directed cycle (Tarjan SCCs, iterative)."""
    index, low, on, stack, out = {}, {}, set(), [], set()
    counter = 0
    for root in sorted(states):
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            q, i = work.pop()
            if i == 0:
                index[q] = low[q] = counter
                counter += 1
                stack.append(q)
                on.add(q)
            succ = a.transitions[q]
            if i < len(succ):
                work.append((q, i + 1))
                nq = succ[i]
                if nq not in index:
                    work.append((nq, 0))
                elif nq in on:
                    low[q] = min(low[q], index[nq])
                continue
            if low[q] == index[q]:
                comp = []
                while True:
                    w = stack.pop()
                    on.discard(w)
                    comp.append(w)
                    if w == q:
                        break
                if len(comp) > 1 or q in succ:
                    out.update(comp)
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[q])
    return out


def residue_stats(a) -> ResidueStats:
    """Residues over canonical inputs: the empty word for n = 0, otherwise words ending in a nonzero symbol.

    r is attained infinitely iff some state reachable from a cycle state moves to an
    output-r state on a nonzero symbol.
    """
    reach = _reachable(a, [a.initial])
    ends = {a.outputs[a.initial]}
    for q in reach:
        for s, nq in enumerate(a.transitions[q]):
            if s:
                ends.add(a.outputs[nq])
    pumped = _reachable(a, _cycle_states(a, reach))
    inf = set()
    for q in pumped:
        for s, nq in enumerate(a.transitions[q]):
            if s:
                inf.add(a.outputs[nq])
    return ResidueStats(a.ring.modulus, frozenset(ends), frozenset(inf))

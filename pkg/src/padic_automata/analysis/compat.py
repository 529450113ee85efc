"""Compatibility of digit tuples across precisions."""

from __future__ import annotations

from ..modarith import RingSpec
from ..numeration import build_ztable, digit_step, initial_digits, make_Q
from ..poly import CurveSpec


def digit_compat_check(curve: CurveSpec, alpha: int, beta: int, word) -> bool:
    """Feed ``word`` at precisions alpha and beta; the first beta digits must agree."""
    if not 1 <= beta <= alpha:
        raise ValueError("need 1 <= beta <= alpha")
    p = curve.p
    Q = make_Q(curve)  # the lift depends on P mod p only, so both levels share it
    tuples = []
    for level in (alpha, beta):
        ring = RingSpec(p, level)
        c = curve.at_alpha(level)
        zt = build_ztable(Q, ring)
        t = initial_digits(c, ring)
        for r in word:
            t = digit_step(t, int(r), zt)
        tuples.append(t)
    return tuples[0].truncate(beta) == tuples[1]

"""Landau-type functions and the closed-form automaton size bounds."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache
from math import prod

from ..modarith import RingSpec, ceil_log, floor_log, lcm
from ..poly import CurveSpec, Poly, project


@lru_cache(maxsize=None)
def achievable_lcms(n: int) -> frozenset:
    """lcm values of partitions of every integer in 0..n (0 contributes lcm 1)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    # reach[t] = lcms of partitions of exactly t, built part size by part size
    reach = [set() for _ in range(n + 1)]
    reach[0].add(1)
    for part in range(1, n + 1):
        for t in range(n, part - 1, -1):
            # allow any number of copies of ``part``: repeated parts don't change the lcm,
            # so one copy plus padding by 1s covers everything
            for k in range(1, t // part + 1):
                for v in reach[t - k * part]:
                    reach[t].add(lcm(v, part))
    out = set()
    for s in reach:
        out |= s
    return frozenset(out)


def landau_g(n: int) -> int:
    """Maximum lcm over the partitions of n."""
    if n < 1:
        raise ValueError("landau_g needs n >= 1")
    return max(achievable_lcms(n))


def lcm_partitions(bounds) -> int:
    """The multi-argument Landau function: max lcm over partitions of integers up to each bound."""
    bounds = list(bounds)
    if not 1 <= len(bounds) <= 4:
        raise ValueError("between one and four arguments are supported")
    if any(b < 1 for b in bounds):
        raise ValueError("arguments must be >= 1")
    best = {1}
    for b in bounds:
        best = {lcm(x, y) for x in best for y in achievable_lcms(b)}
    return max(best)


def W_size(alpha: int, h: int, d: int) -> int:
    return alpha * (alpha + 1) * ((2 * h * d - 1) * alpha + h * d + 1) // 6


def V_size(alpha: int, h: int, d: int) -> int:
    return alpha * (alpha + 1) * ((2 * h * d - 1) * alpha + (h + 3) * d + 1) // 6


def transient_u(p: int, alpha: int, h: int, d: int, h_top: int, d_top: int) -> int:
    return floor_log(p, max(alpha * (h_top - h), alpha * (d_top - d) + 1)) + 1


def _border_u(p: int, alpha: int, gap: int) -> int:
    return floor_log(p, max(p ** (alpha - 1) * gap, 1)) + 1


@dataclass
class BoundReport:
    p: int
    alpha: int
    h: int
    d: int
    N: int | None = None
    dimV: int | None = None
    u: int | None = None
    u_prop: int | None = None
    u_l: int | None = None
    u_r: int | None = None
    u_t: int | None = None
    u_b: int | None = None
    p_N: int | None = None
    total_bound: int | None = None
    fields_bound: int | None = None
    diag_N: int | None = None
    diag_total: int | None = None
    multivariate_M: int | None = None
    p_M: int | None = None
    landau: dict | None = None
    script_L: dict | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _deg(F: Poly) -> int:
    return int(F.deg(0))


def curve_bounds(curve: CurveSpec, ring: RingSpec | None = None) -> BoundReport:
    from ..numeration import make_Q

    ring = ring or curve.ring
    if ring != curve.ring:
        curve = curve.at_alpha(ring.alpha)
    p, alpha, h, d = ring.p, ring.alpha, curve.h, curve.d
    rep = BoundReport(p, alpha, h, d)
    rep.N = W_size(alpha, h, d)
    rep.dimV = V_size(alpha, h, d)
    rep.p_N = p**rep.N
    # both transient forms read the same degrees
    rep.u = transient_u(p, alpha, h, d, int(curve.P.deg(0)), int(curve.P.deg(1)))
    rep.u_prop = transient_u(p, alpha, h, d, curve.hk[-1], curve.dk[-1])
    if h < 1:
        return rep
    Q = make_Q(curve)
    rep.u_l = _border_u(p, alpha, d - 1 - _deg(project(Q, "x", 0)))
    rep.u_r = _border_u(p, alpha, d - 1 - _deg(project(Q, "x", h)))
    rep.u_t = _border_u(p, alpha, h - _deg(project(Q, "y", d - 1)))
    L = lcm_partitions([h, d, d])
    g = landau_g(h + 2 * d)
    if L > g:
        raise AssertionError("multi-argument Landau value exceeds g(h + 2d)")
    rep.script_L = {"h,d,d": L}
    rep.landau = {f"g({h + 2 * d})": g}
    rep.total_bound = (
        p**rep.N
        + p ** (rep.N - alpha * (alpha + 1) * (h + d - 1) // 2) * L
        + max(rep.u_l, rep.u_r, rep.u_t)
        + ceil_log(p, max(h, d - 1, 1))
        + max(alpha, 2 * (alpha - 1))
        + (p**rep.u - 1) // (p - 1)
    )
    if alpha == 1:
        rep.fields_bound = (
            p ** (h * d) + p ** ((h - 1) * (d - 1)) * L + floor_log(p, h) + ceil_log(p, max(h, d - 1, 1)) + 3
        )
    return rep


def diagonal_bounds(spec, ring: RingSpec) -> BoundReport:
    """Bivariate diagonal bound (m = 2) and the multivariate p^M bound."""
    p, alpha = ring.p, ring.alpha
    hs = spec.h(p)
    rep = BoundReport(p, alpha, hs[0], hs[1] if len(hs) > 1 else 0)
    rep.multivariate_M = sum(prod((k + 1) * hi + 1 for hi in hs) for k in range(alpha))
    rep.p_M = p**rep.multivariate_M
    if spec.m != 2 or min(hs) < 1:
        return rep
    h, d = hs
    N, D = spec.numerator.reduce(ring.modulus), spec.denominator.reduce(ring.modulus)
    h_top = int(max(N.deg(0) if N else 0, D.deg(0)))
    d_top = int(max(N.deg(1) if N else 0, D.deg(1)))
    rep.diag_N = alpha * (alpha + 1) * (2 * alpha + 1) * h * d // 6
    rep.N = rep.diag_N
    rep.p_N = p**rep.diag_N
    # includes the +1 used by the diagonal transient proposition
    rep.u = floor_log(p, max(alpha * (h_top - h), alpha * (d_top - d), 1)) + 1
    Qd = spec.denominator.reduce(p)
    rep.u_l = _border_u(p, alpha, d - _deg(project(Qd, "x", 0)) if project(Qd, "x", 0) else d)
    rep.u_r = _border_u(p, alpha, d - _deg(project(Qd, "x", h)) if project(Qd, "x", h) else d)
    rep.u_b = _border_u(p, alpha, h - _deg(project(Qd, "y", 0)) if project(Qd, "y", 0) else h)
    rep.u_t = _border_u(p, alpha, h - _deg(project(Qd, "y", d)) if project(Qd, "y", d) else h)
    L = lcm_partitions([h, h, d, d])
    rep.script_L = {"h,h,d,d": L}
    rep.diag_total = (
        p**rep.diag_N
        + p ** (rep.diag_N - alpha * ((alpha + 1) * (h + d) - 2) // 2) * L
        + max(rep.u_l, rep.u_r, rep.u_b, rep.u_t)
        + ceil_log(p, max(h, d))
        + max(alpha, 2 * (alpha - 1))
        + (p**rep.u - 1) // (p - 1)
    )
    return rep


def bound_report(obj, ring: RingSpec | None = None) -> BoundReport:
    if isinstance(obj, CurveSpec):
        return curve_bounds(obj, ring)
    if ring is None:
        raise ValueError("a ring is required for diagonal bounds")
    return diagonal_bounds(obj, ring)

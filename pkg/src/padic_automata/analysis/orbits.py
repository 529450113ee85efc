"""Orbits under the zero transition, bivariate (digit space) and univariate."""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import OrbitBudgetExceeded, PreconditionViolated, orbit_budget
from ..modarith import RingSpec, ceil_log, floor_log, lcm
from ..numeration import DigitTuple, ZTable, digit_step
from ..poly import Poly, pcartier, pclean, pkey, pmul, ppow


@dataclass(frozen=True)
class OrbitRecord:
    transient: int
    period: int

    @property
    def size(self) -> int:
        return self.transient + self.period


def iterate_orbit(start, step, key=None, budget: int | None = None):
    """Exact transient and period of ``start`` under ``step``; also returns the visited states."""
    budget = orbit_budget() if budget is None else budget
    key = key or (lambda s: s)
    seen = {}
    states = []
    cur = start
    while True:
        k = key(cur)
        if k in seen:
            first = seen[k]
            return OrbitRecord(first, len(states) - first), states
        if len(states) >= budget:
            raise OrbitBudgetExceeded(f"no repeat within {budget} steps")
        seen[k] = len(states)
        states.append(cur)
        cur = step(cur)


def orbit_zero(start: DigitTuple, zt: ZTable, budget: int | None = None) -> OrbitRecord:
    """Orbit of a digit tuple under the symbol-0 transition."""
    record, _ = iterate_orbit(start, lambda t: digit_step(t, 0, zt), budget=budget)
    return record


def orbit_states(start: DigitTuple, zt: ZTable, budget: int | None = None) -> list[DigitTuple]:
    _, states = iterate_orbit(start, lambda t: digit_step(t, 0, zt), budget=budget)
    return states


# ---------------------------------------------------------------------------
# univariate


def lambda0(S: Poly, R: Poly, ring: RingSpec) -> Poly:
    """Lambda_0(S R^(p^alpha - p^(alpha-1))) mod p^alpha."""
    M = ring.modulus
    factor = ppow(R.reduce(M).terms, ring.totient, M, 1)
    return Poly._wrap(pclean(pcartier(pmul(S.terms, factor, M), (0,), ring.p)), 1)


def _deg_mod_p(R: Poly, p: int) -> int:
    Rp = R.reduce(p)
    if not Rp:
        raise PreconditionViolated("R vanishes mod p")
    return int(Rp.deg(0))


def check_univariate_domain(S: Poly, R: Poly, ring: RingSpec):
    p, alpha = ring.p, ring.alpha
    if R.mindeg(0) < -1:
        raise PreconditionViolated("R must lie in z^-1 R[z]")
    r = _deg_mod_p(R, p)
    if S and (S.mindeg(0) < 1 - p ** (alpha - 1) or S.deg(0) > p ** (alpha - 1) * r):
        raise PreconditionViolated(
            f"need {1 - p ** (alpha - 1)} <= mindeg S and deg S <= {p ** (alpha - 1) * r}"
        )


def orbit_time_bound(R: Poly, ring: RingSpec) -> tuple[int, int]:
    """(t, l): transient allowance and lcm of irreducible factor degrees of R mod p."""
    from .periods import factor_fp

    p, alpha = ring.p, ring.alpha
    fac = factor_fp(R, p)
    es = [e for _, e in fac.factors]
    t = max(floor_log(p, max(fac.e0, 1)) + alpha, ceil_log(p, max(es + [1])) + 2 * (alpha - 1))
    ell = lcm(*(int(F.deg(0)) for F, _ in fac.factors)) if fac.factors else 1
    return t, ell


@dataclass(frozen=True)
class UnivariateOrbit:
    record: OrbitRecord
    t: int
    ell: int

    @property
    def bound(self) -> int:
        return self.t + self.ell


def univariate_orbit(S: Poly, R: Poly, ring: RingSpec, budget: int | None = None) -> UnivariateOrbit:
    check_univariate_domain(S, R, ring)
    M = ring.modulus
    factor = ppow(R.reduce(M).terms, ring.totient, M, 1)
    p = ring.p

    def step(key):
        return pkey(pcartier(pmul(dict(key), factor, M), (0,), p))

    record, _ = iterate_orbit(pkey(S.reduce(M).terms), step, budget=budget)
    t, ell = orbit_time_bound(R, ring)
    return UnivariateOrbit(record, t, ell)


def contraction_steps(s: int, r: int, ring: RingSpec) -> int:
    """Steps after which deg lambda_0^n(S) <= p^(alpha-1) r when deg S = s exceeds it."""
    top = ring.p ** (ring.alpha - 1) * r
    if s <= top:
        return 0
    return floor_log(ring.p, s - top) + 1

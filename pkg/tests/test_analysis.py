import itertools
import random
from math import lcm

import pytest
from sympy.utilities.iterables import partitions

from padic_automata import (DiagonalSpec, Poly, RingSpec, build_algebraic, build_diagonal, build_ztable,
                            initial_digits, make_Q, minimize, parse, series_solve)
from padic_automata.analysis import (bound_report, contraction_steps, digit_compat_check, factor_fp, landau_g,
                                     lambda0, lcm_partitions, orbit_zero, ord_mod, period_rational, residue_stats,
                                     univariate_orbit)
from padic_automata.analysis.periods import inverse_series, minimal_period
from padic_automata.automaton import Automaton
from padic_automata.errors import HypothesisViolated, PreconditionViolated, ZeroPolynomial

from conftest import MOTZKIN, STATE_COUNTS, ORBIT_SIZES, make_curve


def z(text):
    return parse(text, ("z",))


# ---------------------------------------------------------------------------
# Landau functions


def brute_lcms(n):
    out = {1}
    for k in range(1, n + 1):
        for part in partitions(k):
            out.add(lcm(*part.keys()))
    return out


def test_landau_small_values():
    assert landau_g(5) == 6
    assert landau_g(7) == 12
    assert lcm_partitions([1, 1, 1]) == 1
    assert lcm_partitions([3, 2, 2]) == 6


@pytest.mark.parametrize("n", range(1, 13))
def test_landau_brute_force(n):
    assert landau_g(n) == max(brute_lcms(n))


def test_script_L_brute_force():
    sets = {n: brute_lcms(n) for n in range(1, 13)}
    rng = random.Random(0)
    for _ in range(40):
        args = [rng.randint(1, 12) for _ in range(rng.randint(1, 4))]
        want = max(lcm(*c) for c in itertools.product(*(sets[a] for a in args)))
        assert lcm_partitions(args) == want


def test_script_L_at_most_g():
    for h in range(1, 6):
        for d in range(1, 4):
            assert lcm_partitions([h, d, d]) <= landau_g(h + 2 * d)


# ---------------------------------------------------------------------------
# bounds


@pytest.mark.parametrize("P,p,alpha,states,pN", STATE_COUNTS)
def test_pN_column_and_total(P, p, alpha, states, pN):
    curve, ring = make_curve(P, p, alpha)
    b = bound_report(curve, ring)
    assert b.p_N == pN
    assert states <= b.total_bound


def test_bound_examples():
    curve, ring = make_curve("(x+1)*y+x", 2, 1)
    b = bound_report(curve, ring)
    assert b.N == 1
    assert b.fields_bound is not None
    curve, ring = make_curve("(x+1)*y+x", 2, 2)
    assert bound_report(curve, ring).N == 4


@pytest.mark.parametrize("den,p,alpha", [("1-x-y", 2, 2), ("1-x-y-x*y", 3, 2), ("1+x+y^2", 2, 3)])
def test_diagonal_sizes_within_bounds(den, p, alpha):
    spec = DiagonalSpec(parse("1"), parse(den))
    ring = RingSpec(p, alpha)
    a = build_diagonal(spec, ring)
    b = bound_report(spec, ring)
    assert a.size <= b.p_M
    assert a.size <= b.diag_total
    assert b.diag_N == alpha * (alpha + 1) * (2 * alpha + 1) * b.h * b.d // 6


def test_multivariate_M():
    names = ("x1", "x2", "x3")
    spec = DiagonalSpec(parse("1", names), parse("1-x1-x2-x3", names))
    ring = RingSpec(2, 2)
    b = bound_report(spec, ring)
    assert b.multivariate_M == 2**3 + 3**3
    assert build_diagonal(spec, ring).size <= b.p_M


# ---------------------------------------------------------------------------
# orbits


@pytest.mark.parametrize("P,p,alpha,size", ORBIT_SIZES)
def test_zero_orbit_sizes(P, p, alpha, size):
    curve, ring = make_curve(P, p, alpha)
    rec = orbit_zero(initial_digits(curve, ring), build_ztable(make_Q(curve), ring))
    assert rec.size == size


@pytest.mark.parametrize("alpha", range(1, 6))
def test_orbit_family(alpha):
    curve, ring = make_curve("x^2*y^2+(x^2+x+1)*y+x^2", 2, alpha)
    rec = orbit_zero(initial_digits(curve, ring), build_ztable(make_Q(curve), ring))
    assert (rec.transient, rec.period) == (alpha + 1, 2 ** (alpha + 1))


def test_univariate_orbit_examples():
    R = z("-z^2-z+1")
    ring = RingSpec(2, 2)
    assert univariate_orbit(Poly({}, 1), R, ring).record.size == 1
    res = univariate_orbit(z("1"), R, ring)
    assert res.ell == 2
    assert res.record.size <= res.t + res.ell
    with pytest.raises(PreconditionViolated):
        univariate_orbit(z("z^5"), R, ring)


def test_univariate_orbits_within_bound():
    rng = random.Random(4)
    for p, alpha in [(2, 2), (2, 3), (3, 2)]:
        ring = RingSpec(p, alpha)
        for _ in range(15):
            R = Poly({(i,): rng.randrange(ring.modulus) for i in range(rng.randint(2, 4))}, 1) + Poly({(0,): 1}, 1)
            if R.reduce(p).deg(0) < 1 or R[(0,)] % p == 0:
                continue
            r = int(R.reduce(p).deg(0))
            top = p ** (alpha - 1) * r
            S = Poly({(i,): rng.randrange(ring.modulus) for i in range(1 - p ** (alpha - 1), top + 1)}, 1)
            res = univariate_orbit(S, R, ring)
            assert res.record.size <= res.bound


def test_degree_contraction():
    rng = random.Random(9)
    ring = RingSpec(2, 2)
    R = z("-z^2-z+1")
    r = 2
    for _ in range(20):
        s = rng.randint(5, 40)
        S = Poly({(i,): rng.randrange(4) for i in range(s)}, 1) + Poly({(s,): 1}, 1)
        for _ in range(contraction_steps(s, r, ring)):
            S = lambda0(S, R, ring)
        assert not S or S.deg(0) <= 2 * r


# ---------------------------------------------------------------------------
# factorization and periods


def monic_polys(p, deg):
    for tail in itertools.product(range(p), repeat=deg):
        yield Poly({(deg,): 1, **{(i,): c for i, c in enumerate(reversed(tail)) if c}}, 1)


def is_irreducible(F, p):
    n = int(F.deg(0))
    for k in range(1, n // 2 + 1):
        for G in monic_polys(p, k):
            if _divides(G, F, p):
                return False
    return True


def _divides(G, F, p):
    rem = {e[0]: c % p for e, c in F.terms.items() if c % p}
    g = int(G.deg(0))
    while rem and max(rem) >= g:
        top = max(rem)
        c = rem[top]
        for (e,), gc in G.terms.items():
            k = top - g + e
            v = (rem.get(k, 0) - c * gc) % p
            if v:
                rem[k] = v
            else:
                rem.pop(k, None)
    return not rem


def test_factor_examples():
    f = factor_fp(z("z^2+z+1"), 2)
    assert [(int(F.deg(0)), e) for F, e in f.factors] == [(2, 1)]
    f = factor_fp(z("z^3+z"), 2)
    assert f.e0 == 1 and f.factors == ((z("z+1"), 2),)
    f = factor_fp(z("-z^2-z+1"), 2)
    assert len(f.factors) == 1 and f.L == 3
    with pytest.raises(ZeroPolynomial):
        factor_fp(z("2*z"), 2)


def test_factor_random():
    rng = random.Random(1)
    for p in (2, 3, 5):
        for _ in range(15):
            R = Poly({(i,): rng.randrange(p) for i in range(rng.randint(1, 7))}, 1) + Poly({(7,): 1}, 1)
            f = factor_fp(R, p)
            assert f.expand() == R.reduce(p)
            assert len({F for F, _ in f.factors}) == len(f.factors)
            for F, _ in f.factors:
                assert F[(int(F.deg(0)),)] == 1 and is_irreducible(F, p)


def test_period_example():
    rep = period_rational(z("-z^2-z+1"), RingSpec(2, 2))
    assert rep.empirical_T_mod_p == 6
    assert rep.empirical_mod_palpha == 12
    assert rep.bound_power % rep.empirical_mod_palpha == 0
    assert rep.bound_square % rep.empirical_mod_palpha == 0


@pytest.mark.parametrize("p,alpha", [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1)])
def test_single_trailing_zero(p, alpha):
    if alpha == 1:
        T = z("-z^2-z+1")
        seq = inverse_series(T, 400, p)
        m = minimal_period(seq)
        assert seq[m - 1] == 0 and seq[m - 2] != 0
    rep = period_rational(z("-z^2-z+1"), RingSpec(p, alpha))
    assert rep.trailing_zeros == rep.expected_trailing_zeros


def test_period_random_battery():
    rng = random.Random(6)
    done = 0
    while done < 40:
        p, alpha = rng.choice([(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1)])
        M = p**alpha
        deg = rng.randint(1, 4)
        coeffs = {(i,): rng.randrange(M) for i in range(deg + 1)}
        if coeffs[(0,)] % p == 0 or coeffs[(deg,)] % p == 0:
            continue
        rep = period_rational(Poly(coeffs, 1), RingSpec(p, alpha))
        assert rep.bound_mod_p % rep.empirical_mod_p == 0
        assert rep.bound_power % rep.empirical_mod_palpha == 0
        assert rep.bound_square % rep.empirical_mod_palpha == 0
        assert rep.trailing_zeros == rep.expected_trailing_zeros
        done += 1


def test_period_hypotheses():
    with pytest.raises(HypothesisViolated):
        period_rational(z("z^2"), RingSpec(2, 2))
    with pytest.raises(HypothesisViolated):
        period_rational(z("1+2*z"), RingSpec(2, 2))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_ord_of_lcm(p):
    for rs in [(1,), (2,), (2, 3), (3, 4), (1, 2, 5)]:
        L = lcm(*(p**r - 1 for r in rs))
        if L > 1:
            assert ord_mod(p, L) == lcm(*rs)


# ---------------------------------------------------------------------------
# residue statistics


def test_stats_single_state():
    a = Automaton(2, 1, [[0, 0]], [1])
    st = residue_stats(a)
    assert st.attained == {1} and st.attained_infinitely == {1}


def test_stats_zero_then_ones():
    curve, ring = make_curve("(x+1)*y+x", 2, 1)
    st = residue_stats(build_algebraic(curve, ring))
    assert st.attained == {0, 1}
    assert st.attained_infinitely == {1}


def test_stats_against_sampling():
    curve, ring = make_curve("y^2-y+x", 2, 6)
    a = minimize(build_algebraic(curve, ring))
    st = residue_stats(a)
    seq = series_solve(curve, 2**14, ring).coeffs
    assert set(seq) <= st.attained
    assert st.attained_infinitely <= st.attained
    # anything attained infinitely shows up again in the second half of a long prefix
    assert st.attained_infinitely <= set(seq[2**13:])


# ---------------------------------------------------------------------------
# compatibility across precisions


def test_compat_motzkin_initial():
    curve, _ = make_curve(MOTZKIN, 2, 3)
    assert digit_compat_check(curve, 3, 2, [])
    assert digit_compat_check(curve, 3, 3, [1, 0, 1])


def test_compat_random_words():
    rng = random.Random(8)
    for P, p in [(MOTZKIN, 2), ("(x+4)*y^2+y+x", 3), ("x^2*y^2+(x^2+x+1)*y+x^2", 2)]:
        curve, _ = make_curve(P, p, 3)
        for _ in range(10):
            word = [rng.randrange(p) for _ in range(rng.randrange(12))]
            assert digit_compat_check(curve, 3, rng.randint(1, 3), word)

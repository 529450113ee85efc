"""Command-line front end.

Exit codes: 0 success, 1 parse or usage error, 2 invalid input (curve,
denominator or hypothesis), 3 budget exceeded, 4 a check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import re
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import analysis, oracle
from .automaton import (DiagonalSpec, build_algebraic, build_diagonal, deserialize, minimize, serialize)
from .errors import (BudgetExceeded, HypothesisViolated, InvalidDenominator, NotRepresentable,
                     PreconditionViolated, ZeroPolynomial)
from .modarith import RingError, RingSpec
from .numeration import (build_ztable, digit_step, direct_lambda, initial_digits, make_Q, rep, val)
from .poly import InvalidCurve, PolySyntaxError, UnknownVariable, curve_derived, default_variables, parse

EXIT_OK, EXIT_PARSE, EXIT_INPUT, EXIT_BUDGET, EXIT_CHECK = 0, 1, 2, 3, 4

_BUDGET_FLAGS = {
    "state_budget": "PADIC_STATE_BUDGET",
    "monomial_budget": "PADIC_MONOMIAL_BUDGET",
    "orbit_budget": "PADIC_ORBIT_BUDGET",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_PARSE, f"{self.prog}: error: {message}\n")


# ---------------------------------------------------------------------------
# reports


class Report:
    """Ordered key/value report, printed as text lines or as JSON."""

    def __init__(self, command: str):
        self.command = command
        self.items: list[tuple[str, object]] = []

    def add(self, key: str, value):
        self.items.append((key, value))

    def render(self, as_json: bool, deterministic: bool) -> str:
        if as_json:
            doc = {"command": self.command}
            doc.update({k: _jsonable(v) for k, v in self.items})
            if not deterministic:
                doc["generated"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
            return json.dumps(doc, indent=2) + "\n"
        return "".join(f"{k}: {_text(v)}\n" for k, v in self.items)


def _jsonable(v):
    if isinstance(v, bool) or v is None:
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, set, frozenset)):
        items = sorted(v) if isinstance(v, (set, frozenset)) else v
        return [_jsonable(x) for x in items]
    return str(v)


def _text(v) -> str:
    if isinstance(v, bool):
        return "pass" if v else "FAIL"
    if isinstance(v, (set, frozenset)):
        v = sorted(v)
    if isinstance(v, (list, tuple)):
        return ", ".join(_text(x) for x in v)
    if isinstance(v, dict):
        return ", ".join(f"{k}={_text(x)}" for k, x in v.items())
    return str(v)


# ---------------------------------------------------------------------------
# input helpers


def _ring(args) -> RingSpec:
    return RingSpec(args.p, args.alpha)


def _curve(args, ring=None):
    ring = ring or _ring(args)
    return curve_derived(parse(args.poly, ("x", "y")), ring)


def _nvars(*texts) -> int:
    idx = [int(m) for t in texts for m in re.findall(r"x(\d+)", t)]
    return max(idx) if idx else 2


def _diagonal(args) -> DiagonalSpec:
    m = args.m or _nvars(args.num, args.den)
    names = default_variables(m)
    return DiagonalSpec(parse(args.num, names), parse(args.den, names))


def _univariate(text: str):
    return parse(text, ("z",))


def _load(path: str):
    return deserialize(Path(path).read_bytes())


def _build(args):
    ring = _ring(args)
    if args.mode == "diagonal":
        if not (args.num and args.den):
            raise UsageError("diagonal mode needs --num and --den")
        spec = _diagonal(args)
        return build_diagonal(spec, ring, route=args.route, workers=args.workers), spec
    if not args.poly:
        raise UsageError("algebraic mode needs --poly")
    curve = _curve(args, ring)
    return build_algebraic(curve, ring, workers=args.workers), curve


# ---------------------------------------------------------------------------
# commands


def cmd_build(args, rep_):
    a, obj = _build(args)
    ring = a.ring
    rep_.add("states", a.size)
    m = minimize(a, args.method)
    rep_.add("minimized", m.size)
    b = analysis.bound_report(obj, ring)
    if args.mode == "algebraic":
        Q = make_Q(obj)
        orb = analysis.orbit_zero(initial_digits(obj, ring), build_ztable(Q, ring))
        rep_.add("zero orbit transient", orb.transient)
        rep_.add("zero orbit period", orb.period)
    for k, v in b.as_dict().items():
        if k not in ("p", "alpha"):
            rep_.add(k, v)
    out = m if args.minimize else a
    if args.out:
        Path(args.out).write_bytes(serialize(out, "json"))
    if args.dot:
        Path(args.dot).write_bytes(serialize(out, "dot"))
    return EXIT_OK


def cmd_minimize(args, rep_):
    a = _load(args.automaton)
    m = minimize(a, args.method)
    rep_.add("states", a.size)
    rep_.add("minimized", m.size)
    if args.out:
        Path(args.out).write_bytes(serialize(m, "json"))
    return EXIT_OK


def cmd_export(args, rep_):
    a = _load(args.automaton)
    data = serialize(a, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
        rep_.add("written", args.out)
    else:
        sys.stdout.write(data.decode())
    return EXIT_OK


def cmd_eval(args, rep_):
    a = _load(args.automaton)
    if len(args.n) == 1 and not args.json:
        sys.stdout.write(f"{a.eval(args.n[0])}\n")
        return EXIT_OK
    for n in args.n:
        rep_.add(str(n), a.eval(n))
    return EXIT_OK


def cmd_orbit(args, rep_):
    ring = _ring(args)
    if args.R is not None:
        S = _univariate(args.S or "1")
        res = analysis.univariate_orbit(S, _univariate(args.R), ring)
        rec = res.record
        rep_.add("orbit size", rec.size)
        rep_.add("transient", rec.transient)
        rep_.add("period", rec.period)
        rep_.add("bound", f"{res.t} + {res.ell}")
        return EXIT_OK
    if not args.poly:
        raise UsageError("orbit needs --poly or --R")
    curve = _curve(args, ring)
    rec = analysis.orbit_zero(initial_digits(curve, ring), build_ztable(make_Q(curve), ring))
    rep_.add("orbit size", rec.size)
    rep_.add("transient", rec.transient)
    rep_.add("period", rec.period)
    return EXIT_OK


def cmd_period(args, rep_):
    ring = _ring(args)
    r = analysis.period_rational(_univariate(args.R), ring)
    f = r.factorization
    if args.json:
        for k in ("empirical_mod_p", "empirical_T_mod_p", "empirical_mod_palpha", "bound_mod_p",
                  "bound_power", "bound_square", "trailing_zeros", "expected_trailing_zeros"):
            rep_.add(k, getattr(r, k))
    else:
        rep_.add("empirical", f"{r.empirical_mod_palpha}, bound: {r.bound_power} | {r.bound_square}")
        rep_.add("period mod p", f"{r.empirical_mod_p} (bound {r.bound_mod_p})")
        rep_.add("period of 1/T mod p", r.empirical_T_mod_p)
        rep_.add("trailing zeros", f"{r.trailing_zeros} (expected {r.expected_trailing_zeros})")
    rep_.add("factorization", _fmt_factors(f))
    rep_.add("seed", f.seed)
    return EXIT_OK


def _fmt_factors(f) -> str:
    parts = [str(f.c)]
    if f.e0:
        parts.append(f"z^{f.e0}")
    parts += [f"({F.to_str(('z',))})^{e}" for F, e in f.factors]
    return " * ".join(parts)


def cmd_bounds(args, rep_):
    ring = _ring(args)
    obj = _diagonal(args) if args.mode == "diagonal" else _curve(args, ring)
    for k, v in analysis.bound_report(obj, ring).as_dict().items():
        rep_.add(k, v)
    return EXIT_OK


def cmd_stats(args, rep_):
    if args.automaton:
        a = _load(args.automaton)
    else:
        a, _ = _build(args)
    if args.minimize:
        a = minimize(a)
    st = analysis.residue_stats(a)
    M = st.modulus
    rep_.add("attained", f"{len(st.attained)}/{M}")
    rep_.add("attained infinitely", f"{len(st.attained_infinitely)}/{M}")
    rep_.add("residues", sorted(st.attained))
    rep_.add("residues infinitely", sorted(st.attained_infinitely))
    return EXIT_OK


def _equivalence(curve, ring, a, limit):
    """digit_step against rep(direct lambda(val)) on reachable states; (checked, skipped, ok)."""
    Q = make_Q(curve)
    zt = build_ztable(Q, ring)
    checked = skipped = 0
    for q, t in enumerate(a.keys[:limit]):
        for r in range(ring.p):
            try:
                want = rep(direct_lambda(val(t, Q, ring), Q, r, ring), Q, ring)
            except (BudgetExceeded, NotRepresentable):
                skipped += 1
                continue
            if digit_step(t, r, zt) != want:
                return checked, skipped, False
            checked += 1
    return checked, skipped, True


def cmd_check(args, rep_):
    ring = _ring(args)
    curve = _curve(args, ring)
    a = build_algebraic(curve, ring, workers=args.workers)
    ok_all = True

    checked, skipped, ok = _equivalence(curve, ring, a, args.max_states)
    rep_.add("digit/direct equivalence", ok)
    rep_.add("transitions compared", checked)
    rep_.add("transitions skipped", skipped)
    ok_all &= ok

    series = oracle.series_solve(curve, args.terms - 1, ring)
    ok = a.sequence(args.terms) == list(series.coeffs)
    rep_.add("oracle agreement", ok)
    rep_.add("terms compared", args.terms)
    ok_all &= ok

    rng = random.Random(args.seed)
    ok = True
    for _ in range(args.words):
        word = [rng.randrange(ring.p) for _ in range(rng.randrange(0, 12))]
        beta = rng.randint(1, ring.alpha)
        ok &= analysis.digit_compat_check(curve, ring.alpha, beta, word)
    rep_.add("digit compatibility", ok)
    rep_.add("words", args.words)
    ok_all &= ok

    b = analysis.bound_report(curve, ring)
    if b.total_bound is not None:
        ok = a.size <= b.total_bound
        rep_.add("size within bound", ok)
        ok_all &= ok
    rep_.add("states", a.size)
    return EXIT_OK if ok_all else EXIT_CHECK


def cmd_oracle(args, rep_):
    ring = _ring(args)
    if args.kind == "series":
        coeffs = oracle.series_solve(_curve(args, ring), args.n, ring).coeffs
    elif args.kind == "diagonal":
        coeffs = oracle.diagonal_expand(_diagonal(args), args.n, ring).coeffs
    else:
        curve = _curve(args, ring)

        def source(k):
            return oracle.series_solve(curve, k - 1, ring).coeffs

        rep_.add("kernel prefixes", oracle.kernel_prefixes(source, ring.p, args.e_max, args.length))
        return EXIT_OK
    if args.json:
        rep_.add("coefficients", list(coeffs))
    else:
        sys.stdout.write(", ".join(map(str, coeffs)) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing


def _common(sp, ring=True):
    if ring:
        sp.add_argument("--p", type=int, required=True, help="prime")
        sp.add_argument("--alpha", type=int, default=1, help="exponent of the modulus p^alpha")
    sp.add_argument("--json", action="store_true", help="JSON report with decimal-string numbers")
    sp.add_argument("--deterministic", action="store_true", help="omit the timestamp from JSON reports")
    sp.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    for flag in _BUDGET_FLAGS:
        sp.add_argument("--" + flag.replace("_", "-"), type=int, default=None)


def _inputs(sp):
    sp.add_argument("--mode", choices=("algebraic", "diagonal"), default="algebraic")
    sp.add_argument("--poly", help="P(x, y) for an algebraic series")
    sp.add_argument("--num", help="diagonal numerator")
    sp.add_argument("--den", help="diagonal denominator")
    sp.add_argument("--m", type=int, default=None, help="number of diagonal variables")
    sp.add_argument("--route", choices=("digits", "poly"), default=None)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="padic-automata", description="Automata for series modulo prime powers.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("build", help="construct an automaton")
    _common(sp)
    _inputs(sp)
    sp.add_argument("--method", choices=("moore", "hopcroft"), default="hopcroft")
    sp.add_argument("--minimize", action="store_true", help="write the minimized machine")
    sp.add_argument("--out", help="automaton JSON path")
    sp.add_argument("--dot", help="DOT path")
    sp.set_defaults(func=cmd_build)

    sp = sub.add_parser("minimize", help="minimize a saved automaton")
    _common(sp, ring=False)
    sp.add_argument("--automaton", required=True)
    sp.add_argument("--method", choices=("moore", "hopcroft"), default="hopcroft")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_minimize)

    sp = sub.add_parser("export", help="convert a saved automaton")
    _common(sp, ring=False)
    sp.add_argument("--automaton", required=True)
    sp.add_argument("--format", choices=("json", "dot"), default="dot")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_export)

    sp = sub.add_parser("eval", help="evaluate a saved automaton")
    _common(sp, ring=False)
    sp.add_argument("--automaton", required=True)
    sp.add_argument("--n", type=int, nargs="+", required=True)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("orbit", help="orbit under the zero transition")
    _common(sp)
    sp.add_argument("--poly")
    sp.add_argument("--S", help="univariate start S(z)")
    sp.add_argument("--R", help="univariate R(z)")
    sp.set_defaults(func=cmd_orbit)

    sp = sub.add_parser("period", help="period of 1/R^(p^(alpha-1)) modulo p^alpha")
    _common(sp)
    sp.add_argument("--R", required=True)
    sp.set_defaults(func=cmd_period)

    sp = sub.add_parser("bounds", help="closed-form size bounds")
    _common(sp)
    _inputs(sp)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("stats", help="attained residues")
    _common(sp)
    _inputs(sp)
    sp.add_argument("--automaton")
    sp.add_argument("--minimize", action="store_true")
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("check", help="cross-validation battery for a curve")
    _common(sp)
    sp.add_argument("--poly", required=True)
    sp.add_argument("--terms", type=int, default=2000)
    sp.add_argument("--words", type=int, default=50)
    sp.add_argument("--max-states", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("oracle", help="brute-force coefficients")
    sp.add_argument("kind", choices=("series", "diagonal", "kernel"))
    _common(sp)
    _inputs(sp)
    sp.add_argument("--n", type=int, default=20, help="last index")
    sp.add_argument("--e-max", type=int, default=4)
    sp.add_argument("--length", type=int, default=16)
    sp.set_defaults(func=cmd_oracle)
    return ap


_VALUE_FLAGS = ("--poly", "--num", "--den", "--R", "--S")


def _attach_values(argv):
    """Let polynomial flags take values starting with '-' ("--R -z^2-z+1")."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(_attach_values(argv))
    saved = {env: os.environ.get(env) for env in _BUDGET_FLAGS.values()}
    for flag, env in _BUDGET_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            if value <= 0:
                print(f"error: --{flag.replace('_', '-')} must be positive", file=sys.stderr)
                return EXIT_PARSE
            os.environ[env] = str(value)
    report = Report(args.command)
    try:
        code = args.func(args, report)
    except PolySyntaxError as exc:
        print(f"parse error: {exc.msg} at offset {exc.offset}", file=sys.stderr)
        return EXIT_PARSE
    except (UnknownVariable, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InvalidCurve, InvalidDenominator, HypothesisViolated, PreconditionViolated,
            ZeroPolynomial, RingError, ValueError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        for env, old in saved.items():
            if old is None:
                os.environ.pop(env, None)
            else:
                os.environ[env] = old
    if report.items:
        sys.stdout.write(report.render(args.json, args.deterministic))
    return code


if __name__ == "__main__":
    sys.exit(main())

"""Finite automata for algebraic power series and rational diagonals modulo p^alpha."""

from .automaton import (Automaton, DiagonalSpec, build_algebraic, build_diagonal, deserialize, evaluate,
                        minimize, serialize, shear_spec)
from .modarith import RingSpec
from .numeration import DigitTuple, build_ztable, digit_step, initial_digits, make_Q, output_of, rep, val
from .oracle import diagonal_expand, series_solve
from .poly import CurveSpec, Poly, curve_derived, parse

__version__ = "0.1.0"

__all__ = [
    "Automaton", "DiagonalSpec", "build_algebraic", "build_diagonal", "deserialize", "evaluate",
    "minimize", "serialize", "shear_spec", "RingSpec", "DigitTuple", "build_ztable", "digit_step",
    "initial_digits", "make_Q", "output_of", "rep", "val", "diagonal_expand", "series_solve",
    "CurveSpec", "Poly", "curve_derived", "parse",
]

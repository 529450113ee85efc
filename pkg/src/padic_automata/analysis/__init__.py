"""Orbits, periods, size bounds, residue statistics and precision compatibility."""

from .bounds import BoundReport, bound_report, curve_bounds, diagonal_bounds, landau_g, lcm_partitions
from .compat import digit_compat_check
from .orbits import OrbitRecord, UnivariateOrbit, contraction_steps, lambda0, orbit_zero, univariate_orbit
from .periods import FpFactorization, PeriodReport, factor_fp, inverse_series, minimal_period, ord_mod, period_rational
from .stats import ResidueStats, residue_stats

__all__ = [
    "BoundReport", "bound_report", "curve_bounds", "diagonal_bounds", "landau_g", "lcm_partitions",
    "digit_compat_check", "OrbitRecord", "UnivariateOrbit", "contraction_steps", "lambda0",
    "orbit_zero", "univariate_orbit", "FpFactorization", "PeriodReport", "factor_fp",
    "inverse_series", "minimal_period", "ord_mod", "period_rational", "ResidueStats", "residue_stats",
]

"""Exact and closed-form evaluation of third-order Horadam sequences and their matrix sequences."""

__version__ = "0.1.0"

from .binet import (BinetCoefficients, CubicRoots, binet_coefficients, binet_matrix_H,
                    binet_matrix_h, binet_term, cubic_roots, power_sum)
from .errors import (BinetPrecisionError, EmptyRangeError, HoradamError, IndexOutOfRangeError,
                     NonPositiveDiscriminantError, RootOfNuError, SigmaNearZeroError, ZeroTError,
                     ZeroXError)
from .identities import IdentityReport, IdentityVerdict, run_suite
from .matrix import Mat3, MulCounter, fast_term, mat_mul, mH_closed, mH_pow, mh_closed, mh_pow
from .presets import PRESETS, Preset, default_grid, generalized_tribonacci
from .sequence import (SequenceSpec, TermCache, discriminant, horadam_term, make_spec, term_range,
                       tribonacci_term)

__all__ = [
    "BinetCoefficients", "BinetPrecisionError", "CubicRoots", "EmptyRangeError", "HoradamError",
    "IdentityReport", "IdentityVerdict", "IndexOutOfRangeError", "Mat3", "MulCounter",
    "NonPositiveDiscriminantError", "PRESETS", "Preset", "RootOfNuError", "SequenceSpec",
    "SigmaNearZeroError", "TermCache", "ZeroTError", "ZeroXError", "binet_coefficients", "binet_matrix_H",
    "binet_matrix_h", "binet_term", "cubic_roots", "default_grid", "discriminant", "fast_term",
    "generalized_tribonacci", "horadam_term", "make_spec", "mat_mul", "mH_closed", "mH_pow", "mh_closed",
    "mh_pow", "power_sum", "run_suite", "term_range", "tribonacci_term",
]

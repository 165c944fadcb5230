"""Cyclotomic Euler sums, multiple values and their parity identities."""

from .context import CVal, PrecisionCtx
from .errors import (AccuracyError, CycloError, DivergenceError, DomainError, InvalidOrderError,
                     PoleCollisionError, PoleError, UnsupportedDepthError)
from .exact import MINUS_ONE, ONE, GaussianRational, RootOfUnity, bernoulli, even_zeta
from .kernels import ExpansionPoint, LaurentSeries, Phi, laurent, phi_bracket, phi_deriv, ti_bracket
from .parity import THEOREMS, CheckReport, ParityCase, check_parity, split_mrv, split_msv
from .polylog import li, t_partial, ti, zeta_partial
from .residue import (THM6, FactoredRational, IntegrandSpec, closure_check, closure_total,
                      extra_residue_sum, residue_at, rf_deriv, rf_eval, rf_shifted_taylor, rf_taylor,
                      thm6_rhs)
from .sums import SumSpec, euler_sum, evaluate, multiple_value, nested_oracle

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "CVal", "CheckReport", "CycloError", "DivergenceError", "DomainError",
    "ExpansionPoint", "FactoredRational", "GaussianRational", "IntegrandSpec", "InvalidOrderError",
    "LaurentSeries", "MINUS_ONE", "ONE", "ParityCase", "Phi", "PoleCollisionError", "PoleError",
    "PrecisionCtx", "RootOfUnity", "SumSpec", "THEOREMS", "THM6", "UnsupportedDepthError",
    "bernoulli", "check_parity", "closure_check", "closure_total", "euler_sum", "evaluate",
    "even_zeta", "extra_residue_sum", "laurent", "li", "multiple_value", "nested_oracle",
    "phi_bracket", "phi_deriv", "residue_at", "rf_deriv", "rf_eval", "rf_shifted_taylor",
    "rf_taylor", "split_mrv", "split_msv", "t_partial", "thm6_rhs", "ti", "ti_bracket",
    "zeta_partial",
]

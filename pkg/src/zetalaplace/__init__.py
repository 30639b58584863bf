"""Laplace transforms of powers of |zeta(1/2 + it)| and their expansions."""

from .arithmetic import DivisorTable, dirichlet_convolution, divisor_sieve
from .closed_forms import (MainTermCoeffs, KoberCoeffs, Provenance, atkinson_l1, atkinson_l2_k0,
                           fit_main_coeffs, fit_main_coeffs_free, kober_fit, kober_main,
                           main_term, closed_form_main_coeffs)
from .errors import (BranchCutError, CapacityError, ConvergenceError, DomainError,
                     IllConditionedError, NotFoundError, ParseError, PoleError, RangeError,
                     ToleranceError, ValidationError, ZetaLaplaceError)
from .special_functions import CONSTANTS, bessel_k0, gamma, log_gamma
from .spectral import (SpectralDatum, SpectralTable, g2_residual, parse_spectral_table,
                       partial_sum_bound, r_function, residue_r0, spectral_sum, theorem_l2)
from .transforms import (LaplaceResult, Method, MomentRecord, P4Coeffs, QuadratureConfig,
                         e2_error_term, e2_laplace, laplace_identity_residual,
                         laplace_quadrature, mellin_z2, moment_integral, trivial_bound_check)
from .zeta_line import (CriticalLineSample, abs_zeta_pow4, hardy_z, riemann_siegel_theta,
                        zeta_half_em, zeta_half_rs)

__version__ = "0.1.0"

"""Sturm-Liouville problems on time scales (finite unions of intervals and points)."""

from .coefficients import CoefficientSet, HypothesisReport, MeasureTriple, validate_hypothesis
from .expr import EvaluationError, ParseError, parse_coefficient
from .ivp import (StatePair, Trajectory, TransferMatrix, fundamental_system, solve_ivp, step_continuous,
                  step_scattered, transfer_matrix, wronskian)
from .operators import (BoundaryCondition, ValidityReport, apply_ell, apply_tau, bc_residual,
                        inner_product, symmetry_defect, validate_bc)
from .spectra import (SpectralResult, asymptotic_ratio, characteristic_function, eigenpair,
                      find_eigenvalues, green_kernel, m_function, resolvent_apply, spectral_transform,
                      spectrum, weyl_disk)
from .timescale import TimeScale, integrate, jump, measure_mass, trim

__version__ = "0.1.0"

"""Boundary null controls for fractional heat and Schrodinger equations on (0, 1)."""
from .biorthogonal import (BiorthogonalFamily, Multiplier, MultiplierConfig, SpectralProducts,
                           calibrate_g0, decay_exponent, kronecker_errors)
from .constants import ConstantReport, P_alpha, Q_alpha, kappa, mu_s, nu_s, rho, theta
from .experiments import SweepConfig, constant_audit, cost_sweep
from .numerics import CostFit, LogComplex, fit_scaling, solve_min_norm
from .simulator import TrajectoryReport, evolve, free_energy_decay
from .spectrum import EigenData, FracModel, boundary_trace, eigenvalues, gap_stats
from .synthesis import (ControlSignal, ModalState, control_cost, gramian_log_cost,
                        min_norm_control, moment_coeffs, moment_control)

__version__ = "0.1.0"

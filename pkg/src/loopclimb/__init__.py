"""Phase-field simulation of prismatic dislocation loop climb and
self-climb on a periodic domain, with a sharp-interface companion solver."""

from .config import ConfigError, RunConfig, load_config, parse_config
from .diagnostics import (EnergyReport, LoopSet, energy, extract_loops,
                          isoperimetric_ratio, loop_area, loop_perimeter)
from .dynamics import (SimState, StabilityError, StepReport,
                       chemical_potential, rhs, step_forward_euler,
                       step_semi_implicit, suggest_dt)
from .forces import ForceField, climb_force_kernel_oracle, climb_force_spectral
from .material import (MODE_ANALYSIS, MODE_PHYSICAL, ModelParams,
                       calibrated_h0, climb_cutoff, double_well,
                       double_well_prime, mobility, stabilizer, theta_cutoff)
from .runner import RunResult, build_initial_field, load_grid_dump, run, save_grid_dump
from .sharp import (CoreProfile, Curve, CurveTopologyError, VelocityCoeffs,
                    compute_coefficients, evolve_curve, solve_core_profile,
                    suggest_curve_dt)
from .spectral import (GridSpec, WaveNumbers, build_wavenumbers, coordinates,
                       divergence, frac_laplacian_half, gradient, laplacian)

__version__ = "0.1.0"

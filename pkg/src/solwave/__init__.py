"""solwave: radial solitary waves of the electrostatic Maxwell-Klein-Gordon
and Schrodinger-Poisson systems, and their nonrelativistic limits."""

__version__ = "0.1.0"

from .errors import SolwaveError
from .grid import RadialField, RadialGrid, integrate_r3, laplacian_radial, make_grid, norms
from .params import Params, admissible, regime_report
from .potentials import FieldSolveResult, solve_phi_c, solve_phi_infty
from .functionals import (
    EnergyReport,
    action_nmkg,
    action_nsp,
    gradient_nmkg,
    gradient_nsp,
    project_nehari_pohozaev,
    scaling_path_energy,
)
from .solvers import (
    Branch,
    BranchSpec,
    SolveReport,
    SolverConfig,
    continuation,
    minimize_nsp_global,
    minimize_nsp_ground,
    mountain_pass_level,
    newton_coupled,
    solve_nls_ground,
)
from .studies import (
    decay_fit,
    nonexistence_sweep,
    nonrelativistic_limit_study,
    two_branch_study,
)

__all__ = [
    "SolwaveError",
    "RadialField",
    "RadialGrid",
    "integrate_r3",
    "laplacian_radial",
    "make_grid",
    "norms",
    "Params",
    "admissible",
    "regime_report",
    "FieldSolveResult",
    "solve_phi_c",
    "solve_phi_infty",
    "EnergyReport",
    "action_nmkg",
    "action_nsp",
    "gradient_nmkg",
    "gradient_nsp",
    "project_nehari_pohozaev",
    "scaling_path_energy",
    "Branch",
    "BranchSpec",
    "SolveReport",
    "SolverConfig",
    "continuation",
    "minimize_nsp_global",
    "minimize_nsp_ground",
    "mountain_pass_level",
    "newton_coupled",
    "solve_nls_ground",
    "decay_fit",
    "nonexistence_sweep",
    "nonrelativistic_limit_study",
    "two_branch_study",
    "__version__",
]

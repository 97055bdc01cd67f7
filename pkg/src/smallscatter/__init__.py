"""Wave scattering by many small impedance particles on a uniform lattice."""
from .lattice import UniformLattice, build_lattice, collocation_grid, partition, report_points
from .material import MaterialSpec, branch_sqrt, design, h_from_target_n, n_from_h
from .kernel import build_kernel_cube, green
from .fftconv import convolve, ori_apply, spectral_kernel
from .solvers import SolveOptions, SolveReport, cocg, gmres
from .scattering import ScatteringConfig, charges, evaluate_field, incident_field, solve_ie, solve_ori, solve_red
from .compare import DiffReport, diff_grids, diff_ori_red

__version__ = "0.1.0"

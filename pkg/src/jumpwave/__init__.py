"""American option approximation under jump-diffusion dynamics."""
from .errors import (
    ConfigError,
    JumpwaveError,
    SolverError,
)
from .european import (
    BarrierSpec,
    OptionSpec,
    bs_kernel,
    european_barrier,
    european_barrier_delta,
    european_barrier_gamma,
    european_barrier_theta,
    european_vanilla,
    european_vanilla_delta,
    european_vanilla_gamma,
    european_vanilla_theta,
    rebate_value,
)
from .model import (
    JumpSpec,
    ModelParams,
    d_rho_dh,
    inverse_root,
    jump_mgf,
    laplace_exponent,
    laplace_exponent_derivative,
    zeta,
)
from .vanilla import (
    PriceReport,
    SolverSettings,
    VanillaSolution,
    american_vanilla_price,
    solve_american_vanilla,
)
from .barrier import (
    BarrierSolution,
    american_barrier_price,
    solve_american_barrier,
)
from .fd import FDResult, FDSettings, fd_american_vanilla
from .tree import TreeResult, TreeSettings, tree_barrier, tree_vanilla
from .tables import (
    SWEEPS,
    TABLES,
    TableResult,
    compute_sweep,
    compute_table,
)
from .config import RunConfig, load_config, parse_config

__version__ = "0.1.0"

__all__ = [
    "BarrierSolution",
    "BarrierSpec",
    "ConfigError",
    "FDResult",
    "FDSettings",
    "JumpSpec",
    "JumpwaveError",
    "ModelParams",
    "OptionSpec",
    "PriceReport",
    "RunConfig",
    "SWEEPS",
    "SolverError",
    "SolverSettings",
    "TABLES",
    "TableResult",
    "TreeResult",
    "TreeSettings",
    "VanillaSolution",
    "american_barrier_price",
    "american_vanilla_price",
    "bs_kernel",
    "compute_sweep",
    "compute_table",
    "d_rho_dh",
    "european_barrier",
    "european_barrier_delta",
    "european_barrier_gamma",
    "european_barrier_theta",
    "european_vanilla",
    "european_vanilla_delta",
    "european_vanilla_gamma",
    "european_vanilla_theta",
    "fd_american_vanilla",
    "inverse_root",
    "jump_mgf",
    "laplace_exponent",
    "laplace_exponent_derivative",
    "load_config",
    "parse_config",
    "rebate_value",
    "solve_american_barrier",
    "solve_american_vanilla",
    "tree_barrier",
    "tree_vanilla",
    "zeta",
]

from .base import RunStats, Solution, Stepper, adaptive_integrate, fixed_step_integrate
from .dop853 import Dop853, Dop853Workspace, combine_dop853_errors, dop853_integrate, dop853_step
from .pirk import Pirk, PirkConfig, pirk_integrate, pirk_step
from .rk4 import Rk4, rk4_integrate, rk4_step

__all__ = [
    "RunStats", "Solution", "Stepper", "adaptive_integrate", "fixed_step_integrate",
    "Dop853", "Dop853Workspace", "combine_dop853_errors", "dop853_integrate", "dop853_step",
    "Pirk", "PirkConfig", "pirk_integrate", "pirk_step",
    "Rk4", "rk4_integrate", "rk4_step",
]

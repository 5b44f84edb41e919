"""Serial and parallel explicit Runge-Kutta integration with a speculative
multi-probe step-size search."""

from .aspa import AspaConfig, AspaStats, aspa_integrate, oscillation_summary
from .control import (
    aspa_fixed_point_free,
    aspa_next_step,
    aspa_ratio,
    classical_next_step,
    growth_threshold,
    select_m,
)
from .core import (
    ButcherTableau,
    IntegrationError,
    MaxStepsExceeded,
    OdeSystem,
    StepFailure,
    StepOutcome,
    StepSizeUnderflow,
    error_norm,
    validate_tableau,
)
from .integrators import (
    Dop853,
    Dop853Workspace,
    Pirk,
    PirkConfig,
    Rk4,
    Solution,
    dop853_integrate,
    dop853_step,
    pirk_integrate,
    pirk_step,
    rk4_integrate,
    rk4_step,
)
from .parallel import ProbeExecutor, ProbeResult, ProbeTask, probe_batch, worker_pool_size
from .systems import (
    get_system,
    harmonic_oscillator,
    henon_heiles,
    hh_hamiltonian,
    replicated_henon_heiles,
    synthetic_heavy,
)
from .tableaus import dop853_tableau, gauss10_tableau, rk4_tableau

__version__ = "0.1.0"

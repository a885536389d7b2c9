"""Max-min-fair amplify-and-forward relay beamforming for multigroup multicast.

Builds Hermitian quadratic-form problem data from channel realizations, solves
the rank-one and rank-two (beamformed-Alamouti) semidefinite relaxations by
bisection, rounds by Gaussian randomization, verifies the approximation-bound
claims, and checks the SINR formulas against a symbol-level QPSK simulation.
"""

from .analysis import (
    BoundConstants,
    RotationCheck,
    bound_constant,
    empirical_tail_power,
    empirical_tail_ratio,
    joint_success_probability,
    multicast_equivalence,
    omega_of,
    phase_vector,
    verify_rotation_identities,
)
from .forms import (
    BeamformerPair,
    ProblemForms,
    build_forms,
    constraint_usage,
    eval_gamma,
    eval_theta,
    load_forms,
    save_forms,
    sinr_per_user,
)
from .gaussrand import (
    RandomizationReport,
    feasibility_scale,
    randomize_r1,
    randomize_r2,
    sample_gaussian,
)
from .linksim import LinkRunResult, simulate_bf, simulate_bfa, weights_matrix
from .network import (
    DISTRIBUTED,
    MIMO,
    ChannelSet,
    ConfigError,
    NetworkConfig,
    db_to_linear,
    linear_to_db,
    load_channels,
    load_scenario,
    make_config,
    sample_channels,
    save_channels,
    scenario_from_dict,
    validate_config,
)
from .sdr import (
    R1,
    R2,
    FeasibilityOracle,
    SdrSolution,
    SolverFailure,
    bisect_sdr,
    extract_rank_one,
    hermitian_to_real,
    numeric_rank,
    solve_feasibility,
    upper_bound_gamma,
)
from .sweep import SweepSpec, aggregate_sweep, run_sweep, write_sweep_csv

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"

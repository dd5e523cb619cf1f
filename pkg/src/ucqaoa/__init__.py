"""Hybrid QAOA / simplex solver for single-period unit commitment.

Binary on/off decisions ride a simulated QAOA circuit; continuous powers
and slacks ride a from-scratch Nelder-Mead outer loop over a penalized
quadratic reformulation.  Classical branch-and-bound and brute-force
enumeration provide ground truth.
"""

from .baseline import (
    BnbNode,
    SolveReport,
    node_lower_bound,
    random_instance,
    scaling_benchmark,
    solve_approx,
    solve_exact,
)
from .dispatch import (
    DispatchSolution,
    NearOptimalSet,
    dispatch_grid_oracle,
    economic_dispatch,
    enumerate_all,
    near_optimal_set,
)
from .errors import (
    InfeasibleError,
    NonFiniteObjectiveError,
    SizeGuardError,
    ValidationError,
)
from .hybrid import (
    HistoryRecord,
    HybridConfig,
    RunHistory,
    ThetaVector,
    initial_theta,
    objective,
    run_hybrid,
)
from .instance import (
    Commitment,
    FeasibilityReport,
    UcInstance,
    UnitSpec,
    builtin_ten_unit,
    check_feasible,
    load_instance,
    load_instance_file,
    serialize_instance,
    total_cost,
)
from .metrics import (
    MetricSnapshot,
    avg_hamming_top_k,
    compute_snapshot,
    export_history,
    hamming,
    load_history,
    near_opt_probability,
    top_k,
)
from .neldermead import NmResult, nelder_mead
from .qaoa import VariationalParams, qaoa_distribution, sample, uniform_state
from .qubo import (
    ContinuousAssignment,
    IsingModel,
    PenaltyWeights,
    Qubo,
    build_qubo,
    optimal_slacks,
    penalized_objective,
    qubo_diagonal,
    qubo_to_ising,
)

__version__ = "0.1.0"

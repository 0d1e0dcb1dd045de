"""Physics-informed network training on truncated Taylor jets.

Forward derivatives come from jet propagation (exact to machine precision
at the truncation order), parameter gradients from a reverse tape over the
jet computation, and multi-task gradient conflicts are resolved by
projection before the Adam update.
"""

from pinnjet.errors import (
    AccuracyError,
    ConfigurationError,
    DomainError,
    MetricError,
    NumericError,
    PinnjetError,
    ShapeError,
    SolverError,
    UsageError,
)
from pinnjet.jets import (
    Jet,
    constant,
    jet_space,
    multi_indices,
    seed_input,
    seed_point,
)
from pinnjet.networks import (
    NetworkConfig,
    NetworkParams,
    forward,
    from_flat,
    gating_weights,
    init_params,
    input_jet,
    lda_layer,
    load_params,
    mlp_forward,
    param_count,
    save_params,
    to_flat,
)
from pinnjet.metrics import (
    ErrorSummary,
    EvalResult,
    aggregate_runs,
    evaluate_on_grid,
    slice_extract,
    write_heatmap_csv,
    write_slice_csv,
    write_summary_csv,
)
from pinnjet.oracles import (
    burgers_cole_hopf,
    cavity_reference,
    finite_diff_check,
    finite_diff_partial,
)
from pinnjet.problems import (
    PROBLEM_NAMES,
    ProblemSpec,
    condition_targets,
    default_network_config,
    exact_solution,
    get_problem,
)
from pinnjet.rngs import STREAM_INIT, STREAM_PCGRAD, STREAM_SAMPLING, stream_generator
from pinnjet.sampling import (
    CollocationSet,
    collocation_hash,
    lhs_sample,
    load_collocation,
    sample_problem_points,
    save_collocation,
)
from pinnjet.tape import Tape, Var, affine, backward, concat_rows, take_row, take_rows
from pinnjet.training import (
    VARIANTS,
    RunReport,
    TaskGradients,
    TrainingConfig,
    adam_step,
    pcgrad_resolve,
    task_gradients,
    task_losses,
    train,
    train_single,
)

__version__ = "0.1.0"

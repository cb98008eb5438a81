"""Dual-purpose downlink feedback: acknowledgment signalling plus target sensing.

The library designs an M x L transmit matrix that tells each uplink user
whether its message was decoded while simultaneously illuminating a sensing
sector, and verifies the design end to end with Monte Carlo simulation of
user decisions and target angle estimation.
"""

from .numerics import (
    PowerLevel,
    dbm_to_mw,
    mw_to_dbm,
    q_function,
    sample_cgauss,
    steering_vector,
    steering_derivative,
    substream,
)
from .hashing import HashCodebook, hash_row
from .scenario import (
    ConfigError,
    SenseGrid,
    SystemConfig,
    TargetScene,
    UserPopulation,
    make_grid,
    make_population,
    make_targets,
    make_user_channel,
)
from .designer import (
    DesignTrace,
    FeedbackMatrix,
    analytic_comm_error,
    approx_sense_error,
    comm_margin,
    crlb_matrix,
    design_feedback,
    grad_comm,
    grad_sense,
    initial_v,
    matched_filter_baseline,
    mean_sense_error,
    per_user_error,
    q_threshold,
)
from .airlink import (
    DecisionOutcome,
    EchoObservation,
    decide,
    echo,
    empirical_comm_error,
    receive_downlink,
    simulate_decisions,
)
from .sensing import AngleEstimate, EstimationError, estimate_angles, rmse
from .harness import (
    ExperimentResult,
    TrialMetrics,
    run_cell,
    run_fig2,
    run_fig3,
    run_trial,
    write_fig2_csv,
    write_fig3_csv,
)

__version__ = "0.1.0"

"""Peeking-robust sequential statistics.

Test (super)martingales and the drawdown/maximum machinery around them:
running and lookahead extrema bounds, max-sensitive potential processes
with calibrated stopping, max decompositions, and an experiment harness
that replays p-value peeking strategies against naive and robust
statistics.
"""

from .azema_yor import (
    AYArrays,
    AYState,
    DecompositionError,
    LogPotential,
    Potential,
    PotentialError,
    PowerPotential,
    QuadraturePotential,
    StoppedMaxReport,
    TailQuantilePotential,
    UserTablePotential,
    ay_forms,
    ay_step,
    ay_stop_rule,
    bregman_div,
    expected_ultimate_max,
    make_potential,
    maxplus_lower,
    mm_decompose,
    mm_decompose_batch,
    potential_eval,
    stopped_max_dominance_check,
)
from .distributions import (
    DistributionModel,
    DomainError,
    DominanceReport,
    EmptyConditioningError,
    NonintegrableTailError,
    barycenter,
    ccdf,
    ccdf_vec,
    check_dominance,
    check_dominated_by_ccdf,
    dkw_band,
    draw,
    expected_shortfall_above,
    g_mu,
    G_mu,
    hl_ccdf_exact,
    hl_ccdf_variational,
    hl_ccdf_vec,
    hl_sample,
    hl_sample_vec,
    superquantile,
    superquantile_vec,
    tail_quantile,
    tail_quantile_vec,
)
from .extrema import (
    CheckReport,
    ExtremaArrays,
    ExtremaState,
    InvalidPathError,
    UniformValidityReport,
    extrema_trace,
    final_record_index,
    identity_check,
    last_ratio_argmin,
    lookahead_dominance_check,
    q_logmax_bound_check,
    r_statistic_validity,
    uniform_validity_report,
    update_extrema,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    PeekRunRecord,
    PeekStrategy,
    emit_report,
    execute_command,
    run_decomposition_roundtrip,
    run_invariant_suite,
    run_peek_experiment,
)
from .martingales import (
    MixtureGrid,
    PathState,
    fixed_time_pvalue,
    gap_scaled_lambda,
    h_value,
    mixture_log_wealth,
    mixture_log_wealth_vec,
    naive_z_pvalue,
    step_gaussian_exp,
    step_likelihood_ratio,
    step_mixture,
)
from .simulate import (
    AbsorbedWalkSpec,
    GaussianExpGapSpec,
    GaussianExpSpec,
    MixtureSpec,
    TraceSizeError,
    Traces,
    parse_process,
    per_path_seed,
    simulate_traces,
)

try:
    from importlib.metadata import version as _version

    __version__ = _version("peekstat")
except Exception:
    __version__ = "0+unknown"

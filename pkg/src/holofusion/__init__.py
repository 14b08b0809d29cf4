"""Joint design of a reconfigurable holographic surface and widely-linear
decision fusion for distributed detection, with a Monte Carlo ROC harness."""

from .augmented import (
    AugmentedVector,
    DeflectionKind,
    SignalMoments,
    augmented_cov,
    deflection_wl,
    moments_y,
    rayleigh_bound,
)
from .channel import (
    ChannelRealization,
    FeedGeometry,
    LinkParams,
    RhsGeometry,
    directivity,
    draw_channel,
    effective_channel,
    path_loss,
    rhs_feed_channel,
    sample_received,
    sensor_rhs_channel,
    upa_steering,
)
from .design import (
    DegenerateDesignError,
    DesignMatrices,
    DesignObjective,
    RhsDesign,
    build_design_matrices,
    largest_eigenvalue,
    mm_phase_update,
    mm_phase_update_is,
    run_ao,
    step_a_bfuc,
    step_a_efuc,
    step_a_is,
)
from .evaluate import (
    ExperimentConfig,
    GlrRule,
    RocReport,
    RuleReport,
    empirical_roc,
    pd_at_pfa,
    run_experiment,
    simulate_statistics,
    write_roc_csv,
    write_summary_json,
    write_timings_json,
)
from .fusion import (
    ComplexityError,
    FilterBank,
    GlrEvaluator,
    ObservationBound,
    TargetGrid,
    WlRule,
    filter_bank_statistic,
    glr_biases,
    glr_observation_bound,
    glr_statistic,
    wl_statistic,
)
from .scenario import (
    CANONICAL_RULES,
    ConfigError,
    ScenarioConfig,
    ScenarioContext,
    build_context,
    desk_profile,
    load_config,
    paper_profile,
    save_config,
)
from .sensing import (
    RhoVectors,
    SensingParams,
    SensorField,
    SurveillanceArea,
    aaf,
    decision_cov,
    expected_rho1,
    local_llr,
    local_pd,
    local_pfa,
    rho_vectors,
    sample_decisions,
    threshold_from_local_pfa,
)

__version__ = "0.1.0"

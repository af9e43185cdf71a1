//! Batch runs over (N, replica) grids, their persistence and summaries, and
//! the Monte-Carlo checks of the ensemble's variance, moment and tail
//! behaviour.

mod harness;
mod plan;
mod records;
mod report;

pub use harness::{
    clt_variance_test, concentration_test, headline_check, kernel_square_moments, linear_statistic,
    mgf_test, scaling_study, CltReport, ConcentrationCell, ConcentrationReport, HeadlineReport, KernelMoments,
    LinearStatistic, LinearStatisticSample, MgfCell, MgfReport, ScalingReport,
};
pub use plan::{evaluate_metric, run_batch, stream_id, BatchOutcome, ExperimentPlan, MetricSpec, PLAN_VERSION};
pub use records::{load, persist, summarize, CellSummary, MetricValue, ReplicaRecord};
pub use report::{bound_curve, render_table, render_tsv};

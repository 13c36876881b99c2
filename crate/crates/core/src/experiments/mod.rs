//! Experiment runners, operator-norm estimation and the JSON-lines record store.
//!
//! Nonlinear quantities (suprema, variation norms) are sampled, so every such
//! measurement is a lower bound for the true operator norm; records say so.

pub mod a1_reduction;
pub mod decay;
pub mod estimate;
pub mod fit;
pub mod record;
pub mod report;
pub mod thm1;

pub use a1_reduction::{a1_reduction_experiment, A1ReductionParams, LambdaField};
pub use decay::{decay_experiment, DecayKind, DecayParams};
pub use estimate::{power_iteration_norm, random_lower_bound, EstimatorConfig, EstimatorMethod, LinearOperator, NormEstimate};
pub use fit::{fit_line, LineFit};
pub use record::{ExperimentRecord, RecordStore};
pub use report::{report, Report};
pub use thm1::{thm1_instance, thm1_scaling_experiment, CoefficientMode, Thm1Instance, Thm1Params};

/// Relative movement under `N -> 2N` above which a record is flagged.
pub const N_DOUBLING_TOLERANCE: f64 = 0.05;

/// Relative change `|b - a| / max(|a|, |b|)`, zero when both vanish.
pub fn relative_change(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (b - a).abs() / scale
    }
}

//! Calibration, robustness and validity metrics.

mod calibration;
mod eval;
mod rank;
mod stability;
mod uncertainty;
mod vun;

pub use calibration::{
    ece_by_token_type, ece_of_scored, expected_calibration_error, BinStats, EceResult, DEFAULT_BINS,
};
pub use eval::{
    assess_generations, cross_eval, encode_k, k_sweep, length_analysis, per_graph_lu, self_assessment,
    sequence_diversity, stability_auc, stability_predictors, AssessedGeneration, CrossCell, CrossGrid, LengthStats,
    SelfAssessment, StabilityPredictors, StabilityRow, StrategyRow, SWEEP_KS,
};
pub use rank::{mid_ranks, roc_auc, spearman};
pub use stability::{bond_order, stability, StabilityReport, ValencyTable};
pub use uncertainty::{linearization_uncertainty, LuResult};
pub use vun::{vun, VunResult};

use thiserror::Error;

use crate::model::ModelError;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("need at least {need} values, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("mean NLL is zero, LU is undefined")]
    ZeroMean,
    #[error("value {value} at index {index} is not a finite non-negative number")]
    BadValue { index: usize, value: f64 },
    #[error("confidence {value} at index {index} is outside [0, 1]")]
    BadConfidence { index: usize, value: f64 },
    #[error("empty input")]
    Empty,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("both classes must be present")]
    SingleClass,
    #[error("input vector is constant")]
    Constant,
    #[error("unknown atom label {0:?}")]
    UnknownAtom(String),
    #[error("unknown bond label {0:?} (expected single, double or triple)")]
    UnknownBond(String),
    #[error("graph {graph} has {got} permutations, expected {expected}")]
    MissingPermutations { graph: usize, got: usize, expected: usize },
    #[error("scorers disagree on the token vocabulary")]
    VocabMismatch,
    #[error("only {got} of {want} generations were decodable within the retry budget")]
    RetryBudget { got: usize, want: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

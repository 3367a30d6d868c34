//! The battery of conditions characterising complete interpolating
//! sequences, and the verdict built from them.

mod ap;
mod carleson;
mod growth;
mod selection;
mod verdict;

pub use ap::{
    continuous_ap, discrete_ap, origin_quotients, ContinuousApReport, DiscreteApReport,
    IntervalFamily, LengthMax, LevelMax, WeightSequence,
};
pub use carleson::{carleson_sum, carleson_term_sum, carleson_term_sum_real, CarlesonSum};
pub use growth::{assess_chain, ChainAssessment, Thresholds};
pub use selection::{
    default_eps, select_gamma, select_gamma_within, select_sigma, select_sigma_branch, GammaPick,
    SigmaBranch, SubsequenceSelection,
};
pub use verdict::{
    full_verdict, full_verdict_with, ApRow, CheckConfig, CriteriaReport, SubCriterion, Verdict,
};

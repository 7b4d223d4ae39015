//! Exact Shapley values and Monte Carlo Shapley estimators for bounded
//! cooperative games.
//!
//! The crate provides:
//!
//! * [`model`]: coalitions, bounded utility functions and the evaluation cache.
//! * [`games`]: synthetic games with known or brute-force-checkable values.
//! * [`exact`]: enumeration oracles (Shapley values, pairwise differences and
//!   exact expectations of the group-testing statistic).
//! * [`sampling`]: the size-biased coalition distribution used by group testing.
//! * [`estimators`]: permutation sampling, group testing and the dummy-pivot
//!   group testing estimator.
//! * [`bounds`]: Bennett and Hoeffding sample-size calculators.
//! * [`harness`]: seeded coverage trials, convergence tables and diagnostics.

pub mod bounds;
pub mod error;
pub mod estimators;
pub mod exact;
pub mod games;
pub mod harness;
pub mod model;
pub mod numfmt;
pub mod sampling;

pub use bounds::{bennett_h, required_permutations, required_t, BoundQuery, BoundResult, BoundVariant};
pub use error::{Error, Result};
pub use estimators::{
    augment_with_dummy, group_testing_improved_estimate, group_testing_original_estimate,
    permutation_sampling_estimate, DifferenceMatrix, EstimationReport, Method, SampleBatch,
};
pub use exact::{exact_pair_difference, exact_shapley, exact_shapley_by_permutations, exact_statistic_expectation};
pub use games::{fixture_configs, GameFamilyConfig};
pub use model::{Coalition, EvalCache, ShapleyVector, UtilitySpec};
pub use sampling::{SamplingDistribution, Variant};

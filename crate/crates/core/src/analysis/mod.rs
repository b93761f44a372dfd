pub mod dot;
pub mod potential;
pub mod stats;
pub mod validate;
pub mod worst;

pub use dot::to_dot;
pub use potential::{PotentialStats, PotentialTracker, MAX_UPDATE_INCREASE};
pub use stats::{tree_stats, TreeStats};
pub use validate::{validate, validate_robust, validate_with, BalanceReport, Violation, ViolationKind};
pub use worst::{
    height_threshold, min_external_path, path_threshold, tightness, worst_case_shape, worst_case_tree,
    TightnessReport,
};

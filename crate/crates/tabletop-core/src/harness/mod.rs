//! Scenario synthesis and cross-checking support.
//!
//! Everything here exists to exercise the pipeline end to end: canned
//! table scenes with known structure, a camera rig, fabricated keypoint
//! measurements, an independent brute-force evaluator for the query
//! marginals, and pixel-space fit metrics.

mod oracle;
mod scenario;

pub use oracle::oracle_query_marginals;
pub use scenario::{
    generate_scenario, look_at_camera, reprojection_rms, standard_rig, FalseVariant, GroundTruth,
    Scenario, ScenarioKind, ScenarioSpec,
};

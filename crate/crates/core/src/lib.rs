//! Sequential unsharp measurements on two-qubit Werner states and the
//! `N`-setting linear steering inequality.
//!
//! A Werner state is shared between a chain of Alices on one qubit and a chain
//! of Bobs on the other. Each observer measures one of `N` spin directions
//! with some sharpness, applies the Lüders update and passes the qubit on.
//! The crate computes each pair's steering parameter two ways (an explicit
//! density-matrix simulation and a closed form) and searches for sharpness
//! values that let several pairs violate the inequality at once.
//!
//! ```
//! use steerseq::{evaluate, Scenario};
//!
//! let s = Scenario::new(1.0, 3, vec![0.6, 1.0], vec![1.0])?;
//! let report = evaluate(&s)?;
//! assert!(report.all_violated());
//! # Ok::<(), steerseq::Error>(())
//! ```

pub mod error;
pub mod matrix;
pub mod measurement;
pub mod solver;
pub mod state;
pub mod steering;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, C64};
pub use measurement::{
    luders_matched_pair, luders_one_side, polyhedron_settings, quality_factor, BlochVector,
    Outcome, SettingSet, Side, UnsharpMeasurement, SUPPORTED_SETTINGS,
};
pub use solver::{
    check_3x2_overlap, check_3x2_overlap_pairs, greedy_chain, max_alices, max_alices_map,
    min_purity, min_sharpness_for_violation, region_scan_2x2, sharpness_ranges, two_bob_best,
    Observer, RegionScan, RegionSummary, SharpnessInterval,
};
pub use state::{nearest_werner, two_qubit_correlation, werner_state, DensityMatrix, WernerParams};
pub use steering::{
    classical_bound, evaluate, evaluate_verified, steering_parameter_closed,
    steering_parameter_oracle, Scenario, SteeringReport,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/measurements.md")]
    mod measurements {}
    #[doc = include_str!("../../../book/src/werner.md")]
    mod werner {}
    #[doc = include_str!("../../../book/src/steering.md")]
    mod steering {}
    #[doc = include_str!("../../../book/src/solver.md")]
    mod solver {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

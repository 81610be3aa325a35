//! Numerical toolkit for the detection loophole in two-party Bell tests.
//!
//! The pipeline runs `qstate` (ideal two-qubit statistics) through `detector`
//! (losses and background clicks) into a [`Behavior`], which `inequality`
//! scores against efficiency-aware local bounds and `lhv` checks exactly
//! against the local polytope. `optimizer` searches states and angles to
//! locate efficiency and noise thresholds; `simulate` reproduces behaviors
//! event by event. `format` reads and writes the on-disk schemas.

pub mod detector;
pub mod error;
pub mod format;
pub mod inequality;
pub mod lhv;
pub mod optimizer;
pub mod qstate;
pub mod simulate;

pub use detector::{apply_detector, make_behavior, Behavior, DetectorModel, Outcome, SettingPair};
pub use error::{Error, Result};
pub use inequality::{InequalityKind, InequalityReport};
pub use lhv::{is_local, LocalityVerdict};
pub use optimizer::{Functional, Scenario, SearchSpace, SweepConfig, ThresholdPoint};
pub use qstate::{make_state, MeasAngle, PureState, Setting, SettingsPair};
pub use simulate::CountsTable;

//! Physical-layer network coding in a MIMO two-way relay channel with
//! transmit antenna selection at the users.
//!
//! Two users A and B each pick one transmit antenna; the relay (with `N_R`
//! receive antennas) jointly detects both symbols and decodes their
//! network-coded combination. This crate provides the constellation algebra,
//! the fading model, the two selection rules (max channel gain and max
//! minimum cluster distance), ML relay detection, closed-form error bounds
//! and a deterministic parallel Monte Carlo engine.

pub mod analysis;
pub mod channel;
pub mod constellation;
pub mod detection;
pub mod error;
pub mod selection;
pub mod selftest;
pub mod sim;

pub use channel::{ChannelRealization, RngStream, SystemConfig, User};
pub use constellation::{build_constellation, cluster_partition, difference_set, pnc_map, Constellation, PncMap};
pub use detection::{error_event, ml_joint_detect, Detector, RelayDecision};
pub use error::{Error, Result};
pub use selection::{select_as1, select_as2, Scheme, SelectionResult, Selector};
pub use sim::{
    estimate_ser, fit_diversity_slope, run_trial, sweep, FitWindow, PointStatus, SerCurve, SerPoint, SlopeEstimate, SnrGrid,
    StoppingRule, SweepSpec,
};

pub use num_complex::Complex64;

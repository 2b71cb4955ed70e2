//! Head-pose prediction for latency compensation.
//!
//! The crate predicts 6-DoF head poses a few tens of milliseconds ahead
//! from a pose-only stream. It contains
//!
//! * [`so3`]: quaternion exp/log, geodesic distance, the Zed12/Zed23
//!   integrators and the inverse right Jacobian,
//! * [`preprocess`]: a streaming Butterworth low-pass and trace chunking,
//! * [`classifier`]: Lempel-Ziv entropy scoring of chunks into easy,
//!   medium and hard motion,
//! * [`predictors`]: a linear KF baseline, a first-order error-state KF
//!   and high-order error-state filters fed with pseudo-derivatives,
//! * [`metrics`] and [`harness`]: errors, summaries, synthetic traces,
//!   packet-loss simulation and the benchmark grid.
//!
//! ```
//! use posecast::harness::{generate_synthetic_trace, ProfileKind, SynthProfile};
//! use posecast::predictors::{build_predictor, FilterConfig, Model};
//!
//! let trace = generate_synthetic_trace(&SynthProfile::new(ProfileKind::Easy, 2.0, 7)).unwrap();
//! let config = FilterConfig::new(Model::P3o3, 0.01, 10);
//! let mut filter = build_predictor(&config, &trace[0]).unwrap();
//! for pose in &trace[1..] {
//!     filter.step(pose.t, Some(pose)).unwrap();
//! }
//! let ahead = filter.predict(10);
//! assert!((ahead.t - (trace.last().unwrap().t + 0.1)).abs() < 1e-9);
//! ```

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod pose;
pub mod predictors;
pub mod preprocess;
pub mod so3;

pub use error::{Error, Result};
pub use pose::Pose;
pub use so3::Quaternion;

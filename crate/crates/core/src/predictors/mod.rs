//! Pose predictors: a linear KF baseline and the error-state family.
//!
//! All predictors share one tick protocol: [`Predictor::step`] advances the
//! state to the tick time (prediction and covariance propagation always
//! run) and applies the pose correction only when a measurement arrived.
//! [`Predictor::predict`] then extrapolates `N` ticks ahead without
//! touching the filter state.
//!
//! Process and measurement noise are identity matrices. Covariances are
//! kept in sample-normalized coordinates: a k-th derivative error is
//! expressed per tick^k rather than per second^k, so that `Q = I` means
//! the same thing regardless of the sample rate.

mod eskf;
mod kf;
mod pseudo;
mod state;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::pose::Pose;

pub use eskf::{
    correct, error_transition_matrix, init_filter, measurement_jacobian, propagate_covariance,
    CorrectionOutcome, CovMatrices, ErrorState, ErrorStateFilter,
};
pub use kf::LinearKf;
pub use pseudo::{estimate_pseudo_derivatives, PseudoDerivatives};
pub use state::{predict_horizon, propagate_nominal, NominalState};

/// Condition number above which the innovation covariance is considered singular.
pub const MAX_INNOVATION_CONDITION: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    Kf,
    Eskf,
    P2o2,
    P2o3,
    P3o3,
}

impl Model {
    pub const ALL: [Model; 5] = [Model::Kf, Model::Eskf, Model::P2o2, Model::P2o3, Model::P3o3];

    /// Highest derivative carried for (position, orientation).
    pub fn orders(&self) -> (usize, usize) {
        match self {
            Model::Kf | Model::Eskf => (1, 1),
            Model::P2o2 => (2, 2),
            Model::P2o3 => (2, 3),
            Model::P3o3 => (3, 3),
        }
    }

    /// Whether derivative fields are refreshed from pose differencing.
    pub fn uses_pseudo_measurements(&self) -> bool {
        matches!(self, Model::P2o2 | Model::P2o3 | Model::P3o3)
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Model::Kf => "kf",
            Model::Eskf => "eskf",
            Model::P2o2 => "p2o2",
            Model::P2o3 => "p2o3",
            Model::P3o3 => "p3o3",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kf" => Ok(Model::Kf),
            "eskf" => Ok(Model::Eskf),
            "p2o2" => Ok(Model::P2o2),
            "p2o3" => Ok(Model::P2o3),
            "p3o3" => Ok(Model::P3o3),
            other => Err(Error::invalid(format!(
                "unknown model {other:?} (expected kf, eskf, p2o2, p2o3 or p3o3)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    pub model: Model,
    /// Nominal sample period in seconds; also the covariance time unit.
    pub dt: f64,
    pub horizon_steps: usize,
    /// Samples used for pseudo-derivative fits. `None` uses `order + 1`
    /// samples per chain (exact interpolation).
    pub diff_window: Option<usize>,
    /// Apply the `I - ½[δθ]×` covariance reset after orientation injection.
    pub exact_reset: bool,
}

impl FilterConfig {
    pub fn new(model: Model, dt: f64, horizon_steps: usize) -> Self {
        FilterConfig {
            model,
            dt,
            horizon_steps,
            diff_window: None,
            exact_reset: false,
        }
    }

    pub fn ord_pos(&self) -> usize {
        self.model.orders().0
    }

    pub fn ord_rot(&self) -> usize {
        self.model.orders().1
    }

    /// Error-state dimension.
    pub fn error_dim(&self) -> usize {
        3 * (1 + self.ord_pos()) + 3 * (1 + self.ord_rot())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid(format!("dt must be positive, got {}", self.dt)));
        }
        if self.horizon_steps < 1 {
            return Err(Error::invalid("horizon must be at least one step"));
        }
        if let Some(w) = self.diff_window {
            let need = self.ord_pos().max(self.ord_rot()) + 1;
            if w < need {
                return Err(Error::invalid(format!(
                    "diff window {w} too short for model {} (needs {need})",
                    self.model
                )));
            }
        }
        Ok(())
    }
}

/// Common tick protocol of every predictor.
pub trait Predictor: Send {
    fn model(&self) -> Model;

    /// Advances to time `t`; corrects with `measurement` when present.
    fn step(&mut self, t: f64, measurement: Option<&Pose>) -> Result<()>;

    /// Pose `horizon_steps` ticks after the current filter time.
    fn predict(&self, horizon_steps: usize) -> Pose;

    /// Current filtered pose.
    fn current(&self) -> Pose;

    fn covariance(&self) -> &DMatrix<f64>;

    fn is_healthy(&self) -> bool;
}

/// Builds the predictor for `config.model`, initialized at `first`.
pub fn build_predictor(config: &FilterConfig, first: &Pose) -> Result<Box<dyn Predictor>> {
    config.validate()?;
    Ok(match config.model {
        Model::Kf => Box::new(LinearKf::new(*config, first)),
        _ => Box::new(ErrorStateFilter::new(*config, first)?),
    })
}

/// Symmetric condition number check shared by the filters.
pub(crate) fn check_innovation(s: &DMatrix<f64>) -> Result<()> {
    let eig = s.clone().symmetric_eigen();
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let cond = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(cond <= MAX_INNOVATION_CONDITION) {
        return Err(Error::NumericalDegeneracy { cond });
    }
    Ok(())
}

pub(crate) fn symmetrize(p: &mut DMatrix<f64>) {
    let t = p.transpose();
    *p += t;
    *p *= 0.5;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_dimensions() {
        let dims: Vec<usize> = Model::ALL
            .iter()
            .map(|m| FilterConfig::new(*m, 0.01, 10).error_dim())
            .collect();
        assert_eq!(dims, vec![12, 12, 18, 21, 24]);
    }

    #[test]
    fn parse_models() {
        for m in Model::ALL {
            assert_eq!(m.as_str().parse::<Model>().unwrap(), m);
        }
        assert_eq!("P3O3".parse::<Model>().unwrap(), Model::P3o3);
        assert!("p4o4".parse::<Model>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(FilterConfig::new(Model::P3o3, 0.0, 10).validate().is_err());
        assert!(FilterConfig::new(Model::P3o3, 0.01, 0).validate().is_err());
        let mut c = FilterConfig::new(Model::P3o3, 0.01, 10);
        c.diff_window = Some(3);
        assert!(c.validate().is_err());
        c.diff_window = Some(6);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn degenerate_innovation_detected() {
        let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-14]));
        assert!(matches!(check_innovation(&s), Err(Error::NumericalDegeneracy { .. })));
        assert!(check_innovation(&DMatrix::identity(6, 6)).is_ok());
    }
}

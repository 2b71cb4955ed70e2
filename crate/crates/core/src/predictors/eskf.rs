//! Error-state Kalman filter with configurable derivative orders.
//!
//! Error-state layout, translational block first:
//!
//! ```text
//! [δp, δv, (δa), (δj) | δθ, δω, (δα), (δω̈)]
//! ```
//!
//! Entries are in sample-normalized units (a k-th derivative error is per
//! tick^k). The measurement is the 6-vector `[z.p − p ; log(q⁻¹ ⊗ z.q)]`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::{quat_exp, quat_log, right_jacobian_inv, skew, Mat3, RotVec};

use super::pseudo::estimate_pseudo_derivatives;
use super::state::{predict_horizon, propagate_nominal, NominalState};
use super::{check_innovation, symmetrize, FilterConfig, Model, Predictor};

/// Below this innovation angle the δθ block of H is the identity.
const JACOBIAN_IDENTITY_BELOW: f64 = 1e-4;

pub const MEASUREMENT_DIM: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct ErrorState(pub DVector<f64>);

impl ErrorState {
    pub fn zeros(dim: usize) -> Self {
        ErrorState(DVector::zeros(dim))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovMatrices {
    pub p: DMatrix<f64>,
    pub q: DMatrix<f64>,
    pub r: DMatrix<f64>,
}

fn trans_index(k: usize) -> usize {
    3 * k
}

fn rot_index(config: &FilterConfig, k: usize) -> usize {
    3 * (1 + config.ord_pos()) + 3 * k
}

pub fn init_filter(config: &FilterConfig, first: &Pose) -> (NominalState, ErrorState, CovMatrices) {
    let d = config.error_dim();
    (
        NominalState::at_rest(first),
        ErrorState::zeros(d),
        CovMatrices {
            p: DMatrix::identity(d, d),
            q: DMatrix::identity(d, d),
            r: DMatrix::identity(MEASUREMENT_DIM, MEASUREMENT_DIM),
        },
    )
}

/// Taylor-chain transition of the error state over a step of `dt` seconds.
pub fn error_transition_matrix(x: &NominalState, dt: f64, config: &FilterConfig) -> DMatrix<f64> {
    let d = config.error_dim();
    let s = dt / config.dt;
    let mut f = DMatrix::identity(d, d);
    let mut chain = |base: usize, len: usize| {
        for i in 0..len {
            let mut coeff = 1.0;
            for jump in 1..len - i {
                coeff *= s / jump as f64;
                let (r, c) = (base + 3 * i, base + 3 * (i + jump));
                for a in 0..3 {
                    f[(r + a, c + a)] = coeff;
                }
            }
        }
    };
    chain(trans_index(0), 1 + config.ord_pos());
    chain(rot_index(config, 0), 1 + config.ord_rot());
    let rt = quat_exp(&(x.w * dt)).to_rotation_matrix().transpose();
    let r0 = rot_index(config, 0);
    f.fixed_view_mut::<3, 3>(r0, r0).copy_from(&rt);
    f
}

/// `F P Fᵀ + Q`, symmetrized.
pub fn propagate_covariance(p: &DMatrix<f64>, f: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = p.nrows();
    if p.ncols() != d || f.shape() != (d, d) || q.shape() != (d, d) {
        return Err(Error::invalid(format!(
            "covariance propagation dimension mismatch: P {:?}, F {:?}, Q {:?}",
            p.shape(),
            f.shape(),
            q.shape()
        )));
    }
    let mut out = f * p * f.transpose() + q;
    symmetrize(&mut out);
    Ok(out)
}

/// Measurement Jacobian for an orientation innovation `y_rot`.
///
/// The δθ block is `J_r⁻¹(y)ᵀ`, the derivative of `log(exp(−δθ)·exp(y))`
/// with the sign folded into the innovation convention `y = z ⊖ h(x)`.
pub fn measurement_jacobian(y_rot: &RotVec, config: &FilterConfig) -> DMatrix<f64> {
    let mut h = DMatrix::zeros(MEASUREMENT_DIM, config.error_dim());
    h.fixed_view_mut::<3, 3>(0, trans_index(0)).copy_from(&Mat3::identity());
    let block = if y_rot.norm() < JACOBIAN_IDENTITY_BELOW {
        Mat3::identity()
    } else {
        // |y| <= π from the log map; at exactly π fall back to the identity
        right_jacobian_inv(y_rot).map_or_else(|_| Mat3::identity(), |j| j.transpose())
    };
    h.fixed_view_mut::<3, 3>(3, rot_index(config, 0)).copy_from(&block);
    h
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOutcome {
    pub x: NominalState,
    pub p: DMatrix<f64>,
    /// The error estimate that was injected; the filter's error state is zero afterwards.
    pub injected: ErrorState,
    pub innovation: DVector<f64>,
}

/// Kalman correction with a pose measurement and error-state injection.
pub fn correct(
    x: &NominalState,
    p: &DMatrix<f64>,
    z: &Pose,
    r: &DMatrix<f64>,
    config: &FilterConfig,
) -> Result<CorrectionOutcome> {
    if (z.t - x.t).abs() > 0.5 * config.dt {
        return Err(Error::invalid(format!(
            "measurement at t={} is not aligned with filter time t={}",
            z.t, x.t
        )));
    }
    let y_pos = z.p - x.p;
    let y_rot = quat_log(&(x.q.conjugate() * z.q).normalized())?;
    let mut y = DVector::zeros(MEASUREMENT_DIM);
    y.fixed_rows_mut::<3>(0).copy_from(&y_pos);
    y.fixed_rows_mut::<3>(3).copy_from(&y_rot);

    let h = measurement_jacobian(&y_rot, config);
    let pht = p * h.transpose();
    let mut s = &h * &pht + r;
    symmetrize(&mut s);
    check_innovation(&s)?;
    let s_inv = s
        .cholesky()
        .map(|c| c.inverse())
        .ok_or(Error::NumericalDegeneracy { cond: f64::INFINITY })?;
    let k = pht * s_inv;
    let dx = &k * &y;

    let mut xn = *x;
    inject(&mut xn, &dx, config);

    let d = config.error_dim();
    let mut pn = (DMatrix::identity(d, d) - &k * &h) * p;
    if config.exact_reset {
        let mut g = DMatrix::identity(d, d);
        let r0 = rot_index(config, 0);
        let dtheta = Vector3::new(dx[r0], dx[r0 + 1], dx[r0 + 2]);
        g.fixed_view_mut::<3, 3>(r0, r0)
            .copy_from(&(Mat3::identity() - skew(&dtheta) * 0.5));
        pn = &g * pn * g.transpose();
    }
    symmetrize(&mut pn);
    Ok(CorrectionOutcome {
        x: xn,
        p: pn,
        injected: ErrorState(dx),
        innovation: y,
    })
}

fn inject(x: &mut NominalState, dx: &DVector<f64>, config: &FilterConfig) {
    let seg = |i: usize| Vector3::new(dx[i], dx[i + 1], dx[i + 2]);
    for k in 0..=config.ord_pos() {
        let scale = config.dt.powi(k as i32);
        *x.translational_mut(k) += seg(trans_index(k)) / scale;
    }
    let dtheta = seg(rot_index(config, 0));
    x.q = (x.q * quat_exp(&dtheta)).canonical();
    for k in 1..=config.ord_rot() {
        let scale = config.dt.powi(k as i32);
        *x.angular_mut(k - 1) += seg(rot_index(config, k)) / scale;
    }
}

/// ESKF and pseudo-measurement ESKF predictor.
#[derive(Clone, Debug)]
pub struct ErrorStateFilter {
    config: FilterConfig,
    x: NominalState,
    cov: CovMatrices,
    window: VecDeque<Pose>,
    window_cap: usize,
    healthy: bool,
}

impl ErrorStateFilter {
    pub fn new(config: FilterConfig, first: &Pose) -> Result<Self> {
        config.validate()?;
        if config.model == Model::Kf {
            return Err(Error::invalid("the KF baseline is not an error-state model"));
        }
        let (x, _, cov) = init_filter(&config, first);
        let window_cap = config
            .diff_window
            .unwrap_or(config.ord_pos().max(config.ord_rot()) + 1);
        let mut f = ErrorStateFilter {
            config,
            x,
            cov,
            window: VecDeque::with_capacity(window_cap + 1),
            window_cap,
            healthy: true,
        };
        f.record(first);
        Ok(f)
    }

    pub fn config(&self) -> &FilterConfig {
        &self.config
    }

    pub fn nominal(&self) -> &NominalState {
        &self.x
    }

    /// Overrides the nominal state, e.g. to seed exact derivatives.
    pub fn set_nominal(&mut self, mut x: NominalState) {
        x.mask(self.config.ord_pos(), self.config.ord_rot());
        self.x = x;
    }

    fn record(&mut self, z: &Pose) {
        if !self.config.model.uses_pseudo_measurements() {
            return;
        }
        self.window.push_back(*z);
        while self.window.len() > self.window_cap {
            self.window.pop_front();
        }
    }

    fn refresh_derivatives(&mut self) -> Result<()> {
        let window = self.window.make_contiguous();
        match estimate_pseudo_derivatives(window, &self.config) {
            Ok(d) => {
                self.x.v = d.v;
                self.x.a = d.a;
                self.x.j = d.j;
                self.x.w = d.w;
                self.x.alpha = d.alpha;
                self.x.jerk_ang = d.jerk_ang;
                Ok(())
            }
            Err(Error::NotReady { .. }) => Ok(()),
            Err(e) => Err(e),
        }
    }
}

impl Predictor for ErrorStateFilter {
    fn model(&self) -> Model {
        self.config.model
    }

    fn step(&mut self, t: f64, measurement: Option<&Pose>) -> Result<()> {
        if !(t > self.x.t) {
            return Err(Error::Clock { t, last: self.x.t });
        }
        let dt = t - self.x.t;
        let f = error_transition_matrix(&self.x, dt, &self.config);
        self.x = propagate_nominal(&self.x, dt, &self.config);
        self.x.t = t;
        self.cov.p = propagate_covariance(&self.cov.p, &f, &self.cov.q)?;

        if let Some(z) = measurement {
            let out = match correct(&self.x, &self.cov.p, z, &self.cov.r, &self.config) {
                Ok(out) => out,
                Err(e @ Error::NumericalDegeneracy { .. }) => {
                    self.healthy = false;
                    return Err(e);
                }
                Err(e) => return Err(e),
            };
            self.x = out.x;
            self.cov.p = out.p;
            self.record(z);
            if self.config.model.uses_pseudo_measurements() {
                self.refresh_derivatives()?;
            }
        }
        Ok(())
    }

    fn predict(&self, horizon_steps: usize) -> Pose {
        predict_horizon(&self.x, self.config.dt, horizon_steps, &self.config)
    }

    fn current(&self) -> Pose {
        self.x.pose()
    }

    fn covariance(&self) -> &DMatrix<f64> {
        &self.cov.p
    }

    fn is_healthy(&self) -> bool {
        self.healthy
    }
}

//! Linear constant-velocity Kalman filter over `[p, v, q, q̇]`.
//!
//! Quaternion components are treated as four independent linear channels
//! and renormalized after every step, i.e. the filter deliberately ignores
//! the multiplicative structure of SO(3).

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::Quaternion;

use super::{check_innovation, symmetrize, FilterConfig, Model, Predictor};

const DIM: usize = 14;
const MEAS: usize = 7;
const P: usize = 0;
const V: usize = 3;
const Q: usize = 6;
const QD: usize = 10;

#[derive(Clone, Debug)]
pub struct LinearKf {
    config: FilterConfig,
    t: f64,
    /// Velocities are per tick.
    x: DVector<f64>,
    p: DMatrix<f64>,
    healthy: bool,
}

impl LinearKf {
    pub fn new(config: FilterConfig, first: &Pose) -> Self {
        let mut x = DVector::zeros(DIM);
        x.fixed_rows_mut::<3>(P).copy_from(&first.p);
        let q = first.q.to_array();
        for i in 0..4 {
            x[Q + i] = q[i];
        }
        LinearKf {
            config: FilterConfig {
                model: Model::Kf,
                ..config
            },
            t: first.t,
            x,
            p: DMatrix::identity(DIM, DIM),
            healthy: true,
        }
    }

    pub fn state(&self) -> &DVector<f64> {
        &self.x
    }

    fn quaternion(&self) -> Quaternion {
        Quaternion::from_wxyz(self.x[Q], self.x[Q + 1], self.x[Q + 2], self.x[Q + 3])
    }

    fn renormalize(&mut self) {
        let q = self.quaternion();
        let n = q.norm();
        if n > 1e-12 {
            for i in 0..4 {
                self.x[Q + i] /= n;
            }
        }
    }

    fn transition(s: f64) -> DMatrix<f64> {
        let mut f = DMatrix::identity(DIM, DIM);
        for i in 0..3 {
            f[(P + i, V + i)] = s;
        }
        for i in 0..4 {
            f[(Q + i, QD + i)] = s;
        }
        f
    }

    fn correct(&mut self, z: &Pose) -> Result<()> {
        let mut h = DMatrix::zeros(MEAS, DIM);
        for i in 0..3 {
            h[(i, P + i)] = 1.0;
        }
        for i in 0..4 {
            h[(3 + i, Q + i)] = 1.0;
        }
        let zq = z.q.aligned_with(&self.quaternion()).to_array();
        let mut y = DVector::zeros(MEAS);
        for i in 0..3 {
            y[i] = z.p[i] - self.x[P + i];
        }
        for i in 0..4 {
            y[3 + i] = zq[i] - self.x[Q + i];
        }
        let pht = &self.p * h.transpose();
        let mut s = &h * &pht + DMatrix::identity(MEAS, MEAS);
        symmetrize(&mut s);
        if let Err(e) = check_innovation(&s) {
            self.healthy = false;
            return Err(e);
        }
        let s_inv = s
            .cholesky()
            .map(|c| c.inverse())
            .ok_or(Error::NumericalDegeneracy { cond: f64::INFINITY })?;
        let k = pht * s_inv;
        self.x += &k * y;
        self.p = (DMatrix::identity(DIM, DIM) - &k * &h) * &self.p;
        symmetrize(&mut self.p);
        Ok(())
    }
}

impl Predictor for LinearKf {
    fn model(&self) -> Model {
        Model::Kf
    }

    fn step(&mut self, t: f64, measurement: Option<&Pose>) -> Result<()> {
        if !(t > self.t) {
            return Err(Error::Clock { t, last: self.t });
        }
        let f = Self::transition((t - self.t) / self.config.dt);
        self.t = t;
        self.x = &f * &self.x;
        self.p = &f * &self.p * f.transpose() + DMatrix::<f64>::identity(DIM, DIM);
        symmetrize(&mut self.p);
        self.renormalize();
        if let Some(z) = measurement {
            if (z.t - t).abs() > 0.5 * self.config.dt {
                return Err(Error::invalid(format!(
                    "measurement at t={} is not aligned with filter time t={t}",
                    z.t
                )));
            }
            self.correct(z)?;
            self.renormalize();
        }
        Ok(())
    }

    fn predict(&self, horizon_steps: usize) -> Pose {
        let n = horizon_steps as f64;
        let p = Vector3::new(
            self.x[P] + n * self.x[V],
            self.x[P + 1] + n * self.x[V + 1],
            self.x[P + 2] + n * self.x[V + 2],
        );
        let q = Quaternion::from_wxyz(
            self.x[Q] + n * self.x[QD],
            self.x[Q + 1] + n * self.x[QD + 1],
            self.x[Q + 2] + n * self.x[QD + 2],
            self.x[Q + 3] + n * self.x[QD + 3],
        );
        let q = if q.norm() > 1e-12 {
            q.normalized().canonical()
        } else {
            self.quaternion().canonical()
        };
        Pose::new(self.t + n * self.config.dt, p, q)
    }

    fn current(&self) -> Pose {
        Pose::new(
            self.t,
            self.x.fixed_rows::<3>(P).into_owned(),
            self.quaternion().canonical(),
        )
    }

    fn covariance(&self) -> &DMatrix<f64> {
        &self.p
    }

    fn is_healthy(&self) -> bool {
        self.healthy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{geodesic_distance, quat_exp, RotVec};

    fn run(f: impl Fn(f64) -> Pose, ticks: usize, horizon: usize) -> (LinearKf, Vec<(Pose, Pose)>) {
        let c = FilterConfig::new(Model::Kf, 0.01, horizon);
        let mut kf = LinearKf::new(c, &f(0.0));
        let mut out = Vec::new();
        for k in 1..ticks {
            let t = k as f64 * 0.01;
            kf.step(t, Some(&f(t))).unwrap();
            out.push((kf.predict(horizon), f(t + horizon as f64 * 0.01)));
        }
        (kf, out)
    }

    #[test]
    fn stationary_fixed_point() {
        let q = quat_exp(&RotVec::new(0.2, 0.3, -0.1));
        let (_, out) = run(|t| Pose::new(t, Vector3::new(0.1, 1.5, 0.2), q), 500, 10);
        let (pred, truth) = out.last().unwrap();
        assert!((pred.p - truth.p).norm() < 1e-6);
        assert!(geodesic_distance(&pred.q, &truth.q).unwrap() < 1e-6);
    }

    #[test]
    fn constant_velocity_is_tracked() {
        let (_, out) = run(
            |t| Pose::new(t, Vector3::new(0.5 * t, 0.0, 0.0), Quaternion::IDENTITY),
            1000,
            10,
        );
        let (pred, truth) = out.last().unwrap();
        assert!((pred.p - truth.p).norm() * 1000.0 < 1.0);
    }

    #[test]
    fn constant_acceleration_lag() {
        let (_, out) = run(
            |t| Pose::new(t, Vector3::new(0.5 * t * t, 0.0, 0.0), Quaternion::IDENTITY),
            3000,
            10,
        );
        let (pred, truth) = out.last().unwrap();
        let lag_mm = (truth.p.x - pred.p.x) * 1000.0;
        assert!((2.5..=7.5).contains(&lag_mm), "lag {lag_mm} mm");
    }

    #[test]
    fn quaternion_stays_unit() {
        let c = FilterConfig::new(Model::Kf, 0.01, 10);
        let mut kf = LinearKf::new(c, &Pose::new(0.0, Vector3::zeros(), Quaternion::IDENTITY));
        for k in 1..2000 {
            let t = k as f64 * 0.01;
            let z = Pose::new(t, Vector3::zeros(), quat_exp(&RotVec::new(t, 0.3 * t, 0.0)));
            kf.step(t, (k % 3 != 0).then_some(&z)).unwrap();
            assert!(kf.current().q.is_unit(1e-12));
            assert!(kf.predict(10).q.is_unit(1e-12));
        }
    }

    #[test]
    fn clock_error_on_repeated_timestamp() {
        let c = FilterConfig::new(Model::Kf, 0.01, 10);
        let mut kf = LinearKf::new(c, &Pose::new(0.0, Vector3::zeros(), Quaternion::IDENTITY));
        assert!(matches!(kf.step(0.0, None), Err(Error::Clock { .. })));
    }
}

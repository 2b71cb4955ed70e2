use nalgebra::Vector3;

use crate::pose::Pose;
use crate::so3::{zed, zed12_increment, zed23_increment, Quaternion};

use super::FilterConfig;

/// Pose with derivative chains up to jerk, in physical units.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NominalState {
    pub t: f64,
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
    pub a: Vector3<f64>,
    pub j: Vector3<f64>,
    pub q: Quaternion,
    pub w: Vector3<f64>,
    pub alpha: Vector3<f64>,
    pub jerk_ang: Vector3<f64>,
}

impl NominalState {
    /// At rest at `pose`.
    pub fn at_rest(pose: &Pose) -> Self {
        NominalState {
            t: pose.t,
            p: pose.p,
            v: Vector3::zeros(),
            a: Vector3::zeros(),
            j: Vector3::zeros(),
            q: pose.q,
            w: Vector3::zeros(),
            alpha: Vector3::zeros(),
            jerk_ang: Vector3::zeros(),
        }
    }

    pub fn pose(&self) -> Pose {
        Pose::new(self.t, self.p, self.q)
    }

    /// k-th translational derivative (0 = position).
    pub fn translational(&self, k: usize) -> &Vector3<f64> {
        match k {
            0 => &self.p,
            1 => &self.v,
            2 => &self.a,
            3 => &self.j,
            _ => panic!("translational derivative {k} out of range"),
        }
    }

    pub fn translational_mut(&mut self, k: usize) -> &mut Vector3<f64> {
        match k {
            0 => &mut self.p,
            1 => &mut self.v,
            2 => &mut self.a,
            3 => &mut self.j,
            _ => panic!("translational derivative {k} out of range"),
        }
    }

    /// k-th derivative of angular velocity, k = 0 is ω.
    pub fn angular(&self, k: usize) -> &Vector3<f64> {
        match k {
            0 => &self.w,
            1 => &self.alpha,
            2 => &self.jerk_ang,
            _ => panic!("angular derivative {k} out of range"),
        }
    }

    pub fn angular_mut(&mut self, k: usize) -> &mut Vector3<f64> {
        match k {
            0 => &mut self.w,
            1 => &mut self.alpha,
            2 => &mut self.jerk_ang,
            _ => panic!("angular derivative {k} out of range"),
        }
    }

    /// Zeroes every derivative above the given orders.
    pub fn mask(&mut self, ord_pos: usize, ord_rot: usize) {
        for k in (ord_pos + 1)..=3 {
            *self.translational_mut(k) = Vector3::zeros();
        }
        for k in ord_rot..=2 {
            *self.angular_mut(k) = Vector3::zeros();
        }
    }
}

/// One constant-highest-derivative step of length `dt`.
pub fn propagate_nominal(x: &NominalState, dt: f64, config: &FilterConfig) -> NominalState {
    debug_assert!(dt > 0.0, "propagation step must be positive");
    let dt2 = dt * dt;
    let dt3 = dt2 * dt;
    let zero = Vector3::zeros();
    let phi = match config.ord_rot() {
        3 => zed23_increment(&x.w, &x.alpha, &(x.jerk_ang * 0.5), dt),
        2 => zed12_increment(&x.w, &x.alpha, dt),
        _ => zed12_increment(&x.w, &zero, dt),
    };
    NominalState {
        t: x.t + dt,
        p: x.p + x.v * dt + x.a * (dt2 / 2.0) + x.j * (dt3 / 6.0),
        v: x.v + x.a * dt + x.j * (dt2 / 2.0),
        a: x.a + x.j * dt,
        j: x.j,
        q: (x.q * zed(&phi)).canonical(),
        w: x.w + x.alpha * dt + x.jerk_ang * (dt2 / 2.0),
        alpha: x.alpha + x.jerk_ang * dt,
        jerk_ang: x.jerk_ang,
    }
}

/// Pose after `steps` chained propagations; `x` is not modified.
pub fn predict_horizon(x: &NominalState, dt: f64, steps: usize, config: &FilterConfig) -> Pose {
    let mut s = *x;
    for _ in 0..steps {
        s = propagate_nominal(&s, dt, config);
    }
    s.pose()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::predictors::Model;
    use crate::so3::{geodesic_distance, quat_exp, RotVec};
    use approx::assert_abs_diff_eq;

    fn cfg(model: Model) -> FilterConfig {
        FilterConfig::new(model, 0.01, 10)
    }

    fn start() -> NominalState {
        NominalState::at_rest(&Pose::new(
            0.0,
            Vector3::new(0.1, 1.6, -0.2),
            quat_exp(&RotVec::new(0.1, 0.2, -0.3)),
        ))
    }

    #[test]
    fn zero_derivatives_hold_pose() {
        let x = start();
        let y = propagate_nominal(&x, 0.01, &cfg(Model::P3o3));
        assert_eq!(y.p, x.p);
        assert_eq!(y.q, x.q);
        assert_abs_diff_eq!(y.t, 0.01);
    }

    #[test]
    fn constant_velocity_step() {
        let mut x = start();
        x.v = Vector3::new(1.0, 0.0, 0.0);
        let y = propagate_nominal(&x, 0.01, &cfg(Model::Eskf));
        assert_abs_diff_eq!(y.p - x.p, Vector3::new(0.01, 0.0, 0.0), epsilon = 1e-15);
    }

    #[test]
    fn cubic_taylor_step() {
        let mut x = start();
        x.v = Vector3::new(1.0, 0.0, 0.0);
        x.a = Vector3::new(2.0, 0.0, 0.0);
        x.j = Vector3::new(6.0, 0.0, 0.0);
        let y = propagate_nominal(&x, 0.1, &cfg(Model::P3o3));
        assert_abs_diff_eq!(y.p.x - x.p.x, 0.111, epsilon = 1e-15);
        assert_abs_diff_eq!(y.v.x, 1.0 + 0.2 + 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(y.a.x, 2.6, epsilon = 1e-15);
    }

    #[test]
    fn horizon_composition() {
        let mut x = start();
        x.v = Vector3::new(0.3, -0.2, 0.5);
        x.w = Vector3::new(0.5, 1.0, -0.2);
        let c = cfg(Model::P2o2);
        let one = predict_horizon(&x, 0.01, 1, &c);
        assert_eq!(one, propagate_nominal(&x, 0.01, &c).pose());
        let ten = predict_horizon(&x, 0.01, 10, &c);
        assert_abs_diff_eq!(ten.p, x.p + x.v * 0.1, epsilon = 1e-12);
        // constant ω is integrated exactly
        let exact = x.q * quat_exp(&(x.w * 0.1));
        assert!(geodesic_distance(&ten.q, &exact).unwrap() < 1e-12);
    }

    #[test]
    fn cubic_trajectory_exact_at_100ms() {
        // p(t) = t³ e_x starting at t0 = 0.5
        let t0: f64 = 0.5;
        let mut x = start();
        x.p = Vector3::new(t0.powi(3), 0.0, 0.0);
        x.v = Vector3::new(3.0 * t0 * t0, 0.0, 0.0);
        x.a = Vector3::new(6.0 * t0, 0.0, 0.0);
        x.j = Vector3::new(6.0, 0.0, 0.0);
        let pred = predict_horizon(&x, 0.01, 10, &cfg(Model::P3o3));
        assert!((pred.p.x - (t0 + 0.1).powi(3)).abs() <= 1e-9);
    }

    #[test]
    fn mask_zeroes_unused_orders() {
        let mut x = start();
        x.j = Vector3::new(1.0, 1.0, 1.0);
        x.jerk_ang = Vector3::new(1.0, 1.0, 1.0);
        x.alpha = Vector3::new(1.0, 1.0, 1.0);
        x.mask(2, 2);
        assert_eq!(x.j, Vector3::zeros());
        assert_eq!(x.jerk_ang, Vector3::zeros());
        assert_eq!(x.alpha, Vector3::new(1.0, 1.0, 1.0));
        x.mask(1, 1);
        assert_eq!(x.alpha, Vector3::zeros());
    }

    #[test]
    fn p3o3_with_zero_jerk_nests_lower_orders() {
        let mut x = start();
        x.v = Vector3::new(0.2, 0.1, -0.4);
        x.a = Vector3::new(-1.0, 0.5, 0.3);
        x.w = Vector3::new(0.7, -0.3, 1.1);
        x.alpha = Vector3::new(-2.0, 0.4, 0.9);
        let p3 = predict_horizon(&x, 0.01, 10, &cfg(Model::P3o3));
        let p23 = predict_horizon(&x, 0.01, 10, &cfg(Model::P2o3));
        assert_abs_diff_eq!(p3.p, p23.p, epsilon = 1e-12);
        assert!(geodesic_distance(&p3.q, &p23.q).unwrap() <= 1e-12);
        let p22 = predict_horizon(&x, 0.01, 10, &cfg(Model::P2o2));
        assert_abs_diff_eq!(p3.p, p22.p, epsilon = 1e-12);
        // orientation differs from Zed12 only by the commutator term
        assert!(geodesic_distance(&p3.q, &p22.q).unwrap() > 1e-9);

        // with ω ∥ α the commutator vanishes and all three agree
        let mut y = x;
        y.alpha = y.w * 1.7;
        let a = predict_horizon(&y, 0.01, 10, &cfg(Model::P3o3));
        let b = predict_horizon(&y, 0.01, 10, &cfg(Model::P2o2));
        assert!(geodesic_distance(&a.q, &b.q).unwrap() <= 1e-9);
    }
}

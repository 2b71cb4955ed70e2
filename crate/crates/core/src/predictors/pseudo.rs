//! Derivative pseudo-measurements from pose-only input.
//!
//! A polynomial is fitted through the most recent samples, backwards in
//! time from the newest one, and differentiated at the newest sample. With
//! exactly `order + 1` uniformly spaced samples this is the backward
//! difference formula of that order; irregular spacing (after dropped
//! packets) and longer smoothing windows fall out of the same fit.
//!
//! Orientation samples are mapped into the tangent space at the newest
//! orientation, `r_i = log(q_k⁻¹ ⊗ q_i)`, which is exactly linear in time
//! for a constant body rate.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::quat_log;

use super::FilterConfig;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PseudoDerivatives {
    pub v: Vector3<f64>,
    pub a: Vector3<f64>,
    pub j: Vector3<f64>,
    pub w: Vector3<f64>,
    pub alpha: Vector3<f64>,
    pub jerk_ang: Vector3<f64>,
}

/// Fits `degree` polynomials to 3-vectors sampled at `taus` (in ticks,
/// newest at 0) and returns the coefficient rows `c_0 .. c_degree`.
fn fit(taus: &[f64], values: &[Vector3<f64>], degree: usize) -> Result<Vec<Vector3<f64>>> {
    let n = taus.len();
    let cols = degree + 1;
    let vander = DMatrix::from_fn(n, cols, |r, c| taus[r].powi(c as i32));
    let mut coeffs = vec![Vector3::zeros(); cols];
    let solve = |rhs: DVector<f64>| -> Result<DVector<f64>> {
        if n == cols {
            vander.clone().lu().solve(&rhs)
        } else {
            let vt = vander.transpose();
            (&vt * &vander).cholesky().map(|c| c.solve(&(&vt * rhs)))
        }
        .ok_or_else(|| Error::invalid("derivative fit is singular (repeated timestamps?)"))
    };
    for axis in 0..3 {
        let rhs = DVector::from_iterator(n, values.iter().map(|v| v[axis]));
        let c = solve(rhs)?;
        for (k, coeff) in coeffs.iter_mut().enumerate() {
            coeff[axis] = c[k];
        }
    }
    Ok(coeffs)
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Estimates the derivative chains of the newest pose in `window`
/// (oldest first). Fields above the model's orders are zero.
pub fn estimate_pseudo_derivatives(window: &[Pose], config: &FilterConfig) -> Result<PseudoDerivatives> {
    let (op, or) = (config.ord_pos(), config.ord_rot());
    let need = |order: usize| config.diff_window.unwrap_or(order + 1);
    let needed = need(op).max(need(or));
    if window.len() < needed {
        return Err(Error::NotReady {
            needed,
            have: window.len(),
        });
    }
    let newest = window[window.len() - 1];
    let inv_newest = newest.q.conjugate();
    let tick = config.dt;
    let mut out = PseudoDerivatives::default();

    let pos_samples = &window[window.len() - need(op)..];
    let taus: Vec<f64> = pos_samples.iter().map(|s| (s.t - newest.t) / tick).collect();
    let values: Vec<Vector3<f64>> = pos_samples.iter().map(|s| s.p - newest.p).collect();
    let c = fit(&taus, &values, op)?;
    // d^k p / dt^k = k! c_k / tick^k
    let deriv = |c: &[Vector3<f64>], k: usize| c[k] * (factorial(k) / tick.powi(k as i32));
    out.v = deriv(&c, 1);
    if op >= 2 {
        out.a = deriv(&c, 2);
    }
    if op >= 3 {
        out.j = deriv(&c, 3);
    }

    let rot_samples = &window[window.len() - need(or)..];
    let taus: Vec<f64> = rot_samples.iter().map(|s| (s.t - newest.t) / tick).collect();
    let values = rot_samples
        .iter()
        .map(|s| quat_log(&(inv_newest * s.q).normalized()))
        .collect::<Result<Vec<_>>>()?;
    let c = fit(&taus, &values, or)?;
    out.w = deriv(&c, 1);
    if or >= 2 {
        out.alpha = deriv(&c, 2);
    }
    if or >= 3 {
        out.jerk_ang = deriv(&c, 3);
    }
    Ok(out)
}

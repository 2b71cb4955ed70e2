//! Rotation algebra on unit quaternions and the SO(3) tangent space.
//!
//! Quaternions are scalar-first with the Hamilton product. Every function
//! that hands back a [`Quaternion`] canonicalizes it to the `w >= 0`
//! hemisphere so that [`quat_log`] is single valued.
//!
//! Orientation propagation uses the right-multiplicative convention
//! `q(t + h) = q(t) ⊗ exp(φ)` where `φ` is a body-frame rotation vector.
//! The [`zed12_step`] and [`zed23_step`] integrators build `φ` from a
//! polynomial model of angular velocity over the step:
//!
//! ```text
//! ω(s) = w0 + w1·s + w2·s²          s ∈ [0, h]
//! Zed12: φ = w0·h + w1·h²/2
//! Zed23: φ = w0·h + w1·h²/2 + w2·h³/3 + (w0 × w1)·h³/12
//! ```
//!
//! The `(w0 × w1)` term is the leading Magnus commutator correction, which
//! lifts the step from second to third order for non-commuting rotations.

use std::ops::{Mul, Neg};

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Rotation vector in so(3), radians.
pub type RotVec = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

const EXP_SMALL_ANGLE: f64 = 1e-8;
const JACOBIAN_SMALL_ANGLE: f64 = 1e-4;
const UNIT_TOLERANCE: f64 = 1e-6;

/// Scalar-first Hamilton quaternion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    /// Raw constructor; no normalization.
    pub const fn from_wxyz(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Normalizes and canonicalizes the given components.
    pub fn new_normalized(w: f64, x: f64, y: f64, z: f64) -> Result<Self> {
        let q = Quaternion { w, x, y, z };
        let n = q.norm();
        if !n.is_finite() || n == 0.0 {
            return Err(Error::invalid(format!(
                "cannot normalize quaternion with norm {n}"
            )));
        }
        Ok(q.scale(1.0 / n).canonical())
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Quaternion) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn vec(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn scale(&self, s: f64) -> Quaternion {
        Quaternion {
            w: self.w * s,
            x: self.x * s,
            y: self.y * s,
            z: self.z * s,
        }
    }

    pub fn normalized(&self) -> Quaternion {
        self.scale(1.0 / self.norm())
    }

    /// Representative of the same rotation with `w >= 0`.
    pub fn canonical(self) -> Quaternion {
        if self.w < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Conjugate; the inverse for unit quaternions.
    pub fn conjugate(&self) -> Quaternion {
        Quaternion {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn from_array(a: [f64; 4]) -> Quaternion {
        Quaternion::from_wxyz(a[0], a[1], a[2], a[3])
    }

    /// Flips the sign if needed so that `self · reference >= 0`.
    pub fn aligned_with(self, reference: &Quaternion) -> Quaternion {
        if self.dot(reference) < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn to_rotation_matrix(&self) -> Mat3 {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        Mat3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }

    pub fn rotate(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.to_rotation_matrix() * v
    }
}

impl Default for Quaternion {
    fn default() -> Self {
        Quaternion::IDENTITY
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, r: Quaternion) -> Quaternion {
        let l = self;
        Quaternion {
            w: l.w * r.w - l.x * r.x - l.y * r.y - l.z * r.z,
            x: l.w * r.x + l.x * r.w + l.y * r.z - l.z * r.y,
            y: l.w * r.y - l.x * r.z + l.y * r.w + l.z * r.x,
            z: l.w * r.z + l.x * r.y - l.y * r.x + l.z * r.w,
        }
    }
}

fn check_unit(q: &Quaternion, what: &str) -> Result<()> {
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::invalid(format!(
            "{what} is not a unit quaternion (norm {n})"
        )));
    }
    Ok(())
}

/// Skew-symmetric cross-product matrix `[v]×`.
pub fn skew(v: &Vector3<f64>) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Exponential map so(3) → unit quaternion.
pub fn quat_exp(v: &RotVec) -> Quaternion {
    let theta = v.norm();
    let half = 0.5 * theta;
    // sin(θ/2)/θ
    let k = if theta < EXP_SMALL_ANGLE {
        0.5 - theta * theta / 48.0
    } else {
        half.sin() / theta
    };
    Quaternion {
        w: half.cos(),
        x: k * v.x,
        y: k * v.y,
        z: k * v.z,
    }
    .canonical()
}

/// Logarithm map, unit quaternion → rotation vector with norm in `[0, π]`.
pub fn quat_log(q: &Quaternion) -> Result<RotVec> {
    check_unit(q, "quat_log input")?;
    let q = q.canonical();
    let v = q.vec();
    let n = v.norm();
    if n < EXP_SMALL_ANGLE {
        // θ/n = 2/w · (1 - n²/(3w²) + ...)
        let k = 2.0 / q.w * (1.0 - n * n / (3.0 * q.w * q.w));
        return Ok(v * k);
    }
    let theta = 2.0 * n.atan2(q.w);
    Ok(v * (theta / n))
}

/// Minimal rotation angle between two orientations, radians in `[0, π]`.
pub fn geodesic_distance(q_pred: &Quaternion, q_true: &Quaternion) -> Result<f64> {
    check_unit(q_pred, "predicted orientation")?;
    check_unit(q_true, "reference orientation")?;
    let rel = (*q_pred * q_true.conjugate()).normalized();
    let angle = quat_log(&rel)?.norm();
    Ok(angle.min(2.0 * std::f64::consts::PI - angle))
}

/// The zed map from a rotation vector to a unit quaternion.
///
/// Implemented as the exact exponential, of which the truncated
/// norm-preserving series is an approximation.
pub fn zed(phi: &RotVec) -> Quaternion {
    quat_exp(phi)
}

fn check_step(h: f64) -> Result<()> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::invalid(format!("step size must be positive, got {h}")));
    }
    Ok(())
}

/// Rotation vector used by [`zed12_step`].
pub fn zed12_increment(w0: &RotVec, w1: &RotVec, h: f64) -> RotVec {
    w0 * h + w1 * (0.5 * h * h)
}

/// Rotation vector used by [`zed23_step`].
pub fn zed23_increment(w0: &RotVec, w1: &RotVec, w2: &RotVec, h: f64) -> RotVec {
    let h2 = h * h;
    let h3 = h2 * h;
    w0 * h + w1 * (0.5 * h2) + w2 * (h3 / 3.0) + w0.cross(w1) * (h3 / 12.0)
}

/// Second-order step for `ω(s) = w0 + w1·s`.
pub fn zed12_step(q: &Quaternion, w0: &RotVec, w1: &RotVec, h: f64) -> Result<Quaternion> {
    check_step(h)?;
    Ok((*q * zed(&zed12_increment(w0, w1, h))).canonical())
}

/// Third-order step for `ω(s) = w0 + w1·s + w2·s²`.
pub fn zed23_step(
    q: &Quaternion,
    w0: &RotVec,
    w1: &RotVec,
    w2: &RotVec,
    h: f64,
) -> Result<Quaternion> {
    check_step(h)?;
    Ok((*q * zed(&zed23_increment(w0, w1, w2, h))).canonical())
}

/// Inverse right Jacobian of SO(3), defined for `‖θ‖ < π`.
pub fn right_jacobian_inv(theta: &RotVec) -> Result<Mat3> {
    let angle = theta.norm();
    if !angle.is_finite() || angle >= std::f64::consts::PI {
        return Err(Error::invalid(format!(
            "right Jacobian inverse undefined for |θ| = {angle} >= π"
        )));
    }
    let k = skew(theta);
    let k2 = k * k;
    let c = if angle < JACOBIAN_SMALL_ANGLE {
        1.0 / 12.0
    } else {
        1.0 / (angle * angle) - (1.0 + angle.cos()) / (2.0 * angle * angle.sin())
    };
    Ok(Mat3::identity() + k * 0.5 + k2 * c)
}

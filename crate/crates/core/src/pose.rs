use nalgebra::Vector3;

use crate::so3::Quaternion;

/// Timestamped 6-DoF pose: position in meters, unit orientation quaternion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub t: f64,
    pub p: Vector3<f64>,
    pub q: Quaternion,
}

impl Pose {
    pub fn new(t: f64, p: Vector3<f64>, q: Quaternion) -> Self {
        Pose { t, p, q }
    }
}

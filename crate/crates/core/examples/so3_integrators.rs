//! Convergence of the Zed12 and Zed23 quaternion integrators.
//!
//! Integrates `q̇ = ½ q ⊗ ω(t)` for a time-varying body rate over one
//! second and compares each scheme against a fine RK4 solution. Halving
//! the step should cut the error by about 4x (Zed12) and 8x (Zed23).

use posecast::so3::{geodesic_distance, zed12_step, zed23_step, Quaternion, RotVec};

fn omega(t: f64) -> RotVec {
    RotVec::new(0.5 + 2.0 * t, 1.0 - t, 0.3 * t * t)
}

fn omega_dot(t: f64) -> RotVec {
    RotVec::new(2.0, -1.0, 0.6 * t)
}

fn omega_ddot(_t: f64) -> RotVec {
    RotVec::new(0.0, 0.0, 0.6)
}

fn qdot(q: &Quaternion, w: &RotVec) -> Quaternion {
    (*q * Quaternion::from_wxyz(0.0, w.x, w.y, w.z)).scale(0.5)
}

fn rk4(steps: usize) -> Quaternion {
    let h = 1.0 / steps as f64;
    let mut q = Quaternion::IDENTITY;
    let add = |a: &Quaternion, b: &Quaternion, s: f64| {
        Quaternion::from_wxyz(a.w + s * b.w, a.x + s * b.x, a.y + s * b.y, a.z + s * b.z)
    };
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = qdot(&q, &omega(t));
        let k2 = qdot(&add(&q, &k1, h / 2.0), &omega(t + h / 2.0));
        let k3 = qdot(&add(&q, &k2, h / 2.0), &omega(t + h / 2.0));
        let k4 = qdot(&add(&q, &k3, h), &omega(t + h));
        let sum = add(&add(&k1, &k2, 2.0), &add(&k3, &k4, 0.5), 2.0);
        q = add(&q, &sum, h / 6.0).normalized();
    }
    q
}

fn integrate(steps: usize, third_order: bool) -> posecast::Result<Quaternion> {
    let h = 1.0 / steps as f64;
    let mut q = Quaternion::IDENTITY;
    for k in 0..steps {
        let t = k as f64 * h;
        q = if third_order {
            zed23_step(&q, &omega(t), &omega_dot(t), &(omega_ddot(t) * 0.5), h)?
        } else {
            zed12_step(&q, &omega(t), &omega_dot(t), h)?
        };
    }
    Ok(q)
}

fn main() -> posecast::Result<()> {
    let reference = rk4(100_000);
    println!("{:>6} {:>14} {:>7} {:>14} {:>7}", "steps", "zed12 err", "ratio", "zed23 err", "ratio");
    let mut prev: Option<(f64, f64)> = None;
    for steps in [4, 8, 16, 32, 64, 128] {
        let e12 = geodesic_distance(&integrate(steps, false)?, &reference)?;
        let e23 = geodesic_distance(&integrate(steps, true)?, &reference)?;
        let (r12, r23) = prev.map_or((f64::NAN, f64::NAN), |(a, b)| (a / e12, b / e23));
        println!("{steps:>6} {e12:>14.3e} {r12:>7.2} {e23:>14.3e} {r23:>7.2}");
        prev = Some((e12, e23));
    }
    Ok(())
}

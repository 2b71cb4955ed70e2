//! Pose error metrics and summary statistics.

use nalgebra::Vector3;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::so3::{geodesic_distance, Quaternion};

/// Euclidean position error in millimeters.
pub fn position_error(p_pred: &Vector3<f64>, p_true: &Vector3<f64>) -> f64 {
    (p_pred - p_true).norm() * 1000.0
}

/// Geodesic orientation error in degrees, in `[0, 180]`.
pub fn orientation_error(q_pred: &Quaternion, q_true: &Quaternion) -> Result<f64> {
    Ok(geodesic_distance(q_pred, q_true)?.to_degrees())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryStats {
    pub median: f64,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: usize,
    pub level: f64,
}

pub fn median(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::invalid("median of an empty sample"));
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Median, mean and a Student-t confidence interval on the mean.
pub fn summarize(samples: &[f64], level: f64) -> Result<SummaryStats> {
    if samples.is_empty() {
        return Err(Error::invalid("cannot summarize an empty sample"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::invalid(format!("confidence level must be in (0, 1), got {level}")));
    }
    let n = samples.len();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let med = median(samples)?;
    let (ci_low, ci_high) = if n == 1 {
        (mean, mean)
    } else {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let t = StudentsT::new(0.0, 1.0, (n - 1) as f64)
            .map_err(|e| Error::invalid(e.to_string()))?
            .inverse_cdf(0.5 + level / 2.0);
        let half = t * (var / n as f64).sqrt();
        (mean - half, mean + half)
    };
    Ok(SummaryStats {
        median: med,
        mean,
        ci_low,
        ci_high,
        n,
        level,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::{quat_exp, RotVec};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn position_examples() {
        let p = Vector3::new(0.1, 0.2, 0.3);
        assert_eq!(position_error(&p, &p), 0.0);
        let e = position_error(&Vector3::zeros(), &Vector3::new(0.003, 0.004, 0.0));
        assert_abs_diff_eq!(e, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn position_matches_componentwise_recomputation() {
        let a = Vector3::new(0.123, -0.456, 0.789);
        let b = Vector3::new(-0.3, 0.02, 0.5);
        let sq: f64 = (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum();
        assert_abs_diff_eq!(position_error(&a, &b), sq.sqrt() * 1000.0, epsilon = 1e-12);
    }

    #[test]
    fn orientation_examples() {
        let q = quat_exp(&RotVec::new(0.1, 0.2, 0.3));
        assert_abs_diff_eq!(orientation_error(&q, &q).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(orientation_error(&q, &-q).unwrap(), 0.0, epsilon = 1e-12);
        let rz = quat_exp(&RotVec::new(0.0, 0.0, std::f64::consts::FRAC_PI_2));
        assert_abs_diff_eq!(
            orientation_error(&Quaternion::IDENTITY, &rz).unwrap(),
            90.0,
            epsilon = 1e-10
        );
        assert!(orientation_error(&Quaternion::from_wxyz(2.0, 0.0, 0.0, 0.0), &q).is_err());
    }

    #[test]
    fn summarize_examples() {
        let s = summarize(&[3.0, 3.0, 3.0, 3.0], 0.95).unwrap();
        assert_eq!((s.median, s.mean, s.ci_high - s.ci_low), (3.0, 3.0, 0.0));
        let s = summarize(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.95).unwrap();
        assert_eq!((s.median, s.mean), (3.0, 3.0));
        let s = summarize(&[4.0, 1.0, 3.0, 2.0], 0.95).unwrap();
        assert_eq!(s.median, 2.5);
        let s = summarize(&[7.5], 0.95).unwrap();
        assert_eq!((s.ci_low, s.ci_high), (7.5, 7.5));
        assert!(summarize(&[], 0.95).is_err());
    }

    #[test]
    fn normal_ci_half_width() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let s = summarize(&xs, 0.95).unwrap();
        let half = 0.5 * (s.ci_high - s.ci_low);
        assert!((half - 0.0196).abs() <= 0.15 * 0.0196, "half width {half}");
    }

    proptest! {
        #[test]
        fn position_metric_axioms(a in prop::array::uniform3(-2.0f64..2.0),
                                  b in prop::array::uniform3(-2.0f64..2.0),
                                  c in prop::array::uniform3(-2.0f64..2.0)) {
            let (a, b, c) = (Vector3::from(a), Vector3::from(b), Vector3::from(c));
            prop_assert!((position_error(&a, &b) - position_error(&b, &a)).abs() <= 1e-9);
            prop_assert!(position_error(&a, &c) <= position_error(&a, &b) + position_error(&b, &c) + 1e-9);
            prop_assert_eq!(position_error(&a, &a), 0.0);
        }

        #[test]
        fn orientation_left_invariant(a in prop::array::uniform3(-1.5f64..1.5),
                                      b in prop::array::uniform3(-1.5f64..1.5),
                                      r in prop::array::uniform3(-1.5f64..1.5)) {
            let (qa, qb, qr) = (quat_exp(&a.into()), quat_exp(&b.into()), quat_exp(&r.into()));
            let d = orientation_error(&qa, &qb).unwrap();
            let dr = orientation_error(&(qr * qa), &(qr * qb)).unwrap();
            prop_assert!((d - dr).abs() <= 1e-9);
            prop_assert!((0.0..=180.0).contains(&d));
        }

        #[test]
        fn summarize_permutation_and_scale(xs in prop::collection::vec(0.0f64..100.0, 1..40), c in 0.1f64..10.0) {
            let s = summarize(&xs, 0.95).unwrap();
            let mut rev = xs.clone();
            rev.reverse();
            let r = summarize(&rev, 0.95).unwrap();
            prop_assert!((s.median - r.median).abs() <= 1e-9);
            prop_assert!((s.mean - r.mean).abs() <= 1e-9);
            let scaled: Vec<f64> = xs.iter().map(|x| x * c).collect();
            let k = summarize(&scaled, 0.95).unwrap();
            prop_assert!((k.mean - c * s.mean).abs() <= 1e-9 * (1.0 + k.mean.abs()));
            prop_assert!((k.median - c * s.median).abs() <= 1e-9 * (1.0 + k.median.abs()));
            prop_assert!((k.ci_low - c * s.ci_low).abs() <= 1e-9 * (1.0 + k.ci_low.abs()));
            prop_assert!((k.ci_high - c * s.ci_high).abs() <= 1e-9 * (1.0 + k.ci_high.abs()));
            prop_assert!(s.ci_low <= s.ci_high);
        }
    }
}

//! Synthetic head-motion traces with three levels of predictability.
//!
//! * `easy`: slow sinusoids, at most 0.5 Hz, 5 cm and 10°.
//! * `medium`: sinusoids up to 2 Hz on top of a smooth random walk.
//! * `hard`: chains of short minimum-jerk head turns between random
//!   targets (yaw up to ±90°) with frequent direction reversals, plus
//!   oscillations up to 4 Hz.
//!
//! Traces are a pure function of the profile, including the seed.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::{quat_exp, Quaternion};

/// Standing head height the traces are centered on, meters.
const HEAD_HEIGHT: f64 = 1.6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProfileKind {
    Easy,
    Medium,
    Hard,
}

impl ProfileKind {
    pub const ALL: [ProfileKind; 3] = [ProfileKind::Easy, ProfileKind::Medium, ProfileKind::Hard];

    pub fn as_str(&self) -> &'static str {
        match self {
            ProfileKind::Easy => "easy",
            ProfileKind::Medium => "medium",
            ProfileKind::Hard => "hard",
        }
    }
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProfileKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(ProfileKind::Easy),
            "medium" => Ok(ProfileKind::Medium),
            "hard" => Ok(ProfileKind::Hard),
            other => Err(Error::invalid(format!("unknown profile {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthProfile {
    pub kind: ProfileKind,
    pub duration: f64,
    pub sample_hz: f64,
    pub seed: u64,
}

impl SynthProfile {
    pub fn new(kind: ProfileKind, duration: f64, seed: u64) -> Self {
        SynthProfile {
            kind,
            duration,
            sample_hz: 100.0,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Sinusoid {
    amp: f64,
    freq: f64,
    phase: f64,
}

impl Sinusoid {
    fn random(rng: &mut ChaCha8Rng, amp: (f64, f64), freq: (f64, f64)) -> Self {
        Sinusoid {
            amp: rng.random_range(amp.0..=amp.1),
            freq: rng.random_range(freq.0..=freq.1),
            phase: rng.random_range(0.0..2.0 * PI),
        }
    }

    fn at(&self, t: f64) -> f64 {
        self.amp * (2.0 * PI * self.freq * t + self.phase).sin()
    }
}

/// Six channels (x, y, z, yaw, pitch, roll), each a sum of sinusoids.
struct SineBank(Vec<Vec<Sinusoid>>);

impl SineBank {
    fn eval(&self, t: f64) -> [f64; 6] {
        let mut out = [0.0; 6];
        for (o, bank) in out.iter_mut().zip(&self.0) {
            *o = bank.iter().map(|s| s.at(t)).sum();
        }
        out
    }
}

/// Head orientation from yaw (vertical axis), pitch and roll, radians.
fn head_orientation(yaw: f64, pitch: f64, roll: f64) -> Quaternion {
    let qy = quat_exp(&Vector3::new(0.0, yaw, 0.0));
    let qp = quat_exp(&Vector3::new(pitch, 0.0, 0.0));
    let qr = quat_exp(&Vector3::new(0.0, 0.0, roll));
    (qy * qp * qr).canonical()
}

fn easy_bank(rng: &mut ChaCha8Rng) -> SineBank {
    // two components per channel; amplitude sums stay within 5 cm / 10°
    let pos = (0.005, 0.025);
    let rot = (1.0f64.to_radians(), 5.0f64.to_radians());
    SineBank(
        (0..6)
            .map(|c| {
                let amp = if c < 3 { pos } else { rot };
                (0..2).map(|_| Sinusoid::random(rng, amp, (0.1, 0.5))).collect()
            })
            .collect(),
    )
}

fn medium_bank(rng: &mut ChaCha8Rng) -> SineBank {
    let pos = (0.005, 0.02);
    let rot = (1.5f64.to_radians(), 5.0f64.to_radians());
    SineBank(
        (0..6)
            .map(|c| {
                let amp = if c < 3 { pos } else { rot };
                (0..3).map(|_| Sinusoid::random(rng, amp, (0.2, 2.0))).collect()
            })
            .collect(),
    )
}

/// Smooth random walk: white noise through two cascaded leaky integrators.
fn smooth_walk(rng: &mut ChaCha8Rng, n: usize, dt: f64, scale: f64) -> Vec<f64> {
    let tau: f64 = 0.5;
    let decay = (-dt / tau).exp();
    let mut vel = 0.0;
    let mut pos = 0.0;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let w: f64 = StandardNormal.sample(rng);
        vel = decay * vel + scale * dt.sqrt() * w;
        pos = decay.sqrt() * pos + vel * dt;
        out.push(pos);
    }
    out
}

fn min_jerk(s: f64) -> f64 {
    let s = s.clamp(0.0, 1.0);
    s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)
}

/// Piecewise minimum-jerk moves between random targets on six channels.
struct Segments {
    /// (start time, duration, from, to)
    moves: Vec<(f64, f64, [f64; 6], [f64; 6])>,
}

impl Segments {
    fn random(rng: &mut ChaCha8Rng, duration: f64) -> Self {
        let limits = [
            0.25,
            0.10,
            0.20,
            90f64.to_radians(),
            35f64.to_radians(),
            20f64.to_radians(),
        ];
        let mut moves = Vec::new();
        let mut t = 0.0;
        let mut current = [0.0f64; 6];
        while t < duration + 1.0 {
            let len = rng.random_range(0.15..0.55);
            let mut target = [0.0; 6];
            for c in 0..6 {
                // usually reverse direction relative to the current offset
                let sign = if rng.random::<f64>() < 0.75 {
                    -current[c].signum()
                } else {
                    current[c].signum()
                };
                let sign = if sign == 0.0 { 1.0 } else { sign };
                target[c] = sign * rng.random_range(0.3..1.0) * limits[c];
            }
            moves.push((t, len, current, target));
            current = target;
            // occasional short hold between moves
            t += len
                + if rng.random::<f64>() < 0.3 {
                    rng.random_range(0.05..0.25)
                } else {
                    0.0
                };
        }
        Segments { moves }
    }

    fn eval(&self, t: f64) -> [f64; 6] {
        let idx = self.moves.partition_point(|m| m.0 <= t).saturating_sub(1);
        let (start, len, from, to) = self.moves[idx];
        let s = min_jerk((t - start) / len);
        let mut out = [0.0; 6];
        for c in 0..6 {
            out[c] = from[c] + (to[c] - from[c]) * s;
        }
        out
    }
}

pub fn generate_synthetic_trace(profile: &SynthProfile) -> Result<Vec<Pose>> {
    if !(profile.duration > 0.0) || !(profile.sample_hz > 0.0) {
        return Err(Error::invalid("duration and sample rate must be positive"));
    }
    let n = (profile.duration * profile.sample_hz).round() as usize;
    let dt = 1.0 / profile.sample_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let times = (0..n).map(|k| k as f64 * dt);

    let channels: Vec<[f64; 6]> = match profile.kind {
        ProfileKind::Easy => {
            let bank = easy_bank(&mut rng);
            times.map(|t| bank.eval(t)).collect()
        }
        ProfileKind::Medium => {
            let bank = medium_bank(&mut rng);
            let walks: Vec<Vec<f64>> = (0..6)
                .map(|c| {
                    let scale = if c < 3 { 0.1 } else { 0.3 };
                    smooth_walk(&mut rng, n, dt, scale)
                })
                .collect();
            times
                .enumerate()
                .map(|(k, t)| {
                    let mut v = bank.eval(t);
                    for c in 0..6 {
                        v[c] += walks[c][k];
                    }
                    v
                })
                .collect()
        }
        ProfileKind::Hard => {
            let segments = Segments::random(&mut rng, profile.duration);
            let wobble = SineBank(
                (0..6)
                    .map(|c| {
                        let amp = if c < 3 { (0.002, 0.006) } else { (0.5f64.to_radians(), 2.0f64.to_radians()) };
                        (0..2).map(|_| Sinusoid::random(&mut rng, amp, (1.0, 4.0))).collect()
                    })
                    .collect(),
            );
            times
                .map(|t| {
                    let mut v = segments.eval(t);
                    let w = wobble.eval(t);
                    for c in 0..6 {
                        v[c] += w[c];
                    }
                    v
                })
                .collect()
        }
    };

    let mut out: Vec<Pose> = Vec::with_capacity(n);
    for (k, c) in channels.iter().enumerate() {
        let q = head_orientation(c[3], c[4], c[5]);
        let q = match out.last() {
            Some(prev) => q.aligned_with(&prev.q),
            None => q,
        };
        out.push(Pose::new(
            k as f64 * dt,
            Vector3::new(c[0], HEAD_HEIGHT + c[1], c[2]),
            q,
        ));
    }
    Ok(out)
}

//! Causal Butterworth low-pass filtering of pose streams and chunking.

use std::f64::consts::PI;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::Quaternion;

/// One second-order section, normalized so that `a0 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BiquadCoeffs {
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub a1: f64,
    pub a2: f64,
}

impl BiquadCoeffs {
    /// Complex frequency response at `f_hz` for sample rate `fs_hz`.
    pub fn response(&self, f_hz: f64, fs_hz: f64) -> (f64, f64) {
        let w = 2.0 * PI * f_hz / fs_hz;
        // H(z) with z^-1 = e^{-jw}
        let (c1, s1) = (w.cos(), -w.sin());
        let (c2, s2) = ((2.0 * w).cos(), -(2.0 * w).sin());
        let num = (self.b0 + self.b1 * c1 + self.b2 * c2, self.b1 * s1 + self.b2 * s2);
        let den = (1.0 + self.a1 * c1 + self.a2 * c2, self.a1 * s1 + self.a2 * s2);
        let d = den.0 * den.0 + den.1 * den.1;
        (
            (num.0 * den.0 + num.1 * den.1) / d,
            (num.1 * den.0 - num.0 * den.1) / d,
        )
    }

    /// Both poles strictly inside the unit circle.
    pub fn is_stable(&self) -> bool {
        // Jury conditions for z² + a1 z + a2.
        self.a2.abs() < 1.0 && self.a1.abs() < 1.0 + self.a2
    }

    fn dc_gain(&self) -> f64 {
        (self.b0 + self.b1 + self.b2) / (1.0 + self.a1 + self.a2)
    }
}

/// Cascade of second-order sections.
#[derive(Clone, Debug, PartialEq)]
pub struct Butterworth {
    pub sections: Vec<BiquadCoeffs>,
}

impl Butterworth {
    pub fn magnitude(&self, f_hz: f64, fs_hz: f64) -> f64 {
        self.sections
            .iter()
            .map(|s| {
                let (re, im) = s.response(f_hz, fs_hz);
                (re * re + im * im).sqrt()
            })
            .product()
    }

    pub fn magnitude_db(&self, f_hz: f64, fs_hz: f64) -> f64 {
        20.0 * self.magnitude(f_hz, fs_hz).log10()
    }

    pub fn dc_gain(&self) -> f64 {
        self.sections.iter().map(BiquadCoeffs::dc_gain).product()
    }
}

/// Digital Butterworth low-pass via the bilinear transform with prewarping.
pub fn design_butterworth_lowpass(order: usize, cutoff_hz: f64, sample_hz: f64) -> Result<Butterworth> {
    if order != 2 && order != 4 {
        return Err(Error::invalid(format!("filter order must be 2 or 4, got {order}")));
    }
    if !(sample_hz > 0.0) {
        return Err(Error::invalid(format!("sample rate must be positive, got {sample_hz}")));
    }
    if !(cutoff_hz > 0.0 && cutoff_hz < sample_hz / 2.0) {
        return Err(Error::invalid(format!(
            "cutoff {cutoff_hz} Hz must lie in (0, {}) Hz",
            sample_hz / 2.0
        )));
    }
    let k = (PI * cutoff_hz / sample_hz).tan();
    let k2 = k * k;
    let sections = (0..order / 2)
        .map(|i| {
            // analog pole pair angle; Q = 1 / (2 cos θ)
            let theta = PI * (2 * i + 1) as f64 / (2 * order) as f64;
            let inv_q = 2.0 * theta.cos();
            let norm = 1.0 / (1.0 + k * inv_q + k2);
            let b0 = k2 * norm;
            BiquadCoeffs {
                b0,
                b1: 2.0 * b0,
                b2: b0,
                a1: 2.0 * (k2 - 1.0) * norm,
                a2: (1.0 - k * inv_q + k2) * norm,
            }
        })
        .collect();
    Ok(Butterworth { sections })
}

pub const CHANNELS: usize = 7;

/// Per-channel delay registers for a biquad cascade (transposed direct form II).
#[derive(Clone, Debug)]
pub struct FilterState {
    filter: Butterworth,
    // [section][channel] -> (s1, s2)
    delays: Vec<[[f64; 2]; CHANNELS]>,
    prime_on_first: bool,
    started: bool,
    last_q: Option<Quaternion>,
}

impl FilterState {
    /// Zero-initialized registers.
    pub fn new(filter: Butterworth) -> Self {
        let delays = vec![[[0.0; 2]; CHANNELS]; filter.sections.len()];
        FilterState {
            filter,
            delays,
            prime_on_first: false,
            started: false,
            last_q: None,
        }
    }

    /// Registers primed on the first sample to the steady state of a
    /// constant input equal to that sample, so the stream starts without a
    /// step transient from zero.
    pub fn primed(filter: Butterworth) -> Self {
        FilterState {
            prime_on_first: true,
            ..FilterState::new(filter)
        }
    }

    pub fn reset(&mut self) {
        for d in &mut self.delays {
            *d = [[0.0; 2]; CHANNELS];
        }
        self.started = false;
        self.last_q = None;
    }

    fn prime(&mut self, input: &[f64; CHANNELS]) {
        // With constant input x and unit DC gain per section the output is x;
        // s1 = b1·x − a1·x + s2, s2 = b2·x − a2·x.
        for (section, regs) in self.filter.sections.iter().zip(self.delays.iter_mut()) {
            for (c, reg) in regs.iter_mut().enumerate() {
                let x = input[c];
                reg[1] = (section.b2 - section.a2) * x;
                reg[0] = (section.b1 - section.a1) * x + reg[1];
            }
        }
    }

    /// Filters one raw channel vector.
    pub fn filter_channels(&mut self, input: &[f64; CHANNELS]) -> [f64; CHANNELS] {
        if !self.started {
            self.started = true;
            if self.prime_on_first {
                self.prime(input);
            }
        }
        let mut x = *input;
        for (s, regs) in self.filter.sections.iter().zip(self.delays.iter_mut()) {
            for (c, reg) in regs.iter_mut().enumerate() {
                let y = s.b0 * x[c] + reg[0];
                reg[0] = s.b1 * x[c] - s.a1 * y + reg[1];
                reg[1] = s.b2 * x[c] - s.a2 * y;
                x[c] = y;
            }
        }
        x
    }

    /// Filters one pose. The incoming quaternion is first flipped onto the
    /// hemisphere of its predecessor; the filtered quaternion is renormalized.
    pub fn filter_sample(&mut self, pose: &Pose) -> Pose {
        let q = match self.last_q {
            Some(prev) => pose.q.aligned_with(&prev),
            None => pose.q,
        };
        self.last_q = Some(q);
        let input = [pose.p.x, pose.p.y, pose.p.z, q.w, q.x, q.y, q.z];
        let out = self.filter_channels(&input);
        let qf = Quaternion::from_wxyz(out[3], out[4], out[5], out[6]);
        let n = qf.norm();
        let qf = if n > 1e-12 { qf.scale(1.0 / n) } else { q };
        Pose {
            t: pose.t,
            p: Vector3::new(out[0], out[1], out[2]),
            q: qf,
        }
    }
}

/// Runs a fresh primed filter over a whole trace.
pub fn filter_trace(trace: &[Pose], filter: &Butterworth) -> Vec<Pose> {
    let mut state = FilterState::primed(filter.clone());
    trace.iter().map(|p| state.filter_sample(p)).collect()
}

/// A contiguous, fixed-length slice of a pose stream.
#[derive(Clone, Debug, PartialEq)]
pub struct MotionChunkRaw {
    pub start_index: usize,
    pub t_start: f64,
    pub poses: Vec<Pose>,
}

/// Splits a trace into consecutive non-overlapping chunks; the short tail is dropped.
pub fn chunk_trace(trace: &[Pose], chunk_len: usize) -> Result<Vec<MotionChunkRaw>> {
    if chunk_len < 16 {
        return Err(Error::invalid(format!("chunk length must be >= 16, got {chunk_len}")));
    }
    Ok(trace
        .chunks_exact(chunk_len)
        .enumerate()
        .map(|(i, c)| MotionChunkRaw {
            start_index: i * chunk_len,
            t_start: c[0].t,
            poses: c.to_vec(),
        })
        .collect())
}

//! Predictability classification of motion chunks.
//!
//! A chunk is quantized onto a joint position/orientation grid, the cell
//! sequence is scored with a Lempel-Ziv entropy estimate, and the score is
//! banded into [`MotionClass`].
//!
//! The estimator is
//!
//! ```text
//! H = (1/T) Σ_t log2(T / λ_t)
//! ```
//!
//! where `λ_t` is the length of the shortest substring starting at `t` that
//! never starts at any earlier position. When the whole remaining suffix
//! has been seen before, `λ_t` is the suffix length plus one. Both cases
//! reduce to `λ_t = 1 + (longest match against an earlier start)`.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::preprocess::MotionChunkRaw;
use crate::so3::quat_log;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MotionClass {
    Easy,
    Medium,
    Hard,
}

impl MotionClass {
    pub const ALL: [MotionClass; 3] = [MotionClass::Easy, MotionClass::Medium, MotionClass::Hard];

    pub fn as_str(&self) -> &'static str {
        match self {
            MotionClass::Easy => "easy",
            MotionClass::Medium => "medium",
            MotionClass::Hard => "hard",
        }
    }
}

impl fmt::Display for MotionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MotionClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "easy" => Ok(MotionClass::Easy),
            "medium" => Ok(MotionClass::Medium),
            "hard" => Ok(MotionClass::Hard),
            other => Err(Error::invalid(format!("unknown motion class {other:?}"))),
        }
    }
}

/// Grid resolution and entropy thresholds. Thresholds are in bits/sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub cell_size_pos: f64,
    /// `f64::INFINITY` disables the orientation component.
    pub cell_size_rot: f64,
    pub h_low: f64,
    pub h_high: f64,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        ClassifierConfig {
            cell_size_pos: 0.05,
            cell_size_rot: 0.1,
            h_low: 5.0,
            h_high: 6.2,
        }
    }
}

impl ClassifierConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cell_size_pos > 0.0) || !(self.cell_size_rot > 0.0) {
            return Err(Error::invalid("cell sizes must be positive"));
        }
        if !(self.h_low > 0.0 && self.h_low < self.h_high) {
            return Err(Error::invalid(format!(
                "thresholds must satisfy 0 < h_low < h_high, got {} and {}",
                self.h_low, self.h_high
            )));
        }
        Ok(())
    }
}

/// Grid-cell ids in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolSequence(pub Vec<u32>);

fn cell(value: f64, size: f64) -> i64 {
    let c = (value / size).floor();
    // -0.0 and 0.0 must land in the same cell
    if c == 0.0 {
        0
    } else {
        c as i64
    }
}

pub fn discretize_chunk(chunk: &MotionChunkRaw, config: &ClassifierConfig) -> Result<SymbolSequence> {
    if chunk.poses.is_empty() {
        return Err(Error::invalid("cannot discretize an empty chunk"));
    }
    let mut ids: HashMap<[i64; 6], u32> = HashMap::new();
    let mut out = Vec::with_capacity(chunk.poses.len());
    for pose in &chunk.poses {
        let r = quat_log(&pose.q)?;
        let key = [
            cell(pose.p.x, config.cell_size_pos),
            cell(pose.p.y, config.cell_size_pos),
            cell(pose.p.z, config.cell_size_pos),
            cell(r.x, config.cell_size_rot),
            cell(r.y, config.cell_size_rot),
            cell(r.z, config.cell_size_rot),
        ];
        let next = ids.len() as u32;
        out.push(*ids.entry(key).or_insert(next));
    }
    Ok(SymbolSequence(out))
}

/// `λ_t` for every position of `s`.
///
/// Walks each diagonal offset `d = t - j` backwards, tracking the run of
/// equal symbols, which gives the longest common prefix of suffixes `j`
/// and `t` in O(T²) time and O(T) space.
pub fn lz_match_lengths(s: &[u32]) -> Vec<usize> {
    let n = s.len();
    let mut longest = vec![0usize; n];
    for d in 1..n {
        let mut run = 0usize;
        for j in (0..n - d).rev() {
            if s[j] == s[j + d] {
                run += 1;
            } else {
                run = 0;
            }
            let t = j + d;
            if run > longest[t] {
                longest[t] = run;
            }
        }
    }
    longest.into_iter().map(|l| l + 1).collect()
}

/// Lempel-Ziv entropy estimate in bits per sample.
pub fn lz_entropy(s: &[u32]) -> Result<f64> {
    let n = s.len();
    if n < 2 {
        return Err(Error::invalid(format!("entropy needs at least 2 symbols, got {n}")));
    }
    let total = n as f64;
    let sum: f64 = lz_match_lengths(s)
        .into_iter()
        .map(|lambda| (total / lambda as f64).log2())
        .sum();
    Ok(sum / total)
}

pub fn classify(h: f64, config: &ClassifierConfig) -> MotionClass {
    if h < config.h_low {
        MotionClass::Easy
    } else if h < config.h_high {
        MotionClass::Medium
    } else {
        MotionClass::Hard
    }
}

/// Entropy and class of one chunk.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChunkLabel {
    pub entropy: f64,
    pub class: MotionClass,
}

pub fn label_chunk(chunk: &MotionChunkRaw, config: &ClassifierConfig) -> Result<ChunkLabel> {
    let symbols = discretize_chunk(chunk, config)?;
    let entropy = lz_entropy(&symbols.0)?;
    Ok(ChunkLabel {
        entropy,
        class: classify(entropy, config),
    })
}

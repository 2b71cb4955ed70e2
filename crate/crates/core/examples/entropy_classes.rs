//! Entropy distribution of chunks from the three synthetic profiles.
//!
//! ```text
//! cargo run --release --example entropy_classes -- [seconds] [seed]
//! ```

use posecast::classifier::{label_chunk, ClassifierConfig, MotionClass};
use posecast::harness::{generate_synthetic_trace, ProfileKind, SynthProfile};
use posecast::preprocess::{chunk_trace, design_butterworth_lowpass, filter_trace};

fn main() -> posecast::Result<()> {
    let mut args = std::env::args().skip(1);
    let seconds: f64 = args.next().map(|s| s.parse().expect("seconds")).unwrap_or(60.0);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(1);
    let cfg = ClassifierConfig::default();
    let bw = design_butterworth_lowpass(2, 5.0, 100.0)?;
    println!("thresholds: h_low {} h_high {} bits/sample", cfg.h_low, cfg.h_high);
    for kind in ProfileKind::ALL {
        let trace = generate_synthetic_trace(&SynthProfile::new(kind, seconds, seed))?;
        let chunks = chunk_trace(&filter_trace(&trace, &bw), 200)?;
        let labels = chunks
            .iter()
            .map(|c| label_chunk(c, &cfg))
            .collect::<posecast::Result<Vec<_>>>()?;
        let mut h: Vec<f64> = labels.iter().map(|l| l.entropy).collect();
        h.sort_by(f64::total_cmp);
        let count = |c: MotionClass| labels.iter().filter(|l| l.class == c).count();
        println!(
            "{:<6} chunks {:>3}  H min {:.3} median {:.3} max {:.3}  easy {:>3} medium {:>3} hard {:>3}",
            kind.as_str(),
            labels.len(),
            h[0],
            h[h.len() / 2],
            h[h.len() - 1],
            count(MotionClass::Easy),
            count(MotionClass::Medium),
            count(MotionClass::Hard)
        );
    }
    Ok(())
}

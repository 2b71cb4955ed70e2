//! Streams a synthetic hard trace through every predictor.
//!
//! ```text
//! cargo run --release --example predict_trace -- [horizon_ms] [drop_rate]
//! ```

use posecast::classifier::ClassifierConfig;
use posecast::harness::{
    generate_synthetic_trace, prepare_trace, run_predictions, DropSimulator, ProfileKind, SynthProfile,
};
use posecast::predictors::{FilterConfig, Model};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> posecast::Result<()> {
    let mut args = std::env::args().skip(1);
    let horizon_ms: f64 = args.next().map(|s| s.parse().expect("horizon_ms")).unwrap_or(100.0);
    let drop_rate: f64 = args.next().map(|s| s.parse().expect("drop_rate")).unwrap_or(0.0);

    let raw = generate_synthetic_trace(&SynthProfile::new(ProfileKind::Hard, 30.0, 5))?;
    let trace = prepare_trace(raw, 200, &ClassifierConfig::default(), 5.0, 2)?;
    let steps = trace.horizon_steps(horizon_ms)?;
    println!("horizon {horizon_ms} ms ({steps} ticks), drop rate {drop_rate}");
    println!("{:<6} {:>12} {:>12} {:>12}", "model", "pos mean mm", "ori mean deg", "received");
    for model in Model::ALL {
        let config = FilterConfig::new(model, trace.dt, steps);
        let mut drop = DropSimulator::new(ChaCha8Rng::seed_from_u64(1), drop_rate)?;
        let records = run_predictions(&trace, &config, &mut drop, 50)?;
        let n = records.len() as f64;
        println!(
            "{:<6} {:>12.2} {:>12.2} {:>11.1}%",
            model.as_str(),
            records.iter().map(|r| r.e_pos_mm).sum::<f64>() / n,
            records.iter().map(|r| r.e_ori_deg).sum::<f64>() / n,
            100.0 * records.iter().filter(|r| r.received).count() as f64 / n
        );
    }
    Ok(())
}

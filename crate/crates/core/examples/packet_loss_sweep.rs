//! Mean error against drop rate for the KF baseline and the p3o3 filter.

use posecast::harness::{generate_synthetic_trace, run_experiment, ExperimentConfig, ProfileKind, SynthProfile};
use posecast::predictors::Model;

fn main() -> posecast::Result<()> {
    let traces = (0..2)
        .map(|s| generate_synthetic_trace(&SynthProfile::new(ProfileKind::Hard, 30.0, 40 + s)))
        .collect::<posecast::Result<Vec<_>>>()?;
    let rates = vec![0.0, 0.1, 0.3, 0.5, 0.7];
    let config = ExperimentConfig {
        models: vec![Model::Kf, Model::Eskf, Model::P3o3],
        horizons_ms: vec![60.0],
        drop_rates: rates.clone(),
        repeats: 3,
        master_seed: 7,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&config, &traces)?;
    println!("60 ms horizon, hard traces; pooled over classes");
    println!("{:<6} {:>6} {:>12} {:>12}", "model", "drop", "pos mean mm", "ori mean deg");
    for model in &config.models {
        for &rate in &rates {
            let rows: Vec<_> = report
                .summary
                .iter()
                .filter(|r| r.model == *model && r.drop_rate == rate && r.n_repeats > 0)
                .collect();
            let weight: f64 = rows.iter().map(|r| r.n_repeats as f64).sum();
            let pos = rows.iter().map(|r| r.pos.mean * r.n_repeats as f64).sum::<f64>() / weight;
            let ori = rows.iter().map(|r| r.ori.mean * r.n_repeats as f64).sum::<f64>() / weight;
            println!("{:<6} {:>6.2} {:>12.2} {:>12.2}", model.as_str(), rate, pos, ori);
        }
    }
    Ok(())
}

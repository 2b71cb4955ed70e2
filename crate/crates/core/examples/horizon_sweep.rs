//! Mean position error of every model against prediction horizon, per profile.

use posecast::harness::{generate_synthetic_trace, run_experiment, ExperimentConfig, ProfileKind, SynthProfile};
use posecast::predictors::Model;

fn main() -> posecast::Result<()> {
    let horizons = vec![20.0, 40.0, 60.0, 80.0, 100.0];
    for kind in ProfileKind::ALL {
        let trace = generate_synthetic_trace(&SynthProfile::new(kind, 30.0, 3))?;
        let config = ExperimentConfig {
            horizons_ms: horizons.clone(),
            drop_rates: vec![0.0],
            repeats: 1,
            ..ExperimentConfig::default()
        };
        let report = run_experiment(&config, &[trace])?;
        println!("{kind} profile, mean position error [mm]");
        print!("{:<6}", "model");
        for h in &horizons {
            print!(" {:>8}", format!("{h} ms"));
        }
        println!();
        for model in Model::ALL {
            print!("{:<6}", model.as_str());
            for &h in &horizons {
                let rows: Vec<_> = report
                    .summary
                    .iter()
                    .filter(|r| r.model == model && r.horizon_ms == h && r.n_repeats > 0)
                    .collect();
                let mean = rows.iter().map(|r| r.pos.mean).sum::<f64>() / rows.len() as f64;
                print!(" {mean:>8.2}");
            }
            println!();
        }
        println!();
    }
    Ok(())
}

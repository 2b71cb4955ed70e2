//! End-to-end benchmark: synthesize one trace per profile, run a small grid
//! and write `summary.csv`, `repeats.csv`, `samples.csv` and `table.txt`.
//!
//! ```text
//! cargo run --release --example bench_report -- [out_dir]
//! ```

use posecast::harness::{
    emit_report, format_table, generate_synthetic_trace, run_experiment, ExperimentConfig, ProfileKind,
    SynthProfile,
};

fn main() -> posecast::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "bench_out".to_string());
    let traces = ProfileKind::ALL
        .iter()
        .enumerate()
        .map(|(i, kind)| generate_synthetic_trace(&SynthProfile::new(*kind, 20.0, i as u64)))
        .collect::<posecast::Result<Vec<_>>>()?;
    let config = ExperimentConfig {
        horizons_ms: vec![50.0, 100.0],
        drop_rates: vec![0.0, 0.3],
        repeats: 3,
        master_seed: 2024,
        ..ExperimentConfig::default()
    };
    let report = run_experiment(&config, &traces)?;
    emit_report(&report, &out)?;
    print!("{}", format_table(&report));
    println!("wrote {out}/summary.csv");
    Ok(())
}

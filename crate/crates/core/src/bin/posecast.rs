use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::builder::{PossibleValuesParser, TypedValueParser};
use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use posecast::classifier::{label_chunk, ClassifierConfig};
use posecast::harness::{
    emit_report, format_float, format_table, generate_synthetic_trace, load_trace, prepare_trace,
    run_predictions, run_prepared, write_trace, DropSimulator, ExperimentConfig, ProfileKind,
    SynthProfile,
};
use posecast::predictors::{FilterConfig, Model};
use posecast::preprocess::{chunk_trace, design_butterworth_lowpass, filter_trace};
use posecast::{Error, Result};

#[derive(Parser)]
#[command(name = "posecast", version, about = "Head-pose prediction benchmark")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic head-motion trace.
    Synth {
        #[arg(long)]
        profile: ProfileKind,
        /// Seconds.
        #[arg(long)]
        duration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100.0)]
        sample_hz: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the entropy and motion class of every chunk of a trace.
    Classify {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[command(flatten)]
        filter: LowpassArgs,
    },
    /// Run one predictor over a trace and print per-tick predictions as CSV.
    Predict {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: Model,
        #[arg(long)]
        horizon_ms: f64,
        #[arg(long, default_value_t = 0.0)]
        drop_rate: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ticks before predictions are reported.
        #[arg(long, default_value_t = 0)]
        warmup: usize,
        #[command(flatten)]
        filter: LowpassArgs,
    },
    /// Run the model × horizon × drop-rate × repeat grid and write a report.
    Bench {
        #[arg(long, num_args = 1.., required = true)]
        input: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "kf,eskf,p2o2,p2o3,p3o3")]
        models: Vec<Model>,
        /// Milliseconds.
        #[arg(long, value_delimiter = ',', default_value = "20,40,60,80,100")]
        horizons: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.3,0.5")]
        drop_rates: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        repeats: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        warmup: usize,
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Least-squares window for pseudo-derivatives (default: order + 1).
        #[arg(long)]
        diff_window: Option<usize>,
        /// Also write every per-tick error to samples.csv.
        #[arg(long)]
        samples: bool,
        #[command(flatten)]
        classifier: ClassifierArgs,
        #[command(flatten)]
        filter: LowpassArgs,
    },
}

#[derive(Args)]
struct ClassifierArgs {
    #[arg(long)]
    h_low: Option<f64>,
    #[arg(long)]
    h_high: Option<f64>,
    /// Position grid cell, meters.
    #[arg(long)]
    cell_pos: Option<f64>,
    /// Orientation grid cell, radians.
    #[arg(long)]
    cell_rot: Option<f64>,
    #[arg(long, default_value_t = 200)]
    chunk_len: usize,
}

impl ClassifierArgs {
    fn config(&self) -> ClassifierConfig {
        let d = ClassifierConfig::default();
        ClassifierConfig {
            cell_size_pos: self.cell_pos.unwrap_or(d.cell_size_pos),
            cell_size_rot: self.cell_rot.unwrap_or(d.cell_size_rot),
            h_low: self.h_low.unwrap_or(d.h_low),
            h_high: self.h_high.unwrap_or(d.h_high),
        }
    }
}

#[derive(Args)]
struct LowpassArgs {
    #[arg(long, default_value_t = 5.0)]
    cutoff_hz: f64,
    #[arg(long, default_value_t = 2, value_parser = PossibleValuesParser::new(["2", "4"]).map(|s| s.parse::<usize>().unwrap()))]
    order: usize,
}

fn io_err(e: io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth {
            profile,
            duration,
            seed,
            sample_hz,
            out,
        } => {
            let trace = generate_synthetic_trace(&SynthProfile {
                kind: profile,
                duration,
                sample_hz,
                seed,
            })?;
            write_trace(&out, &trace)?;
            eprintln!("wrote {} poses to {}", trace.len(), out.display());
        }
        Command::Classify {
            input,
            classifier,
            filter,
        } => {
            let cfg = classifier.config();
            cfg.validate()?;
            let trace = load_trace(&input)?;
            let dt = posecast::harness::median_interval(&trace)
                .ok_or_else(|| Error::InvalidArgument("trace needs at least two poses".into()))?;
            let bw = design_butterworth_lowpass(filter.order, filter.cutoff_hz, 1.0 / dt)?;
            let chunks = chunk_trace(&filter_trace(&trace, &bw), classifier.chunk_len)?;
            let mut out = BufWriter::new(io::stdout().lock());
            writeln!(out, "chunk,start_index,t_start,entropy_bits,class").map_err(io_err)?;
            for (i, c) in chunks.iter().enumerate() {
                let label = label_chunk(c, &cfg)?;
                writeln!(
                    out,
                    "{i},{},{},{},{}",
                    c.start_index,
                    format_float(c.t_start),
                    format_float(label.entropy),
                    label.class
                )
                .map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
        }
        Command::Predict {
            input,
            model,
            horizon_ms,
            drop_rate,
            seed,
            warmup,
            filter,
        } => {
            let trace = load_trace(&input)?;
            let prepared = prepare_trace(
                trace,
                200,
                &ClassifierConfig::default(),
                filter.cutoff_hz,
                filter.order,
            )?;
            let config = FilterConfig::new(model, prepared.dt, prepared.horizon_steps(horizon_ms)?);
            let mut drop = DropSimulator::new(ChaCha8Rng::seed_from_u64(seed), drop_rate)?;
            let records = run_predictions(&prepared, &config, &mut drop, warmup)?;
            let mut out = BufWriter::new(io::stdout().lock());
            writeln!(out, "t,target_t,received,px,py,pz,qw,qx,qy,qz,e_pos_mm,e_ori_deg").map_err(io_err)?;
            for r in &records {
                let p = &r.predicted;
                let f = format_float;
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{},{},{},{}",
                    f(prepared.raw[r.tick].t),
                    f(r.truth.t),
                    u8::from(r.received),
                    f(p.p.x),
                    f(p.p.y),
                    f(p.p.z),
                    f(p.q.w),
                    f(p.q.x),
                    f(p.q.y),
                    f(p.q.z),
                    f(r.e_pos_mm),
                    f(r.e_ori_deg)
                )
                .map_err(io_err)?;
            }
            out.flush().map_err(io_err)?;
            if !records.is_empty() {
                let n = records.len() as f64;
                eprintln!(
                    "{} predictions: mean position error {:.3} mm, mean orientation error {:.3} deg",
                    records.len(),
                    records.iter().map(|r| r.e_pos_mm).sum::<f64>() / n,
                    records.iter().map(|r| r.e_ori_deg).sum::<f64>() / n
                );
            }
        }
        Command::Bench {
            input,
            models,
            horizons,
            drop_rates,
            repeats,
            seed,
            out,
            warmup,
            confidence,
            diff_window,
            samples,
            classifier,
            filter,
        } => {
            let config = ExperimentConfig {
                models,
                horizons_ms: horizons,
                drop_rates,
                repeats,
                master_seed: seed,
                chunk_len: classifier.chunk_len,
                classifier: classifier.config(),
                cutoff_hz: filter.cutoff_hz,
                filter_order: filter.order,
                warmup_ticks: warmup,
                confidence,
                diff_window,
                keep_samples: samples,
            };
            config.validate()?;
            let prepared = input
                .iter()
                .map(|path| {
                    prepare_trace(
                        load_trace(path)?,
                        config.chunk_len,
                        &config.classifier,
                        config.cutoff_hz,
                        config.filter_order,
                    )
                })
                .collect::<Result<Vec<_>>>()?;
            let report = run_prepared(&config, &prepared)?;
            emit_report(&report, &out)?;
            print!("{}", format_table(&report));
            let failed: usize = report.summary.iter().map(|r| r.failed_repeats).sum();
            if failed > 0 {
                eprintln!("warning: {failed} cell repeats failed numerically (see summary.csv)");
            }
            eprintln!("report written to {}", out.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

//! Experiment orchestration over (model × horizon × drop rate × repeat).
//!
//! Every trace is low-pass filtered, chunked and classified once. Each
//! experiment cell then runs one predictor per trace over the filtered
//! stream. The drop gate only decides whether a tick's correction is
//! applied; prediction and covariance propagation run every tick. The
//! prediction made at tick `k` is scored against the raw pose at `k + N`.
//!
//! Cells draw from their own generator, seeded from a hash of the master
//! seed and the cell key, and are reduced in a fixed order, so results do
//! not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::classifier::{label_chunk, ChunkLabel, ClassifierConfig, MotionClass};
use crate::error::{Error, Result};
use crate::metrics::{median, orientation_error, position_error, summarize, SummaryStats};
use crate::pose::Pose;
use crate::predictors::{build_predictor, FilterConfig, Model};
use crate::preprocess::{chunk_trace, design_butterworth_lowpass, filter_trace};

use super::drop::DropSimulator;
use super::report::{ExperimentReport, RepeatRow, SampleRow, SummaryRow};
use super::trace::median_interval;

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub models: Vec<Model>,
    pub horizons_ms: Vec<f64>,
    pub drop_rates: Vec<f64>,
    pub repeats: usize,
    pub master_seed: u64,
    pub chunk_len: usize,
    pub classifier: ClassifierConfig,
    pub cutoff_hz: f64,
    /// Butterworth order, 2 or 4.
    pub filter_order: usize,
    /// Ticks after start-up that are not scored.
    pub warmup_ticks: usize,
    pub confidence: f64,
    pub diff_window: Option<usize>,
    /// Keep every per-tick error in the report (large).
    pub keep_samples: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            models: Model::ALL.to_vec(),
            horizons_ms: vec![20.0, 40.0, 60.0, 80.0, 100.0],
            drop_rates: vec![0.0, 0.1, 0.3, 0.5],
            repeats: 10,
            master_seed: 0,
            chunk_len: 200,
            classifier: ClassifierConfig::default(),
            cutoff_hz: 5.0,
            filter_order: 2,
            warmup_ticks: 50,
            confidence: 0.95,
            diff_window: None,
            keep_samples: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.models.is_empty() || self.horizons_ms.is_empty() || self.drop_rates.is_empty() {
            return Err(Error::invalid("models, horizons and drop rates must be non-empty"));
        }
        if self.repeats < 1 {
            return Err(Error::invalid("repeats must be at least 1"));
        }
        if let Some(h) = self.horizons_ms.iter().find(|h| !(**h > 0.0) || !h.is_finite()) {
            return Err(Error::invalid(format!("horizon must be positive, got {h} ms")));
        }
        if let Some(r) = self.drop_rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::invalid(format!("drop rate must lie in [0, 1], got {r}")));
        }
        if !(self.confidence > 0.0 && self.confidence < 1.0) {
            return Err(Error::invalid("confidence level must be in (0, 1)"));
        }
        self.classifier.validate()
    }
}

/// A trace after filtering and classification.
#[derive(Clone, Debug)]
pub struct PreparedTrace {
    pub raw: Vec<Pose>,
    pub filtered: Vec<Pose>,
    pub labels: Vec<ChunkLabel>,
    /// Class of the chunk each tick belongs to; `None` for the unchunked tail.
    pub tick_class: Vec<Option<MotionClass>>,
    /// Nominal sample period, seconds.
    pub dt: f64,
}

impl PreparedTrace {
    pub fn horizon_steps(&self, horizon_ms: f64) -> Result<usize> {
        let steps = (horizon_ms / (self.dt * 1000.0)).round();
        if steps < 1.0 {
            return Err(Error::invalid(format!(
                "horizon {horizon_ms} ms is shorter than one sample ({} ms)",
                self.dt * 1000.0
            )));
        }
        Ok(steps as usize)
    }
}

pub fn prepare_trace(
    raw: Vec<Pose>,
    chunk_len: usize,
    classifier: &ClassifierConfig,
    cutoff_hz: f64,
    filter_order: usize,
) -> Result<PreparedTrace> {
    let dt = median_interval(&raw).ok_or_else(|| Error::invalid("trace needs at least two poses"))?;
    let bw = design_butterworth_lowpass(filter_order, cutoff_hz, 1.0 / dt)?;
    let filtered = filter_trace(&raw, &bw);
    let chunks = chunk_trace(&filtered, chunk_len)?;
    let labels = chunks
        .iter()
        .map(|c| label_chunk(c, classifier))
        .collect::<Result<Vec<_>>>()?;
    let mut tick_class = vec![None; raw.len()];
    for (chunk, label) in chunks.iter().zip(&labels) {
        for slot in &mut tick_class[chunk.start_index..chunk.start_index + chunk.poses.len()] {
            *slot = Some(label.class);
        }
    }
    Ok(PreparedTrace {
        raw,
        filtered,
        labels,
        tick_class,
        dt,
    })
}

/// One prediction made at `tick` for `tick + horizon_steps`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictionRecord {
    pub tick: usize,
    pub received: bool,
    pub predicted: Pose,
    pub truth: Pose,
    pub e_pos_mm: f64,
    pub e_ori_deg: f64,
    pub class: Option<MotionClass>,
}

/// Runs one predictor over a prepared trace. Records start once
/// `warmup_ticks` have elapsed and stop where ground truth runs out.
pub fn run_predictions(
    trace: &PreparedTrace,
    config: &FilterConfig,
    drop: &mut DropSimulator<ChaCha8Rng>,
    warmup_ticks: usize,
) -> Result<Vec<PredictionRecord>> {
    let n = trace.raw.len();
    let steps = config.horizon_steps;
    let mut predictor = build_predictor(config, &trace.filtered[0])?;
    let mut out = Vec::with_capacity(n.saturating_sub(warmup_ticks + steps));
    for k in 1..n {
        let received = drop.received();
        let z = &trace.filtered[k];
        predictor.step(z.t, received.then_some(z))?;
        if k < warmup_ticks || k + steps >= n {
            continue;
        }
        let predicted = predictor.predict(steps);
        let truth = trace.raw[k + steps];
        out.push(PredictionRecord {
            tick: k,
            received,
            predicted,
            truth,
            e_pos_mm: position_error(&predicted.p, &truth.p),
            e_ori_deg: orientation_error(&predicted.q, &truth.q)?,
            class: trace.tick_class[k],
        });
    }
    Ok(out)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one experiment cell. Independent of the order in which models,
/// horizons or rates were listed.
pub fn cell_seed(master_seed: u64, model: Model, horizon_ms: f64, drop_rate: f64, repeat: usize) -> u64 {
    let model_id = Model::ALL.iter().position(|m| *m == model).unwrap_or(0) as u64;
    [model_id, horizon_ms.to_bits(), drop_rate.to_bits(), repeat as u64]
        .iter()
        .fold(splitmix64(master_seed), |h, v| splitmix64(h ^ splitmix64(*v)))
}

#[derive(Clone, Copy, Debug)]
struct CellKey {
    model: Model,
    horizon_ms: f64,
    drop_rate: f64,
    repeat: usize,
}

struct CellResult {
    /// Per class present: (pos errors, ori errors). `None` when the filter failed.
    errors: Option<Vec<(Vec<f64>, Vec<f64>)>>,
    samples: Vec<SampleRow>,
}

fn run_cell(
    key: CellKey,
    traces: &[PreparedTrace],
    classes: &[MotionClass],
    config: &ExperimentConfig,
) -> Result<CellResult> {
    let seed = cell_seed(config.master_seed, key.model, key.horizon_ms, key.drop_rate, key.repeat);
    let mut drop = DropSimulator::new(ChaCha8Rng::seed_from_u64(seed), key.drop_rate)?;
    let mut errors = vec![(Vec::new(), Vec::new()); classes.len()];
    let mut samples = Vec::new();
    for (ti, trace) in traces.iter().enumerate() {
        let mut fc = FilterConfig::new(key.model, trace.dt, trace.horizon_steps(key.horizon_ms)?);
        fc.diff_window = config.diff_window;
        let records = match run_predictions(trace, &fc, &mut drop, config.warmup_ticks) {
            Ok(r) => r,
            Err(Error::NumericalDegeneracy { .. }) => {
                return Ok(CellResult {
                    errors: None,
                    samples: Vec::new(),
                })
            }
            Err(e) => return Err(e),
        };
        for r in records {
            let Some(class) = r.class else { continue };
            let slot = classes.iter().position(|c| *c == class).expect("class listed");
            errors[slot].0.push(r.e_pos_mm);
            errors[slot].1.push(r.e_ori_deg);
            if config.keep_samples {
                samples.push(SampleRow {
                    model: key.model,
                    class,
                    horizon_ms: key.horizon_ms,
                    drop_rate: key.drop_rate,
                    repeat: key.repeat,
                    trace: ti,
                    tick: r.tick,
                    e_pos_mm: r.e_pos_mm,
                    e_ori_deg: r.e_ori_deg,
                });
            }
        }
    }
    Ok(CellResult {
        errors: Some(errors),
        samples,
    })
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Runs the full grid over already prepared traces.
pub fn run_prepared(config: &ExperimentConfig, traces: &[PreparedTrace]) -> Result<ExperimentReport> {
    config.validate()?;
    if traces.is_empty() {
        return Err(Error::invalid("at least one trace is required"));
    }
    let mut classes: Vec<MotionClass> = traces
        .iter()
        .flat_map(|t| t.labels.iter().map(|l| l.class))
        .collect();
    classes.sort();
    classes.dedup();

    let mut keys = Vec::new();
    for &model in &config.models {
        for &horizon_ms in &config.horizons_ms {
            for &drop_rate in &config.drop_rates {
                for repeat in 0..config.repeats {
                    keys.push(CellKey {
                        model,
                        horizon_ms,
                        drop_rate,
                        repeat,
                    });
                }
            }
        }
    }
    let results: Vec<CellResult> = keys
        .par_iter()
        .map(|k| run_cell(*k, traces, &classes, config))
        .collect::<Result<_>>()?;

    let mut report = ExperimentReport::empty(config.confidence);
    for (group_keys, group) in keys
        .chunks(config.repeats)
        .zip(results.chunks(config.repeats))
    {
        let head = group_keys[0];
        for (ci, &class) in classes.iter().enumerate() {
            let mut pos_means = Vec::new();
            let mut pos_medians = Vec::new();
            let mut ori_means = Vec::new();
            let mut ori_medians = Vec::new();
            let mut failed = 0;
            for (key, cell) in group_keys.iter().zip(group) {
                let row = match &cell.errors {
                    Some(e) if !e[ci].0.is_empty() => {
                        let (pos, ori) = &e[ci];
                        let r = RepeatRow {
                            model: key.model,
                            class,
                            horizon_ms: key.horizon_ms,
                            drop_rate: key.drop_rate,
                            repeat: key.repeat,
                            n_samples: pos.len(),
                            pos_median_mm: median(pos)?,
                            pos_mean_mm: mean(pos),
                            ori_median_deg: median(ori)?,
                            ori_mean_deg: mean(ori),
                            failed: false,
                        };
                        pos_means.push(r.pos_mean_mm);
                        pos_medians.push(r.pos_median_mm);
                        ori_means.push(r.ori_mean_deg);
                        ori_medians.push(r.ori_median_deg);
                        r
                    }
                    other => {
                        let failed_cell = other.is_none();
                        if failed_cell {
                            failed += 1;
                        }
                        RepeatRow {
                            model: key.model,
                            class,
                            horizon_ms: key.horizon_ms,
                            drop_rate: key.drop_rate,
                            repeat: key.repeat,
                            n_samples: 0,
                            pos_median_mm: f64::NAN,
                            pos_mean_mm: f64::NAN,
                            ori_median_deg: f64::NAN,
                            ori_mean_deg: f64::NAN,
                            failed: failed_cell,
                        }
                    }
                };
                report.repeats.push(row);
            }
            let stats = |means: &[f64], medians: &[f64]| -> Result<SummaryStats> {
                if means.is_empty() {
                    return Ok(SummaryStats {
                        median: f64::NAN,
                        mean: f64::NAN,
                        ci_low: f64::NAN,
                        ci_high: f64::NAN,
                        n: 0,
                        level: config.confidence,
                    });
                }
                let mut s = summarize(means, config.confidence)?;
                s.median = median(medians)?;
                Ok(s)
            };
            report.summary.push(SummaryRow {
                model: head.model,
                class,
                horizon_ms: head.horizon_ms,
                drop_rate: head.drop_rate,
                pos: stats(&pos_means, &pos_medians)?,
                ori: stats(&ori_means, &ori_medians)?,
                n_repeats: pos_means.len(),
                failed_repeats: failed,
            });
        }
        for cell in group {
            report.samples.extend_from_slice(&cell.samples);
        }
    }
    Ok(report)
}

/// Prepares every trace with the experiment's filter and classifier settings and runs the grid.
pub fn run_experiment(config: &ExperimentConfig, traces: &[Vec<Pose>]) -> Result<ExperimentReport> {
    config.validate()?;
    let prepared = traces
        .iter()
        .map(|t| {
            prepare_trace(
                t.clone(),
                config.chunk_len,
                &config.classifier,
                config.cutoff_hz,
                config.filter_order,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    run_prepared(config, &prepared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::so3::Quaternion;
    use nalgebra::Vector3;

    fn ramp(n: usize, v: Vector3<f64>) -> Vec<Pose> {
        (0..n)
            .map(|k| {
                let t = k as f64 * 0.01;
                Pose::new(t, Vector3::new(0.0, 1.6, 0.0) + v * t, Quaternion::IDENTITY)
            })
            .collect()
    }

    fn constant_velocity(n: usize) -> Vec<Pose> {
        ramp(n, Vector3::new(0.2, 0.0, -0.1))
    }

    fn small_config(model: Model) -> ExperimentConfig {
        ExperimentConfig {
            models: vec![model],
            horizons_ms: vec![100.0],
            drop_rates: vec![0.0],
            repeats: 10,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn row_accounting() {
        let report = run_experiment(&small_config(Model::Kf), &[constant_velocity(1000)]).unwrap();
        assert_eq!(report.repeats.len(), 10);
        assert_eq!(report.summary.len(), 1);
        assert_eq!(report.summary[0].n_repeats, 10);
    }

    #[test]
    fn zero_drop_repeats_identical() {
        let mut c = small_config(Model::P3o3);
        c.repeats = 2;
        let report = run_experiment(&c, &[constant_velocity(600)]).unwrap();
        let (a, b) = (&report.repeats[0], &report.repeats[1]);
        assert_eq!(a.pos_mean_mm, b.pos_mean_mm);
        assert_eq!(a.ori_mean_deg, b.ori_mean_deg);
    }

    #[test]
    fn kf_constant_velocity_is_exact_in_steady_state() {
        // slow enough that the low-pass group delay stays below 1 mm
        let mut c = small_config(Model::Kf);
        c.repeats = 1;
        c.warmup_ticks = 400;
        let report = run_experiment(&c, &[ramp(2000, Vector3::new(0.01, 0.0, 0.0))]).unwrap();
        assert!(report.summary[0].pos.mean < 1.0, "{}", report.summary[0].pos.mean);
    }

    #[test]
    fn ramp_error_is_prefilter_group_delay() {
        // The predictor is exact on a ramp, so all remaining error is the
        // Butterworth delay: v times the first moment of the impulse response.
        let bw = design_butterworth_lowpass(2, 5.0, 100.0).unwrap();
        let mut state = crate::preprocess::FilterState::new(bw);
        let (mut m0, mut m1) = (0.0, 0.0);
        for n in 0..5000 {
            let x = if n == 0 { 1.0 } else { 0.0 };
            let y = state.filter_channels(&[x; 7])[0];
            m0 += y;
            m1 += n as f64 * y;
        }
        let delay_s = m1 / m0 * 0.01;
        let v = Vector3::new(0.2, 0.0, -0.1);
        let mut c = small_config(Model::Kf);
        c.repeats = 1;
        c.warmup_ticks = 400;
        let report = run_experiment(&c, &[ramp(2000, v)]).unwrap();
        let expected_mm = v.norm() * delay_s * 1000.0;
        let got = report.summary[0].pos.mean;
        assert!((got - expected_mm).abs() < 0.02 * expected_mm, "{got} vs {expected_mm}");
    }

    #[test]
    fn seeds_depend_on_every_key_field() {
        let base = cell_seed(1, Model::Kf, 100.0, 0.5, 0);
        assert_ne!(base, cell_seed(2, Model::Kf, 100.0, 0.5, 0));
        assert_ne!(base, cell_seed(1, Model::Eskf, 100.0, 0.5, 0));
        assert_ne!(base, cell_seed(1, Model::Kf, 80.0, 0.5, 0));
        assert_ne!(base, cell_seed(1, Model::Kf, 100.0, 0.3, 0));
        assert_ne!(base, cell_seed(1, Model::Kf, 100.0, 0.5, 1));
        assert_eq!(base, cell_seed(1, Model::Kf, 100.0, 0.5, 0));
    }

    #[test]
    fn order_of_grid_lists_does_not_change_cells() {
        let trace = constant_velocity(800);
        let mut a = small_config(Model::Kf);
        a.models = vec![Model::Kf, Model::P2o2];
        a.drop_rates = vec![0.0, 0.3];
        a.repeats = 2;
        let mut b = a.clone();
        b.models.reverse();
        b.drop_rates.reverse();
        let ra = run_experiment(&a, std::slice::from_ref(&trace)).unwrap();
        let rb = run_experiment(&b, &[trace]).unwrap();
        for row in &ra.summary {
            let other = rb
                .summary
                .iter()
                .find(|r| r.model == row.model && r.drop_rate == row.drop_rate && r.class == row.class)
                .unwrap();
            assert_eq!(row.pos.mean, other.pos.mean);
        }
    }

    #[test]
    fn invalid_config_rejected() {
        let mut c = small_config(Model::Kf);
        c.drop_rates = vec![1.2];
        assert!(run_experiment(&c, &[constant_velocity(500)]).is_err());
        let c = small_config(Model::Kf);
        assert!(run_experiment(&c, &[]).is_err());
        let mut c = small_config(Model::Kf);
        c.horizons_ms = vec![2.0];
        assert!(run_experiment(&c, &[constant_velocity(500)]).is_err());
    }
}

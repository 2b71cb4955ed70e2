//! Report rows and their CSV / fixed-width text emission.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::classifier::MotionClass;
use crate::error::{Error, Result};
use crate::metrics::SummaryStats;
use crate::predictors::Model;

pub const SUMMARY_HEADER: &str = "model,class,horizon_ms,drop_rate,pos_mean_mm,pos_mean_ci_low,pos_mean_ci_high,pos_median_mm,ori_mean_deg,ori_mean_ci_low,ori_mean_ci_high,ori_median_deg,n_repeats,failed_repeats";
pub const REPEATS_HEADER: &str = "model,class,horizon_ms,drop_rate,repeat,n_samples,pos_median_mm,pos_mean_mm,ori_median_deg,ori_mean_deg,failed";
pub const SAMPLES_HEADER: &str = "model,class,horizon_ms,drop_rate,repeat,trace,tick,e_pos_mm,e_ori_deg";

/// Per-repeat statistics for one (model, class, horizon, drop rate) cell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepeatRow {
    pub model: Model,
    pub class: MotionClass,
    pub horizon_ms: f64,
    pub drop_rate: f64,
    pub repeat: usize,
    pub n_samples: usize,
    pub pos_median_mm: f64,
    pub pos_mean_mm: f64,
    pub ori_median_deg: f64,
    pub ori_mean_deg: f64,
    pub failed: bool,
}

/// Aggregate over repeats. The mean and its CI are taken over per-repeat
/// means; the median is the median of per-repeat medians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryRow {
    pub model: Model,
    pub class: MotionClass,
    pub horizon_ms: f64,
    pub drop_rate: f64,
    pub pos: SummaryStats,
    pub ori: SummaryStats,
    pub n_repeats: usize,
    pub failed_repeats: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRow {
    pub model: Model,
    pub class: MotionClass,
    pub horizon_ms: f64,
    pub drop_rate: f64,
    pub repeat: usize,
    pub trace: usize,
    pub tick: usize,
    pub e_pos_mm: f64,
    pub e_ori_deg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub confidence: f64,
    pub repeats: Vec<RepeatRow>,
    pub summary: Vec<SummaryRow>,
    pub samples: Vec<SampleRow>,
}

impl ExperimentReport {
    pub fn empty(confidence: f64) -> Self {
        ExperimentReport {
            confidence,
            repeats: Vec::new(),
            summary: Vec::new(),
            samples: Vec::new(),
        }
    }

    pub fn find(&self, model: Model, class: MotionClass, horizon_ms: f64, drop_rate: f64) -> Option<&SummaryRow> {
        self.summary.iter().find(|r| {
            r.model == model && r.class == class && r.horizon_ms == horizon_ms && r.drop_rate == drop_rate
        })
    }
}

/// Formats with 9 significant digits, dropping trailing zeros, in the
/// style of C's `%.9g`.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.8e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn format_summary_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(SUMMARY_HEADER);
    out.push('\n');
    for r in &report.summary {
        let f = format_float;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.class,
            f(r.horizon_ms),
            f(r.drop_rate),
            f(r.pos.mean),
            f(r.pos.ci_low),
            f(r.pos.ci_high),
            f(r.pos.median),
            f(r.ori.mean),
            f(r.ori.ci_low),
            f(r.ori.ci_high),
            f(r.ori.median),
            r.n_repeats,
            r.failed_repeats
        );
    }
    out
}

pub fn format_repeats_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(REPEATS_HEADER);
    out.push('\n');
    for r in &report.repeats {
        let f = format_float;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.class,
            f(r.horizon_ms),
            f(r.drop_rate),
            r.repeat,
            r.n_samples,
            f(r.pos_median_mm),
            f(r.pos_mean_mm),
            f(r.ori_median_deg),
            f(r.ori_mean_deg),
            r.failed
        );
    }
    out
}

pub fn format_samples_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(SAMPLES_HEADER);
    out.push('\n');
    for s in &report.samples {
        let f = format_float;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.model,
            s.class,
            f(s.horizon_ms),
            f(s.drop_rate),
            s.repeat,
            s.trace,
            s.tick,
            f(s.e_pos_mm),
            f(s.e_ori_deg)
        );
    }
    out
}

/// Fixed-width table: one block per (horizon, drop rate), one line per
/// model, median and mean per class for position (mm) and orientation (deg).
pub fn format_table(report: &ExperimentReport) -> String {
    let mut blocks: Vec<(f64, f64)> = Vec::new();
    let mut models: Vec<Model> = Vec::new();
    let mut classes: Vec<MotionClass> = Vec::new();
    for r in &report.summary {
        if !blocks.contains(&(r.horizon_ms, r.drop_rate)) {
            blocks.push((r.horizon_ms, r.drop_rate));
        }
        if !models.contains(&r.model) {
            models.push(r.model);
        }
        if !classes.contains(&r.class) {
            classes.push(r.class);
        }
    }
    classes.sort();

    let cell = |x: f64| {
        if x.is_finite() {
            format!("{x:>8.2}")
        } else {
            format!("{:>8}", "-")
        }
    };
    let mut out = String::new();
    if blocks.is_empty() {
        out.push_str("(no results)\n");
        return out;
    }
    for (h, d) in blocks {
        let _ = writeln!(out, "horizon {} ms, drop rate {}", format_float(h), format_float(d));
        let mut head1 = format!("{:<6}", "");
        let mut head2 = format!("{:<6}", "model");
        for c in &classes {
            let _ = write!(head1, " | {:^35}", c.as_str());
            let _ = write!(head2, " | {:>8} {:>8} {:>8} {:>8}", "pos med", "pos mean", "ori med", "ori mean");
        }
        let _ = writeln!(out, "{head1}");
        let _ = writeln!(out, "{head2}");
        let _ = writeln!(out, "{}", "-".repeat(head2.len()));
        for m in &models {
            let mut line = format!("{:<6}", m.as_str());
            for c in &classes {
                match report.find(*m, *c, h, d) {
                    Some(r) => {
                        let _ = write!(
                            line,
                            " | {} {} {} {}",
                            cell(r.pos.median),
                            cell(r.pos.mean),
                            cell(r.ori.median),
                            cell(r.ori.mean)
                        );
                    }
                    None => {
                        let _ = write!(line, " | {}", " ".repeat(35));
                    }
                }
            }
            let _ = writeln!(out, "{line}");
        }
        out.push('\n');
    }
    out
}

/// Writes `summary.csv`, `repeats.csv`, `samples.csv` and `table.txt` into `out_dir`.
pub fn emit_report(report: &ExperimentReport, out_dir: impl AsRef<Path>) -> Result<()> {
    let dir = out_dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let files = [
        ("summary.csv", format_summary_csv(report)),
        ("repeats.csv", format_repeats_csv(report)),
        ("samples.csv", format_samples_csv(report)),
        ("table.txt", format_table(report)),
    ];
    for (name, body) in files {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(100.0), "100");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(1.0 / 3.0), "0.333333333");
        assert_eq!(format_float(123456.789012), "123456.789");
        assert_eq!(format_float(-2.5e-7), "-2.5e-07");
        assert_eq!(format_float(1.23456789012e12), "1.23456789e+12");
        assert_eq!(format_float(9.9999999999), "10");
        assert_eq!(format_float(f64::NAN), "nan");
    }

    #[test]
    fn empty_report_writes_headers_only() {
        let dir = tempfile::tempdir().unwrap();
        emit_report(&ExperimentReport::empty(0.95), dir.path()).unwrap();
        let summary = fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary, format!("{SUMMARY_HEADER}\n"));
        let samples = fs::read_to_string(dir.path().join("samples.csv")).unwrap();
        assert_eq!(samples, format!("{SAMPLES_HEADER}\n"));
        assert!(dir.path().join("table.txt").exists());
    }

    #[test]
    fn unwritable_destination_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        match emit_report(&ExperimentReport::empty(0.95), blocker.join("sub")) {
            Err(Error::Io { path, .. }) => assert!(path.starts_with(&blocker)),
            other => panic!("unexpected {other:?}"),
        }
    }
}

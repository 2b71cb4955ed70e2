//! CSV pose traces: `t,px,py,pz,qw,qx,qy,qz`.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::pose::Pose;
use crate::so3::Quaternion;

pub const TRACE_HEADER: &str = "t,px,py,pz,qw,qx,qy,qz";

/// Allowed deviation of any sample interval from the median interval.
const SPACING_TOLERANCE: f64 = 0.10;

pub fn load_trace(path: impl AsRef<Path>) -> Result<Vec<Pose>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text)
}

/// Parses trace text. Quaternions are renormalized and flipped onto the
/// hemisphere of their predecessor.
pub fn parse_trace(text: &str) -> Result<Vec<Pose>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim_end_matches('\r') == TRACE_HEADER => {}
        Some((_, h)) => {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected header {TRACE_HEADER:?}, found {h:?}"),
            })
        }
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty trace file".into(),
            })
        }
    }
    let mut poses: Vec<Pose> = Vec::new();
    for (idx, raw) in lines {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = raw.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::Parse {
                line,
                msg: format!("expected 8 fields, found {}", fields.len()),
            });
        }
        let mut v = [0.0f64; 8];
        for (slot, field) in v.iter_mut().zip(&fields) {
            *slot = field.trim().parse::<f64>().map_err(|e| Error::Parse {
                line,
                msg: format!("bad number {field:?}: {e}"),
            })?;
            if !slot.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: format!("non-finite value {field:?}"),
                });
            }
        }
        let q = Quaternion::new_normalized(v[4], v[5], v[6], v[7]).map_err(|_| Error::Format {
            line,
            msg: "zero-norm quaternion".into(),
        })?;
        if let Some(prev) = poses.last() {
            if !(v[0] > prev.t) {
                return Err(Error::Format {
                    line,
                    msg: format!("timestamp {} does not increase past {}", v[0], prev.t),
                });
            }
        }
        let q = match poses.last() {
            Some(prev) => q.aligned_with(&prev.q),
            None => q,
        };
        poses.push(Pose::new(v[0], Vector3::new(v[1], v[2], v[3]), q));
    }
    check_spacing(&poses)?;
    Ok(poses)
}

/// Median sample interval in seconds.
pub fn median_interval(poses: &[Pose]) -> Option<f64> {
    let mut d: Vec<f64> = poses.windows(2).map(|w| w[1].t - w[0].t).collect();
    if d.is_empty() {
        return None;
    }
    d.sort_by(f64::total_cmp);
    Some(d[d.len() / 2])
}

fn check_spacing(poses: &[Pose]) -> Result<()> {
    let Some(nominal) = median_interval(poses) else {
        return Ok(());
    };
    for (i, w) in poses.windows(2).enumerate() {
        let d = w[1].t - w[0].t;
        if (d - nominal).abs() > SPACING_TOLERANCE * nominal {
            return Err(Error::Format {
                // +1 for the header, +1 for the second row of the pair
                line: i + 3,
                msg: format!("sample interval {d} s deviates from nominal {nominal} s by more than 10%"),
            });
        }
    }
    Ok(())
}

pub fn format_trace(poses: &[Pose]) -> String {
    let mut out = String::with_capacity(poses.len() * 96 + 32);
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for p in poses {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            p.t, p.p.x, p.p.y, p.p.z, p.q.w, p.q.x, p.q.y, p.q.z
        ));
    }
    out
}

pub fn write_trace(path: impl AsRef<Path>, poses: &[Pose]) -> Result<()> {
    let path = path.as_ref();
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(format_trace(poses).as_bytes())
        .map_err(|e| Error::io(path, e))
}

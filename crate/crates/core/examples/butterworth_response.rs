//! Magnitude response of the pose low-pass and its effect on a noisy signal.

use nalgebra::Vector3;
use posecast::preprocess::{design_butterworth_lowpass, filter_trace};
use posecast::{Pose, Quaternion};

fn main() -> posecast::Result<()> {
    let fs = 100.0;
    for order in [2, 4] {
        let bw = design_butterworth_lowpass(order, 5.0, fs)?;
        println!("order {order}, 5 Hz cutoff at {fs} Hz");
        for f in [0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 45.0] {
            println!("  {f:>5.1} Hz  {:>8.2} dB", bw.magnitude_db(f, fs));
        }
    }

    // 1 Hz head sway with 25 Hz jitter on top
    let trace: Vec<Pose> = (0..400)
        .map(|k| {
            let t = k as f64 / fs;
            let x = 0.05 * (2.0 * std::f64::consts::PI * t).sin()
                + 0.01 * (2.0 * std::f64::consts::PI * 25.0 * t).sin();
            Pose::new(t, Vector3::new(x, 1.6, 0.0), Quaternion::IDENTITY)
        })
        .collect();
    let filtered = filter_trace(&trace, &design_butterworth_lowpass(2, 5.0, fs)?);
    println!("\n   t      raw x [mm]   filtered x [mm]");
    for k in (200..400).step_by(20) {
        println!(
            "{:>5.2} {:>12.2} {:>16.2}",
            trace[k].t,
            trace[k].p.x * 1e3,
            filtered[k].p.x * 1e3
        );
    }
    Ok(())
}

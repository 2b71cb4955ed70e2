//! Packet-loss gate: a packet arrives iff a uniform draw exceeds the drop rate.

use rand::distr::{Distribution, Open01};
use rand::Rng;

use crate::error::{Error, Result};

/// Draws `r` on the open interval (0, 1) and reports whether the packet
/// was received (`r > drop_rate`).
pub fn simulate_drop<R: Rng + ?Sized>(rng: &mut R, drop_rate: f64) -> Result<bool> {
    check_rate(drop_rate)?;
    let r: f64 = Open01.sample(rng);
    Ok(r > drop_rate)
}

fn check_rate(drop_rate: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&drop_rate) {
        return Err(Error::invalid(format!("drop rate must lie in [0, 1], got {drop_rate}")));
    }
    Ok(())
}

/// A validated drop rate bound to its own generator.
#[derive(Clone, Debug)]
pub struct DropSimulator<R> {
    rng: R,
    rate: f64,
}

impl<R: Rng> DropSimulator<R> {
    pub fn new(rng: R, rate: f64) -> Result<Self> {
        check_rate(rate)?;
        Ok(DropSimulator { rng, rate })
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn received(&mut self) -> bool {
        let r: f64 = Open01.sample(&mut self.rng);
        r > self.rate
    }
}

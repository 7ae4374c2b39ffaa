use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{BoundaryCondition, Configuration, SeededStream, Window};
use crate::stats::wilson;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub samples: u64,
    pub hits: u64,
    pub p_hat: f64,
    /// Wilson 95% interval
    pub ci_low: f64,
    pub ci_high: f64,
}

impl ProbabilityEstimate {
    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Each window site infected independently with probability q.
pub fn sample_configuration<R: Rng + ?Sized>(
    window: Window,
    boundary: BoundaryCondition,
    q: f64,
    rng: &mut R,
) -> Configuration {
    let cells = (0..window.len()).map(|_| rng.random_bool(q)).collect();
    Configuration::from_cells(window, cells, boundary).expect("one cell per site")
}

/// Monte Carlo estimate of μ(event) on the window; sample i uses substream i.
pub fn estimate_probability<F>(
    window: Window,
    boundary: BoundaryCondition,
    q: f64,
    samples: u64,
    stream: SeededStream,
    event: F,
) -> Result<ProbabilityEstimate>
where
    F: Fn(&Configuration) -> bool + Sync,
{
    if samples < 100 {
        return Err(Error::InvalidArgument("at least 100 samples are required".into()));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("q = {q} outside [0,1]")));
    }
    let hits: u64 = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream.substream(i).rng();
            let c = sample_configuration(window, boundary.clone(), q, &mut rng);
            u64::from(event(&c))
        })
        .sum();
    let (ci_low, ci_high) = wilson(hits, samples, 1.96);
    Ok(ProbabilityEstimate { samples, hits, p_hat: hits as f64 / samples as f64, ci_low, ci_high })
}

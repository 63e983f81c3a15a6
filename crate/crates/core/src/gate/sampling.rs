use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::Serialize;

use crate::error::{Error, Result};

/// Simulated detector counts with Poissonian error bars.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampledCounts {
    pub counts: Vec<u64>,
    pub errors: Vec<f64>,
}

/// Multinomial draw of `total` events from `dist`, deterministic in `seed`.
///
/// `dist` is renormalized before sampling.
pub fn sample_counts(dist: &[f64], total: u64, seed: u64) -> Result<SampledCounts> {
    if total == 0 {
        return Err(Error::InvalidArgument("total count must be positive".into()));
    }
    if let Some(p) = dist.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::Domain(format!("probability {p}")));
    }
    let mass: f64 = dist.iter().sum();
    if mass <= 0.0 {
        return Err(Error::Degenerate("distribution has no mass".into()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remaining = total;
    let mut remaining_mass = mass;
    let mut counts = Vec::with_capacity(dist.len());
    // Sequential conditional binomials.
    for (idx, &p) in dist.iter().enumerate() {
        let draw = if remaining == 0 || p == 0.0 {
            0
        } else if idx + 1 == dist.len() || p >= remaining_mass {
            remaining
        } else {
            let q = (p / remaining_mass).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .map_err(|e| Error::Numeric(e.to_string()))?
                .sample(&mut rng)
        };
        counts.push(draw);
        remaining -= draw;
        remaining_mass -= p;
    }
    let errors = counts.iter().map(|&c| (c as f64).sqrt()).collect();
    Ok(SampledCounts { counts, errors })
}

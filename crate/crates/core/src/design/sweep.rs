use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::geometry::{hamiltonian_from_geometry, GeometrySpec};
use super::table::DispersionTable;
use crate::error::{Error, Result};
use crate::gate::{fidelity, logical_transfer_matrix, LogicalEncoding};
use crate::walk::unitary;

/// Fabrication jitter: independent Gaussian errors on every width and gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Jitter {
    pub sigma_width_um: f64,
    pub sigma_gap_um: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepStats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub completed: usize,
    /// Trials whose perturbed geometry left the tables' range.
    pub skipped: usize,
    pub fidelities: Vec<f64>,
}

/// Monte-Carlo sensitivity of the gate to fabrication errors.
///
/// Each trial perturbs the geometry, rebuilds the walk and compares its
/// indistinguishable-photon transfer matrix with the unperturbed one.
/// Decoupled gaps are left alone. Trial `k` draws from its own ChaCha
/// stream `(seed, k)`, so results do not depend on scheduling.
pub fn perturbation_sweep(
    geometry: &GeometrySpec,
    beta_table: &DispersionTable,
    kappa_table: &DispersionTable,
    encoding: &LogicalEncoding,
    jitter: Jitter,
    n_trials: usize,
    seed: u64,
) -> Result<SweepStats> {
    if n_trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let sigma_ok = |s: f64| s.is_finite() && s >= 0.0;
    if !sigma_ok(jitter.sigma_width_um) || !sigma_ok(jitter.sigma_gap_um) {
        return Err(Error::Domain(format!("jitter {jitter:?}")));
    }
    let rebuild = |g: &GeometrySpec, x: f64| -> Result<_> {
        let h = hamiltonian_from_geometry(g, beta_table, kappa_table)?;
        logical_transfer_matrix(&unitary(&h, 1.0)?, encoding, x)
    };
    let reference = rebuild(geometry, 1.0)?.to_matrix();

    let outcomes: Vec<Option<f64>> = (0..n_trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(trial as u64);
            let mut g = geometry.clone();
            for w in g.widths_um.iter_mut() {
                let z: f64 = StandardNormal.sample(&mut rng);
                *w += jitter.sigma_width_um * z;
            }
            for i in 0..g.gaps_um.len() {
                let z: f64 = StandardNormal.sample(&mut rng);
                if !geometry.is_decoupled(i) {
                    g.gaps_um[i] += jitter.sigma_gap_um * z;
                }
            }
            match rebuild(&g, 1.0) {
                Ok(tm) => fidelity(&reference, &tm.to_matrix()).ok(),
                Err(_) => None,
            }
        })
        .collect();

    let fidelities: Vec<f64> = outcomes.iter().flatten().copied().collect();
    let completed = fidelities.len();
    if completed == 0 {
        return Err(Error::Domain(
            "every trial left the dispersion tables' range".into(),
        ));
    }
    let mean = fidelities.iter().sum::<f64>() / completed as f64;
    let var = if completed > 1 {
        fidelities.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (completed - 1) as f64
    } else {
        0.0
    };
    Ok(SweepStats {
        mean,
        std: var.sqrt(),
        min: fidelities.iter().copied().fold(f64::INFINITY, f64::min),
        completed,
        skipped: n_trials - completed,
        fidelities,
    })
}

//! Two-photon statistics through a linear-optical unitary.
//!
//! Photons entering modes `i` and `j` leave in the unordered pair `{k, l}`.
//! Partial distinguishability enters through a single overlap `x` in
//! `[0, 1]`: the interference cross term is weighted by `x`, so `x = 1`
//! is the bosonic (permanent) rule and `x = 0` the classical product rule.

use rayon::prelude::*;
use serde::Serialize;
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI, SQRT_2};

use crate::error::{Error, Result};
use crate::walk::WalkUnitary;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Spectral model of a photon-pair source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SourceModel {
    center_wavelength_nm: f64,
    bandwidth_fwhm_nm: f64,
    max_visibility: f64,
    coherence_time_ps: f64,
}

impl SourceModel {
    pub fn new(center_wavelength_nm: f64, bandwidth_fwhm_nm: f64, max_visibility: f64) -> Result<Self> {
        if !(center_wavelength_nm.is_finite() && center_wavelength_nm > 0.0) {
            return Err(Error::Domain(format!(
                "center wavelength must be positive, got {center_wavelength_nm} nm"
            )));
        }
        if !(bandwidth_fwhm_nm.is_finite() && bandwidth_fwhm_nm > 0.0) {
            return Err(Error::Domain(format!(
                "bandwidth must be positive, got {bandwidth_fwhm_nm} nm"
            )));
        }
        if !(0.0..=1.0).contains(&max_visibility) {
            return Err(Error::Domain(format!(
                "visibility must lie in [0, 1], got {max_visibility}"
            )));
        }
        // Transform-limited Gaussian: tau_c = (2 ln2 / pi) * lambda^2 / (c * dlambda).
        let lambda = center_wavelength_nm * 1e-9;
        let dlambda = bandwidth_fwhm_nm * 1e-9;
        let coherence_time_ps = 2.0 * LN_2 / PI * lambda * lambda / (SPEED_OF_LIGHT * dlambda) * 1e12;
        Ok(Self {
            center_wavelength_nm,
            bandwidth_fwhm_nm,
            max_visibility,
            coherence_time_ps,
        })
    }

    pub fn center_wavelength_nm(&self) -> f64 {
        self.center_wavelength_nm
    }

    pub fn bandwidth_fwhm_nm(&self) -> f64 {
        self.bandwidth_fwhm_nm
    }

    pub fn max_visibility(&self) -> f64 {
        self.max_visibility
    }

    pub fn coherence_time_ps(&self) -> f64 {
        self.coherence_time_ps
    }
}

impl Default for SourceModel {
    /// 1550 nm pairs behind a 12 nm filter with 94.6 % HOM visibility.
    fn default() -> Self {
        Self::new(1550.0, 12.0, 0.946).expect("default source is valid")
    }
}

/// A photon pair injected into `mode_a` and `mode_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPhotonInput {
    pub mode_a: usize,
    pub mode_b: usize,
    pub overlap: f64,
}

impl TwoPhotonInput {
    pub fn new(mode_a: usize, mode_b: usize, overlap: f64) -> Result<Self> {
        check_overlap(overlap)?;
        if mode_a == mode_b {
            return Err(Error::Domain(format!(
                "both photons injected into mode {mode_a}"
            )));
        }
        Ok(Self {
            mode_a,
            mode_b,
            overlap,
        })
    }

    pub fn indistinguishable(mode_a: usize, mode_b: usize) -> Result<Self> {
        Self::new(mode_a, mode_b, 1.0)
    }
}

fn check_overlap(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("overlap must lie in [0, 1], got {x}")));
    }
    Ok(())
}

/// Probability distribution over unordered output pairs `{k, l}`, `k <= l`.
///
/// Pairs are stored in lexicographic order. Same-mode outcomes (`k == l`)
/// need photon-number resolution and are kept separate by
/// [`OutcomeDistribution::coincidences`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutcomeDistribution {
    n_modes: usize,
    probs: Vec<f64>,
}

impl OutcomeDistribution {
    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    /// All `(k, l)` with `k <= l` in storage order.
    pub fn pairs(n_modes: usize) -> impl Iterator<Item = (usize, usize)> {
        (0..n_modes).flat_map(move |k| (k..n_modes).map(move |l| (k, l)))
    }

    fn index(&self, k: usize, l: usize) -> usize {
        let (k, l) = if k <= l { (k, l) } else { (l, k) };
        // Rows 0..k contribute n, n-1, ..., n-k+1 entries.
        k * self.n_modes - k * (k.saturating_sub(1)) / 2 - k + l
    }

    pub fn get(&self, k: usize, l: usize) -> f64 {
        assert!(k < self.n_modes && l < self.n_modes, "mode out of range");
        self.probs[self.index(k, l)]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        Self::pairs(self.n_modes).zip(self.probs.iter().copied())
    }

    /// Outcomes with the photons in different modes.
    pub fn coincidences(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.iter().filter(|((k, l), _)| k != l)
    }

    /// Total probability of both photons leaving in the same mode.
    pub fn bunched_mass(&self) -> f64 {
        self.iter().filter(|((k, l), _)| k == l).map(|(_, p)| p).sum()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

/// Bosonic amplitude for inputs `(i, j)` to reach outputs `{k, l}`.
pub fn two_photon_amplitude(u: &WalkUnitary, i: usize, j: usize, k: usize, l: usize) -> Result<Complex64> {
    for m in [i, j, k, l] {
        u.check_mode(m)?;
    }
    if i == j {
        return Err(Error::Domain(format!("both photons injected into mode {i}")));
    }
    Ok(amplitude_unchecked(u, i, j, k, l))
}

#[inline]
pub(crate) fn amplitude_unchecked(u: &WalkUnitary, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
    if k == l {
        u.amplitude(k, i) * u.amplitude(k, j) * SQRT_2
    } else {
        u.amplitude(k, i) * u.amplitude(l, j) + u.amplitude(l, i) * u.amplitude(k, j)
    }
}

#[inline]
fn coincidence_unchecked(u: &WalkUnitary, i: usize, j: usize, x: f64, k: usize, l: usize) -> f64 {
    if k == l {
        (1.0 + x) * (u.amplitude(k, i) * u.amplitude(k, j)).norm_sqr()
    } else {
        let direct = u.amplitude(k, i) * u.amplitude(l, j);
        let exchange = u.amplitude(l, i) * u.amplitude(k, j);
        direct.norm_sqr() + exchange.norm_sqr() + 2.0 * x * (direct * exchange.conj()).re
    }
}

/// Detection probability for outcome `{k, l}` with partially
/// distinguishable photons.
pub fn coincidence_prob(u: &WalkUnitary, input: &TwoPhotonInput, k: usize, l: usize) -> Result<f64> {
    check_input(u, input)?;
    u.check_mode(k)?;
    u.check_mode(l)?;
    Ok(coincidence_unchecked(u, input.mode_a, input.mode_b, input.overlap, k, l))
}

fn check_input(u: &WalkUnitary, input: &TwoPhotonInput) -> Result<()> {
    u.check_mode(input.mode_a)?;
    u.check_mode(input.mode_b)?;
    check_overlap(input.overlap)?;
    if input.mode_a == input.mode_b {
        return Err(Error::Domain(format!(
            "both photons injected into mode {}",
            input.mode_a
        )));
    }
    Ok(())
}

/// Overlap of two photons separated by delay `tau_ps`.
pub fn mutual_coherence(tau_ps: f64, source: &SourceModel) -> f64 {
    let r = tau_ps / source.coherence_time_ps;
    source.max_visibility * (-(r * r)).exp()
}

pub fn two_photon_distribution(u: &WalkUnitary, input: &TwoPhotonInput) -> Result<OutcomeDistribution> {
    check_input(u, input)?;
    let n = u.n_modes();
    let probs = OutcomeDistribution::pairs(n)
        .map(|(k, l)| coincidence_unchecked(u, input.mode_a, input.mode_b, input.overlap, k, l))
        .collect();
    Ok(OutcomeDistribution { n_modes: n, probs })
}

/// One point of a delay scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanPoint {
    pub tau_ps: f64,
    pub overlap: f64,
    pub distribution: OutcomeDistribution,
}

/// Output distributions as a function of the delay between the photons.
pub fn hom_scan(
    u: &WalkUnitary,
    mode_a: usize,
    mode_b: usize,
    tau_grid_ps: &[f64],
    source: &SourceModel,
) -> Result<Vec<ScanPoint>> {
    if tau_grid_ps.is_empty() {
        return Err(Error::InvalidArgument("empty delay grid".into()));
    }
    if let Some(t) = tau_grid_ps.iter().find(|t| !t.is_finite()) {
        return Err(Error::Numeric(format!("delay {t}")));
    }
    tau_grid_ps
        .par_iter()
        .map(|&tau_ps| {
            let overlap = mutual_coherence(tau_ps, source);
            let input = TwoPhotonInput::new(mode_a, mode_b, overlap)?;
            Ok(ScanPoint {
                tau_ps,
                overlap,
                distribution: two_photon_distribution(u, &input)?,
            })
        })
        .collect()
}

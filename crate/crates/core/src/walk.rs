//! Tight-binding Hamiltonians and their exact unitary evolution.
//!
//! A waveguide array with `N` modes is described by on-site terms `beta`
//! and nearest-neighbour couplings `kappa`. Evolution over a scalar `t`
//! (time, or length for a waveguide chip) is `exp(-i h t)`, computed from
//! the real-symmetric eigendecomposition of `h`. Arrays with a zero
//! coupling split into independent blocks, which are diagonalized
//! separately so that the decoupled parts of the unitary are exactly zero.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Unitarity tolerance on the max-abs entry of `U†U - I`.
pub const UNITARITY_TOL: f64 = 1e-10;

/// Tolerance on the norm of input amplitude vectors.
pub const NORMALIZATION_TOL: f64 = 1e-12;

const CNOT_ONSITE: [f64; 6] = [0.0, -0.73, 0.67, 0.01, -1.01, -1.67];
const CNOT_COUPLING: [f64; 5] = [-1.27, 0.0, -0.51, -1.69, -0.52];

/// Tridiagonal tight-binding Hamiltonian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hamiltonian {
    beta: Vec<f64>,
    kappa: Vec<f64>,
}

impl Hamiltonian {
    pub fn new(beta: Vec<f64>, kappa: Vec<f64>) -> Result<Self> {
        if beta.len() < 2 {
            return Err(Error::Size(format!(
                "need at least 2 modes, got {}",
                beta.len()
            )));
        }
        if kappa.len() + 1 != beta.len() {
            return Err(Error::Size(format!(
                "{} on-site terms need {} couplings, got {}",
                beta.len(),
                beta.len() - 1,
                kappa.len()
            )));
        }
        if let Some(v) = beta.iter().chain(&kappa).find(|v| !v.is_finite()) {
            return Err(Error::Numeric(format!("Hamiltonian entry {v}")));
        }
        Ok(Self { beta, kappa })
    }

    /// The six-mode Hamiltonian-time product of the quantum-walk CNOT,
    /// using the two-decimal coefficients times π.
    pub fn cnot() -> Self {
        Self {
            beta: CNOT_ONSITE.iter().map(|v| v * PI).collect(),
            kappa: CNOT_COUPLING.iter().map(|v| v * PI).collect(),
        }
    }

    pub fn n_modes(&self) -> usize {
        self.beta.len()
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    /// Dense real-symmetric matrix form.
    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n_modes();
        let mut m = DMatrix::zeros(n, n);
        for (i, b) in self.beta.iter().enumerate() {
            m[(i, i)] = *b;
        }
        for (i, k) in self.kappa.iter().enumerate() {
            m[(i, i + 1)] = *k;
            m[(i + 1, i)] = *k;
        }
        m
    }

    /// Multiply every coefficient by `factor`, e.g. to form `h·t`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            beta: self.beta.iter().map(|v| v * factor).collect(),
            kappa: self.kappa.iter().map(|v| v * factor).collect(),
        }
    }

    /// Eigendecomposition, one block per run of nonzero couplings.
    pub fn spectrum(&self) -> Spectrum {
        let mut blocks = Vec::new();
        let mut start = 0;
        for end in 1..=self.n_modes() {
            if end == self.n_modes() || self.kappa[end - 1] == 0.0 {
                blocks.push(Block::diagonalize(&self.beta[start..end], &self.kappa[start..end - 1], start));
                start = end;
            }
        }
        Spectrum {
            n_modes: self.n_modes(),
            blocks,
        }
    }
}

#[derive(Debug, Clone)]
struct Block {
    offset: usize,
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl Block {
    fn diagonalize(beta: &[f64], kappa: &[f64], offset: usize) -> Self {
        let n = beta.len();
        if n == 1 {
            return Self {
                offset,
                energies: DVector::from_element(1, beta[0]),
                vectors: DMatrix::identity(1, 1),
            };
        }
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = beta[i];
        }
        for (i, k) in kappa.iter().enumerate() {
            m[(i, i + 1)] = *k;
            m[(i + 1, i)] = *k;
        }
        let eig = m.symmetric_eigen();
        Self {
            offset,
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        }
    }

    fn len(&self) -> usize {
        self.energies.len()
    }
}

/// Real-symmetric eigendecomposition of a [`Hamiltonian`], reusable for
/// evaluating `exp(-i h t)` at many `t`.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n_modes: usize,
    blocks: Vec<Block>,
}

impl Spectrum {
    pub fn unitary(&self, t: f64) -> Result<WalkUnitary> {
        if !t.is_finite() {
            return Err(Error::Numeric(format!("evolution parameter t = {t}")));
        }
        if t == 0.0 {
            return Ok(WalkUnitary::identity(self.n_modes));
        }
        let mut u = DMatrix::zeros(self.n_modes, self.n_modes);
        for block in &self.blocks {
            let phases: Vec<Complex64> = block
                .energies
                .iter()
                .map(|e| Complex64::from_polar(1.0, -e * t))
                .collect();
            if phases.iter().any(|p| !p.is_finite()) {
                return Err(Error::Numeric(format!("phase overflow at t = {t}")));
            }
            let v = &block.vectors;
            let n = block.len();
            for r in 0..n {
                for c in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (m, p) in phases.iter().enumerate() {
                        acc += p * (v[(r, m)] * v[(c, m)]);
                    }
                    u[(block.offset + r, block.offset + c)] = acc;
                }
            }
        }
        Ok(WalkUnitary { matrix: u })
    }
}

/// Unitary transfer matrix of a linear-optical network.
///
/// Entry `(k, i)` is the amplitude for a photon entering mode `i` to leave
/// in mode `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WalkUnitary {
    matrix: DMatrix<Complex64>,
}

impl WalkUnitary {
    pub fn identity(n_modes: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n_modes, n_modes),
        }
    }

    /// Wrap an arbitrary matrix, checking that it is square and unitary.
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() == 0 {
            return Err(Error::Size(format!(
                "unitary must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|z| !z.is_finite()) {
            return Err(Error::Numeric("non-finite matrix entry".into()));
        }
        let u = Self { matrix };
        let defect = u.unitarity_defect();
        if defect >= UNITARITY_TOL {
            return Err(Error::Numeric(format!(
                "matrix is not unitary (max |U†U - I| = {defect:.3e})"
            )));
        }
        Ok(u)
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Amplitude from input mode `input` to output mode `output`.
    #[inline]
    pub fn amplitude(&self, output: usize, input: usize) -> Complex64 {
        self.matrix[(output, input)]
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.n_modes() {
            return Err(Error::Index {
                index: mode,
                len: self.n_modes(),
            });
        }
        Ok(())
    }

    /// Max-abs entry of `U†U - I`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.n_modes();
        let gram = self.matrix.adjoint() * &self.matrix;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((gram[(r, c)] - target).norm());
            }
        }
        worst
    }

    /// `self · first`: apply `first`, then `self`.
    pub fn after(&self, first: &WalkUnitary) -> Result<WalkUnitary> {
        if first.n_modes() != self.n_modes() {
            return Err(Error::Size(format!(
                "cannot compose {}-mode and {}-mode unitaries",
                self.n_modes(),
                first.n_modes()
            )));
        }
        Ok(WalkUnitary {
            matrix: &self.matrix * &first.matrix,
        })
    }

    /// Relabel modes: old mode `m` becomes mode `perm[m]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<WalkUnitary> {
        let n = self.n_modes();
        let mut seen = vec![false; n];
        if perm.len() != n {
            return Err(Error::Size(format!("permutation of {} modes has length {}", n, perm.len())));
        }
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        let mut m = DMatrix::zeros(n, n);
        for k in 0..n {
            for i in 0..n {
                m[(perm[k], perm[i])] = self.matrix[(k, i)];
            }
        }
        Ok(WalkUnitary { matrix: m })
    }

    pub fn with_global_phase(&self, theta: f64) -> WalkUnitary {
        WalkUnitary {
            matrix: &self.matrix * Complex64::from_polar(1.0, theta),
        }
    }

    /// Apply to a vector of input amplitudes.
    pub fn apply(&self, state: &[Complex64]) -> Result<Vec<Complex64>> {
        if state.len() != self.n_modes() {
            return Err(Error::Size(format!(
                "state has {} amplitudes for {} modes",
                state.len(),
                self.n_modes()
            )));
        }
        let v = DVector::from_column_slice(state);
        Ok((&self.matrix * v).iter().copied().collect())
    }
}

/// Intensity in every mode along the evolution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub z: Vec<f64>,
    pub intensities: Vec<Vec<f64>>,
}

pub fn build_hamiltonian(beta: Vec<f64>, kappa: Vec<f64>) -> Result<Hamiltonian> {
    Hamiltonian::new(beta, kappa)
}

pub fn cnot_hamiltonian_time() -> Hamiltonian {
    Hamiltonian::cnot()
}

/// `exp(-i h t)`.
pub fn unitary(h: &Hamiltonian, t: f64) -> Result<WalkUnitary> {
    h.spectrum().unitary(t)
}

/// Uniform grid `z_k = t·k/(n_steps-1)`.
pub fn z_grid(t: f64, n_steps: usize) -> Result<Vec<f64>> {
    if n_steps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 steps, got {n_steps}"
        )));
    }
    if !t.is_finite() {
        return Err(Error::Numeric(format!("evolution parameter t = {t}")));
    }
    let last = (n_steps - 1) as f64;
    Ok((0..n_steps).map(|k| t * k as f64 / last).collect())
}

pub fn trajectory(
    h: &Hamiltonian,
    t: f64,
    input: &[Complex64],
    n_steps: usize,
) -> Result<Trajectory> {
    if input.len() != h.n_modes() {
        return Err(Error::Size(format!(
            "input has {} amplitudes for {} modes",
            input.len(),
            h.n_modes()
        )));
    }
    let norm: f64 = input.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs().is_nan() || (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Normalization(norm));
    }
    let z = z_grid(t, n_steps)?;
    let spectrum = h.spectrum();
    let intensities = z
        .iter()
        .map(|&zk| {
            let u = spectrum.unitary(zk)?;
            Ok(u.apply(input)?.iter().map(|a| a.norm_sqr()).collect())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    Ok(Trajectory { z, intensities })
}

/// Output intensities for light injected into a single mode.
pub fn single_photon_output(u: &WalkUnitary, input_mode: usize) -> Result<Vec<f64>> {
    u.check_mode(input_mode)?;
    Ok((0..u.n_modes())
        .map(|k| u.amplitude(k, input_mode).norm_sqr())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coupler(kappa: f64) -> Hamiltonian {
        Hamiltonian::new(vec![0.0, 0.0], vec![kappa]).unwrap()
    }

    #[test]
    fn size_errors() {
        assert!(matches!(
            Hamiltonian::new(vec![0.0; 6], vec![0.0; 6]),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            Hamiltonian::new(vec![0.0], vec![]),
            Err(Error::Size(_))
        ));
        assert!(matches!(
            Hamiltonian::new(vec![0.0, f64::NAN], vec![1.0]),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn two_mode_coupler() {
        let h = coupler(PI / 4.0);
        assert_eq!(h.n_modes(), 2);
        for &t in &[0.0, 0.3, 1.0, 2.7] {
            let u = unitary(&h, t).unwrap();
            let expected = (PI / 4.0 * t).sin().powi(2);
            assert!((u.amplitude(1, 0).norm_sqr() - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn cnot_constants() {
        let h = cnot_hamiltonian_time();
        let d = h.dense();
        let expected = [0.0, -0.73, 0.67, 0.01, -1.01, -1.67];
        for i in 0..6 {
            assert_eq!(d[(i, i)], expected[i] * PI);
        }
        assert_eq!(d[(1, 2)], 0.0);
        assert_eq!(d[(2, 1)], 0.0);
        assert_eq!(d, d.transpose());

        let built = build_hamiltonian(
            expected.iter().map(|v| v * PI).collect(),
            [-1.27, 0.0, -0.51, -1.69, -0.52].iter().map(|v| v * PI).collect(),
        )
        .unwrap();
        assert_eq!(built, h);
    }

    #[test]
    fn zero_time_is_identity() {
        let u = unitary(&cnot_hamiltonian_time(), 0.0).unwrap();
        assert_eq!(u, WalkUnitary::identity(6));
    }

    #[test]
    fn non_finite_time_rejected() {
        assert!(matches!(
            unitary(&coupler(1.0), f64::INFINITY),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn decoupled_block_is_exact() {
        let u = unitary(&cnot_hamiltonian_time(), 1.0).unwrap();
        let out = single_photon_output(&u, 0).unwrap();
        assert!(out[2..].iter().all(|&p| p == 0.0));
        assert!((out[0] + out[1] - 1.0).abs() < 1e-12);
        let out = single_photon_output(&u, 2).unwrap();
        assert_eq!(out[0], 0.0);
        assert_eq!(out[1], 0.0);
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn single_photon_identity_and_range() {
        let u = WalkUnitary::identity(6);
        assert_eq!(
            single_photon_output(&u, 3).unwrap(),
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]
        );
        assert!(matches!(
            single_photon_output(&u, 6),
            Err(Error::Index { index: 6, len: 6 })
        ));
    }

    #[test]
    fn trajectory_contract() {
        let h = cnot_hamiltonian_time();
        let mut input = vec![Complex64::new(0.0, 0.0); 6];
        input[1] = Complex64::new(1.0, 0.0);
        let traj = trajectory(&h, 1.0, &input, 2).unwrap();
        assert_eq!(traj.z, vec![0.0, 1.0]);
        assert_eq!(traj.intensities[0], vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let direct = single_photon_output(&unitary(&h, 1.0).unwrap(), 1).unwrap();
        for (a, b) in traj.intensities[1].iter().zip(&direct) {
            assert!((a - b).abs() < 1e-14);
        }

        let traj = trajectory(&h, 1.0, &input, 51).unwrap();
        for row in &traj.intensities {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn trajectory_errors() {
        let h = cnot_hamiltonian_time();
        let input = vec![Complex64::new(0.5, 0.0); 6];
        assert!(matches!(
            trajectory(&h, 1.0, &input, 10),
            Err(Error::Normalization(_))
        ));
        let mut ok = vec![Complex64::new(0.0, 0.0); 6];
        ok[0] = Complex64::new(1.0, 0.0);
        assert!(matches!(
            trajectory(&h, 1.0, &ok, 1),
            Err(Error::InvalidArgument(_))
        ));
        assert!(matches!(
            trajectory(&h, 1.0, &ok[..5], 4),
            Err(Error::Size(_))
        ));
    }

    #[test]
    fn from_matrix_rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(WalkUnitary::from_matrix(m).is_err());
        let m = DMatrix::<Complex64>::identity(2, 3);
        assert!(matches!(WalkUnitary::from_matrix(m), Err(Error::Size(_))));
    }

    #[test]
    fn permutation_relabels_entries() {
        let u = unitary(&cnot_hamiltonian_time(), 1.0).unwrap();
        let perm = [3, 0, 5, 1, 4, 2];
        let p = u.permuted(&perm).unwrap();
        for k in 0..6 {
            for i in 0..6 {
                assert_eq!(p.amplitude(perm[k], perm[i]), u.amplitude(k, i));
            }
        }
        assert!(u.permuted(&[0, 0, 1, 2, 3, 4]).is_err());
    }
}

//! Logical two-qubit layer on top of the six-mode walk.
//!
//! Two path-encoded qubits occupy four of the six modes; the remaining two
//! are auxiliary. Logical basis states `|ct>` are ordered `00, 01, 10, 11`
//! and map to the mode pairs `(c0,t0), (c0,t1), (c1,t0), (c1,t1)`. A gate
//! acts by post-selecting the events with one photon on each qubit.

mod fidelity;
mod sampling;

pub use fidelity::fidelity;
pub use sampling::{sample_counts, SampledCounts};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::interference::{amplitude_unchecked, coincidence_prob, TwoPhotonInput};
use crate::walk::{unitary, Hamiltonian, WalkUnitary};

/// Labels of the logical basis, control qubit first.
pub const LOGICAL_LABELS: [&str; 4] = ["00", "01", "10", "11"];

/// Image of each logical basis state under CNOT.
pub const CNOT_IMAGE: [usize; 4] = [0, 1, 3, 2];

/// Minimum fraction of post-selected mass on the CNOT pattern for
/// [`find_encoding`] to accept an assignment.
pub const PATTERN_MASS_THRESHOLD: f64 = 0.99;

/// Smallest amplitude for which a logical phase is reported.
pub const PHASE_AMPLITUDE_FLOOR: f64 = 1e-6;

const GATE_MODES: usize = 6;

/// Assignment of the six modes to qubit rails and auxiliary modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LogicalEncoding {
    pub c0: usize,
    pub c1: usize,
    pub t0: usize,
    pub t1: usize,
    /// Auxiliary modes, ascending.
    pub aux: [usize; 2],
}

impl LogicalEncoding {
    /// Build from the four rail modes; the auxiliary modes are the rest.
    pub fn new(c0: usize, c1: usize, t0: usize, t1: usize) -> Result<Self> {
        let rails = [c0, c1, t0, t1];
        let mut seen = [false; GATE_MODES];
        for &m in &rails {
            if m >= GATE_MODES {
                return Err(Error::Index {
                    index: m,
                    len: GATE_MODES,
                });
            }
            if seen[m] {
                return Err(Error::InvalidArgument(format!(
                    "rail modes {rails:?} are not distinct"
                )));
            }
            seen[m] = true;
        }
        let mut free = (0..GATE_MODES).filter(|m| !seen[*m]);
        let aux = [free.next().unwrap(), free.next().unwrap()];
        Ok(Self { c0, c1, t0, t1, aux })
    }

    /// Build from 1-based waveguide numbers.
    pub fn from_waveguides(c0: usize, c1: usize, t0: usize, t1: usize) -> Result<Self> {
        let to_mode = |w: usize| {
            w.checked_sub(1).ok_or_else(|| {
                Error::InvalidArgument("waveguides are numbered from 1".to_string())
            })
        };
        Self::new(to_mode(c0)?, to_mode(c1)?, to_mode(t0)?, to_mode(t1)?)
    }

    /// Rails as 1-based waveguide numbers `[c0, c1, t0, t1]`.
    pub fn waveguides(&self) -> [usize; 4] {
        [self.c0 + 1, self.c1 + 1, self.t0 + 1, self.t1 + 1]
    }

    /// Mode pair occupied by logical basis state `state` (0..4).
    pub fn pair(&self, state: usize) -> (usize, usize) {
        assert!(state < 4, "logical state index {state} out of range");
        let c = if state & 2 == 0 { self.c0 } else { self.c1 };
        let t = if state & 1 == 0 { self.t0 } else { self.t1 };
        (c, t)
    }

    /// The same roles after relabeling mode `m` as `perm[m]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != GATE_MODES {
            return Err(Error::Size(format!("permutation has length {}", perm.len())));
        }
        Self::new(perm[self.c0], perm[self.c1], perm[self.t0], perm[self.t1])
    }
}

/// Post-selected 4x4 transfer matrix; rows are inputs, columns outputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogicalTransferMatrix {
    pub probs: [[f64; 4]; 4],
    pub normalized: bool,
}

impl LogicalTransferMatrix {
    pub fn row_sums(&self) -> [f64; 4] {
        self.probs.map(|row| row.iter().sum())
    }

    /// Probability of leaving the logical subspace, per input. Only
    /// meaningful for raw matrices.
    pub fn leakage(&self) -> [f64; 4] {
        self.row_sums().map(|s| 1.0 - s)
    }

    pub fn row_normalized(&self) -> Result<Self> {
        let mut probs = self.probs;
        for (r, row) in probs.iter_mut().enumerate() {
            let s: f64 = row.iter().sum();
            if s <= 0.0 {
                return Err(Error::Degenerate(format!(
                    "input {} never reaches the logical subspace",
                    LOGICAL_LABELS[r]
                )));
            }
            row.iter_mut().for_each(|p| *p /= s);
        }
        Ok(Self {
            probs,
            normalized: true,
        })
    }

    pub fn argmax_row(&self, row: usize) -> usize {
        let r = &self.probs[row];
        (0..4).fold(0, |best, c| if r[c] > r[best] { c } else { best })
    }

    /// Fraction of a row's logical mass outside the CNOT image.
    pub fn off_pattern_mass(&self, row: usize) -> f64 {
        let r = &self.probs[row];
        let total: f64 = r.iter().sum();
        let off: f64 = (0..4).filter(|&c| c != CNOT_IMAGE[row]).map(|c| r[c]).sum();
        off / total
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |r, c| self.probs[r][c])
    }
}

/// Post-selected two-photon amplitudes `A[in][out]` for indistinguishable
/// photons.
pub fn logical_amplitudes(u: &WalkUnitary, enc: &LogicalEncoding) -> Result<[[Complex64; 4]; 4]> {
    check_gate_unitary(u)?;
    let mut a = [[Complex64::new(0.0, 0.0); 4]; 4];
    for (r, row) in a.iter_mut().enumerate() {
        let (i, j) = enc.pair(r);
        for (c, entry) in row.iter_mut().enumerate() {
            let (k, l) = enc.pair(c);
            *entry = amplitude_unchecked(u, i, j, k, l);
        }
    }
    Ok(a)
}

fn check_gate_unitary(u: &WalkUnitary) -> Result<()> {
    if u.n_modes() != GATE_MODES {
        return Err(Error::Size(format!(
            "logical gate needs {GATE_MODES} modes, got {}",
            u.n_modes()
        )));
    }
    Ok(())
}

pub fn logical_transfer_matrix(u: &WalkUnitary, enc: &LogicalEncoding, x: f64) -> Result<LogicalTransferMatrix> {
    check_gate_unitary(u)?;
    let mut probs = [[0.0; 4]; 4];
    for (r, row) in probs.iter_mut().enumerate() {
        let (i, j) = enc.pair(r);
        let input = TwoPhotonInput::new(i, j, x)?;
        for (c, entry) in row.iter_mut().enumerate() {
            let (k, l) = enc.pair(c);
            *entry = coincidence_prob(u, &input, k, l)?;
        }
    }
    Ok(LogicalTransferMatrix {
        probs,
        normalized: false,
    })
}

pub fn postselection_success(u: &WalkUnitary, enc: &LogicalEncoding, input: usize, x: f64) -> Result<f64> {
    if input >= 4 {
        return Err(Error::Index { index: input, len: 4 });
    }
    Ok(logical_transfer_matrix(u, enc, x)?.row_sums()[input])
}

/// Quality of an encoding as a post-selected CNOT.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EncodingScore {
    pub encoding: LogicalEncoding,
    /// Fraction of post-selected probability on the CNOT pattern.
    pub pattern_mass: f64,
    /// `|sum_r A[r][cnot(r)]|^2 / (4 sum |A|^2)`: process fidelity of the
    /// post-selected logical map with CNOT. Sensitive to phases.
    pub gate_overlap: f64,
    /// Raw `00 -> 00` probability; tie-breaker between symmetric encodings.
    pub success_00: f64,
}

pub fn score_encoding(u: &WalkUnitary, enc: &LogicalEncoding) -> Result<EncodingScore> {
    let a = logical_amplitudes(u, enc)?;
    let total: f64 = a.iter().flatten().map(|z| z.norm_sqr()).sum();
    let (pattern_mass, gate_overlap) = if total > 1e-12 {
        let on: f64 = (0..4).map(|r| a[r][CNOT_IMAGE[r]].norm_sqr()).sum();
        let coherent: Complex64 = (0..4).map(|r| a[r][CNOT_IMAGE[r]]).sum();
        (on / total, coherent.norm_sqr() / (4.0 * total))
    } else {
        (0.0, 0.0)
    };
    Ok(EncodingScore {
        encoding: *enc,
        pattern_mass,
        gate_overlap,
        success_00: a[0][0].norm_sqr(),
    })
}

/// Search every rail assignment for the best post-selected CNOT.
///
/// Assignments whose pattern mass reaches [`PATTERN_MASS_THRESHOLD`] are
/// ranked by gate overlap, so that encodings which reproduce the truth
/// table only up to logical phases lose to phase-free ones. Exchanging
/// `t0` and `t1` leaves the overlap unchanged; such ties go to the larger
/// `00 -> 00` probability.
pub fn find_encoding(u: &WalkUnitary) -> Result<LogicalEncoding> {
    check_gate_unitary(u)?;
    const TIE: f64 = 1e-12;
    let mut best: Option<EncodingScore> = None;
    let mut best_mass: f64 = 0.0;
    for c0 in 0..GATE_MODES {
        for c1 in 0..GATE_MODES {
            for t0 in 0..GATE_MODES {
                for t1 in 0..GATE_MODES {
                    let Ok(enc) = LogicalEncoding::new(c0, c1, t0, t1) else {
                        continue;
                    };
                    let score = score_encoding(u, &enc)?;
                    best_mass = best_mass.max(score.pattern_mass);
                    if score.pattern_mass < PATTERN_MASS_THRESHOLD {
                        continue;
                    }
                    let better = match &best {
                        None => true,
                        Some(b) => {
                            score.gate_overlap > b.gate_overlap + TIE
                                || ((score.gate_overlap - b.gate_overlap).abs() <= TIE
                                    && score.success_00 > b.success_00 + TIE)
                        }
                    };
                    if better {
                        best = Some(score);
                    }
                }
            }
        }
    }
    best.map(|s| s.encoding)
        .ok_or(Error::NotCnot { best: best_mass })
}

/// Phase of each CNOT transition `|r> -> |cnot(r)>` relative to `00 -> 00`,
/// wrapped to `(-pi, pi]`.
pub fn logical_phases(u: &WalkUnitary, enc: &LogicalEncoding) -> Result<[f64; 4]> {
    let a = logical_amplitudes(u, enc)?;
    let transitions: [Complex64; 4] = std::array::from_fn(|r| a[r][CNOT_IMAGE[r]]);
    for (r, z) in transitions.iter().enumerate() {
        if z.norm() < PHASE_AMPLITUDE_FLOOR {
            return Err(Error::UndefinedPhase {
                input: r,
                magnitude: z.norm(),
            });
        }
    }
    let reference = transitions[0].conj();
    Ok(transitions.map(|z| (z * reference).arg()))
}

/// Directional coupler and phase shifter placed on the control rails
/// before the walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QubitStatePrep {
    pub coupler_reflectivity: f64,
    pub phase: f64,
    pub target_state: usize,
}

impl QubitStatePrep {
    pub fn new(coupler_reflectivity: f64, phase: f64, target_state: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&coupler_reflectivity) {
            return Err(Error::Domain(format!(
                "coupler reflectivity must lie in [0, 1], got {coupler_reflectivity}"
            )));
        }
        if !phase.is_finite() {
            return Err(Error::Numeric(format!("phase {phase}")));
        }
        if target_state > 1 {
            return Err(Error::InvalidArgument(format!(
                "target state must be 0 or 1, got {target_state}"
            )));
        }
        Ok(Self {
            coupler_reflectivity,
            phase,
            target_state,
        })
    }

    /// Balanced coupler, zero phase, target in `|0>`.
    pub fn hadamard_like() -> Self {
        Self {
            coupler_reflectivity: 0.5,
            phase: 0.0,
            target_state: 0,
        }
    }

    /// The input stage as a six-mode unitary.
    pub fn stage_unitary(&self, enc: &LogicalEncoding) -> WalkUnitary {
        let eta = self.coupler_reflectivity;
        let through = Complex64::new((1.0 - eta).sqrt(), 0.0);
        let cross = Complex64::new(0.0, eta.sqrt());
        let shift = Complex64::from_polar(1.0, self.phase);
        let mut m = DMatrix::identity(GATE_MODES, GATE_MODES);
        m[(enc.c0, enc.c0)] = through;
        m[(enc.c0, enc.c1)] = cross;
        m[(enc.c1, enc.c0)] = shift * cross;
        m[(enc.c1, enc.c1)] = shift * through;
        WalkUnitary::from_matrix(m).expect("coupler stage is unitary")
    }
}

/// Walk `exp(-i h)` preceded by the control-qubit preparation stage.
pub fn prepare_control_superposition(
    h: &Hamiltonian,
    enc: &LogicalEncoding,
    prep: &QubitStatePrep,
) -> Result<WalkUnitary> {
    let walk = unitary(h, 1.0)?;
    check_gate_unitary(&walk)?;
    walk.after(&prep.stage_unitary(enc))
}

/// Computational-basis output of the entangling experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellOutcome {
    /// Probabilities over `00, 01, 10, 11` within the logical subspace.
    pub probs: [f64; 4],
    /// Post-selected probabilities before normalization.
    pub raw: [f64; 4],
    /// Probability of leaving the logical subspace.
    pub leakage: f64,
}

/// Output of the CNOT with the control prepared by `prep` and photons of
/// mutual overlap `x`.
///
/// The result mixes the fully coherent (`x = 1`) and fully incoherent
/// (`x = 0`) branches with weights `x` and `1 - x`, each branch normalized
/// within the logical subspace first.
pub fn entangled_output(
    h: &Hamiltonian,
    enc: &LogicalEncoding,
    prep: &QubitStatePrep,
    x: f64,
) -> Result<BellOutcome> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("overlap must lie in [0, 1], got {x}")));
    }
    let total = prepare_control_superposition(h, enc, prep)?;
    let target = if prep.target_state == 0 { enc.t0 } else { enc.t1 };
    let branch = |overlap: f64| -> Result<[f64; 4]> {
        let input = TwoPhotonInput::new(enc.c0, target, overlap)?;
        let mut raw = [0.0; 4];
        for (s, p) in raw.iter_mut().enumerate() {
            let (k, l) = enc.pair(s);
            *p = coincidence_prob(&total, &input, k, l)?;
        }
        Ok(raw)
    };
    let coherent = branch(1.0)?;
    let incoherent = branch(0.0)?;
    let normalize = |raw: [f64; 4]| -> Result<[f64; 4]> {
        let s: f64 = raw.iter().sum();
        if s <= 0.0 {
            return Err(Error::Degenerate("no logical output".into()));
        }
        Ok(raw.map(|p| p / s))
    };
    let (coh_n, inc_n) = (normalize(coherent)?, normalize(incoherent)?);
    let probs = std::array::from_fn(|s| x * coh_n[s] + (1.0 - x) * inc_n[s]);
    let raw: [f64; 4] = std::array::from_fn(|s| x * coherent[s] + (1.0 - x) * incoherent[s]);
    Ok(BellOutcome {
        probs,
        raw,
        leakage: 1.0 - raw.iter().sum::<f64>(),
    })
}

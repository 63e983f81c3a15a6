//! Simulator for a continuous-time quantum-walk CNOT gate in a six-waveguide
//! array.
//!
//! * [`walk`]: tight-binding Hamiltonians and exact evolution
//! * [`interference`]: two-photon statistics with partial distinguishability
//! * [`gate`]: post-selected logical gate, fidelity and entangled-state output
//! * [`design`]: waveguide widths and gaps from dispersion tables
//!
//! Modes are indexed from 0 throughout the library.

pub mod design;
pub mod error;
pub mod gate;
pub mod interference;
pub mod walk;

pub use error::{Error, Result};
pub use gate::{LogicalEncoding, LogicalTransferMatrix, QubitStatePrep};
pub use interference::{OutcomeDistribution, SourceModel, TwoPhotonInput};
pub use walk::{Hamiltonian, Trajectory, WalkUnitary};

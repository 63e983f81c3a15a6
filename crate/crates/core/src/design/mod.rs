//! Waveguide geometry to Hamiltonian and back.
//!
//! Widths set the on-site terms through a beta(width) table and
//! edge-to-edge gaps set the couplings through a kappa(gap) table. Lengths
//! are in micrometres, beta in rad/mm and kappa in 1/mm; Hamiltonians
//! produced here are the dimensionless product `h·L`.
//!
//! Physical couplings are positive while the CNOT Hamiltonian is written
//! with negative ones. The two are related by the diagonal gauge
//! `a_i -> (-1)^i a_i`, which leaves every output probability unchanged,
//! so couplings are synthesized by magnitude and the forward model
//! reports them negative.

mod geometry;
mod sweep;
mod table;

pub use geometry::{
    default_beta_table, default_kappa_table, hamiltonian_from_geometry, synthesize_geometry,
    GeometrySpec, ReferenceWaveguide, DEFAULT_DECOUPLE_GAP_UM, DEFAULT_LENGTH_UM,
    DEFAULT_REFERENCE_WIDTH_UM,
};
pub use sweep::{perturbation_sweep, Jitter, SweepStats};
pub use table::{
    beta_from_width, gap_from_kappa, kappa_from_gap, load_table, width_from_beta,
    DispersionTable, TableKind, INVERSE_TOL, MIN_SAMPLES,
};

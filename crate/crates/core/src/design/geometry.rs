use serde::Serialize;

use super::table::{beta_from_width, gap_from_kappa, kappa_from_gap, width_from_beta, DispersionTable, TableKind};
use crate::error::{Error, Result};
use crate::walk::Hamiltonian;

/// Gap at and beyond which neighbouring waveguides count as uncoupled.
pub const DEFAULT_DECOUPLE_GAP_UM: f64 = 20.0;
pub const DEFAULT_LENGTH_UM: f64 = 700.0;
pub const DEFAULT_REFERENCE_WIDTH_UM: f64 = 1.5;

/// Waveguide whose width anchors the on-site terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceWaveguide {
    pub mode: usize,
    pub width_um: f64,
}

impl Default for ReferenceWaveguide {
    fn default() -> Self {
        Self {
            mode: 0,
            width_um: DEFAULT_REFERENCE_WIDTH_UM,
        }
    }
}

/// Physical layout of a coupled-waveguide array.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometrySpec {
    pub widths_um: Vec<f64>,
    /// Edge-to-edge gaps between neighbours.
    pub gaps_um: Vec<f64>,
    pub length_um: f64,
    pub reference_mode: usize,
    pub decouple_gap_um: f64,
}

impl GeometrySpec {
    pub fn validate(&self) -> Result<()> {
        if self.widths_um.len() < 2 || self.gaps_um.len() + 1 != self.widths_um.len() {
            return Err(Error::Size(format!(
                "{} widths need {} gaps, got {}",
                self.widths_um.len(),
                self.widths_um.len().saturating_sub(1),
                self.gaps_um.len()
            )));
        }
        if self.reference_mode >= self.widths_um.len() {
            return Err(Error::Index {
                index: self.reference_mode,
                len: self.widths_um.len(),
            });
        }
        let positive = |v: &f64| v.is_finite() && *v > 0.0;
        if !self.widths_um.iter().all(positive) || !self.gaps_um.iter().all(positive) {
            return Err(Error::Domain("widths and gaps must be positive".into()));
        }
        if !positive(&self.length_um) || !positive(&self.decouple_gap_um) {
            return Err(Error::Domain("length and decouple gap must be positive".into()));
        }
        Ok(())
    }

    /// Neighbour pairs that are treated as uncoupled.
    pub fn is_decoupled(&self, pair: usize) -> bool {
        self.gaps_um[pair] >= self.decouple_gap_um
    }
}

fn check_tables(beta: &DispersionTable, kappa: &DispersionTable) -> Result<()> {
    if beta.kind() != TableKind::BetaVsWidth || kappa.kind() != TableKind::KappaVsGap {
        return Err(Error::InvalidArgument(format!(
            "expected beta_vs_width and kappa_vs_gap tables, got {} and {}",
            beta.kind(),
            kappa.kind()
        )));
    }
    Ok(())
}

/// Widths and gaps whose Hamiltonian-length product matches `target`.
///
/// On-site terms are taken relative to the reference waveguide: a constant
/// on-site offset only adds a global phase, so `target` is shifted to make
/// the reference mode's term zero. Couplings are realized by magnitude.
pub fn synthesize_geometry(
    target: &Hamiltonian,
    length_um: f64,
    beta_table: &DispersionTable,
    kappa_table: &DispersionTable,
    reference: ReferenceWaveguide,
    decouple_gap_um: f64,
) -> Result<GeometrySpec> {
    check_tables(beta_table, kappa_table)?;
    if !(length_um.is_finite() && length_um > 0.0) {
        return Err(Error::Domain(format!("length must be positive, got {length_um}")));
    }
    if reference.mode >= target.n_modes() {
        return Err(Error::Index {
            index: reference.mode,
            len: target.n_modes(),
        });
    }
    let length_mm = length_um / 1000.0;
    let beta_ref = beta_from_width(beta_table, reference.width_um)?;
    let offset = target.beta()[reference.mode];

    let widths_um = target
        .beta()
        .iter()
        .enumerate()
        .map(|(i, b)| {
            if i == reference.mode {
                return Ok(reference.width_um);
            }
            let beta = beta_ref + (b - offset) / length_mm;
            width_from_beta(beta_table, beta).map_err(|e| name_element(e, format!("width {}", i + 1)))
        })
        .collect::<Result<Vec<f64>>>()?;

    let gaps_um = target
        .kappa()
        .iter()
        .enumerate()
        .map(|(i, k)| {
            if *k == 0.0 {
                return Ok(decouple_gap_um);
            }
            let gap = gap_from_kappa(kappa_table, k.abs() / length_mm)
                .map_err(|e| name_element(e, format!("gap {}-{}", i + 1, i + 2)))?;
            if gap >= decouple_gap_um {
                let (min, max) = kappa_table.range();
                return Err(Error::InfeasibleTarget {
                    element: format!("gap {}-{} (beyond decouple gap)", i + 1, i + 2),
                    target: k.abs() / length_mm,
                    min,
                    max,
                });
            }
            Ok(gap)
        })
        .collect::<Result<Vec<f64>>>()?;

    let spec = GeometrySpec {
        widths_um,
        gaps_um,
        length_um,
        reference_mode: reference.mode,
        decouple_gap_um,
    };
    spec.validate()?;
    Ok(spec)
}

fn name_element(err: Error, element: String) -> Error {
    match err {
        Error::InfeasibleTarget { target, min, max, .. } => Error::InfeasibleTarget {
            element,
            target,
            min,
            max,
        },
        other => other,
    }
}

/// Forward model: Hamiltonian-length product `h·L` of a geometry, with
/// on-site terms relative to the reference waveguide and negative couplings.
pub fn hamiltonian_from_geometry(
    geometry: &GeometrySpec,
    beta_table: &DispersionTable,
    kappa_table: &DispersionTable,
) -> Result<Hamiltonian> {
    check_tables(beta_table, kappa_table)?;
    geometry.validate()?;
    let length_mm = geometry.length_um / 1000.0;
    let beta_ref = beta_from_width(beta_table, geometry.widths_um[geometry.reference_mode])?;
    let beta = geometry
        .widths_um
        .iter()
        .map(|&w| Ok((beta_from_width(beta_table, w)? - beta_ref) * length_mm))
        .collect::<Result<Vec<f64>>>()?;
    let kappa = (0..geometry.gaps_um.len())
        .map(|i| {
            if geometry.is_decoupled(i) {
                Ok(0.0)
            } else {
                Ok(-kappa_from_gap(kappa_table, geometry.gaps_um[i])? * length_mm)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Hamiltonian::new(beta, kappa)
}

const DEFAULT_BETA_CSV: &str = include_str!("../../data/beta_vs_width.csv");
const DEFAULT_KAPPA_CSV: &str = include_str!("../../data/kappa_vs_gap.csv");

/// Shipped synthetic beta(width) table. Illustrative, not solver output.
pub fn default_beta_table() -> DispersionTable {
    DispersionTable::parse(DEFAULT_BETA_CSV).expect("bundled beta table is valid")
}

/// Shipped synthetic kappa(gap) table, `20/mm * exp(-s / 0.5 um)`.
pub fn default_kappa_table() -> DispersionTable {
    DispersionTable::parse(DEFAULT_KAPPA_CSV).expect("bundled kappa table is valid")
}

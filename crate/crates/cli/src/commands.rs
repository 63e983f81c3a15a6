use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use qwcnot::design::{
    default_beta_table, default_kappa_table, hamiltonian_from_geometry, load_table,
    perturbation_sweep, synthesize_geometry, DispersionTable, Jitter, ReferenceWaveguide,
};
use qwcnot::gate::{
    entangled_output, logical_phases, logical_transfer_matrix, sample_counts, LOGICAL_LABELS,
};
use qwcnot::interference::{hom_scan as scan, two_photon_distribution};
use qwcnot::walk::{trajectory, unitary, z_grid};
use qwcnot::{Hamiltonian, OutcomeDistribution, QubitStatePrep, SourceModel, TwoPhotonInput};
use serde::Serialize;

use crate::io::{
    check_overlap, load_hamiltonian, parse_list, read_matrix, resolve_encoding,
    to_json, to_mode, Csv, EncodingJson, Failure,
};
use crate::{BellArgs, DesignArgs, EvolveArgs, FidelityArgs, Format, HomScanArgs, SampleArgs, TruthTableArgs};

/// Environment variable naming a directory with `beta_vs_width.csv` and
/// `kappa_vs_gap.csv`, used when no table is given on the command line.
pub const TABLE_DIR_ENV: &str = "QWCNOT_TABLE_DIR";

fn pair_header(n: usize) -> Vec<String> {
    OutcomeDistribution::pairs(n)
        .map(|(k, l)| format!("P_{}_{}", k + 1, l + 1))
        .collect()
}

#[derive(Serialize)]
struct TruthTable<'a> {
    encoding: EncodingJson,
    x: f64,
    normalized: bool,
    labels: [&'a str; 4],
    matrix: [[f64; 4]; 4],
    argmax: Vec<&'a str>,
    success: [f64; 4],
    leakage: [f64; 4],
    phases: Option<[f64; 4]>,
}

pub fn truth_table(args: &TruthTableArgs) -> Result<String, Failure> {
    check_overlap(args.x)?;
    let h = load_hamiltonian(args.h.hamiltonian.as_deref())?;
    let u = unitary(&h, 1.0)?;
    let enc = resolve_encoding(&args.encoding, &u)?;
    let raw = logical_transfer_matrix(&u, &enc, args.x)?;
    let shown = if args.normalize { raw.row_normalized()? } else { raw };
    // Phases need three nonzero transitions; an unusual encoding may lack them.
    let phases = logical_phases(&u, &enc).ok();
    let table = TruthTable {
        encoding: EncodingJson::from(&enc),
        x: args.x,
        normalized: args.normalize,
        labels: LOGICAL_LABELS,
        matrix: shown.probs,
        argmax: (0..4).map(|r| LOGICAL_LABELS[shown.argmax_row(r)]).collect(),
        success: raw.row_sums(),
        leakage: raw.leakage(),
        phases,
    };
    match args.format {
        Format::Json => to_json(&table),
        Format::Csv => {
            let mut header = vec!["input".to_string()];
            header.extend(LOGICAL_LABELS.iter().map(|l| format!("out_{l}")));
            header.extend(["success", "leakage", "phase"].map(String::from));
            let mut csv = Csv::new(&header);
            for r in 0..4 {
                let mut row = vec![LOGICAL_LABELS[r].to_string()];
                row.extend(table.matrix[r].iter().map(|p| p.to_string()));
                row.push(table.success[r].to_string());
                row.push(table.leakage[r].to_string());
                row.push(phases.map(|p| p[r].to_string()).unwrap_or_default());
                csv.row(row);
            }
            Ok(csv.finish())
        }
    }
}

pub fn evolve(args: &EvolveArgs) -> Result<String, Failure> {
    if args.steps < 2 {
        return Err(Failure::invalid(format!("--steps must be at least 2, got {}", args.steps)));
    }
    if !args.t.is_finite() {
        return Err(Failure::invalid(format!("--t must be finite, got {}", args.t)));
    }
    let h = load_hamiltonian(args.h.hamiltonian.as_deref())?;
    let n = h.n_modes();
    if let Some(pair) = args.pair {
        check_overlap(args.x)?;
        let (a, b) = pair.modes()?;
        let input = TwoPhotonInput::new(a, b, args.x)?;
        let spectrum = h.spectrum();
        let mut header = vec!["z".to_string()];
        header.extend(pair_header(n));
        let mut csv = Csv::new(&header);
        for z in z_grid(args.t, args.steps)? {
            let dist = two_photon_distribution(&spectrum.unitary(z)?, &input)?;
            csv.row(std::iter::once(z.to_string()).chain(dist.probs().iter().map(|p| p.to_string())));
        }
        return Ok(csv.finish());
    }
    let mode = to_mode(args.mode.expect("clap requires --mode or --pair"))?;
    if mode >= n {
        return Err(qwcnot::Error::Index { index: mode, len: n }.into());
    }
    let mut state = vec![num_complex::Complex64::new(0.0, 0.0); n];
    state[mode] = num_complex::Complex64::new(1.0, 0.0);
    let traj = trajectory(&h, args.t, &state, args.steps)?;
    let mut header = vec!["z".to_string()];
    header.extend((1..=n).map(|k| format!("I_{k}")));
    let mut csv = Csv::new(&header);
    for (z, row) in traj.z.iter().zip(&traj.intensities) {
        csv.row(std::iter::once(z.to_string()).chain(row.iter().map(|p| p.to_string())));
    }
    Ok(csv.finish())
}

pub fn hom_scan(args: &HomScanArgs) -> Result<String, Failure> {
    if !(args.tau_min.is_finite() && args.tau_max.is_finite() && args.tau_min < args.tau_max) {
        return Err(Failure::invalid(format!(
            "need --tau-min < --tau-max, got {} and {}",
            args.tau_min, args.tau_max
        )));
    }
    if args.tau_steps < 2 {
        return Err(Failure::invalid(format!("--tau-steps must be at least 2, got {}", args.tau_steps)));
    }
    if !(0.0..=1.0).contains(&args.visibility) {
        return Err(Failure::invalid(format!("--visibility must lie in [0, 1], got {}", args.visibility)));
    }
    for (name, v) in [("--bandwidth-nm", args.bandwidth_nm), ("--wavelength-nm", args.wavelength_nm)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let source = SourceModel::new(args.wavelength_nm, args.bandwidth_nm, args.visibility)?;
    let h = load_hamiltonian(args.h.hamiltonian.as_deref())?;
    let u = unitary(&h, 1.0)?;
    let (a, b) = args.pair.modes()?;
    let span = args.tau_max - args.tau_min;
    let last = (args.tau_steps - 1) as f64;
    let grid: Vec<f64> = (0..args.tau_steps)
        .map(|k| args.tau_min + span * k as f64 / last)
        .collect();
    let points = scan(&u, a, b, &grid, &source)?;
    let mut header = vec!["tau_ps".to_string(), "x".to_string()];
    header.extend(pair_header(u.n_modes()));
    let mut csv = Csv::new(&header);
    for p in &points {
        csv.row(
            [p.tau_ps.to_string(), p.overlap.to_string()]
                .into_iter()
                .chain(p.distribution.probs().iter().map(|v| v.to_string())),
        );
    }
    Ok(csv.finish())
}

#[derive(Serialize)]
struct Bell<'a> {
    encoding: EncodingJson,
    x: f64,
    eta: f64,
    phi: f64,
    target: u8,
    labels: [&'a str; 4],
    probs: [f64; 4],
    raw: [f64; 4],
    leakage: f64,
    total: u64,
    seed: u64,
    counts: Vec<u64>,
    errors: Vec<f64>,
}

pub fn bell(args: &BellArgs) -> Result<String, Failure> {
    check_overlap(args.x)?;
    if !(0.0..=1.0).contains(&args.eta) {
        return Err(Failure::invalid(format!("--eta must lie in [0, 1], got {}", args.eta)));
    }
    if args.target > 1 {
        return Err(Failure::invalid(format!("--target must be 0 or 1, got {}", args.target)));
    }
    if !args.phi.is_finite() {
        return Err(Failure::invalid("--phi must be finite"));
    }
    if args.total == 0 {
        return Err(Failure::invalid("--total must be positive"));
    }
    let h = load_hamiltonian(args.h.hamiltonian.as_deref())?;
    let enc = resolve_encoding(&args.encoding, &unitary(&h, 1.0)?)?;
    let prep = QubitStatePrep::new(args.eta, args.phi, args.target as usize)?;
    let out = entangled_output(&h, &enc, &prep, args.x)?;
    let sampled = sample_counts(&out.probs, args.total, args.seed)?;
    match args.format {
        Format::Json => to_json(&Bell {
            encoding: EncodingJson::from(&enc),
            x: args.x,
            eta: args.eta,
            phi: args.phi,
            target: args.target,
            labels: LOGICAL_LABELS,
            probs: out.probs,
            raw: out.raw,
            leakage: out.leakage,
            total: args.total,
            seed: args.seed,
            counts: sampled.counts,
            errors: sampled.errors,
        }),
        Format::Csv => {
            let mut csv = Csv::new(&["state", "prob", "raw", "count", "error"]);
            for (s, label) in LOGICAL_LABELS.iter().enumerate() {
                csv.row([
                    label.to_string(),
                    out.probs[s].to_string(),
                    out.raw[s].to_string(),
                    sampled.counts[s].to_string(),
                    sampled.errors[s].to_string(),
                ]);
            }
            Ok(csv.finish())
        }
    }
}

fn table(
    explicit: Option<&Path>,
    file_name: &str,
    builtin: fn() -> DispersionTable,
) -> Result<(DispersionTable, String), Failure> {
    let path: Option<PathBuf> = explicit
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(TABLE_DIR_ENV).map(|d| PathBuf::from(d).join(file_name)));
    match path {
        Some(p) => Ok((load_table(&p)?, p.display().to_string())),
        None => Ok((builtin(), format!("builtin:{file_name}"))),
    }
}

#[derive(Serialize)]
struct HamiltonianJson {
    beta: Vec<f64>,
    kappa: Vec<f64>,
}

#[derive(Serialize)]
struct TablesJson {
    beta: String,
    kappa: String,
}

#[derive(Serialize)]
struct SweepJson {
    encoding: EncodingJson,
    sigma_width_um: f64,
    sigma_gap_um: f64,
    trials: usize,
    seed: u64,
    mean: f64,
    std: f64,
    min: f64,
    completed: usize,
    skipped: usize,
}

#[derive(Serialize)]
struct Design {
    length_um: f64,
    reference_mode: usize,
    reference_width_um: f64,
    decouple_gap_um: f64,
    widths_um: Vec<f64>,
    gaps_um: Vec<f64>,
    realized: HamiltonianJson,
    tables: TablesJson,
    sweep: Option<SweepJson>,
}

pub fn design(args: &DesignArgs) -> Result<String, Failure> {
    let target = match &args.target {
        Some(path) => load_hamiltonian(Some(path))?,
        None => Hamiltonian::cnot(),
    };
    for (name, v) in [("--L", args.length_um), ("--ref-width", args.ref_width), ("--decouple-gap", args.decouple_gap)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Failure::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let (beta, beta_src) = table(args.beta_table.as_deref(), "beta_vs_width.csv", default_beta_table)?;
    let (kappa, kappa_src) = table(args.kappa_table.as_deref(), "kappa_vs_gap.csv", default_kappa_table)?;
    let reference = ReferenceWaveguide {
        mode: to_mode(args.ref_mode)?,
        width_um: args.ref_width,
    };
    let g = synthesize_geometry(&target, args.length_um, &beta, &kappa, reference, args.decouple_gap)?;
    let realized = hamiltonian_from_geometry(&g, &beta, &kappa)?;

    let sweep = if args.sigma_width.is_some() || args.sigma_gap.is_some() {
        let jitter = Jitter {
            sigma_width_um: args.sigma_width.unwrap_or(0.0),
            sigma_gap_um: args.sigma_gap.unwrap_or(0.0),
        };
        if args.trials == 0 {
            return Err(Failure::invalid("--trials must be positive"));
        }
        let enc = resolve_encoding(&args.encoding, &unitary(&realized, 1.0)?)?;
        let stats = perturbation_sweep(&g, &beta, &kappa, &enc, jitter, args.trials, args.seed)?;
        Some(SweepJson {
            encoding: EncodingJson::from(&enc),
            sigma_width_um: jitter.sigma_width_um,
            sigma_gap_um: jitter.sigma_gap_um,
            trials: args.trials,
            seed: args.seed,
            mean: stats.mean,
            std: stats.std,
            min: stats.min,
            completed: stats.completed,
            skipped: stats.skipped,
        })
    } else {
        None
    };

    to_json(&Design {
        length_um: g.length_um,
        reference_mode: g.reference_mode + 1,
        reference_width_um: args.ref_width,
        decouple_gap_um: g.decouple_gap_um,
        widths_um: g.widths_um.clone(),
        gaps_um: g.gaps_um.clone(),
        realized: HamiltonianJson {
            beta: realized.beta().to_vec(),
            kappa: realized.kappa().to_vec(),
        },
        tables: TablesJson {
            beta: beta_src,
            kappa: kappa_src,
        },
        sweep,
    })
}

fn matrix(path: &Path) -> Result<DMatrix<f64>, Failure> {
    let rows = read_matrix(path)?;
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Failure::invalid(format!("{}: rows have different lengths", path.display())));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]))
}

#[derive(Serialize)]
struct FidelityJson {
    fidelity: f64,
}

pub fn fidelity(args: &FidelityArgs) -> Result<String, Failure> {
    let (a, b) = (matrix(&args.a)?, matrix(&args.b)?);
    if a.shape() != b.shape() {
        return Err(Failure::invalid(format!(
            "shapes differ: {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    to_json(&FidelityJson {
        fidelity: qwcnot::gate::fidelity(&a, &b)?,
    })
}

pub fn sample(args: &SampleArgs) -> Result<String, Failure> {
    let probs: Vec<f64> = parse_list(&args.probs)?;
    if args.total == 0 {
        return Err(Failure::invalid("--total must be positive"));
    }
    let sampled = sample_counts(&probs, args.total, args.seed)?;
    let mut csv = Csv::new(&["outcome", "prob", "count", "error"]);
    for (i, p) in probs.iter().enumerate() {
        csv.row([
            (i + 1).to_string(),
            p.to_string(),
            sampled.counts[i].to_string(),
            sampled.errors[i].to_string(),
        ]);
    }
    Ok(csv.finish())
}

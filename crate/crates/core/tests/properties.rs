mod common;

use common::*;
use proptest::prelude::*;
use qwcnot::design::{
    default_beta_table, default_kappa_table, perturbation_sweep, synthesize_geometry, Jitter,
    ReferenceWaveguide,
};
use qwcnot::gate::{entangled_output, find_encoding, logical_transfer_matrix};
use qwcnot::interference::two_photon_distribution;
use qwcnot::walk::unitary;
use qwcnot::{Hamiltonian, LogicalEncoding, QubitStatePrep, TwoPhotonInput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tridiagonal(n: usize) -> impl Strategy<Value = Hamiltonian> {
    (
        prop::collection::vec(-3.0f64..3.0, n),
        prop::collection::vec(-3.0f64..3.0, n - 1),
    )
        .prop_map(|(b, k)| Hamiltonian::new(b, k).unwrap())
}

fn device_encoding() -> LogicalEncoding {
    LogicalEncoding::from_waveguides(2, 3, 4, 5).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_is_unitary(h in tridiagonal(6), t in 0.0f64..3.0) {
        prop_assert!(unitary(&h, t).unwrap().unitarity_defect() < 1e-10);
    }

    #[test]
    fn evolution_composes(h in tridiagonal(5), t1 in 0.0f64..2.0, t2 in 0.0f64..2.0) {
        let whole = unitary(&h, t1 + t2).unwrap();
        let split = unitary(&h, t2).unwrap().after(&unitary(&h, t1).unwrap()).unwrap();
        prop_assert!(max_abs_diff(whole.matrix(), split.matrix()) < 1e-10);
    }

    #[test]
    fn zero_coupling_splits_blocks(mut h_parts in (prop::collection::vec(-3.0f64..3.0, 6), prop::collection::vec(-3.0f64..3.0, 5)), cut in 0usize..5, t in 0.1f64..3.0) {
        h_parts.1[cut] = 0.0;
        let h = Hamiltonian::new(h_parts.0, h_parts.1).unwrap();
        let u = unitary(&h, t).unwrap();
        for r in 0..6 {
            for c in 0..6 {
                if (r <= cut) != (c <= cut) {
                    prop_assert_eq!(u.amplitude(r, c).norm(), 0.0);
                }
            }
        }
    }

    #[test]
    fn sign_gauge_preserves_magnitudes(kappa in prop::collection::vec(-3.0f64..3.0, 5), t in 0.0f64..3.0) {
        let plus = unitary(&Hamiltonian::new(vec![0.0; 6], kappa.clone()).unwrap(), t).unwrap();
        let flipped: Vec<f64> = kappa.iter().map(|k| -k).collect();
        let minus = unitary(&Hamiltonian::new(vec![0.0; 6], flipped).unwrap(), t).unwrap();
        for (a, b) in plus.matrix().iter().zip(minus.matrix().iter()) {
            prop_assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn two_photon_output_is_normalized_and_affine(seed in any::<u64>(), x in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, 6);
        let dist = |x: f64| two_photon_distribution(&u, &TwoPhotonInput::new(1, 4, x).unwrap()).unwrap();
        let (d0, d1, dx) = (dist(0.0), dist(1.0), dist(x));
        prop_assert!((dx.total() - 1.0).abs() < 1e-12);
        for ((p0, p1), px) in d0.probs().iter().zip(d1.probs()).zip(dx.probs()) {
            prop_assert!((px - ((1.0 - x) * p0 + x * p1)).abs() < 1e-12);
        }
    }

    #[test]
    fn relabeling_modes_relabels_outcomes(seed in any::<u64>(), perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(), x in 0.0f64..=1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(&mut rng, 6);
        let v = u.permuted(&perm).unwrap();
        let before = two_photon_distribution(&u, &TwoPhotonInput::new(0, 3, x).unwrap()).unwrap();
        let after = two_photon_distribution(&v, &TwoPhotonInput::new(perm[0], perm[3], x).unwrap()).unwrap();
        for ((k, l), p) in before.iter() {
            prop_assert!((after.get(perm[k], perm[l]) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn bell_output_is_affine(x in 0.0f64..=1.0) {
        let h = Hamiltonian::cnot();
        let prep = QubitStatePrep::hadamard_like();
        let enc = device_encoding();
        let at = |x| entangled_output(&h, &enc, &prep, x).unwrap().probs;
        let (a, b, c) = (at(0.0), at(1.0), at(x));
        for s in 0..4 {
            prop_assert!((c[s] - ((1.0 - x) * a[s] + x * b[s])).abs() < 1e-12);
        }
    }
}

#[test]
fn encoding_search_follows_relabeling() {
    let u = unitary(&Hamiltonian::cnot(), 1.0).unwrap();
    let base = find_encoding(&u).unwrap();
    for perm in [[5, 4, 3, 2, 1, 0], [1, 0, 3, 2, 5, 4], [2, 5, 0, 4, 1, 3]] {
        let found = find_encoding(&u.permuted(&perm).unwrap()).unwrap();
        assert_eq!(found, base.relabeled(&perm).unwrap(), "perm {perm:?}");
    }
}

#[test]
fn control_zero_rows_do_not_interfere() {
    // The control-|0> rail sits in the block decoupled from the target rails.
    let u = unitary(&Hamiltonian::cnot(), 1.0).unwrap();
    for enc in [device_encoding(), find_encoding(&u).unwrap()] {
        let coherent = logical_transfer_matrix(&u, &enc, 1.0).unwrap();
        let incoherent = logical_transfer_matrix(&u, &enc, 0.0).unwrap();
        for r in 0..2 {
            for c in 0..4 {
                assert!((coherent.probs[r][c] - incoherent.probs[r][c]).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn jitter_doubling_does_not_help() {
    let beta = default_beta_table();
    let kappa = default_kappa_table();
    let g = synthesize_geometry(&Hamiltonian::cnot(), 700.0, &beta, &kappa, ReferenceWaveguide::default(), 20.0).unwrap();
    let enc = device_encoding();
    let run = |s: f64, seed| {
        let jitter = Jitter { sigma_width_um: s, sigma_gap_um: 0.0 };
        perturbation_sweep(&g, &beta, &kappa, &enc, jitter, 1000, seed).unwrap()
    };
    let (narrow, wide) = (run(0.002, 1), run(0.004, 2));
    assert!(narrow.completed >= 1000 && wide.completed >= 1000);
    let se = (narrow.std.powi(2) / narrow.completed as f64 + wide.std.powi(2) / wide.completed as f64).sqrt();
    assert!(narrow.mean >= wide.mean - 5.0 * se, "{} vs {} (se {se})", narrow.mean, wide.mean);
    assert!(narrow.mean > wide.mean);
}

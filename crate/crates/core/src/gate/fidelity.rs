use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Classical fidelity (Bhattacharyya overlap) of two nonnegative matrices,
/// each normalized by its total sum.
pub fn fidelity(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::Size(format!(
            "fidelity of {:?} and {:?} matrices",
            a.shape(),
            b.shape()
        )));
    }
    let total_a = checked_total(a, "first")?;
    let total_b = checked_total(b, "second")?;
    // Same summation order as the totals, so F(A, A) is exactly 1.
    let overlap: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x * y).sqrt()).sum();
    Ok(overlap / (total_a * total_b).sqrt())
}

fn checked_total(m: &DMatrix<f64>, which: &str) -> Result<f64> {
    if let Some(v) = m.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::Domain(format!("{which} matrix has entry {v}")));
    }
    let total: f64 = m.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate(format!("{which} matrix is all zero")));
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn disjoint_support_is_zero() {
        let diag = DMatrix::<f64>::identity(4, 4);
        let mut anti = DMatrix::zeros(4, 4);
        for i in 0..4 {
            anti[(i, 3 - i)] = 1.0;
        }
        assert_eq!(fidelity(&diag, &anti).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        let a = DMatrix::<f64>::identity(4, 4);
        let b = DMatrix::<f64>::identity(3, 3);
        assert!(matches!(fidelity(&a, &b), Err(Error::Size(_))));
        let mut neg = a.clone();
        neg[(0, 1)] = -1e-3;
        assert!(matches!(fidelity(&a, &neg), Err(Error::Domain(_))));
        let zero = DMatrix::zeros(4, 4);
        assert!(matches!(fidelity(&zero, &a), Err(Error::Degenerate(_))));
    }

    fn matrix() -> impl Strategy<Value = DMatrix<f64>> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            prop::collection::vec(0.0f64..10.0, r * c)
                .prop_filter("nonzero", |v| v.iter().any(|x| *x > 0.0))
                .prop_map(move |v| DMatrix::from_vec(r, c, v))
        })
    }

    proptest! {
        #[test]
        fn self_overlap_and_scaling(m in matrix(), c in 1e-3f64..1e3) {
            prop_assert_eq!(fidelity(&m, &m).unwrap(), 1.0);
            let scaled = &m * c;
            prop_assert!((fidelity(&m, &scaled).unwrap() - 1.0).abs() < 1e-12);
        }
    }
}

//! Sampled dispersion curves with monotone cubic interpolation.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

pub const MIN_SAMPLES: usize = 4;

/// Residual target for inverse lookups, in ordinate units.
pub const INVERSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Propagation coefficient (rad/mm) against waveguide width (um).
    BetaVsWidth,
    /// Coupling coefficient (1/mm) against edge-to-edge gap (um).
    KappaVsGap,
}

impl fmt::Display for TableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TableKind::BetaVsWidth => "beta_vs_width",
            TableKind::KappaVsGap => "kappa_vs_gap",
        })
    }
}

impl FromStr for TableKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "beta_vs_width" => Ok(TableKind::BetaVsWidth),
            "kappa_vs_gap" => Ok(TableKind::KappaVsGap),
            other => Err(Error::Parse(format!("unknown table kind {other:?}"))),
        }
    }
}

/// A validated dispersion table and its PCHIP interpolant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersionTable {
    kind: TableKind,
    wavelength_um: f64,
    abscissa: Vec<f64>,
    ordinate: Vec<f64>,
    #[serde(skip)]
    slopes: Vec<f64>,
}

impl DispersionTable {
    pub fn new(kind: TableKind, wavelength_um: f64, samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < MIN_SAMPLES {
            return Err(Error::TooFewSamples {
                min: MIN_SAMPLES,
                got: samples.len(),
            });
        }
        if let Some((x, y)) = samples.iter().find(|(x, y)| !(x.is_finite() && y.is_finite())) {
            return Err(Error::Numeric(format!("sample ({x}, {y})")));
        }
        let abscissa: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let ordinate: Vec<f64> = samples.iter().map(|s| s.1).collect();
        for i in 1..abscissa.len() {
            if abscissa[i] <= abscissa[i - 1] {
                return Err(Error::Ordering { row: i });
            }
        }
        let rising = ordinate[1] > ordinate[0];
        for i in 1..ordinate.len() {
            let step = ordinate[i] - ordinate[i - 1];
            if step == 0.0 || (step > 0.0) != rising {
                return Err(Error::NonMonotone { row: i });
            }
        }
        let slopes = pchip_slopes(&abscissa, &ordinate);
        Ok(Self {
            kind,
            wavelength_um,
            abscissa,
            ordinate,
            slopes,
        })
    }

    /// Parse the CSV format: `#` comment lines carrying `kind=` and
    /// `wavelength_um=`, an `abscissa_um,ordinate` header, then data rows.
    pub fn parse(text: &str) -> Result<Self> {
        let mut kind = None;
        let mut wavelength = None;
        let mut header_seen = false;
        let mut samples = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((key, value)) = comment.split_once('=') {
                    match key.trim() {
                        "kind" => kind = Some(value.parse::<TableKind>()?),
                        "wavelength_um" => {
                            wavelength = Some(value.trim().parse::<f64>().map_err(|e| {
                                Error::Parse(format!("line {}: wavelength: {e}", lineno + 1))
                            })?)
                        }
                        _ => {}
                    }
                }
                continue;
            }
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["abscissa_um", "ordinate"] {
                    return Err(Error::Parse(format!(
                        "line {}: expected header `abscissa_um,ordinate`, got {line:?}",
                        lineno + 1
                    )));
                }
                header_seen = true;
                continue;
            }
            let mut cols = line.split(',');
            let (Some(x), Some(y), None) = (cols.next(), cols.next(), cols.next()) else {
                return Err(Error::Parse(format!(
                    "line {}: expected two columns, got {line:?}",
                    lineno + 1
                )));
            };
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("line {}: {s:?}: {e}", lineno + 1)))
            };
            samples.push((parse(x)?, parse(y)?));
        }
        let kind = kind.ok_or_else(|| Error::Parse("missing `# kind=` line".into()))?;
        let wavelength =
            wavelength.ok_or_else(|| Error::Parse("missing `# wavelength_um=` line".into()))?;
        if !header_seen {
            return Err(Error::Parse("missing header row".into()));
        }
        Self::new(kind, wavelength, &samples)
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# kind={}\n# wavelength_um={}\nabscissa_um,ordinate\n",
            self.kind, self.wavelength_um
        );
        for (x, y) in self.abscissa.iter().zip(&self.ordinate) {
            out.push_str(&format!("{x},{y}\n"));
        }
        out
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn wavelength_um(&self) -> f64 {
        self.wavelength_um
    }

    pub fn len(&self) -> usize {
        self.abscissa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissa.is_empty()
    }

    pub fn abscissa(&self) -> &[f64] {
        &self.abscissa
    }

    pub fn ordinate(&self) -> &[f64] {
        &self.ordinate
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.abscissa[0], *self.abscissa.last().unwrap())
    }

    /// `(min, max)` of the ordinates.
    pub fn range(&self) -> (f64, f64) {
        let (a, b) = (self.ordinate[0], *self.ordinate.last().unwrap());
        (a.min(b), a.max(b))
    }

    pub fn is_increasing(&self) -> bool {
        self.ordinate[1] > self.ordinate[0]
    }

    /// Interpolated ordinate. Queries outside the sampled range are errors.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::Extrapolation {
                value: x,
                min: lo,
                max: hi,
            });
        }
        // Last knot with abscissa <= x, capped so x == hi uses the final cell.
        let i = self.abscissa.partition_point(|&a| a <= x).saturating_sub(1).min(self.len() - 2);
        Ok(self.hermite(i, x))
    }

    fn hermite(&self, i: usize, x: f64) -> f64 {
        let (x0, x1) = (self.abscissa[i], self.abscissa[i + 1]);
        if x == x0 {
            return self.ordinate[i];
        }
        if x == x1 {
            return self.ordinate[i + 1];
        }
        let h = x1 - x0;
        let s = (x - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ordinate[i]
            + h10 * h * self.slopes[i]
            + h01 * self.ordinate[i + 1]
            + h11 * h * self.slopes[i + 1]
    }

    /// Abscissa at which the interpolant equals `target`, by bisection.
    pub fn invert(&self, target: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(target >= lo && target <= hi) {
            return Err(Error::InfeasibleTarget {
                element: self.kind.to_string(),
                target,
                min: lo,
                max: hi,
            });
        }
        let sign = if self.is_increasing() { 1.0 } else { -1.0 };
        // Exact knot hits return the knot.
        if let Some(i) = self.ordinate.iter().position(|&y| y == target) {
            return Ok(self.abscissa[i]);
        }
        // First knot past the target along the direction of increase.
        let j = self.ordinate.partition_point(|&y| sign * y < sign * target);
        let i = j - 1;
        let (mut a, mut b) = (self.abscissa[i], self.abscissa[j]);
        let mut best = (f64::INFINITY, a);
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            let residual = self.hermite(i, mid) - target;
            if residual.abs() < best.0 {
                best = (residual.abs(), mid);
            }
            if residual == 0.0 || mid <= a || mid >= b {
                break;
            }
            if sign * residual < 0.0 {
                a = mid;
            } else {
                b = mid;
            }
        }
        if best.0 >= INVERSE_TOL {
            return Err(Error::Numeric(format!(
                "bisection for {target} stalled with residual {:.3e}",
                best.0
            )));
        }
        Ok(best.1)
    }
}

/// Fritsch-Carlson slopes: weighted harmonic mean of neighbouring secants in
/// the interior, one-sided three-point estimates at the ends, zero at local
/// extrema.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] > 0.0 {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d.signum() != del0.signum() {
        0.0
    } else if del0.signum() != del1.signum() && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

pub fn load_table(path: impl AsRef<Path>) -> Result<DispersionTable> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    DispersionTable::parse(&text)
}

fn expect_kind(table: &DispersionTable, kind: TableKind) -> Result<()> {
    if table.kind != kind {
        return Err(Error::InvalidArgument(format!(
            "expected a {kind} table, got {}",
            table.kind
        )));
    }
    Ok(())
}

/// Propagation coefficient (rad/mm) of a waveguide of width `width_um`.
pub fn beta_from_width(table: &DispersionTable, width_um: f64) -> Result<f64> {
    expect_kind(table, TableKind::BetaVsWidth)?;
    table.eval(width_um)
}

/// Coupling coefficient (1/mm) across an edge-to-edge gap `gap_um`.
pub fn kappa_from_gap(table: &DispersionTable, gap_um: f64) -> Result<f64> {
    expect_kind(table, TableKind::KappaVsGap)?;
    table.eval(gap_um)
}

pub fn width_from_beta(table: &DispersionTable, beta: f64) -> Result<f64> {
    expect_kind(table, TableKind::BetaVsWidth)?;
    table.invert(beta)
}

pub fn gap_from_kappa(table: &DispersionTable, kappa: f64) -> Result<f64> {
    expect_kind(table, TableKind::KappaVsGap)?;
    table.invert(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn exp_table(spacing: f64, n: usize) -> DispersionTable {
        let samples: Vec<(f64, f64)> = (0..n)
            .map(|i| {
                let s = 0.2 + spacing * i as f64;
                (s, 20.0 * (-s / 0.5).exp())
            })
            .collect();
        DispersionTable::new(TableKind::KappaVsGap, 1.55, &samples).unwrap()
    }

    #[test]
    fn knots_are_exact() {
        let t = exp_table(0.25, 12);
        for (x, y) in t.abscissa().iter().zip(t.ordinate()) {
            assert_eq!(kappa_from_gap(&t, *x).unwrap(), *y);
            assert_eq!(gap_from_kappa(&t, *y).unwrap(), *x);
        }
    }

    #[test]
    fn out_of_range_queries() {
        let t = exp_table(0.25, 12);
        assert!(matches!(t.eval(0.1), Err(Error::Extrapolation { .. })));
        assert!(matches!(t.eval(50.0), Err(Error::Extrapolation { .. })));
        assert!(matches!(t.eval(f64::NAN), Err(Error::Extrapolation { .. })));
        assert!(matches!(
            gap_from_kappa(&t, 100.0),
            Err(Error::InfeasibleTarget { .. })
        ));
        assert!(matches!(beta_from_width(&t, 1.0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn validation() {
        let kind = TableKind::BetaVsWidth;
        assert!(matches!(
            DispersionTable::new(kind, 1.55, &[(1.0, 1.0), (2.0, 2.0), (3.0, 3.0)]),
            Err(Error::TooFewSamples { min: 4, got: 3 })
        ));
        assert!(matches!(
            DispersionTable::new(kind, 1.55, &[(1.0, 1.0), (3.0, 2.0), (2.0, 3.0), (4.0, 4.0)]),
            Err(Error::Ordering { row: 2 })
        ));
        assert!(matches!(
            DispersionTable::new(kind, 1.55, &[(1.0, 1.0), (2.0, 2.0), (3.0, 1.5), (4.0, 4.0)]),
            Err(Error::NonMonotone { row: 2 })
        ));
        assert!(matches!(
            DispersionTable::new(kind, 1.55, &[(1.0, 1.0), (2.0, 2.0), (3.0, 2.0), (4.0, 4.0)]),
            Err(Error::NonMonotone { row: 2 })
        ));
    }

    #[test]
    fn parse_format() {
        let text = "# synthetic\n# kind=beta_vs_width\n# wavelength_um=1.55\nabscissa_um,ordinate\n\
                    1.0,10\n1.1,11\n1.2,12.5\n1.3,13\n";
        let t = DispersionTable::parse(text).unwrap();
        assert_eq!(t.kind(), TableKind::BetaVsWidth);
        assert_eq!(t.wavelength_um(), 1.55);
        assert_eq!(t.len(), 4);
        assert_eq!(DispersionTable::parse(&t.to_csv()).unwrap(), t);

        let missing_kind = "# wavelength_um=1.55\nabscissa_um,ordinate\n1,1\n2,2\n3,3\n4,4\n";
        assert!(matches!(DispersionTable::parse(missing_kind), Err(Error::Parse(_))));
        let bad_header = "# kind=kappa_vs_gap\n# wavelength_um=1.55\nx,y\n1,4\n2,3\n3,2\n4,1\n";
        assert!(matches!(DispersionTable::parse(bad_header), Err(Error::Parse(_))));
        let bad_number = "# kind=kappa_vs_gap\n# wavelength_um=1.55\nabscissa_um,ordinate\n1,4\n2,3,0\n";
        assert!(matches!(DispersionTable::parse(bad_number), Err(Error::Parse(_))));
        let separator = "# kind=kappa_vs_gap\n# wavelength_um=1.55\nabscissa_um,ordinate\n1,4\n2,3\n3,1,000\n";
        assert!(matches!(DispersionTable::parse(separator), Err(Error::Parse(_))));
    }

    #[test]
    fn analytic_exponential_oracle() {
        // 0.25 um spacing against kappa0*exp(-s/s0).
        let t = exp_table(0.25, 13);
        let (lo, hi) = t.domain();
        let n = 400;
        for k in 0..=n {
            let s = lo + (hi - lo) * k as f64 / n as f64;
            let exact = 20.0 * (-s / 0.5).exp();
            let got = t.eval(s).unwrap();
            assert!(((got - exact) / exact).abs() < 0.01, "s={s} got={got} exact={exact}");
        }
        // kappa0 e^-2 sits at s = 2 s0 = 1.0 um.
        let s = gap_from_kappa(&t, 20.0 * (-2.0f64).exp()).unwrap();
        assert!((s - 1.0).abs() < 0.01);
    }

    fn monotone_table() -> impl Strategy<Value = DispersionTable> {
        (
            prop::collection::vec((0.01f64..1.0, 0.01f64..5.0), 4..12),
            any::<bool>(),
        )
            .prop_map(|(steps, rising)| {
                let mut x = 0.0;
                let mut y = 0.0;
                let samples: Vec<(f64, f64)> = steps
                    .iter()
                    .map(|(dx, dy)| {
                        x += dx;
                        y += if rising { *dy } else { -dy };
                        (x, y)
                    })
                    .collect();
                DispersionTable::new(TableKind::KappaVsGap, 1.55, &samples).unwrap()
            })
    }

    proptest! {
        #[test]
        fn no_overshoot_and_round_trip(t in monotone_table(), u in 0.0f64..1.0) {
            let (lo, hi) = t.domain();
            let x = lo + u * (hi - lo);
            let y = t.eval(x).unwrap();
            let i = t.abscissa().partition_point(|&a| a <= x).saturating_sub(1).min(t.len() - 2);
            let (a, b) = (t.ordinate()[i], t.ordinate()[i + 1]);
            prop_assert!(y >= a.min(b) && y <= a.max(b));

            let back = t.invert(y).unwrap();
            prop_assert!((t.eval(back).unwrap() - y).abs() < INVERSE_TOL);
        }
    }
}

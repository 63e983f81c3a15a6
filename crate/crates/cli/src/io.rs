use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use qwcnot::gate::find_encoding;
use qwcnot::{Hamiltonian, LogicalEncoding, WalkUnitary};
use serde::{Deserialize, Serialize};

pub const VALIDATION: u8 = 2;
pub const NUMERIC: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: VALIDATION,
            message: message.into(),
        }
    }
}

impl From<qwcnot::Error> for Failure {
    fn from(err: qwcnot::Error) -> Self {
        Self {
            code: if err.is_validation() { VALIDATION } else { NUMERIC },
            message: err.to_string(),
        }
    }
}

/// Two 1-based waveguide numbers written `a,b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pair(pub usize, pub usize);

impl Pair {
    /// 0-based modes.
    pub fn modes(self) -> Result<(usize, usize), Failure> {
        if self.0 == self.1 {
            return Err(Failure::invalid(format!("pair needs two different waveguides, got {},{}", self.0, self.1)));
        }
        Ok((to_mode(self.0)?, to_mode(self.1)?))
    }
}

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts = parse_list::<usize>(s).map_err(|e| e.message)?;
        match parts[..] {
            [a, b] => Ok(Pair(a, b)),
            _ => Err(format!("expected two waveguides `a,b`, got `{s}`")),
        }
    }
}

pub fn to_mode(waveguide: usize) -> Result<usize, Failure> {
    waveguide
        .checked_sub(1)
        .ok_or_else(|| Failure::invalid("waveguides are numbered from 1"))
}

pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| Failure::invalid(format!("cannot parse `{}` in `{s}`", p.trim())))
        })
        .collect()
}

pub fn check_overlap(x: f64) -> Result<(), Failure> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Failure::invalid(format!("--x must lie in [0, 1], got {x}")))
    }
}

#[derive(Deserialize)]
struct HamiltonianFile {
    beta: Vec<f64>,
    kappa: Vec<f64>,
}

pub fn read_to_string(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

pub fn load_hamiltonian(path: Option<&Path>) -> Result<Hamiltonian, Failure> {
    let Some(path) = path else {
        return Ok(Hamiltonian::cnot());
    };
    let file: HamiltonianFile = serde_json::from_str(&read_to_string(path)?)
        .map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    Ok(Hamiltonian::new(file.beta, file.kappa)?)
}

pub fn resolve_encoding(choice: &str, u: &WalkUnitary) -> Result<LogicalEncoding, Failure> {
    if choice == "auto" {
        return Ok(find_encoding(u)?);
    }
    match parse_list::<usize>(choice)?[..] {
        [c0, c1, t0, t1] => Ok(LogicalEncoding::from_waveguides(c0, c1, t0, t1)?),
        _ => Err(Failure::invalid(format!(
            "--encoding takes `auto` or `c0,c1,t0,t1`, got `{choice}`"
        ))),
    }
}

#[derive(Serialize)]
pub struct EncodingJson {
    pub c0: usize,
    pub c1: usize,
    pub t0: usize,
    pub t1: usize,
    pub aux: [usize; 2],
}

impl From<&LogicalEncoding> for EncodingJson {
    fn from(e: &LogicalEncoding) -> Self {
        let [c0, c1, t0, t1] = e.waveguides();
        Self {
            c0,
            c1,
            t0,
            t1,
            aux: e.aux.map(|m| m + 1),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure {
        code: NUMERIC,
        message: e.to_string(),
    })?;
    s.push('\n');
    Ok(s)
}

/// CSV table; every field is numeric or a plain label, so no quoting.
pub struct Csv(String);

impl Csv {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        let mut csv = Csv(String::new());
        csv.row(header.iter().map(|h| h.as_ref().to_string()));
        csv
    }

    pub fn row<I: IntoIterator<Item = String>>(&mut self, fields: I) {
        let line: Vec<String> = fields.into_iter().collect();
        let _ = writeln!(self.0, "{}", line.join(","));
    }

    pub fn finish(self) -> String {
        self.0
    }
}

/// Matrix stored as CSV. A leading row or column that is not numeric is
/// taken as labels and ignored.
pub fn read_matrix(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let text = read_to_string(path)?;
    let mut rows: Vec<Vec<&str>> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split(',').map(str::trim).collect())
        .collect();
    let numeric = |f: &&str| f.parse::<f64>().is_ok();
    if rows.first().is_some_and(|r| !r.iter().all(numeric)) {
        rows.remove(0);
    }
    if !rows.is_empty() && rows.iter().all(|r| !r.is_empty() && !numeric(&r[0])) {
        for r in rows.iter_mut() {
            r.remove(0);
        }
    }
    if rows.is_empty() {
        return Err(Failure::invalid(format!("{}: no numeric rows", path.display())));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .map(|f| {
                    f.parse().map_err(|_| {
                        Failure::invalid(format!("{}: row {}: cannot parse `{f}`", path.display(), i + 1))
                    })
                })
                .collect()
        })
        .collect()
}

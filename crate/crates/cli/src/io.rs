//! JSON matrix files and the report value helpers.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use srd_core::channels::QuantumChannel;
use srd_core::linalg::ComplexMatrix;
use srd_core::states::{BipartiteState, DensityMatrix, PositiveOperator};

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input; exit code 2.
    Parse(String),
    /// Inputs parsed but violate a precondition; exit code 3.
    Precondition(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Precondition(m) => write!(f, "precondition violated: {m}"),
        }
    }
}

impl From<srd_core::Error> for CliError {
    fn from(e: srd_core::Error) -> Self {
        CliError::Precondition(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    State,
    Positive,
    ChannelKraus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawMatrix {
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
}

/// One matrix or channel per file. Square matrices give `dim`, or `dim_a`
/// and `dim_b` for bipartite states; channels give `dim_in`, `dim_out` and
/// a `kraus` list of `dim_out x dim_in` matrices. Entries are row-major and
/// `im` may be omitted for real matrices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub kind: MatrixKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, alias = "dimA", skip_serializing_if = "Option::is_none")]
    pub dim_a: Option<usize>,
    #[serde(default, alias = "dimB", skip_serializing_if = "Option::is_none")]
    pub dim_b: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub re: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_in: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_out: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kraus: Vec<RawMatrix>,
}

fn parse_err(path: &Path, msg: impl fmt::Display) -> CliError {
    CliError::Parse(format!("{}: {msg}", path.display()))
}

fn build(rows: usize, cols: usize, re: &[f64], im: &[f64]) -> Result<ComplexMatrix, String> {
    if re.len() != rows * cols {
        return Err(format!("expected {} real parts, found {}", rows * cols, re.len()));
    }
    if !im.is_empty() && im.len() != re.len() {
        return Err(format!("expected {} imaginary parts, found {}", re.len(), im.len()));
    }
    if re.iter().chain(im).any(|x| !x.is_finite()) {
        return Err("entries must be finite".into());
    }
    let zeros = vec![0.0; re.len()];
    let im = if im.is_empty() { &zeros[..] } else { im };
    ComplexMatrix::from_parts(rows, cols, re, im).map_err(|e| e.to_string())
}

fn split(m: &ComplexMatrix) -> (Vec<f64>, Vec<f64>) {
    let re = m.data().iter().map(|z| z.re).collect();
    let im: Vec<f64> = m.data().iter().map(|z| z.im).collect();
    let im = if im.iter().all(|&x| x == 0.0) { Vec::new() } else { im };
    (re, im)
}

impl MatrixFile {
    pub fn read(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| parse_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| parse_err(path, e))
    }

    pub fn square(kind: MatrixKind, m: &ComplexMatrix) -> Self {
        let (re, im) = split(m);
        Self {
            kind,
            dim: Some(m.rows()),
            dim_a: None,
            dim_b: None,
            re,
            im,
            dim_in: None,
            dim_out: None,
            kraus: Vec::new(),
        }
    }

    pub fn bipartite(state: &BipartiteState) -> Self {
        Self {
            dim: None,
            dim_a: Some(state.dim_a),
            dim_b: Some(state.dim_b),
            ..Self::square(MatrixKind::State, state.state.matrix())
        }
    }

    pub fn channel(ch: &QuantumChannel) -> Self {
        Self {
            kind: MatrixKind::ChannelKraus,
            dim: None,
            dim_a: None,
            dim_b: None,
            re: Vec::new(),
            im: Vec::new(),
            dim_in: Some(ch.dim_in()),
            dim_out: Some(ch.dim_out()),
            kraus: ch
                .kraus()
                .iter()
                .map(|k| {
                    let (re, im) = split(k);
                    RawMatrix { re, im }
                })
                .collect(),
        }
    }

    /// Square matrix and, when given, its bipartite split.
    fn matrix(&self, path: &Path) -> CliResult<(ComplexMatrix, Option<(usize, usize)>)> {
        if self.kind == MatrixKind::ChannelKraus {
            return Err(parse_err(path, "expected a matrix, found a channel"));
        }
        let split = match (self.dim_a, self.dim_b) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => return Err(parse_err(path, "dim_a and dim_b must be given together")),
        };
        let n = match (self.dim, split) {
            (Some(d), Some((a, b))) if d != a * b => {
                return Err(parse_err(path, format!("dim {d} differs from dim_a * dim_b = {}", a * b)))
            }
            (Some(d), _) => d,
            (None, Some((a, b))) => a * b,
            (None, None) => return Err(parse_err(path, "missing dim")),
        };
        let m = build(n, n, &self.re, &self.im).map_err(|e| parse_err(path, e))?;
        Ok((m, split))
    }
}

pub fn read_state(path: &Path) -> CliResult<DensityMatrix> {
    let f = MatrixFile::read(path)?;
    if f.kind != MatrixKind::State {
        return Err(parse_err(path, "expected kind \"state\""));
    }
    Ok(DensityMatrix::new(f.matrix(path)?.0)?)
}

pub fn read_bipartite(path: &Path) -> CliResult<BipartiteState> {
    let f = MatrixFile::read(path)?;
    if f.kind != MatrixKind::State {
        return Err(parse_err(path, "expected kind \"state\""));
    }
    let (m, split) = f.matrix(path)?;
    let (a, b) = split.ok_or_else(|| parse_err(path, "bipartite state needs dim_a and dim_b"))?;
    Ok(BipartiteState::new(DensityMatrix::new(m)?, a, b)?)
}

/// Accepts both `state` and `positive` files.
pub fn read_positive(path: &Path) -> CliResult<PositiveOperator> {
    let f = MatrixFile::read(path)?;
    Ok(PositiveOperator::from_matrix(f.matrix(path)?.0)?)
}

pub fn read_channel(path: &Path) -> CliResult<QuantumChannel> {
    let f = MatrixFile::read(path)?;
    if f.kind != MatrixKind::ChannelKraus {
        return Err(parse_err(path, "expected kind \"channel-kraus\""));
    }
    let (din, dout) = match (f.dim_in, f.dim_out) {
        (Some(i), Some(o)) => (i, o),
        _ => return Err(parse_err(path, "channel needs dim_in and dim_out")),
    };
    if f.kraus.is_empty() {
        return Err(parse_err(path, "channel needs at least one Kraus operator"));
    }
    let kraus = f
        .kraus
        .iter()
        .enumerate()
        .map(|(k, raw)| build(dout, din, &raw.re, &raw.im).map_err(|e| parse_err(path, format!("kraus[{k}]: {e}"))))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(QuantumChannel::new(kraus)?)
}

/// A finite number, or the strings `"inf"` / `"-inf"`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x == f64::INFINITY {
        Value::from("inf")
    } else if x == f64::NEG_INFINITY {
        Value::from("-inf")
    } else {
        Value::from("nan")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matrix_file_round_trips_bit_exactly() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let re: Vec<f64> = (0..9).map(|_| rng.random::<f64>() * 1e3 - 5e2).collect();
        let mut im: Vec<f64> = (0..9).map(|_| rng.random::<f64>() * 1e-7).collect();
        im[4] = f64::MIN_POSITIVE;
        let f = MatrixFile { dim: Some(3), re, im, ..MatrixFile::square(MatrixKind::Positive, &ComplexMatrix::identity(1)) };
        let back: MatrixFile = serde_json::from_str(&serde_json::to_string_pretty(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(back.re.iter().zip(&f.re).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(back.im.iter().zip(&f.im).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let r: Result<MatrixFile, _> = serde_json::from_str(r#"{"kind":"state","dim":1,"re":[1],"extra":0}"#);
        assert!(r.is_err());
    }
}

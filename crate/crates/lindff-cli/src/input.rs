//! Reading Hamiltonian files and parsing list and state arguments.

use crate::record::HamiltonianInput;
use crate::CliError;
use clap::ValueEnum;
use lindff::model::{from_dense_text, from_pauli_sum, Hamiltonian};
use lindff::{CMatrix, CVector, StateVector, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};
use std::path::Path;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HamFormat {
    /// Dense if the first content line contains a comma, Pauli sum otherwise.
    Auto,
    Pauli,
    Dense,
}

/// SHA-256 over the entries in row-major order, each entry as the
/// little-endian bytes of its real then imaginary part, preceded by the
/// dimension as a little-endian `u64`. Negative zero is hashed as zero.
pub fn matrix_digest(m: &CMatrix) -> String {
    let mut hasher = Sha256::new();
    hasher.update((m.nrows() as u64).to_le_bytes());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            hasher.update((m[(i, j)].re + 0.0).to_le_bytes());
            hasher.update((m[(i, j)].im + 0.0).to_le_bytes());
        }
    }
    hex::encode(hasher.finalize())
}

fn detect(text: &str) -> HamFormat {
    let first = text.lines().map(|l| l.split('#').next().unwrap_or("").trim()).find(|l| !l.is_empty());
    match first {
        Some(l) if l.contains(',') => HamFormat::Dense,
        _ => HamFormat::Pauli,
    }
}

pub fn parse_hamiltonian(text: &str, format: HamFormat) -> Result<(CMatrix, HamiltonianInput), CliError> {
    let format = if format == HamFormat::Auto { detect(text) } else { format };
    let (m, name) = match format {
        HamFormat::Dense => (from_dense_text(text)?, "dense"),
        _ => (from_pauli_sum(text)?, "pauli"),
    };
    let input = HamiltonianInput { format: name.into(), text: text.into(), digest: matrix_digest(&m), dim: m.nrows() };
    Ok((m, input))
}

pub fn load_hamiltonian(path: &Path, format: HamFormat) -> Result<(CMatrix, HamiltonianInput), CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    parse_hamiltonian(&text, format)
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

/// Initial state selector: `plus`, `basis:K`, `eigen:K` or `random`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateSpec {
    Plus,
    Basis(usize),
    /// First basis vector of the `K`-th distinct eigenvalue, ascending.
    Eigen(usize),
    /// Haar-like random vector drawn from the master seed.
    Random,
}

impl FromStr for StateSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let index = |v: &str| v.parse::<usize>().map_err(|_| format!("bad index in state {s:?}"));
        match s.split_once(':') {
            None if s == "plus" => Ok(StateSpec::Plus),
            None if s == "random" => Ok(StateSpec::Random),
            Some(("basis", k)) => Ok(StateSpec::Basis(index(k)?)),
            Some(("eigen", k)) => Ok(StateSpec::Eigen(index(k)?)),
            _ => Err(format!("unknown state {s:?}; expected plus, random, basis:K or eigen:K")),
        }
    }
}

impl StateSpec {
    pub fn build(self, dim: usize, h: Option<&Hamiltonian>, seed: u64) -> Result<StateVector, CliError> {
        match self {
            StateSpec::Plus => Ok(StateVector::uniform(dim)),
            StateSpec::Basis(k) if k < dim => Ok(StateVector::basis(dim, k)),
            StateSpec::Basis(k) => Err(CliError::Validation(format!("basis index {k} out of range for dimension {dim}"))),
            StateSpec::Eigen(k) => {
                let h = h.ok_or_else(|| CliError::Validation("eigen:K needs a Hamiltonian".into()))?;
                let basis = h.bases().get(k).ok_or_else(|| {
                    CliError::Validation(format!("eigenspace {k} out of range; there are {}", h.bases().len()))
                })?;
                Ok(StateVector::new(basis.column(0).into_owned())?)
            }
            StateSpec::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let v = CVector::from_fn(dim, |_, _| {
                    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                });
                Ok(StateVector::normalized(v)?)
            }
        }
    }
}

// Aliases keep clap from treating the parsed list as a repeated flag.
pub type U64List = Vec<u64>;
pub type F64List = Vec<f64>;

/// Comma-separated integers; `a..b` expands to the inclusive range.
pub fn parse_u64_list(s: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = a.parse().map_err(|_| format!("bad range start in {part:?}"))?;
            let b: u64 = b.parse().map_err(|_| format!("bad range end in {part:?}"))?;
            if a > b {
                return Err(format!("empty range {part:?}"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad integer {part:?}"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

pub fn parse_f64_list(s: &str) -> Result<Vec<f64>, String> {
    let out: Vec<f64> = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse::<f64>().map_err(|_| format!("bad number {p:?}")))
        .collect::<Result<_, _>>()?;
    if out.is_empty() {
        return Err("empty list".into());
    }
    if let Some(x) = out.iter().find(|x| !x.is_finite()) {
        return Err(format!("non-finite value {x}"));
    }
    Ok(out)
}

/// Rows of `[re, im]` pairs.
pub fn matrix_json(m: &CMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::json!(rows)
}

pub fn matrix_from_json(v: &serde_json::Value) -> Option<CMatrix> {
    let rows: Vec<Vec<[f64; 2]>> = serde_json::from_value(v.clone()).ok()?;
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return None;
    }
    Some(CMatrix::from_fn(n, n, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

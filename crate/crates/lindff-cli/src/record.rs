//! The JSON-lines record format.
//!
//! One [`ExperimentRecord`] per line. Field order is fixed by the struct and
//! object keys inside `outputs` are sorted, so identical runs serialize to
//! identical bytes. `wall_time` is the only field allowed to differ and is
//! `null` unless `--timing` was given.

use lindff::CostReport;
use serde::{Deserialize, Serialize};

pub const RECORD_VERSION: &str = concat!("lindff-cli/", env!("CARGO_PKG_VERSION"), "/record-1");

/// The Hamiltonian a record was computed from, as read.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianInput {
    /// `pauli` or `dense`.
    pub format: String,
    /// File content verbatim, so the record can be re-run without the file.
    pub text: String,
    /// SHA-256 of the matrix entries, see [`crate::input::matrix_digest`].
    pub digest: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub version: String,
    /// `evolve`, `bench.ff-vs-dilated.cell`, `bench.ff-vs-dilated.summary`, ...
    pub kind: String,
    /// Arguments after the program name, as given.
    pub command: Vec<String>,
    pub seed: u64,
    pub hamiltonian: Option<HamiltonianInput>,
    pub outputs: serde_json::Value,
    pub cost: Option<CostReport>,
    /// Seconds; present only with `--timing`.
    pub wall_time: Option<f64>,
}

impl ExperimentRecord {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("records contain only finite numbers and strings")
    }
}

pub fn parse_record(line: &str) -> serde_json::Result<ExperimentRecord> {
    serde_json::from_str(line)
}

/// Parses every non-blank line.
pub fn parse_records(text: &str) -> serde_json::Result<Vec<ExperimentRecord>> {
    text.lines().filter(|l| !l.trim().is_empty()).map(parse_record).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> ExperimentRecord {
        ExperimentRecord {
            version: RECORD_VERSION.into(),
            kind: "evolve".into(),
            command: vec!["evolve".into(), "--t".into(), "2".into()],
            seed: 7,
            hamiltonian: Some(HamiltonianInput {
                format: "pauli".into(),
                text: "0.5 Z\n".into(),
                digest: "00".repeat(32),
                dim: 2,
            }),
            outputs: json!({"b": [0.1, 1e-300, -2.5], "a": {"nested": true}}),
            cost: Some(CostReport { hamiltonian_time: 12.8, step_count: None, ancilla_count: 16 }),
            wall_time: None,
        }
    }

    #[test]
    fn round_trips_byte_for_byte() {
        let line = sample().to_line();
        let back = parse_record(&line).unwrap();
        assert_eq!(back, sample());
        assert_eq!(back.to_line(), line);
    }

    #[test]
    fn output_keys_are_sorted() {
        let line = sample().to_line();
        assert!(line.find("\"a\":").unwrap() < line.find("\"b\":").unwrap());
    }

    #[test]
    fn rejects_truncated_lines() {
        let line = sample().to_line();
        assert!(parse_record(&line[..line.len() - 1]).is_err());
        assert_eq!(parse_records(&format!("{line}\n\n{line}\n")).unwrap().len(), 2);
    }
}

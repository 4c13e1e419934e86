// SPDX-License-Identifier: Apache-2.0

//! Circuit sources: a JSON file or a generator spec.

use std::fs;

use energy_reliability::circuit::{gen_balanced, gen_line, parse_circuit, GateKind, GateTree};

use crate::CliError;

/// `balanced:k:d:kind`, `line:m:kind`, or a path to a circuit file.
pub fn load_circuit(source: &str) -> Result<GateTree, CliError> {
    let parts: Vec<&str> = source.split(':').collect();
    match parts.as_slice() {
        ["balanced", k, d, kind] => {
            let k = parse_count(k, "k")?;
            let d = parse_count(d, "d")?;
            Ok(gen_balanced(k, d, parse_kind(kind)?)?)
        }
        ["line", m, kind] => Ok(gen_line(parse_count(m, "m")?, parse_kind(kind)?)?),
        ["balanced", ..] => Err(CliError::Usage(format!("expected balanced:k:d:kind, got `{source}`"))),
        ["line", ..] => Err(CliError::Usage(format!("expected line:m:kind, got `{source}`"))),
        _ => {
            let text = fs::read_to_string(source)
                .map_err(|e| CliError::Usage(format!("cannot read circuit file `{source}`: {e}")))?;
            Ok(parse_circuit(&text)?)
        }
    }
}

fn parse_count(s: &str, name: &str) -> Result<usize, CliError> {
    s.parse().map_err(|_| CliError::Usage(format!("`{name}` must be a non-negative integer, got `{s}`")))
}

pub fn parse_kind(s: &str) -> Result<GateKind, CliError> {
    s.parse().map_err(CliError::Usage)
}

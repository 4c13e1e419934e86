// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::io::{self, Write};

use serde::Serialize;

use crate::CliError;

/// Shortest form of `x` rounded to 12 significant digits; very small or
/// very large magnitudes use exponent notation.
pub fn num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let mag = rounded.abs();
    if mag != 0.0 && !(1e-5..1e16).contains(&mag) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

pub fn nums(xs: &[f64]) -> String {
    xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(";")
}

pub fn sink(out: Option<&str>) -> Result<Box<dyn Write>, CliError> {
    match out {
        Some(path) => {
            let f = File::create(path).map_err(|e| CliError::Internal(format!("cannot create `{path}`: {e}")))?;
            Ok(Box::new(io::BufWriter::new(f)))
        }
        None => Ok(Box::new(io::BufWriter::new(io::stdout()))),
    }
}

pub fn write_json<T: Serialize>(out: Option<&str>, value: &T) -> Result<(), CliError> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| CliError::Internal(e.to_string()))?;
    writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::Internal(e.to_string()))
}

pub fn write_csv(out: Option<&str>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    let io_err = |e: csv::Error| CliError::Internal(e.to_string());
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(r).map_err(io_err)?;
    }
    w.flush().map_err(|e| CliError::Internal(e.to_string()))
}

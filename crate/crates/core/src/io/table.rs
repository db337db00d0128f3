//! CSV tables with a fixed header per row type.

use std::path::Path;

use crate::error::{Error, Result};
use crate::spectra::ShiftResult;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    /// Floats use Rust's shortest round-trip formatting.
    fn render(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// A row type with a fixed CSV header.
pub trait TableRow {
    const HEADER: &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

impl TableRow for ShiftResult {
    const HEADER: &'static [&'static str] = &["eta", "L", "state_index", "delta_E", "method"];
    fn cells(&self) -> Vec<Cell> {
        vec![
            Cell::Float(self.eta),
            Cell::Float(self.length),
            Cell::Int(self.state_index as u64),
            Cell::Float(self.delta_e),
            Cell::Text(self.method.as_str().into()),
        ]
    }
}

macro_rules! table_row {
    ($(#[$meta:meta])* $name:ident { $($field:ident : $ty:ty => $col:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name {
            $(pub $field: $ty),+
        }

        impl TableRow for $name {
            const HEADER: &'static [&'static str] = &[$($col),+];
            fn cells(&self) -> Vec<Cell> {
                vec![$(self.$field.clone().into()),+]
            }
        }
    };
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

table_row!(SpectrumRow {
    state_index: usize => "state_index",
    energy: f64 => "energy",
    corrected_energy: f64 => "corrected_energy",
    nodes: usize => "nodes",
});

table_row!(EvolutionRow { time: f64 => "time", norm_drift: f64 => "norm_drift", energy: f64 => "energy" });

table_row!(StateRow { x: f64 => "x", re: f64 => "re", im: f64 => "im" });

table_row!(EtaOptimumRow { profile: String => "profile", eta_star: f64 => "eta_star", value: f64 => "value" });

table_row!(ExactRow {
    kappa: f64 => "kappa",
    eta: f64 => "eta",
    length: f64 => "L",
    energy: f64 => "energy",
    lower_bound: f64 => "lower_bound",
    max_residual: f64 => "max_residual",
    excluded_fraction: f64 => "excluded_fraction",
});

table_row!(CotangentRow {
    kappa: f64 => "kappa",
    eta: f64 => "eta",
    length: f64 => "L",
    a: f64 => "A",
    b: f64 => "B",
    beta: f64 => "beta",
    max_residual: f64 => "max_residual",
});

table_row!(MeasuresRow { length: f64 => "L", kl: f64 => "kl", fisher: f64 => "fisher", shannon: f64 => "shannon" });

/// Writes `rows` as CSV under `R::HEADER`. An empty slice gives a header-only file; a
/// non-finite float anywhere is refused before anything is written.
pub fn emit_results<R: TableRow>(rows: &[R], path: &Path) -> Result<()> {
    let rendered = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let cells = r.cells();
            if cells.iter().any(|c| matches!(c, Cell::Float(v) if !v.is_finite())) {
                return Err(Error::NonFiniteOutput { row: i });
            }
            Ok(cells.iter().map(Cell::render).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(R::HEADER)?;
    for r in rendered {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::ShiftMethod;

    #[test]
    fn header_only_when_empty_and_nan_refused() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        emit_results::<ShiftResult>(&[], &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "eta,L,state_index,delta_E,method\n");

        let bad = ShiftResult { eta: 0.5, length: 1e-3, state_index: 0, delta_e: f64::NAN, method: ShiftMethod::NumericExpectation };
        assert!(matches!(emit_results(&[bad], &dir.path().join("t.csv")), Err(Error::NonFiniteOutput { row: 0 })));
        assert!(!dir.path().join("t.csv").exists());
    }

    #[test]
    fn floats_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let row = ShiftResult { eta: 0.1, length: 1e-3, state_index: 2, delta_e: -1.234_567_890_123_456_7e-7, method: ShiftMethod::NodeProfile };
        emit_results(&[row], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let line = text.lines().nth(1).unwrap();
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[3].parse::<f64>().unwrap(), row.delta_e);
        assert_eq!(fields[4], "node_profile");
    }
}

//! CSV tables and the run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{config_err, CliResult};

/// Units allowed in CSV headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unit {
    /// Feedback bits per sub-channel per block.
    BitsPerSubchannel,
    /// Bits per coherence block over all sub-channels.
    BitsPerBlock,
    /// Forward rate per sub-channel.
    BitsPerSubchannelUse,
    /// Forward rate summed over sub-channels.
    BitsPerUse,
    Probability,
    /// Share of all sub-channels.
    Fraction,
    /// Number of sub-channels or codewords.
    Count,
    /// Threshold on the normalized gain.
    Gain,
    Dimensionless,
}

impl Unit {
    pub const ALL: [Unit; 9] = [
        Unit::BitsPerSubchannel,
        Unit::BitsPerBlock,
        Unit::BitsPerSubchannelUse,
        Unit::BitsPerUse,
        Unit::Probability,
        Unit::Fraction,
        Unit::Count,
        Unit::Gain,
        Unit::Dimensionless,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Unit::BitsPerSubchannel => "bits/sub-channel",
            Unit::BitsPerBlock => "bits/block",
            Unit::BitsPerSubchannelUse => "bits/sub-channel/use",
            Unit::BitsPerUse => "bits/use",
            Unit::Probability => "probability",
            Unit::Fraction => "fraction",
            Unit::Count => "count",
            Unit::Gain => "gain",
            Unit::Dimensionless => "1",
        }
    }

    pub fn from_label(s: &str) -> Option<Unit> {
        Unit::ALL.into_iter().find(|u| u.label() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column {
    pub name: String,
    pub unit: Unit,
}

impl Column {
    pub fn new(name: &str, unit: Unit) -> Self {
        Column { name: name.to_string(), unit }
    }

    pub fn header(&self) -> String {
        format!("{} [{}]", self.name, self.unit.label())
    }
}

/// Splits a header cell `name [unit]` and checks the unit.
pub fn parse_header(cell: &str) -> Option<(&str, Unit)> {
    let (name, rest) = cell.split_once(" [")?;
    Unit::from_label(rest.strip_suffix(']')?).map(|u| (name, u))
}

/// One CSV file: a labeled curve or a table of results.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: Vec<Column>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    /// Checks the curve shape: feedback first, forward rate second and
    /// feedback strictly increasing down the rows.
    pub fn check_curve(&self) -> CliResult<()> {
        if self.columns.len() < 2 {
            return Err(config_err(format!("curve {} needs feedback and rate columns", self.name)));
        }
        if self.rows.windows(2).any(|w| !(w[1][0] > w[0][0])) {
            return Err(config_err(format!("curve {}: feedback column is not strictly increasing", self.name)));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<String> = self.columns.iter().map(Column::header).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|x| fmt_sig(*x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// A tradeoff curve: feedback first, forward rate second, any extra columns after.
pub fn curve(scheme: impl Into<String>, feedback: Column, rate: Column, aux: Vec<Column>) -> Table {
    let mut columns = vec![feedback, rate];
    columns.extend(aux);
    Table::new(scheme, columns)
}

/// Formats with 9 significant digits, plain notation for moderate
/// magnitudes and scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..9).contains(&exp) {
        let decimals = (8 - exp).max(0) as usize;
        let mut s = format!("{x:.decimals$}");
        if s.contains('.') {
            s = s.trim_end_matches('0').trim_end_matches('.').to_string();
        }
        if s == "-0" {
            s = "0".into();
        }
        s
    } else {
        let m = if mantissa.contains('.') { mantissa.trim_end_matches('0').trim_end_matches('.') } else { mantissa };
        let mut s = String::new();
        let _ = write!(s, "{m}e{exp}");
        s
    }
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub git_describe: String,
    pub seed: u64,
    pub wall_time_s: f64,
    pub files: Vec<String>,
    pub notes: Vec<String>,
}

/// Writes each table as `<name>.csv` under `dir`, then the manifest.
pub fn write_run(dir: &Path, tables: &[Table], manifest: &mut Manifest) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| config_err(format!("cannot create output directory {}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for t in tables {
        let path = dir.join(format!("{}.csv", t.name));
        std::fs::write(&path, t.to_csv()).map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?;
        manifest.files.push(format!("{}.csv", t.name));
        paths.push(path);
    }
    let path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    std::fs::write(&path, json + "\n").map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.3), "0.3");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig(2.0 / 3.0 * 1000.0), "666.666667");
        assert_eq!(fmt_sig(123456789.0), "123456789");
        assert_eq!(fmt_sig(1.5e12), "1.5e12");
        assert_eq!(fmt_sig(-2.5e-7), "-2.5e-7");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(14.93), "14.93");
        assert_eq!(fmt_sig(-1e-300 * 0.0), "0");
    }

    #[test]
    fn headers_round_trip() {
        for u in Unit::ALL {
            let c = Column::new("x", u);
            assert_eq!(parse_header(&c.header()), Some(("x", u)));
        }
        assert_eq!(parse_header("x [furlongs]"), None);
    }

    #[test]
    fn curve_check() {
        let mut t = curve("c", Column::new("rf", Unit::BitsPerSubchannel), Column::new("rate", Unit::BitsPerSubchannelUse), vec![]);
        t.push(vec![0.0, 1.0]);
        t.push(vec![0.1, 1.2]);
        assert!(t.check_curve().is_ok());
        t.push(vec![0.1, 1.3]);
        assert!(t.check_curve().is_err());
        assert_eq!(t.to_csv().lines().next(), Some("rf [bits/sub-channel],rate [bits/sub-channel/use]"));
    }
}

//! Result files.
//!
//! Floats are written with 17 significant digits in both JSON and CSV so
//! that every value re-parses to the same `f64`. CSV files have a header
//! row and LF line endings. Every file carries the config hash and seed.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

/// Provenance stamped into every output file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

/// A JSON result file: the command, its provenance and its payload.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record<T> {
    pub command: String,
    #[serde(flatten)]
    pub provenance: Provenance,
    pub result: T,
}

/// `x` with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        String::from("NaN")
    } else if x > 0.0 {
        String::from("inf")
    } else {
        String::from("-inf")
    }
}

struct Digits17;

impl Formatter for Digits17 {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()> {
        writer.write_all(fmt_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Compact JSON with 17-digit floats.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

/// One JSON document per line.
pub fn to_json_lines<T: Serialize>(values: impl IntoIterator<Item = T>) -> serde_json::Result<String> {
    let mut out = String::new();
    for v in values {
        out.push_str(&to_json(&v)?);
        out.push('\n');
    }
    Ok(out)
}

/// A CSV table; `config_hash` and `seed` columns are appended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self, prov: &Provenance) -> csv::Result<String> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let seed = prov.seed.to_string();
        w.write_record(self.header.iter().map(String::as_str).chain(["config_hash", "seed"]))?;
        for r in &self.rows {
            w.write_record(r.iter().map(String::as_str).chain([prov.config_hash.as_str(), seed.as_str()]))?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
    }
}

/// Files produced by a command, written only once it succeeds.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Artifacts {
    pub files: Vec<(String, String)>,
}

impl Artifacts {
    pub fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.push((name.into(), contents));
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, contents)| {
                let p = dir.join(name);
                std::fs::write(&p, contents)?;
                Ok(p)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        let xs = [0.1, 1.0 / 3.0, -2.5e-300, 1.0, 0.9454042236619159];
        let s = to_json(&xs).unwrap();
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, xs);
    }

    #[test]
    fn csv_has_header_provenance_and_lf() {
        let mut t = Table::new(["tau", "value"]);
        t.push(vec!["1".into(), fmt_f64(0.5)]);
        let prov = Provenance { config_hash: "ab".into(), seed: 3 };
        let s = t.render(&prov).unwrap();
        assert_eq!(s, "tau,value,config_hash,seed\n1,5.0000000000000000e-1,ab,3\n");
    }
}

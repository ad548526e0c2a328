//! Output envelope and its three renderings.

use std::collections::BTreeMap;

use clap::ValueEnum;
use num_rational::Rational64;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// Everything a command produces before formatting.
#[derive(Clone, Debug, Default)]
pub struct Report {
    /// Canonical echo of the invocation.
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub records: Vec<Value>,
    pub notes: Vec<String>,
    pub warnings: Vec<String>,
    /// Additional top-level JSON members.
    pub extra: BTreeMap<String, Value>,
}

impl Report {
    pub fn new(command: String, columns: &[&str]) -> Self {
        Report { command, columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn envelope(&self) -> Value {
        let mut v = json!({
            "command": self.command,
            "version": env!("CARGO_PKG_VERSION"),
            "records": self.records,
            "notes": self.notes,
            "warnings": self.warnings,
        });
        let obj = v.as_object_mut().expect("object");
        for (k, x) in &self.extra {
            obj.insert(k.clone(), x.clone());
        }
        v
    }
}

/// Rendered (stdout, stderr).
pub fn render(report: &Report, format: Format) -> (String, String) {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&report.envelope()).expect("serializable");
            s.push('\n');
            (s, String::new())
        }
        Format::Table => {
            let mut s = aligned(&report.columns, &report.rows);
            for n in &report.notes {
                s.push_str(n);
                s.push('\n');
            }
            for w in &report.warnings {
                s.push_str("WARNING ");
                s.push_str(w);
                s.push('\n');
            }
            (s, String::new())
        }
        Format::Csv => {
            let mut wtr = csv::Writer::from_writer(Vec::new());
            wtr.write_record(&report.columns).expect("in-memory csv");
            for r in &report.rows {
                wtr.write_record(r).expect("in-memory csv");
            }
            let out = String::from_utf8(wtr.into_inner().expect("in-memory csv")).expect("utf8");
            let mut err = String::new();
            for n in &report.notes {
                err.push_str(n);
                err.push('\n');
            }
            for w in &report.warnings {
                err.push_str("WARNING ");
                err.push_str(w);
                err.push('\n');
            }
            (out, err)
        }
    }
}

fn aligned(columns: &[String], rows: &[Vec<String>]) -> String {
    if columns.is_empty() {
        return String::new();
    }
    let mut width: Vec<usize> = columns.iter().map(|c| c.chars().count()).collect();
    for r in rows {
        for (w, cell) in width.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let mut s = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                s.push_str(c);
                s.push_str(&" ".repeat(w - c.chars().count() + 2));
            }
        }
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(columns);
    for r in rows {
        out.push_str(&line(r));
    }
    out
}

/// "-7/2", or "-5" for an integer.
pub fn short_rational(r: &Rational64) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Inverse of `short_rational`; also accepts "a/b" with b = 1.
pub fn parse_rational(s: &str) -> Option<Rational64> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (i64, i64) = (a.trim().parse().ok()?, b.trim().parse().ok()?);
            (b != 0).then(|| Rational64::new(a, b))
        }
        None => s.trim().parse().ok().map(Rational64::from_integer),
    }
}

/// Table label of the root of unity in a type.
pub fn zeta_label(d: u64) -> String {
    match d {
        1 => "1".into(),
        2 => "-1".into(),
        _ => format!("zeta_{d}"),
    }
}

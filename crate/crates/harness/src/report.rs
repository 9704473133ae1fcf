//! Report sets and their JSON / CSV encodings.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which is
//! enough to round-trip every `f64`. Non-finite values become `null` in JSON
//! and `NaN`/`inf` in CSV.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use weakrel::relations::{RelationId, RelationReport};

use crate::config::{OutputFormat, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubSeed(#[serde(with = "hex_u64")] pub u64);

mod hex_u64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{v:016x}"))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        let s = String::deserialize(d)?;
        u64::from_str_radix(&s, 16).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub relation: RelationId,
    pub dim: usize,
    pub trial: usize,
    pub sub_seed: SubSeed,
    /// Ensembles redrawn before this trial's inputs were accepted.
    pub rejections: u32,
    pub report: RelationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub trials: usize,
    /// `None` when there are no rows.
    pub min_slack: Option<f64>,
    pub max_imag_residue: f64,
    pub failure_count: usize,
    pub tight_count: usize,
    pub tightness_rate: f64,
    pub rejections: u64,
    pub fixture_failures: usize,
}

impl Aggregates {
    /// Recomputes the aggregate block; a row fails when `slack < -tolerance`.
    pub fn from_rows(rows: &[TrialRow], fixtures: &[FixtureResult], tolerance: f64) -> Self {
        let min_slack = rows.iter().map(|r| r.report.slack).reduce(f64::min);
        let tight_count = rows.iter().filter(|r| r.report.tight).count();
        Self {
            trials: rows.len(),
            min_slack,
            max_imag_residue: rows
                .iter()
                .map(|r| r.report.imag_residue)
                .fold(0.0, f64::max),
            failure_count: rows.iter().filter(|r| !r.report.holds(tolerance)).count(),
            tight_count,
            tightness_rate: if rows.is_empty() {
                0.0
            } else {
                tight_count as f64 / rows.len() as f64
            },
            rejections: rows.iter().map(|r| r.rejections as u64).sum(),
            fixture_failures: fixtures.iter().filter(|f| !f.passed).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureResult {
    pub name: String,
    pub expected: f64,
    pub observed: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl FixtureResult {
    pub fn new(name: impl Into<String>, expected: f64, observed: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            observed,
            tolerance,
            passed: (observed - expected).abs() <= tolerance,
        }
    }

    /// A fixture whose observed value must not exceed `bound`.
    pub fn at_most(name: impl Into<String>, bound: f64, observed: f64) -> Self {
        Self {
            name: name.into(),
            expected: bound,
            observed,
            tolerance: 0.0,
            passed: observed <= bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSet {
    pub version: String,
    pub config: Option<SweepConfig>,
    pub tolerance: f64,
    pub rows: Vec<TrialRow>,
    pub fixtures: Vec<FixtureResult>,
    pub aggregates: Aggregates,
    pub wall_clock_ms: u64,
}

impl ReportSet {
    pub fn new(
        config: Option<SweepConfig>,
        tolerance: f64,
        rows: Vec<TrialRow>,
        fixtures: Vec<FixtureResult>,
    ) -> Self {
        let aggregates = Aggregates::from_rows(&rows, &fixtures, tolerance);
        Self {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            config,
            tolerance,
            rows,
            fixtures,
            aggregates,
            wall_clock_ms: 0,
        }
    }

    pub fn empty() -> Self {
        Self::new(None, 0.0, Vec::new(), Vec::new())
    }

    pub fn passed(&self) -> bool {
        self.aggregates.failure_count == 0 && self.aggregates.fixture_failures == 0
    }
}

/// `serde_json` formatter writing floats with 17 significant digits.
#[derive(Debug, Default)]
pub struct FullPrecision {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*);)*) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl serde_json::ser::Formatter for FullPrecision {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", format_float(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate! {
        begin_array();
        end_array();
        begin_array_value(first: bool);
        end_array_value();
        begin_object();
        end_object();
        begin_object_key(first: bool);
        end_object_key();
        begin_object_value();
        end_object_value();
    }
}

/// `{:.16e}` for finite values.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn to_json_bytes<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FullPrecision::default());
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub const CSV_HEADER: [&str; 15] = [
    "relation",
    "dim",
    "trial",
    "sub_seed",
    "rejections",
    "lhs",
    "rhs_total",
    "slack",
    "sign_branch",
    "psibar_mode",
    "tight",
    "imag_residue",
    "rhs_terms",
    "diagnostics",
    "notes",
];

fn named(values: &[weakrel::relations::NamedValue]) -> String {
    values
        .iter()
        .map(|v| format!("{}={}", v.name, format_float(v.value)))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn write_csv<W: Write>(set: &ReportSet, w: W) -> anyhow::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(CSV_HEADER)?;
    for row in &set.rows {
        let r = &row.report;
        out.write_record([
            r.relation.as_str().to_owned(),
            row.dim.to_string(),
            row.trial.to_string(),
            format!("{:016x}", row.sub_seed.0),
            row.rejections.to_string(),
            format_float(r.lhs),
            format_float(r.rhs_total),
            format_float(r.slack),
            r.sign_branch
                .map(|s| s.as_str().to_owned())
                .unwrap_or_default(),
            r.psibar_mode
                .map(|p| p.as_str().to_owned())
                .unwrap_or_default(),
            r.tight.to_string(),
            format_float(r.imag_residue),
            named(&r.rhs_terms),
            named(&r.diagnostics),
            r.notes.join(" | "),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes `set` to `path`, or to stdout when `path` is `None`.
pub fn emit_report(
    set: &ReportSet,
    format: OutputFormat,
    path: Option<&Path>,
) -> anyhow::Result<()> {
    let bytes = match format {
        OutputFormat::Json => to_json_bytes(set)?,
        OutputFormat::Csv => {
            let mut buf = Vec::new();
            write_csv(set, &mut buf)?;
            buf
        }
    };
    write_bytes(&bytes, path)
}

pub fn write_bytes(bytes: &[u8], path: Option<&Path>) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("creating {}", p.display()))?;
            let mut w = BufWriter::new(file);
            w.write_all(bytes)
                .and_then(|_| w.flush())
                .with_context(|| format!("writing {}", p.display()))
        }
        None => io::stdout().write_all(bytes).context("writing to stdout"),
    }
}

pub fn read_json_report(path: &Path) -> anyhow::Result<ReportSet> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

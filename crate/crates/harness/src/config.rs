//! Sweep configuration, loadable from JSON and overridable from the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use weakrel::Tolerances;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("reading config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing config {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_owned(),
        reason: reason.into(),
    }
}

/// Relations a sweep can exercise.
#[derive(
    Debug,
    Clone,
    Copy,
    PartialEq,
    Eq,
    Hash,
    PartialOrd,
    Ord,
    Serialize,
    Deserialize,
    clap::ValueEnum,
)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum SweepRelation {
    Ur1,
    Ur2,
    Complementarity,
    ConjugatePair,
}

impl SweepRelation {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepRelation::Ur1 => "ur1",
            SweepRelation::Ur2 => "ur2",
            SweepRelation::Complementarity => "complementarity",
            SweepRelation::ConjugatePair => "conjugate_pair",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PsibarChoice {
    Random,
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CvConfig {
    pub grid_points: usize,
    pub x_range: [f64; 2],
    pub sigma: f64,
    pub widths: Vec<f64>,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            grid_points: 256,
            x_range: [-16.0, 16.0],
            sigma: 1.0,
            widths: vec![0.5, 1.0, 2.0, 4.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum PointerFixture {
    /// `1 + sqrt(2)` from a qubit with `sigma_z`.
    Anomalous,
    /// Purely imaginary weak value `-i`.
    Imaginary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PointerConfig {
    pub g_ladder: Vec<f64>,
    pub meter_points: usize,
    pub meter_sigma: f64,
    pub fixture: PointerFixture,
}

impl Default for PointerConfig {
    fn default() -> Self {
        Self {
            g_ladder: vec![1e-2, 5e-3, 1e-3, 5e-4, 1e-4],
            meter_points: 256,
            meter_sigma: 1.0,
            fixture: PointerFixture::Anomalous,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub relations: Vec<SweepRelation>,
    pub dims: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub psibar: PsibarChoice,
    pub tolerances: Tolerances,
    pub hbar: f64,
    pub cv: CvConfig,
    pub pointer: PointerConfig,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            relations: vec![
                SweepRelation::Ur1,
                SweepRelation::Ur2,
                SweepRelation::Complementarity,
            ],
            dims: (2..=8).collect(),
            trials: 1000,
            seed: 20240601,
            psibar: PsibarChoice::Random,
            tolerances: Tolerances::DEFAULT,
            hbar: 1.0,
            cv: CvConfig::default(),
            pointer: PointerConfig::default(),
            format: OutputFormat::Json,
            out: None,
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.relations.is_empty() {
            return Err(invalid("relations", "at least one relation is required"));
        }
        if self.trials == 0 {
            return Err(invalid("trials", "must be at least 1"));
        }
        if self.dims.is_empty() {
            return Err(invalid("dims", "at least one dimension is required"));
        }
        for (i, &d) in self.dims.iter().enumerate() {
            if d < 2 {
                return Err(invalid(&format!("dims[{i}]"), format!("{d} is below 2")));
            }
            if self.relations.contains(&SweepRelation::ConjugatePair) && d < 4 {
                return Err(invalid(
                    &format!("dims[{i}]"),
                    format!("{d} is below 4, the smallest Fock truncation for conjugate_pair"),
                ));
            }
        }
        if let Some((field, value)) = self.tolerances.first_invalid() {
            let rule = if field == "relation" {
                "must be >= 0"
            } else {
                "must be positive"
            };
            return Err(invalid(
                &format!("tolerances.{field}"),
                format!("{value} {rule}"),
            ));
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return Err(invalid("hbar", "must be positive"));
        }
        let cv = &self.cv;
        if cv.grid_points < 16 || !cv.grid_points.is_power_of_two() {
            return Err(invalid("cv.grid_points", "must be a power of two >= 16"));
        }
        if !(cv.x_range[0].is_finite()
            && cv.x_range[1].is_finite()
            && cv.x_range[1] > cv.x_range[0])
        {
            return Err(invalid("cv.x_range", "must be a finite increasing pair"));
        }
        if !(cv.sigma.is_finite() && cv.sigma > 0.0) {
            return Err(invalid("cv.sigma", "must be positive"));
        }
        for (i, w) in cv.widths.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0) {
                return Err(invalid(&format!("cv.widths[{i}]"), "must be positive"));
            }
        }
        let p = &self.pointer;
        if p.g_ladder.is_empty() {
            return Err(invalid(
                "pointer.g_ladder",
                "at least one coupling is required",
            ));
        }
        for (i, g) in p.g_ladder.iter().enumerate() {
            if !(g.is_finite() && *g > 0.0) {
                return Err(invalid(
                    &format!("pointer.g_ladder[{i}]"),
                    "must be positive",
                ));
            }
        }
        if p.meter_points < 16 || !p.meter_points.is_power_of_two() {
            return Err(invalid(
                "pointer.meter_points",
                "must be a power of two >= 16",
            ));
        }
        if !(p.meter_sigma.is_finite() && p.meter_sigma > 0.0) {
            return Err(invalid("pointer.meter_sigma", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SweepConfig::default().validate().unwrap();
    }

    #[test]
    fn field_paths_in_errors() {
        let c = SweepConfig {
            dims: vec![2, 1],
            ..SweepConfig::default()
        };
        assert!(c.validate().unwrap_err().to_string().contains("dims[1]"));
        let mut c = SweepConfig::default();
        c.tolerances.overlap = 0.0;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("tolerances.overlap"));
        let c = SweepConfig {
            trials: 0,
            ..SweepConfig::default()
        };
        assert!(c.validate().unwrap_err().to_string().contains("trials"));
        let mut c = SweepConfig::default();
        c.tolerances.relation = 0.0;
        c.validate().unwrap();
    }

    #[test]
    fn partial_json() {
        let c: SweepConfig = serde_json::from_str(
            r#"{"trials": 5, "relations": ["ur1"], "cv": {"grid_points": 64}}"#,
        )
        .unwrap();
        assert_eq!(c.trials, 5);
        assert_eq!(c.cv.grid_points, 64);
        assert_eq!(c.cv.sigma, 1.0);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"trails": 5}"#).is_err());
    }
}

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::checks::{Expectation, Suite};
use super::config::ReportFormat;
use crate::error::{Error, Result};
use crate::geometry::ModelFlags;
use crate::spinor::Spectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub suite: Suite,
    pub anchor: String,
    /// Absent when the check was skipped or errored.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub expectation: Expectation,
    pub status: Status,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlagsRecord {
    pub symplectic: bool,
    pub torsion_free: bool,
    pub preserves_j: bool,
    pub minimal: bool,
    pub fedosov: bool,
    pub kahler: bool,
    pub fiber_only: bool,
    pub leaf_dim: usize,
    pub chsc_h: Option<f64>,
}

impl From<ModelFlags> for FlagsRecord {
    fn from(f: ModelFlags) -> Self {
        FlagsRecord {
            symplectic: f.symplectic,
            torsion_free: f.torsion_free,
            preserves_j: f.preserves_j,
            minimal: f.minimal,
            fedosov: f.fedosov,
            kahler: f.kahler,
            fiber_only: f.fiber_only,
            leaf_dim: f.leaf_dim,
            chsc_h: f.chsc_h,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub model: String,
    pub flags: FlagsRecord,
    pub n: usize,
    pub level: usize,
    pub modes: i32,
    pub seed: u64,
    pub model_seed: u64,
    pub tol_scale: f64,
    pub library_version: String,
    /// Largest aliasing energy any check reported.
    pub max_aliasing: f64,
    /// Quadrature error of the leaf density coefficients.
    pub density_quadrature_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRecord {
    pub check: String,
    pub spectrum: Spectrum,
}

/// Wall-clock data; not covered by the determinism contract.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    /// Seconds since the Unix epoch at the start of the run.
    pub started_unix: u64,
    pub total_seconds: f64,
    pub check_seconds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub metadata: Metadata,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub spectra: Vec<SpectrumRecord>,
    pub timing: Timing,
}

impl VerificationReport {
    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// The report with its timing cleared, the part that must be
    /// reproducible.
    pub fn without_timing(&self) -> VerificationReport {
        VerificationReport { timing: Timing::default(), ..self.clone() }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Config(e.to_string()))
    }

    /// One table row per executed check.
    pub fn to_markdown(&self) -> String {
        let m = &self.metadata;
        let mut out = String::new();
        let _ = writeln!(out, "# Verification report: {}\n", m.model);
        let _ = writeln!(
            out,
            "n = {}, L = {}, K = {}, seed = {}, tol_scale = {}, version {}\n",
            m.n, m.level, m.modes, m.seed, m.tol_scale, m.library_version
        );
        let _ = writeln!(
            out,
            "Overall: **{}** ({} pass, {} fail, {} skipped)\n",
            self.status.as_str(),
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skipped)
        );
        out.push_str("| check | suite | formula | residual | tolerance | status | note |\n");
        out.push_str("|---|---|---|---|---|---|---|\n");
        for c in &self.checks {
            let residual = c.residual.map_or("–".to_string(), |r| format!("{r:.3e}"));
            let bound = match c.expectation {
                Expectation::AtMost => format!("≤ {:.1e}", c.tolerance),
                Expectation::AtLeast => format!("≥ {:.1e}", c.tolerance),
            };
            let _ = writeln!(
                out,
                "| {} | {} | {} | {} | {} | {} | {} |",
                c.name,
                c.suite.as_str(),
                escape(&c.anchor),
                residual,
                bound,
                c.status.as_str(),
                escape(c.note.as_deref().unwrap_or(""))
            );
        }
        out
    }

    /// Eigenvalue rows `check,operator,index,eigenvalue,mode_norm_sq,level`,
    /// without a header, one per eigenvalue.
    pub fn spectra_csv(&self) -> Result<String> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        for rec in &self.spectra {
            for (i, e) in rec.spectrum.entries.iter().enumerate() {
                w.write_record([
                    rec.check.clone(),
                    rec.spectrum.operator.as_str().to_string(),
                    i.to_string(),
                    format!("{:?}", e.value),
                    e.mode_norm_sq.to_string(),
                    e.level.to_string(),
                ])
                .map_err(|e| Error::Numerical(e.to_string()))?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Numerical(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Numerical(e.to_string()))
    }

    pub fn render(&self, format: ReportFormat) -> Result<String> {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Markdown => Ok(self.to_markdown()),
        }
    }

    pub fn write(&self, path: &Path, format: ReportFormat) -> Result<()> {
        write_file(path, &self.render(format)?)
    }

    pub fn write_spectra_csv(&self, path: &Path) -> Result<()> {
        write_file(path, &self.spectra_csv()?)
    }
}

fn escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })
}

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{build_model, FoliationModel, Mode, ModelSpec};
use crate::Complex64;

/// Output format of the main report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Json,
    Markdown,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(ReportFormat::Json),
            "markdown" | "md" => Ok(ReportFormat::Markdown),
            other => Err(Error::Config(format!("unknown report format `{other}`"))),
        }
    }
}

/// One Fourier coefficient `value·e^{2πi k·x}` of the warp function; the
/// conjugate partner at `−k` is implied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Coefficient {
    pub k: Vec<i32>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub format: ReportFormat,
    pub spectra_csv: Option<PathBuf>,
}

/// Everything a run depends on. Random perturbations of the Fedosov and
/// torsion models are drawn from `seed` unless `model_seed` is given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteConfig {
    pub model: String,
    pub n: usize,
    /// Fiber truncation level `L`.
    pub level: usize,
    /// Fourier cutoff `K`.
    pub modes: i32,
    pub seed: u64,
    pub model_seed: Option<u64>,
    pub tol_scale: f64,
    /// Holomorphic sectional curvature of the fiber-only model.
    pub h: f64,
    /// Perturbation size; the model's default when absent.
    pub amplitude: Option<f64>,
    /// Explicit warp coefficients for the warped model.
    pub warp: Vec<Coefficient>,
    /// Replace the connection by its `J`-compatible modification.
    pub j_compatible: bool,
    /// Checks to run; empty means all.
    pub checks: Vec<String>,
    pub tolerances: BTreeMap<String, f64>,
    pub output: OutputConfig,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            model: "flat-kahler-torus".into(),
            n: 1,
            level: 8,
            modes: 2,
            seed: 0,
            model_seed: None,
            tol_scale: 1.0,
            h: 0.0,
            amplitude: None,
            warp: Vec::new(),
            j_compatible: false,
            checks: Vec::new(),
            tolerances: BTreeMap::new(),
            output: OutputConfig::default(),
        }
    }
}

/// Catalog names, in canonical spelling.
pub const MODEL_NAMES: [&str; 6] = [
    "flat-kahler-torus",
    "heisenberg-flow",
    "warped-non-taut",
    "symmetric-perturbed-fedosov",
    "torsion-perturbed-symplectic",
    "chsc-fiber",
];

fn canonical_model(name: &str) -> Option<&'static str> {
    let squash = |s: &str| s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
    let key = squash(name);
    MODEL_NAMES.into_iter().find(|m| squash(m) == key)
}

impl SuiteConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: SuiteConfig = toml::from_str(s).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if canonical_model(&self.model).is_none() {
            return Err(Error::Config(format!(
                "unknown model `{}`; expected one of {}",
                self.model,
                MODEL_NAMES.join(", ")
            )));
        }
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(Error::Config(format!("tol_scale must be positive, got {}", self.tol_scale)));
        }
        for (name, tol) in &self.tolerances {
            if !(tol.is_finite() && *tol > 0.0) {
                return Err(Error::Config(format!("tolerance for `{name}` must be positive")));
            }
        }
        Ok(())
    }

    /// Canonical model name.
    pub fn model_name(&self) -> Result<&'static str> {
        canonical_model(&self.model).ok_or_else(|| Error::Config(format!("unknown model `{}`", self.model)))
    }

    pub fn model_spec(&self) -> Result<ModelSpec> {
        let n = self.n;
        let k = self.modes;
        let mut rng = ChaCha8Rng::seed_from_u64(self.model_seed.unwrap_or(self.seed));
        let spec = match self.model_name()? {
            "flat-kahler-torus" => ModelSpec::FlatKahlerTorus { n, cutoff: k },
            "heisenberg-flow" => {
                if n != 1 {
                    return Err(Error::Config("heisenberg-flow has n = 1".into()));
                }
                ModelSpec::HeisenbergFlow { cutoff: k }
            }
            "warped-non-taut" => {
                if self.warp.is_empty() {
                    ModelSpec::warped_cosine(n, k, self.amplitude.unwrap_or(0.3))
                } else {
                    let warp = self
                        .warp
                        .iter()
                        .map(|c| (Mode::new(c.k.clone()), Complex64::new(c.re, c.im)))
                        .collect();
                    ModelSpec::WarpedNonTaut { n, cutoff: k, warp }
                }
            }
            "symmetric-perturbed-fedosov" => {
                ModelSpec::random_symmetric_fedosov(n, k, self.amplitude.unwrap_or(0.05), &mut rng)
            }
            "torsion-perturbed-symplectic" => {
                ModelSpec::random_torsion(n, k, self.amplitude.unwrap_or(0.05), &mut rng)
            }
            "chsc-fiber" => ModelSpec::ChscFiber { n, h: self.h },
            _ => unreachable!("canonical names are exhaustive"),
        };
        Ok(spec)
    }

    pub fn build_model(&self) -> Result<FoliationModel> {
        let model = build_model(&self.model_spec()?)?;
        if self.j_compatible { model.with_j_compatible_connection() } else { Ok(model) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip() {
        let mut cfg = SuiteConfig { model: "warped-non-taut".into(), ..Default::default() };
        cfg.warp.push(Coefficient { k: vec![1, 0], re: 0.1, im: 0.0 });
        cfg.tolerances.insert("dirac_self_adjoint".into(), 1e-9);
        cfg.output.spectra_csv = Some("s.csv".into());
        let text = cfg.to_toml_string().unwrap();
        assert_eq!(SuiteConfig::from_toml_str(&text).unwrap(), cfg);
    }

    #[test]
    fn model_names_are_forgiving() {
        assert_eq!(canonical_model("FlatKahlerTorus"), Some("flat-kahler-torus"));
        assert_eq!(canonical_model("chsc_fiber"), Some("chsc-fiber"));
        assert_eq!(canonical_model("sphere"), None);
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(SuiteConfig::from_toml_str("colour = 3").is_err());
        assert!(SuiteConfig::from_toml_str("model = \"torus\"").is_err());
    }
}

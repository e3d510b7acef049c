//! Optional TOML configuration. One table per subcommand, keys spelled like
//! the long flags; unknown keys are rejected. Flags override file values.
//!
//! ```toml
//! [symmetric]
//! r-max = 3.0
//! steps = 301
//!
//! [asym-tw]
//! coefficients = "paper-literal"
//! find-window = true
//!
//! [cavity]
//! sweep-pump = "0.1:0.98:45"
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfigFile {
    #[serde(default)]
    pub symmetric: SymmetricSection,
    #[serde(default)]
    pub asym_tw: AsymSection,
    #[serde(default)]
    pub cavity: CavitySection,
    #[serde(default)]
    pub plot: PlotSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SymmetricSection {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub steps: Option<usize>,
    pub mu: Option<f64>,
    pub nu: Option<f64>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct AsymSection {
    pub kappa_ratio: Option<f64>,
    pub zt_min: Option<f64>,
    pub zt_max: Option<f64>,
    pub steps: Option<usize>,
    pub coefficients: Option<String>,
    pub find_window: Option<bool>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CavitySection {
    pub kappa_ratio: Option<f64>,
    pub eps_frac: Option<f64>,
    pub omega_min: Option<f64>,
    pub omega_max: Option<f64>,
    pub steps: Option<usize>,
    pub sweep_pump: Option<String>,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PlotSection {
    pub columns: Option<Vec<String>>,
    pub x: Option<String>,
    pub title: Option<String>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Loads `path` if given, else the empty configuration.
    pub fn load_optional(path: Option<&Path>) -> Result<Self, CliError> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

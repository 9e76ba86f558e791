//! Config-file defaults merged under command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use colltherm::{validate_state, AncillaPrep, ComplexMatrix, C64};
use serde::Deserialize;

use crate::axis::AxisSpec;

/// Keys accepted in a `--config` file. Axes may be given as numbers or
/// as `min:max:count[:log]` strings.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub temperature: Option<f64>,
    pub omega: Option<f64>,
    pub gamma_tau_se: Option<toml::Value>,
    pub g_tau_sa: Option<toml::Value>,
    pub prep: Option<String>,
    pub n_max: Option<usize>,
    pub threads: Option<usize>,
    pub max_ancillas: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

pub fn axis_from_value(key: &str, value: &toml::Value) -> Result<AxisSpec, String> {
    match value {
        toml::Value::Float(v) => Ok(AxisSpec::Fixed(*v)),
        toml::Value::Integer(v) => Ok(AxisSpec::Fixed(*v as f64)),
        toml::Value::String(s) => s.parse().map_err(|e| format!("config key `{key}`: {e}")),
        other => Err(format!(
            "config key `{key}` must be a number or axis string, got {other}"
        )),
    }
}

#[derive(Deserialize)]
struct MatrixFile {
    re: [[f64; 2]; 2],
    #[serde(default)]
    im: [[f64; 2]; 2],
}

/// One preparation: `g`, `e`, `plus`, or `custom:<file.json>` holding
/// `{"re": [[..],[..]], "im": [[..],[..]]}`.
pub fn parse_prep(s: &str) -> Result<AncillaPrep, String> {
    let Some(path) = s.trim().strip_prefix("custom:") else {
        return s.parse().map_err(|e: colltherm::ModelError| e.to_string());
    };
    let path = PathBuf::from(path);
    let text = fs::read_to_string(&path)
        .map_err(|e| format!("cannot read custom state {}: {e}", path.display()))?;
    let m: MatrixFile = serde_json::from_str(&text)
        .map_err(|e| format!("invalid custom state {}: {e}", path.display()))?;
    let mat = ComplexMatrix::from_fn(2, |i, j| C64::new(m.re[i][j], m.im[i][j]));
    let rho = validate_state(&mat, 1e-10).map_err(|e| format!("custom state: {e}"))?;
    AncillaPrep::custom(rho).map_err(|e| e.to_string())
}

/// Comma-separated preparations.
pub fn parse_prep_list(s: &str) -> Result<Vec<AncillaPrep>, String> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_prep)
        .collect()
}

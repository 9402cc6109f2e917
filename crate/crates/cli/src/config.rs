use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const KINDS: [&str; 6] = ["hopfion", "dyon", "beltrami", "torus", "clebsch", "from-file"];

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeSpec {
    pub k: [i64; 3],
    #[serde(default)]
    pub helicity: Option<String>,
    #[serde(default)]
    pub amplitude: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mirror: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[i64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub helicity: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<Vec<ModeSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iota: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

impl FieldSpec {
    pub fn kind(kind: &str) -> Self {
        Self {
            kind: kind.to_string(),
            scale: None,
            mirror: None,
            k: None,
            helicity: None,
            amplitude: None,
            modes: None,
            p: None,
            q: None,
            iota: None,
            pairs: None,
            path: None,
        }
    }

    fn present(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        let mut mark = |set: bool, name: &'static str| {
            if set {
                v.push(name);
            }
        };
        mark(self.scale.is_some(), "scale");
        mark(self.mirror.is_some(), "mirror");
        mark(self.k.is_some(), "k");
        mark(self.helicity.is_some(), "helicity");
        mark(self.amplitude.is_some(), "amplitude");
        mark(self.modes.is_some(), "modes");
        mark(self.p.is_some(), "p");
        mark(self.q.is_some(), "q");
        mark(self.iota.is_some(), "iota");
        mark(self.pairs.is_some(), "pairs");
        mark(self.path.is_some(), "path");
        v
    }

    /// Rejects unknown kinds and parameters that do not apply to the kind.
    pub fn validate(&self) -> Result<(), CliError> {
        let allowed: &[&str] = match self.kind.as_str() {
            "hopfion" => &["scale", "mirror"],
            "dyon" => &["scale"],
            "beltrami" => &["k", "helicity", "amplitude", "modes"],
            "torus" => &["p", "q", "iota"],
            "clebsch" => &["scale", "pairs"],
            "from-file" => &["path"],
            other => {
                return Err(CliError::usage(format!("unknown field kind {other:?}; valid kinds are: {}", KINDS.join(", "))));
            }
        };
        for name in self.present() {
            if !allowed.contains(&name) {
                return Err(CliError::usage(format!(
                    "parameter {name:?} does not apply to field kind {:?} (accepted: {})",
                    self.kind,
                    allowed.join(", ")
                )));
            }
        }
        if let Some(s) = self.scale {
            if !(s > 0.0) {
                return Err(CliError::usage(format!("scale must be positive, got {s}")));
            }
        }
        if self.kind == "from-file" && self.path.is_none() {
            return Err(CliError::usage("field kind \"from-file\" needs a path"));
        }
        if self.kind == "beltrami" && self.k.is_some() && self.modes.is_some() {
            return Err(CliError::usage("give either k or modes for a beltrami field, not both"));
        }
        if self.kind == "torus" && self.iota.is_some() && (self.p.is_some() || self.q.is_some()) {
            return Err(CliError::usage("give either p and q or iota for a torus field, not both"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Grid,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "grid" => Ok(Format::Grid),
            _ => Err(format!("unknown format {s:?}; expected csv, json or grid")),
        }
    }
}

/// The config document. Every level rejects unknown keys.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub command: Option<String>,
    #[serde(default)]
    pub field: Option<FieldSpec>,
    #[serde(default)]
    pub grid: Option<[usize; 3]>,
    #[serde(default, rename = "box")]
    pub box_lengths: Option<[f64; 3]>,
    #[serde(default)]
    pub seeds: Option<Vec<[f64; 3]>>,
    #[serde(default)]
    pub tolerances: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub gates: Option<Vec<String>>,
    #[serde(default)]
    pub max_iters: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: Option<Format>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
    }
}

pub const TOLERANCE_NAMES: [&str; 9] = ["null", "divergence", "trace", "closure", "max_arc", "step", "relax", "ratio", "force_free"];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tolerances {
    /// Null-field gate on the normalized residuals.
    pub null: f64,
    /// Relative divergence admitted by the inverse curl (default 0.5) and by relaxation
    /// (default 1e-8).
    pub divergence: Option<f64>,
    /// Field-line integrator tolerance per unit arc length.
    pub trace: f64,
    pub closure: f64,
    /// Defaults to 64 box diameters.
    pub max_arc: Option<f64>,
    /// Largest field-line step.
    pub step: f64,
    pub relax: f64,
    /// Gate on `|E/|H| - lambda_1| / lambda_1` after relaxation.
    pub ratio: f64,
    pub force_free: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            null: 1e-10,
            divergence: None,
            trace: 1e-9,
            closure: 1e-6,
            max_arc: None,
            step: 0.1,
            relax: 1e-10,
            ratio: 1e-6,
            force_free: 1e-10,
        }
    }
}

impl Tolerances {
    pub fn helicity_divergence(&self) -> f64 {
        self.divergence.unwrap_or(0.5)
    }

    pub fn relax_divergence(&self) -> f64 {
        self.divergence.unwrap_or(1e-8)
    }

    pub fn set(&mut self, name: &str, value: f64) -> Result<(), CliError> {
        if !(value > 0.0) || !value.is_finite() {
            return Err(CliError::usage(format!("tolerance {name} must be positive and finite, got {value}")));
        }
        match name {
            "null" => self.null = value,
            "divergence" => self.divergence = Some(value),
            "trace" => self.trace = value,
            "closure" => self.closure = value,
            "max_arc" => self.max_arc = Some(value),
            "step" => self.step = value,
            "relax" => self.relax = value,
            "ratio" => self.ratio = value,
            "force_free" => self.force_free = value,
            _ => {
                return Err(CliError::usage(format!("unknown tolerance {name:?}; valid names are: {}", TOLERANCE_NAMES.join(", "))));
            }
        }
        Ok(())
    }
}

pub const GATES: [&str; 3] = ["null", "arnold", "force_free"];

/// Fully resolved run settings: config file first, command-line flags on top.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub field: FieldSpec,
    pub grid: [usize; 3],
    pub box_lengths: Option<[f64; 3]>,
    pub seeds: Vec<[f64; 3]>,
    pub tolerances: Tolerances,
    pub gates: Vec<String>,
    pub max_iters: usize,
    pub out: PathBuf,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub grid: Option<[usize; 3]>,
    pub box_lengths: Option<[f64; 3]>,
    pub seeds: Vec<[f64; 3]>,
    pub tolerances: Vec<(String, f64)>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: &str, file: ConfigFile, flags: Overrides) -> Result<Self, CliError> {
        if let Some(c) = &file.command {
            if c != command {
                return Err(CliError::usage(format!("config is for command {c:?} but {command:?} was invoked")));
            }
        }
        let mut field = file.field.unwrap_or_else(|| FieldSpec::kind("hopfion"));
        if let Some(path) = flags.input {
            field = FieldSpec { path: Some(path), ..FieldSpec::kind("from-file") };
        }
        field.validate()?;
        let grid = flags.grid.or(file.grid).unwrap_or([32; 3]);
        if grid.iter().any(|&n| n < 2) {
            return Err(CliError::usage(format!("grid counts must be at least 2, got {grid:?}")));
        }
        let box_lengths = flags.box_lengths.or(file.box_lengths);
        if let Some(b) = box_lengths {
            if b.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
                return Err(CliError::usage(format!("box lengths must be positive, got {b:?}")));
            }
        }
        let seeds = if flags.seeds.is_empty() { file.seeds.unwrap_or_default() } else { flags.seeds };
        let mut tolerances = Tolerances::default();
        for (k, v) in file.tolerances.unwrap_or_default() {
            tolerances.set(&k, v)?;
        }
        for (k, v) in flags.tolerances {
            tolerances.set(&k, v)?;
        }
        let gates = file.gates.unwrap_or_else(|| vec!["null".into(), "arnold".into()]);
        for g in &gates {
            if !GATES.contains(&g.as_str()) {
                return Err(CliError::usage(format!("unknown gate {g:?}; valid gates are: {}", GATES.join(", "))));
            }
        }
        let max_iters = file.max_iters.unwrap_or(2000);
        if max_iters == 0 {
            return Err(CliError::usage("max_iters must be positive"));
        }
        Ok(Self {
            field,
            grid,
            box_lengths,
            seeds,
            tolerances,
            gates,
            max_iters,
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            format: flags.format.or(file.format),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_parsing() {
        let ok: ConfigFile = serde_json::from_str(r#"{"field": {"kind": "torus", "p": 2, "q": 3}, "grid": [8, 8, 8]}"#).unwrap();
        assert_eq!(ok.field.unwrap().p, Some(2));
        assert!(serde_json::from_str::<ConfigFile>(r#"{"grdi": [8, 8, 8]}"#).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"field": {"kind": "hopfion", "scal": 1}}"#).is_err());
        assert!(serde_json::from_str::<ConfigFile>(r#"{"tolerances": {"null": "x"}}"#).is_err());
    }

    #[test]
    fn flags_override_and_validation() {
        let file = ConfigFile { grid: Some([8; 3]), tolerances: Some([("null".to_string(), 1e-6)].into()), ..Default::default() };
        let flags = Overrides { grid: Some([4; 3]), tolerances: vec![("trace".into(), 1e-7)], ..Default::default() };
        let c = RunConfig::resolve("build", file, flags).unwrap();
        assert_eq!(c.grid, [4; 3]);
        assert_eq!((c.tolerances.null, c.tolerances.trace), (1e-6, 1e-7));
        let bad = |f: ConfigFile| RunConfig::resolve("build", f, Overrides::default()).unwrap_err().exit_code();
        assert_eq!(bad(ConfigFile { field: Some(FieldSpec::kind("vortexx")), ..Default::default() }), 2);
        assert_eq!(bad(ConfigFile { tolerances: Some([("nul".to_string(), 1.0)].into()), ..Default::default() }), 2);
        assert_eq!(bad(ConfigFile { tolerances: Some([("null".to_string(), -1.0)].into()), ..Default::default() }), 2);
        assert_eq!(bad(ConfigFile { command: Some("trace".into()), ..Default::default() }), 2);
        let mut spec = FieldSpec::kind("hopfion");
        spec.p = Some(2);
        assert!(spec.validate().is_err());
        let err = FieldSpec::kind("vortexx").validate().unwrap_err().to_string();
        assert!(KINDS.iter().all(|k| err.contains(k)));
    }
}

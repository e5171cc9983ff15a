//! TOML experiment configuration with `key=value` overrides and schema checks.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::{ExternalPotential, Mode, ModeSet};
use crate::hilbert::{Boundary, GridSpec, PhysicalConstants};
use crate::semiclassical::ScfConfig;

/// Every runnable experiment with a one-line description.
pub const EXPERIMENTS: [(&str, &str); 10] = [
    ("gauge-equivalence", "lowest eigenvalues of the velocity and length gauges under Fock doubling"),
    ("unboundedness-scan", "variational mollifier energy as the trial state moves away along kappa"),
    ("slater-scan", "N-electron mollifier scan; slope scaling and Coulomb shell-theorem check"),
    ("depolarization", "normal-mode frequencies against sqrt(omega^2 + omega_p^2), optional grid diagonalization"),
    ("maxwell-eom", "field equations of motion with and without the dipole self-energy"),
    ("box-instability", "ground energy and edge localization under box doubling"),
    ("model-zoo", "Rabi, Jaynes-Cummings and Dicke models from the two-level reduction"),
    ("stark", "self-consistent static polarizability against sum-over-states theory"),
    ("field-energy-demo", "squeezing content of the field energy built from dipole-limit fields"),
    ("translation-check", "polaritonic translation as a symmetry of the length-gauge Hamiltonian"),
];

pub fn experiment_names() -> Vec<&'static str> {
    EXPERIMENTS.iter().map(|e| e.0).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub constants: PhysicalConstants,
    #[serde(default)]
    pub modes: Vec<Mode>,
    #[serde(default)]
    pub field: FieldSection,
    #[serde(default = "zero_potential")]
    pub potential: ExternalPotential,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub fock: FockSection,
    #[serde(default)]
    pub flags: Flags,
    #[serde(default)]
    pub scan: ScanSection,
    #[serde(default)]
    pub scf: ScfConfig,
}

fn zero_potential() -> ExternalPotential {
    ExternalPotential::Zero
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub name: String,
    /// CSV destination; defaults to `<name>.csv` in the working directory.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// Quantization volume L³ (bohr³). When set, mode couplings must match it.
    #[serde(default)]
    pub quantization_volume: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub half_width: f64,
    pub spacing: f64,
    pub stencil_order: usize,
    pub boundary: Boundary,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            half_width: 10.0,
            spacing: 0.05,
            stencil_order: 4,
            boundary: Boundary::Dirichlet,
        }
    }
}

impl GridSection {
    /// Grid over [−half_width, half_width] at the configured spacing.
    pub fn build(&self) -> Result<GridSpec> {
        self.build_with_half_width(self.half_width)
    }

    pub fn build_with_half_width(&self, half_width: f64) -> Result<GridSpec> {
        if !(self.spacing > 0.0) || !(half_width > 0.0) {
            return Err(Error::Config("grid spacing and half_width must be positive".into()));
        }
        match self.boundary {
            Boundary::Dirichlet => GridSpec::centered_dirichlet(half_width, self.spacing, self.stencil_order),
            Boundary::Periodic => {
                let n = (2.0 * half_width / self.spacing).round() as usize;
                GridSpec::new(-half_width, half_width, n, Boundary::Periodic, self.stencil_order)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FockSection {
    pub n_max: usize,
}

impl Default for FockSection {
    fn default() -> Self {
        Self { n_max: 40 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// Keep the dipole self-energy where an experiment offers the choice.
    #[serde(default)]
    pub include_dip: bool,
    /// Run the grid diagonalization in `depolarization`.
    #[serde(default)]
    pub exact_diagonalization: bool,
}

/// Scan axes and experiment knobs. Each experiment reads the fields it needs
/// and documents its defaults in the README.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// The primary axis: mollifier offsets, box lengths, fields or coupling scales.
    #[serde(default)]
    pub values: Vec<f64>,
    /// Fock truncations for `gauge-equivalence`.
    #[serde(default)]
    pub n_max: Vec<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "one")]
    pub n_electrons: usize,
    #[serde(default = "one")]
    pub n_atoms: usize,
    /// Classical field E for the semi-classical box scan.
    #[serde(default)]
    pub field: f64,
    /// Center spacing of the Slater mollifiers.
    #[serde(default = "default_slater_spacing")]
    pub spacing: f64,
    /// Translation distance in grid points for `translation-check`.
    #[serde(default = "default_shift_sites")]
    pub shift_sites: isize,
}

fn default_k() -> usize {
    5
}
fn default_tol() -> f64 {
    1e-6
}
fn one() -> usize {
    1
}
fn default_slater_spacing() -> f64 {
    3.0
}
fn default_shift_sites() -> isize {
    10
}

impl Default for ScanSection {
    fn default() -> Self {
        Self {
            values: Vec::new(),
            n_max: Vec::new(),
            k: default_k(),
            tol: default_tol(),
            n_electrons: 1,
            n_atoms: 1,
            field: 0.0,
            spacing: default_slater_spacing(),
            shift_sites: default_shift_sites(),
        }
    }
}

/// One schema violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// Dotted key path, or `<file>` when the document itself is malformed.
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

impl ExperimentConfig {
    pub fn mode_set(&self) -> ModeSet {
        ModeSet {
            modes: self.modes.clone(),
            quantization_volume: self.field.quantization_volume,
        }
    }

    pub fn output_path(&self) -> PathBuf {
        self.experiment
            .output
            .clone()
            .unwrap_or_else(|| PathBuf::from(format!("{}.csv", self.experiment.name)))
    }

    /// Semantic checks on a syntactically valid config.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut push = |key: String, message: String| out.push(Diagnostic { key, line: None, message });
        let names = experiment_names();
        if !names.contains(&self.experiment.name.as_str()) {
            push(
                "experiment.name".into(),
                format!("unknown experiment '{}'; valid names: {}", self.experiment.name, names.join(", ")),
            );
        }
        if let Err(e) = self.constants.validate() {
            push("constants".into(), e.to_string());
        }
        for (i, m) in self.modes.iter().enumerate() {
            if !(m.omega > 0.0 && m.omega.is_finite()) {
                push(format!("modes[{i}].omega"), format!("mode {i}: omega must be positive, got {}", m.omega));
            }
            if !m.lambda.is_finite() {
                push(format!("modes[{i}].lambda"), format!("mode {i}: lambda must be finite"));
            }
            if m.epsilon_sign != 1.0 && m.epsilon_sign != -1.0 {
                push(
                    format!("modes[{i}].epsilon_sign"),
                    format!("mode {i}: epsilon_sign must be +1 or -1, got {}", m.epsilon_sign),
                );
            }
        }
        if let Some(v) = self.field.quantization_volume {
            if !(v > 0.0) {
                push("field.quantization_volume".into(), format!("must be positive, got {v}"));
            } else if out_of_volume(&self.mode_set(), &self.constants) {
                push(
                    "field.quantization_volume".into(),
                    "mode couplings disagree with the quantization volume".into(),
                );
            }
        }
        if let Err(e) = self.potential.validate() {
            push("potential".into(), e.to_string());
        }
        if let Err(e) = self.grid.build() {
            push("grid".into(), e.to_string());
        }
        if self.fock.n_max == 0 {
            push("fock.n_max".into(), "must be at least 1".into());
        }
        if let Err(e) = self.scf.validate() {
            push("scf".into(), e.to_string());
        }
        if self.scan.k == 0 {
            push("scan.k".into(), "must be at least 1".into());
        }
        if !(self.scan.tol > 0.0) {
            push("scan.tol".into(), format!("must be positive, got {}", self.scan.tol));
        }
        if self.scan.n_electrons == 0 {
            push("scan.n_electrons".into(), "must be at least 1".into());
        }
        if self.scan.n_atoms == 0 {
            push("scan.n_atoms".into(), "must be at least 1".into());
        }
        if self.scan.values.iter().any(|v| !v.is_finite()) {
            push("scan.values".into(), "entries must be finite".into());
        }
        if self.modes.is_empty() && names.contains(&self.experiment.name.as_str()) {
            push("modes".into(), "at least one [[modes]] entry is required".into());
        }
        let single = ["gauge-equivalence", "model-zoo", "field-energy-demo"];
        if single.contains(&self.experiment.name.as_str()) && self.modes.len() > 1 {
            push("modes".into(), format!("{} uses exactly one mode", self.experiment.name));
        }
        match self.experiment.name.as_str() {
            "stark" if !self.scan.values.is_empty() && !self.scan.values.contains(&0.0) => {
                push("scan.values".into(), "a Stark scan must include zero field".into());
            }
            "gauge-equivalence" if self.scan.n_max.iter().any(|&n| n == 0) => {
                push("scan.n_max".into(), "truncations must be at least 1".into());
            }
            "unboundedness-scan" | "slater-scan" if !self.scan.values.is_empty() && self.scan.values.len() < 2 => {
                push("scan.values".into(), "a scan needs at least two offsets".into());
            }
            "box-instability" if self.scan.values.iter().any(|&l| !(l > 0.0)) => {
                push("scan.values".into(), "box lengths must be positive".into());
            }
            _ => {}
        }
        out
    }
}

fn out_of_volume(modes: &ModeSet, consts: &PhysicalConstants) -> bool {
    consts.validate().is_ok() && modes.modes.iter().all(|m| m.omega > 0.0) && modes.validate(consts).is_err()
}

/// Applies `key=value` overrides to a parsed document. Keys are dotted paths;
/// a numeric segment indexes an array, as in `modes.0.lambda=0.2`. Values are
/// read as TOML and fall back to plain strings.
pub fn apply_overrides(doc: &mut toml::Table, overrides: &[String]) -> Result<()> {
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("override '{item}' is not of the form key=value")))?;
        let value = parse_value(raw.trim());
        let parts: Vec<&str> = key.trim().split('.').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(Error::Config(format!("override key '{key}' is malformed")));
        }
        set_path(doc, &parts, value).map_err(|m| Error::Config(format!("override '{key}': {m}")))?;
    }
    Ok(())
}

fn parse_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

fn set_path(table: &mut toml::Table, parts: &[&str], value: toml::Value) -> std::result::Result<(), String> {
    let (head, rest) = (parts[0], &parts[1..]);
    if rest.is_empty() {
        table.insert(head.into(), value);
        return Ok(());
    }
    let entry = table
        .entry(head.to_string())
        .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    set_value(entry, rest, value)
}

fn set_value(slot: &mut toml::Value, parts: &[&str], value: toml::Value) -> std::result::Result<(), String> {
    match slot {
        toml::Value::Table(t) => set_path(t, parts, value),
        toml::Value::Array(a) => {
            let idx: usize = parts[0]
                .parse()
                .map_err(|_| format!("'{}' is not an array index", parts[0]))?;
            let len = a.len();
            let target = a.get_mut(idx).ok_or_else(|| format!("index {idx} out of range (length {len})"))?;
            if parts.len() == 1 {
                *target = value;
                Ok(())
            } else {
                set_value(target, &parts[1..], value)
            }
        }
        _ => Err(format!("'{}' does not name a table or array", parts[0])),
    }
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Parses a config document and applies overrides. Syntax and schema errors
/// come back as diagnostics rather than an `Err`.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<std::result::Result<ExperimentConfig, Vec<Diagnostic>>> {
    let mut doc: toml::Table = match text.parse() {
        Ok(d) => d,
        Err(e) => {
            return Ok(Err(vec![Diagnostic {
                key: "<file>".into(),
                line: e.span().map(|s| line_of(text, s.start)),
                message: e.message().trim().to_string(),
            }]))
        }
    };
    apply_overrides(&mut doc, overrides)?;
    let rendered = toml::to_string(&doc).map_err(|e| Error::Config(e.to_string()))?;
    match toml::from_str::<ExperimentConfig>(&rendered) {
        Ok(cfg) => Ok(Ok(cfg)),
        Err(e) => {
            // report the line in the user's file when no overrides moved things
            let line = if overrides.is_empty() {
                match toml::from_str::<ExperimentConfig>(text) {
                    Err(orig) => orig.span().map(|s| line_of(text, s.start)),
                    Ok(_) => None,
                }
            } else {
                None
            };
            Ok(Err(vec![Diagnostic {
                key: "<schema>".into(),
                line,
                message: e.message().trim().to_string(),
            }]))
        }
    }
}

/// Reads, parses and checks a config file. Returns the config or the full
/// list of violations. Only an unreadable file is an `Err`.
pub fn load_config(path: &Path, overrides: &[String]) -> Result<std::result::Result<ExperimentConfig, Vec<Diagnostic>>> {
    let text = std::fs::read_to_string(path)?;
    Ok(match parse_config(&text, overrides)? {
        Ok(cfg) => {
            let diags = cfg.diagnostics();
            if diags.is_empty() {
                Ok(cfg)
            } else {
                Err(diags)
            }
        }
        Err(d) => Err(d),
    })
}

/// Schema violations for the file at `path`; empty when it is valid.
pub fn validate_config(path: &Path) -> Result<Vec<Diagnostic>> {
    Ok(match load_config(path, &[])? {
        Ok(_) => Vec::new(),
        Err(d) => d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[experiment]
name = "stark"

[[modes]]
omega = 1.0
lambda = 0.1
"#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let cfg = parse_config(BASE, &[]).unwrap().unwrap();
        assert_eq!(cfg.fock.n_max, 40);
        assert_eq!(cfg.potential, ExternalPotential::Zero);
        assert!(cfg.diagnostics().is_empty());
        assert_eq!(cfg.output_path(), PathBuf::from("stark.csv"));
    }

    #[test]
    fn unknown_keys_are_rejected_with_a_line() {
        let text = format!("{BASE}\n[grid]\nhalf_width = 5.0\nspacing = 0.1\nstencil_order = 4\nboundary = \"dirichlet\"\nbogus = 1\n");
        let d = parse_config(&text, &[]).unwrap().unwrap_err();
        assert!(d[0].message.contains("bogus"), "{:?}", d);
        assert_eq!(d[0].line, Some(14));
    }

    #[test]
    fn overrides_reach_nested_arrays() {
        let over = vec!["modes.0.lambda=0.3".to_string(), "scan.values=[0.0, 0.01]".to_string(), "experiment.output=out.csv".to_string()];
        let cfg = parse_config(BASE, &over).unwrap().unwrap();
        assert_eq!(cfg.modes[0].lambda, 0.3);
        assert_eq!(cfg.scan.values, vec![0.0, 0.01]);
        assert_eq!(cfg.output_path(), PathBuf::from("out.csv"));
        assert!(parse_config(BASE, &["modes.4.lambda=1".into()]).is_err());
        assert!(parse_config(BASE, &["novalue".into()]).is_err());
    }

    #[test]
    fn negative_omega_names_the_mode() {
        let cfg = parse_config(BASE, &["modes.0.omega=-1".into()]).unwrap().unwrap();
        let d = cfg.diagnostics();
        assert!(d.iter().any(|x| x.key == "modes[0].omega" && x.message.contains("mode 0")), "{d:?}");
    }

    #[test]
    fn unknown_experiment_lists_valid_names() {
        let cfg = parse_config(BASE, &["experiment.name=\"nope\"".into()]).unwrap().unwrap();
        let d = cfg.diagnostics();
        assert!(d[0].message.contains("gauge-equivalence") && d[0].message.contains("translation-check"));
    }
}

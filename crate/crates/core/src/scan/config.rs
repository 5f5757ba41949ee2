//! Run configuration: a TOML file with unknown keys rejected.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instanton::InstantonOptions;
use crate::rotor::{MoleculeParams, DEFAULT_JMAX};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "MoleculeParams::sro")]
    pub molecule: MoleculeParams,
    #[serde(default)]
    pub fields: FieldConfig,
    #[serde(default)]
    pub grids: BTreeMap<String, GridSpec>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stark: Option<StarkConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surfaces: Option<SurfacesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eff2d: Option<Eff2dConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instanton: Option<InstantonConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tables: Option<TablesConfig>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            molecule: MoleculeParams::sro(),
            fields: FieldConfig::default(),
            grids: BTreeMap::new(),
            output: OutputConfig::default(),
            stark: None,
            surfaces: None,
            eff2d: None,
            instanton: None,
            tables: None,
        }
    }
}

/// External fields in natural units: `β = dE/B`, `Δ` and `Ω` in `B/ħ`,
/// `ω⊥` in `B/ħ`, tensor shift `V₂` in `B`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_rabi: Option<f64>,
    #[serde(default)]
    pub q: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_perp: Option<f64>,
    #[serde(default)]
    pub v2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default = "linear")]
    pub spacing: Spacing,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

fn linear() -> Spacing {
    Spacing::Linear
}

impl GridSpec {
    pub fn linear(min: f64, max: f64, count: usize) -> Self {
        GridSpec {
            spacing: Spacing::Linear,
            min,
            max,
            count,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(format!("grids.{name}: {msg}")));
        if self.count == 0 {
            return bad("count must be at least 1".into());
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return bad("bounds must be finite".into());
        }
        if self.count > 1 && !(self.max > self.min) {
            return bad(format!("max={} must exceed min={}", self.max, self.min));
        }
        if self.spacing == Spacing::Log && !(self.min > 0.0) {
            return bad(format!("log spacing needs min > 0, got {}", self.min));
        }
        Ok(())
    }

    /// Grid values, strictly increasing.
    pub fn values(&self) -> Vec<f64> {
        let n = self.count;
        if n == 1 {
            return vec![self.min];
        }
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                match self.spacing {
                    Spacing::Linear => self.min + (self.max - self.min) * t,
                    Spacing::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * t).exp(),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; `--out` overrides it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarkConfig {
    #[serde(default = "grid_beta")]
    pub grid: String,
    #[serde(default = "jmax")]
    pub jmax: u32,
}

impl Default for StarkConfig {
    fn default() -> Self {
        StarkConfig {
            grid: grid_beta(),
            jmax: jmax(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceMode {
    ZeroField,
    Dc,
    Ac,
    DcAc,
    ReducedM0,
}

/// Length unit of the radial grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialUnit {
    RB,
    RC,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfacesConfig {
    pub mode: SurfaceMode,
    #[serde(default = "grid_r")]
    pub grid: String,
    /// Polar angle of the cut; ignored when `theta_grid` names a grid.
    #[serde(default = "half_pi")]
    pub theta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_grid: Option<String>,
    #[serde(default = "r_b")]
    pub r_unit: RadialUnit,
    #[serde(default = "jmax_single")]
    pub jmax_single: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eff2dMode {
    GaussianTrace,
    ZBands,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    Dc,
    DcAc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Eff2dConfig {
    pub mode: Eff2dMode,
    #[serde(default = "grid_rho")]
    pub grid: String,
    /// Field strengths swept in `gaussian_trace` mode; empty means `fields.beta`.
    #[serde(default)]
    pub betas: Vec<f64>,
    #[serde(default = "dc")]
    pub potential: PotentialKind,
    #[serde(default = "kmax")]
    pub kmax: usize,
    #[serde(default = "n_osc")]
    pub n_osc: usize,
    #[serde(default = "trace_nodes")]
    pub trace_nodes: usize,
    #[serde(default = "threshold")]
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalPoint {
    pub beta: f64,
    pub omega_perp_hz: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstantonConfig {
    #[serde(default = "grid_omega_ratio")]
    pub grid: String,
    #[serde(default)]
    pub solver: InstantonOptions,
    /// Molecule-specific suppression estimates; needs SI molecule parameters.
    #[serde(default)]
    pub physical: Vec<PhysicalPoint>,
}

impl Default for InstantonConfig {
    fn default() -> Self {
        InstantonConfig {
            grid: grid_omega_ratio(),
            solver: InstantonOptions::default(),
            physical: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablesConfig {
    /// Field strengths of the moment table.
    #[serde(default = "table_betas")]
    pub betas: Vec<f64>,
    /// Field strengths of the DC coefficient table.
    #[serde(default = "dc_betas")]
    pub dc_betas: Vec<f64>,
    #[serde(default = "half_pi")]
    pub theta: f64,
    /// Fit window in units of `r_B`.
    #[serde(default = "window")]
    pub window: [f64; 2],
}

impl Default for TablesConfig {
    fn default() -> Self {
        TablesConfig {
            betas: table_betas(),
            dc_betas: dc_betas(),
            theta: half_pi(),
            window: window(),
        }
    }
}

fn grid_beta() -> String {
    "beta".into()
}
fn grid_r() -> String {
    "r".into()
}
fn grid_rho() -> String {
    "rho".into()
}
fn grid_omega_ratio() -> String {
    "omega_ratio".into()
}
fn jmax() -> u32 {
    DEFAULT_JMAX
}
fn jmax_single() -> u32 {
    2
}
fn half_pi() -> f64 {
    FRAC_PI_2
}
fn r_b() -> RadialUnit {
    RadialUnit::RB
}
fn dc() -> PotentialKind {
    PotentialKind::Dc
}
fn kmax() -> usize {
    4
}
fn n_osc() -> usize {
    60
}
fn trace_nodes() -> usize {
    64
}
fn threshold() -> f64 {
    0.1
}
fn table_betas() -> Vec<f64> {
    vec![0.05, 0.1, 0.2]
}
fn dc_betas() -> Vec<f64> {
    vec![0.2]
}
fn window() -> [f64; 2] {
    [8.0, 25.0]
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Canonical TOML text; parsing it back gives an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.molecule
            .validate()
            .map_err(|e| Error::Config(format!("molecule: {e}")))?;
        let f = &self.fields;
        positive_opt("fields.beta", f.beta, true)?;
        positive_opt("fields.delta", f.delta, false)?;
        positive_opt("fields.omega_rabi", f.omega_rabi, true)?;
        positive_opt("fields.omega_perp", f.omega_perp, false)?;
        if f.q.abs() > 1 {
            return Err(Error::Config(format!(
                "fields.q: must be -1, 0 or 1, got {}",
                f.q
            )));
        }
        if !f.v2.is_finite() {
            return Err(Error::Config("fields.v2: must be finite".into()));
        }
        for (name, g) in &self.grids {
            g.validate(name)?;
        }
        if let Some(t) = &self.tables {
            if !(t.window[0] > 0.0 && t.window[1] > t.window[0]) {
                return Err(Error::Config(format!(
                    "tables.window: need 0 < lo < hi, got {:?}",
                    t.window
                )));
            }
            for (i, &b) in t.betas.iter().enumerate() {
                positive_opt(&format!("tables.betas[{i}]"), Some(b), true)?;
            }
            for (i, &b) in t.dc_betas.iter().enumerate() {
                positive_opt(&format!("tables.dc_betas[{i}]"), Some(b), false)?;
            }
        }
        if let Some(e) = &self.eff2d {
            for (i, &b) in e.betas.iter().enumerate() {
                positive_opt(&format!("eff2d.betas[{i}]"), Some(b), true)?;
            }
            if !(e.threshold > 0.0) {
                return Err(Error::Config("eff2d.threshold: must be positive".into()));
            }
        }
        if let Some(s) = &self.stark {
            if s.jmax < 2 {
                return Err(Error::Config(format!(
                    "stark.jmax: must be at least 2, got {}",
                    s.jmax
                )));
            }
        }
        if let Some(i) = &self.instanton {
            let o = &i.solver;
            if o.segments < 8 || o.angle_scan < 4 || !(o.r_max > 2.0) || !(o.tol > 0.0) {
                return Err(Error::Config(format!(
                    "instanton.solver: invalid options {o:?}"
                )));
            }
            for (k, p) in i.physical.iter().enumerate() {
                positive_opt(
                    &format!("instanton.physical[{k}].beta"),
                    Some(p.beta),
                    false,
                )?;
                positive_opt(
                    &format!("instanton.physical[{k}].omega_perp_hz"),
                    Some(p.omega_perp_hz),
                    false,
                )?;
            }
        }
        Ok(())
    }

    /// Values of grid `name`.
    pub fn grid(&self, name: &str) -> Result<Vec<f64>> {
        self.grids
            .get(name)
            .map(GridSpec::values)
            .ok_or_else(|| Error::Config(format!("grids.{name}: missing")))
    }

    pub fn require(&self, path: &str, v: Option<f64>) -> Result<f64> {
        v.ok_or_else(|| Error::Config(format!("{path}: required by this command")))
    }
}

fn positive_opt(path: &str, v: Option<f64>, allow_zero: bool) -> Result<()> {
    match v {
        Some(x) if !(x.is_finite() && (x > 0.0 || (allow_zero && x == 0.0))) => {
            Err(Error::Config(format!("{path}: must be positive, got {x}")))
        }
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_keys_with_path() {
        let e = RunConfig::from_toml("[fields]\nbeta = 0.1\nbta = 0.2\n").unwrap_err();
        assert!(e.to_string().contains("bta"), "{e}");
        let e = RunConfig::from_toml("[grids.r]\nmin = 2.0\nmax = 1.0\ncount = 3\n").unwrap_err();
        assert!(e.to_string().contains("grids.r"), "{e}");
    }

    #[test]
    fn log_grid_endpoints() {
        let g = GridSpec {
            spacing: Spacing::Log,
            min: 0.05,
            max: 3.0,
            count: 5,
        };
        let v = g.values();
        assert_eq!(v.len(), 5);
        assert!((v[0] - 0.05).abs() < 1e-15 && (v[4] - 3.0).abs() < 1e-14);
        assert!(v.windows(2).all(|w| w[1] > w[0]));
    }
}

//! Run configuration: a TOML document plus dotted `key=value` overrides.
//!
//! ```toml
//! [geometry]
//! kind = "annulus"
//! R = 2.0
//!
//! [cutoff]
//! k_list = [5.0, 10.0, 20.0]
//!
//! [experiment]
//! solution = { kind = "low_band", band = 0.5 }
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientModel, Profile, RadialCoefficients, StripCoefficients};
use crate::continuation::{ContinuationOptions, ModePolicy, Regularization};
use crate::error::{Error, Result};
use crate::experiments::{ReportFormat, SolutionKind, StabilitySetup};
use crate::geometry::{AnnulusGeometry, Geometry, StripGeometry};
use crate::operator_b::OperatorBOptions;
use crate::spectral::SpectralCutoff;

pub const STRIP_DEFAULT_N_TANGENTIAL: usize = 128;
pub const STRIP_DEFAULT_N_DEPTH: usize = 129;

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Strip,
    #[default]
    Annulus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometrySection {
    pub kind: GeometryKind,
    /// Strip period.
    #[serde(rename = "L")]
    pub period: f64,
    /// Annulus outer radius.
    #[serde(rename = "R")]
    pub outer_radius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_tangential: Option<usize>,
    /// Strip depth nodes, or annulus radial nodes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_depth: Option<usize>,
    pub sponge_width: f64,
}

impl Default for GeometrySection {
    fn default() -> Self {
        Self {
            kind: GeometryKind::Annulus,
            period: 2.0 * PI,
            outer_radius: 2.0,
            n_tangential: None,
            n_depth: None,
            sponge_width: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    #[default]
    Laplacian,
    RadialTable,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoefficientsSection {
    pub preset: Preset,
    /// Two-column `r value` file giving `c(r)` for `radial_table`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CutoffSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_list: Option<Vec<f64>>,
    /// Defaults to the coefficient model's bound.
    #[serde(rename = "E", skip_serializing_if = "Option::is_none")]
    pub e_bound: Option<f64>,
    pub eps: f64,
}

impl Default for CutoffSection {
    fn default() -> Self {
        Self {
            k: None,
            k_list: None,
            e_bound: None,
            eps: 0.19,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub solution: SolutionKind,
    pub delta: f64,
    pub seed: u64,
    pub theta: f64,
    pub mode_policy: ModePolicy,
    pub regularization: Regularization,
    pub step_check_tol: f64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            solution: SolutionKind::LowBand { band: 0.5 },
            delta: 1e-3,
            seed: 1,
            theta: 0.1,
            mode_policy: ModePolicy::LowOnly,
            regularization: Regularization::None,
            step_check_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OperatorBSection {
    pub m_max: usize,
    pub resonance_tol: f64,
    pub step_check_tol: f64,
    pub theta_plateau: f64,
}

impl Default for OperatorBSection {
    fn default() -> Self {
        let o = OperatorBOptions::default();
        Self {
            m_max: o.m_max,
            resonance_tol: o.resonance_tol,
            step_check_tol: o.step_check_tol,
            theta_plateau: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JohnSection {
    pub mu: f64,
    pub mu_kept: f64,
}

impl Default for JohnSection {
    fn default() -> Self {
        Self { mu: 2.0, mu_kept: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NormsSection {
    /// Field dump in `i_tangential,j_depth,re,im` form.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub dir: PathBuf,
    pub formats: Vec<ReportFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("out"),
            formats: vec![ReportFormat::Csv, ReportFormat::Svg],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    pub geometry: GeometrySection,
    pub coefficients: CoefficientsSection,
    pub cutoff: CutoffSection,
    pub experiment: ExperimentSection,
    pub operator_b: OperatorBSection,
    pub john: JohnSection,
    pub norms: NormsSection,
    pub output: OutputSection,
}

fn parse_override_value(raw: &str) -> toml::Value {
    let raw = raw.trim();
    toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()))
}

/// Sets `table[a][b]...[z] = value` for a dotted key, creating tables on the way.
fn set_dotted(table: &mut toml::Table, key: &str, value: toml::Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').map(str::trim).collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(config_err(key, "malformed key"));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = match entry {
            toml::Value::Table(t) => t,
            _ => return Err(config_err(key, format!("`{p}` is not a table"))),
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl RunConfig {
    /// Parses `text` (empty for all defaults), applies `KEY=VALUE` overrides,
    /// fills defaults and validates.
    pub fn load(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
            let msg = e.message().to_string();
            config_err("<file>", msg)
        })?;
        for o in overrides {
            let (key, value) = o
                .split_once('=')
                .ok_or_else(|| config_err(o, "override must have the form KEY=VALUE"))?;
            set_dotted(&mut table, key.trim(), parse_override_value(value))?;
        }
        let cfg: RunConfig = serde_path_to_error::deserialize(toml::Value::Table(table)).map_err(|e| {
            let path = e.path().to_string();
            config_err(if path == "." { "<root>" } else { &path }, e.into_inner().to_string())
        })?;
        let cfg = cfg.resolved()?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Copy with every defaulted choice made explicit.
    pub fn resolved(&self) -> Result<Self> {
        let mut c = self.clone();
        let (nt, nd) = match c.geometry.kind {
            GeometryKind::Strip => (STRIP_DEFAULT_N_TANGENTIAL, STRIP_DEFAULT_N_DEPTH),
            GeometryKind::Annulus => (AnnulusGeometry::DEFAULT_N_ANGULAR, AnnulusGeometry::DEFAULT_N_RADIAL),
        };
        c.geometry.n_tangential.get_or_insert(nt);
        c.geometry.n_depth.get_or_insert(nd);
        if c.cutoff.e_bound.is_none() {
            c.cutoff.e_bound = Some(c.model()?.e_bound());
        }
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.geometry;
        if !(g.period.is_finite() && g.period > 0.0) {
            return Err(config_err("geometry.L", format!("must be positive, got {}", g.period)));
        }
        if !(g.outer_radius.is_finite() && g.outer_radius > 1.0) {
            return Err(config_err("geometry.R", format!("must exceed 1, got {}", g.outer_radius)));
        }
        if !(0.0..0.5).contains(&g.sponge_width) {
            return Err(config_err("geometry.sponge_width", format!("must lie in [0, 0.5), got {}", g.sponge_width)));
        }
        self.geometry()?;
        let c = &self.cutoff;
        if !(c.eps > 0.0 && c.eps < 1.0) {
            return Err(config_err("cutoff.eps", format!("must lie in (0, 1), got {}", c.eps)));
        }
        if let Some(e) = c.e_bound {
            if !(e.is_finite() && e > 0.0) {
                return Err(config_err("cutoff.E", format!("must be positive, got {e}")));
            }
        }
        if let Some(k) = c.k {
            if !(k.is_finite() && k > 0.0) {
                return Err(config_err("cutoff.k", format!("must be positive, got {k}")));
            }
        }
        if let Some(ks) = &c.k_list {
            if let Some(k) = ks.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
                return Err(config_err("cutoff.k_list", format!("entries must be positive, got {k}")));
            }
        }
        let x = &self.experiment;
        if !(x.delta.is_finite() && x.delta >= 0.0) {
            return Err(config_err("experiment.delta", format!("must be non-negative, got {}", x.delta)));
        }
        if !(x.theta > 0.0 && x.theta < 0.5) {
            return Err(config_err("experiment.theta", format!("must lie in (0, 1/2), got {}", x.theta)));
        }
        if !(x.step_check_tol > 0.0) {
            return Err(config_err("experiment.step_check_tol", "must be positive"));
        }
        match x.solution {
            SolutionKind::LowBand { band } | SolutionKind::Mixed { band, .. } if !(band.is_finite() && band > 0.0) => {
                return Err(config_err("experiment.solution.band", format!("must be positive, got {band}")));
            }
            SolutionKind::Mixed { hf_multiplier, hf_amplitude, .. }
                if !(hf_multiplier.is_finite() && hf_multiplier > 0.0 && hf_amplitude.is_finite()) =>
            {
                return Err(config_err("experiment.solution", "hf_multiplier must be positive and hf_amplitude finite"));
            }
            _ => {}
        }
        if let Regularization::Tikhonov { alpha } = x.regularization {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(config_err("experiment.regularization.alpha", format!("must be positive, got {alpha}")));
            }
        }
        let b = &self.operator_b;
        if !(b.resonance_tol > 0.0) {
            return Err(config_err("operator_b.resonance_tol", "must be positive"));
        }
        if !(b.step_check_tol > 0.0) {
            return Err(config_err("operator_b.step_check_tol", "must be positive"));
        }
        if !(b.theta_plateau > 0.0 && b.theta_plateau <= 1.0) {
            return Err(config_err("operator_b.theta_plateau", format!("must lie in (0, 1], got {}", b.theta_plateau)));
        }
        if !(self.john.mu.is_finite() && self.john.mu > 0.0) {
            return Err(config_err("john.mu", "must be positive"));
        }
        if !(self.john.mu_kept.is_finite() && self.john.mu_kept >= 0.0) {
            return Err(config_err("john.mu_kept", "must be non-negative"));
        }
        self.model()?;
        Ok(())
    }

    pub fn geometry(&self) -> Result<Geometry> {
        let g = &self.geometry;
        let (nt, nd) = match g.kind {
            GeometryKind::Strip => (STRIP_DEFAULT_N_TANGENTIAL, STRIP_DEFAULT_N_DEPTH),
            GeometryKind::Annulus => (AnnulusGeometry::DEFAULT_N_ANGULAR, AnnulusGeometry::DEFAULT_N_RADIAL),
        };
        let nt = g.n_tangential.unwrap_or(nt);
        let nd = g.n_depth.unwrap_or(nd);
        let geom: Result<Geometry> = match g.kind {
            GeometryKind::Strip => StripGeometry::new(g.period, nt, nd, g.sponge_width).map(Into::into),
            GeometryKind::Annulus => AnnulusGeometry::new(g.outer_radius, nt, nd).map(Into::into),
        };
        geom.map_err(|e| config_err("geometry", e.to_string()))
    }

    pub fn model(&self) -> Result<CoefficientModel> {
        match (self.geometry.kind, self.coefficients.preset) {
            (GeometryKind::Strip, Preset::Laplacian) => Ok(CoefficientModel::Strip(StripCoefficients::laplacian())),
            (GeometryKind::Annulus, Preset::Laplacian) => Ok(CoefficientModel::Radial(RadialCoefficients::laplacian())),
            (GeometryKind::Strip, Preset::RadialTable) => {
                Err(config_err("coefficients.preset", "radial_table requires an annulus geometry"))
            }
            (GeometryKind::Annulus, Preset::RadialTable) => {
                let path = self
                    .coefficients
                    .table_path
                    .as_ref()
                    .ok_or_else(|| config_err("coefficients.table_path", "required by the radial_table preset"))?;
                let c = Profile::from_table_file(path).map_err(|e| config_err("coefficients.table_path", e.to_string()))?;
                Ok(CoefficientModel::Radial(RadialCoefficients::laplacian_with_c(c)))
            }
        }
    }

    pub fn e_bound(&self) -> Result<f64> {
        match self.cutoff.e_bound {
            Some(e) => Ok(e),
            None => Ok(self.model()?.e_bound()),
        }
    }

    /// The configured wave numbers: `k_list` if present, otherwise `[k]`.
    pub fn k_values(&self) -> Result<Vec<f64>> {
        match (&self.cutoff.k_list, self.cutoff.k) {
            (Some(ks), _) if !ks.is_empty() => Ok(ks.clone()),
            (_, Some(k)) => Ok(vec![k]),
            _ => Err(config_err("cutoff.k", "no wave number given (set cutoff.k or cutoff.k_list)")),
        }
    }

    /// Exactly one wave number.
    pub fn single_k(&self) -> Result<f64> {
        let ks = self.k_values()?;
        match ks.as_slice() {
            [k] => Ok(*k),
            _ => Err(config_err("cutoff.k_list", format!("this command needs a single k, got {}", ks.len()))),
        }
    }

    pub fn spectral_cutoff(&self, k: f64) -> Result<SpectralCutoff> {
        SpectralCutoff::new(k, self.e_bound()?, self.cutoff.eps, &self.geometry()?)
    }

    pub fn continuation_options(&self) -> ContinuationOptions {
        ContinuationOptions {
            mode_policy: self.experiment.mode_policy,
            step_check_tol: self.experiment.step_check_tol,
        }
    }

    pub fn stability_setup(&self) -> Result<StabilitySetup> {
        Ok(StabilitySetup {
            model: self.model()?,
            geometry: self.geometry()?,
            eps: self.cutoff.eps,
            noise_delta: self.experiment.delta,
            seed: self.experiment.seed,
            theta: self.experiment.theta,
            mode_policy: self.experiment.mode_policy,
        })
    }

    pub fn operator_b_options(&self) -> OperatorBOptions {
        OperatorBOptions {
            m_max: self.operator_b.m_max,
            resonance_tol: self.operator_b.resonance_tol,
            step_check_tol: self.operator_b.step_check_tol,
        }
    }

    /// The resolved configuration as TOML.
    pub fn manifest(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err("<manifest>", e.to_string()))
    }
}

//! Mode-wise continuation of Cauchy data from Γ₀ across the layer.

mod annulus;
pub mod bessel;
mod export;
pub(crate) mod radial;
mod regularize;
mod strip;
mod transfer;

pub use annulus::{continue_annulus, continue_mode_annulus, reverse_mode_annulus, ModeProfile};
pub use export::{read_field_csv, write_field_csv, write_modes_csv, write_trace_csv};
pub use regularize::{continuation_error, regularized_continuation, ErrorReport, Regularization};
pub use strip::continue_strip;
pub use transfer::{duhamel_states, transfer_matrix_strip, TransferMatrix2};

use serde::{Deserialize, Serialize};

use crate::coefficients::CoefficientModel;
use crate::error::{Error, Result};
use crate::field::{CauchyData, Field};
use crate::geometry::Geometry;
use crate::spectral::{ModeSpectrum, SpectralCutoff};

/// Amplifications above this are treated as overflow and the mode is dropped.
pub const OVERFLOW_GAIN: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModePolicy {
    /// Continue every grid mode.
    #[default]
    All,
    /// Continue only modes kept by the cutoff; the rest are set to zero.
    LowOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuationOptions {
    pub mode_policy: ModePolicy,
    /// Relative tolerance of the annulus step-doubling check; `f64::INFINITY` disables it.
    pub step_check_tol: f64,
}

impl Default for ContinuationOptions {
    fn default() -> Self {
        Self {
            mode_policy: ModePolicy::All,
            step_check_tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeDiagnostics {
    pub mode: i64,
    /// `ω²` of the depth equation (strip) or the local value at Γ₀ (annulus).
    pub omega2: f64,
    /// Spectral norm of the energy-scaled propagator `(k û, û')|Γ₀ ↦ (k û, û')|Γ₁`.
    pub amplification: f64,
    pub kept: bool,
    /// False when the mode policy skipped the mode.
    pub computed: bool,
    /// Overflow: the mode was zeroed.
    pub flagged: bool,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub spectrum: ModeSpectrum,
    pub field: Field,
    /// Cauchy data `(u, ∂_n u)` on Γ₁, same mode order as the input.
    pub target: CauchyData,
    pub diagnostics: Vec<ModeDiagnostics>,
    pub cutoff: SpectralCutoff,
    pub warnings: Vec<String>,
}

impl ContinuationResult {
    pub fn max_kept_amplification(&self) -> f64 {
        self.diagnostics
            .iter()
            .filter(|d| d.kept && d.computed)
            .fold(0.0, |m, d| m.max(d.amplification))
    }
}

pub(crate) fn check_inputs(data: &CauchyData, source: Option<&ModeSpectrum>, geometry: &Geometry, cutoff: &SpectralCutoff) -> Result<()> {
    data.check_modes(geometry)?;
    cutoff.check(geometry)?;
    if let Some(s) = source {
        if s.geometry() != geometry {
            return Err(Error::Shape("source spectrum lives on a different grid".into()));
        }
    }
    if (cutoff.k() - data.k()).abs() > 1e-12 * data.k() {
        return Err(Error::param("k", format!("cutoff built for k = {}, data carries k = {}", cutoff.k(), data.k())));
    }
    Ok(())
}

/// Continuation on either geometry.
pub fn continue_cauchy(
    data: &CauchyData,
    source: Option<&ModeSpectrum>,
    model: &CoefficientModel,
    geometry: &Geometry,
    cutoff: &SpectralCutoff,
    options: &ContinuationOptions,
) -> Result<ContinuationResult> {
    match (model, geometry) {
        (CoefficientModel::Strip(c), Geometry::Strip(g)) => continue_strip(data, source, c, g, cutoff, options),
        (CoefficientModel::Radial(c), Geometry::Annulus(g)) => continue_annulus(data, source, c, g, cutoff, options),
        _ => Err(Error::Geometry("coefficient model does not match the geometry".into())),
    }
}

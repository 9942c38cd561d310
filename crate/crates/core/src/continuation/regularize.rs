use serde::{Deserialize, Serialize};

use super::{continue_cauchy, ContinuationOptions, ContinuationResult, ModePolicy};
use crate::coefficients::CoefficientModel;
use crate::error::{Error, Result};
use crate::field::CauchyData;
use crate::geometry::Geometry;
use crate::spectral::{inverse_transform, ModeSpectrum, SpectralCutoff};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Regularization {
    None,
    /// Continue only the modes kept by the cutoff.
    SpectralCutoff,
    /// Damp each mode by `1/(1 + α a_m²)` with `a_m` its amplification.
    Tikhonov { alpha: f64 },
}

/// Error of a computed Γ₁ trace against the true one, per mode
/// `(|e_u|² + |e_u'|²/k²)^{1/2}` and in aggregate.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub per_mode: Vec<f64>,
    pub aggregate: f64,
}

pub fn continuation_error(result: &ContinuationResult, truth: &CauchyData) -> Result<ErrorReport> {
    let t = &result.target;
    if t.modes() != truth.modes() {
        return Err(Error::Shape("truth lives on a different mode set".into()));
    }
    let k = t.k();
    let per_mode: Vec<f64> = (0..t.modes().len())
        .map(|i| ((t.u0()[i] - truth.u0()[i]).norm_sqr() + (t.u1()[i] - truth.u1()[i]).norm_sqr() / (k * k)).sqrt())
        .collect();
    let aggregate = per_mode.iter().map(|e| e * e).sum::<f64>().sqrt();
    Ok(ErrorReport { per_mode, aggregate })
}

pub fn regularized_continuation(
    data: &CauchyData,
    source: Option<&ModeSpectrum>,
    model: &CoefficientModel,
    geometry: &Geometry,
    cutoff: &SpectralCutoff,
    regularization: Regularization,
    options: &ContinuationOptions,
) -> Result<ContinuationResult> {
    let mode_policy = match regularization {
        Regularization::SpectralCutoff => ModePolicy::LowOnly,
        _ => ModePolicy::All,
    };
    let opts = ContinuationOptions { mode_policy, ..*options };
    let Regularization::Tikhonov { alpha } = regularization else {
        return continue_cauchy(data, source, model, geometry, cutoff, &opts);
    };
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::param("alpha", format!("must be positive, got {alpha}")));
    }
    let mut res = continue_cauchy(data, source, model, geometry, cutoff, &opts)?;
    let mut u = res.target.u0().to_vec();
    let mut du = res.target.u1().to_vec();
    for (col, d) in res.diagnostics.iter().enumerate() {
        let a = d.amplification;
        let factor = if a.is_finite() { 1.0 / (1.0 + alpha * a * a) } else { 0.0 };
        let damped: Vec<Complex64> = res.spectrum.column(col).iter().map(|v| v * factor).collect();
        res.spectrum.set_column(col, &damped);
        u[col] *= factor;
        du[col] *= factor;
    }
    res.field = inverse_transform(&res.spectrum);
    res.target = CauchyData::new(res.target.modes().to_vec(), u, du, res.target.k())?;
    Ok(res)
}

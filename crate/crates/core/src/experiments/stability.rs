//! Measured ratios of the two sides of the stability estimates.

use ndarray::Array2;

use super::manufacture::ManufacturedSolution;
use super::noise::add_noise;
use crate::coefficients::CoefficientModel;
use crate::continuation::{continue_cauchy, ContinuationOptions, ContinuationResult, ModePolicy};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{CutoffProfile, Geometry};
use crate::spectral::{
    apply_cutoff_chi, diff, forward_transform, hf_h2_norm, hf_seminorm, hf_seminorm_spectrum, inverse_transform,
    sobolev_norm_spectrum, tangential_derivative, SpectralCutoff,
};

/// One evaluation of an estimate. The totals are plain sums of the `lhs` and
/// `rhs` terms; `aux` terms are recorded but not summed.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityRecord {
    pub k: f64,
    pub geometry: String,
    pub solution_id: String,
    pub delta: f64,
    pub theta: f64,
    pub lhs_terms: Vec<(String, f64)>,
    pub rhs_terms: Vec<(String, f64)>,
    pub aux_terms: Vec<(String, f64)>,
    pub lhs_total: f64,
    pub rhs_total: f64,
    pub ratio: f64,
    pub max_kept_amplification: f64,
    pub error: Option<String>,
}

pub const STRIP_TERMS: ([&str; 1], [&str; 5], [&str; 2]) = (
    ["u_l2_core"],
    ["u0_l2", "f_l2/k", "u1_l2/k", "u_h1_sponge/k", "hf1_chi/k"],
    ["hf2_chi*k^(theta-1/2)", "hf2_chi*k^(theta-3/2)"],
);

pub const ANNULUS_TERMS: ([&str; 3], [&str; 4], [&str; 1]) = (
    ["k*u_l2_gamma1", "grad_u_l2_gamma1", "u_h1"],
    ["k*u0_l2", "u1_l2", "f_l2", "hf_h2*k^(theta-1/2)"],
    ["hf2_seminorm*k^(theta-1/2)"],
);

/// Term names `(lhs, rhs, aux)` for a geometry tag.
pub fn term_names(geometry: &Geometry) -> (Vec<&'static str>, Vec<&'static str>, Vec<&'static str>) {
    match geometry {
        Geometry::Strip(_) => (STRIP_TERMS.0.to_vec(), STRIP_TERMS.1.to_vec(), STRIP_TERMS.2.to_vec()),
        Geometry::Annulus(_) => (ANNULUS_TERMS.0.to_vec(), ANNULUS_TERMS.1.to_vec(), ANNULUS_TERMS.2.to_vec()),
    }
}

impl StabilityRecord {
    fn assemble(
        k: f64,
        geometry: &Geometry,
        solution_id: &str,
        delta: f64,
        theta: f64,
        values: (Vec<f64>, Vec<f64>, Vec<f64>),
        max_kept_amplification: f64,
    ) -> Self {
        let (ln, rn, an) = term_names(geometry);
        let name = |n: Vec<&str>, v: Vec<f64>| -> Vec<(String, f64)> { n.into_iter().map(String::from).zip(v).collect() };
        let lhs_total = values.0.iter().sum();
        let rhs_total = values.1.iter().sum();
        Self {
            k,
            geometry: geometry.tag().to_string(),
            solution_id: solution_id.to_string(),
            delta,
            theta,
            lhs_terms: name(ln, values.0),
            rhs_terms: name(rn, values.1),
            aux_terms: name(an, values.2),
            lhs_total,
            rhs_total,
            ratio: lhs_total / rhs_total,
            max_kept_amplification,
            error: None,
        }
    }

    /// Placeholder row for a wave number whose evaluation failed.
    pub fn failed(k: f64, geometry: &Geometry, delta: f64, theta: f64, message: String) -> Self {
        let (ln, rn, an) = term_names(geometry);
        let nan = |n: &[&str]| vec![f64::NAN; n.len()];
        let mut r = Self::assemble(k, geometry, "failed", delta, theta, (nan(&ln), nan(&rn), nan(&an)), f64::NAN);
        r.error = Some(message);
        r
    }

    pub fn is_failed(&self) -> bool {
        self.error.is_some()
    }

    /// `lhs/rhs` recomputed from the stored terms.
    pub fn recomputed_ratio(&self) -> f64 {
        let l: f64 = self.lhs_terms.iter().map(|t| t.1).sum();
        let r: f64 = self.rhs_terms.iter().map(|t| t.1).sum();
        l / r
    }

    pub fn term(&self, name: &str) -> Option<f64> {
        self.lhs_terms
            .iter()
            .chain(&self.rhs_terms)
            .chain(&self.aux_terms)
            .find(|t| t.0 == name)
            .map(|t| t.1)
    }
}

#[derive(Debug, Clone)]
pub struct StabilitySetup {
    pub model: CoefficientModel,
    pub geometry: Geometry,
    pub eps: f64,
    pub noise_delta: f64,
    pub seed: u64,
    pub theta: f64,
    pub mode_policy: ModePolicy,
}

/// `L²` norm over the columns in `mask` of `u`, `∂_x u` and `∂_n u`.
fn h1_masked(field: &Field, mask: &[bool]) -> Result<f64> {
    let g = *field.geometry();
    let dx = inverse_transform(&tangential_derivative(&forward_transform(field)));
    let vals = field.values();
    let (nz, nx) = vals.dim();
    let mut dn = Array2::zeros((nz, nx));
    for i in 0..nx {
        let col: Vec<_> = vals.column(i).to_vec();
        for (j, v) in diff::first(&col, g.normal_step()).into_iter().enumerate() {
            dn[[j, i]] = v;
        }
    }
    let dn = Field::new(g, dn)?;
    let parts = [field.l2_norm_masked(Some(mask)), dx.l2_norm_masked(Some(mask)), dn.l2_norm_masked(Some(mask))];
    Ok(parts.iter().map(|p| p * p).sum::<f64>().sqrt())
}

fn strip_terms(
    res: &ContinuationResult,
    data: &crate::field::CauchyData,
    cutoff: &SpectralCutoff,
    k: f64,
    theta: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let Geometry::Strip(sg) = res.field.geometry() else {
        unreachable!("strip terms on a strip result")
    };
    let chi = CutoffProfile::for_strip(sg);
    let v = apply_cutoff_chi(&res.field, &chi)?;
    let hf1 = hf_seminorm(&v, 1, cutoff)?;
    let hf2 = hf_seminorm(&v, 2, cutoff)?;
    let sponge = if chi.sponge_mask().iter().any(|&b| b) {
        h1_masked(&res.field, chi.sponge_mask())?
    } else {
        0.0
    };
    Ok((
        vec![res.field.l2_norm_masked(Some(chi.core_mask()))],
        vec![data.u0_norm(), 0.0, data.u1_norm() / k, sponge / k, hf1 / k],
        vec![hf2 * k.powf(theta - 0.5), hf2 * k.powf(theta - 1.5)],
    ))
}

fn annulus_terms(
    res: &ContinuationResult,
    data: &crate::field::CauchyData,
    cutoff: &SpectralCutoff,
    k: f64,
    theta: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let g = res.field.geometry();
    let r_out = g.normal_end();
    let t = &res.target;
    let u_gamma1 = r_out.sqrt() * t.u0_norm();
    let grad_gamma1 = (r_out
        * t.modes()
            .iter()
            .zip(t.u0())
            .zip(t.u1())
            .map(|((m, u), du)| du.norm_sqr() + (m * m) as f64 * u.norm_sqr() / (r_out * r_out))
            .sum::<f64>())
    .sqrt();
    let h1 = sobolev_norm_spectrum(&res.spectrum, 1)?;
    let scale = k.powf(theta - 0.5);
    Ok((
        vec![k * u_gamma1, grad_gamma1, h1],
        vec![k * data.u0_norm(), data.u1_norm(), 0.0, scale * hf_h2_norm(&res.spectrum, cutoff)?],
        vec![scale * hf_seminorm_spectrum(&res.spectrum, 2, cutoff)?],
    ))
}

/// Continues the (noisy) data of `solution` and evaluates every named term of
/// the applicable estimate.
pub fn stability_ratio(solution: &ManufacturedSolution, setup: &StabilitySetup) -> Result<StabilityRecord> {
    if !(setup.theta > 0.0 && setup.theta < 0.5) {
        return Err(Error::param("theta", format!("must lie in (0, 1/2), got {}", setup.theta)));
    }
    if solution.spectrum.geometry() != &setup.geometry {
        return Err(Error::Shape("solution was manufactured on a different grid".into()));
    }
    let k = solution.k;
    let cutoff = SpectralCutoff::new(k, setup.model.e_bound(), setup.eps, &setup.geometry)?;
    let noisy = add_noise(&solution.data, setup.noise_delta, setup.seed)?;
    let options = ContinuationOptions {
        mode_policy: setup.mode_policy,
        ..Default::default()
    };
    let res = continue_cauchy(&noisy, None, &setup.model, &setup.geometry, &cutoff, &options)?;
    let values = match setup.geometry {
        Geometry::Strip(_) => strip_terms(&res, &noisy, &cutoff, k, setup.theta)?,
        Geometry::Annulus(_) => annulus_terms(&res, &noisy, &cutoff, k, setup.theta)?,
    };
    if values.0.iter().chain(&values.1).chain(&values.2).any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::NonFinite(format!("stability term at k = {k}")));
    }
    Ok(StabilityRecord::assemble(
        k,
        &setup.geometry,
        &solution.id,
        setup.noise_delta,
        setup.theta,
        values,
        res.max_kept_amplification(),
    ))
}

//! Discrete Sobolev norms and the high-frequency semi-norms.
//!
//! Every norm here is a sum of per-mode contributions: tangential
//! derivatives are exact multipliers on the coefficients, normal derivatives
//! are centred differences and the normal integral is the trapezoid rule
//! (with the area factor `r` on the annulus). Restricting the sum to a subset
//! of modes therefore restricts the norm to the corresponding projection.

use super::{diff, forward_transform, ModeSpectrum, SpectralCutoff};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Geometry;
use crate::Complex64;

fn check_order(p: u32) -> Result<()> {
    if p > 2 {
        return Err(Error::param("p", format!("Sobolev order must be 0, 1 or 2, got {p}")));
    }
    Ok(())
}

/// Contribution of one mode profile to `‖·‖²_{(p)}`.
fn profile_energy(geometry: &Geometry, m: i64, c: &[Complex64], p: u32) -> f64 {
    let w = geometry.normal_weights();
    let h = geometry.normal_step();
    let mut total: f64 = c.iter().zip(&w).map(|(v, wj)| wj * v.norm_sqr()).sum();
    if p == 0 {
        return total;
    }
    let d1 = diff::first(c, h);
    let nu = geometry.frequency(m);
    match geometry {
        Geometry::Strip(_) => {
            let nu2 = nu * nu;
            total += (0..c.len())
                .map(|j| w[j] * (d1[j].norm_sqr() + nu2 * c[j].norm_sqr()))
                .sum::<f64>();
            if p == 2 {
                let d2 = diff::second(c, h);
                total += (0..c.len())
                    .map(|j| w[j] * (d2[j].norm_sqr() + 2.0 * nu2 * d1[j].norm_sqr() + nu2 * nu2 * c[j].norm_sqr()))
                    .sum::<f64>();
            }
        }
        Geometry::Annulus(_) => {
            let r = geometry.normal_nodes();
            let nu2 = nu * nu;
            total += (0..c.len())
                .map(|j| w[j] * (d1[j].norm_sqr() + nu2 * c[j].norm_sqr() / (r[j] * r[j])))
                .sum::<f64>();
            if p == 2 {
                // Frobenius norm of the Hessian in polar coordinates.
                let d2 = diff::second(c, h);
                total += (0..c.len())
                    .map(|j| {
                        let rj = r[j];
                        let mixed = (d1[j] / rj - c[j] / (rj * rj)) * nu;
                        let angular = d1[j] / rj - c[j] * (nu2 / (rj * rj));
                        w[j] * (d2[j].norm_sqr() + 2.0 * mixed.norm_sqr() + angular.norm_sqr())
                    })
                    .sum::<f64>();
            }
        }
    }
    total
}

/// Per-column contributions to `‖·‖²_{(p)}`, in FFT column order.
pub fn mode_energies(spectrum: &ModeSpectrum, p: u32) -> Result<Vec<f64>> {
    check_order(p)?;
    let g = *spectrum.geometry();
    Ok(g.mode_numbers()
        .into_iter()
        .enumerate()
        .map(|(col, m)| profile_energy(&g, m, &spectrum.column(col), p))
        .collect())
}

pub fn sobolev_norm_spectrum(spectrum: &ModeSpectrum, p: u32) -> Result<f64> {
    Ok(mode_energies(spectrum, p)?.iter().sum::<f64>().sqrt())
}

/// Discrete `H^(p)(Ω)` norm, `p ∈ {0, 1, 2}`.
pub fn sobolev_norm(field: &Field, p: u32) -> Result<f64> {
    sobolev_norm_spectrum(&forward_transform(field), p)
}

/// Unit tangential derivative: `∂_x` on the strip, `r⁻¹∂_φ` on the annulus.
pub fn tangential_derivative(spectrum: &ModeSpectrum) -> ModeSpectrum {
    let g = *spectrum.geometry();
    let r = g.normal_nodes();
    let mut out = spectrum.clone();
    for (col, m) in g.mode_numbers().into_iter().enumerate() {
        let nu = g.frequency(m);
        let prof: Vec<Complex64> = spectrum
            .column(col)
            .iter()
            .enumerate()
            .map(|(j, v)| {
                let factor = match g {
                    Geometry::Strip(_) => nu,
                    Geometry::Annulus(_) => nu / r[j],
                };
                v * Complex64::new(0.0, factor)
            })
            .collect();
        out.set_column(col, &prof);
    }
    out
}

fn masked_sum(contributions: &[f64], geometry: &Geometry, cutoff: &SpectralCutoff) -> f64 {
    // Same summation order for every cutoff so the result is monotone in the kept set.
    geometry
        .mode_numbers()
        .into_iter()
        .zip(contributions)
        .fold(0.0, |acc, (m, e)| acc + if cutoff.keeps(m) { 0.0 } else { *e })
}

/// `|||v|||_{(order,k)} = (‖v_h‖²_{(order−1)} + ‖∂_tan v_h‖²_{(order−1)})^{1/2}`, `order ∈ {1, 2}`.
pub fn hf_seminorm_spectrum(spectrum: &ModeSpectrum, order: u32, cutoff: &SpectralCutoff) -> Result<f64> {
    if !(1..=2).contains(&order) {
        return Err(Error::param("m", format!("semi-norm order must be 1 or 2, got {order}")));
    }
    cutoff.check(spectrum.geometry())?;
    let base = mode_energies(spectrum, order - 1)?;
    let deriv = mode_energies(&tangential_derivative(spectrum), order - 1)?;
    let per_mode: Vec<f64> = base.iter().zip(&deriv).map(|(a, b)| a + b).collect();
    Ok(masked_sum(&per_mode, spectrum.geometry(), cutoff).sqrt())
}

pub fn hf_seminorm(field: &Field, order: u32, cutoff: &SpectralCutoff) -> Result<f64> {
    hf_seminorm_spectrum(&forward_transform(field), order, cutoff)
}

/// `‖u − P_k u‖_{(2)}(Ω)`.
pub fn hf_h2_norm(spectrum: &ModeSpectrum, cutoff: &SpectralCutoff) -> Result<f64> {
    cutoff.check(spectrum.geometry())?;
    let e = mode_energies(spectrum, 2)?;
    Ok(masked_sum(&e, spectrum.geometry(), cutoff).sqrt())
}

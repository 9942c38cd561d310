use std::io::Write;

use crate::coefficients::StripCoefficients;
use crate::continuation::TransferMatrix2;
use crate::error::{Error, Result};

/// Growth of an excluded mode next to a kept one, on the `2π`-periodic strip
/// (so the tangential frequency of mode `m` is `m`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JohnRow {
    pub k: f64,
    /// `⌈μk⌉`.
    pub mode: i64,
    /// `|û(1)|/|û(0)|` for data `(û, û') = (1, 0)`.
    pub amplification: f64,
    /// `cosh(√(ξ² − k²))` evaluated directly for the Laplacian symbol.
    pub closed_form: f64,
    pub kept_mode: i64,
    /// Energy-scaled propagator norm of the kept mode.
    pub kept_amplification: f64,
    pub kept_bound: f64,
}

pub fn john_blowup_demo(k_list: &[f64], mu: f64, mu_kept: f64, coeffs: &StripCoefficients, eps: f64) -> Result<Vec<JohnRow>> {
    if k_list.is_empty() {
        return Err(Error::param("k_list", "no wave numbers"));
    }
    if !(mu * coeffs.e_bound > 1.0) {
        return Err(Error::param("mu", format!("must exceed 1/E = {}, got {mu}", 1.0 / coeffs.e_bound)));
    }
    if !(mu_kept >= 0.0 && mu_kept * mu_kept < (1.0 - eps) / (coeffs.e_bound * coeffs.e_bound)) {
        return Err(Error::param("mu_kept", format!("{mu_kept} does not select a kept mode for eps = {eps}")));
    }
    k_list
        .iter()
        .map(|&k| {
            if !(k.is_finite() && k > 0.0) {
                return Err(Error::param("k", format!("must be positive, got {k}")));
            }
            let mode = (mu * k - 1e-9).ceil() as i64;
            let xi = mode as f64;
            let t = TransferMatrix2::closed_form(coeffs.omega2(xi, k), 1.0, mode);
            let kept_mode = (mu_kept * k).floor() as i64;
            let kept = TransferMatrix2::closed_form(coeffs.omega2(kept_mode as f64, k), 1.0, kept_mode);
            Ok(JohnRow {
                k,
                mode,
                amplification: t.entries[0][0].abs(),
                closed_form: (xi * xi - k * k).max(0.0).sqrt().cosh(),
                kept_mode,
                kept_amplification: kept.scaled_norm(k),
                kept_bound: 1.0 / eps.sqrt(),
            })
        })
        .collect()
}

pub fn write_john_csv(rows: &[JohnRow], mut out: impl Write) -> Result<()> {
    writeln!(out, "k,mode,amplification,closed_form,kept_mode,kept_amplification,kept_bound")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.k, r.mode, r.amplification, r.closed_form, r.kept_mode, r.kept_amplification, r.kept_bound
        )?;
    }
    Ok(())
}

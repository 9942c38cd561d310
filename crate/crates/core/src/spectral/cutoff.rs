use ndarray::Array2;

use super::{forward_transform, inverse_transform, ModeSpectrum};
use crate::coefficients::StripCoefficients;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{CutoffProfile, Geometry};

/// Relative width of the band around the cutoff boundary that is treated as
/// "on the boundary" (and therefore excluded by the strict inequality).
const BOUNDARY_REL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
enum CutoffKind {
    Angular,
    Tangential { period: f64 },
}

/// Low-pass rule for wave number `k`.
///
/// * annulus: mode `m` is kept iff `m² < E²(1−ε)k²`
/// * strip: frequency `ξ = 2πm/L` is kept iff `ξ² < (1−ε)k²/E²`
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCutoff {
    k: f64,
    e_bound: f64,
    eps: f64,
    kind: CutoffKind,
    kept: Vec<i64>,
}

impl SpectralCutoff {
    pub fn new(k: f64, e_bound: f64, eps: f64, geometry: &Geometry) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::param("k", format!("must be positive, got {k}")));
        }
        if !(e_bound.is_finite() && e_bound > 0.0) {
            return Err(Error::param("E", format!("must be positive, got {e_bound}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param("eps", format!("must lie in (0, 1), got {eps}")));
        }
        let kind = match geometry {
            Geometry::Annulus(_) => CutoffKind::Angular,
            Geometry::Strip(g) => CutoffKind::Tangential { period: g.period() },
        };
        let mut cutoff = Self {
            k,
            e_bound,
            eps,
            kind,
            kept: Vec::new(),
        };
        let mut kept: Vec<i64> = geometry.mode_numbers().into_iter().filter(|&m| cutoff.keeps(m)).collect();
        kept.sort_unstable();
        cutoff.kept = kept;
        Ok(cutoff)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn e_bound(&self) -> f64 {
        self.e_bound
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// Kept grid modes in ascending order.
    pub fn kept_modes(&self) -> &[i64] {
        &self.kept
    }

    /// Squared tangential symbol of mode `m` and the threshold it must stay below.
    fn symbol_and_threshold(&self, m: i64) -> (f64, f64) {
        let (k2, e2) = (self.k * self.k, self.e_bound * self.e_bound);
        match self.kind {
            CutoffKind::Angular => ((m * m) as f64, e2 * (1.0 - self.eps) * k2),
            CutoffKind::Tangential { period } => {
                let xi = 2.0 * std::f64::consts::PI * m as f64 / period;
                (xi * xi, (1.0 - self.eps) * k2 / e2)
            }
        }
    }

    /// Strict low-pass test. Symbols within rounding of the threshold count as
    /// on the boundary and are excluded.
    pub fn keeps(&self, m: i64) -> bool {
        let (s, t) = self.symbol_and_threshold(m);
        s < t * (1.0 - BOUNDARY_REL)
    }

    /// Largest value of (tangential symbol)² over kept modes allowed by the
    /// rule: `E²(1−ε)k²` on the annulus, `(1−ε)k²/E²` on the strip. Bounds
    /// `‖∂_tan v_l‖² ≤ factor · ‖v_l‖²` slice by slice.
    pub fn bernstein_factor(&self) -> f64 {
        self.symbol_and_threshold(0).1
    }

    pub(crate) fn matches(&self, geometry: &Geometry) -> bool {
        match (self.kind, geometry) {
            (CutoffKind::Angular, Geometry::Annulus(_)) => true,
            (CutoffKind::Tangential { period }, Geometry::Strip(g)) => period == g.period(),
            _ => false,
        }
    }

    pub(crate) fn check(&self, geometry: &Geometry) -> Result<()> {
        if self.matches(geometry) {
            Ok(())
        } else {
            Err(Error::Shape(format!("cutoff was built for a different geometry than this {}", geometry.tag())))
        }
    }
}

/// Disjoint low/high parts of a spectrum.
#[derive(Debug, Clone)]
pub struct FrequencySplit {
    pub low: ModeSpectrum,
    pub high: ModeSpectrum,
    pub cutoff: SpectralCutoff,
}

pub fn split_low_high(spectrum: &ModeSpectrum, cutoff: &SpectralCutoff) -> Result<FrequencySplit> {
    cutoff.check(spectrum.geometry())?;
    Ok(FrequencySplit {
        low: spectrum.masked(|m| cutoff.keeps(m)),
        high: spectrum.masked(|m| !cutoff.keeps(m)),
        cutoff: cutoff.clone(),
    })
}

/// The projector `P_k`: inverse transform of the low part.
pub fn project_low(field: &Field, cutoff: &SpectralCutoff) -> Result<Field> {
    let split = split_low_high(&forward_transform(field), cutoff)?;
    Ok(inverse_transform(&split.low))
}

/// Pointwise product `v = χu`.
pub fn apply_cutoff_chi(field: &Field, profile: &CutoffProfile) -> Result<Field> {
    let chi = profile.values();
    if chi.len() != field.geometry().n_tangential() {
        return Err(Error::Shape("cutoff profile length differs from tangential grid".into()));
    }
    let mut v = field.values().clone();
    for mut row in v.rows_mut() {
        for (x, c) in row.iter_mut().zip(chi) {
            *x *= *c;
        }
    }
    Field::new(*field.geometry(), v)
}

/// Commutator `A(χu) − χAu` for the constant-coefficient strip operator, with
/// `χ` depending on the tangential variable only:
/// `a11 (2 ∂_xχ ∂_x u + ∂_x²χ u)`. Tangential derivatives of `u` use
/// periodic centred differences.
pub fn commutator_term(u: &Field, profile: &CutoffProfile, coeffs: &StripCoefficients) -> Result<Field> {
    let Geometry::Strip(g) = u.geometry() else {
        return Err(Error::Shape("commutator_term requires a strip field".into()));
    };
    let hx = g.tangential_step();
    let (d1, d2) = (profile.first_derivative(), profile.second_derivative());
    let vals = u.values();
    let (nz, nx) = vals.dim();
    let out = Array2::from_shape_fn((nz, nx), |(j, i)| {
        let ux = (vals[[j, (i + 1) % nx]] - vals[[j, (i + nx - 1) % nx]]) / (2.0 * hx);
        (ux * (2.0 * d1[i]) + vals[[j, i]] * d2[i]) * coeffs.a11
    });
    Field::new(*u.geometry(), out)
}

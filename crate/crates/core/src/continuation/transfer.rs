use crate::coefficients::StripCoefficients;
use crate::error::{Error, Result};
use crate::Complex64;

/// Propagator of `(û, û')` across `[s, t]` for `û'' + ω² û = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix2 {
    pub entries: [[f64; 2]; 2],
    pub omega2: f64,
    pub mode: i64,
}

/// `sin(ωτ)/ω` and `cos(ωτ)` (or their hyperbolic analogues) for a real `ω²`.
fn fundamental(omega2: f64, tau: f64) -> (f64, f64, f64) {
    // returns (cos-like, sin-like / ω, −ω² · sin-like / ω)
    if omega2 > 0.0 {
        let w = omega2.sqrt();
        let (s, c) = (w * tau).sin_cos();
        let sinc = if (w * tau).abs() < 1e-8 { tau * (1.0 - (w * tau).powi(2) / 6.0) } else { s / w };
        (c, sinc, -w * s)
    } else if omega2 < 0.0 {
        let kappa = (-omega2).sqrt();
        let x = kappa * tau;
        let sinhc = if x.abs() < 1e-8 { tau * (1.0 + x * x / 6.0) } else { x.sinh() / kappa };
        (x.cosh(), sinhc, kappa * x.sinh())
    } else {
        (1.0, tau, 0.0)
    }
}

impl TransferMatrix2 {
    /// Closed-form propagator over an interval of length `tau`.
    pub fn closed_form(omega2: f64, tau: f64, mode: i64) -> Self {
        let (c, s, ds) = fundamental(omega2, tau);
        Self {
            entries: [[c, s], [ds, c]],
            omega2,
            mode,
        }
    }

    pub fn apply(&self, state: (Complex64, Complex64)) -> (Complex64, Complex64) {
        let [[a, b], [c, d]] = self.entries;
        (state.0 * a + state.1 * b, state.0 * c + state.1 * d)
    }

    pub fn det(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        a * d - b * c
    }

    /// Magnitude scale of the determinant's two products, used for relative checks.
    pub fn det_scale(&self) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        (a * d).abs() + (b * c).abs()
    }

    /// `self ∘ first`: propagate across `first`'s interval, then across `self`'s.
    pub fn after(&self, first: &TransferMatrix2) -> Self {
        let p = self.entries;
        let q = first.entries;
        let mut e = [[0.0; 2]; 2];
        for (i, row) in e.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = p[i][0] * q[0][j] + p[i][1] * q[1][j];
            }
        }
        Self {
            entries: e,
            omega2: self.omega2,
            mode: self.mode,
        }
    }

    /// Inverse using `det = 1`.
    pub fn inverse(&self) -> Self {
        let [[a, b], [c, d]] = self.entries;
        let det = self.det();
        Self {
            entries: [[d / det, -b / det], [-c / det, a / det]],
            omega2: self.omega2,
            mode: self.mode,
        }
    }

    /// Spectral norm of the propagator acting on the energy-scaled state `(k û, û')`.
    pub fn scaled_norm(&self, k: f64) -> f64 {
        let [[a, b], [c, d]] = self.entries;
        let (a, b, c, d) = (a, b * k, c / k, d);
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        ((s + (s * s - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
    }
}

/// Propagator for tangential frequency `xi` across `[s, t]` of the
/// constant-coefficient strip equation `a22 û'' + (a + c k + k² − a11 ξ²) û = f̂`.
pub fn transfer_matrix_strip(
    xi: f64,
    k: f64,
    coeffs: &StripCoefficients,
    s: f64,
    t: f64,
    mode: i64,
) -> Result<TransferMatrix2> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) || s >= t {
        return Err(Error::param("interval", format!("need 0 ≤ s < t ≤ 1, got [{s}, {t}]")));
    }
    Ok(TransferMatrix2::closed_form(coeffs.omega2(xi, k), t - s, mode))
}

/// Particular solution of `û'' + ω² û = g` with zero initial state, on an
/// equispaced grid with step `h`, by stepwise Simpson quadrature of the
/// Duhamel integral. Midpoint values of `g` use cubic interpolation.
pub fn duhamel_states(omega2: f64, h: f64, g: &[Complex64]) -> Vec<(Complex64, Complex64)> {
    let n = g.len();
    let zero = Complex64::default();
    let mut states = vec![(zero, zero); n];
    if n < 2 {
        return states;
    }
    let full = TransferMatrix2::closed_form(omega2, h, 0);
    let half = TransferMatrix2::closed_form(omega2, 0.5 * h, 0);
    for j in 0..n - 1 {
        let mid = midpoint(g, j);
        let (a0, a1) = full.apply((zero, g[j]));
        let (b0, b1) = half.apply((zero, mid));
        let (p0, p1) = full.apply(states[j]);
        let w = h / 6.0;
        states[j + 1] = (
            p0 + (a0 + b0 * 4.0) * w,
            p1 + (a1 + b1 * 4.0 + g[j + 1]) * w,
        );
    }
    states
}

/// Cubic interpolation of `g` at the midpoint of `[j, j+1]`.
pub(crate) fn midpoint(g: &[Complex64], j: usize) -> Complex64 {
    let n = g.len();
    if n < 4 {
        return (g[j] + g[j + 1]) * 0.5;
    }
    if j == 0 {
        (g[0] * 5.0 + g[1] * 15.0 - g[2] * 5.0 + g[3]) / 16.0
    } else if j + 2 == n {
        (g[n - 1] * 5.0 + g[n - 2] * 15.0 - g[n - 3] * 5.0 + g[n - 4]) / 16.0
    } else {
        (g[j] * 9.0 + g[j + 1] * 9.0 - g[j - 1] - g[j + 2]) / 16.0
    }
}

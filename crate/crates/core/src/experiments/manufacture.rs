//! Exact solutions of the homogeneous equation assembled mode by mode.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coefficients::{CoefficientModel, RadialCoefficients, StripCoefficients};
use crate::continuation::bessel::bessel_basis;
use crate::continuation::continue_mode_annulus;
use crate::error::{Error, Result};
use crate::field::{CauchyData, Field};
use crate::geometry::{AnnulusGeometry, Geometry};
use crate::spectral::{inverse_transform, ModeSpectrum};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum SolutionKind {
    Zero,
    SingleMode {
        mode: i64,
    },
    /// Every mode with tangential frequency at most `band·k`.
    LowBand {
        band: f64,
    },
    /// Low band plus one excluded mode at frequency `⌈hf_multiplier·k⌉`.
    Mixed {
        band: f64,
        hf_multiplier: f64,
        hf_amplitude: f64,
    },
}

impl fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionKind::Zero => write!(f, "zero"),
            SolutionKind::SingleMode { mode } => write!(f, "single_mode({mode})"),
            SolutionKind::LowBand { band } => write!(f, "low_band({band})"),
            SolutionKind::Mixed { band, hf_multiplier, .. } => write!(f, "mixed({band};{hf_multiplier})"),
        }
    }
}

/// An exact solution with `f = 0`, its Cauchy data on Γ₀ and its traces on Γ₁.
#[derive(Debug, Clone)]
pub struct ManufacturedSolution {
    pub id: String,
    pub k: f64,
    pub spectrum: ModeSpectrum,
    pub exact: Field,
    pub data: CauchyData,
    pub target: CauchyData,
    /// Modes carrying the low band, ascending.
    pub low_modes: Vec<i64>,
    pub hf_mode: Option<i64>,
}

struct Profile {
    u: Vec<Complex64>,
    start: (Complex64, Complex64),
    end: (Complex64, Complex64),
}

fn energy(state: (Complex64, Complex64), k: f64) -> f64 {
    (k * k * state.0.norm_sqr() + state.1.norm_sqr()).sqrt()
}

fn strip_profile(m: i64, k: f64, phase: f64, c: &StripCoefficients, g: &Geometry) -> Profile {
    let omega2 = c.omega2(g.frequency(m), k);
    let eval = |z: f64| -> (f64, f64) {
        if omega2 > 0.0 {
            let w = omega2.sqrt();
            ((w * z + phase).sin(), w * (w * z + phase).cos())
        } else if omega2 < 0.0 {
            let kappa = (-omega2).sqrt();
            ((kappa * z + phase).sinh(), kappa * (kappa * z + phase).cosh())
        } else {
            (phase.sin() + z, 1.0)
        }
    };
    let nodes = g.normal_nodes();
    let u = nodes.iter().map(|&z| Complex64::new(eval(z).0, 0.0)).collect();
    let (a, b) = eval(0.0);
    let (c1, d1) = eval(1.0);
    Profile {
        u,
        start: (a.into(), b.into()),
        end: (c1.into(), d1.into()),
    }
}

fn annulus_profile(m: i64, k: f64, phase: f64, c: &RadialCoefficients, ag: &AnnulusGeometry) -> Result<Profile> {
    let g: Geometry = (*ag).into();
    let nodes = g.normal_nodes();
    if c.is_laplacian() {
        let (cj, cy) = (phase.cos(), phase.sin());
        let eval = |r: f64| -> Result<(f64, f64)> {
            let b = bessel_basis(m, k * r)?;
            Ok((cj * b.j + cy * b.y, k * (cj * b.dj + cy * b.dy)))
        };
        let u = nodes.iter().map(|&r| Ok(Complex64::new(eval(r)?.0, 0.0))).collect::<Result<Vec<_>>>()?;
        let (a, b) = eval(1.0)?;
        let (c1, d1) = eval(ag.outer_radius())?;
        return Ok(Profile {
            u,
            start: (a.into(), b.into()),
            end: (c1.into(), d1.into()),
        });
    }
    let start = (Complex64::new(phase.cos(), 0.0), Complex64::new(k * phase.sin(), 0.0));
    let p = continue_mode_annulus(m, k, start.0, start.1, None, c, ag, 1e-4)?;
    let last = p.u.len() - 1;
    Ok(Profile {
        end: (p.u[last], p.du[last]),
        u: p.u,
        start,
    })
}

fn mode_profile(m: i64, k: f64, phase: f64, model: &CoefficientModel, g: &Geometry) -> Result<Profile> {
    match (model, g) {
        (CoefficientModel::Strip(c), Geometry::Strip(_)) => Ok(strip_profile(m, k, phase, c, g)),
        (CoefficientModel::Radial(c), Geometry::Annulus(ag)) => annulus_profile(m, k, phase, c, ag),
        _ => Err(Error::Geometry("coefficient model does not match the geometry".into())),
    }
}

fn check_nyquist(g: &Geometry, m: i64) -> Result<()> {
    if m.abs() > g.nyquist() {
        return Err(Error::BeyondNyquist {
            mode: m,
            nyquist: g.nyquist(),
        });
    }
    Ok(())
}

/// Grid mode whose tangential frequency is the smallest one at or above `xi`.
fn mode_at_frequency(g: &Geometry, xi: f64) -> i64 {
    (xi * g.period() / (2.0 * std::f64::consts::PI) - 1e-9).ceil() as i64
}

pub fn manufacture_solution(kind: SolutionKind, k: f64, model: &CoefficientModel, geometry: &Geometry) -> Result<ManufacturedSolution> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::param("k", format!("must be positive, got {k}")));
    }
    let mut low: Vec<i64> = Vec::new();
    let mut single: Option<i64> = None;
    let mut hf: Option<(i64, f64)> = None;
    match kind {
        SolutionKind::Zero => {}
        SolutionKind::SingleMode { mode } => {
            check_nyquist(geometry, mode)?;
            single = Some(mode);
        }
        SolutionKind::LowBand { band } | SolutionKind::Mixed { band, .. } => {
            if !(band.is_finite() && band >= 0.0) {
                return Err(Error::param("band", format!("must be nonnegative, got {band}")));
            }
            let top = (band * k * geometry.period() / (2.0 * std::f64::consts::PI) + 1e-9).floor() as i64;
            check_nyquist(geometry, top)?;
            low = (-top..=top).collect();
            if let SolutionKind::Mixed {
                hf_multiplier,
                hf_amplitude,
                ..
            } = kind
            {
                if !(hf_multiplier.is_finite() && hf_multiplier > 0.0) {
                    return Err(Error::param("hf_multiplier", format!("must be positive, got {hf_multiplier}")));
                }
                let m = mode_at_frequency(geometry, hf_multiplier * k);
                check_nyquist(geometry, m)?;
                if m <= top {
                    return Err(Error::param("hf_multiplier", "high-frequency mode falls inside the low band"));
                }
                hf = Some((m, hf_amplitude));
            }
        }
    }

    let mut spectrum = ModeSpectrum::zeros(*geometry);
    let modes = geometry.mode_numbers();
    let zero = Complex64::default();
    let mut start = vec![(zero, zero); modes.len()];
    let mut end = vec![(zero, zero); modes.len()];
    let mut put = |m: i64, p: &Profile, scale: f64| {
        let col = geometry.mode_index(m).expect("mode checked against Nyquist");
        let scaled: Vec<Complex64> = p.u.iter().map(|v| v * scale).collect();
        spectrum.set_column(col, &scaled);
        start[col] = (p.start.0 * scale, p.start.1 * scale);
        end[col] = (p.end.0 * scale, p.end.1 * scale);
    };

    if let Some(m) = single {
        put(m, &mode_profile(m, k, 0.0, model, geometry)?, 1.0);
    }
    if !low.is_empty() {
        let profiles = low
            .iter()
            .map(|&m| mode_profile(m, k, 0.7 * m as f64 + 0.3, model, geometry))
            .collect::<Result<Vec<_>>>()?;
        let total = profiles.iter().map(|p| energy(p.start, k).powi(2)).sum::<f64>().sqrt();
        let scale = if total > 0.0 { 1.0 / total } else { 0.0 };
        for (m, p) in low.iter().zip(&profiles) {
            put(*m, p, scale);
        }
    }
    if let Some((m, amplitude)) = hf {
        let p = mode_profile(m, k, 0.0, model, geometry)?;
        let e = energy(p.end, k);
        put(m, &p, if e > 0.0 { amplitude / e } else { 0.0 });
    }
    let exact = inverse_transform(&spectrum);
    let split = |s: &[(Complex64, Complex64)]| -> (Vec<Complex64>, Vec<Complex64>) { s.iter().copied().unzip() };
    let (u0, u1) = split(&start);
    let (ur, dur) = split(&end);
    Ok(ManufacturedSolution {
        id: kind.to_string(),
        k,
        spectrum,
        exact,
        data: CauchyData::new(modes.clone(), u0, u1, k)?,
        target: CauchyData::new(modes, ur, dur, k)?,
        low_modes: low,
        hf_mode: hf.map(|(m, _)| m),
    })
}

/// Largest relative residual `|L_m u_m| / (k² max|u|)` of the per-mode
/// equations, by fourth-order centred differences at interior normal nodes.
pub fn pde_residual(spectrum: &ModeSpectrum, k: f64, model: &CoefficientModel) -> Result<f64> {
    let g = *spectrum.geometry();
    let nodes = g.normal_nodes();
    let h = g.normal_step();
    let n = nodes.len();
    if n < 5 {
        return Err(Error::Shape("need at least five normal nodes".into()));
    }
    let scale = spectrum.coeffs().iter().map(|v| v.norm()).fold(0.0, f64::max) * k * k;
    if scale == 0.0 {
        return Ok(0.0);
    }
    let mut worst = 0.0f64;
    for (col, m) in g.mode_numbers().into_iter().enumerate() {
        let u = spectrum.column(col);
        for j in 2..n - 2 {
            let d1 = (u[j - 2] - u[j - 1] * 8.0 + u[j + 1] * 8.0 - u[j + 2]) / (12.0 * h);
            let d2 = (-u[j - 2] + u[j - 1] * 16.0 - u[j] * 30.0 + u[j + 1] * 16.0 - u[j + 2]) / (12.0 * h * h);
            let r = nodes[j];
            let res = match (model, &g) {
                (CoefficientModel::Strip(c), Geometry::Strip(_)) => d2 * c.a22 + u[j] * (c.omega2(g.frequency(m), k) * c.a22),
                (CoefficientModel::Radial(c), Geometry::Annulus(_)) => {
                    d2 * c.a22.eval(r) + d1 * c.a2.eval(r) + u[j] * c.mode_potential(m, k, r)
                }
                _ => return Err(Error::Geometry("coefficient model does not match the geometry".into())),
            };
            worst = worst.max(res.norm() / scale);
        }
    }
    Ok(worst)
}

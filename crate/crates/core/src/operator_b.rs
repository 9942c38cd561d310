//! The Neumann-to-trace operator `B: g ↦ u|Γ₀` on the annulus, where `u`
//! solves the homogeneous equation with `∂_r u = 0` on Γ₀ and `∂_r u = g` on Γ₁.
//! Rotational symmetry makes it diagonal in the angular modes.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::coefficients::RadialCoefficients;
use crate::continuation::radial::{energy, RadialOde, State};
use crate::error::{Error, Result};
use crate::geometry::{AnnulusGeometry, Geometry};
use crate::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorBOptions {
    /// Largest `|m|`; 0 selects `⌈2kR⌉`.
    pub m_max: usize,
    pub resonance_tol: f64,
    pub step_check_tol: f64,
}

impl Default for OperatorBOptions {
    fn default() -> Self {
        Self {
            m_max: 0,
            resonance_tol: 1e-8,
            step_check_tol: 1e-4,
        }
    }
}

/// Determinant of the mode-`m` Neumann boundary system and the magnitude
/// of the fundamental matrix it is compared against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeumannDeterminant {
    pub det: Complex64,
    pub scale: f64,
}

impl NeumannDeterminant {
    pub fn relative(&self) -> f64 {
        self.det.norm() / self.scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannModeSolution {
    pub mode: i64,
    /// `u_m` on the radial grid of the geometry.
    pub profile: Vec<Complex64>,
    /// `u_m(1)`.
    pub trace: Complex64,
    pub determinant: NeumannDeterminant,
    /// `1/|det|`.
    pub condition: f64,
}

/// Radial grids are refined by doubling up to this many nodes when the step check fails.
const MAX_REFINED_N_RADIAL: usize = 65537;

struct Fundamental {
    /// `y1` with `(y1, y1')(1) = (1, 0)` on the original grid nodes.
    y1: Vec<State>,
    y1_end: State,
    y2_end: State,
}

fn fundamental(m: i64, k: f64, coeffs: &RadialCoefficients, geometry: &AnnulusGeometry, step_check_tol: f64) -> Result<Fundamental> {
    let mut refined = *geometry;
    let mut stride = 1;
    loop {
        match fundamental_on(m, k, coeffs, &refined, step_check_tol) {
            Err(Error::StepInstability { n_radial, .. }) if n_radial <= MAX_REFINED_N_RADIAL => {
                refined = AnnulusGeometry::new(refined.outer_radius(), refined.n_angular(), n_radial)?;
                stride *= 2;
            }
            Err(e) => return Err(e),
            Ok(mut f) => {
                f.y1 = f.y1.into_iter().step_by(stride).collect();
                return Ok(f);
            }
        }
    }
}

fn fundamental_on(m: i64, k: f64, coeffs: &RadialCoefficients, geometry: &AnnulusGeometry, step_check_tol: f64) -> Result<Fundamental> {
    let nodes = Geometry::from(*geometry).normal_nodes();
    let ode = RadialOde { coeffs, m, k };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let last = nodes.len() - 1;
    let mut runs = Vec::with_capacity(2);
    for start in [(one, zero), (zero, one)] {
        let fine = ode.integrate(&nodes, start, None, true);
        let (coarse, idx) = ode.integrate_doubled(&nodes, start, None, true);
        let reference = energy(fine[idx], k);
        let rel = if reference > 0.0 {
            energy((coarse.0 - fine[idx].0, coarse.1 - fine[idx].1), k) / reference
        } else {
            0.0
        };
        if rel > step_check_tol {
            return Err(Error::StepInstability {
                mode: m,
                relative: rel,
                n_radial: 2 * last + 1,
            });
        }
        runs.push(fine);
    }
    let y2 = runs.pop().expect("two runs");
    let y1 = runs.pop().expect("two runs");
    Ok(Fundamental {
        y1_end: y1[last],
        y2_end: y2[last],
        y1,
    })
}

/// Boundary determinant of mode `m` at wave number `k`. Its sign changes
/// across a Neumann resonance when the coefficients are real.
pub fn neumann_determinant(m: i64, k: f64, coeffs: &RadialCoefficients, geometry: &AnnulusGeometry) -> Result<NeumannDeterminant> {
    let f = fundamental(m, k, coeffs, geometry, f64::INFINITY)?;
    Ok(determinant_of(f.y1_end, f.y2_end))
}

fn determinant_of(y1: State, y2: State) -> NeumannDeterminant {
    let scale = [y1.0, y1.1, y2.0, y2.1].iter().fold(1.0f64, |s, v| s.max(v.norm()));
    // unknowns (a, b) of u = a y1 + b y2; rows: u'(1) = b, u'(R) = a y1'(R) + b y2'(R)
    NeumannDeterminant { det: -y1.1, scale }
}

/// Solves mode `m` with `u'_m(1) = 0`, `u'_m(R) = g`. Fails with
/// [`Error::Resonance`] when the boundary determinant is below
/// `resonance_tol` relative to the fundamental matrix.
pub fn solve_neumann_mode(
    m: i64,
    k: f64,
    g: Complex64,
    coeffs: &RadialCoefficients,
    geometry: &AnnulusGeometry,
    options: &OperatorBOptions,
) -> Result<NeumannModeSolution> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::param("k", format!("must be positive, got {k}")));
    }
    let f = fundamental(m, k, coeffs, geometry, options.step_check_tol)?;
    let determinant = determinant_of(f.y1_end, f.y2_end);
    if determinant.relative() < options.resonance_tol {
        return Err(Error::Resonance {
            mode: m,
            relative: determinant.relative(),
        });
    }
    let alpha = g / f.y1_end.1;
    Ok(NeumannModeSolution {
        mode: m,
        profile: f.y1.iter().map(|y| y.0 * alpha).collect(),
        trace: alpha,
        determinant,
        condition: 1.0 / determinant.det.norm(),
    })
}

/// Singular values `σ_m = ‖B e_m‖/‖e_m‖` for `|m| ≤ m_max`, ordered by `|m|`
/// (then by sign). Resonant modes carry the unregularized value and a flag.
#[derive(Debug, Clone, PartialEq)]
pub struct SingularSpectrum {
    pub k: f64,
    pub modes: Vec<i64>,
    pub sigma: Vec<f64>,
    pub resonant: Vec<bool>,
    pub condition: Vec<f64>,
}

impl SingularSpectrum {
    pub fn sigma_at(&self, m: i64) -> Option<f64> {
        self.modes.iter().position(|&x| x == m).map(|i| self.sigma[i])
    }

    pub fn is_resonant(&self, m: i64) -> Option<bool> {
        self.modes.iter().position(|&x| x == m).map(|i| self.resonant[i])
    }

    /// Non-flagged singular values sorted in decreasing order.
    pub fn sorted_sigma(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .sigma
            .iter()
            .zip(&self.resonant)
            .filter(|(_, &r)| !r)
            .map(|(s, _)| *s)
            .collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn write_csv(&self, mut out: impl Write, header: bool) -> Result<()> {
        if header {
            writeln!(out, "k,m,sigma,resonant")?;
        }
        for i in 0..self.modes.len() {
            writeln!(out, "{},{},{},{}", self.k, self.modes[i], self.sigma[i], self.resonant[i])?;
        }
        Ok(())
    }
}

pub fn operator_b_spectrum(
    k: f64,
    coeffs: &RadialCoefficients,
    geometry: &AnnulusGeometry,
    options: &OperatorBOptions,
) -> Result<SingularSpectrum> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::param("k", format!("must be positive, got {k}")));
    }
    let r_out = geometry.outer_radius();
    let m_max = if options.m_max == 0 {
        (2.0 * k * r_out).ceil() as i64
    } else {
        options.m_max as i64
    };
    let mut modes = vec![0i64];
    for m in 1..=m_max {
        modes.push(-m);
        modes.push(m);
    }
    let dets = modes
        .par_iter()
        .map(|&m| {
            let f = fundamental(m, k, coeffs, geometry, options.step_check_tol)?;
            Ok((f.y1_end.1, determinant_of(f.y1_end, f.y2_end)))
        })
        .collect::<Result<Vec<_>>>()?;
    // ‖e_m‖ on Γ₁ is √R, on Γ₀ it is 1
    Ok(SingularSpectrum {
        k,
        sigma: dets.iter().map(|(dy, _)| 1.0 / (dy.norm() * r_out.sqrt())).collect(),
        resonant: dets.iter().map(|(_, d)| d.relative() < options.resonance_tol).collect(),
        condition: dets.iter().map(|(_, d)| 1.0 / d.det.norm()).collect(),
        modes,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlateauRow {
    pub k: f64,
    pub m_star: i64,
    pub min_sigma_plateau: f64,
    pub n_resonant: usize,
}

/// Plateau summary across wave numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjectureReport {
    pub theta: f64,
    pub rows: Vec<PlateauRow>,
    /// Least-squares slope of `m*(k)` against `k` through the origin.
    pub delta2_hat: f64,
    /// Smallest plateau singular value over all `k`.
    pub delta1_hat: f64,
    pub warnings: Vec<String>,
}

impl ConjectureReport {
    pub fn plateau_ratios(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m_star as f64 / r.k).collect()
    }
}

impl fmt::Display for ConjectureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "theta={}", self.theta)?;
        writeln!(f, "delta1_hat={}", self.delta1_hat)?;
        writeln!(f, "delta2_hat={}", self.delta2_hat)?;
        for w in &self.warnings {
            writeln!(f, "warning={w}")?;
        }
        writeln!(f, "k,m_star,m_star_over_k,min_sigma_plateau,n_resonant")?;
        for r in &self.rows {
            writeln!(f, "{},{},{},{},{}", r.k, r.m_star, r.m_star as f64 / r.k, r.min_sigma_plateau, r.n_resonant)?;
        }
        Ok(())
    }
}

/// `m*(k)` is the largest `|m|` with `σ_m ≥ θ σ_ref`, where `σ_ref` is `σ_0`
/// (or the lowest-order non-flagged value when mode 0 is resonant).
/// Flagged modes never enter; a `k` whose modes are all flagged is dropped
/// with a warning.
pub fn conjecture_metrics(spectra: &[SingularSpectrum], theta: f64) -> Result<ConjectureReport> {
    if spectra.is_empty() {
        return Err(Error::Empty("no spectra".into()));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::param("theta_plateau", format!("must lie in (0, 1], got {theta}")));
    }
    let mut rows = Vec::with_capacity(spectra.len());
    let mut warnings = Vec::new();
    for s in spectra {
        let usable: Vec<(i64, f64)> = s
            .modes
            .iter()
            .zip(&s.sigma)
            .zip(&s.resonant)
            .filter(|(_, &r)| !r)
            .map(|((m, v), _)| (*m, *v))
            .collect();
        let Some(&(_, reference)) = usable.iter().min_by_key(|(m, _)| m.abs()) else {
            warnings.push(format!("k = {}: every mode is resonant, dropped", s.k));
            continue;
        };
        let threshold = theta * reference;
        let m_star = usable.iter().filter(|(_, v)| *v >= threshold).map(|(m, _)| m.abs()).max().unwrap_or(0);
        let min_sigma_plateau = usable
            .iter()
            .filter(|(m, _)| m.abs() <= m_star)
            .fold(f64::INFINITY, |acc, (_, v)| acc.min(*v));
        rows.push(PlateauRow {
            k: s.k,
            m_star,
            min_sigma_plateau,
            n_resonant: s.resonant.iter().filter(|&&r| r).count(),
        });
    }
    if rows.is_empty() {
        return Err(Error::Empty("every wave number was dropped".into()));
    }
    let num: f64 = rows.iter().map(|r| r.k * r.m_star as f64).sum();
    let den: f64 = rows.iter().map(|r| r.k * r.k).sum();
    let delta1_hat = rows.iter().fold(f64::INFINITY, |a, r| a.min(r.min_sigma_plateau));
    Ok(ConjectureReport {
        theta,
        rows,
        delta2_hat: num / den,
        delta1_hat,
        warnings,
    })
}

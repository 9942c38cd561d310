use rayon::prelude::*;

use super::radial::{energy, RadialOde, State};
use super::strip::{assemble, ModeOutcome};
use super::{check_inputs, ContinuationOptions, ContinuationResult, ModeDiagnostics, ModePolicy};
use crate::coefficients::RadialCoefficients;
use crate::error::{Error, Result};
use crate::field::CauchyData;
use crate::geometry::{AnnulusGeometry, Geometry};
use crate::spectral::{ModeSpectrum, SpectralCutoff};
use crate::Complex64;

/// Radial profile of one angular mode and its derivative on the radial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub mode: i64,
    pub u: Vec<Complex64>,
    pub du: Vec<Complex64>,
    /// Spectral norm of the energy-scaled map `(k u, u')(1) ↦ (k u, u')(R)`.
    pub amplification: f64,
    /// Relative step-doubling discrepancy of the fundamental system.
    pub step_discrepancy: f64,
}

fn spectral_norm(m: [[Complex64; 2]; 2]) -> f64 {
    let s: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).norm();
    ((s + (s * s - 4.0 * det * det).max(0.0).sqrt()) / 2.0).sqrt()
}

fn discrepancy(ode: &RadialOde, nodes: &[f64], start: State, source: Option<&[Complex64]>, fine: &[State], k: f64) -> f64 {
    let (coarse, idx) = ode.integrate_doubled(nodes, start, source, true);
    let reference = energy(fine[idx], k);
    if reference == 0.0 {
        return 0.0;
    }
    energy((coarse.0 - fine[idx].0, coarse.1 - fine[idx].1), k) / reference
}

/// RK4 continuation of a single angular mode from `(u0, u1)` at `r = 1`.
///
/// The step-doubling check compares against integration with twice the step;
/// a relative discrepancy above `step_check_tol` is an error suggesting a
/// finer radial grid.
#[allow(clippy::too_many_arguments)]
pub fn continue_mode_annulus(
    m: i64,
    k: f64,
    u0: Complex64,
    u1: Complex64,
    source: Option<&[Complex64]>,
    coeffs: &RadialCoefficients,
    geometry: &AnnulusGeometry,
    step_check_tol: f64,
) -> Result<ModeProfile> {
    let g: Geometry = (*geometry).into();
    let nodes = g.normal_nodes();
    if let Some(s) = source {
        if s.len() != nodes.len() {
            return Err(Error::Shape("source profile length differs from radial grid".into()));
        }
    }
    let ode = RadialOde { coeffs, m, k };
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::default();
    let y1 = ode.integrate(&nodes, (one, zero), None, true);
    let y2 = ode.integrate(&nodes, (zero, one), None, true);
    let particular = source.map(|s| ode.integrate(&nodes, (zero, zero), Some(s), true));

    let mut step_discrepancy = discrepancy(&ode, &nodes, (one, zero), None, &y1, k)
        .max(discrepancy(&ode, &nodes, (zero, one), None, &y2, k));
    if let (Some(s), Some(p)) = (source, &particular) {
        step_discrepancy = step_discrepancy.max(discrepancy(&ode, &nodes, (zero, zero), Some(s), p, k));
    }
    if step_discrepancy > step_check_tol {
        return Err(Error::StepInstability {
            mode: m,
            relative: step_discrepancy,
            n_radial: 2 * (nodes.len() - 1) + 1,
        });
    }

    let last = nodes.len() - 1;
    // energy scaling D M D⁻¹ with D = diag(k, 1)
    let scaled = [[y1[last].0, y2[last].0 * k], [y1[last].1 / k, y2[last].1]];
    let amplification = spectral_norm(scaled);

    let mut u = Vec::with_capacity(nodes.len());
    let mut du = Vec::with_capacity(nodes.len());
    for j in 0..nodes.len() {
        let mut a = y1[j].0 * u0 + y2[j].0 * u1;
        let mut b = y1[j].1 * u0 + y2[j].1 * u1;
        if let Some(p) = &particular {
            a += p[j].0;
            b += p[j].1;
        }
        u.push(a);
        du.push(b);
    }
    Ok(ModeProfile {
        mode: m,
        u,
        du,
        amplification,
        step_discrepancy,
    })
}

/// Homogeneous RK4 propagation of `(u_m, u'_m)` from `r = R` back to `r = 1`.
pub fn reverse_mode_annulus(
    m: i64,
    k: f64,
    u_out: Complex64,
    du_out: Complex64,
    coeffs: &RadialCoefficients,
    geometry: &AnnulusGeometry,
) -> (Complex64, Complex64) {
    let nodes = Geometry::from(*geometry).normal_nodes();
    let ode = RadialOde { coeffs, m, k };
    ode.integrate(&nodes, (u_out, du_out), None, false)[0]
}

/// Mode-wise RK4 continuation on the annulus `1 ≤ r ≤ R`.
pub fn continue_annulus(
    data: &CauchyData,
    source: Option<&ModeSpectrum>,
    coeffs: &RadialCoefficients,
    geometry: &AnnulusGeometry,
    cutoff: &SpectralCutoff,
    options: &ContinuationOptions,
) -> Result<ContinuationResult> {
    let g: Geometry = (*geometry).into();
    check_inputs(data, source, &g, cutoff)?;
    let k = data.k();
    let n = g.n_normal();
    let modes = g.mode_numbers();
    let a22_inner = coeffs.a22.eval(1.0);
    let outcomes: Vec<ModeOutcome> = modes
        .par_iter()
        .enumerate()
        .map(|(col, &m)| {
            let diag = ModeDiagnostics {
                mode: m,
                omega2: coeffs.mode_potential(m, k, 1.0).re / a22_inner,
                amplification: 0.0,
                kept: cutoff.keeps(m),
                computed: true,
                flagged: false,
            };
            if options.mode_policy == ModePolicy::LowOnly && !diag.kept {
                return ModeOutcome::skipped(n, ModeDiagnostics { computed: false, ..diag });
            }
            let src = source.map(|s| s.column(col));
            let solved = continue_mode_annulus(
                m,
                k,
                data.u0()[col],
                data.u1()[col],
                src.as_deref(),
                coeffs,
                geometry,
                options.step_check_tol,
            );
            match solved {
                Ok(p) => ModeOutcome {
                    target: (p.u[n - 1], p.du[n - 1]),
                    profile: p.u,
                    diag: ModeDiagnostics {
                        amplification: p.amplification,
                        ..diag
                    },
                    warning: None,
                }
                .guard_overflow(),
                Err(e) => {
                    let mut out = ModeOutcome::skipped(n, ModeDiagnostics { flagged: true, ..diag });
                    out.warning = Some(format!("mode {m}: {e}; mode set to zero"));
                    out
                }
            }
        })
        .collect();
    assemble(g, data, cutoff, outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::continuation::bessel::bessel_basis;

    #[test]
    fn bessel_mode_matches_oracle() {
        let geom = AnnulusGeometry::new(2.0, 32, 1025).unwrap();
        let (m, k) = (3i64, 10.0);
        let b0 = bessel_basis(m, k).unwrap();
        let p = continue_mode_annulus(
            m,
            k,
            b0.j.into(),
            (k * b0.dj).into(),
            None,
            &RadialCoefficients::laplacian(),
            &geom,
            1e-4,
        )
        .unwrap();
        let b1 = bessel_basis(m, 2.0 * k).unwrap();
        assert!((p.u[1024].re - b1.j).abs() < 1e-8);
        assert!((p.du[1024].re - k * b1.dj).abs() < 1e-7);
    }

    #[test]
    fn backward_propagation_returns_data() {
        let geom = AnnulusGeometry::with_defaults(2.0).unwrap();
        let lap = RadialCoefficients::laplacian();
        let (u0, u1) = (Complex64::new(0.4, 0.1), Complex64::new(-2.0, 0.7));
        let p = continue_mode_annulus(6, 12.0, u0, u1, None, &lap, &geom, 1e-4).unwrap();
        let last = p.u.len() - 1;
        let back = reverse_mode_annulus(6, 12.0, p.u[last], p.du[last], &lap, &geom);
        assert!((back.0 - u0).norm() < 1e-8 && (back.1 - u1).norm() < 1e-8);
    }

    #[test]
    fn coarse_grid_trips_step_check() {
        let geom = AnnulusGeometry::new(2.0, 32, 9).unwrap();
        let err = continue_mode_annulus(
            20,
            30.0,
            Complex64::new(1.0, 0.0),
            Complex64::default(),
            None,
            &RadialCoefficients::laplacian(),
            &geom,
            1e-4,
        )
        .unwrap_err();
        match err {
            Error::StepInstability { n_radial, .. } => assert_eq!(n_radial, 17),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_continuation_is_deterministic_and_finite() {
        let geom = AnnulusGeometry::new(2.0, 32, 513).unwrap();
        let g: Geometry = geom.into();
        let k = 5.0;
        let c = SpectralCutoff::new(k, 1.0, 0.19, &g).unwrap();
        let data = CauchyData::new(
            g.mode_numbers(),
            (0..32).map(|i| Complex64::new(i as f64 * 0.1, 0.0)).collect(),
            vec![Complex64::new(0.0, 0.3); 32],
            k,
        )
        .unwrap();
        let lap = RadialCoefficients::laplacian();
        let a = continue_annulus(&data, None, &lap, &geom, &c, &Default::default()).unwrap();
        let b = continue_annulus(&data, None, &lap, &geom, &c, &Default::default()).unwrap();
        assert_eq!(a.field, b.field);
        assert!(a.diagnostics.iter().all(|d| d.amplification.is_finite() && !d.flagged));
    }
}

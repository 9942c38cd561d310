use rayon::prelude::*;

use super::transfer::{duhamel_states, TransferMatrix2};
use super::{check_inputs, ContinuationOptions, ContinuationResult, ModeDiagnostics, ModePolicy, OVERFLOW_GAIN};
use crate::coefficients::StripCoefficients;
use crate::error::Result;
use crate::field::CauchyData;
use crate::geometry::{Geometry, StripGeometry};
use crate::spectral::{inverse_transform, ModeSpectrum, SpectralCutoff};
use crate::Complex64;

pub(crate) struct ModeOutcome {
    pub profile: Vec<Complex64>,
    pub target: (Complex64, Complex64),
    pub diag: ModeDiagnostics,
    pub warning: Option<String>,
}

impl ModeOutcome {
    pub fn skipped(n: usize, diag: ModeDiagnostics) -> Self {
        let zero = Complex64::default();
        Self {
            profile: vec![zero; n],
            target: (zero, zero),
            diag,
            warning: None,
        }
    }

    /// Zeroes the mode if its propagator or values overflowed.
    pub fn guard_overflow(self) -> Self {
        let finite = self.profile.iter().all(|v| v.re.is_finite() && v.im.is_finite())
            && [self.target.0, self.target.1].iter().all(|v| v.re.is_finite() && v.im.is_finite());
        if !finite || !(self.diag.amplification <= OVERFLOW_GAIN) {
            let m = self.diag.mode;
            let mut out = Self::skipped(self.profile.len(), self.diag);
            out.diag.flagged = true;
            out.warning = Some(format!("mode {m}: amplification {:.3e} overflows, mode set to zero", self.diag.amplification));
            return out;
        }
        self
    }
}

pub(crate) fn assemble(
    geometry: Geometry,
    data: &CauchyData,
    cutoff: &SpectralCutoff,
    outcomes: Vec<ModeOutcome>,
) -> Result<ContinuationResult> {
    let mut spectrum = ModeSpectrum::zeros(geometry);
    let mut u = Vec::with_capacity(outcomes.len());
    let mut du = Vec::with_capacity(outcomes.len());
    let mut diagnostics = Vec::with_capacity(outcomes.len());
    let mut warnings = Vec::new();
    for (col, o) in outcomes.into_iter().enumerate() {
        spectrum.set_column(col, &o.profile);
        u.push(o.target.0);
        du.push(o.target.1);
        diagnostics.push(o.diag);
        warnings.extend(o.warning);
    }
    let field = inverse_transform(&spectrum);
    let target = CauchyData::new(data.modes().to_vec(), u, du, data.k())?;
    Ok(ContinuationResult {
        spectrum,
        field,
        target,
        diagnostics,
        cutoff: cutoff.clone(),
        warnings,
    })
}

/// Exact mode-wise continuation on the strip: closed-form propagators for the
/// homogeneous part, Duhamel quadrature for the source.
pub fn continue_strip(
    data: &CauchyData,
    source: Option<&ModeSpectrum>,
    coeffs: &StripCoefficients,
    geometry: &StripGeometry,
    cutoff: &SpectralCutoff,
    options: &ContinuationOptions,
) -> Result<ContinuationResult> {
    let g: Geometry = (*geometry).into();
    check_inputs(data, source, &g, cutoff)?;
    let k = data.k();
    let nodes = g.normal_nodes();
    let h = g.normal_step();
    let n = nodes.len();
    let modes = g.mode_numbers();
    let outcomes: Vec<ModeOutcome> = modes
        .par_iter()
        .enumerate()
        .map(|(col, &m)| {
            let omega2 = coeffs.omega2(g.frequency(m), k);
            let full = TransferMatrix2::closed_form(omega2, 1.0, m);
            let diag = ModeDiagnostics {
                mode: m,
                omega2,
                amplification: full.scaled_norm(k),
                kept: cutoff.keeps(m),
                computed: true,
                flagged: false,
            };
            if options.mode_policy == ModePolicy::LowOnly && !diag.kept {
                return ModeOutcome::skipped(n, ModeDiagnostics { computed: false, ..diag });
            }
            let start = (data.u0()[col], data.u1()[col]);
            let particular = source.map(|s| {
                let rhs: Vec<Complex64> = s.column(col).iter().map(|v| v / coeffs.a22).collect();
                duhamel_states(omega2, h, &rhs)
            });
            let mut profile = Vec::with_capacity(n);
            let mut target = start;
            for (j, &z) in nodes.iter().enumerate() {
                let mut st = if j == 0 { start } else { TransferMatrix2::closed_form(omega2, z, m).apply(start) };
                if let Some(p) = &particular {
                    st = (st.0 + p[j].0, st.1 + p[j].1);
                }
                profile.push(st.0);
                target = st;
            }
            ModeOutcome {
                profile,
                target,
                diag,
                warning: None,
            }
            .guard_overflow()
        })
        .collect();
    assemble(g, data, cutoff, outcomes)
}

use rayon::prelude::*;

use super::manufacture::{manufacture_solution, SolutionKind};
use super::stability::{stability_ratio, StabilityRecord, StabilitySetup};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub setup: StabilitySetup,
    pub solution: SolutionKind,
    pub k_list: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// One record per requested `k`, in request order.
    pub records: Vec<StabilityRecord>,
    pub max_ratio: f64,
    pub min_ratio: f64,
    /// Least-squares slope of `log(ratio)` against `log(k)` over successful records.
    pub trend_slope: f64,
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    if points.len() < 2 {
        return f64::NAN;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub fn sweep_k(spec: &SweepSpec) -> Result<SweepReport> {
    if spec.k_list.len() < 2 {
        return Err(Error::param("k_list", "a sweep needs at least two wave numbers"));
    }
    let s = &spec.setup;
    let records: Vec<StabilityRecord> = spec
        .k_list
        .par_iter()
        .map(|&k| {
            manufacture_solution(spec.solution, k, &s.model, &s.geometry)
                .and_then(|sol| stability_ratio(&sol, s))
                .unwrap_or_else(|e| StabilityRecord::failed(k, &s.geometry, s.noise_delta, s.theta, e.to_string()))
        })
        .collect();
    let ok: Vec<&StabilityRecord> = records.iter().filter(|r| !r.is_failed()).collect();
    let max_ratio = ok.iter().map(|r| r.ratio).fold(f64::NAN, f64::max);
    let min_ratio = ok.iter().map(|r| r.ratio).fold(f64::NAN, f64::min);
    let pts: Vec<(f64, f64)> = ok.iter().map(|r| (r.k.ln(), r.ratio.ln())).collect();
    Ok(SweepReport {
        trend_slope: ls_slope(&pts),
        records,
        max_ratio,
        min_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{CoefficientModel, RadialCoefficients};
    use crate::continuation::ModePolicy;
    use crate::geometry::AnnulusGeometry;

    fn spec(k_list: Vec<f64>) -> SweepSpec {
        SweepSpec {
            setup: StabilitySetup {
                model: CoefficientModel::Radial(RadialCoefficients::laplacian()),
                geometry: AnnulusGeometry::new(2.0, 32, 257).unwrap().into(),
                eps: 0.19,
                noise_delta: 1e-3,
                seed: 11,
                theta: 0.1,
                mode_policy: ModePolicy::LowOnly,
            },
            solution: SolutionKind::LowBand { band: 0.5 },
            k_list,
        }
    }

    #[test]
    fn identical_k_entries_give_identical_records() {
        let r = sweep_k(&spec(vec![6.0, 6.0])).unwrap();
        assert_eq!(r.records[0], r.records[1]);
        assert_eq!(r.max_ratio, r.min_ratio);
    }

    #[test]
    fn failures_are_recorded_and_the_sweep_completes() {
        // band·k = 20 exceeds the Nyquist mode 15 at k = 40
        let r = sweep_k(&spec(vec![4.0, 40.0, 8.0])).unwrap();
        assert_eq!(r.records.len(), 3);
        assert!(r.records[1].is_failed());
        assert!(!r.records[0].is_failed() && !r.records[2].is_failed());
        assert!(r.trend_slope.is_finite());
    }

    #[test]
    fn needs_two_wave_numbers() {
        assert!(sweep_k(&spec(vec![5.0])).is_err());
    }

    #[test]
    fn slope_of_a_line() {
        assert!((ls_slope(&[(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)]) - 2.0).abs() < 1e-15);
    }
}

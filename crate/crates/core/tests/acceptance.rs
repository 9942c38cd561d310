//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use helmcont::config::RunConfig;
use helmcont::continuation::bessel::bessel_basis;
use helmcont::continuation::{continue_cauchy, continue_mode_annulus, transfer_matrix_strip, ContinuationOptions, ModePolicy};
use helmcont::experiments::{
    john_blowup_demo, manufacture_solution, stability_ratio, sweep_k, write_spectrum_csv, write_stability_csv, SolutionKind,
    StabilitySetup, SweepSpec,
};
use helmcont::operator_b::{conjecture_metrics, neumann_determinant, operator_b_spectrum, OperatorBOptions};
use helmcont::spectral::{
    forward_transform, hf_seminorm, hf_seminorm_spectrum, project_low, sobolev_norm_spectrum, split_low_high,
    tangential_derivative, SpectralCutoff,
};
use helmcont::{AnnulusGeometry, CoefficientModel, Complex64, Field, Geometry, RadialCoefficients, StripCoefficients, StripGeometry};
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 0.19;

struct Outcome {
    pass: bool,
    detail: String,
}

fn random_field(g: Geometry, rng: &mut ChaCha8Rng) -> Field {
    let values = Array2::from_shape_fn((g.n_normal(), g.n_tangential()), |_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    Field::new(g, values).unwrap()
}

fn slice_inner(a: &Field, b: &Field, j: usize) -> Complex64 {
    a.values().row(j).iter().zip(b.values().row(j)).map(|(x, y)| x * y.conj()).sum()
}

fn slice_sq(a: &Field, j: usize) -> f64 {
    a.values().row(j).iter().map(|v| v.norm_sqr()).sum()
}

// 1
fn projector_algebra() -> Outcome {
    const TOL: f64 = 1e-10;
    const TRIALS: usize = 200;
    let grids: [Geometry; 2] = [
        StripGeometry::new(2.0 * PI, 64, 33, 0.1).unwrap().into(),
        AnnulusGeometry::new(2.0, 128, 65).unwrap().into(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut idem, mut orth, mut bern) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for t in 0..TRIALS {
        let g = grids[t % 2];
        let k = rng.random_range(2.0..30.0);
        let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
        let v = random_field(g, &mut rng);
        let vl = project_low(&v, &cutoff).unwrap();
        let vll = project_low(&vl, &cutoff).unwrap();
        idem = idem.max(vll.max_abs_diff(&vl) / v.max_abs());
        let vh = Field::new(g, v.values() - vl.values()).unwrap();
        let dvl = helmcont::spectral::inverse_transform(&tangential_derivative(&forward_transform(&vl)));
        for j in 0..g.n_normal() {
            let scale = (slice_sq(&vl, j) * slice_sq(&vh, j)).sqrt().max(f64::MIN_POSITIVE);
            orth = orth.max(slice_inner(&vl, &vh, j).norm() / scale);
            // ‖∂_tan v_l‖² − factor·‖v_l‖² ≤ 0, relative to factor·‖v_l‖²
            let lim = cutoff.bernstein_factor() * slice_sq(&vl, j);
            if lim > 0.0 {
                bern = bern.max((slice_sq(&dvl, j) - lim) / lim);
            }
        }
    }
    Outcome {
        pass: idem <= TOL && orth <= TOL && bern <= TOL,
        detail: format!("{TRIALS} trials: idempotence {idem:.2e}, slice orthogonality {orth:.2e}, Bernstein excess {bern:.2e} (tol {TOL:.0e})"),
    }
}

fn bessel_rel_error(m: i64, k: f64, n_radial: usize) -> f64 {
    let g = AnnulusGeometry::new(2.0, 128, n_radial).unwrap();
    let b0 = bessel_basis(m, k).unwrap();
    let p = continue_mode_annulus(
        m,
        k,
        b0.j.into(),
        (k * b0.dj).into(),
        None,
        &RadialCoefficients::laplacian(),
        &g,
        f64::INFINITY,
    )
    .unwrap();
    let b1 = bessel_basis(m, 2.0 * k).unwrap();
    let last = n_radial - 1;
    let eu = p.u[last] - b1.j;
    let edu = (p.du[last] - k * b1.dj) / k;
    (eu.norm_sqr() + edu.norm_sqr()).sqrt() / (b1.j * b1.j + b1.dj * b1.dj).sqrt()
}

// 2
fn bessel_oracle() -> Outcome {
    const TOL: f64 = 1e-7;
    let (coarse, fine) = (129, 257);
    let mut worst = 0.0f64;
    let mut orders = Vec::new();
    for m in [0, 1, 3, 8] {
        for k in [5.0, 10.0, 20.0] {
            worst = worst.max(bessel_rel_error(m, k, AnnulusGeometry::DEFAULT_N_RADIAL));
            orders.push(bessel_rel_error(m, k, coarse) / bessel_rel_error(m, k, fine));
        }
    }
    let (lo, hi) = orders.iter().fold((f64::INFINITY, 0.0f64), |(a, b), r| (a.min(*r), b.max(*r)));
    Outcome {
        pass: worst <= TOL && lo >= 13.0 && hi <= 19.0,
        detail: format!(
            "max rel error {worst:.2e} at n_radial={} (tol {TOL:.0e}); error ratio {coarse}->{fine} nodes in [{lo:.2}, {hi:.2}] (want 16±3)",
            AnnulusGeometry::DEFAULT_N_RADIAL
        ),
    }
}

// 3
fn strip_increasing_stability() -> Outcome {
    let setup = StabilitySetup {
        model: CoefficientModel::Strip(StripCoefficients::laplacian()),
        geometry: StripGeometry::new(2.0 * PI, 256, 65, 0.1).unwrap().into(),
        eps: EPS,
        noise_delta: 1e-3,
        seed: 1,
        theta: 0.1,
        mode_policy: ModePolicy::LowOnly,
    };
    let bound = 1.0 / EPS.sqrt() * (1.0 + 1e-6);
    let mut ratios = Vec::new();
    let mut amp = 0.0f64;
    for k in [5.0, 10.0, 20.0, 40.0] {
        let s = manufacture_solution(SolutionKind::LowBand { band: 0.5 }, k, &setup.model, &setup.geometry).unwrap();
        let r = stability_ratio(&s, &setup).unwrap();
        ratios.push(r.ratio);
        amp = amp.max(r.max_kept_amplification);
    }
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: spread <= 2.0 && amp <= bound,
        detail: format!("ratios {ratios:.4?}, spread {spread:.3} (max 2); max kept amplification {amp:.4} (bound {bound:.4})"),
    }
}

// 4
fn john_contrast() -> Outcome {
    let lap = StripCoefficients::laplacian();
    let ks = [5.0, 10.0, 20.0, 40.0];
    let rows = john_blowup_demo(&ks, 2.0, 0.5, &lap, EPS).unwrap();
    let dev = rows
        .iter()
        .map(|r| (r.amplification / (3f64.sqrt() * r.k).cosh() - 1.0).abs())
        .fold(0.0, f64::max);
    let bound = 1.0 / EPS.sqrt();
    let mut kept_max = 0.0f64;
    for k in ks {
        let g: Geometry = StripGeometry::new(2.0 * PI, 256, 65, 0.0).unwrap().into();
        let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
        for &m in cutoff.kept_modes() {
            let t = transfer_matrix_strip(m as f64, k, &lap, 0.0, 1.0, m).unwrap();
            kept_max = kept_max.max(t.scaled_norm(k));
        }
    }
    Outcome {
        pass: dev <= 0.01 && kept_max <= bound * (1.0 + 1e-12),
        detail: format!(
            "xi=2k amplification at k=10: {:.4e}; max deviation from cosh(sqrt(3)k) {dev:.1e} (tol 1%); kept-band max {kept_max:.4} <= {bound:.4}",
            rows[1].amplification
        ),
    }
}

// 5
fn annulus_mixed_estimate() -> Outcome {
    const THETA: f64 = 0.1;
    let setup = StabilitySetup {
        model: CoefficientModel::Radial(RadialCoefficients::laplacian()),
        geometry: AnnulusGeometry::new(2.0, 256, 2049).unwrap().into(),
        eps: EPS,
        noise_delta: 0.0,
        seed: 1,
        theta: THETA,
        mode_policy: ModePolicy::All,
    };
    let kind = SolutionKind::Mixed {
        band: 0.5,
        hf_multiplier: 2.0,
        hf_amplitude: 1.0,
    };
    let mut ratios = Vec::new();
    let mut worst = 0.0f64;
    for k in [5.0, 10.0, 20.0, 40.0] {
        let s = manufacture_solution(kind, k, &setup.model, &setup.geometry).unwrap();
        let r = stability_ratio(&s, &setup).unwrap();
        ratios.push(r.ratio);
        let cutoff = SpectralCutoff::new(k, 1.0, EPS, &setup.geometry).unwrap();
        let res = continue_cauchy(&s.data, None, &setup.model, &setup.geometry, &cutoff, &ContinuationOptions::default()).unwrap();
        let high = split_low_high(&res.spectrum, &cutoff).unwrap().high;
        let expected = k.powf(-0.4) * sobolev_norm_spectrum(&high, 2).unwrap();
        let term = r.term("hf_h2*k^(theta-1/2)").unwrap();
        worst = worst.max((term - expected).abs() / expected);
    }
    let spread = ratios.iter().cloned().fold(0.0, f64::max) / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: spread <= 2.0 && worst <= 1e-12,
        detail: format!("ratios {ratios:.4?}, spread {spread:.3} (max 2); hf term vs k^-0.4 ||u-u_l||_2 rel diff {worst:.1e} (tol 1e-12)"),
    }
}

// 6
fn plateau_evidence() -> Outcome {
    let g = AnnulusGeometry::with_defaults(2.0).unwrap();
    let lap = RadialCoefficients::laplacian();
    let opts = OperatorBOptions::default();
    let spectra: Vec<_> = [10.0, 20.0, 40.0]
        .iter()
        .map(|&k| operator_b_spectrum(k, &lap, &g, &opts).unwrap())
        .collect();
    let report = conjecture_metrics(&spectra, 0.1).unwrap();
    let ratios = report.plateau_ratios();
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let spread = ratios.iter().map(|r| (r / mean - 1.0).abs()).fold(0.0, f64::max);
    let mut tail = 0.0f64;
    for s in &spectra {
        let s0 = s.sigma_at(0).unwrap();
        for (m, sig) in s.modes.iter().zip(&s.sigma) {
            if (*m as f64).abs() > 1.5 * s.k * 2.0 {
                tail = tail.max(sig / s0);
            }
        }
    }
    // flags agree with an independent determinant evaluation at k = 10
    let s = &spectra[0];
    let flags_ok = s.modes.iter().zip(&s.resonant).all(|(&m, &flag)| {
        let d = neumann_determinant(m, s.k, &lap, &g).unwrap();
        flag == (d.relative() < opts.resonance_tol)
    });
    let excluded_ok = report.rows.iter().zip(&spectra).all(|(row, sp)| {
        sp.modes
            .iter()
            .zip(&sp.resonant)
            .all(|(m, r)| !*r || m.abs() != row.m_star)
    });
    Outcome {
        pass: spread <= 0.25 && tail < 1e-6 && flags_ok && excluded_ok,
        detail: format!(
            "m*/k = {ratios:.3?}, max deviation from mean {:.1}% (tol 25%); max sigma_m/sigma_0 beyond 1.5kR {tail:.1e}; resonances flagged {}, {} resonant",
            100.0 * spread,
            if flags_ok && excluded_ok { "consistently" } else { "INCONSISTENTLY" },
            report.rows.iter().map(|r| r.n_resonant).sum::<usize>()
        ),
    }
}

// 7
fn seminorm_laws() -> Outcome {
    let grids: [Geometry; 2] = [
        StripGeometry::new(2.0 * PI, 64, 33, 0.1).unwrap().into(),
        AnnulusGeometry::new(2.0, 64, 33).unwrap().into(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let ks: Vec<f64> = (1..=40).map(|i| i as f64).collect();
    let (mut zero_kept, mut monotone, mut zero_past) = (true, true, true);
    for t in 0..100 {
        let g = grids[t % 2];
        let v = random_field(g, &mut rng);
        let spec = forward_transform(&v);
        for order in [1, 2] {
            let mut prev = f64::INFINITY;
            for &k in &ks {
                let c = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
                let s = hf_seminorm(&v, order, &c).unwrap();
                monotone &= s <= prev;
                prev = s;
                let low = split_low_high(&spec, &c).unwrap().low;
                zero_kept &= hf_seminorm_spectrum(&low, order, &c).unwrap() == 0.0;
            }
            // every grid mode kept once the cutoff passes the Nyquist band
            let k_all = 2.0 * g.nyquist() as f64 * 2.0;
            let c = SpectralCutoff::new(k_all, 1.0, EPS, &g).unwrap();
            zero_past &= c.kept_modes().len() == g.n_tangential() && hf_seminorm(&v, order, &c).unwrap() == 0.0;
        }
    }
    Outcome {
        pass: zero_kept && monotone && zero_past,
        detail: format!("100 random fields, orders 1 and 2: zero on kept band {zero_kept}, nonincreasing in k {monotone}, zero past Nyquist {zero_past}"),
    }
}

fn reproducible_csvs(threads: usize) -> (Vec<u8>, Vec<u8>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    pool.install(|| {
        let cfg = RunConfig::load(
            "[cutoff]\nk_list = [5.0, 10.0, 20.0]\n[experiment]\ndelta = 1e-3\nseed = 42\n",
            &["geometry.n_depth=1025".into()],
        )
        .unwrap();
        let report = sweep_k(&SweepSpec {
            setup: cfg.stability_setup().unwrap(),
            solution: cfg.experiment.solution,
            k_list: cfg.k_values().unwrap(),
        })
        .unwrap();
        let mut stability = Vec::new();
        write_stability_csv(&report.records, &mut stability).unwrap();
        let Geometry::Annulus(g) = cfg.geometry().unwrap() else { unreachable!() };
        let spectra: Vec<_> = cfg
            .k_values()
            .unwrap()
            .iter()
            .map(|&k| operator_b_spectrum(k, &RadialCoefficients::laplacian(), &g, &cfg.operator_b_options()).unwrap())
            .collect();
        let mut spectrum = Vec::new();
        write_spectrum_csv(&spectra, &mut spectrum).unwrap();
        (stability, spectrum)
    })
}

// 8
fn reproducibility() -> Outcome {
    let a = reproducible_csvs(1);
    let b = reproducible_csvs(1);
    let c = reproducible_csvs(4);
    let d = reproducible_csvs(4);
    let same = a == b && a == c && c == d;
    Outcome {
        pass: same,
        detail: format!(
            "stability CSV {} bytes, spectrum CSV {} bytes; two runs x threads {{1, 4}} byte-identical: {same}",
            a.0.len(),
            a.1.len()
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 8] = [
        ("projector algebra", projector_algebra, Duration::from_secs(10)),
        ("Bessel oracle and order 4", bessel_oracle, Duration::from_secs(30)),
        ("strip increasing stability", strip_increasing_stability, Duration::from_secs(60)),
        ("excluded-mode blow-up contrast", john_contrast, Duration::from_secs(5)),
        ("annulus mixed estimate", annulus_mixed_estimate, Duration::from_secs(120)),
        ("singular value plateau", plateau_evidence, Duration::from_secs(120)),
        ("semi-norm laws", seminorm_laws, Duration::from_secs(10)),
        ("reproducibility", reproducibility, Duration::from_secs(600)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *budget;
        failed += usize::from(!pass);
        println!(
            "criterion {} [{name}]: {} | {} | {:.2}s (budget {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            budget.as_secs()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}

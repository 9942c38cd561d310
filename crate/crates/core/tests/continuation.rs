use std::f64::consts::PI;

use helmcont::continuation::{
    continuation_error, continue_annulus, continue_cauchy, continue_mode_annulus, continue_strip, read_field_csv,
    regularized_continuation, reverse_mode_annulus, transfer_matrix_strip, write_field_csv, write_modes_csv,
    ContinuationOptions, ModePolicy, Regularization,
};
use helmcont::experiments::{add_noise, manufacture_solution, SolutionKind};
use helmcont::spectral::SpectralCutoff;
use helmcont::{
    AnnulusGeometry, CauchyData, CoefficientModel, Complex64, Geometry, RadialCoefficients, StripCoefficients, StripGeometry,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 0.19;

fn low_only() -> ContinuationOptions {
    ContinuationOptions {
        mode_policy: ModePolicy::LowOnly,
        ..Default::default()
    }
}

fn random_data(g: &Geometry, k: f64, seed: u64) -> CauchyData {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = g.n_tangential();
    let mut draw = || -> Vec<Complex64> {
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    };
    let u0 = draw();
    let u1 = draw();
    CauchyData::new(g.mode_numbers(), u0, u1, k).unwrap()
}

fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

#[test]
fn annulus_bessel_mode_recovers_the_outer_trace() {
    let g: Geometry = AnnulusGeometry::with_defaults(2.0).unwrap().into();
    let model = CoefficientModel::Radial(RadialCoefficients::laplacian());
    let k = 10.0;
    let s = manufacture_solution(SolutionKind::SingleMode { mode: 3 }, k, &model, &g).unwrap();
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let res = continue_cauchy(&s.data, None, &model, &g, &cutoff, &ContinuationOptions::default()).unwrap();
    assert!(rel(res.target.u0(), s.target.u0()) < 1e-7);
    assert!(rel(res.target.u1(), s.target.u1()) < 1e-7);
    // the field restricted to Γ₀ is the data
    let col = g.mode_index(3).unwrap();
    assert!((res.spectrum.profile(3).unwrap()[0] - s.data.u0()[col]).norm() < 1e-10);
}

#[test]
fn low_only_with_only_excluded_modes_gives_zero_field() {
    let ag = AnnulusGeometry::new(2.0, 64, 513).unwrap();
    let g: Geometry = ag.into();
    let k = 5.0;
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let mut u0 = vec![Complex64::default(); 64];
    u0[g.mode_index(20).unwrap()] = Complex64::new(1.0, 0.0);
    let data = CauchyData::new(g.mode_numbers(), u0.clone(), u0, k).unwrap();
    let res = continue_annulus(&data, None, &RadialCoefficients::laplacian(), &ag, &cutoff, &low_only()).unwrap();
    assert_eq!(res.field.max_abs(), 0.0);
}

#[test]
fn annulus_continuation_is_linear_in_the_data() {
    let ag = AnnulusGeometry::new(2.0, 32, 513).unwrap();
    let g: Geometry = ag.into();
    let k = 6.0;
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let lap = RadialCoefficients::laplacian();
    let (d1, d2) = (random_data(&g, k, 1), random_data(&g, k, 2));
    let (a, b) = (Complex64::new(0.7, -0.2), Complex64::new(-1.3, 0.4));
    let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> { x.iter().zip(y).map(|(p, q)| a * p + b * q).collect() };
    let d = CauchyData::new(g.mode_numbers(), comb(d1.u0(), d2.u0()), comb(d1.u1(), d2.u1()), k).unwrap();
    let opts = ContinuationOptions::default();
    let r1 = continue_annulus(&d1, None, &lap, &ag, &cutoff, &opts).unwrap();
    let r2 = continue_annulus(&d2, None, &lap, &ag, &cutoff, &opts).unwrap();
    let r = continue_annulus(&d, None, &lap, &ag, &cutoff, &opts).unwrap();
    let expect = comb(r1.target.u0(), r2.target.u0());
    assert!(rel(r.target.u0(), &expect) < 1e-10);
    let expect_field = r1.field.scaled(a).values() + r2.field.scaled(b).values();
    let diff = (r.field.values() - &expect_field).iter().map(|v| v.norm()).fold(0.0, f64::max);
    assert!(diff <= 1e-10 * expect_field.iter().map(|v| v.norm()).fold(0.0, f64::max));
}

#[test]
fn forward_then_backward_returns_the_data() {
    // strip: invert the closed-form propagators; modes up to 11 keep e^{2κ}·ε_mach below 1e-8
    let sg = StripGeometry::new(2.0 * PI, 24, 65, 0.1).unwrap();
    let g: Geometry = sg.into();
    let k = 8.0;
    let lap = StripCoefficients::laplacian();
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let d = random_data(&g, k, 3);
    let res = continue_strip(&d, None, &lap, &sg, &cutoff, &ContinuationOptions::default()).unwrap();
    let (mut u, mut du) = (Vec::new(), Vec::new());
    for (col, &m) in g.mode_numbers().iter().enumerate() {
        let t = transfer_matrix_strip(g.frequency(m), k, &lap, 0.0, 1.0, m).unwrap();
        let back = t.inverse().apply((res.target.u0()[col], res.target.u1()[col]));
        u.push(back.0);
        du.push(back.1);
    }
    assert!(rel(&u, d.u0()) < 1e-8 && rel(&du, d.u1()) < 1e-8);

    // annulus: integrate back from Γ₁
    let ag = AnnulusGeometry::new(2.0, 32, 2049).unwrap();
    let g: Geometry = ag.into();
    let lap = RadialCoefficients::laplacian();
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let d = random_data(&g, k, 4);
    let res = continue_annulus(&d, None, &lap, &ag, &cutoff, &ContinuationOptions::default()).unwrap();
    let (u, du): (Vec<_>, Vec<_>) = g
        .mode_numbers()
        .iter()
        .enumerate()
        .map(|(col, &m)| reverse_mode_annulus(m, k, res.target.u0()[col], res.target.u1()[col], &lap, &ag))
        .unzip();
    assert!(rel(&u, d.u0()) < 1e-8 && rel(&du, d.u1()) < 1e-8);
}

#[test]
fn kept_and_excluded_strip_modes() {
    let sg = StripGeometry::new(2.0 * PI, 64, 33, 0.0).unwrap();
    let g: Geometry = sg.into();
    let k = 10.0;
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let mut u0 = vec![Complex64::default(); 64];
    u0[g.mode_index(5).unwrap()] = Complex64::new(1.0, 0.0);
    u0[g.mode_index(20).unwrap()] = Complex64::new(1.0, 0.0);
    let data = CauchyData::new(g.mode_numbers(), u0, vec![Complex64::default(); 64], k).unwrap();
    let res = continue_strip(&data, None, &StripCoefficients::laplacian(), &sg, &cutoff, &ContinuationOptions::default()).unwrap();
    let bound = 1.0 / EPS.sqrt() * (1.0 + 1e-6);
    assert!(res.diagnostics.iter().filter(|d| d.kept).all(|d| d.amplification <= bound));
    let d20 = &res.diagnostics[g.mode_index(20).unwrap()];
    assert!(!d20.kept && d20.amplification >= (3f64.sqrt() * k).cosh());
    // excluded amplification increases with |ξ|
    let mut excluded: Vec<_> = res.diagnostics.iter().filter(|d| !d.kept && d.mode >= 0).collect();
    excluded.sort_by_key(|d| d.mode);
    assert!(excluded.windows(2).all(|w| w[1].amplification > w[0].amplification));
}

#[test]
fn zero_data_gives_zero_field() {
    let sg = StripGeometry::new(2.0 * PI, 16, 17, 0.1).unwrap();
    let g: Geometry = sg.into();
    let cutoff = SpectralCutoff::new(4.0, 1.0, EPS, &g).unwrap();
    let data = CauchyData::zeros(&g, 4.0).unwrap();
    let res = continue_strip(&data, None, &StripCoefficients::laplacian(), &sg, &cutoff, &ContinuationOptions::default()).unwrap();
    assert_eq!(res.field.max_abs(), 0.0);
    let p = continue_mode_annulus(
        2,
        4.0,
        Complex64::default(),
        Complex64::default(),
        None,
        &RadialCoefficients::laplacian(),
        &AnnulusGeometry::new(2.0, 16, 257).unwrap(),
        1e-4,
    )
    .unwrap();
    assert!(p.u.iter().chain(&p.du).all(|v| *v == Complex64::default()));
}

#[test]
fn evanescent_annulus_mode_grows() {
    let ag = AnnulusGeometry::with_defaults(2.0).unwrap();
    let lap = RadialCoefficients::laplacian();
    for k in [10.0, 20.0] {
        let m = (2.0 * k * 2.0f64).ceil() as i64;
        let one = Complex64::new(1.0, 0.0);
        let p = continue_mode_annulus(m, k, one, Complex64::default(), None, &lap, &ag, 1e-4).unwrap();
        let out = p.u.last().unwrap().norm();
        assert!(out >= 1e3, "m = {m}: out/in = {out}");
        assert!(p.step_discrepancy <= 1e-4);
    }
}

#[test]
fn regularization_strategies() {
    let sg = StripGeometry::new(2.0 * PI, 64, 65, 0.1).unwrap();
    let g: Geometry = sg.into();
    let model = CoefficientModel::Strip(StripCoefficients::laplacian());
    let k = 10.0;
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let s = manufacture_solution(SolutionKind::SingleMode { mode: 4 }, k, &model, &g).unwrap();
    let opts = ContinuationOptions::default();

    // δ = 0: spectral cutoff is the low-only continuation
    let a = regularized_continuation(&s.data, None, &model, &g, &cutoff, Regularization::SpectralCutoff, &opts).unwrap();
    let b = continue_cauchy(&s.data, None, &model, &g, &cutoff, &low_only()).unwrap();
    assert_eq!(a.field, b.field);

    // noisy data: error on Γ₁ within the kept-band transfer bound
    let delta = 1e-3;
    let noisy = add_noise(&s.data, delta, 9).unwrap();
    let r = regularized_continuation(&noisy, None, &model, &g, &cutoff, Regularization::SpectralCutoff, &opts).unwrap();
    let err = continuation_error(&r, &s.target).unwrap();
    assert!(err.aggregate <= delta / EPS.sqrt() * 1.1, "{}", err.aggregate);
    assert_eq!(err.per_mode.len(), 64);

    // α → ∞ damps everything
    let t = regularized_continuation(&noisy, None, &model, &g, &cutoff, Regularization::Tikhonov { alpha: 1e300 }, &opts)
        .unwrap();
    assert!(t.field.max_abs() <= 1e-250);
}

#[test]
fn csv_exports() {
    let ag = AnnulusGeometry::new(2.0, 16, 129).unwrap();
    let g: Geometry = ag.into();
    let k = 3.0;
    let cutoff = SpectralCutoff::new(k, 1.0, EPS, &g).unwrap();
    let d = random_data(&g, k, 5);
    let res = continue_annulus(&d, None, &RadialCoefficients::laplacian(), &ag, &cutoff, &ContinuationOptions::default()).unwrap();
    let mut modes = Vec::new();
    write_modes_csv(&res, &mut modes).unwrap();
    let modes = String::from_utf8(modes).unwrap();
    assert!(modes.starts_with("mode,omega2,amp_in_out,flagged\n"));
    assert_eq!(modes.lines().count(), 17);
    let mut dump = Vec::new();
    write_field_csv(&res, &mut dump).unwrap();
    let back = read_field_csv(std::str::from_utf8(&dump).unwrap(), &g).unwrap();
    assert_eq!(back, res.field);
    assert!(read_field_csv("i_tangential,j_depth,re,im\n0,0,1,0\n", &g).is_err());
}

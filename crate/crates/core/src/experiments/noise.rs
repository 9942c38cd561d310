use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::field::CauchyData;
use crate::Complex64;

/// Adds a seeded complex Gaussian perturbation to `u0` and `u1` on every mode,
/// rescaled so that `(‖n0‖² + ‖n1‖²)^{1/2} = delta` in `L²(Γ₀)`.
pub fn add_noise(data: &CauchyData, delta: f64, seed: u64) -> Result<CauchyData> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(Error::param("delta", format!("must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(data.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = data.modes().len();
    let mut draw = |_| {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        Complex64::new(re, im)
    };
    let n0: Vec<Complex64> = (0..n).map(&mut draw).collect();
    let n1: Vec<Complex64> = (0..n).map(&mut draw).collect();
    let norm = n0.iter().chain(&n1).map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let s = delta / norm;
    let add = |u: &[Complex64], e: &[Complex64]| -> Vec<Complex64> { u.iter().zip(e).map(|(a, b)| a + b * s).collect() };
    CauchyData::new(data.modes().to_vec(), add(data.u0(), &n0), add(data.u1(), &n1), data.k())
}

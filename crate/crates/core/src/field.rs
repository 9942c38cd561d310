use ndarray::Array2;

use crate::error::{Error, Result};
use crate::geometry::Geometry;
use crate::Complex64;

/// Complex samples over a geometry grid, stored as `values[[j_normal, i_tangential]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    geometry: Geometry,
    values: Array2<Complex64>,
}

impl Field {
    pub fn new(geometry: Geometry, values: Array2<Complex64>) -> Result<Self> {
        let expected = (geometry.n_normal(), geometry.n_tangential());
        if values.dim() != expected {
            return Err(Error::Shape(format!(
                "field array {:?} does not match grid {:?}",
                values.dim(),
                expected
            )));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("field entry".into()));
        }
        Ok(Self { geometry, values })
    }

    pub fn zeros(geometry: Geometry) -> Self {
        let values = Array2::zeros((geometry.n_normal(), geometry.n_tangential()));
        Self { geometry, values }
    }

    /// Samples `f(tangential, normal)` on the grid.
    pub fn from_fn(geometry: Geometry, f: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let xs = geometry.tangential_nodes();
        let zs = geometry.normal_nodes();
        let values = Array2::from_shape_fn((zs.len(), xs.len()), |(j, i)| f(xs[i], zs[j]));
        Self::new(geometry, values)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn values(&self) -> &Array2<Complex64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<Complex64> {
        self.values
    }

    /// Discrete `L²(Ω)` norm (trapezoid in the normal direction, rectangle rule
    /// tangentially, which is exact for the periodic grid).
    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_masked(None)
    }

    /// `L²` norm restricted to tangential columns where `mask` is true.
    pub fn l2_norm_masked(&self, mask: Option<&[bool]>) -> f64 {
        let w = self.geometry.normal_weights();
        let dx = self.geometry.period() / self.geometry.n_tangential() as f64;
        let mut total = 0.0;
        for (j, row) in self.values.outer_iter().enumerate() {
            let s: f64 = row
                .iter()
                .enumerate()
                .filter(|(i, _)| mask.is_none_or(|m| m[*i]))
                .map(|(_, v)| v.norm_sqr())
                .sum();
            total += w[j] * dx * s;
        }
        total.sqrt()
    }

    /// `L²` norm of one normal slice (a row of constant depth or radius),
    /// with respect to the tangential parameter.
    pub fn slice_norm(&self, j: usize) -> f64 {
        let dx = self.geometry.period() / self.geometry.n_tangential() as f64;
        (self.values.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>() * dx).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scaled(&self, s: Complex64) -> Field {
        Field {
            geometry: self.geometry,
            values: self.values.mapv(|v| v * s),
        }
    }
}

/// Per-mode Cauchy data on Γ₀ in the orthonormal tangential basis.
///
/// `u1` is the derivative along the inward normal (`+∂_n` on the strip,
/// `+∂_r` on the annulus).
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    modes: Vec<i64>,
    u0: Vec<Complex64>,
    u1: Vec<Complex64>,
    k: f64,
}

impl CauchyData {
    pub fn new(modes: Vec<i64>, u0: Vec<Complex64>, u1: Vec<Complex64>, k: f64) -> Result<Self> {
        if u0.len() != modes.len() || u1.len() != modes.len() {
            return Err(Error::Shape(format!(
                "{} modes but {} Dirichlet and {} Neumann values",
                modes.len(),
                u0.len(),
                u1.len()
            )));
        }
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::param("k", format!("wave number must be positive, got {k}")));
        }
        if u0.iter().chain(u1.iter()).any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("Cauchy data".into()));
        }
        Ok(Self { modes, u0, u1, k })
    }

    /// Zero data on every mode of `geometry`.
    pub fn zeros(geometry: &Geometry, k: f64) -> Result<Self> {
        let modes = geometry.mode_numbers();
        let n = modes.len();
        Self::new(modes, vec![Complex64::default(); n], vec![Complex64::default(); n], k)
    }

    pub fn modes(&self) -> &[i64] {
        &self.modes
    }

    pub fn u0(&self) -> &[Complex64] {
        &self.u0
    }

    pub fn u1(&self) -> &[Complex64] {
        &self.u1
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn with_k(&self, k: f64) -> Result<Self> {
        Self::new(self.modes.clone(), self.u0.clone(), self.u1.clone(), k)
    }

    /// `‖u0‖₀(Γ₀)` by Parseval.
    pub fn u0_norm(&self) -> f64 {
        self.u0.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn u1_norm(&self) -> f64 {
        self.u1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Combined `(‖u0‖² + ‖u1‖²)^{1/2}`.
    pub fn norm(&self) -> f64 {
        (self.u0_norm().powi(2) + self.u1_norm().powi(2)).sqrt()
    }

    pub fn linear_combination(&self, a: Complex64, other: &CauchyData, b: Complex64) -> Result<Self> {
        if self.modes != other.modes {
            return Err(Error::Shape("Cauchy data on different mode sets".into()));
        }
        let comb = |x: &[Complex64], y: &[Complex64]| -> Vec<Complex64> {
            x.iter().zip(y).map(|(p, q)| p * a + q * b).collect()
        };
        Self::new(
            self.modes.clone(),
            comb(&self.u0, &other.u0),
            comb(&self.u1, &other.u1),
            self.k,
        )
    }

    pub(crate) fn check_modes(&self, geometry: &Geometry) -> Result<()> {
        if self.modes != geometry.mode_numbers() {
            return Err(Error::Shape(format!(
                "Cauchy data modes do not match the {} grid",
                geometry.tag()
            )));
        }
        Ok(())
    }
}

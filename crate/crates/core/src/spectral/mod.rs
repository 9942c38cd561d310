//! Tangential Fourier transforms, the low/high frequency projectors and the
//! norms built on them.
//!
//! Coefficients use the orthonormal basis `e(x'; m) = e^{iξ_m x'}/√P` with
//! `P` the tangential period (`2π` on the annulus, `L` on the strip), so the
//! discrete Parseval identity is an equality.

mod cutoff;
pub(crate) mod diff;
mod norms;

pub use cutoff::{apply_cutoff_chi, commutator_term, project_low, split_low_high, FrequencySplit, SpectralCutoff};
pub use norms::{
    hf_h2_norm, hf_seminorm, hf_seminorm_spectrum, mode_energies, sobolev_norm,
    sobolev_norm_spectrum, tangential_derivative,
};

use ndarray::{Array2, Axis};
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Geometry;
use crate::Complex64;

/// Tangential Fourier coefficients of a field: `coeffs[[j_normal, column]]`
/// with columns in FFT order (see [`Geometry::mode_numbers`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    geometry: Geometry,
    coeffs: Array2<Complex64>,
}

impl ModeSpectrum {
    pub fn new(geometry: Geometry, coeffs: Array2<Complex64>) -> Result<Self> {
        let expected = (geometry.n_normal(), geometry.n_tangential());
        if coeffs.dim() != expected {
            return Err(Error::Shape(format!(
                "spectrum array {:?} does not match grid {:?}",
                coeffs.dim(),
                expected
            )));
        }
        if coeffs.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("spectrum coefficient".into()));
        }
        Ok(Self { geometry, coeffs })
    }

    pub fn zeros(geometry: Geometry) -> Self {
        let coeffs = Array2::zeros((geometry.n_normal(), geometry.n_tangential()));
        Self { geometry, coeffs }
    }

    /// Spectrum with a single nonzero mode carrying `profile` across the normal grid.
    pub fn single_mode(geometry: Geometry, m: i64, profile: &[Complex64]) -> Result<Self> {
        let col = geometry.mode_index(m).ok_or(Error::BeyondNyquist {
            mode: m,
            nyquist: geometry.nyquist(),
        })?;
        if profile.len() != geometry.n_normal() {
            return Err(Error::Shape("profile length differs from normal grid".into()));
        }
        let mut s = Self::zeros(geometry);
        for (j, v) in profile.iter().enumerate() {
            s.coeffs[[j, col]] = *v;
        }
        Ok(s)
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn modes(&self) -> Vec<i64> {
        self.geometry.mode_numbers()
    }

    /// Normal profile of mode `m`.
    pub fn profile(&self, m: i64) -> Option<Vec<Complex64>> {
        let col = self.geometry.mode_index(m)?;
        Some(self.coeffs.column(col).to_vec())
    }

    pub(crate) fn column(&self, col: usize) -> Vec<Complex64> {
        self.coeffs.column(col).to_vec()
    }

    pub(crate) fn set_column(&mut self, col: usize, profile: &[Complex64]) {
        for (j, v) in profile.iter().enumerate() {
            self.coeffs[[j, col]] = *v;
        }
    }

    pub fn linear_combination(&self, a: Complex64, other: &ModeSpectrum, b: Complex64) -> Result<Self> {
        if self.geometry != other.geometry {
            return Err(Error::Shape("spectra on different geometries".into()));
        }
        Ok(Self {
            geometry: self.geometry,
            coeffs: &self.coeffs * a + &other.coeffs * b,
        })
    }

    /// Keeps columns where `keep(m)` is true, zeroing the rest.
    pub fn masked(&self, keep: impl Fn(i64) -> bool) -> Self {
        let mut out = self.clone();
        for (col, m) in self.geometry.mode_numbers().into_iter().enumerate() {
            if !keep(m) {
                out.coeffs.column_mut(col).fill(Complex64::default());
            }
        }
        out
    }

    /// `Σ_m conj(a_m) b_m` on normal slice `j`: the tangential `L²` inner product.
    pub fn slice_inner(&self, other: &ModeSpectrum, j: usize) -> Complex64 {
        self.coeffs
            .row(j)
            .iter()
            .zip(other.coeffs.row(j).iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn slice_norm(&self, j: usize) -> f64 {
        self.coeffs.row(j).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `L²(Ω)` norm by Parseval.
    pub fn l2_norm(&self) -> f64 {
        let w = self.geometry.normal_weights();
        self.coeffs
            .axis_iter(Axis(0))
            .zip(w)
            .map(|(row, wj)| wj * row.iter().map(|v| v.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
    }
}

/// Orthonormal tangential transform of every normal slice.
pub fn forward_transform(field: &Field) -> ModeSpectrum {
    let g = *field.geometry();
    let n = g.n_tangential();
    let scale = g.period().sqrt() / n as f64;
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut coeffs = field.values().clone();
    for mut row in coeffs.axis_iter_mut(Axis(0)) {
        let mut buf: Vec<Complex64> = row.to_vec();
        fft.process(&mut buf);
        for (dst, v) in row.iter_mut().zip(buf) {
            *dst = v * scale;
        }
    }
    ModeSpectrum { geometry: g, coeffs }
}

/// Inverse of [`forward_transform`].
pub fn inverse_transform(spectrum: &ModeSpectrum) -> Field {
    let g = spectrum.geometry;
    let n = g.n_tangential();
    let scale = 1.0 / g.period().sqrt();
    let fft = FftPlanner::new().plan_fft_inverse(n);
    let mut values = spectrum.coeffs.clone();
    for mut row in values.axis_iter_mut(Axis(0)) {
        let mut buf: Vec<Complex64> = row.to_vec();
        fft.process(&mut buf);
        for (dst, v) in row.iter_mut().zip(buf) {
            *dst = v * scale;
        }
    }
    Field::new(g, values).expect("inverse transform of a finite spectrum is finite")
}

/// Inverse transform onto a requested geometry; the grids must agree.
pub fn inverse_transform_on(spectrum: &ModeSpectrum, geometry: &Geometry) -> Result<Field> {
    if spectrum.geometry != *geometry {
        return Err(Error::Shape(format!(
            "spectrum lives on a different {} grid",
            spectrum.geometry.tag()
        )));
    }
    Ok(inverse_transform(spectrum))
}

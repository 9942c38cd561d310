//! Coefficient models for `A + c k + k²`.
//!
//! The annulus engine works with radially symmetric coefficients in polar
//! form `a22 ∂_r² + a11 ∂_φ² + a1 ∂_φ + a2 ∂_r + a` (the mixed term `a12` is
//! fixed to zero so angular modes decouple). The strip engine uses constant
//! coefficients `a22 ∂_n² + a11 ∂_x² + a`.

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::{AnnulusGeometry, Geometry};
use crate::Complex64;

/// A real function of the radius.
#[derive(Clone)]
pub enum Profile {
    Constant(f64),
    /// `scale · r^exponent`
    Power { scale: f64, exponent: f64 },
    /// Piecewise-linear interpolation of `(r, value)` samples, held constant
    /// outside the sampled range.
    Table { r: Vec<f64>, values: Vec<f64> },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Constant(c) => write!(f, "Constant({c})"),
            Profile::Power { scale, exponent } => write!(f, "Power({scale} r^{exponent})"),
            Profile::Table { r, .. } => write!(f, "Table({} samples)", r.len()),
            Profile::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Profile {
    pub fn custom(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile::Custom(Arc::new(f))
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Profile::Constant(c) => *c,
            Profile::Power { scale, exponent } => scale * r.powf(*exponent),
            Profile::Table { r: rs, values } => interpolate(rs, values, r),
            Profile::Custom(f) => f(r),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Profile::Constant(c) if *c == 0.0)
    }

    /// Reads a two-column `r value` text table. Blank lines and `#` comments are skipped.
    pub fn from_table_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_table(&text)
    }

    pub fn parse_table(text: &str) -> Result<Self> {
        let mut r = Vec::new();
        let mut values = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            if cols.len() != 2 {
                return Err(Error::param(
                    "coefficients.table_path",
                    format!("line {}: expected two columns", lineno + 1),
                ));
            }
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|e| {
                    Error::param("coefficients.table_path", format!("line {}: {e}", lineno + 1))
                })
            };
            let (x, v) = (parse(cols[0])?, parse(cols[1])?);
            if let Some(&last) = r.last() {
                if x <= last {
                    return Err(Error::param(
                        "coefficients.table_path",
                        "radii must be strictly increasing",
                    ));
                }
            }
            r.push(x);
            values.push(v);
        }
        if r.is_empty() {
            return Err(Error::param("coefficients.table_path", "table is empty"));
        }
        Ok(Profile::Table { r, values })
    }
}

fn interpolate(rs: &[f64], vs: &[f64], r: f64) -> f64 {
    if r <= rs[0] {
        return vs[0];
    }
    if r >= rs[rs.len() - 1] {
        return vs[vs.len() - 1];
    }
    let j = rs.partition_point(|&x| x <= r) - 1;
    let t = (r - rs[j]) / (rs[j + 1] - rs[j]);
    vs[j] + t * (vs[j + 1] - vs[j])
}

/// Radially symmetric polar-form coefficients on the annulus.
#[derive(Debug, Clone)]
pub struct RadialCoefficients {
    pub a22: Profile,
    pub a11: Profile,
    pub a1: Profile,
    pub a2: Profile,
    pub a: Profile,
    pub c: Profile,
    /// Declared bound `E ≥ sup √a11`.
    pub e_bound: f64,
    /// Declared ellipticity constant.
    pub eps0: f64,
}

impl RadialCoefficients {
    /// The Laplacian `∂_r² + r⁻¹∂_r + r⁻²∂_φ²`, with `E = 1`.
    pub fn laplacian() -> Self {
        Self {
            a22: Profile::Constant(1.0),
            a11: Profile::Power {
                scale: 1.0,
                exponent: -2.0,
            },
            a1: Profile::Constant(0.0),
            a2: Profile::Power {
                scale: 1.0,
                exponent: -1.0,
            },
            a: Profile::Constant(0.0),
            c: Profile::Constant(0.0),
            e_bound: 1.0,
            eps0: 1.0,
        }
    }

    /// Laplacian principal part with a tabulated `c(r)` (the `k`-linear term).
    pub fn laplacian_with_c(c: Profile) -> Self {
        Self {
            c,
            ..Self::laplacian()
        }
    }

    pub fn is_laplacian(&self) -> bool {
        matches!(self.a22, Profile::Constant(v) if v == 1.0)
            && matches!(self.a11, Profile::Power { scale, exponent } if scale == 1.0 && exponent == -2.0)
            && matches!(self.a2, Profile::Power { scale, exponent } if scale == 1.0 && exponent == -1.0)
            && self.a1.is_zero()
            && self.a.is_zero()
            && self.c.is_zero()
    }

    /// Zeroth-order coefficient of the mode-`m` radial equation at radius `r`:
    /// `a + k c + k² − m² a11 + i m a1`.
    pub fn mode_potential(&self, m: i64, k: f64, r: f64) -> Complex64 {
        let mf = m as f64;
        Complex64::new(
            self.a.eval(r) + k * self.c.eval(r) + k * k - mf * mf * self.a11.eval(r),
            mf * self.a1.eval(r),
        )
    }
}

/// Constant coefficients of the strip operator `a22 ∂_n² + a11 ∂_x² + a + c k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StripCoefficients {
    pub a11: f64,
    pub a22: f64,
    pub a: f64,
    pub c: f64,
    pub e_bound: f64,
    pub eps0: f64,
}

impl StripCoefficients {
    pub fn laplacian() -> Self {
        Self {
            a11: 1.0,
            a22: 1.0,
            a: 0.0,
            c: 0.0,
            e_bound: 1.0,
            eps0: 1.0,
        }
    }

    /// `ω²` of the depth equation `û'' + ω² û = f̂/a22` for tangential frequency `xi`.
    pub fn omega2(&self, xi: f64, k: f64) -> f64 {
        (k * k + k * self.c + self.a - self.a11 * xi * xi) / self.a22
    }

    /// Second-order finite-difference application of `A + c k + k²` at interior
    /// depth nodes (periodic centred differences tangentially). Boundary rows are zero.
    pub fn apply_fd(&self, field: &Field, k: f64) -> Result<Field> {
        let Geometry::Strip(g) = field.geometry() else {
            return Err(Error::Shape("apply_fd requires a strip field".into()));
        };
        let (hx, hz) = (g.tangential_step(), g.depth_step());
        let u = field.values();
        let (nz, nx) = u.dim();
        let mut out = ndarray::Array2::<Complex64>::zeros((nz, nx));
        let zero_order = self.a + self.c * k + k * k;
        for j in 1..nz.saturating_sub(1) {
            for i in 0..nx {
                let ip = (i + 1) % nx;
                let im = (i + nx - 1) % nx;
                let uxx = (u[[j, ip]] - u[[j, i]] * 2.0 + u[[j, im]]) / (hx * hx);
                let uzz = (u[[j + 1, i]] - u[[j, i]] * 2.0 + u[[j - 1, i]]) / (hz * hz);
                out[[j, i]] = uzz * self.a22 + uxx * self.a11 + u[[j, i]] * zero_order;
            }
        }
        Field::new(field.geometry().clone(), out)
    }
}

#[derive(Debug, Clone)]
pub enum CoefficientModel {
    Strip(StripCoefficients),
    Radial(RadialCoefficients),
}

impl CoefficientModel {
    pub fn e_bound(&self) -> f64 {
        match self {
            CoefficientModel::Strip(s) => s.e_bound,
            CoefficientModel::Radial(r) => r.e_bound,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub eps0_ok: bool,
    pub e_ok: bool,
    /// Sample location (radius, or `0` on the strip) where the ellipticity margin is smallest.
    pub worst_ellipticity_at: f64,
    pub worst_ellipticity_value: f64,
    /// Largest observed `√a11` (annulus) or `√a11` (strip).
    pub observed_e: f64,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.eps0_ok && self.e_ok
    }
}

const BOUND_SLACK: f64 = 1e-12;

/// Checks ellipticity (`eps0 ≤ a22`, `eps0 ≤ a11 r²`) and the tangential bound
/// `√a11 ≤ E` at every grid radius.
pub fn validate_coefficients(model: &CoefficientModel, geometry: &Geometry) -> Result<ValidationReport> {
    match (model, geometry) {
        (CoefficientModel::Radial(c), Geometry::Annulus(g)) => validate_radial(c, g),
        (CoefficientModel::Strip(c), Geometry::Strip(_)) => validate_strip(c),
        _ => Err(Error::Shape(format!(
            "coefficient model does not match {} geometry",
            geometry.tag()
        ))),
    }
}

fn validate_radial(c: &RadialCoefficients, g: &AnnulusGeometry) -> Result<ValidationReport> {
    let mut worst = (1.0, f64::INFINITY);
    let mut sup_sqrt_a11 = 0.0f64;
    for r in Geometry::Annulus(*g).normal_nodes() {
        let vals = [
            c.a22.eval(r),
            c.a11.eval(r),
            c.a1.eval(r),
            c.a2.eval(r),
            c.a.eval(r),
            c.c.eval(r),
        ];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("coefficient at r = {r}")));
        }
        let margin = vals[0].min(vals[1] * r * r);
        if margin < worst.1 {
            worst = (r, margin);
        }
        sup_sqrt_a11 = sup_sqrt_a11.max(vals[1].max(0.0).sqrt());
    }
    Ok(ValidationReport {
        eps0_ok: worst.1 >= c.eps0 * (1.0 - BOUND_SLACK),
        e_ok: sup_sqrt_a11 <= c.e_bound * (1.0 + BOUND_SLACK),
        worst_ellipticity_at: worst.0,
        worst_ellipticity_value: worst.1,
        observed_e: sup_sqrt_a11,
    })
}

fn validate_strip(c: &StripCoefficients) -> Result<ValidationReport> {
    let vals = [c.a11, c.a22, c.a, c.c];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("strip coefficient".into()));
    }
    // principal symbol is diagonal, so the smallest eigenvalue is min(a11, a22)
    let margin = c.a11.min(c.a22);
    // a11 ξ² ≤ E² ξ² on a sample of tangential frequencies
    let e_ok = [0.5f64, 1.0, 2.0, 10.0]
        .iter()
        .all(|xi| c.a11 * xi * xi <= c.e_bound * c.e_bound * xi * xi * (1.0 + BOUND_SLACK));
    Ok(ValidationReport {
        eps0_ok: margin >= c.eps0 * (1.0 - BOUND_SLACK),
        e_ok,
        worst_ellipticity_at: 0.0,
        worst_ellipticity_value: margin,
        observed_e: c.a11.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn annulus(r: f64) -> Geometry {
        AnnulusGeometry::new(r, 16, 65).unwrap().into()
    }

    #[test]
    fn laplacian_passes_with_unit_e() {
        let report =
            validate_coefficients(&CoefficientModel::Radial(RadialCoefficients::laplacian()), &annulus(2.0))
                .unwrap();
        assert!(report.passes());
        assert_eq!(report.observed_e, 1.0);
    }

    #[test]
    fn laplacian_passes_on_many_radii() {
        for r in [1.01, 1.5, 2.0, 3.0, 10.0] {
            let report = validate_coefficients(
                &CoefficientModel::Radial(RadialCoefficients::laplacian()),
                &annulus(r),
            )
            .unwrap();
            assert!(report.passes(), "R = {r}");
        }
    }

    #[test]
    fn negative_a22_fails_ellipticity() {
        let mut c = RadialCoefficients::laplacian();
        c.a22 = Profile::custom(|r| r - 1.5);
        let report = validate_coefficients(&CoefficientModel::Radial(c), &annulus(2.0)).unwrap();
        assert!(!report.eps0_ok);
        assert!(report.worst_ellipticity_value < 0.0);
        assert!(report.worst_ellipticity_at < 1.5);
    }

    #[test]
    fn a11_too_large_fails_e_bound() {
        let mut c = RadialCoefficients::laplacian();
        c.a11 = Profile::Power {
            scale: 2.0,
            exponent: -2.0,
        };
        let report = validate_coefficients(&CoefficientModel::Radial(c), &annulus(2.0)).unwrap();
        assert!(report.eps0_ok);
        assert!(!report.e_ok);
        assert!((report.observed_e - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn nonfinite_coefficient_is_an_error() {
        let mut c = RadialCoefficients::laplacian();
        c.a = Profile::custom(|r| if r > 1.9 { f64::NAN } else { 0.0 });
        assert!(matches!(
            validate_coefficients(&CoefficientModel::Radial(c), &annulus(2.0)),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn table_profile_interpolates() {
        let p = Profile::parse_table("# r value\n1.0 0.0\n2.0 4.0\n").unwrap();
        assert_eq!(p.eval(1.5), 2.0);
        assert_eq!(p.eval(0.5), 0.0);
        assert_eq!(p.eval(3.0), 4.0);
        assert!(Profile::parse_table("1 2 3").is_err());
        assert!(Profile::parse_table("2 1\n1 1").is_err());
    }
}

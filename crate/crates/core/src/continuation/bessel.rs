//! Integer-order Bessel functions: the fundamental system of the Laplacian's
//! radial equation `u'' + u'/r + (k² − m²/r²) u = 0`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselBasis {
    pub j: f64,
    pub y: f64,
    pub dj: f64,
    pub dy: f64,
}

fn jn(n: i64, x: f64) -> f64 {
    let v = libm::jn(n.unsigned_abs() as i32, x);
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

fn yn(n: i64, x: f64) -> f64 {
    let v = libm::yn(n.unsigned_abs() as i32, x);
    if n < 0 && n % 2 != 0 {
        -v
    } else {
        v
    }
}

/// `J_m(x), Y_m(x)` and their derivatives, `x > 0`.
pub fn bessel_basis(m: i64, x: f64) -> Result<BesselBasis> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::param("x", format!("Bessel argument must be positive, got {x}")));
    }
    Ok(BesselBasis {
        j: jn(m, x),
        y: yn(m, x),
        dj: 0.5 * (jn(m - 1, x) - jn(m + 1, x)),
        dy: 0.5 * (yn(m - 1, x) - yn(m + 1, x)),
    })
}

//! Finite differences across the normal grid.

use crate::Complex64;

/// Second-order first derivative: centred inside, one-sided at the ends.
pub(crate) fn first(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    match n {
        0 | 1 => vec![Complex64::default(); n],
        2 => vec![(u[1] - u[0]) / h; 2],
        _ => (0..n)
            .map(|j| {
                if j == 0 {
                    (u[0] * -3.0 + u[1] * 4.0 - u[2]) / (2.0 * h)
                } else if j + 1 == n {
                    (u[n - 1] * 3.0 - u[n - 2] * 4.0 + u[n - 3]) / (2.0 * h)
                } else {
                    (u[j + 1] - u[j - 1]) / (2.0 * h)
                }
            })
            .collect(),
    }
}

/// Second-order second derivative: centred inside, one-sided at the ends.
pub(crate) fn second(u: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = u.len();
    let h2 = h * h;
    match n {
        0..=2 => vec![Complex64::default(); n],
        3 => vec![(u[0] - u[1] * 2.0 + u[2]) / h2; 3],
        _ => (0..n)
            .map(|j| {
                if j == 0 {
                    (u[0] * 2.0 - u[1] * 5.0 + u[2] * 4.0 - u[3]) / h2
                } else if j + 1 == n {
                    (u[n - 1] * 2.0 - u[n - 2] * 5.0 + u[n - 3] * 4.0 - u[n - 4]) / h2
                } else {
                    (u[j + 1] - u[j] * 2.0 + u[j - 1]) / h2
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let h = 0.1;
        let u: Vec<Complex64> = (0..7)
            .map(|j| {
                let x = j as f64 * h;
                Complex64::new(3.0 * x * x - x + 2.0, x * x)
            })
            .collect();
        let d = first(&u, h);
        let dd = second(&u, h);
        for j in 0..7 {
            let x = j as f64 * h;
            assert!((d[j] - Complex64::new(6.0 * x - 1.0, 2.0 * x)).norm() < 1e-12);
            assert!((dd[j] - Complex64::new(6.0, 2.0)).norm() < 1e-9);
        }
    }
}

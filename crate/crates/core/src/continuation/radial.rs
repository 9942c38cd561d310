//! Classical RK4 for the mode-`m` radial equation
//! `a22 u'' + a2 u' + (a + k c + k² − m² a11 + i m a1) u = f_m`.

use super::transfer::midpoint;
use crate::coefficients::RadialCoefficients;
use crate::Complex64;

pub(crate) type State = (Complex64, Complex64);

pub(crate) struct RadialOde<'a> {
    pub coeffs: &'a RadialCoefficients,
    pub m: i64,
    pub k: f64,
}

impl RadialOde<'_> {
    fn rhs(&self, r: f64, y: State, f: Complex64) -> State {
        let a22 = self.coeffs.a22.eval(r);
        let a2 = self.coeffs.a2.eval(r);
        let q = self.coeffs.mode_potential(self.m, self.k, r);
        (y.1, (f - y.1 * a2 - y.0 * q) / a22)
    }

    fn step(&self, r: f64, h: f64, y: State, f: [Complex64; 3]) -> State {
        let add = |y: State, d: State, s: f64| (y.0 + d.0 * s, y.1 + d.1 * s);
        let k1 = self.rhs(r, y, f[0]);
        let k2 = self.rhs(r + 0.5 * h, add(y, k1, 0.5 * h), f[1]);
        let k3 = self.rhs(r + 0.5 * h, add(y, k2, 0.5 * h), f[1]);
        let k4 = self.rhs(r + h, add(y, k3, h), f[2]);
        (
            y.0 + (k1.0 + (k2.0 + k3.0) * 2.0 + k4.0) * (h / 6.0),
            y.1 + (k1.1 + (k2.1 + k3.1) * 2.0 + k4.1) * (h / 6.0),
        )
    }

    /// States at every node of `nodes` (ascending, equispaced). `start` is the
    /// state at the first node when `forward`, else at the last node.
    pub fn integrate(&self, nodes: &[f64], start: State, source: Option<&[Complex64]>, forward: bool) -> Vec<State> {
        let n = nodes.len();
        let zero = Complex64::default();
        let mut out = vec![(zero, zero); n];
        let f_at = |j: usize| source.map_or(zero, |s| s[j]);
        let f_mid = |j: usize| source.map_or(zero, |s| midpoint(s, j));
        if forward {
            out[0] = start;
            for j in 0..n - 1 {
                let h = nodes[j + 1] - nodes[j];
                out[j + 1] = self.step(nodes[j], h, out[j], [f_at(j), f_mid(j), f_at(j + 1)]);
            }
        } else {
            out[n - 1] = start;
            for j in (0..n - 1).rev() {
                let h = nodes[j] - nodes[j + 1];
                out[j] = self.step(nodes[j + 1], h, out[j + 1], [f_at(j + 1), f_mid(j), f_at(j)]);
            }
        }
        out
    }

    /// Same integration with doubled step over nodes `0, 2, 4, …`; returns the
    /// final coarse state and the index of the fine node it corresponds to.
    pub fn integrate_doubled(
        &self,
        nodes: &[f64],
        start: State,
        source: Option<&[Complex64]>,
        forward: bool,
    ) -> (State, usize) {
        let n = nodes.len();
        let last = if (n - 1) % 2 == 0 { n - 1 } else { n - 2 };
        let zero = Complex64::default();
        let f_at = |j: usize| source.map_or(zero, |s| s[j]);
        if forward {
            let mut y = start;
            let mut j = 0;
            while j + 2 <= last {
                let h = nodes[j + 2] - nodes[j];
                y = self.step(nodes[j], h, y, [f_at(j), f_at(j + 1), f_at(j + 2)]);
                j += 2;
            }
            (y, last)
        } else {
            let first = n - 1 - last;
            let mut y = start;
            let mut j = n - 1;
            while j >= first + 2 {
                let h = nodes[j - 2] - nodes[j];
                y = self.step(nodes[j], h, y, [f_at(j), f_at(j - 1), f_at(j - 2)]);
                j -= 2;
            }
            (y, first)
        }
    }
}

/// `|(k a, b)|`.
pub(crate) fn energy(y: State, k: f64) -> f64 {
    (k * k * y.0.norm_sqr() + y.1.norm_sqr()).sqrt()
}

//! Plain-text dumps of continuation results.

use std::io::Write;

use ndarray::Array2;

use super::ContinuationResult;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::geometry::Geometry;
use crate::Complex64;

/// `mode,omega2,amp_in_out,flagged`, one row per grid mode in FFT order.
pub fn write_modes_csv(result: &ContinuationResult, mut out: impl Write) -> Result<()> {
    writeln!(out, "mode,omega2,amp_in_out,flagged")?;
    for d in &result.diagnostics {
        writeln!(out, "{},{},{},{}", d.mode, d.omega2, d.amplification, d.flagged)?;
    }
    Ok(())
}

/// `i_tangential,j_depth,re,im` over the whole grid.
pub fn write_field_csv(result: &ContinuationResult, mut out: impl Write) -> Result<()> {
    writeln!(out, "i_tangential,j_depth,re,im")?;
    for ((j, i), v) in result.field.values().indexed_iter() {
        writeln!(out, "{i},{j},{},{}", v.re, v.im)?;
    }
    Ok(())
}

/// Reads a dump written by [`write_field_csv`] back onto `geometry`.
pub fn read_field_csv(text: &str, geometry: &Geometry) -> Result<Field> {
    let (nt, nn) = (geometry.n_tangential(), geometry.n_normal());
    let mut values = Array2::from_elem((nn, nt), Complex64::new(f64::NAN, f64::NAN));
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, h)) if h.trim() == "i_tangential,j_depth,re,im" => {}
        _ => return Err(Error::Shape("missing field dump header `i_tangential,j_depth,re,im`".into())),
    }
    let mut count = 0;
    for (n, line) in lines {
        let bad = || Error::Shape(format!("line {}: malformed row `{line}`", n + 1));
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(bad());
        }
        let i: usize = f[0].parse().map_err(|_| bad())?;
        let j: usize = f[1].parse().map_err(|_| bad())?;
        let re: f64 = f[2].parse().map_err(|_| bad())?;
        let im: f64 = f[3].parse().map_err(|_| bad())?;
        if i >= nt || j >= nn {
            return Err(Error::Shape(format!("line {}: node ({i}, {j}) outside the {nt}x{nn} grid", n + 1)));
        }
        values[[j, i]] = Complex64::new(re, im);
        count += 1;
    }
    if count != nt * nn || values.iter().any(|v| v.re.is_nan()) {
        return Err(Error::Shape(format!("field dump covers {count} of {} nodes", nt * nn)));
    }
    Field::new(geometry.clone(), values)
}

/// Cauchy data on Γ₁: `mode,re_u,im_u,re_du,im_du`.
pub fn write_trace_csv(result: &ContinuationResult, mut out: impl Write) -> Result<()> {
    writeln!(out, "mode,re_u,im_u,re_du,im_du")?;
    let t = &result.target;
    for ((m, u), du) in t.modes().iter().zip(t.u0()).zip(t.u1()) {
        writeln!(out, "{m},{},{},{},{}", u.re, u.im, du.re, du.im)?;
    }
    Ok(())
}

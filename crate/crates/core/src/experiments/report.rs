//! CSV and SVG output for stability records and singular spectra.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::stability::{StabilityRecord, ANNULUS_TERMS, STRIP_TERMS};
use crate::error::{Error, Result};
use crate::operator_b::SingularSpectrum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Csv,
    Svg,
}

const FIXED_COLUMNS: [&str; 8] = ["k", "geometry", "solution_id", "delta", "theta", "lhs_total", "rhs_total", "ratio"];

fn terms_of(r: &StabilityRecord) -> impl Iterator<Item = &(String, f64)> {
    r.lhs_terms.iter().chain(&r.rhs_terms).chain(&r.aux_terms)
}

pub fn stability_header(records: &[StabilityRecord]) -> Result<String> {
    let first = records.first().ok_or_else(|| Error::Empty("no stability records".into()))?;
    let names: Vec<&str> = terms_of(first).map(|t| t.0.as_str()).collect();
    for r in records {
        if r.geometry != first.geometry || !terms_of(r).map(|t| t.0.as_str()).eq(names.iter().copied()) {
            return Err(Error::Shape("records with different term sets cannot share a file".into()));
        }
    }
    let mut h = FIXED_COLUMNS.join(",");
    for n in names {
        h.push_str(",term:");
        h.push_str(n);
    }
    Ok(h)
}

pub fn write_stability_csv(records: &[StabilityRecord], mut out: impl Write) -> Result<()> {
    writeln!(out, "{}", stability_header(records)?)?;
    for r in records {
        write!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.k, r.geometry, r.solution_id, r.delta, r.theta, r.lhs_total, r.rhs_total, r.ratio
        )?;
        for t in terms_of(r) {
            write!(out, ",{}", t.1)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Shape(format!("line {line}: `{s}` is not a number")))
}

/// Reads back a file written by [`write_stability_csv`].
pub fn parse_stability_csv(text: &str) -> Result<Vec<StabilityRecord>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| Error::Empty("no header".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < FIXED_COLUMNS.len() || cols[..FIXED_COLUMNS.len()] != FIXED_COLUMNS {
        return Err(Error::Shape(format!("unexpected header `{header}`")));
    }
    let names: Vec<&str> = cols[FIXED_COLUMNS.len()..]
        .iter()
        .map(|c| c.strip_prefix("term:").ok_or_else(|| Error::Shape(format!("unexpected column `{c}`"))))
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    for (i, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(Error::Shape(format!("line {}: expected {} fields, found {}", i + 1, cols.len(), f.len())));
        }
        let (nl, nr) = match f[1] {
            "strip" => (STRIP_TERMS.0.len(), STRIP_TERMS.1.len()),
            "annulus" => (ANNULUS_TERMS.0.len(), ANNULUS_TERMS.1.len()),
            g => return Err(Error::Shape(format!("line {}: unknown geometry `{g}`", i + 1))),
        };
        let values: Vec<f64> = f[FIXED_COLUMNS.len()..].iter().map(|s| parse_f64(s, i + 1)).collect::<Result<_>>()?;
        let mut terms = names.iter().map(|n| n.to_string()).zip(values);
        let lhs_terms: Vec<_> = terms.by_ref().take(nl).collect();
        let rhs_terms: Vec<_> = terms.by_ref().take(nr).collect();
        let aux_terms: Vec<_> = terms.collect();
        let solution_id = f[2].to_string();
        records.push(StabilityRecord {
            k: parse_f64(f[0], i + 1)?,
            geometry: f[1].to_string(),
            delta: parse_f64(f[3], i + 1)?,
            theta: parse_f64(f[4], i + 1)?,
            lhs_terms,
            rhs_terms,
            aux_terms,
            lhs_total: parse_f64(f[5], i + 1)?,
            rhs_total: parse_f64(f[6], i + 1)?,
            ratio: parse_f64(f[7], i + 1)?,
            max_kept_amplification: f64::NAN,
            error: (solution_id == "failed").then(|| "failed".to_string()),
            solution_id,
        });
    }
    Ok(records)
}

pub fn write_spectrum_csv(spectra: &[SingularSpectrum], mut out: impl Write) -> Result<()> {
    if spectra.is_empty() {
        return Err(Error::Empty("no spectra".into()));
    }
    for (i, s) in spectra.iter().enumerate() {
        s.write_csv(&mut out, i == 0)?;
    }
    Ok(())
}

struct Series {
    label: String,
    points: Vec<(f64, f64)>,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn axis_range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi - lo < 1e-12 {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Line plot; coordinates are `log10`-transformed where requested and points
/// that cannot be placed are dropped.
fn line_plot(title: &str, x_label: &str, y_label: &str, log_x: bool, log_y: bool, series: &[Series]) -> String {
    let tx = |v: f64| if log_x { v.log10() } else { v };
    let ty = |v: f64| if log_y { v.log10() } else { v };
    let placed: Vec<Vec<(f64, f64)>> = series
        .iter()
        .map(|s| {
            s.points
                .iter()
                .map(|&(x, y)| (tx(x), ty(y)))
                .filter(|p| p.0.is_finite() && p.1.is_finite())
                .collect()
        })
        .collect();
    let (x0, x1) = axis_range(placed.iter().flatten().map(|p| p.0));
    let (y0, y1) = axis_range(placed.iter().flatten().map(|p| p.1));
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);
    let tick = |v: f64, log: bool| if log { format!("1e{v:.2}") } else { format!("{v:.3}") };

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="15">{title}</text>"#, WIDTH / 2.0);
    let _ = writeln!(
        s,
        r#"<path d="M{m} {t} L{m} {b} L{r} {b}" fill="none" stroke="black"/>"#,
        m = MARGIN,
        t = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN
    );
    for (v, anchor, x, y) in [
        (x0, "start", MARGIN, HEIGHT - MARGIN + 16.0),
        (x1, "end", WIDTH - MARGIN, HEIGHT - MARGIN + 16.0),
    ] {
        let _ = writeln!(s, r#"<text x="{x}" y="{y}" text-anchor="{anchor}" font-family="sans-serif" font-size="11">{}</text>"#, tick(v, log_x));
    }
    for (v, y) in [(y0, HEIGHT - MARGIN), (y1, MARGIN)] {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{y}" text-anchor="end" font-family="sans-serif" font-size="11">{}</text>"#,
            MARGIN - 4.0,
            tick(v, log_y)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="13">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="16" y="{y}" text-anchor="middle" font-family="sans-serif" font-size="13" transform="rotate(-90 16 {y})">{y_label}</text>"#,
        y = HEIGHT / 2.0
    );
    for (i, (ser, pts)) in series.iter().zip(&placed).enumerate() {
        let color = COLORS[i % COLORS.len()];
        if !pts.is_empty() {
            let path: Vec<String> = pts.iter().map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y))).collect();
            let _ = writeln!(s, r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#, path.join(" "));
            for &(x, y) in pts {
                let _ = writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#, px(x), py(y));
            }
        }
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end" font-family="sans-serif" font-size="11" fill="{color}">{}</text>"#,
            WIDTH - MARGIN,
            MARGIN + 14.0 * i as f64,
            ser.label
        );
    }
    s.push_str("</svg>\n");
    s
}

/// `ratio` against `k`, log-log, one line per solution id.
pub fn stability_svg(records: &[StabilityRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Empty("no stability records".into()));
    }
    let mut series: Vec<Series> = Vec::new();
    for r in records.iter().filter(|r| !r.is_failed()) {
        match series.iter_mut().find(|s| s.label == r.solution_id) {
            Some(s) => s.points.push((r.k, r.ratio)),
            None => series.push(Series {
                label: r.solution_id.clone(),
                points: vec![(r.k, r.ratio)],
            }),
        }
    }
    for s in &mut series {
        s.points.sort_by(|a, b| a.0.total_cmp(&b.0));
    }
    Ok(line_plot("stability ratio", "k", "lhs / rhs", true, true, &series))
}

/// `σ_m` against `m ≥ 0` with a log vertical axis, one line per `k`.
pub fn spectrum_svg(spectra: &[SingularSpectrum]) -> Result<String> {
    if spectra.is_empty() {
        return Err(Error::Empty("no spectra".into()));
    }
    let series: Vec<Series> = spectra
        .iter()
        .map(|sp| {
            let mut points: Vec<(f64, f64)> = sp
                .modes
                .iter()
                .zip(&sp.sigma)
                .zip(&sp.resonant)
                .filter(|((m, _), res)| **m >= 0 && !**res)
                .map(|((m, s), _)| (*m as f64, *s))
                .collect();
            points.sort_by(|a, b| a.0.total_cmp(&b.0));
            Series {
                label: format!("k = {}", sp.k),
                points,
            }
        })
        .collect();
    Ok(line_plot("singular values of B", "m", "sigma_m", false, true, &series))
}

fn emit(dir: &Path, stem: &str, formats: &[ReportFormat], csv: impl Fn() -> Result<Vec<u8>>, svg: impl Fn() -> Result<String>) -> Result<Vec<PathBuf>> {
    // render everything before touching the file system
    let mut outputs = Vec::new();
    for f in formats {
        match f {
            ReportFormat::Csv => outputs.push((dir.join(format!("{stem}.csv")), csv()?)),
            ReportFormat::Svg => outputs.push((dir.join(format!("{stem}.svg")), svg()?.into_bytes())),
        }
    }
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (path, bytes) in outputs {
        fs::write(&path, bytes)?;
        paths.push(path);
    }
    Ok(paths)
}

pub fn emit_stability_report(records: &[StabilityRecord], dir: &Path, stem: &str, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    if records.is_empty() {
        return Err(Error::Empty("no stability records".into()));
    }
    emit(
        dir,
        stem,
        formats,
        || {
            let mut buf = Vec::new();
            write_stability_csv(records, &mut buf)?;
            Ok(buf)
        },
        || stability_svg(records),
    )
}

pub fn emit_spectrum_report(spectra: &[SingularSpectrum], dir: &Path, stem: &str, formats: &[ReportFormat]) -> Result<Vec<PathBuf>> {
    if spectra.is_empty() {
        return Err(Error::Empty("no spectra".into()));
    }
    emit(
        dir,
        stem,
        formats,
        || {
            let mut buf = Vec::new();
            write_spectrum_csv(spectra, &mut buf)?;
            Ok(buf)
        },
        || spectrum_svg(spectra),
    )
}

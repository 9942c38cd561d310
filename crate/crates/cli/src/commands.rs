use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use helmcont::config::RunConfig;
use helmcont::continuation::{
    continuation_error, read_field_csv, regularized_continuation, write_field_csv, write_modes_csv, write_trace_csv,
};
use helmcont::experiments::{
    add_noise, emit_spectrum_report, emit_stability_report, john_blowup_demo, manufacture_solution, sweep_k,
    write_john_csv, write_spectrum_csv, SweepSpec,
};
use helmcont::operator_b::{conjecture_metrics, operator_b_spectrum};
use helmcont::spectral::{hf_seminorm, sobolev_norm};
use helmcont::{CoefficientModel, Error, Geometry, Result};

pub struct Ui {
    pub quiet: bool,
}

impl Ui {
    fn say(&self, line: impl AsRef<str>) {
        if !self.quiet {
            println!("{}", line.as_ref());
        }
    }

    fn warn(&self, line: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("warning: {}", line.as_ref());
        }
    }
}

fn config_err(key: &str, message: impl Into<String>) -> Error {
    Error::Config {
        key: key.into(),
        message: message.into(),
    }
}

fn write_file(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    fill(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn cmd_continue(cfg: &RunConfig, ui: &Ui) -> Result<()> {
    let k = cfg.single_k()?;
    let geometry = cfg.geometry()?;
    let model = cfg.model()?;
    let x = &cfg.experiment;
    let solution = manufacture_solution(x.solution, k, &model, &geometry)?;
    let data = add_noise(&solution.data, x.delta, x.seed)?;
    let cutoff = cfg.spectral_cutoff(k)?;
    let result = regularized_continuation(
        &data,
        None,
        &model,
        &geometry,
        &cutoff,
        x.regularization,
        &cfg.continuation_options(),
    )?;
    let dir = &cfg.output.dir;
    write_file(&dir.join("field.csv"), |w| write_field_csv(&result, w))?;
    write_file(&dir.join("modes.csv"), |w| write_modes_csv(&result, w))?;
    write_file(&dir.join("trace.csv"), |w| write_trace_csv(&result, w))?;
    for warning in &result.warnings {
        ui.warn(warning);
    }
    let err = continuation_error(&result, &solution.target)?;
    let flagged = result.diagnostics.iter().filter(|d| d.flagged).count();
    ui.say(format!("solution={}", solution.id));
    ui.say(format!("k={k}"));
    ui.say(format!("kept_modes={}", cutoff.kept_modes().len()));
    ui.say(format!("flagged_modes={flagged}"));
    ui.say(format!("max_kept_amplification={}", result.max_kept_amplification()));
    ui.say(format!("trace_error={}", err.aggregate));
    Ok(())
}

pub fn cmd_sweep(cfg: &RunConfig, ui: &Ui) -> Result<()> {
    let k_list = cfg.k_values()?;
    if k_list.len() < 2 {
        return Err(config_err("cutoff.k_list", "a sweep needs at least two wave numbers"));
    }
    let spec = SweepSpec {
        setup: cfg.stability_setup()?,
        solution: cfg.experiment.solution,
        k_list,
    };
    let report = sweep_k(&spec)?;
    for r in report.records.iter().filter(|r| r.is_failed()) {
        ui.warn(format!("k={}: {}", r.k, r.error.as_deref().unwrap_or("failed")));
    }
    emit_stability_report(&report.records, &cfg.output.dir, "stability", &cfg.output.formats)?;
    if report.records.iter().all(|r| r.is_failed()) {
        return Err(Error::NonFinite("every wave number of the sweep failed".into()));
    }
    ui.say(format!("max_ratio={}", report.max_ratio));
    ui.say(format!("min_ratio={}", report.min_ratio));
    ui.say(format!("trend_slope={}", report.trend_slope));
    Ok(())
}

pub fn cmd_svd(cfg: &RunConfig, ui: &Ui) -> Result<()> {
    let (Geometry::Annulus(geometry), CoefficientModel::Radial(coeffs)) = (cfg.geometry()?, cfg.model()?) else {
        return Err(config_err("geometry.kind", "the singular spectrum needs an annulus"));
    };
    let options = cfg.operator_b_options();
    let spectra = cfg
        .k_values()?
        .into_iter()
        .map(|k| operator_b_spectrum(k, &coeffs, &geometry, &options))
        .collect::<Result<Vec<_>>>()?;
    let dir = &cfg.output.dir;
    if spectra.len() == 1 {
        write_file(&dir.join("spectrum.csv"), |w| write_spectrum_csv(&spectra, w))?;
        return Ok(());
    }
    emit_spectrum_report(&spectra, dir, "spectrum", &cfg.output.formats)?;
    let usable: Vec<_> = spectra
        .iter()
        .filter(|s| {
            let dead = s.resonant.iter().all(|&r| r);
            if dead {
                ui.warn(format!("k = {}: every mode is resonant, dropped", s.k));
            }
            !dead
        })
        .cloned()
        .collect();
    if usable.len() < 3 {
        ui.warn("at least three usable wave numbers are needed for plateau metrics; no report written");
        return Ok(());
    }
    let report = conjecture_metrics(&usable, cfg.operator_b.theta_plateau)?;
    for w in &report.warnings {
        ui.warn(w);
    }
    fs::write(dir.join("conjecture.txt"), report.to_string())?;
    ui.say(format!("delta1_hat={}", report.delta1_hat));
    ui.say(format!("delta2_hat={}", report.delta2_hat));
    Ok(())
}

pub fn cmd_demo_john(cfg: &RunConfig, ui: &Ui) -> Result<()> {
    let CoefficientModel::Strip(coeffs) = cfg.model()? else {
        return Err(config_err("geometry.kind", "the blow-up demo runs on the strip"));
    };
    let rows = john_blowup_demo(&cfg.k_values()?, cfg.john.mu, cfg.john.mu_kept, &coeffs, cfg.cutoff.eps)?;
    write_file(&cfg.output.dir.join("john.csv"), |w| write_john_csv(&rows, w))?;
    for r in &rows {
        ui.say(format!(
            "k={} mode={} amplification={:.6e} closed_form={:.6e} kept_mode={} kept_amplification={:.6}",
            r.k, r.mode, r.amplification, r.closed_form, r.kept_mode, r.kept_amplification
        ));
    }
    Ok(())
}

pub fn cmd_norms(cfg: &RunConfig, ui: &Ui) -> Result<()> {
    let path = cfg
        .norms
        .field
        .as_ref()
        .ok_or_else(|| config_err("norms.field", "no field dump given"))?;
    let geometry = cfg.geometry()?;
    let field = read_field_csv(&fs::read_to_string(path)?, &geometry)?;
    let mut lines = vec![
        format!("l2={}", sobolev_norm(&field, 0)?),
        format!("h1={}", sobolev_norm(&field, 1)?),
        format!("h2={}", sobolev_norm(&field, 2)?),
    ];
    if let Ok(k) = cfg.single_k() {
        let cutoff = cfg.spectral_cutoff(k)?;
        lines.push(format!("k={k}"));
        lines.push(format!("hf1={}", hf_seminorm(&field, 1, &cutoff)?));
        lines.push(format!("hf2={}", hf_seminorm(&field, 2, &cutoff)?));
    }
    let text = lines.join("\n") + "\n";
    fs::write(cfg.output.dir.join("norms.txt"), &text)?;
    ui.say(text.trim_end());
    Ok(())
}

//! Manufactured solutions, noise, measured stability ratios, sweeps and reports.

mod john;
mod manufacture;
mod noise;
mod report;
mod stability;
mod sweep;

pub use john::{john_blowup_demo, write_john_csv, JohnRow};
pub use manufacture::{manufacture_solution, pde_residual, ManufacturedSolution, SolutionKind};
pub use noise::add_noise;
pub use report::{
    emit_spectrum_report, emit_stability_report, parse_stability_csv, spectrum_svg, stability_header, stability_svg,
    write_spectrum_csv, write_stability_csv, ReportFormat,
};
pub use stability::{stability_ratio, term_names, StabilityRecord, StabilitySetup};
pub use sweep::{ls_slope, sweep_k, SweepReport, SweepSpec};

//! Runs refinement studies and writes convergence tables as CSV.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use isofem::assembly::{assemble_operators, build_space};
use isofem::study::{
    diagnostics_csv, run_geometry_diagnostics, run_interpolation_study, run_study, study_csv,
    StudyConfig,
};
use isofem::Error;

#[derive(Parser, Debug)]
#[command(
    name = "isofem",
    version,
    about = "Convergence studies for isoparametric finite elements"
)]
struct Cli {
    /// key=value file with default settings; flags take precedence
    #[arg(long)]
    config: Option<PathBuf>,
    /// disk or ball
    #[arg(long)]
    domain: Option<String>,
    /// polynomial degree k
    #[arg(long)]
    degree: Option<String>,
    /// number of refinement levels (at least 2)
    #[arg(long)]
    levels: Option<String>,
    /// target mesh size of the coarsest level
    #[arg(long)]
    h0: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    /// grp, robin (beta = 0) or neumann (alpha = beta = 0)
    #[arg(long)]
    variant: Option<String>,
    /// poly2d, poly3d, one, constant:<c>, linear or quadratic
    #[arg(long)]
    solution: Option<String>,
    /// relative residual tolerance of the linear solver
    #[arg(long)]
    tol: Option<String>,
    /// where the exact solution is sampled: discrete (on Ω_h) or exact (on Ω)
    #[arg(long)]
    lift: Option<String>,
    /// study CSV path (standard output when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// geometry diagnostics CSV path
    #[arg(long)]
    diagnostics: Option<PathBuf>,
    /// measure the nodal interpolant instead of the discrete solution
    #[arg(long)]
    interpolation: bool,
    /// write the system matrix of the coarsest level in Matrix Market format
    #[arg(long)]
    export_matrix: Option<PathBuf>,
}

fn build_config(cli: &Cli) -> Result<StudyConfig, Error> {
    let mut config = StudyConfig::default();
    if let Some(path) = &cli.config {
        let text = fs::read_to_string(path).map_err(|e| Error::Config {
            field: "config".into(),
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        config.apply_file_contents(&text)?;
    }
    let flags = [
        ("domain", &cli.domain),
        ("degree", &cli.degree),
        ("levels", &cli.levels),
        ("h0", &cli.h0),
        ("alpha", &cli.alpha),
        ("beta", &cli.beta),
        ("kappa", &cli.kappa),
        ("variant", &cli.variant),
        ("solution", &cli.solution),
        ("tol", &cli.tol),
        ("lift", &cli.lift),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    if let Some(p) = &cli.out {
        config.out = Some(p.clone());
    }
    if let Some(p) = &cli.diagnostics {
        config.diagnostics = Some(p.clone());
    }
    config.validate()?;
    Ok(config)
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), Error> {
    fs::write(path, contents).map_err(|e| Error::Config {
        field: "out".into(),
        message: format!("cannot write {}: {e}", path.display()),
    })
}

fn run(cli: &Cli, config: &StudyConfig) -> Result<(), Error> {
    if let Some(path) = &cli.export_matrix {
        let mesh = &config.meshes()?[0];
        let space = build_space(mesh, &config.domain(), config.degree)?;
        let k = assemble_operators(&space)?.system_matrix(&config.parameters()?)?;
        let mut buf = Vec::new();
        k.write_matrix_market(&mut buf)?;
        write_output(path, &String::from_utf8_lossy(&buf))?;
    }

    let report = if cli.interpolation {
        run_interpolation_study(config)?
    } else {
        let outcome = run_study(config)?;
        for (l, s) in outcome.solves.iter().enumerate() {
            eprintln!(
                "level {l}: {} CG iterations, relative residual {:.3e}",
                s.iterations, s.relative_residual
            );
        }
        outcome.report
    };
    let csv = study_csv(&report);
    match &config.out {
        Some(path) => write_output(path, &csv)?,
        None => print!("{csv}"),
    }

    if let Some(path) = &config.diagnostics {
        let rows = run_geometry_diagnostics(config)?;
        write_output(path, &diagnostics_csv(&rows))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match run(&cli, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_configuration() { 1 } else { 2 })
        }
    }
}

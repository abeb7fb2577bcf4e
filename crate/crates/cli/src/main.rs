use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use fks::bench::{reference_error, run_benchmark};
use fks::config::{OutputFormat, RunConfig};
use fks::diagnostics::moment_fields;
use fks::output::{write_fields_csv, write_vtk_structured_points};

/// Fast kinetic scheme for the BGK equation: runs a preset and reports cost,
/// conservation and (optionally) the error against a reference solution.
#[derive(Debug, Parser)]
#[command(name = "fks", version)]
struct Args {
    /// `key = value` file; flags given on the command line take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// sod1d, sod2d, sod3d, sod1d-in-3d, homogeneous-relax, smooth-periodic
    #[arg(long)]
    preset: Option<String>,
    /// Cells along x.
    #[arg(long)]
    nx: Option<String>,
    /// Velocity points per axis.
    #[arg(long)]
    nv: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    vmin: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    vmax: Option<String>,
    /// Relaxation time (`inf` for free transport).
    #[arg(long)]
    tau: Option<String>,
    #[arg(long)]
    tfinal: Option<String>,
    /// CFL safety factor in (0, 1], default 0.95.
    #[arg(long)]
    cfl: Option<String>,
    /// Splitting order, 1 or 2.
    #[arg(long)]
    order: Option<String>,
    /// periodic, clamp or reflect.
    #[arg(long)]
    bc: Option<String>,
    /// Write the macroscopic fields here.
    #[arg(long)]
    out: Option<String>,
    /// csv or vtk (3D presets only).
    #[arg(long)]
    format: Option<String>,
    /// riemann, upwind or none.
    #[arg(long = "ref")]
    reference: Option<String>,
    /// Write the one-line cost report CSV here.
    #[arg(long)]
    report: Option<String>,
    /// Write the per-step conservation ledger CSV here.
    #[arg(long)]
    ledger: Option<PathBuf>,
}

impl Args {
    fn overrides(&self) -> Vec<(String, String)> {
        [
            ("preset", &self.preset),
            ("nx", &self.nx),
            ("nv", &self.nv),
            ("vmin", &self.vmin),
            ("vmax", &self.vmax),
            ("tau", &self.tau),
            ("tfinal", &self.tfinal),
            ("cfl", &self.cfl),
            ("order", &self.order),
            ("bc", &self.bc),
            ("out", &self.out),
            ("format", &self.format),
            ("ref", &self.reference),
            ("report", &self.report),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.clone().map(|v| (k.to_string(), v)))
        .collect()
    }
}

fn run(args: Args) -> Result<()> {
    let file = args
        .config
        .as_ref()
        .map(|p| std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display())))
        .transpose()?;
    let config = RunConfig::from_sources(file.as_deref(), &args.overrides())?;

    let outcome = run_benchmark(&config)?;
    println!("{}", outcome.report);

    let moments = moment_fields(&outcome.field);
    if !moments.vacuum_cells.is_empty() {
        eprintln!(
            "warning: {} vacuum cells, first at index {}",
            moments.vacuum_cells.len(),
            moments.vacuum_cells[0]
        );
    }
    if let Some(err) = reference_error(&config, &moments)? {
        println!("density error   L1 {:.6e}  Linf {:.6e}", err.l1, err.linf);
    }

    let sgrid = outcome.field.spatial_grid();
    if let Some(path) = &config.out {
        match config.format {
            OutputFormat::Csv => write_fields_csv(&moments, sgrid, path),
            OutputFormat::Vtk => write_vtk_structured_points(&moments, sgrid, path),
        }
        .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &config.report {
        outcome
            .report
            .write_csv(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(path) = &args.ledger {
        outcome
            .summary
            .ledger
            .write_csv(path)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

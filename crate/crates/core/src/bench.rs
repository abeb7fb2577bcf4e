//! Timed preset runs and the cost report (cycles, time per cycle per cell,
//! stage shares, memory estimate).

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use crate::config::{Reference, RunConfig};
use crate::diagnostics::{error_norms, fmt17, moment_fields, Drifts, ErrorNorms, MomentSet};
use crate::equilibrium::{num_moments, ProjectionOperator};
use crate::error::{FksError, Result};
use crate::field::DistributionField;
use crate::grid::{cfl_time_step, MAX_DIM};
use crate::oracles::{sod_macro_profile, upwind_dvm_step};
use crate::solver::{init_field, run_splitting, step_schedule, RunSummary};

pub const REPORT_HEADER: &str = "preset,nx,nv,ncycle,T,Tcycle,Tcell,transport_pct,relax_pct,\
mass_drift,mom_drift,energy_drift,min_f,min_E";

#[derive(Debug, Clone)]
pub struct RunReport {
    pub preset: String,
    pub nx: usize,
    pub nv: usize,
    pub num_cells: usize,
    pub num_nodes: usize,
    pub ncycle: usize,
    /// Wall time of the time loop in seconds.
    pub wall: f64,
    pub transport_pct: f64,
    pub relax_pct: f64,
    pub drifts: Drifts,
    pub min_f: f64,
    pub min_e: f64,
    /// Estimated bytes held by the solver state.
    pub memory: usize,
}

impl RunReport {
    pub fn t_cycle(&self) -> f64 {
        self.wall / self.ncycle as f64
    }

    pub fn t_cell(&self) -> f64 {
        self.wall / self.ncycle as f64 / self.num_cells as f64
    }

    pub fn csv_row(&self) -> String {
        let cols = [
            self.preset.clone(),
            self.nx.to_string(),
            self.nv.to_string(),
            self.ncycle.to_string(),
            fmt17(self.wall),
            fmt17(self.t_cycle()),
            fmt17(self.t_cell()),
            fmt17(self.transport_pct),
            fmt17(self.relax_pct),
            fmt17(self.drifts.mass),
            fmt17(self.drifts.max_momentum()),
            fmt17(self.drifts.energy),
            fmt17(self.min_f),
            fmt17(self.min_e),
        ];
        cols.join(",")
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::fs::File::create(path)?;
        writeln!(w, "{REPORT_HEADER}")?;
        writeln!(w, "{}", self.csv_row())?;
        Ok(())
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "preset          {}", self.preset)?;
        writeln!(f, "cells x nodes   {} x {}", self.num_cells, self.num_nodes)?;
        writeln!(f, "Ncycle          {}", self.ncycle)?;
        writeln!(f, "T [s]           {:.4}", self.wall)?;
        writeln!(f, "Tcycle [s]      {:.4e}", self.t_cycle())?;
        writeln!(f, "Tcell [s]       {:.4e}", self.t_cell())?;
        writeln!(f, "transport [%]   {:.3}", self.transport_pct)?;
        writeln!(f, "relaxation [%]  {:.3}", self.relax_pct)?;
        writeln!(f, "mass drift      {:.3e}", self.drifts.mass)?;
        writeln!(f, "momentum drift  {:.3e}", self.drifts.max_momentum())?;
        writeln!(f, "energy drift    {:.3e}", self.drifts.energy)?;
        writeln!(f, "min f           {:.3e}", self.min_f)?;
        writeln!(f, "min E           {:.3e}", self.min_e)?;
        write!(f, "memory [MB]     {:.1}", self.memory as f64 / 1e6)
    }
}

/// `N Nc` doubles for the distribution plus per-node shifts and offsets, the
/// projection rows and the per-cell moments.
pub fn memory_estimate(num_nodes: usize, num_cells: usize, dim: usize) -> usize {
    let per_node = 2 * MAX_DIM * 8 + num_moments(dim) * 8 + MAX_DIM * 8;
    num_nodes * num_cells * 8 + num_nodes * per_node + num_cells * (MAX_DIM + 2) * 8
}

pub struct BenchOutcome {
    pub report: RunReport,
    pub field: DistributionField,
    pub summary: RunSummary,
}

/// Builds the preset, runs it to `tfinal` and measures the time loop.
pub fn run_benchmark(config: &RunConfig) -> Result<BenchOutcome> {
    let vgrid = config.velocity_grid()?;
    let sgrid = config.spatial_grid()?;
    let proj = ProjectionOperator::new(&vgrid)?;
    let ic = config.preset.initial_condition();
    let mut field = init_field(ic.as_ref(), &sgrid, &vgrid, &proj)?;

    let t0 = Instant::now();
    let summary = run_splitting(&mut field, &config.solver_config(), &proj)?;
    let wall = t0.elapsed().as_secs_f64();

    let pct = |d: std::time::Duration| 100.0 * d.as_secs_f64() / wall;
    let report = RunReport {
        preset: config.preset.name.to_string(),
        nx: config.nx,
        nv: config.nv,
        num_cells: sgrid.num_cells(),
        num_nodes: vgrid.len(),
        ncycle: summary.cycles,
        wall,
        transport_pct: pct(summary.timings.transport),
        relax_pct: pct(summary.timings.relax),
        drifts: summary.ledger.drifts(),
        min_f: summary.ledger.min_value(),
        min_e: summary.ledger.min_equilibrium(),
        memory: memory_estimate(vgrid.len(), sgrid.num_cells(), vgrid.dim()),
    };
    Ok(BenchOutcome {
        report,
        field,
        summary,
    })
}

/// Density of the first-order upwind discrete-velocity baseline on the
/// configuration's grids, with the same CFL step and relaxation.
pub fn upwind_density(config: &RunConfig) -> Result<Vec<f64>> {
    let vgrid = config.velocity_grid()?;
    let sgrid = config.spatial_grid()?;
    let proj = ProjectionOperator::new(&vgrid)?;
    let ic = config.preset.initial_condition();
    let mut field = init_field(ic.as_ref(), &sgrid, &vgrid, &proj)?;
    let dt = cfl_time_step(&vgrid, sgrid.dx(), config.cfl)?;
    for h in step_schedule(dt, config.tfinal) {
        upwind_dvm_step(&mut field, h, config.tau, &proj)?;
    }
    Ok(moment_fields(&field).rho)
}

/// Exact Riemann density at every cell centre of a planar Sod preset.
pub fn riemann_density(config: &RunConfig) -> Result<Vec<f64>> {
    let (left, right, x0) = config.preset.riemann_reference().ok_or(FksError::Config {
        key: "ref".into(),
        reason: "preset has no Riemann reference".into(),
    })?;
    let sgrid = config.spatial_grid()?;
    let xs: Vec<f64> = (0..sgrid.num_cells())
        .map(|j| sgrid.cell_center(j)[0])
        .collect();
    Ok(sod_macro_profile(&left, &right, x0, config.tfinal, &xs)?
        .into_iter()
        .map(|s| s.rho)
        .collect())
}

/// Density error of `moments` against the configured reference, if any.
pub fn reference_error(config: &RunConfig, moments: &MomentSet) -> Result<Option<ErrorNorms>> {
    let reference = match config.reference {
        Reference::None => return Ok(None),
        Reference::Riemann => riemann_density(config)?,
        Reference::Upwind => upwind_density(config)?,
    };
    let vol = config.spatial_grid()?.cell_volume();
    error_norms(&moments.rho, &reference, vol).map(Some)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(pairs: &[(&str, &str)]) -> RunConfig {
        let flags: Vec<(String, String)> = pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect();
        RunConfig::from_sources(None, &flags).unwrap()
    }

    #[test]
    fn report_arithmetic() {
        let out = run_benchmark(&config(&[
            ("preset", "sod1d"),
            ("nx", "30"),
            ("nv", "16"),
            ("tfinal", "0.01"),
        ]))
        .unwrap();
        let r = &out.report;
        assert!((r.t_cycle() * r.ncycle as f64 - r.wall).abs() <= 1e-15 * r.wall);
        assert_eq!(r.t_cell(), r.t_cycle() / 30.0);
        assert!(r.transport_pct + r.relax_pct <= 100.0 + 1e-9);
        assert_eq!(out.summary.ledger.len(), r.ncycle + 1);
        let row = r.csv_row();
        assert_eq!(row.split(',').count(), REPORT_HEADER.split(',').count());
        assert!(row.starts_with("sod1d,30,16,"));
    }

    #[test]
    fn memory_linear_in_cells() {
        let a = memory_estimate(1728, 1000, 3);
        let b = memory_estimate(1728, 2000, 3);
        let c = memory_estimate(1728, 3000, 3);
        assert_eq!(c - b, b - a);
        assert!(a > 1728 * 1000 * 8);
    }

    #[test]
    fn deterministic_fields() {
        let c = config(&[
            ("preset", "sod1d"),
            ("nx", "40"),
            ("nv", "20"),
            ("tfinal", "0.01"),
        ]);
        let a = run_benchmark(&c).unwrap();
        let b = run_benchmark(&c).unwrap();
        assert_eq!(a.field.values(), b.field.values());
    }

    #[test]
    fn riemann_reference_error_is_small_near_fluid_limit() {
        let c = config(&[
            ("preset", "sod1d"),
            ("nx", "100"),
            ("nv", "40"),
            ("ref", "riemann"),
        ]);
        let out = run_benchmark(&c).unwrap();
        let err = reference_error(&c, &moment_fields(&out.field))
            .unwrap()
            .unwrap();
        assert!(err.l1 < 0.03, "L1 = {}", err.l1);
    }
}

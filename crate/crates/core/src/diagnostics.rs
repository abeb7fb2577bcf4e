//! Conservation ledger, entropy monitor, macroscopic fields and error norms.

use std::io::Write;
use std::path::Path;

use crate::equilibrium::ConservedState;
use crate::error::{FksError, Result};
use crate::field::DistributionField;
use crate::grid::MAX_DIM;
use crate::solver::cell_moments;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerEntry {
    pub time: f64,
    /// `(mass, momentum.., energy)`, the first `d + 2` entries are used.
    pub totals: [f64; MAX_DIM + 2],
    pub min_value: f64,
    pub min_equilibrium: f64,
}

/// Relative drift of the conserved totals against the first ledger entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drifts {
    pub mass: f64,
    /// Momentum drift per component, scaled by `sqrt(2 M E)` of the initial
    /// totals (total momentum is often zero).
    pub momentum: [f64; MAX_DIM],
    pub energy: f64,
}

impl Drifts {
    pub fn max_momentum(&self) -> f64 {
        self.momentum.iter().cloned().fold(0.0, f64::max)
    }
}

/// Per-step conserved totals plus the positivity diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationLedger {
    dim: usize,
    entries: Vec<LedgerEntry>,
}

impl ConservationLedger {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn drifts(&self) -> Drifts {
        let d = self.dim;
        let Some(first) = self.entries.first() else {
            return Drifts {
                mass: 0.0,
                momentum: [0.0; MAX_DIM],
                energy: 0.0,
            };
        };
        let m0 = first.totals[0];
        let e0 = first.totals[d + 1];
        let p_scale = (2.0 * m0.abs() * e0.abs()).sqrt();
        let mut out = Drifts {
            mass: 0.0,
            momentum: [0.0; MAX_DIM],
            energy: 0.0,
        };
        for e in &self.entries {
            out.mass = out.mass.max((e.totals[0] - m0).abs() / m0.abs());
            out.energy = out.energy.max((e.totals[d + 1] - e0).abs() / e0.abs());
            for a in 0..d {
                let dp = (e.totals[1 + a] - first.totals[1 + a]).abs() / p_scale;
                out.momentum[a] = out.momentum[a].max(dp);
            }
        }
        out
    }

    pub fn min_value(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.min_value)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn min_equilibrium(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.min_equilibrium)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let axes = ["x", "y", "z"];
        let mut header = vec!["step".to_string(), "time".into(), "mass".into()];
        header.extend(axes[..self.dim].iter().map(|a| format!("mom_{a}")));
        header.extend(["energy".into(), "min_f".into(), "min_E".into()]);
        writeln!(w, "{}", header.join(","))?;
        for (i, e) in self.entries.iter().enumerate() {
            let mut row = vec![i.to_string(), fmt17(e.time)];
            row.extend(e.totals[..self.dim + 2].iter().map(|&x| fmt17(x)));
            row.push(fmt17(e.min_value));
            row.push(fmt17(e.min_equilibrium));
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Macroscopic fields at every cell centre.
#[derive(Debug, Clone)]
pub struct MomentSet {
    pub dim: usize,
    pub states: Vec<ConservedState>,
    pub rho: Vec<f64>,
    pub velocity: Vec<[f64; MAX_DIM]>,
    pub theta: Vec<f64>,
    /// Cells whose density is not positive; their derived fields are NaN.
    pub vacuum_cells: Vec<usize>,
}

impl MomentSet {
    pub fn from_states(dim: usize, states: Vec<ConservedState>) -> Self {
        let mut rho = Vec::with_capacity(states.len());
        let mut velocity = Vec::with_capacity(states.len());
        let mut theta = Vec::with_capacity(states.len());
        let mut vacuum_cells = Vec::new();
        for (j, s) in states.iter().enumerate() {
            rho.push(s.rho);
            if s.rho > 0.0 {
                velocity.push(s.velocity());
                theta.push(s.theta(dim));
            } else {
                vacuum_cells.push(j);
                velocity.push([f64::NAN; MAX_DIM]);
                theta.push(f64::NAN);
            }
        }
        Self {
            dim,
            states,
            rho,
            velocity,
            theta,
            vacuum_cells,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn pressure(&self) -> Vec<f64> {
        self.rho
            .iter()
            .zip(&self.theta)
            .map(|(r, t)| r * t)
            .collect()
    }
}

/// Moments of the shifted profile at every cell centre.
pub fn moment_fields(field: &DistributionField) -> MomentSet {
    let dim = field.velocity_grid().dim();
    let states = cell_moments(field)
        .iter()
        .map(|m| ConservedState::from_array(dim, m))
        .collect();
    MomentSet::from_states(dim, states)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entropy {
    pub value: f64,
    /// Number of negative values replaced by zero.
    pub clamped: usize,
}

/// `H = sum_j dx^d sum_k F log F dv^d` over the profile at cell centres,
/// with `0 log 0 = 0` and negative values clamped to zero.
pub fn discrete_entropy(field: &DistributionField) -> Entropy {
    let vol = field.spatial_grid().cell_volume() * field.velocity_grid().cell_volume();
    let mut value = 0.0;
    let mut clamped = 0;
    for j in 0..field.num_cells() {
        for f in field.gather(j) {
            if f < 0.0 {
                clamped += 1;
            } else if f > 0.0 {
                value += f * f.ln();
            }
        }
    }
    Entropy {
        value: value * vol,
        clamped,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorNorms {
    pub l1: f64,
    pub linf: f64,
}

/// `L1 = vol * sum |a - b|`, `Linf = max |a - b|`.
pub fn error_norms(computed: &[f64], reference: &[f64], cell_volume: f64) -> Result<ErrorNorms> {
    if computed.len() != reference.len() {
        return Err(FksError::LengthMismatch {
            expected: reference.len(),
            got: computed.len(),
        });
    }
    let mut l1 = 0.0;
    let mut linf = 0.0f64;
    for (a, b) in computed.iter().zip(reference) {
        let d = (a - b).abs();
        l1 += d;
        linf = linf.max(d);
    }
    Ok(ErrorNorms {
        l1: l1 * cell_volume,
        linf,
    })
}

//! Discrete moments, the Maxwellian and the conservative L2 projection.
//!
//! The moment map `C` has rows `(1, v, |v|^2 / 2) * dv^d`, so `C f` is the
//! conserved triple `(rho, rho u, E)` directly. The correction matrix
//! `P = C^T (C C^T)^-1` depends only on the velocity grid and is built once.

use nalgebra::{DMatrix, DVector};

use crate::error::{FksError, Result};
use crate::grid::{VelocityGrid, MAX_DIM};

/// Number of conserved moments for dimension `dim`.
pub const fn num_moments(dim: usize) -> usize {
    dim + 2
}

/// Condition estimate above which `C C^T` is treated as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Conserved moments `(rho, rho u, E)` at one point. Momentum components
/// beyond the dimension are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: [f64; MAX_DIM],
    pub energy: f64,
}

impl ConservedState {
    pub fn from_primitive(dim: usize, rho: f64, u: [f64; MAX_DIM], theta: f64) -> Self {
        let mut mom = [0.0; MAX_DIM];
        let mut u2 = 0.0;
        for a in 0..dim {
            mom[a] = rho * u[a];
            u2 += u[a] * u[a];
        }
        Self {
            rho,
            mom,
            energy: 0.5 * rho * u2 + 0.5 * dim as f64 * rho * theta,
        }
    }

    pub fn velocity(&self) -> [f64; MAX_DIM] {
        self.mom.map(|m| m / self.rho)
    }

    /// Scaled temperature `theta = (2E - rho |u|^2) / (d rho)`.
    pub fn theta(&self, dim: usize) -> f64 {
        let mom2: f64 = self.mom.iter().map(|m| m * m).sum();
        (2.0 * self.energy - mom2 / self.rho) / (dim as f64 * self.rho)
    }

    /// The first `dim + 2` entries are `(rho, mom_0..mom_{d-1}, E)`.
    pub fn to_array(&self, dim: usize) -> [f64; MAX_DIM + 2] {
        let mut out = [0.0; MAX_DIM + 2];
        out[0] = self.rho;
        out[1..=dim].copy_from_slice(&self.mom[..dim]);
        out[dim + 1] = self.energy;
        out
    }

    pub fn from_array(dim: usize, a: &[f64]) -> Self {
        let mut mom = [0.0; MAX_DIM];
        mom[..dim].copy_from_slice(&a[1..=dim]);
        Self {
            rho: a[0],
            mom,
            energy: a[dim + 1],
        }
    }

    fn validate(&self, dim: usize, cell: usize) -> Result<f64> {
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(FksError::Vacuum {
                cell,
                rho: self.rho,
            });
        }
        let theta = self.theta(dim);
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(FksError::ColdState { cell, theta });
        }
        Ok(theta)
    }
}

#[inline]
pub(crate) fn half_speed_sq(v: &[f64; MAX_DIM]) -> f64 {
    0.5 * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}

/// Raw moment sums `C f` in node order, without any admissibility check.
pub fn moment_sums(f: &[f64], vgrid: &VelocityGrid) -> [f64; MAX_DIM + 2] {
    let dim = vgrid.dim();
    let mut s0 = 0.0;
    let mut s1 = [0.0; MAX_DIM];
    let mut s2 = 0.0;
    for (fk, v) in f.iter().zip(vgrid.nodes()) {
        s0 += fk;
        for a in 0..MAX_DIM {
            s1[a] += v[a] * fk;
        }
        s2 += half_speed_sq(v) * fk;
    }
    let vol = vgrid.cell_volume();
    let mut out = [0.0; MAX_DIM + 2];
    out[0] = s0 * vol;
    for a in 0..dim {
        out[1 + a] = s1[a] * vol;
    }
    out[dim + 1] = s2 * vol;
    out
}

/// Conserved moments of one cell's discrete distribution.
pub fn compute_moments(f: &[f64], vgrid: &VelocityGrid) -> Result<ConservedState> {
    if f.len() != vgrid.len() {
        return Err(FksError::LengthMismatch {
            expected: vgrid.len(),
            got: f.len(),
        });
    }
    let u = ConservedState::from_array(vgrid.dim(), &moment_sums(f, vgrid));
    if !(u.rho > 0.0) || !u.rho.is_finite() {
        return Err(FksError::Vacuum {
            cell: 0,
            rho: u.rho,
        });
    }
    Ok(u)
}

/// Per-axis factorisation of a Maxwellian on the tensor velocity grid:
/// `M(v_k) = prefactor * prod_a gauss[a][i_a(k)]`.
#[derive(Debug, Clone)]
pub(crate) struct MaxwellianFactors {
    pub prefactor: f64,
    /// `dim * K` entries, axis-major.
    pub gauss: Vec<f64>,
}

impl MaxwellianFactors {
    pub fn new(state: &ConservedState, vgrid: &VelocityGrid, cell: usize) -> Result<Self> {
        let mut gauss = vec![0.0; vgrid.dim() * vgrid.points_per_axis()];
        let prefactor = Self::fill(state, vgrid, cell, &mut gauss)?;
        Ok(Self { prefactor, gauss })
    }

    /// Writes the per-axis Gaussian factors into `gauss` and returns the prefactor.
    pub fn fill(
        state: &ConservedState,
        vgrid: &VelocityGrid,
        cell: usize,
        gauss: &mut [f64],
    ) -> Result<f64> {
        let dim = vgrid.dim();
        let theta = state.validate(dim, cell)?;
        let u = state.velocity();
        let k = vgrid.points_per_axis();
        let inv = 1.0 / (2.0 * theta);
        for a in 0..dim {
            for (g, w) in gauss[a * k..(a + 1) * k]
                .iter_mut()
                .zip(vgrid.axis_values())
            {
                let c = w - u[a];
                *g = (-c * c * inv).exp();
            }
        }
        Ok(state.rho / (2.0 * std::f64::consts::PI * theta).powf(0.5 * dim as f64))
    }

    #[inline]
    pub fn value(
        prefactor: f64,
        gauss: &[f64],
        k: usize,
        idx: &[usize; MAX_DIM],
        dim: usize,
    ) -> f64 {
        let mut m = prefactor;
        for a in 0..dim {
            m *= gauss[a * k + idx[a]];
        }
        m
    }

    /// `C M` computed from per-axis sums.
    pub fn moments(prefactor: f64, gauss: &[f64], vgrid: &VelocityGrid) -> [f64; MAX_DIM + 2] {
        let dim = vgrid.dim();
        let k = vgrid.points_per_axis();
        let w = vgrid.axis_values();
        let mut s0 = [1.0; MAX_DIM];
        let mut s1 = [0.0; MAX_DIM];
        let mut s2 = [0.0; MAX_DIM];
        for a in 0..dim {
            let g = &gauss[a * k..(a + 1) * k];
            s0[a] = g.iter().sum();
            s1[a] = g.iter().zip(w).map(|(g, w)| g * w).sum();
            s2[a] = g.iter().zip(w).map(|(g, w)| g * w * w).sum();
        }
        let scale = prefactor * vgrid.cell_volume();
        let mut out = [0.0; MAX_DIM + 2];
        out[0] = scale * s0.iter().product::<f64>();
        let mut energy = 0.0;
        for a in 0..dim {
            let others: f64 = (0..dim).filter(|&b| b != a).map(|b| s0[b]).product();
            out[1 + a] = scale * s1[a] * others;
            energy += s2[a] * others;
        }
        out[dim + 1] = 0.5 * scale * energy;
        out
    }
}

/// Pointwise Maxwellian `rho / (2 pi theta)^{d/2} exp(-|v - u|^2 / (2 theta))`
/// at every velocity node.
pub fn maxwellian_pointwise(state: &ConservedState, vgrid: &VelocityGrid) -> Result<Vec<f64>> {
    let factors = MaxwellianFactors::new(state, vgrid, 0)?;
    let k = vgrid.points_per_axis();
    Ok(vgrid
        .axis_indices()
        .iter()
        .map(|idx| MaxwellianFactors::value(factors.prefactor, &factors.gauss, k, idx, vgrid.dim()))
        .collect())
}

/// Precomputed moment matrix data and correction matrix `P = C^T (C C^T)^-1`.
#[derive(Debug, Clone)]
pub struct ProjectionOperator {
    dim: usize,
    num_nodes: usize,
    /// Row-major `N x (d+2)`.
    correction: Vec<f64>,
    condition: f64,
}

impl ProjectionOperator {
    pub fn new(vgrid: &VelocityGrid) -> Result<Self> {
        Self::from_nodes(vgrid.dim(), vgrid.cell_volume(), vgrid.nodes())
    }

    /// Builds the operator from an explicit node list. Unlike
    /// [`VelocityGrid::new`] no node-count gate is applied, so rank
    /// deficiency surfaces as [`FksError::DegenerateVelocityGrid`].
    pub fn from_nodes(dim: usize, cell_volume: f64, nodes: &[[f64; MAX_DIM]]) -> Result<Self> {
        let m = num_moments(dim);
        let n = nodes.len();
        let c = moment_matrix(dim, cell_volume, nodes);

        // Equilibrate C C^T before inverting; the raw rows differ in scale by |v|^2.
        let normal = &c * c.transpose();
        let scale: Vec<f64> = (0..m).map(|i| 1.0 / normal[(i, i)].sqrt()).collect();
        if scale.iter().any(|s| !s.is_finite()) {
            return Err(FksError::DegenerateVelocityGrid {
                condition: f64::INFINITY,
            });
        }
        let scaled = DMatrix::from_fn(m, m, |i, j| normal[(i, j)] * scale[i] * scale[j]);
        let eig = scaled.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        let lmin = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        let condition = if lmin > 0.0 {
            lmax / lmin
        } else {
            f64::INFINITY
        };
        if !(condition <= MAX_CONDITION) {
            return Err(FksError::DegenerateVelocityGrid { condition });
        }
        let chol = scaled
            .cholesky()
            .ok_or(FksError::DegenerateVelocityGrid { condition })?;

        let mut correction = vec![0.0; n * m];
        for k in 0..n {
            let rhs = DVector::from_fn(m, |i, _| c[(i, k)] * scale[i]);
            let y = chol.solve(&rhs);
            for r in 0..m {
                correction[k * m + r] = y[r] * scale[r];
            }
        }
        Ok(Self {
            dim,
            num_nodes: n,
            correction,
            condition,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Condition number of the equilibrated normal matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Row `k` of `P` (length `d + 2`).
    #[inline]
    pub fn row(&self, k: usize) -> &[f64] {
        let m = num_moments(self.dim);
        &self.correction[k * m..(k + 1) * m]
    }

    /// `P` as a dense `N x (d+2)` matrix.
    pub fn correction_matrix(&self) -> DMatrix<f64> {
        let m = num_moments(self.dim);
        DMatrix::from_row_slice(self.num_nodes, m, &self.correction)
    }

    /// Adds `P lambda` to `f`.
    fn apply(&self, lambda: &[f64], f: &mut [f64]) {
        for (k, fk) in f.iter_mut().enumerate() {
            let row = self.row(k);
            let mut acc = 0.0;
            for (p, l) in row.iter().zip(lambda) {
                acc += p * l;
            }
            *fk += acc;
        }
    }
}

/// Dense moment matrix `C`, `(d+2) x N`.
pub fn moment_matrix(dim: usize, cell_volume: f64, nodes: &[[f64; MAX_DIM]]) -> DMatrix<f64> {
    let m = num_moments(dim);
    DMatrix::from_fn(m, nodes.len(), |r, k| {
        let v = &nodes[k];
        let w = if r == 0 {
            1.0
        } else if r <= dim {
            v[r - 1]
        } else {
            half_speed_sq(v)
        };
        w * cell_volume
    })
}

/// L2-closest vector to `ftilde` whose moments are exactly `target`:
/// `f = ftilde + P (U - C ftilde)`.
///
/// If the moment residual is already at the rounding level of the moment
/// sums, `ftilde` is returned unchanged, which makes the projection
/// idempotent bit for bit.
pub fn project_conserve(
    ftilde: &[f64],
    target: &ConservedState,
    vgrid: &VelocityGrid,
    proj: &ProjectionOperator,
) -> Result<Vec<f64>> {
    if ftilde.len() != proj.num_nodes() {
        return Err(FksError::LengthMismatch {
            expected: proj.num_nodes(),
            got: ftilde.len(),
        });
    }
    let dim = vgrid.dim();
    let m = num_moments(dim);
    let current = moment_sums(ftilde, vgrid);
    let magnitude = moment_sums_abs(ftilde, vgrid);
    let goal = target.to_array(dim);
    let mut lambda = [0.0; MAX_DIM + 2];
    let mut negligible = true;
    let noise = ftilde.len() as f64 * f64::EPSILON;
    for r in 0..m {
        lambda[r] = goal[r] - current[r];
        if lambda[r].abs() > noise * magnitude[r] {
            negligible = false;
        }
    }
    let mut f = ftilde.to_vec();
    if !negligible {
        proj.apply(&lambda[..m], &mut f);
        // One refinement pass removes the rounding left by the first.
        let after = moment_sums(&f, vgrid);
        for r in 0..m {
            lambda[r] = goal[r] - after[r];
        }
        proj.apply(&lambda[..m], &mut f);
    }
    Ok(f)
}

fn moment_sums_abs(f: &[f64], vgrid: &VelocityGrid) -> [f64; MAX_DIM + 2] {
    let dim = vgrid.dim();
    let mut out = [0.0; MAX_DIM + 2];
    for (fk, v) in f.iter().zip(vgrid.nodes()) {
        let a = fk.abs();
        out[0] += a;
        for d in 0..dim {
            out[1 + d] += (v[d] * fk).abs();
        }
        out[dim + 1] += half_speed_sq(v) * a;
    }
    let vol = vgrid.cell_volume();
    out.map(|x| x * vol)
}

/// Discrete equilibrium `E[U] = M[U] + P (U - C M[U])` together with its
/// smallest entry.
#[derive(Debug, Clone)]
pub struct DiscreteEquilibrium {
    pub values: Vec<f64>,
    pub min: f64,
}

/// Equilibrium parameters for one cell: Maxwellian factors plus the
/// projection multipliers `lambda = U - C M`.
#[derive(Debug, Clone)]
pub(crate) struct CellEquilibrium {
    pub prefactor: f64,
    pub gauss: Vec<f64>,
    pub lambda: [f64; MAX_DIM + 2],
}

impl CellEquilibrium {
    pub fn new(state: &ConservedState, vgrid: &VelocityGrid, cell: usize) -> Result<Self> {
        let mut gauss = vec![0.0; vgrid.dim() * vgrid.points_per_axis()];
        let (prefactor, lambda) = Self::fill(state, vgrid, cell, &mut gauss)?;
        Ok(Self {
            prefactor,
            gauss,
            lambda,
        })
    }

    pub fn fill(
        state: &ConservedState,
        vgrid: &VelocityGrid,
        cell: usize,
        gauss: &mut [f64],
    ) -> Result<(f64, [f64; MAX_DIM + 2])> {
        let dim = vgrid.dim();
        let prefactor = MaxwellianFactors::fill(state, vgrid, cell, gauss)?;
        let cm = MaxwellianFactors::moments(prefactor, gauss, vgrid);
        let goal = state.to_array(dim);
        let mut lambda = [0.0; MAX_DIM + 2];
        for r in 0..num_moments(dim) {
            lambda[r] = goal[r] - cm[r];
        }
        Ok((prefactor, lambda))
    }

    #[inline]
    pub fn eval(
        prefactor: f64,
        gauss_at: impl Fn(usize) -> f64,
        dim: usize,
        lambda: &[f64],
        prow: &[f64],
    ) -> f64 {
        let mut e = prefactor;
        for a in 0..dim {
            e *= gauss_at(a);
        }
        for (p, l) in prow.iter().zip(lambda) {
            e += p * l;
        }
        e
    }
}

pub fn discrete_equilibrium(
    state: &ConservedState,
    vgrid: &VelocityGrid,
    proj: &ProjectionOperator,
) -> Result<DiscreteEquilibrium> {
    let dim = vgrid.dim();
    let k = vgrid.points_per_axis();
    let m = num_moments(dim);
    let cell = CellEquilibrium::new(state, vgrid, 0)?;
    let mut min = f64::INFINITY;
    let values: Vec<f64> = vgrid
        .axis_indices()
        .iter()
        .enumerate()
        .map(|(node, idx)| {
            let e = CellEquilibrium::eval(
                cell.prefactor,
                |a| cell.gauss[a * k + idx[a]],
                dim,
                &cell.lambda[..m],
                proj.row(node),
            );
            min = min.min(e);
            e
        })
        .collect();
    Ok(DiscreteEquilibrium { values, min })
}

//! Velocity and spatial grids, the CFL rule and the shift-to-offset map.

use crate::error::{FksError, Result};

/// Maximum supported dimension in physical and velocity space.
pub const MAX_DIM: usize = 3;

/// Tensor-product Cartesian velocity grid with `points_per_axis` nodes per axis,
/// both bounds included.
///
/// Nodes are enumerated with axis 0 varying fastest; the order never changes
/// once the grid is built.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityGrid {
    dim: usize,
    points_per_axis: usize,
    vmin: f64,
    vmax: f64,
    dv: f64,
    axis_values: Vec<f64>,
    nodes: Vec<[f64; MAX_DIM]>,
    axis_index: Vec<[usize; MAX_DIM]>,
}

impl VelocityGrid {
    pub fn new(dim: usize, points_per_axis: usize, vmin: f64, vmax: f64) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(FksError::InvalidVelocityGrid(format!(
                "dimension {dim} outside 1..=3"
            )));
        }
        if points_per_axis < 2 {
            return Err(FksError::InvalidVelocityGrid(format!(
                "need at least 2 points per axis, got {points_per_axis}"
            )));
        }
        if !(vmin.is_finite() && vmax.is_finite() && vmax > vmin) {
            return Err(FksError::InvalidVelocityGrid(format!(
                "bounds [{vmin}, {vmax}] are not an increasing finite interval"
            )));
        }
        let count = points_per_axis
            .checked_pow(dim as u32)
            .ok_or_else(|| FksError::InvalidVelocityGrid("node count overflows".into()))?;
        if count < dim + 2 {
            return Err(FksError::UnderdeterminedGrid {
                dim,
                nodes: count,
                needed: dim + 2,
            });
        }

        let dv = (vmax - vmin) / (points_per_axis - 1) as f64;
        let mut axis_values: Vec<f64> = (0..points_per_axis)
            .map(|i| {
                if i == points_per_axis - 1 {
                    vmax
                } else {
                    vmin + i as f64 * dv
                }
            })
            .collect();
        if vmin == -vmax {
            // exact antisymmetry, so mirrored nodes shift by opposite amounts
            let k = points_per_axis;
            for i in k / 2..k {
                axis_values[i] = if 2 * i + 1 == k {
                    0.0
                } else {
                    -axis_values[k - 1 - i]
                };
            }
        }

        let mut nodes = Vec::with_capacity(count);
        let mut axis_index = Vec::with_capacity(count);
        for flat in 0..count {
            let mut idx = [0usize; MAX_DIM];
            let mut v = [0.0; MAX_DIM];
            let mut rem = flat;
            for a in 0..dim {
                idx[a] = rem % points_per_axis;
                rem /= points_per_axis;
                v[a] = axis_values[idx[a]];
            }
            nodes.push(v);
            axis_index.push(idx);
        }

        Ok(Self {
            dim,
            points_per_axis,
            vmin,
            vmax,
            dv,
            axis_values,
            nodes,
            axis_index,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bounds symmetric about zero, so every node has a mirror image.
    pub fn is_symmetric(&self) -> bool {
        self.vmin == -self.vmax
    }

    /// Node with the `axis` component of node `k` reversed; only meaningful
    /// on a symmetric grid.
    pub fn mirror(&self, k: usize, axis: usize) -> usize {
        let i = self.axis_index[k][axis];
        let stride = self.points_per_axis.pow(axis as u32);
        k - i * stride + (self.points_per_axis - 1 - i) * stride
    }

    /// Partition of the nodes into sets closed under [`Self::mirror`] on
    /// every axis.
    pub fn mirror_groups(&self) -> Vec<Vec<usize>> {
        let last = self.points_per_axis - 1;
        (0..self.len())
            .filter(|&k| (0..self.dim).all(|a| 2 * self.axis_index[k][a] <= last))
            .map(|k| {
                let mut group: Vec<usize> = (0..1usize << self.dim)
                    .map(|mask| {
                        (0..self.dim)
                            .filter(|a| mask >> a & 1 == 1)
                            .fold(k, |n, a| self.mirror(n, a))
                    })
                    .collect();
                group.sort_unstable();
                group.dedup();
                group
            })
            .collect()
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.vmin, self.vmax)
    }

    pub fn dv(&self) -> f64 {
        self.dv
    }

    /// Velocity-space cell volume `dv^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dv.powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Node velocities; components beyond `dim` are zero.
    pub fn nodes(&self) -> &[[f64; MAX_DIM]] {
        &self.nodes
    }

    /// Per-axis index of every node into [`Self::axis_values`].
    pub fn axis_indices(&self) -> &[[usize; MAX_DIM]] {
        &self.axis_index
    }

    /// The `points_per_axis` coordinates shared by every axis.
    pub fn axis_values(&self) -> &[f64] {
        &self.axis_values
    }

    /// Largest per-axis speed `max(|vmin|, |vmax|)`.
    pub fn max_axis_speed(&self) -> f64 {
        self.vmin.abs().max(self.vmax.abs())
    }
}

/// What enters the mesh through a face during transport.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// What leaves through one face re-enters through the opposite one.
    Periodic,
    /// Zero-gradient inflow: entering cells repeat the boundary cell's value.
    Clamp,
    /// Specular wall: what leaves re-enters through the same face with the
    /// normal velocity reversed. Needs velocity bounds symmetric about zero.
    Reflect,
}

/// Lower or upper end of an axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Face {
    Low,
    High,
}

impl std::str::FromStr for Boundary {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "clamp" => Ok(Boundary::Clamp),
            "reflect" => Ok(Boundary::Reflect),
            other => Err(FksError::Config {
                key: "bc".into(),
                reason: format!("expected `periodic`, `clamp` or `reflect`, got `{other}`"),
            }),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Periodic => "periodic",
            Boundary::Clamp => "clamp",
            Boundary::Reflect => "reflect",
        })
    }
}

/// Uniform cell-centred mesh; cell `i` along an axis has centre `origin + i * dx`.
///
/// Cells are enumerated with x varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    dim: usize,
    shape: [usize; MAX_DIM],
    dx: f64,
    origin: [f64; MAX_DIM],
    boundaries: [[Boundary; 2]; MAX_DIM],
}

impl SpatialGrid {
    /// `cells` holds one entry per active axis.
    pub fn new(cells: &[usize], dx: f64, origin: &[f64], boundary: Boundary) -> Result<Self> {
        let dim = cells.len();
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(FksError::InvalidSpatialGrid(format!(
                "dimension {dim} outside 1..=3"
            )));
        }
        if origin.len() != dim {
            return Err(FksError::InvalidSpatialGrid(format!(
                "origin has {} components for a {dim}D mesh",
                origin.len()
            )));
        }
        if cells.contains(&0) {
            return Err(FksError::InvalidSpatialGrid(
                "zero cells along an axis".into(),
            ));
        }
        if !(dx.is_finite() && dx > 0.0) {
            return Err(FksError::InvalidSpatialGrid(format!(
                "dx = {dx} must be positive"
            )));
        }
        let mut shape = [1; MAX_DIM];
        let mut orig = [0.0; MAX_DIM];
        shape[..dim].copy_from_slice(cells);
        orig[..dim].copy_from_slice(origin);
        Ok(Self {
            dim,
            shape,
            dx,
            origin: orig,
            boundaries: [[boundary; 2]; MAX_DIM],
        })
    }

    /// Overrides the boundary rule on both faces of one axis.
    pub fn with_axis_boundary(mut self, axis: usize, boundary: Boundary) -> Self {
        self.boundaries[axis] = [boundary; 2];
        self
    }

    /// Overrides the boundary rule on one face; periodicity must hold on
    /// both faces of an axis or on neither.
    pub fn with_face_boundary(
        mut self,
        axis: usize,
        face: Face,
        boundary: Boundary,
    ) -> Result<Self> {
        self.boundaries[axis][face as usize] = boundary;
        let [lo, hi] = self.boundaries[axis];
        if (lo == Boundary::Periodic) != (hi == Boundary::Periodic) {
            return Err(FksError::InvalidSpatialGrid(format!(
                "axis {axis} is periodic on one face only"
            )));
        }
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cells per axis; inactive axes report 1.
    pub fn shape(&self) -> [usize; MAX_DIM] {
        self.shape
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn origin(&self) -> [f64; MAX_DIM] {
        self.origin
    }

    pub fn face_boundary(&self, axis: usize, face: Face) -> Boundary {
        self.boundaries[axis][face as usize]
    }

    pub fn is_periodic(&self, axis: usize) -> bool {
        self.boundaries[axis][0] == Boundary::Periodic
    }

    /// Some face along an active axis is a specular wall.
    pub fn has_reflecting_face(&self) -> bool {
        self.boundaries[..self.dim]
            .iter()
            .flatten()
            .any(|&b| b == Boundary::Reflect)
    }

    pub fn num_cells(&self) -> usize {
        self.shape.iter().product()
    }

    /// Physical cell volume `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx.powi(self.dim as i32)
    }

    pub fn flat_index(&self, idx: [usize; MAX_DIM]) -> usize {
        idx[0] + self.shape[0] * (idx[1] + self.shape[1] * idx[2])
    }

    pub fn multi_index(&self, flat: usize) -> [usize; MAX_DIM] {
        let i0 = flat % self.shape[0];
        let rest = flat / self.shape[0];
        [i0, rest % self.shape[1], rest / self.shape[1]]
    }

    pub fn cell_center(&self, flat: usize) -> [f64; MAX_DIM] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; MAX_DIM];
        for a in 0..self.dim {
            x[a] = idx[a] as f64 * self.dx + self.origin[a];
        }
        x
    }

    /// Storage index of a possibly out-of-range label along `axis`; labels
    /// wrap around under both boundary rules.
    #[inline]
    pub fn wrap(&self, axis: usize, raw: i64) -> usize {
        raw.rem_euclid(self.shape[axis] as i64) as usize
    }
}

/// CFL time step `safety * dx / vref`, with `vref` the largest per-axis
/// component magnitude over all velocity nodes.
pub fn cfl_time_step(vgrid: &VelocityGrid, dx: f64, safety: f64) -> Result<f64> {
    cfl_time_step_for_speed(vgrid.max_axis_speed(), dx, safety)
}

pub fn cfl_time_step_for_speed(vref: f64, dx: f64, safety: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(FksError::InvalidParameter {
            name: "safety",
            reason: format!("must be in (0, 1], got {safety}"),
        });
    }
    if !(dx > 0.0) {
        return Err(FksError::InvalidParameter {
            name: "dx",
            reason: format!("must be positive, got {dx}"),
        });
    }
    if !(vref > 0.0) {
        return Err(FksError::NoCflConstraint);
    }
    Ok(safety * dx / vref)
}

/// Integer cell offset of a profile displaced by `shift`: the cell centre
/// `x_i` reads stored value `i - m`. Half-cell ties resolve downward.
#[inline]
pub fn shift_offset(shift: f64, dx: f64) -> i64 {
    (shift / dx + 0.5).floor() as i64
}

//! Phase-space state: stored particle values plus per-node cumulative shifts.

use crate::grid::{shift_offset, Boundary, Face, SpatialGrid, VelocityGrid, MAX_DIM};

/// Shifted piecewise-constant representation of the distribution function.
///
/// `values[k * Nc + l]` is the value carried by the particle of velocity
/// node `k` that started in cell `l`. After transport by a cumulative
/// displacement `s_k` that particle covers the cell `l + offset(s_k)`, so
/// cell `j` reads label `(j - offset(s_k)) mod Nc` along every axis.
#[derive(Debug, Clone)]
pub struct DistributionField {
    vgrid: VelocityGrid,
    sgrid: SpatialGrid,
    values: Vec<f64>,
    shift: Vec<[f64; MAX_DIM]>,
    offsets: Vec<[i64; MAX_DIM]>,
    elapsed: f64,
}

impl DistributionField {
    /// Field with zero shifts; `values` is node-major (`N x Nc`).
    pub fn from_values(vgrid: VelocityGrid, sgrid: SpatialGrid, values: Vec<f64>) -> Self {
        assert_eq!(
            values.len(),
            vgrid.len() * sgrid.num_cells(),
            "value array does not match grids"
        );
        assert_eq!(
            vgrid.dim(),
            sgrid.dim(),
            "velocity and space dimensions differ"
        );
        assert!(
            vgrid.is_symmetric() || !sgrid.has_reflecting_face(),
            "reflecting faces need velocity bounds symmetric about zero"
        );
        let n = vgrid.len();
        Self {
            vgrid,
            sgrid,
            values,
            shift: vec![[0.0; MAX_DIM]; n],
            offsets: vec![[0; MAX_DIM]; n],
            elapsed: 0.0,
        }
    }

    pub fn velocity_grid(&self) -> &VelocityGrid {
        &self.vgrid
    }

    pub fn spatial_grid(&self) -> &SpatialGrid {
        &self.sgrid
    }

    pub fn num_cells(&self) -> usize {
        self.sgrid.num_cells()
    }

    pub fn num_nodes(&self) -> usize {
        self.vgrid.len()
    }

    /// Stored particle values, node-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Stored values of node `k` indexed by particle label.
    pub fn node_values(&self, k: usize) -> &[f64] {
        let nc = self.num_cells();
        &self.values[k * nc..(k + 1) * nc]
    }

    pub fn shifts(&self) -> &[[f64; MAX_DIM]] {
        &self.shift
    }

    /// Integer cell offsets derived from the current shifts.
    pub fn offsets(&self) -> &[[i64; MAX_DIM]] {
        &self.offsets
    }

    /// Total time transported so far.
    pub fn elapsed(&self) -> f64 {
        self.elapsed
    }

    /// Exact free transport over `dt`, one axis at a time. When a node's
    /// integer offset changes along a non-periodic axis, the cells entering
    /// the mesh are filled according to the inflow face: clamp repeats the
    /// value the boundary cell held before the step, reflect takes the mirror
    /// node's particles that just left through that face. Entering cells
    /// reuse the storage slots of particles that left through the far side.
    pub fn transport(&mut self, dt: f64) {
        debug_assert!(dt >= 0.0);
        if self.sgrid.has_reflecting_face() {
            for group in self.vgrid.mirror_groups() {
                self.transport_nodes(&group, dt);
            }
        } else {
            for k in 0..self.num_nodes() {
                self.transport_nodes(&[k], dt);
            }
        }
        self.elapsed += dt;
    }

    /// Transports a set of nodes closed under mirroring, axis by axis; walls
    /// only exchange particles within such a set.
    fn transport_nodes(&mut self, nodes: &[usize], dt: f64) {
        let dx = self.sgrid.dx();
        for a in 0..self.vgrid.dim() {
            let old: Vec<i64> = nodes.iter().map(|&k| self.offsets[k][a]).collect();
            for &k in nodes {
                self.shift[k][a] += self.vgrid.nodes()[k][a] * dt;
                self.offsets[k][a] = shift_offset(self.shift[k][a], dx);
            }
            if self.sgrid.is_periodic(a) {
                continue;
            }
            // Wall inflow copies the mirror's leaving particles, so it runs
            // before clamp fills reuse those slots. With walls on both faces
            // the copies can feed each other and are staged first.
            let staged = self.sgrid.face_boundary(a, Face::Low) == Boundary::Reflect
                && self.sgrid.face_boundary(a, Face::High) == Boundary::Reflect;
            let mut pending = Vec::new();
            let mut clamped = Vec::new();
            for (i, &k) in nodes.iter().enumerate() {
                let dm = self.offsets[k][a] - old[i];
                if dm == 0 {
                    continue;
                }
                let face = if dm > 0 { Face::Low } else { Face::High };
                if self.sgrid.face_boundary(a, face) != Boundary::Reflect {
                    clamped.push((k, old[i]));
                    continue;
                }
                let mirror = self.vgrid.mirror(k, a);
                let j = nodes
                    .iter()
                    .position(|&n| n == mirror)
                    .expect("mirror outside group");
                let (rows, stride) = self.rows(k, a);
                let wall = Wall::new(&self.sgrid, a, dm, self.offsets[k][a], old[j], stride);
                if staged {
                    let inflow = wall.read(&rows, self.node_values(mirror));
                    pending.push((k, rows, wall, inflow));
                } else {
                    let nc = self.num_cells();
                    for row in rows {
                        for (d, s) in wall.dst.iter().zip(&wall.src) {
                            self.values[k * nc + row + d] = self.values[mirror * nc + row + s];
                        }
                    }
                }
            }
            for (k, m_old) in clamped {
                self.fill_clamped(k, a, m_old);
            }
            let nc = self.num_cells();
            for (k, rows, wall, inflow) in pending {
                let node = &mut self.values[k * nc..(k + 1) * nc];
                let mut it = inflow.into_iter();
                for row in rows {
                    for d in &wall.dst {
                        node[row + d] = it.next().unwrap();
                    }
                }
            }
        }
    }

    /// Storage offsets of the transverse rows of node `k` along `axis`, and
    /// the stride of `axis`.
    fn rows(&self, k: usize, axis: usize) -> (Vec<usize>, usize) {
        let shape = self.sgrid.shape();
        let stride = [1, shape[0], shape[0] * shape[1]];
        let (b, c) = match axis {
            0 => (1, 2),
            1 => (0, 2),
            _ => (0, 1),
        };
        let m = self.offsets[k];
        let lb: Vec<usize> = self
            .wrapped_labels(b, m[b])
            .map(|l| l * stride[b])
            .collect();
        let mut rows = Vec::with_capacity(shape[b] * shape[c]);
        for lq in self.wrapped_labels(c, m[c]) {
            rows.extend(lb.iter().map(|l| l + lq * stride[c]));
        }
        (rows, stride[axis])
    }

    /// Labels `(i - m) mod n` for `i = 0..n` along `axis`, without a
    /// division per cell.
    fn wrapped_labels(&self, axis: usize, m: i64) -> impl Iterator<Item = usize> {
        let n = self.sgrid.shape()[axis];
        let mut l = self.sgrid.wrap(axis, -m);
        (0..n).map(move |_| {
            let out = l;
            l += 1;
            if l == n {
                l = 0;
            }
            out
        })
    }

    /// Cells entering along `axis` after a move by `dm`, paired with the
    /// pre-step cell whose particle a specular wall sends into them.
    fn entering(n: usize, dm: i64) -> impl Iterator<Item = (i64, i64)> {
        let n = n as i64;
        let count = dm.abs().min(n);
        (0..count).map(move |s| {
            if dm > 0 {
                (s, (dm - 1 - s).min(n - 1))
            } else {
                (n - 1 - s, (n + dm + s).max(0))
            }
        })
    }

    /// Zero-gradient fill: entering cells of node `k` take the value of the
    /// boundary cell before the move from `m_old`.
    fn fill_clamped(&mut self, k: usize, axis: usize, m_old: i64) {
        let n = self.sgrid.shape()[axis];
        let m_new = self.offsets[k][axis];
        let dm = m_new - m_old;
        let (rows, stride) = self.rows(k, axis);
        let boundary = if dm > 0 { 0 } else { n as i64 - 1 };
        let src = self.sgrid.wrap(axis, boundary - m_old) * stride;
        let dst: Vec<usize> = Self::entering(n, dm)
            .map(|(i, _)| self.sgrid.wrap(axis, i - m_new) * stride)
            .collect();
        let nc = self.num_cells();
        let node = &mut self.values[k * nc..(k + 1) * nc];
        for row in rows {
            let value = node[row + src];
            for d in &dst {
                node[row + d] = value;
            }
        }
    }

    /// Storage label read by `cell` for node `k`.
    #[inline]
    pub fn source_label(&self, k: usize, cell: usize) -> usize {
        let idx = self.sgrid.multi_index(cell);
        let m = &self.offsets[k];
        let src: [usize; MAX_DIM] =
            std::array::from_fn(|a| self.sgrid.wrap(a, idx[a] as i64 - m[a]));
        self.sgrid.flat_index(src)
    }

    /// Values of the shifted profile at the centre of `cell`, one per node.
    pub fn gather(&self, cell: usize) -> Vec<f64> {
        let nc = self.num_cells();
        (0..self.num_nodes())
            .map(|k| self.values[k * nc + self.source_label(k, cell)])
            .collect()
    }

    /// Per-node label maps along each axis, used by the block kernels.
    pub(crate) fn label_maps(&self) -> LabelMaps {
        let shape = self.sgrid.shape();
        let n = self.num_nodes();
        let mut axes: [Vec<u32>; MAX_DIM] = Default::default();
        for a in 0..MAX_DIM {
            let len = shape[a];
            let mut map = Vec::with_capacity(n * len);
            for m in &self.offsets {
                for i in 0..len {
                    map.push(self.sgrid.wrap(a, i as i64 - m[a]) as u32);
                }
            }
            axes[a] = map;
        }
        LabelMaps { shape, axes }
    }
}

/// Slot pairs along one axis for particles crossing a specular wall: the
/// entering cells of a node and the mirror node's cells that just left.
struct Wall {
    dst: Vec<usize>,
    src: Vec<usize>,
}

impl Wall {
    fn new(
        sgrid: &SpatialGrid,
        axis: usize,
        dm: i64,
        m_new: i64,
        mirror_old: i64,
        stride: usize,
    ) -> Self {
        let n = sgrid.shape()[axis];
        let (dst, src) = DistributionField::entering(n, dm)
            .map(|(i, j)| {
                (
                    sgrid.wrap(axis, i - m_new) * stride,
                    sgrid.wrap(axis, j - mirror_old) * stride,
                )
            })
            .unzip();
        Self { dst, src }
    }

    /// Mirror values for every row, row-major.
    fn read(&self, rows: &[usize], mirror: &[f64]) -> Vec<f64> {
        rows.iter()
            .flat_map(|row| self.src.iter().map(move |s| mirror[row + s]))
            .collect()
    }
}

pub(crate) struct LabelMaps {
    shape: [usize; MAX_DIM],
    axes: [Vec<u32>; MAX_DIM],
}

impl LabelMaps {
    /// Source index for node `k`, destination index `i` on `axis`.
    #[inline]
    pub fn axis(&self, axis: usize, k: usize) -> &[u32] {
        let len = self.shape[axis];
        &self.axes[axis][k * len..(k + 1) * len]
    }
}

//! First-order upwind discrete-velocity solver used as a comparison baseline.

use crate::equilibrium::ProjectionOperator;
use crate::error::{FksError, Result};
use crate::field::DistributionField;
use crate::grid::{Boundary, Face};
use crate::solver::{relax_field, RelaxStats};

/// One upwind transport step followed by the same exact relaxation as FKS.
///
/// The field must never have been shift-transported: its stored values are
/// the cell values of the finite-volume scheme. Only 1D meshes are supported.
pub fn upwind_dvm_step(
    field: &mut DistributionField,
    dt: f64,
    tau: f64,
    proj: &ProjectionOperator,
) -> Result<RelaxStats> {
    let sgrid = field.spatial_grid().clone();
    if sgrid.dim() != 1 {
        return Err(FksError::InvalidParameter {
            name: "dimension",
            reason: "upwind baseline is 1D only".into(),
        });
    }
    if field.shifts().iter().any(|s| s[0] != 0.0) {
        return Err(FksError::InvalidParameter {
            name: "field",
            reason: "upwind transport needs an unshifted field".into(),
        });
    }
    let nc = sgrid.num_cells();
    let courant = dt / sgrid.dx();
    let vmax = field.velocity_grid().max_axis_speed();
    if vmax * courant > 1.0 + 1e-12 {
        return Err(FksError::CflViolation {
            courant: vmax * courant,
        });
    }
    let vgrid = field.velocity_grid().clone();
    let lo = sgrid.face_boundary(0, Face::Low);
    let hi = sgrid.face_boundary(0, Face::High);
    // Ghost value beyond a face for node `k`: the wrapped, repeated or
    // mirrored neighbour according to the face rule.
    let ghost = |old: &[f64], k: usize, face: Boundary, edge: usize, wrapped: usize| match face {
        Boundary::Periodic => old[k * nc + wrapped],
        Boundary::Clamp => old[k * nc + edge],
        Boundary::Reflect => old[vgrid.mirror(k, 0) * nc + edge],
    };
    let old = field.values().to_vec();
    let values = field.values_mut();
    for (k, node) in vgrid.nodes().iter().enumerate() {
        let v = node[0];
        if v == 0.0 {
            continue;
        }
        let f = &mut values[k * nc..(k + 1) * nc];
        let o = &old[k * nc..(k + 1) * nc];
        let c = v * courant;
        for j in 0..nc {
            f[j] = if v > 0.0 {
                let left = if j > 0 {
                    o[j - 1]
                } else {
                    ghost(&old, k, lo, 0, nc - 1)
                };
                o[j] - c * (o[j] - left)
            } else {
                let right = if j + 1 < nc {
                    o[j + 1]
                } else {
                    ghost(&old, k, hi, nc - 1, 0)
                };
                o[j] - c * (right - o[j])
            };
        }
    }
    relax_field(field, dt, tau, proj)
}

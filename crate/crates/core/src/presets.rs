//! Named test problems with their default grids and parameters.

use std::fmt;
use std::str::FromStr;

use crate::equilibrium::ConservedState;
use crate::error::{FksError, Result};
use crate::grid::{Boundary, Face, SpatialGrid, MAX_DIM};
use crate::oracles::EulerState;
use crate::solver::{maxwellian_at, InitialCondition, LocalMaxwellian};

/// Sod left state `(rho, theta)`; the gas is at rest.
pub const SOD_LEFT: (f64, f64) = (1.0, 5.0);
/// Sod right state `(rho, theta)`.
pub const SOD_RIGHT: (f64, f64) = (0.125, 4.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetName {
    Sod1d,
    Sod2d,
    Sod3d,
    Sod1dIn3d,
    HomogeneousRelax,
    SmoothPeriodic,
}

impl PresetName {
    pub const ALL: [PresetName; 6] = [
        PresetName::Sod1d,
        PresetName::Sod2d,
        PresetName::Sod3d,
        PresetName::Sod1dIn3d,
        PresetName::HomogeneousRelax,
        PresetName::SmoothPeriodic,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PresetName::Sod1d => "sod1d",
            PresetName::Sod2d => "sod2d",
            PresetName::Sod3d => "sod3d",
            PresetName::Sod1dIn3d => "sod1d-in-3d",
            PresetName::HomogeneousRelax => "homogeneous-relax",
            PresetName::SmoothPeriodic => "smooth-periodic",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = FksError;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| FksError::Config {
                key: "preset".into(),
                reason: format!("unknown preset `{s}`"),
            })
    }
}

/// Bimodal datum of the homogeneous relaxation problem: two Maxwellians of
/// equal weight centred at `+-BIMODAL_SHIFT`.
pub const BIMODAL_SHIFT: f64 = 2.0;
pub const BIMODAL_THETA: f64 = 0.5;
/// Time step the homogeneous preset is sized for (with the default CFL factor).
pub const HOMOGENEOUS_DT: f64 = 0.002;

/// Amplitude of the density wave of the smooth periodic problem.
pub const SMOOTH_AMPLITUDE: f64 = 0.2;

/// Default parameters of a preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: PresetName,
    pub dim: usize,
    pub nx: usize,
    pub nv: usize,
    pub vmin: f64,
    pub vmax: f64,
    pub tau: f64,
    pub tfinal: f64,
    pub safety: f64,
    pub boundary: Boundary,
}

impl Preset {
    pub fn new(name: PresetName) -> Self {
        let (dim, nx, nv, vmin, vmax, tau, tfinal, boundary) = match name {
            PresetName::Sod1d => (1, 300, 100, -15.0, 15.0, 1e-4, 0.05, Boundary::Clamp),
            PresetName::Sod2d => (2, 100, 20, -15.0, 15.0, 0.0, 0.07, Boundary::Clamp),
            PresetName::Sod3d => (3, 25, 12, -10.0, 10.0, 0.0, 0.1, Boundary::Clamp),
            PresetName::Sod1dIn3d => (3, 100, 13, -15.0, 15.0, 0.0, 0.1, Boundary::Clamp),
            PresetName::HomogeneousRelax => (1, 1, 48, -8.0, 8.0, 0.1, 0.2, Boundary::Periodic),
            PresetName::SmoothPeriodic => (1, 100, 32, -8.0, 8.0, 0.5, 0.1, Boundary::Periodic),
        };
        Self {
            name,
            dim,
            nx,
            nv,
            vmin,
            vmax,
            tau,
            tfinal,
            safety: 0.95,
            boundary,
        }
    }

    /// Mesh for `nx` cells along x.
    ///
    /// * `sod1d`, `smooth-periodic`: `[0, 1]`.
    /// * `sod2d`: `nx x nx` cells on `[0, 2]^2`.
    /// * `sod3d`: `nx^3` cells on the unit cube, one octant of the sphere; the
    ///   faces through the origin are mirror planes, `boundary` applies to
    ///   the outer faces.
    /// * `sod1d-in-3d`: `nx x 2 x 2` cubes of side `1 / nx`, periodic along the
    ///   ignorable y and z axes whatever `boundary` is.
    /// * `homogeneous-relax`: one cell sized so the CFL step is [`HOMOGENEOUS_DT`].
    pub fn spatial_grid(&self, nx: usize, boundary: Boundary) -> Result<SpatialGrid> {
        let (cells, length): (Vec<usize>, f64) = match self.name {
            PresetName::Sod1d | PresetName::SmoothPeriodic => (vec![nx], 1.0),
            PresetName::Sod2d => (vec![nx, nx], 2.0),
            PresetName::Sod3d => (vec![nx, nx, nx], 1.0),
            PresetName::Sod1dIn3d => (vec![nx, 2, 2], 1.0),
            PresetName::HomogeneousRelax => {
                let dx = HOMOGENEOUS_DT * self.vmax.abs().max(self.vmin.abs()) / self.safety;
                return SpatialGrid::new(&[1], dx, &[0.5 * dx], boundary);
            }
        };
        let dx = length / nx as f64;
        let origin = vec![0.5 * dx; cells.len()];
        let grid = SpatialGrid::new(&cells, dx, &origin, boundary)?;
        Ok(match self.name {
            PresetName::Sod1dIn3d => grid
                .with_axis_boundary(1, Boundary::Periodic)
                .with_axis_boundary(2, Boundary::Periodic),
            PresetName::Sod3d => (0..3).try_fold(grid, |g, a| {
                g.with_face_boundary(a, Face::Low, Boundary::Reflect)
            })?,
            _ => grid,
        })
    }

    pub fn initial_condition(&self) -> Box<dyn InitialCondition> {
        let dim = self.dim;
        let sod = |left: bool| {
            let (rho, theta) = if left { SOD_LEFT } else { SOD_RIGHT };
            (rho, [0.0; MAX_DIM], theta)
        };
        match self.name {
            PresetName::Sod1d | PresetName::Sod1dIn3d => {
                Box::new(LocalMaxwellian::new(dim, move |x: &[f64; 3]| {
                    sod(x[0] <= 0.5)
                }))
            }
            PresetName::Sod2d => Box::new(LocalMaxwellian::new(dim, move |x: &[f64; 3]| {
                sod((x[0] - 1.0).powi(2) + (x[1] - 1.0).powi(2) <= 0.2 * 0.2)
            })),
            PresetName::Sod3d => Box::new(LocalMaxwellian::new(dim, move |x: &[f64; 3]| {
                sod(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] <= 0.25)
            })),
            PresetName::SmoothPeriodic => Box::new(LocalMaxwellian::new(dim, |x: &[f64; 3]| {
                let rho = 1.0 + SMOOTH_AMPLITUDE * (2.0 * std::f64::consts::PI * x[0]).sin();
                (rho, [0.0; MAX_DIM], 1.0)
            })),
            PresetName::HomogeneousRelax => Box::new(Bimodal),
        }
    }

    /// Left/right states and interface position for the planar Sod presets.
    pub fn riemann_reference(&self) -> Option<(EulerState, EulerState, f64)> {
        match self.name {
            PresetName::Sod1d | PresetName::Sod1dIn3d => Some((
                EulerState::from_temperature(self.dim, SOD_LEFT.0, [0.0; 3], SOD_LEFT.1),
                EulerState::from_temperature(self.dim, SOD_RIGHT.0, [0.0; 3], SOD_RIGHT.1),
                0.5,
            )),
            _ => None,
        }
    }
}

/// Equal mixture of two 1D Maxwellians at `+-BIMODAL_SHIFT`.
struct Bimodal;

impl InitialCondition for Bimodal {
    fn moments(&self, _x: &[f64; MAX_DIM]) -> ConservedState {
        ConservedState {
            rho: 1.0,
            mom: [0.0; MAX_DIM],
            energy: 0.5 * (BIMODAL_SHIFT * BIMODAL_SHIFT + BIMODAL_THETA),
        }
    }

    fn density(&self, _x: &[f64; MAX_DIM], v: &[f64; MAX_DIM]) -> f64 {
        let lobe = |c: f64| maxwellian_at(1, 0.5, &[c, 0.0, 0.0], BIMODAL_THETA, v);
        lobe(BIMODAL_SHIFT) + lobe(-BIMODAL_SHIFT)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in PresetName::ALL {
            assert_eq!(p.as_str().parse::<PresetName>().unwrap(), p);
        }
        assert!("sod4d".parse::<PresetName>().is_err());
    }

    #[test]
    fn sod1d_defaults() {
        let p = Preset::new(PresetName::Sod1d);
        assert_eq!(
            (p.nx, p.nv, p.vmin, p.vmax, p.tfinal),
            (300, 100, -15.0, 15.0, 0.05)
        );
        let g = p.spatial_grid(300, Boundary::Clamp).unwrap();
        assert_eq!(g.num_cells(), 300);
        assert!((g.dx() - 1.0 / 300.0).abs() < 1e-18);
    }

    #[test]
    fn sod3d_left_state_inside_half_radius() {
        let p = Preset::new(PresetName::Sod3d);
        let ic = p.initial_condition();
        let inside = ic.moments(&[0.28, 0.28, 0.28]);
        let outside = ic.moments(&[0.3, 0.3, 0.3]);
        assert_eq!(inside.rho, 1.0);
        assert_eq!(outside.rho, 0.125);
        assert_eq!(inside.theta(3), 5.0);
    }

    #[test]
    fn sod3d_octant_has_mirror_planes() {
        let g = Preset::new(PresetName::Sod3d)
            .spatial_grid(10, Boundary::Clamp)
            .unwrap();
        for a in 0..3 {
            assert_eq!(g.face_boundary(a, Face::Low), Boundary::Reflect);
            assert_eq!(g.face_boundary(a, Face::High), Boundary::Clamp);
        }
        assert!(Preset::new(PresetName::Sod3d)
            .spatial_grid(10, Boundary::Periodic)
            .is_err());
    }

    #[test]
    fn sod1d_in_3d_mesh() {
        let p = Preset::new(PresetName::Sod1dIn3d);
        let g = p.spatial_grid(50, Boundary::Clamp).unwrap();
        assert_eq!(g.shape(), [50, 2, 2]);
        assert_eq!(g.dx(), 1.0 / 50.0);
        assert_eq!(g.face_boundary(0, Face::Low), Boundary::Clamp);
        assert!(g.is_periodic(1) && g.is_periodic(2));
    }

    #[test]
    fn bimodal_moments() {
        let ic = Bimodal;
        let u = ic.moments(&[0.0; 3]);
        assert_eq!(u.rho, 1.0);
        assert!((u.theta(1) - (BIMODAL_SHIFT.powi(2) + BIMODAL_THETA)).abs() < 1e-15);
    }
}

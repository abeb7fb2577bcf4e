//! Independent reference solutions: the exact Riemann solver for the fluid
//! limit and a first-order upwind discrete-velocity scheme.

mod riemann;
mod upwind;

pub use riemann::{
    exact_riemann_euler, gamma_for_dim, pressure_function, EulerState, RiemannSolution, Wave,
};
pub use upwind::upwind_dvm_step;

use crate::error::Result;

/// Primitive macroscopic sample `(rho, u_normal, theta)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroSample {
    pub rho: f64,
    pub u: f64,
    pub theta: f64,
}

/// Exact Riemann profile at time `t` for an interface at `x0`, sampled at
/// each position in `xs`. At `t = 0` the initial discontinuity is returned
/// (points at `x0` take the left state).
pub fn sod_macro_profile(
    left: &EulerState,
    right: &EulerState,
    x0: f64,
    t: f64,
    xs: &[f64],
) -> Result<Vec<MacroSample>> {
    let sample = |s: EulerState| MacroSample {
        rho: s.rho,
        u: s.velocity[0],
        theta: s.theta(),
    };
    if t == 0.0 {
        return Ok(xs
            .iter()
            .map(|&x| sample(if x <= x0 { *left } else { *right }))
            .collect());
    }
    let sol = RiemannSolution::new(*left, *right)?;
    Ok(xs
        .iter()
        .map(|&x| sample(sol.sample((x - x0) / t)))
        .collect())
}

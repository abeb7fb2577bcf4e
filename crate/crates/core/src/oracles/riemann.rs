//! Exact Riemann solver for the ideal-gas Euler equations (the fluid limit
//! of BGK with `gamma = (d + 2) / d`).

use crate::error::{FksError, Result};
use crate::grid::MAX_DIM;

/// Primitive Euler state. `velocity[0]` is the normal component; the others
/// are carried across the contact unchanged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerState {
    pub rho: f64,
    pub velocity: [f64; MAX_DIM],
    pub pressure: f64,
    pub gamma: f64,
}

/// Ratio of specific heats of a monatomic gas in `dim` dimensions.
pub fn gamma_for_dim(dim: usize) -> f64 {
    (dim as f64 + 2.0) / dim as f64
}

impl EulerState {
    /// State with scaled temperature `theta`, i.e. `p = rho theta`.
    pub fn from_temperature(dim: usize, rho: f64, velocity: [f64; MAX_DIM], theta: f64) -> Self {
        Self {
            rho,
            velocity,
            pressure: rho * theta,
            gamma: gamma_for_dim(dim),
        }
    }

    pub fn sound_speed(&self) -> f64 {
        (self.gamma * self.pressure / self.rho).sqrt()
    }

    pub fn theta(&self) -> f64 {
        self.pressure / self.rho
    }

    /// Normal fluxes of mass, normal momentum and total energy.
    pub fn normal_flux(&self) -> [f64; 3] {
        let u = self.velocity[0];
        let ke: f64 = 0.5 * self.rho * self.velocity.iter().map(|v| v * v).sum::<f64>();
        let energy = self.pressure / (self.gamma - 1.0) + ke;
        [
            self.rho * u,
            self.rho * u * u + self.pressure,
            u * (energy + self.pressure),
        ]
    }

    pub fn conserved(&self) -> [f64; 3] {
        let u = self.velocity[0];
        let ke: f64 = 0.5 * self.rho * self.velocity.iter().map(|v| v * v).sum::<f64>();
        [
            self.rho,
            self.rho * u,
            self.pressure / (self.gamma - 1.0) + ke,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Wave {
    Shock { speed: f64 },
    Rarefaction { head: f64, tail: f64 },
}

/// Star-region solution of one Riemann problem, sampled with [`Self::sample`].
#[derive(Debug, Clone, Copy)]
pub struct RiemannSolution {
    pub left: EulerState,
    pub right: EulerState,
    pub p_star: f64,
    pub u_star: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    pub iterations: usize,
}

const TOLERANCE: f64 = 1e-12;
const MAX_ITER: usize = 100;

fn side_function(p: f64, s: &EulerState) -> (f64, f64) {
    let g = s.gamma;
    if p > s.pressure {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.pressure;
        let q = (a / (p + b)).sqrt();
        (
            (p - s.pressure) * q,
            q * (1.0 - 0.5 * (p - s.pressure) / (p + b)),
        )
    } else {
        let c = s.sound_speed();
        let r = p / s.pressure;
        let e = (g - 1.0) / (2.0 * g);
        (
            2.0 * c / (g - 1.0) * (r.powf(e) - 1.0),
            r.powf(-(g + 1.0) / (2.0 * g)) / (s.rho * c),
        )
    }
}

/// The pressure function whose root is the star pressure.
pub fn pressure_function(p: f64, left: &EulerState, right: &EulerState) -> f64 {
    side_function(p, left).0 + side_function(p, right).0 + right.velocity[0] - left.velocity[0]
}

impl RiemannSolution {
    pub fn new(left: EulerState, right: EulerState) -> Result<Self> {
        if !(left.rho > 0.0 && right.rho > 0.0 && left.pressure > 0.0 && right.pressure > 0.0) {
            return Err(FksError::InvalidParameter {
                name: "riemann state",
                reason: "densities and pressures must be positive".into(),
            });
        }
        let g = left.gamma;
        let (cl, cr) = (left.sound_speed(), right.sound_speed());
        let du = right.velocity[0] - left.velocity[0];
        if 2.0 / (g - 1.0) * (cl + cr) <= du {
            return Err(FksError::RiemannVacuum);
        }

        // Primitive-variable guess, then Newton on the pressure function.
        let pv = 0.5 * (left.pressure + right.pressure)
            - 0.125 * du * (left.rho + right.rho) * (cl + cr);
        let mut p = pv.max(1e-8 * left.pressure.min(right.pressure));
        let scale = left.pressure.max(right.pressure);
        let mut iterations = 0;
        loop {
            let (fl, dl) = side_function(p, &left);
            let (fr, dr) = side_function(p, &right);
            let residual = fl + fr + du;
            if residual.abs() <= TOLERANCE * (cl + cr) || iterations >= MAX_ITER {
                break;
            }
            let mut next = p - residual / (dl + dr);
            if next <= 0.0 {
                next = 0.5 * p;
            }
            iterations += 1;
            let change = (next - p).abs() / scale;
            p = next;
            if change < 1e-16 {
                break;
            }
        }
        let u_star = 0.5 * (left.velocity[0] + right.velocity[0])
            + 0.5 * (side_function(p, &right).0 - side_function(p, &left).0);

        let left_wave = if p > left.pressure {
            let r = p / left.pressure;
            Wave::Shock {
                speed: left.velocity[0]
                    - cl * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt(),
            }
        } else {
            let c_star = cl * (p / left.pressure).powf((g - 1.0) / (2.0 * g));
            Wave::Rarefaction {
                head: left.velocity[0] - cl,
                tail: u_star - c_star,
            }
        };
        let right_wave = if p > right.pressure {
            let r = p / right.pressure;
            Wave::Shock {
                speed: right.velocity[0]
                    + cr * ((g + 1.0) / (2.0 * g) * r + (g - 1.0) / (2.0 * g)).sqrt(),
            }
        } else {
            let c_star = cr * (p / right.pressure).powf((g - 1.0) / (2.0 * g));
            Wave::Rarefaction {
                head: right.velocity[0] + cr,
                tail: u_star + c_star,
            }
        };
        Ok(Self {
            left,
            right,
            p_star: p,
            u_star,
            left_wave,
            right_wave,
            iterations,
        })
    }

    /// Primitive state at similarity coordinate `xi = x / t`.
    pub fn sample(&self, xi: f64) -> EulerState {
        let g = self.left.gamma;
        if xi <= self.u_star {
            let s = &self.left;
            let c = s.sound_speed();
            match self.left_wave {
                Wave::Shock { speed } => {
                    if xi <= speed {
                        *s
                    } else {
                        let r = self.p_star / s.pressure;
                        let gm = (g - 1.0) / (g + 1.0);
                        self.star(s, s.rho * (r + gm) / (gm * r + 1.0))
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi <= head {
                        *s
                    } else if xi >= tail {
                        self.star(s, s.rho * (self.p_star / s.pressure).powf(1.0 / g))
                    } else {
                        let u = 2.0 / (g + 1.0) * (c + (g - 1.0) / 2.0 * s.velocity[0] + xi);
                        let base =
                            2.0 / (g + 1.0) + (g - 1.0) / ((g + 1.0) * c) * (s.velocity[0] - xi);
                        let rho = s.rho * base.powf(2.0 / (g - 1.0));
                        let p = s.pressure * base.powf(2.0 * g / (g - 1.0));
                        let mut v = s.velocity;
                        v[0] = u;
                        EulerState {
                            rho,
                            velocity: v,
                            pressure: p,
                            gamma: g,
                        }
                    }
                }
            }
        } else {
            let s = &self.right;
            let c = s.sound_speed();
            match self.right_wave {
                Wave::Shock { speed } => {
                    if xi >= speed {
                        *s
                    } else {
                        let r = self.p_star / s.pressure;
                        let gm = (g - 1.0) / (g + 1.0);
                        self.star(s, s.rho * (r + gm) / (gm * r + 1.0))
                    }
                }
                Wave::Rarefaction { head, tail } => {
                    if xi >= head {
                        *s
                    } else if xi <= tail {
                        self.star(s, s.rho * (self.p_star / s.pressure).powf(1.0 / g))
                    } else {
                        let u = 2.0 / (g + 1.0) * (-c + (g - 1.0) / 2.0 * s.velocity[0] + xi);
                        let base =
                            2.0 / (g + 1.0) - (g - 1.0) / ((g + 1.0) * c) * (s.velocity[0] - xi);
                        let rho = s.rho * base.powf(2.0 / (g - 1.0));
                        let p = s.pressure * base.powf(2.0 * g / (g - 1.0));
                        let mut v = s.velocity;
                        v[0] = u;
                        EulerState {
                            rho,
                            velocity: v,
                            pressure: p,
                            gamma: g,
                        }
                    }
                }
            }
        }
    }

    fn star(&self, side: &EulerState, rho: f64) -> EulerState {
        let mut v = side.velocity;
        v[0] = self.u_star;
        EulerState {
            rho,
            velocity: v,
            pressure: self.p_star,
            gamma: side.gamma,
        }
    }
}

/// Exact solution of the Riemann problem `left | right` at `xi = x / t`.
pub fn exact_riemann_euler(left: &EulerState, right: &EulerState, xi: f64) -> Result<EulerState> {
    Ok(RiemannSolution::new(*left, *right)?.sample(xi))
}

//! Exact solutions and right-hand sides of the benchmark problems.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::mesh::{DomainKind, DomainSpec, Point};

/// `u`, `∇u` and `f = −Δu` for one benchmark domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactSolution {
    domain: DomainSpec,
}

/// Exact solution of the benchmark posed on `domain`.
pub fn exact_solution(domain: &DomainSpec) -> ExactSolution {
    ExactSolution { domain: *domain }
}

/// Angle measured from the positive `x₂` half-axis, in `[0, 3π/2]` on the L-shape,
/// so that both reentrant edges are zeros of `sin(2φ/3)`.
fn lshape_angle(x: Point) -> (f64, f64) {
    let mut theta = x[1].atan2(x[0]);
    if theta < FRAC_PI_2 {
        theta += 2.0 * PI;
    }
    (theta, theta - FRAC_PI_2)
}

impl ExactSolution {
    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn u(&self, x: Point) -> f64 {
        let l = self.domain.ell;
        match self.domain.kind {
            DomainKind::Square => (PI * x[0] / l).sin() * (PI * x[1] / l).sin(),
            DomainKind::Rectangle => (PI * x[0] / l).sin(),
            DomainKind::LShape => {
                let (g, _) = self.singular_part(x);
                let (p, _, _) = self.bubble(x);
                g * p
            }
        }
    }

    pub fn grad(&self, x: Point) -> [f64; 2] {
        let l = self.domain.ell;
        match self.domain.kind {
            DomainKind::Square => {
                let (a, b) = (PI * x[0] / l, PI * x[1] / l);
                [PI / l * a.cos() * b.sin(), PI / l * a.sin() * b.cos()]
            }
            DomainKind::Rectangle => [PI / l * (PI * x[0] / l).cos(), 0.0],
            DomainKind::LShape => {
                let (g, dg) = self.singular_part(x);
                let (p, dp, _) = self.bubble(x);
                [p * dg[0] + g * dp[0], p * dg[1] + g * dp[1]]
            }
        }
    }

    /// `f = −Δu`.
    pub fn f(&self, x: Point) -> f64 {
        let l = self.domain.ell;
        match self.domain.kind {
            DomainKind::Square => 2.0 * PI * PI / (l * l) * self.u(x),
            DomainKind::Rectangle => PI * PI / (l * l) * self.u(x),
            DomainKind::LShape => {
                // The singular factor is harmonic: Δ(gp) = gΔp + 2∇g·∇p.
                let (g, dg) = self.singular_part(x);
                let (_, dp, lap_p) = self.bubble(x);
                -(g * lap_p + 2.0 * (dg[0] * dp[0] + dg[1] * dp[1]))
            }
        }
    }

    /// `g = ρ^{2/3} sin(2φ/3)` with `ρ = r/ℓ` and its gradient.
    fn singular_part(&self, x: Point) -> (f64, [f64; 2]) {
        let l = self.domain.ell;
        let r = x[0].hypot(x[1]);
        if r == 0.0 {
            return (0.0, [0.0, 0.0]);
        }
        let rho = r / l;
        let (theta, phi) = lshape_angle(x);
        let a = 2.0 * phi / 3.0;
        let g = rho.powf(2.0 / 3.0) * a.sin();
        let amp = 2.0 / (3.0 * l) * rho.powf(-1.0 / 3.0);
        (g, [amp * (a - theta).sin(), amp * (a - theta).cos()])
    }

    /// `p = (1 − X²)(1 − Y²)` with `X = x₁/ℓ`, `Y = x₂/ℓ`, its gradient and Laplacian.
    fn bubble(&self, x: Point) -> (f64, [f64; 2], f64) {
        let l = self.domain.ell;
        let (xx, yy) = (x[0] / l, x[1] / l);
        let (a, b) = (1.0 - xx * xx, 1.0 - yy * yy);
        let grad = [-2.0 * xx * b / l, -2.0 * yy * a / l];
        let lap = -2.0 * (a + b) / (l * l);
        (a * b, grad, lap)
    }
}

//! Second-variation ODE system and the Hessian of the objective map.
//!
//! The objective is viewed as a function `F(p, q)` of two perturbations of
//! the adjoint initial conditions: `p` enters the second adjoint component
//! and `q` the fourth (the directions transverse to the real base
//! trajectory). `(0, 0)` is a critical point of `F`; whether the base
//! trajectory is a strict local maximum is decided by the Hessian of `F`
//! there. This module propagates the 15 sensitivity components that yield
//! that Hessian by ODE integration.
//!
//! State layout `y[0..15]` (1-based names used throughout the docs):
//!
//! * `y1 = (x1)_pp`, `y2 = (x3)_pp`, `y3 = (x5)_pp` — second `p`-derivatives
//!   of the real coefficient components,
//! * `y4 = (x2)_p`, `y5 = (x4)_p`, `y6 = (psi2)_p` — first `p`-derivatives of
//!   the imaginary components and their adjoint,
//! * `y7..y12` — the same six quantities for `q`,
//! * `y13 = (x1)_pq`, `y14 = (x3)_pq`, `y15 = (x5)_pq` — mixed seconds.
//!
//! Initial condition: all zero except `y6(0) = 1` (the unit response of the
//! perturbed adjoint component to its own perturbation).
//!
//! All four problem variants share one right-hand side, parameterized by
//! the coefficient functions `c(t)`, `d`, `delta(t)` (control-derivative
//! denominators), `e1(t)`, `e2` (adjoint-sensitivity coefficients), and the
//! objective weights.

use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorOptions, Solution};
use crate::problem::{ProblemSpec, VariantId};
use serde::{Deserialize, Serialize};

/// Dimension of the variational state.
pub const VAR_DIM: usize = 15;

/// Initial variational state: zeros except the unit adjoint response.
pub fn initial_var_state() -> [f64; VAR_DIM] {
    let mut y = [0.0; VAR_DIM];
    y[5] = 1.0;
    y
}

/// First derivatives of the maximizing control with respect to the two
/// perturbation parameters, evaluated along the base trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlDerivs {
    pub up: f64,
    pub uq: f64,
}

/// Hessian of `F` at the critical point `(0, 0)`. The determinant is always
/// recomputed from the three entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HessianF {
    pub fpp: f64,
    pub fqq: f64,
    pub fpq: f64,
}

impl HessianF {
    pub fn det(&self) -> f64 {
        self.fpp * self.fqq - self.fpq * self.fpq
    }

    /// Second-order test outcome: negative definite means strict local max.
    pub fn is_negative_definite(&self) -> bool {
        self.fpp < 0.0 && self.det() > 0.0
    }
}

impl ProblemSpec {
    /// Coefficient `c(t)` of the control-derivative numerators.
    pub fn control_c(&self, t: f64) -> f64 {
        let im = self.m.inv();
        match self.variant {
            VariantId::LFunctional => (3.0 - 5.0 * t - 4.0 * im) * self.nu + self.mu,
            VariantId::Sigma24 => 3.0 - 5.0 * t,
            VariantId::Sigma34 => 3.0 - 5.0 * t + self.mu,
            VariantId::A4Bound => 3.0 - 4.0 * im - 5.0 * t,
        }
    }

    /// Constant coefficient `d` of the control-derivative numerators.
    pub fn control_d(&self) -> f64 {
        match self.variant {
            VariantId::LFunctional => self.nu,
            _ => 1.0,
        }
    }

    /// Control-derivative denominator `delta(t)`; proportional to the
    /// second control derivative of the Hamiltonian on the base trajectory,
    /// `H_uu(t, pi) = -2*delta(t)`.
    pub fn delta(&self, t: f64) -> f64 {
        let im = self.m.inv();
        match self.variant {
            VariantId::LFunctional => {
                let (mu, nu) = (self.mu, self.nu);
                16.0 * nu * t * t - 4.0 * (2.0 * nu + 4.0 * nu * im - mu) * t + 2.0 * nu + 1.0
                    - 4.0 * (2.0 * nu + mu) * im
                    + 15.0 * nu * im * im
            }
            VariantId::Sigma24 => 16.0 * t * t - 8.0 * t + self.nu + 2.0,
            VariantId::Sigma34 => 16.0 * t * t - (8.0 - 4.0 * self.mu) * t + 2.0,
            VariantId::A4Bound => {
                16.0 * t * t - (8.0 + 16.0 * im) * t + 2.0 - 8.0 * im + 15.0 * im * im
            }
        }
    }

    /// Time-dependent coefficient of the control in the adjoint-sensitivity
    /// equations (`y6' = -e1*up - e2*y4` and its `q`-twin).
    pub fn e1(&self, t: f64) -> f64 {
        let im = self.m.inv();
        match self.variant {
            VariantId::LFunctional => 4.0 * (self.nu * (t + 1.0 - 4.0 * im) + self.mu),
            VariantId::Sigma24 => 4.0 * (t + 1.0),
            VariantId::Sigma34 => 4.0 * (t + 1.0 + self.mu),
            VariantId::A4Bound => 4.0 * (t + 1.0 - 4.0 * im),
        }
    }

    /// Constant coefficient of the state in the adjoint-sensitivity
    /// equations.
    pub fn e2(&self) -> f64 {
        match self.variant {
            VariantId::LFunctional => 4.0 * self.nu,
            _ => 4.0,
        }
    }
}

fn checked_delta(spec: &ProblemSpec, t: f64) -> Result<f64> {
    let d = spec.delta(t);
    if d.abs() < 1e-12 {
        return Err(Error::DenominatorVanishing { t, value: d.abs() });
    }
    Ok(d)
}

/// Control derivatives `(u_p, u_q)` at time `t` for the given variational
/// state. `u_p` depends only on `(y4, y5, y6)` and `u_q` only on
/// `(y10, y11, y12)`; the constant `2(1 - 3t)` in `u_q` is the direct
/// response of the fourth adjoint component to its own perturbation.
pub fn control_derivs(spec: &ProblemSpec, t: f64, y: &[f64; VAR_DIM]) -> Result<ControlDerivs> {
    let delta = checked_delta(spec, t)?;
    let c = spec.control_c(t);
    let d = spec.control_d();
    let up = (2.0 * c * y[3] + 2.0 * d * y[4] - y[5]) / delta;
    let uq = (2.0 * c * y[9] + 2.0 * d * y[10] - y[11] + 2.0 * (1.0 - 3.0 * t)) / delta;
    Ok(ControlDerivs { up, uq })
}

/// Right-hand side of the closed 3-dimensional `p`-subsystem
/// `(y4, y5, y6)`. The full system delegates to this function for those
/// components, so integrating the subsystem alone reproduces them exactly
/// (bitwise, for the same method and step count).
pub fn p_subsystem_rhs(spec: &ProblemSpec, t: f64, s: &[f64; 3]) -> Result<[f64; 3]> {
    let delta = checked_delta(spec, t)?;
    let c = spec.control_c(t);
    let d = spec.control_d();
    let up = (2.0 * c * s[0] + 2.0 * d * s[1] - s[2]) / delta;
    Ok(p_subsystem_derivs(spec, t, s, up))
}

#[inline]
fn p_subsystem_derivs(spec: &ProblemSpec, t: f64, s: &[f64; 3], up: f64) -> [f64; 3] {
    [
        -2.0 * up,
        4.0 * (s[0] + (1.0 - 3.0 * t) * up),
        -spec.e1(t) * up - spec.e2() * s[0],
    ]
}

/// Right-hand side of the full 15-dimensional variational system.
pub fn var_rhs(spec: &ProblemSpec, t: f64, y: &[f64; VAR_DIM]) -> Result<[f64; VAR_DIM]> {
    let ControlDerivs { up, uq } = control_derivs(spec, t, y)?;
    let e1 = spec.e1(t);
    let e2 = spec.e2();

    let (y1, y2, y4, y5) = (y[0], y[1], y[3], y[4]);
    let (y7, y8, y10, y11) = (y[6], y[7], y[9], y[10]);
    let (y13, y14) = (y[12], y[13]);

    // Shared polynomial coefficients of the quadratic response equations.
    let k1 = 2.0 * (7.0 * t - 3.0); // x3-coupling into the third components
    let k2 = 2.0 * (2.0 * t - 1.0); // control-squared coupling in the seconds
    let k3 = 47.0 * t * t - 46.0 * t + 9.0; // control-squared coupling in the thirds
    let k4 = 5.0 * t - 3.0; // state-control coupling in the thirds

    let dp = p_subsystem_derivs(spec, t, &[y4, y5, y[5]], up);

    let mut dy = [0.0; VAR_DIM];
    // p-block: second p-derivatives of (x1, x3, x5).
    dy[0] = -2.0 * up * up;
    dy[1] = 4.0 * (y1 + 2.0 * y4 * up - k2 * up * up);
    dy[2] = k1 * y1 + 4.0 * y2 - 4.0 * y4 * y4
        + 8.0 * k4 * y4 * up
        + 8.0 * y5 * up
        - 2.0 * k3 * up * up;
    // p-block: first p-derivatives (closed subsystem).
    dy[3] = dp[0];
    dy[4] = dp[1];
    dy[5] = dp[2];
    // q-block mirrors the p-block with u_q and the q-components; the
    // adjoint-sensitivity equation carries an extra constant forcing -4
    // (the response of the adjoint to the perturbed component itself).
    dy[6] = -2.0 * uq * uq;
    dy[7] = 4.0 * (y7 + 2.0 * y10 * uq - k2 * uq * uq);
    dy[8] = k1 * y7 + 4.0 * y8 - 4.0 * y10 * y10
        + 8.0 * k4 * y10 * uq
        + 8.0 * y11 * uq
        - 2.0 * k3 * uq * uq;
    dy[9] = -2.0 * uq;
    dy[10] = 4.0 * (y10 + (1.0 - 3.0 * t) * uq);
    dy[11] = -e1 * uq - e2 * y10 - 4.0;
    // mixed block: pq-derivatives of (x1, x3, x5).
    dy[12] = -2.0 * up * uq;
    dy[13] = 4.0 * (y13 + y4 * uq + y10 * up) - 2.0 * k2 * 2.0 * up * uq;
    dy[14] = k1 * y13 + 4.0 * y14 - 4.0 * y4 * y10
        + 4.0 * k4 * (y4 * uq + y10 * up)
        + 4.0 * (y5 * uq + y11 * up)
        - 2.0 * k3 * up * uq;
    Ok(dy)
}

/// Integrates the variational system from `0` to the spec's horizon.
pub fn integrate_variational(
    spec: &ProblemSpec,
    integ: IntegratorOptions,
) -> Result<Solution<VAR_DIM>> {
    let spec = *spec;
    integrate(
        &mut |t, y: &[f64; VAR_DIM]| var_rhs(&spec, t, y),
        initial_var_state(),
        0.0,
        spec.horizon(),
        integ,
    )
}

/// Applies the variant objective weights to the three blocks of an
/// integrated variational endpoint state.
pub fn hessian_from_endpoint(spec: &ProblemSpec, y: &[f64; VAR_DIM]) -> HessianF {
    let w = spec.objective_weights();
    HessianF {
        fpp: w[0] * y[0] + w[1] * y[1] + w[2] * y[2],
        fqq: w[0] * y[6] + w[1] * y[7] + w[2] * y[8],
        fpq: w[0] * y[12] + w[1] * y[13] + w[2] * y[14],
    }
}

/// Hessian of `F` at `(0, 0)`: integrate the variational system to the
/// horizon and weight the endpoint blocks by the objective.
pub fn hessian_of_f(spec: &ProblemSpec, integ: IntegratorOptions) -> Result<HessianF> {
    let sol = integrate_variational(spec, integ)?;
    Ok(hessian_from_endpoint(spec, &sol.y))
}

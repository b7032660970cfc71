//! Closed-form solution of the variational system on the `nu = 0` axis of
//! the linear-functional variant.
//!
//! With `nu = 0` the control-derivative denominator degenerates to the
//! affine function `delta(t) = 4*mu*t + 1 - 4*mu/M`, the `p`-subsystem
//! decouples from `y5`, and the quadratic response integrates in closed
//! form. Writing `A = delta(0) = 1 - 4*mu/M` and `a = delta(T) = 1 + 4*mu
//! - 8*mu/M` (horizon `T = 1 - 1/M`), the second derivative of the
//! objective in the `p`-direction is
//!
//! ```text
//! F_pp = -(1 / (2*mu)) * ( ln(a/A)^2 + ln(a/A) )
//! ```
//!
//! The strict-local-maximum criterion in this direction is `-F_pp > 0`.
//! As `mu -> 0` the expression tends to `-2*T`.
//!
//! The root of `F_pp` in `mu` on this axis (at `M = infinity`) is
//! `mu* = (1 - e) / (4e)`, giving the sharp constant
//! `sigma = (e - 1) / (4e)` for the two-parameter functional it bounds.

use crate::error::{Error, Result};
use crate::problem::Bound;
use serde::{Deserialize, Serialize};

/// Outcome of the closed-form second-order test on the `nu = 0` axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormResult {
    /// Second derivative `F_pp` of the objective at the critical point.
    pub fpp: f64,
    /// Left-hand side of the strict-maximum criterion (`-F_pp`).
    pub criterion_lhs: f64,
    /// Whether the base trajectory is a strict local maximum in the
    /// `p`-direction (`criterion_lhs > 0`).
    pub pick_is_local_max: bool,
}

/// Sharp constant on the `nu = 0` axis: `(e - 1) / (4e)`.
pub fn sigma32() -> f64 {
    (std::f64::consts::E - 1.0) / (4.0 * std::f64::consts::E)
}

/// Threshold below which `mu` is treated as zero and the analytic limit
/// `F_pp -> -2*T` is used.
const MU_LIMIT_EPS: f64 = 1e-8;

fn denominators(mu: f64, m: Bound) -> Result<(f64, f64, f64)> {
    m.validate()?;
    let im = m.inv();
    let t_end = 1.0 - im;
    let a_start = 1.0 - 4.0 * mu * im; // delta(0)
    let a_end = 1.0 + 4.0 * mu - 8.0 * mu * im; // delta(T)
    if a_start <= 0.0 || a_end <= 0.0 {
        return Err(Error::LogDomain(format!(
            "closed form requires positive denominators: delta(0) = {a_start}, delta(T) = {a_end} \
             at mu = {mu}, M = {m}"
        )));
    }
    Ok((t_end, a_start, a_end))
}

/// Closed-form control derivative `u_p(t) = -1 / delta(t)` on the axis.
pub fn up_closed(mu: f64, m: Bound, t: f64) -> Result<f64> {
    m.validate()?;
    let d = 4.0 * mu * t + 1.0 - 4.0 * mu * m.inv();
    if d.abs() < 1e-12 {
        return Err(Error::DenominatorVanishing { t, value: d.abs() });
    }
    Ok(-1.0 / d)
}

/// Closed-form `y1(t) = (x1)_pp` on the axis.
pub fn y1_closed(mu: f64, m: Bound, t: f64) -> Result<f64> {
    let (_, a_start, _) = denominators(mu, m)?;
    if mu.abs() < MU_LIMIT_EPS {
        return Ok(-2.0 * t);
    }
    let d = 4.0 * mu * t + a_start;
    if d <= 0.0 {
        return Err(Error::LogDomain(format!(
            "closed form requires positive denominator: delta({t}) = {d}"
        )));
    }
    Ok((1.0 / d - 1.0 / a_start) / (2.0 * mu))
}

/// Closed-form `y4(t) = (x2)_p` on the axis.
pub fn y4_closed(mu: f64, m: Bound, t: f64) -> Result<f64> {
    let (_, a_start, _) = denominators(mu, m)?;
    if mu.abs() < MU_LIMIT_EPS {
        return Ok(2.0 * t);
    }
    let d = 4.0 * mu * t + a_start;
    if d <= 0.0 {
        return Err(Error::LogDomain(format!(
            "closed form requires positive denominator: delta({t}) = {d}"
        )));
    }
    Ok((d / a_start).ln() / (2.0 * mu))
}

/// Closed-form `F_pp` on the `nu = 0` axis.
pub fn fpp_closed(mu: f64, m: Bound) -> Result<f64> {
    let (t_end, a_start, a_end) = denominators(mu, m)?;
    if mu.abs() < MU_LIMIT_EPS {
        return Ok(-2.0 * t_end);
    }
    let l = (a_end / a_start).ln();
    Ok(-(l * l + l) / (2.0 * mu))
}

/// Evaluates the closed-form second-order test at `(mu, M)`.
pub fn criterion(mu: f64, m: Bound) -> Result<ClosedFormResult> {
    let fpp = fpp_closed(mu, m)?;
    Ok(ClosedFormResult {
        fpp,
        criterion_lhs: -fpp,
        pick_is_local_max: -fpp > 0.0,
    })
}

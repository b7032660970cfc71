//! Admissibility of a parameter point: checks that the constant control
//! `u = pi` actually maximizes the Hamiltonian along the whole base
//! trajectory, and locates the boundary of the admissible region along a
//! parameter axis.
//!
//! On the base trajectory the Hamiltonian restricted to the control is a
//! cubic in `y = cos(u)`. The point is admissible when, for every `t` on a
//! grid over `[0, T]`,
//!
//! 1. the cubic's maximum over `y` in `[-1, 1]` is attained only at
//!    `y = -1` (i.e. `u = pi`), with positive gap to every other candidate
//!    (interior critical points and the endpoint `y = 1`), and
//! 2. the second control derivative `H_uu(t, pi)` is bounded away from
//!    zero.
//!
//! The check returns a boolean only when it holds a certificate for it: a
//! definite violation at some grid point (negative gap, or positive
//! curvature at `u = pi`) certifies inadmissibility even if other grid
//! points are borderline, while certifying admissibility requires every
//! grid point to be strictly fine. If neither certificate exists — some
//! gap or `H_uu` sits within `1e-12` of zero and nothing is definitely
//! violated — the verdict is indeterminate at this grid resolution and is
//! reported as an error rather than a boolean.

use crate::error::{Error, Result};
use crate::problem::{hamiltonian_cubic, huu_at_pi, Bound, ProblemSpec};
use serde::{Deserialize, Serialize};

/// Result of a grid admissibility check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    /// True when every grid point satisfies both conditions strictly.
    pub admissible: bool,
    /// Smallest gap `H(-1) - max(other candidates)` over the grid.
    pub min_gap: f64,
    /// Smallest `|H_uu(t, pi)|` over the grid.
    pub min_abs_huu: f64,
    /// Grid time at which the smallest gap occurs.
    pub worst_t: f64,
    /// Number of grid intervals used.
    pub grid_n: usize,
}

const INDETERMINATE_EPS: f64 = 1e-12;

/// Gap between the cubic value at `y = -1` and the best other candidate
/// (interior critical points in `(-1, 1]` and the endpoint `y = 1`).
fn maximizer_gap(spec: &ProblemSpec, t: f64) -> Result<f64> {
    let cubic = hamiltonian_cubic(spec, t)?;
    let at_minus1 = cubic.eval(-1.0);
    let mut best_other = cubic.eval(1.0);
    let (n, roots) = cubic.critical_points();
    for &y in roots.iter().take(n) {
        if y > -1.0 && y <= 1.0 {
            best_other = best_other.max(cubic.eval(y));
        }
    }
    Ok(at_minus1 - best_other)
}

/// Checks admissibility on a uniform grid of `grid_n + 1` points over
/// `[0, T]`. `grid_n` must be at least 2.
pub fn check_admissible(spec: &ProblemSpec, grid_n: usize) -> Result<AdmissibilityReport> {
    if grid_n < 2 {
        return Err(Error::InvalidOptions(format!(
            "admissibility grid must have at least 2 intervals, got {grid_n}"
        )));
    }
    let t_end = spec.horizon();
    let mut min_gap = f64::INFINITY;
    let mut min_abs_huu = f64::INFINITY;
    let mut worst_t = 0.0;
    let mut violated = false;
    let mut indeterminate: Option<(f64, f64)> = None;
    for i in 0..=grid_n {
        let t = t_end * (i as f64) / (grid_n as f64);
        let gap = maximizer_gap(spec, t)?;
        let huu = huu_at_pi(spec, t)?;
        // A definitely negative gap or definitely positive curvature at
        // u = pi certifies a violation; near-zero values of either are
        // indeterminate at this grid resolution.
        if gap < -INDETERMINATE_EPS || huu > INDETERMINATE_EPS {
            violated = true;
        } else if (gap.abs() < INDETERMINATE_EPS || huu.abs() < INDETERMINATE_EPS)
            && indeterminate.is_none()
        {
            indeterminate = Some((t, gap.abs().min(huu.abs())));
        }
        if gap < min_gap {
            min_gap = gap;
            worst_t = t;
        }
        min_abs_huu = min_abs_huu.min(huu.abs());
    }
    if !violated {
        if let Some((t, margin)) = indeterminate {
            return Err(Error::IndeterminateAdmissibility { t, margin });
        }
    }
    Ok(AdmissibilityReport {
        admissible: !violated && indeterminate.is_none(),
        min_gap,
        min_abs_huu,
        worst_t,
        grid_n,
    })
}

/// Axis along which `boundary_scan` varies a single parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamAxis {
    Mu,
    Nu,
    /// The bound parameter `M` itself (finite values only).
    BoundM,
}

fn spec_on_axis(template: &ProblemSpec, axis: ParamAxis, value: f64) -> Result<ProblemSpec> {
    let mut spec = *template;
    match axis {
        ParamAxis::Mu => spec.mu = value,
        ParamAxis::Nu => spec.nu = value,
        ParamAxis::BoundM => {
            spec = ProblemSpec {
                m: Bound::Finite(value),
                ..spec
            };
            spec.m.validate()?;
            spec.t_horizon = spec.m.horizon();
        }
    }
    Ok(spec)
}

/// Locates the admissibility boundary along one parameter axis by
/// bisection on the admissibility verdict.
///
/// `template` fixes the variant and the parameters not being varied. The
/// scan requires the two endpoint verdicts to differ; otherwise there is
/// no boundary to bracket and an error is returned. A grid point whose
/// verdict is indeterminate at this resolution terminates the bisection
/// early at that midpoint (the bracket has collapsed to the resolution of
/// the admissibility grid itself).
pub fn boundary_scan(
    template: &ProblemSpec,
    axis: ParamAxis,
    interval: (f64, f64),
    tol: f64,
    grid_n: usize,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::InvalidOptions(format!(
            "boundary scan tolerance must be positive, got {tol}"
        )));
    }
    let (mut lo, mut hi) = interval;
    if !(hi > lo) {
        return Err(Error::InvalidOptions(format!(
            "boundary scan interval must be nondegenerate, got ({lo}, {hi})"
        )));
    }
    let verdict = |value: f64| -> Result<Option<bool>> {
        let spec = spec_on_axis(template, axis, value)?;
        match check_admissible(&spec, grid_n) {
            Ok(report) => Ok(Some(report.admissible)),
            Err(Error::IndeterminateAdmissibility { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };
    let v_lo = verdict(lo)?.ok_or_else(|| {
        Error::InvalidParameter(format!("admissibility indeterminate at endpoint {lo}"))
    })?;
    let v_hi = verdict(hi)?.ok_or_else(|| {
        Error::InvalidParameter(format!("admissibility indeterminate at endpoint {hi}"))
    })?;
    if v_lo == v_hi {
        return Err(Error::InvalidParameter(format!(
            "admissibility verdict agrees at both endpoints ({lo} and {hi} are both {}); \
             no boundary inside the interval",
            if v_lo { "admissible" } else { "inadmissible" }
        )));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match verdict(mid)? {
            Some(v) if v == v_lo => lo = mid,
            Some(_) => hi = mid,
            // Indeterminate right on the transition: the midpoint is the
            // boundary to within the achievable resolution.
            None => return Ok(mid),
        }
    }
    Ok(0.5 * (lo + hi))
}


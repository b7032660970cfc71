//! Root location for the sharp constants.
//!
//! Each target traces a one-parameter family of problem specs and asks
//! where a second-order optimality quantity changes sign:
//!
//! * `g1(param)` — the pure `p`-direction second derivative `F_pp`
//!   (first minor of the Hessian of `F`),
//! * `g2(param)` — the Hessian determinant `F_pp * F_qq - F_pq^2`.
//!
//! The strict-local-maximum property holds while `g1 < 0` and `g2 > 0`;
//! the sharp constant sits at the parameter where the property first
//! fails. For the sigma targets the parameter runs over a negative
//! interval and the constant is the negated root closest to zero; for the
//! coefficient-bound threshold the parameter is the bound itself and the
//! constant is the largest root. Both rules reduce to "largest root over
//! the monitored equations".
//!
//! The scan evaluates the equations on a deterministic interior grid
//! (rows may be computed in parallel; ordering and values do not depend
//! on thread count), brackets sign changes, and bisects each bracket to
//! the requested parameter tolerance. Roots are accepted only after a
//! step-halving consistency check of the underlying integration.

use crate::admissibility::check_admissible;
use crate::error::{Error, Result};
use crate::integrate::IntegratorOptions;
use crate::problem::{Bound, ProblemSpec};
use crate::variational::hessian_of_f;
use serde::{Deserialize, Serialize};
use std::sync::Once;

/// Quantity a target monitors for sign changes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttainedBy {
    /// The `p`-direction second derivative `F_pp`.
    FirstMinor,
    /// The full Hessian determinant.
    Determinant,
}

/// One-parameter families whose sharp constants the solver computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    /// Third-vs-second coefficient constant: `mu` axis at infinite bound.
    /// Only the first minor is monitored; the published constant for this
    /// one-parameter functional is defined by the `p`-direction condition.
    Sigma32,
    /// Fourth-vs-second coefficient constant: `nu` axis at infinite bound.
    Sigma42,
    /// Second-vs-fourth coefficient constant.
    Sigma24,
    /// Third-vs-fourth coefficient constant.
    Sigma34,
    /// Threshold bound above which the fourth-coefficient extremal
    /// property holds; the parameter is the bound `M` itself.
    M0,
}

impl Target {
    /// Default scan interval for the target's parameter.
    pub fn default_interval(self) -> (f64, f64) {
        match self {
            Target::Sigma32 => (-0.25, 0.0),
            Target::Sigma42 => (-0.1, 0.0),
            Target::Sigma24 => (-1.0, 0.0),
            Target::Sigma34 => (-2.0 * (std::f64::consts::SQRT_2 - 1.0), 0.0),
            Target::M0 => (11.0, 300.0),
        }
    }

    /// Name of the scanned parameter (for reports and CSV headers).
    pub fn param_name(self) -> &'static str {
        match self {
            Target::Sigma32 | Target::Sigma34 => "mu",
            Target::Sigma42 | Target::Sigma24 => "nu",
            Target::M0 => "M",
        }
    }

    /// Command-line style name of the target.
    pub fn name(self) -> &'static str {
        match self {
            Target::Sigma32 => "sigma32",
            Target::Sigma42 => "sigma42",
            Target::Sigma24 => "sigma24",
            Target::Sigma34 => "sigma34",
            Target::M0 => "m0",
        }
    }

    /// Problem spec for a given value of the scanned parameter.
    pub fn spec_at(self, param: f64) -> Result<ProblemSpec> {
        match self {
            Target::Sigma32 => ProblemSpec::l_functional(param, 0.0, Bound::Infinite),
            Target::Sigma42 => ProblemSpec::l_functional(0.0, param, Bound::Infinite),
            Target::Sigma24 => ProblemSpec::sigma24(param),
            Target::Sigma34 => ProblemSpec::sigma34(param),
            Target::M0 => ProblemSpec::a4_bound(param),
        }
    }

    /// Equations monitored for sign changes.
    fn equations(self) -> &'static [AttainedBy] {
        match self {
            Target::Sigma32 => &[AttainedBy::FirstMinor],
            _ => &[AttainedBy::FirstMinor, AttainedBy::Determinant],
        }
    }

    /// Whether the reported constant is the negated root (sigma targets)
    /// or the root itself (bound threshold).
    fn negate_root(self) -> bool {
        !matches!(self, Target::M0)
    }

    /// Scan grid over an open interval: `n` interior points, equally
    /// spaced in the parameter, except for the bound threshold where the
    /// grid is equally spaced in `1/M` (the quantity the dynamics actually
    /// depend on; this concentrates resolution at small bounds where the
    /// equations vary fastest).
    fn grid(self, interval: (f64, f64), n: usize) -> Vec<f64> {
        let (lo, hi) = interval;
        match self {
            Target::M0 => {
                let (ilo, ihi) = (1.0 / hi, 1.0 / lo);
                (0..n)
                    .rev()
                    .map(|i| {
                        let im = ilo + (i as f64 + 1.0) * (ihi - ilo) / (n as f64 + 1.0);
                        1.0 / im
                    })
                    .collect()
            }
            _ => (0..n)
                .map(|i| lo + (i as f64 + 1.0) * (hi - lo) / (n as f64 + 1.0))
                .collect(),
        }
    }
}

/// Configuration of a root scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootScanConfig {
    /// Open parameter interval to scan.
    pub scan_interval: (f64, f64),
    /// Number of interior grid points.
    pub scan_points: usize,
    /// Parameter tolerance for bisection.
    pub bisect_tol: f64,
    /// Integrator used for every equation evaluation.
    pub integ: IntegratorOptions,
}

impl RootScanConfig {
    pub fn default_for(target: Target) -> Self {
        RootScanConfig {
            scan_interval: target.default_interval(),
            scan_points: 200,
            bisect_tol: 1e-7,
            integ: IntegratorOptions::default(),
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.scan_interval;
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidOptions(format!(
                "scan interval must be a nondegenerate finite interval, got ({lo}, {hi})"
            )));
        }
        if self.scan_points < 2 {
            return Err(Error::InvalidOptions(format!(
                "scan needs at least 2 grid points, got {}",
                self.scan_points
            )));
        }
        if !(self.bisect_tol > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "bisection tolerance must be positive, got {}",
                self.bisect_tol
            )));
        }
        self.integ.validate()
    }
}

/// One row of a scan: the monitored quantities at a parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub param: f64,
    /// First minor `F_pp`.
    pub g1: f64,
    /// Hessian determinant.
    pub g2: f64,
    /// Signed maximizer gap of the admissibility check at this parameter
    /// (negative when the constant control fails to maximize).
    pub admissibility_margin: f64,
}

/// Result of a completed root solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverResult {
    /// The sharp constant (negated root for sigma targets, the root
    /// itself for the bound threshold).
    pub value: f64,
    /// Which monitored equation attains the defining root.
    pub attained_by: AttainedBy,
    /// Parameter value of the defining root.
    pub root_param: f64,
    /// Final bisection bracket around the root.
    pub bracket: (f64, f64),
    /// Values of the attaining equation at the bracket endpoints.
    pub g_values_at_bracket: (f64, f64),
    /// Signed maximizer gap of the admissibility check at the root.
    pub admissibility_margin: f64,
}

/// Grid used for per-row admissibility margins.
const MARGIN_GRID_N: usize = 2048;

/// Upper limit on the root displacement implied by a step-halving of the
/// integrator at an accepted root.
const STEP_HALVING_LIMIT: f64 = 1e-10;

static THREAD_POOL_INIT: Once = Once::new();

/// Honors `LOEWNER_THREADS` for every parallel evaluation. Invalid or
/// absent values leave the default thread pool in place. Idempotent; safe
/// to call from any entry point before spawning parallel work.
pub fn init_thread_pool() {
    THREAD_POOL_INIT.call_once(|| {
        if let Some(n) = std::env::var("LOEWNER_THREADS")
            .ok()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            // Ignore failure: the global pool may already exist.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
    });
}

/// Evaluates the monitored pair `(g1, g2)` at one parameter value with a
/// single integration of the variational system.
pub fn eval_g(target: Target, param: f64, integ: IntegratorOptions) -> Result<(f64, f64)> {
    let spec = target.spec_at(param)?;
    let h = hessian_of_f(&spec, integ)?;
    Ok((h.fpp, h.det()))
}

fn margin_at(target: Target, param: f64) -> Result<f64> {
    let spec = target.spec_at(param)?;
    Ok(check_admissible(&spec, MARGIN_GRID_N)?.min_gap)
}

/// Evaluates the scan rows on the target's interior grid. Rows are
/// computed in parallel but returned in increasing parameter order with
/// values independent of the thread count.
pub fn scan(target: Target, config: &RootScanConfig) -> Result<Vec<ScanRow>> {
    config.validate()?;
    init_thread_pool();
    let params = target.grid(config.scan_interval, config.scan_points);
    let integ = config.integ;
    use rayon::prelude::*;
    let rows: Vec<Result<ScanRow>> = params
        .par_iter()
        .map(|&param| {
            let (g1, g2) = eval_g(target, param, integ)?;
            let admissibility_margin = margin_at(target, param)?;
            Ok(ScanRow {
                param,
                g1,
                g2,
                admissibility_margin,
            })
        })
        .collect();
    rows.into_iter().collect()
}

struct BisectOutcome {
    root: f64,
    bracket: (f64, f64),
    g_at_bracket: (f64, f64),
}

fn bisect<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    mut flo: f64,
    mut fhi: f64,
    tol: f64,
) -> Result<BisectOutcome> {
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted at floating-point resolution
        }
        let fmid = f(mid)?;
        if fmid == 0.0 {
            return Ok(BisectOutcome {
                root: mid,
                bracket: (mid, mid),
                g_at_bracket: (0.0, 0.0),
            });
        }
        if (fmid < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
            fhi = fmid;
        }
    }
    Ok(BisectOutcome {
        root: 0.5 * (lo + hi),
        bracket: (lo, hi),
        g_at_bracket: (flo, fhi),
    })
}

fn pick_g(pair: (f64, f64), eq: AttainedBy) -> f64 {
    match eq {
        AttainedBy::FirstMinor => pair.0,
        AttainedBy::Determinant => pair.1,
    }
}

/// Locates the target's sharp constant.
///
/// Scans the interval, brackets every sign change of the monitored
/// equations between adjacent grid rows, bisects each bracket, and keeps
/// the largest root. A sign change between a scan endpoint and the first
/// or last interior row means the defining root hugs the domain boundary,
/// which is reported as an error rather than resolved (the endpoints of
/// the default intervals are singular or borderline-admissible points
/// where the equations stop being trustworthy). Endpoints at which the
/// equations cannot be evaluated at all are simply not used for
/// bracketing.
pub fn solve(target: Target, config: &RootScanConfig) -> Result<SolverResult> {
    let rows = scan(target, config)?;
    let integ = config.integ;
    let (lo, hi) = config.scan_interval;

    // Endpoint probes for the boundary-bracket guard. An endpoint takes
    // part in bracketing only when the equations are numerically
    // meaningful there: evaluation must succeed, produce finite values,
    // and agree with a step-halved integration to a loose tolerance.
    // Default intervals have singular endpoints (vanishing control
    // denominators), which this filter discards.
    let endpoint = |param: f64| -> Option<(f64, f64)> {
        let g = eval_g(target, param, integ).ok()?;
        if !g.0.is_finite() || !g.1.is_finite() {
            return None;
        }
        let mut half = integ;
        half.steps *= 2;
        let gh = eval_g(target, param, half).ok()?;
        let scale = 1.0 + g.0.abs().max(g.1.abs());
        if (g.0 - gh.0).abs() > 1e-6 * scale || (g.1 - gh.1).abs() > 1e-6 * scale {
            return None;
        }
        Some(g)
    };
    let g_lo = endpoint(lo);
    let g_hi = endpoint(hi);

    let mut best: Option<(f64, AttainedBy, BisectOutcome)> = None;
    for &eq in target.equations() {
        let first = pick_g((rows[0].g1, rows[0].g2), eq);
        let last = {
            let r = rows.last().expect("scan returns at least 2 rows");
            pick_g((r.g1, r.g2), eq)
        };
        if let Some(g) = g_lo {
            if pick_g(g, eq) * first < 0.0 {
                return Err(Error::BracketOnBoundary { param: lo });
            }
        }
        if let Some(g) = g_hi {
            if pick_g(g, eq) * last < 0.0 {
                return Err(Error::BracketOnBoundary { param: hi });
            }
        }
        for pair in rows.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            let (ga, gb) = (pick_g((a.g1, a.g2), eq), pick_g((b.g1, b.g2), eq));
            let outcome = if ga == 0.0 {
                Some(BisectOutcome {
                    root: a.param,
                    bracket: (a.param, a.param),
                    g_at_bracket: (0.0, 0.0),
                })
            } else if ga * gb < 0.0 {
                Some(bisect(
                    |p| Ok(pick_g(eval_g(target, p, integ)?, eq)),
                    a.param,
                    b.param,
                    ga,
                    gb,
                    config.bisect_tol,
                )?)
            } else {
                None
            };
            if let Some(out) = outcome {
                let better = match &best {
                    Some((root, _, _)) => out.root > *root,
                    None => true,
                };
                if better {
                    best = Some((out.root, eq, out));
                }
            }
        }
    }

    let (root, eq, outcome) = best.ok_or(Error::NoSignChange { lo, hi })?;

    // Accept the root only if it is integration-step converged: halving
    // the step changes the attaining equation's value by some delta, and
    // the root displacement that delta implies (through the equation's
    // slope, estimated from the final bracket) must be negligible.
    let (blo, bhi) = outcome.bracket;
    if bhi > blo {
        let g_full = pick_g(eval_g(target, root, integ)?, eq);
        let mut integ_half = integ;
        integ_half.steps *= 2;
        let g_half = pick_g(eval_g(target, root, integ_half)?, eq);
        let (glo, ghi) = outcome.g_at_bracket;
        let slope = (ghi - glo) / (bhi - blo);
        let delta = if slope.abs() > 0.0 {
            ((g_full - g_half) / slope).abs()
        } else {
            f64::INFINITY
        };
        if delta > STEP_HALVING_LIMIT {
            return Err(Error::StepHalvingDisagreement {
                param: root,
                delta,
                limit: STEP_HALVING_LIMIT,
            });
        }
    }

    let admissibility_margin = margin_at(target, root)?;
    let value = if target.negate_root() { -root } else { root };
    Ok(SolverResult {
        value,
        attained_by: eq,
        root_param: root,
        bracket: outcome.bracket,
        g_values_at_bracket: outcome.g_at_bracket,
        admissibility_margin,
    })
}

//! Independent verification path: simulate the full state/adjoint system
//! with the control chosen by numerical maximization of the Hamiltonian
//! at every evaluation, with no use of the variational equations.
//!
//! The objective `F(p, q)` is evaluated by perturbing the initial adjoint
//! (`p` on the second component, `q` on the fourth) and integrating the
//! coupled 10-dimensional system; finite differences of `F` then provide
//! a Hessian estimate that must agree with the variational ODE Hessian.
//! Two structural facts about the base trajectory are also checked here:
//! perturbations of the real adjoint components leave the state untouched,
//! and state variations produced by the transverse (degenerate) components
//! are orthogonal to the base adjoint at the horizon.

use crate::error::{Error, Result};
use crate::integrate::{integrate, IntegratorOptions};
use crate::problem::{
    adjoint_rhs, base_adjoint, base_state, hamiltonian, hamiltonian_du, hamiltonian_duu,
    state_rhs, ProblemSpec,
};
use crate::variational::HessianF;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Combined state and adjoint of the full system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FullState {
    pub x: [f64; 5],
    pub psi: [f64; 5],
}

impl FullState {
    fn to_array(self) -> [f64; 10] {
        let mut a = [0.0; 10];
        a[..5].copy_from_slice(&self.x);
        a[5..].copy_from_slice(&self.psi);
        a
    }

    fn from_array(a: &[f64; 10]) -> Self {
        let mut x = [0.0; 5];
        let mut psi = [0.0; 5];
        x.copy_from_slice(&a[..5]);
        psi.copy_from_slice(&a[5..]);
        FullState { x, psi }
    }
}

/// Initial condition: the zero state with the base adjoint perturbed by
/// `p` on its second component and `q` on its fourth.
pub fn initial_full_state(spec: &ProblemSpec, p: f64, q: f64) -> Result<FullState> {
    let mut psi = base_adjoint(spec, 0.0)?;
    psi[1] += p;
    psi[3] += q;
    Ok(FullState {
        x: [0.0; 5],
        psi,
    })
}

/// Options of the per-evaluation control maximizer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlSolverOptions {
    /// Number of equally spaced points of the global search grid over
    /// `[0, 2*pi)`; at least 64.
    pub coarse_grid: usize,
    /// Golden-section iterations refining the best grid cell.
    pub refine_iters: usize,
}

impl Default for ControlSolverOptions {
    fn default() -> Self {
        ControlSolverOptions {
            coarse_grid: 128,
            refine_iters: 60,
        }
    }
}

impl ControlSolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.coarse_grid < 64 {
            return Err(Error::InvalidOptions(format!(
                "control search grid must have at least 64 points, got {}",
                self.coarse_grid
            )));
        }
        if self.refine_iters == 0 {
            return Err(Error::InvalidOptions(
                "control refinement needs at least one iteration".into(),
            ));
        }
        Ok(())
    }
}

/// Numerical tie threshold of the global grid search.
const TIE_EPS: f64 = 1e-13;
/// Required stationarity of an accepted control.
const HU_EPS: f64 = 1e-9;

fn circ_dist(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Maximizes the Hamiltonian over the control at a fixed time and state.
///
/// Global grid search, golden-section refinement of the winning cell, and
/// a guarded Newton polish on the analytic control derivative. Two grid
/// maxima that tie within `1e-13` but are not neighbors make the
/// maximizer ambiguous; with a previous control available the tie is
/// broken toward it, otherwise an error is returned. The result lies in
/// `[0, 2*pi)` and satisfies `|H_u| <= 1e-9`.
pub fn optimal_control(
    t: f64,
    x: &[f64; 5],
    psi: &[f64; 5],
    prev: Option<f64>,
    opts: &ControlSolverOptions,
) -> Result<f64> {
    opts.validate()?;
    let n = opts.coarse_grid;
    let h_at = |u: f64| hamiltonian(t, x, psi, u);

    let mut values = Vec::with_capacity(n);
    let mut best = 0usize;
    for k in 0..n {
        let v = h_at(TAU * k as f64 / n as f64);
        if v > values.get(best).copied().unwrap_or(f64::NEG_INFINITY) || k == 0 {
            best = k;
        }
        values.push(v);
    }
    let vmax = values[best];

    // Collect ties and decide whether the global maximizer is ambiguous.
    let adjacent = |a: usize, b: usize| {
        let d = (a as isize - b as isize).rem_euclid(n as isize);
        d <= 1 || d >= n as isize - 1
    };
    let ties: Vec<usize> = (0..n).filter(|&k| vmax - values[k] < TIE_EPS).collect();
    let has_remote_tie = ties.iter().any(|&k| !adjacent(k, best));
    if has_remote_tie {
        match prev {
            Some(pu) => {
                best = *ties
                    .iter()
                    .min_by(|&&a, &&b| {
                        let da = circ_dist(TAU * a as f64 / n as f64, pu);
                        let db = circ_dist(TAU * b as f64 / n as f64, pu);
                        da.partial_cmp(&db).expect("finite distances")
                    })
                    .expect("nonempty tie set");
            }
            None => {
                let other = ties
                    .iter()
                    .copied()
                    .find(|&k| !adjacent(k, best))
                    .expect("remote tie exists");
                return Err(Error::AmbiguousMaximizer {
                    t,
                    u1: TAU * best as f64 / n as f64,
                    u2: TAU * other as f64 / n as f64,
                });
            }
        }
    }

    // Golden-section refinement of the cell around the winning grid point.
    let cell = TAU / n as f64;
    let center = TAU * best as f64 / n as f64;
    let (mut a, mut b) = (center - cell, center + cell);
    let invphi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - invphi * (b - a);
    let mut d = a + invphi * (b - a);
    let (mut fc, mut fd) = (h_at(c), h_at(d));
    for _ in 0..opts.refine_iters {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = h_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = h_at(d);
        }
    }
    let mut u = 0.5 * (a + b);

    // Guarded Newton polish on the stationarity equation H_u = 0.
    for _ in 0..12 {
        let hu = hamiltonian_du(t, x, psi, u);
        if hu.abs() <= 1e-13 {
            break;
        }
        let huu = hamiltonian_duu(t, x, psi, u);
        if huu >= 0.0 {
            break; // wrong curvature: not converging to a maximum
        }
        let step = hu / huu;
        let next = u - step;
        if next < a - cell || next > b + cell {
            break; // leaving the certified cell
        }
        u = next;
    }

    let hu = hamiltonian_du(t, x, psi, u).abs();
    if hu > HU_EPS {
        return Err(Error::ControlSolveFailed { t, hu });
    }
    Ok(u.rem_euclid(TAU))
}

/// Outcome of one full-system simulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimOutcome {
    /// Objective value `F(p, q)` at the horizon.
    pub objective: f64,
    /// Full state and adjoint at the horizon.
    pub final_state: FullState,
}

/// Simulates the full system from the perturbed initial adjoint and
/// evaluates the objective at the horizon.
///
/// The control is maximized numerically at every right-hand-side
/// evaluation. A jump of more than `pi/2` between consecutive controls
/// means the trajectory left the neighborhood of the base control and the
/// local comparison is meaningless; this is reported as an error.
pub fn simulate(
    spec: &ProblemSpec,
    p: f64,
    q: f64,
    integ: IntegratorOptions,
    opts: &ControlSolverOptions,
) -> Result<SimOutcome> {
    opts.validate()?;
    let spec = *spec;
    let opts = *opts;
    let y0 = initial_full_state(&spec, p, q)?.to_array();
    let mut prev_u: Option<f64> = None;
    let sol = integrate(
        &mut |t, y: &[f64; 10]| {
            let s = FullState::from_array(y);
            let u = optimal_control(t, &s.x, &s.psi, prev_u, &opts)?;
            if let Some(pu) = prev_u {
                if circ_dist(u, pu) > PI / 2.0 {
                    return Err(Error::LeftBaseNeighborhood {
                        t,
                        prev: pu,
                        next: u,
                    });
                }
            }
            prev_u = Some(u);
            let dx = state_rhs(t, &s.x, u);
            let dpsi = adjoint_rhs(t, &s.x, &s.psi, u);
            let mut dy = [0.0; 10];
            dy[..5].copy_from_slice(&dx);
            dy[5..].copy_from_slice(&dpsi);
            Ok(dy)
        },
        y0,
        0.0,
        spec.horizon(),
        integ,
    )?;
    let final_state = FullState::from_array(&sol.y);
    Ok(SimOutcome {
        objective: spec.objective(&final_state.x),
        final_state,
    })
}

fn richardson(coarse: HessianF, fine: HessianF) -> HessianF {
    HessianF {
        fpp: (4.0 * fine.fpp - coarse.fpp) / 3.0,
        fqq: (4.0 * fine.fqq - coarse.fqq) / 3.0,
        fpq: (4.0 * fine.fpq - coarse.fpq) / 3.0,
    }
}

/// Finite-difference Hessian of `F` at `(0, 0)` with Richardson
/// extrapolation over step sizes `h` and `h/2`.
///
/// `h` must lie in `[1e-4, 1e-2]`: larger steps pick up higher-order
/// terms of `F`, smaller ones amplify the control-solve noise floor.
/// The 17 required simulations are independent and run in parallel.
pub fn fd_hessian(
    spec: &ProblemSpec,
    h: f64,
    integ: IntegratorOptions,
    opts: &ControlSolverOptions,
) -> Result<HessianF> {
    if !(1e-4..=1e-2).contains(&h) {
        return Err(Error::InvalidOptions(format!(
            "finite-difference step must lie in [1e-4, 1e-2], got {h}"
        )));
    }
    opts.validate()?;

    // All evaluation points of both step sizes, f00 first.
    let mut points: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for &s in &[h, 0.5 * h] {
        points.extend_from_slice(&[
            (s, 0.0),
            (-s, 0.0),
            (0.0, s),
            (0.0, -s),
            (s, s),
            (s, -s),
            (-s, s),
            (-s, -s),
        ]);
    }
    use rayon::prelude::*;
    crate::solver::init_thread_pool();
    let values: Vec<Result<f64>> = points
        .par_iter()
        .map(|&(p, q)| Ok(simulate(spec, p, q, integ, opts)?.objective))
        .collect();
    let values: Vec<f64> = values.into_iter().collect::<Result<Vec<_>>>()?;

    let f00 = values[0];
    let stencil = |o: usize, s: f64| -> HessianF {
        let (fp0, fm0, f0p, f0m) = (values[o], values[o + 1], values[o + 2], values[o + 3]);
        let (fpp, fpm, fmp, fmm) = (values[o + 4], values[o + 5], values[o + 6], values[o + 7]);
        HessianF {
            fpp: (fp0 - 2.0 * f00 + fm0) / (s * s),
            fqq: (f0p - 2.0 * f00 + f0m) / (s * s),
            fpq: (fpp - fpm - fmp + fmm) / (4.0 * s * s),
        }
    };
    Ok(richardson(stencil(1, h), stencil(9, 0.5 * h)))
}

/// Report of the degeneracy structure probes at one perturbation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegeneracyReport {
    /// `psi0(T) . delta_x(T) / |delta_x(T)|`, or zero when the state did
    /// not move at all.
    pub normalized_inner_product: f64,
    /// Norm of the horizon state variation.
    pub delta_x_norm: f64,
    /// Whether the perturbation direction lies in the span of the
    /// transverse adjoint components (the second and fourth).
    pub degenerate_direction: bool,
}

/// Perturbs the initial adjoint along a unit direction `e` by `eps`,
/// simulates, and reports the horizon state variation.
///
/// Expected structure: directions supported on the second and fourth
/// components move the state only orthogonally to the base adjoint at the
/// horizon (first-order optimality across the degenerate directions),
/// while all other basis directions leave the state on the base
/// trajectory entirely.
pub fn degeneracy_check(
    spec: &ProblemSpec,
    e: &[f64; 5],
    eps: f64,
    integ: IntegratorOptions,
    opts: &ControlSolverOptions,
) -> Result<DegeneracyReport> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidOptions(format!(
            "perturbation size must be positive and finite, got {eps}"
        )));
    }
    let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidOptions(format!(
            "perturbation direction must be a unit vector, |e| = {norm}"
        )));
    }
    let spec_owned = *spec;
    let t_end = spec_owned.horizon();
    let mut psi0 = base_adjoint(&spec_owned, 0.0)?;
    for (c, d) in psi0.iter_mut().zip(e.iter()) {
        *c += eps * d;
    }
    let y0 = FullState {
        x: [0.0; 5],
        psi: psi0,
    };
    let opts_owned = *opts;
    let mut prev_u: Option<f64> = None;
    let sol = integrate(
        &mut |t, y: &[f64; 10]| {
            let s = FullState::from_array(y);
            let u = optimal_control(t, &s.x, &s.psi, prev_u, &opts_owned)?;
            prev_u = Some(u);
            let dx = state_rhs(t, &s.x, u);
            let dpsi = adjoint_rhs(t, &s.x, &s.psi, u);
            let mut dy = [0.0; 10];
            dy[..5].copy_from_slice(&dx);
            dy[5..].copy_from_slice(&dpsi);
            Ok(dy)
        },
        y0.to_array(),
        0.0,
        t_end,
        integ,
    )?;
    let end = FullState::from_array(&sol.y);
    let base_end = base_state(t_end)?;
    let mut delta = [0.0; 5];
    for i in 0..5 {
        delta[i] = end.x[i] - base_end[i];
    }
    let delta_norm = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let psi_end = base_adjoint(&spec_owned, t_end)?;
    let ip = if delta_norm < 1e-14 {
        0.0
    } else {
        psi_end
            .iter()
            .zip(delta.iter())
            .map(|(a, b)| a * b)
            .sum::<f64>()
            / delta_norm
    };
    let degenerate = e[0].abs() < 1e-15 && e[2].abs() < 1e-15 && e[4].abs() < 1e-15;
    Ok(DegeneracyReport {
        normalized_inner_product: ip,
        delta_x_norm: delta_norm,
        degenerate_direction: degenerate,
    })
}

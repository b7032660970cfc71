//! Fixed-step explicit integrators: classical 4th-order Runge–Kutta and a
//! 4th-order Adams–Bashforth–Moulton predictor–corrector (PECE) with RK4
//! startup. Fixed steps keep scan evaluations deterministic and directly
//! comparable across parameters; the right-hand sides this library
//! integrates are smooth on admissible regions, so no adaptivity or
//! stiffness handling is needed.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Which integrator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Rk4,
    Abm4,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Rk4 => "rk4",
            Method::Abm4 => "abm4",
        })
    }
}

/// Integration options. `steps >= 1` for RK4 and `steps >= 4` for ABM4
/// (startup requirement). With `record_trajectory` the solution carries
/// every step point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub method: Method,
    pub steps: usize,
    pub record_trajectory: bool,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            method: Method::Rk4,
            steps: 20_000,
            record_trajectory: false,
        }
    }
}

impl IntegratorOptions {
    pub fn rk4(steps: usize) -> Self {
        IntegratorOptions {
            method: Method::Rk4,
            steps,
            record_trajectory: false,
        }
    }

    pub fn abm4(steps: usize) -> Self {
        IntegratorOptions {
            method: Method::Abm4,
            steps,
            record_trajectory: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let min = match self.method {
            Method::Rk4 => 1,
            Method::Abm4 => 4,
        };
        if self.steps < min {
            return Err(Error::InvalidOptions(format!(
                "{} requires at least {min} steps, got {}",
                self.method, self.steps
            )));
        }
        Ok(())
    }
}

/// Result of an integration: the terminal state and, when requested, the
/// full step-by-step trajectory including the initial point.
#[derive(Debug, Clone)]
pub struct Solution<const N: usize> {
    pub y: [f64; N],
    pub trajectory: Option<Vec<(f64, [f64; N])>>,
}

fn add_scaled<const N: usize>(y: &[f64; N], k: &[f64; N], s: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += s * k[i];
    }
    out
}

fn rk4_step<const N: usize, F>(rhs: &mut F, t: f64, h: f64, y: &[f64; N]) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let k1 = rhs(t, y)?;
    let k2 = rhs(t + 0.5 * h, &add_scaled(y, &k1, 0.5 * h))?;
    let k3 = rhs(t + 0.5 * h, &add_scaled(y, &k2, 0.5 * h))?;
    let k4 = rhs(t + h, &add_scaled(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

/// Integrates `y' = rhs(t, y)` from `t0` to `t1` with the requested method
/// and a fixed step `h = (t1 - t0)/steps`. Deterministic for fixed inputs.
/// Errors from `rhs` (which carry the offending time) abort the run.
pub fn integrate<const N: usize, F>(
    rhs: &mut F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    opts: IntegratorOptions,
) -> Result<Solution<N>>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    opts.validate()?;
    if t1 < t0 {
        return Err(Error::BadTimeSpan { t0, t1 });
    }
    let mut trajectory = opts.record_trajectory.then(|| {
        let mut v = Vec::with_capacity(opts.steps + 1);
        v.push((t0, y0));
        v
    });
    if t1 == t0 {
        return Ok(Solution { y: y0, trajectory });
    }

    let n = opts.steps;
    let h = (t1 - t0) / n as f64;
    // Step endpoints are computed as t0 + i*h (not accumulated) so the final
    // time lands on t1 up to one rounding.
    let time = |i: usize| t0 + h * i as f64;

    let mut y = y0;
    match opts.method {
        Method::Rk4 => {
            for i in 0..n {
                y = rk4_step(rhs, time(i), h, &y)?;
                if let Some(tr) = trajectory.as_mut() {
                    tr.push((time(i + 1), y));
                }
            }
        }
        Method::Abm4 => {
            // RK4 startup for the first three steps, keeping the f-history.
            let mut hist: [[f64; N]; 4] = [[0.0; N]; 4]; // f at i-3, i-2, i-1, i
            hist[0] = rhs(time(0), &y)?;
            let startup = 3.min(n);
            for i in 0..startup {
                y = rk4_step(rhs, time(i), h, &y)?;
                hist[i + 1] = rhs(time(i + 1), &y)?;
                if let Some(tr) = trajectory.as_mut() {
                    tr.push((time(i + 1), y));
                }
            }
            for i in startup..n {
                // Predictor (Adams–Bashforth, order 4).
                let (f0, f1, f2, f3) = (&hist[3], &hist[2], &hist[1], &hist[0]);
                let mut pred = y;
                for j in 0..N {
                    pred[j] += h / 24.0
                        * (55.0 * f0[j] - 59.0 * f1[j] + 37.0 * f2[j] - 9.0 * f3[j]);
                }
                // Single evaluate–correct pass (Adams–Moulton, order 4).
                let fp = rhs(time(i + 1), &pred)?;
                let mut next = y;
                for j in 0..N {
                    next[j] +=
                        h / 24.0 * (9.0 * fp[j] + 19.0 * f0[j] - 5.0 * f1[j] + 1.0 * f2[j]);
                }
                y = next;
                hist.rotate_left(1);
                hist[3] = rhs(time(i + 1), &y)?;
                if let Some(tr) = trajectory.as_mut() {
                    tr.push((time(i + 1), y));
                }
            }
        }
    }
    Ok(Solution { y, trajectory })
}

/// Empirical convergence order from three runs at `steps`, `2*steps`
/// and `4*steps`: `log2(|y_s - y_2s| / |y_2s - y_4s|)` in the Euclidean
/// norm. A 4th-order method on a smooth problem returns ~4.
pub fn order_estimate<const N: usize, F>(
    rhs: &mut F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    steps: usize,
    method: Method,
) -> Result<f64>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
{
    let run = |rhs: &mut F, s: usize| -> Result<[f64; N]> {
        Ok(integrate(
            rhs,
            y0,
            t0,
            t1,
            IntegratorOptions {
                method,
                steps: s,
                record_trajectory: false,
            },
        )?
        .y)
    };
    let a = run(rhs, steps)?;
    let b = run(rhs, steps * 2)?;
    let c = run(rhs, steps * 4)?;
    let d1: f64 = a
        .iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let d2: f64 = b
        .iter()
        .zip(c.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    Ok((d1 / d2).log2())
}

//! Problem definitions and the closed-form base trajectory.
//!
//! The library studies coefficient functionals on bounded univalent
//! functions through a controlled ODE system for the first coefficient
//! triples. This module holds:
//!
//! * the four extremal problems ([`VariantId`]) and their parameters
//!   ([`ProblemSpec`]),
//! * the controlled coefficient dynamics ([`state_rhs`]) and the adjoint
//!   (costate) dynamics ([`adjoint_rhs`]) of its Hamiltonian,
//! * the closed-form base trajectory generated by the constant control
//!   `u = pi` ([`base_state`]) together with the matching closed-form
//!   adjoint solutions per problem ([`base_adjoint`]),
//! * helpers for the extremal coefficient values ([`pick_coefficients`])
//!   and the cubic-in-`cos u` restriction of the Hamiltonian on the base
//!   trajectory ([`hamiltonian_cubic`]).
//!
//! State layout: `x = (x1..x5)` packs the real and imaginary parts of the
//! second through fourth coefficients as `a2 = x1 + i x2`,
//! `a3 = x3 + i x4`, `a4 = x5 + i·(unused)`; only the real part of the
//! fourth coefficient is tracked. On the base trajectory the imaginary
//! parts vanish identically.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Upper bound `M` on the modulus of the functions in the class, possibly
/// infinite. `M = ∞` selects the unbounded class; all `1/M` terms are then
/// exactly zero (no large-`M` approximation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    Infinite,
}

impl Bound {
    /// `1/M`, exactly `0.0` for the infinite bound.
    pub fn inv(self) -> f64 {
        match self {
            Bound::Finite(m) => 1.0 / m,
            Bound::Infinite => 0.0,
        }
    }

    /// Trajectory horizon `T`: `1 - 1/M` for finite `M`, `1` otherwise.
    pub fn horizon(self) -> f64 {
        1.0 - self.inv()
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    /// Validates `M >= 1` (finite) and rejects NaN/negative values.
    pub fn validate(self) -> Result<Self> {
        match self {
            Bound::Finite(m) if m.is_finite() && m >= 1.0 => Ok(self),
            Bound::Finite(m) => Err(Error::InvalidBound { m }),
            Bound::Infinite => Ok(self),
        }
    }

    /// Parses `"inf"` (case-insensitive) or a finite number.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") || t == "∞" {
            return Ok(Bound::Infinite);
        }
        match t.parse::<f64>() {
            Ok(v) if v.is_infinite() && v > 0.0 => Ok(Bound::Infinite),
            Ok(v) => Bound::Finite(v).validate(),
            Err(_) => Err(Error::InvalidParameter(format!(
                "cannot parse bound M from {s:?}"
            ))),
        }
    }
}

impl std::fmt::Display for Bound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Bound::Finite(m) => write!(f, "{m}"),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Finite(m) => s.serialize_f64(*m),
            Bound::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Bound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Bound::Finite(v)
                .validate()
                .map_err(|e| serde::de::Error::custom(e.to_string())),
            Raw::Str(s) => Bound::parse(&s).map_err(|e| serde::de::Error::custom(e.to_string())),
        }
    }
}

/// The four extremal problems the library solves.
///
/// * `LFunctional` — the two-parameter functional `Re(a2 + mu*a3 + nu*a4)`
///   on the class bounded by `M` (possibly infinite).
/// * `Sigma24` — `Re(a4 + nu*a2)` on the unbounded class.
/// * `Sigma34` — `Re(a4 + mu*a3)` on the unbounded class.
/// * `A4Bound` — `Re a4` on the class bounded by finite `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VariantId {
    LFunctional,
    Sigma24,
    Sigma34,
    A4Bound,
}

impl std::fmt::Display for VariantId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            VariantId::LFunctional => "l-functional",
            VariantId::Sigma24 => "sigma24",
            VariantId::Sigma34 => "sigma34",
            VariantId::A4Bound => "a4-bound",
        };
        f.write_str(s)
    }
}

/// A fully specified problem instance: which functional, its parameters,
/// the bound, and the integration horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub variant: VariantId,
    pub mu: f64,
    pub nu: f64,
    pub m: Bound,
    /// Horizon `T = 1 - 1/M` (finite `M`) or `1` (infinite). Kept alongside
    /// the bound so serialized records show it; always derived from `m`.
    pub t_horizon: f64,
}

impl ProblemSpec {
    fn new(variant: VariantId, mu: f64, nu: f64, m: Bound) -> Result<Self> {
        let m = m.validate()?;
        if !mu.is_finite() || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite parameters mu = {mu}, nu = {nu}"
            )));
        }
        Ok(ProblemSpec {
            variant,
            mu,
            nu,
            m,
            t_horizon: m.horizon(),
        })
    }

    /// `Re(a2 + mu*a3 + nu*a4)` on the class bounded by `m`.
    pub fn l_functional(mu: f64, nu: f64, m: Bound) -> Result<Self> {
        Self::new(VariantId::LFunctional, mu, nu, m)
    }

    /// `Re(a4 + nu*a2)` on the unbounded class.
    pub fn sigma24(nu: f64) -> Result<Self> {
        Self::new(VariantId::Sigma24, 0.0, nu, Bound::Infinite)
    }

    /// `Re(a4 + mu*a3)` on the unbounded class.
    pub fn sigma34(mu: f64) -> Result<Self> {
        Self::new(VariantId::Sigma34, mu, 0.0, Bound::Infinite)
    }

    /// `Re a4` on the class bounded by finite `m`.
    pub fn a4_bound(m: f64) -> Result<Self> {
        let b = Bound::Finite(m).validate()?;
        Self::new(VariantId::A4Bound, 0.0, 0.0, b)
    }

    /// Horizon `T` of the trajectory.
    pub fn horizon(&self) -> f64 {
        self.t_horizon
    }

    /// Objective weights `(w1, w3, w5)` applied to the endpoint values
    /// `(x1, x3, x5)` — i.e. to `Re a2`, `Re a3`, `Re a4`.
    pub fn objective_weights(&self) -> [f64; 3] {
        match self.variant {
            VariantId::LFunctional => [1.0, self.mu, self.nu],
            VariantId::Sigma24 => [self.nu, 0.0, 1.0],
            VariantId::Sigma34 => [0.0, self.mu, 1.0],
            VariantId::A4Bound => [0.0, 0.0, 1.0],
        }
    }

    /// Objective value for given endpoint coefficients.
    pub fn objective(&self, x: &[f64; 5]) -> f64 {
        let w = self.objective_weights();
        w[0] * x[0] + w[1] * x[2] + w[2] * x[4]
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let hi = self.horizon();
        // Tiny slack absorbs accumulated floating-point drift of integrator
        // step endpoints.
        if !((-1e-12)..=(hi + 1e-12)).contains(&t) {
            return Err(Error::TimeOutOfRange { t, lo: 0.0, hi });
        }
        Ok(())
    }
}

/// Closed-form base trajectory generated by the constant control `u = pi`:
/// `x1 = 2t`, `x3 = 5t^2 - 2t`, `x5 = 14t^3 - 12t^2 + 2t`, imaginary parts
/// zero. Defined for `t` in `[0, 1]`.
pub fn base_state(t: f64) -> Result<[f64; 5]> {
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return Err(Error::TimeOutOfRange { t, lo: 0.0, hi: 1.0 });
    }
    Ok([
        2.0 * t,
        0.0,
        5.0 * t * t - 2.0 * t,
        0.0,
        ((14.0 * t - 12.0) * t + 2.0) * t,
    ])
}

/// Closed-form adjoint (costate) solution along the base trajectory for the
/// given problem. Components 2 and 4 vanish on the base; at `t = T` the
/// vector equals the objective gradient (the transversality values).
pub fn base_adjoint(spec: &ProblemSpec, t: f64) -> Result<[f64; 5]> {
    spec.check_time(t)?;
    let im = spec.m.inv();
    let (p1, p3, p5) = match spec.variant {
        VariantId::LFunctional => {
            let (mu, nu) = (spec.mu, spec.nu);
            let s = t - 1.0 + im;
            (
                nu * s * s + (14.0 * nu * im - 8.0 * nu - 4.0 * mu) * s + 1.0,
                -4.0 * nu * s + mu,
                nu,
            )
        }
        VariantId::Sigma24 => {
            let nu = spec.nu;
            (t * t - 10.0 * t + 9.0 + nu, -4.0 * (t - 1.0), 1.0)
        }
        VariantId::Sigma34 => {
            let mu = spec.mu;
            (
                t * t - (10.0 + 4.0 * mu) * t + 9.0 + 4.0 * mu,
                -4.0 * (t - 1.0) + mu,
                1.0,
            )
        }
        VariantId::A4Bound => (
            t * t - (10.0 - 16.0 * im) * t + 9.0 - 24.0 * im + 15.0 * im * im,
            -4.0 * (t - 1.0 + im),
            1.0,
        ),
    };
    Ok([p1, 0.0, p3, 0.0, p5])
}

/// Extremal coefficient values `(p2, p3, p4)` of the bounded class: the
/// base-trajectory endpoints at `T = 1 - 1/M`. For the infinite bound these
/// are the unbounded extremal values `(2, 3, 4)`.
pub fn pick_coefficients(m: Bound) -> Result<(f64, f64, f64)> {
    let m = m.validate()?;
    let x = base_state(m.horizon())?;
    Ok((x[0], x[2], x[4]))
}

/// Coefficients of the Hamiltonian on the base trajectory as a cubic in
/// `y = cos u`: `H(t, y) = a3*y^3 + a2*y^2 + a1*y + a0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicHamiltonian {
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl CubicHamiltonian {
    pub fn eval(&self, y: f64) -> f64 {
        ((self.a3 * y + self.a2) * y + self.a1) * y + self.a0
    }

    /// `d/dy H(t, y)`.
    pub fn eval_dy(&self, y: f64) -> f64 {
        (3.0 * self.a3 * y + 2.0 * self.a2) * y + self.a1
    }

    /// Real critical points of the cubic (roots of the derivative),
    /// returned as `(count, roots)`; handles the degenerate quadratic and
    /// linear cases.
    pub fn critical_points(&self) -> (usize, [f64; 2]) {
        let a = 3.0 * self.a3;
        let b = 2.0 * self.a2;
        let c = self.a1;
        if a.abs() <= 1e-14 {
            if b.abs() <= 1e-14 {
                return (0, [0.0; 2]);
            }
            return (1, [-c / b, 0.0]);
        }
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return (0, [0.0; 2]);
        }
        let sq = disc.sqrt();
        // Numerically stable quadratic roots.
        let q = -0.5 * (b + b.signum() * sq);
        let (r1, r2) = if q == 0.0 {
            (0.0, 0.0)
        } else {
            (q / a, c / q)
        };
        (2, [r1, r2])
    }

    /// Second `u`-derivative of `H(t, cos u)` at `u = pi`; by the chain rule
    /// this equals `dH/dy` at `y = -1`, i.e. `3*a3 - 2*a2 + a1`.
    pub fn huu_at_pi(&self) -> f64 {
        3.0 * self.a3 - 2.0 * self.a2 + self.a1
    }
}

/// Expands the Hamiltonian on the base trajectory (imaginary components and
/// their adjoints all zero) into a cubic in `y = cos u`.
pub fn hamiltonian_cubic(spec: &ProblemSpec, t: f64) -> Result<CubicHamiltonian> {
    spec.check_time(t)?;
    let x = base_state(t)?;
    let psi = base_adjoint(spec, t)?;
    let (x1, x3) = (x[0], x[2]);
    let (p1, p3, p5) = (psi[0], psi[2], psi[4]);
    let s = t - 1.0;
    Ok(CubicHamiltonian {
        a3: -8.0 * s * s * p5,
        a2: 4.0 * s * p3 + 12.0 * s * x1 * p5,
        a1: -2.0 * p1 - 4.0 * x1 * p3 - (2.0 * (2.0 * x3 + x1 * x1) - 6.0 * s * s) * p5,
        a0: -2.0 * s * p3 - 6.0 * s * x1 * p5,
    })
}

/// `H_uu(t, pi)` along the base trajectory, from the cubic restriction.
pub fn huu_at_pi(spec: &ProblemSpec, t: f64) -> Result<f64> {
    Ok(hamiltonian_cubic(spec, t)?.huu_at_pi())
}

/// Right-hand side of the controlled coefficient system. Valid for any
/// state, not only the base trajectory.
pub fn state_rhs(t: f64, x: &[f64; 5], u: f64) -> [f64; 5] {
    let (cu, su) = (u.cos(), u.sin());
    let (c2, s2) = ((2.0 * u).cos(), (2.0 * u).sin());
    let c3 = (3.0 * u).cos();
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let s = t - 1.0;
    [
        -2.0 * cu,
        2.0 * su,
        -4.0 * (x1 * cu + x2 * su) + 2.0 * s * c2,
        4.0 * (x1 * su - x2 * cu) - 2.0 * s * s2,
        -2.0 * ((2.0 * x3 + x1 * x1 - x2 * x2) * cu + 2.0 * (x4 + x1 * x2) * su)
            + 6.0 * s * (x1 * c2 + x2 * s2)
            - 2.0 * s * s * c3,
    ]
}

/// Right-hand side of the adjoint (costate) system `psi' = -H_x`.
pub fn adjoint_rhs(t: f64, x: &[f64; 5], psi: &[f64; 5], u: f64) -> [f64; 5] {
    let (cu, su) = (u.cos(), u.sin());
    let (c2, s2) = ((2.0 * u).cos(), (2.0 * u).sin());
    let (x1, x2) = (x[0], x[1]);
    let (p3, p4, p5) = (psi[2], psi[3], psi[4]);
    let s = t - 1.0;
    [
        4.0 * cu * p3 - 4.0 * su * p4 + (4.0 * x1 * cu + 4.0 * x2 * su - 6.0 * s * c2) * p5,
        4.0 * su * p3 + 4.0 * cu * p4 - (4.0 * x2 * cu - 4.0 * x1 * su + 6.0 * s * s2) * p5,
        4.0 * cu * p5,
        4.0 * su * p5,
        0.0,
    ]
}

/// Hamiltonian `H(t, x, psi, u) = psi . state_rhs(t, x, u)`.
pub fn hamiltonian(t: f64, x: &[f64; 5], psi: &[f64; 5], u: f64) -> f64 {
    let g = state_rhs(t, x, u);
    psi.iter().zip(g.iter()).map(|(p, gi)| p * gi).sum()
}

/// Analytic `dH/du`.
pub fn hamiltonian_du(t: f64, x: &[f64; 5], psi: &[f64; 5], u: f64) -> f64 {
    let (cu, su) = (u.cos(), u.sin());
    let (c2, s2) = ((2.0 * u).cos(), (2.0 * u).sin());
    let s3 = (3.0 * u).sin();
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let s = t - 1.0;
    let p = 2.0 * x3 + x1 * x1 - x2 * x2;
    let q = x4 + x1 * x2;
    let dg = [
        2.0 * su,
        2.0 * cu,
        4.0 * (x1 * su - x2 * cu) - 4.0 * s * s2,
        4.0 * (x1 * cu + x2 * su) - 4.0 * s * c2,
        2.0 * p * su - 4.0 * q * cu - 12.0 * s * (x1 * s2 - x2 * c2) + 6.0 * s * s * s3,
    ];
    psi.iter().zip(dg.iter()).map(|(pi, gi)| pi * gi).sum()
}

/// Analytic `d2H/du2`.
pub fn hamiltonian_duu(t: f64, x: &[f64; 5], psi: &[f64; 5], u: f64) -> f64 {
    let (cu, su) = (u.cos(), u.sin());
    let (c2, s2) = ((2.0 * u).cos(), (2.0 * u).sin());
    let c3 = (3.0 * u).cos();
    let (x1, x2, x3, x4) = (x[0], x[1], x[2], x[3]);
    let s = t - 1.0;
    let p = 2.0 * x3 + x1 * x1 - x2 * x2;
    let q = x4 + x1 * x2;
    let ddg = [
        2.0 * cu,
        -2.0 * su,
        4.0 * (x1 * cu + x2 * su) - 8.0 * s * c2,
        -4.0 * (x1 * su - x2 * cu) + 8.0 * s * s2,
        2.0 * p * cu + 4.0 * q * su - 24.0 * s * (x1 * c2 + x2 * s2) + 18.0 * s * s * c3,
    ];
    psi.iter().zip(ddg.iter()).map(|(pi, gi)| pi * gi).sum()
}

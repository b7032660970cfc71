//! Numerical optimal-control toolkit for sharp coefficient constants of
//! bounded univalent functions.
//!
//! The library integrates the coefficient evolution of a slit mapping
//! driven by a single control, its adjoint system, and the second
//! variation of a family of coefficient functionals along the explicit
//! base trajectory whose endpoint realizes the classical extremal
//! coefficients. The sign pattern of the resulting Hessian decides
//! whether the extremal function is a strict local maximum of the
//! functional; the parameters at which that pattern degenerates are the
//! sharp constants this crate computes:
//!
//! * [`closed_form::sigma32`] — the third-vs-second coefficient constant,
//!   known in closed form,
//! * [`solver::Target::Sigma42`], [`solver::Target::Sigma24`],
//!   [`solver::Target::Sigma34`] — the remaining pairwise constants,
//!   located as roots of second-order conditions,
//! * [`solver::Target::M0`] — the threshold bound above which the
//!   fourth-coefficient extremal property holds.
//!
//! Modules:
//!
//! * [`problem`] — problem specs, base trajectory, adjoints, Hamiltonian;
//! * [`integrate`] — fixed-step Runge-Kutta and Adams-Bashforth-Moulton
//!   integrators;
//! * [`variational`] — the 15-component second-variation system and the
//!   Hessian of the objective;
//! * [`closed_form`] — the analytic solution on the axis where the system
//!   integrates in closed form;
//! * [`admissibility`] — verification that the base control maximizes the
//!   Hamiltonian, and boundary location;
//! * [`solver`] — scan/bracket/bisect root location for the constants;
//! * [`oracle`] — an independent full-system simulator with numerically
//!   maximized control, used to cross-check the variational results.

pub mod admissibility;
pub mod closed_form;
pub mod error;
pub mod integrate;
pub mod oracle;
pub mod problem;
pub mod solver;
pub mod variational;

pub use admissibility::{boundary_scan, check_admissible, AdmissibilityReport, ParamAxis};
pub use closed_form::{criterion, fpp_closed, sigma32, ClosedFormResult};
pub use error::{Error, Result};
pub use integrate::{integrate, order_estimate, IntegratorOptions, Method, Solution};
pub use oracle::{
    fd_hessian, degeneracy_check, optimal_control, simulate, ControlSolverOptions, FullState,
    DegeneracyReport, SimOutcome,
};
pub use problem::{
    base_adjoint, base_state, hamiltonian, hamiltonian_cubic, huu_at_pi, pick_coefficients,
    Bound, CubicHamiltonian, ProblemSpec, VariantId,
};
pub use solver::{
    eval_g, init_thread_pool, scan, solve, AttainedBy, RootScanConfig, ScanRow, SolverResult,
    Target,
};
pub use variational::{
    control_derivs, hessian_of_f, initial_var_state, integrate_variational, var_rhs,
    ControlDerivs, HessianF, VAR_DIM,
};

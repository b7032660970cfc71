//! Base trajectory, adjoints, extremal coefficients, and the Hamiltonian
//! cubic reduction.

mod common;
use common::assert_close;

use loewner_core::problem::{
    adjoint_rhs, base_adjoint, base_state, hamiltonian, hamiltonian_cubic, hamiltonian_du,
    hamiltonian_duu, huu_at_pi, pick_coefficients, state_rhs, Bound, ProblemSpec,
};
use std::f64::consts::PI;

fn l(mu: f64, nu: f64, m: Bound) -> ProblemSpec {
    ProblemSpec::l_functional(mu, nu, m).unwrap()
}

#[test]
fn base_state_midpoint_and_endpoints() {
    let x = base_state(0.5).unwrap();
    let want = [1.0, 0.0, 0.25, 0.0, -0.25];
    for i in 0..5 {
        assert_close(&format!("x[{i}](0.5)"), x[i], want[i], 1e-15);
    }
    assert_eq!(base_state(0.0).unwrap(), [0.0; 5]);
    let end = base_state(1.0).unwrap();
    for (i, w) in [2.0, 0.0, 3.0, 0.0, 4.0].iter().enumerate() {
        assert_close(&format!("x[{i}](1)"), end[i], *w, 1e-15);
    }
}

#[test]
fn base_state_rejects_out_of_range_times() {
    assert!(base_state(-0.1).is_err());
    assert!(base_state(1.1).is_err());
    // Tiny slack for integrator endpoint drift.
    assert!(base_state(1.0 + 1e-13).is_ok());
}

#[test]
fn base_state_satisfies_its_ode_under_the_base_control() {
    // d/dt of the closed forms: (2, 0, 10t-2, 0, 42t^2-24t+2).
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let x = base_state(t).unwrap();
        let dx = state_rhs(t, &x, PI);
        let want = [
            2.0,
            0.0,
            10.0 * t - 2.0,
            0.0,
            42.0 * t * t - 24.0 * t + 2.0,
        ];
        for k in 0..5 {
            assert_close(&format!("dx[{k}] at t={t}"), dx[k], want[k], 1e-12);
        }
    }
}

#[test]
fn extremal_coefficients_at_various_bounds() {
    let (p2, p3, p4) = pick_coefficients(Bound::Finite(1.0)).unwrap();
    assert_close("p2(M=1)", p2, 0.0, 1e-15);
    assert_close("p3(M=1)", p3, 0.0, 1e-15);
    assert_close("p4(M=1)", p4, 0.0, 1e-15);

    let (p2, p3, p4) = pick_coefficients(Bound::Infinite).unwrap();
    assert_close("p2(inf)", p2, 2.0, 1e-15);
    assert_close("p3(inf)", p3, 3.0, 1e-15);
    assert_close("p4(inf)", p4, 4.0, 1e-15);

    let (p2, p3, p4) = pick_coefficients(Bound::Finite(2.0)).unwrap();
    assert_close("p2(M=2)", p2, 1.0, 1e-15);
    assert_close("p3(M=2)", p3, 0.25, 1e-15);
    assert_close("p4(M=2)", p4, -0.25, 1e-15);

    assert!(pick_coefficients(Bound::Finite(0.5)).is_err());
}

#[test]
fn fourth_coefficient_adjoint_at_start() {
    let spec = ProblemSpec::a4_bound(25.0).unwrap();
    let psi = base_adjoint(&spec, 0.0).unwrap();
    assert_close("psi1", psi[0], 9.0 - 24.0 / 25.0 + 15.0 / 625.0, 1e-14);
    assert_close("psi2", psi[1], 0.0, 0.0);
    assert_close("psi3", psi[2], 4.0 * (1.0 - 1.0 / 25.0), 1e-14);
    assert_close("psi4", psi[3], 0.0, 0.0);
    assert_close("psi5", psi[4], 1.0, 0.0);
}

#[test]
fn adjoint_rejects_times_beyond_horizon() {
    let spec = ProblemSpec::a4_bound(25.0).unwrap();
    assert!(base_adjoint(&spec, 0.97).is_err()); // horizon is 0.96
    assert!(base_adjoint(&spec, 0.96).is_ok());
}

#[test]
fn adjoint_equals_objective_gradient_at_horizon() {
    // Transversality: psi(T) = (w1, 0, w3, 0, w5).
    let specs = [
        l(-0.3, 0.2, Bound::Infinite),
        l(0.1, -0.05, Bound::Finite(7.0)),
        ProblemSpec::sigma24(-0.4).unwrap(),
        ProblemSpec::sigma34(-0.6).unwrap(),
        ProblemSpec::a4_bound(13.0).unwrap(),
    ];
    for spec in &specs {
        let w = spec.objective_weights();
        let psi = base_adjoint(spec, spec.horizon()).unwrap();
        let want = [w[0], 0.0, w[1], 0.0, w[2]];
        for k in 0..5 {
            assert_close(
                &format!("{} psi[{k}](T)", spec.variant),
                psi[k],
                want[k],
                1e-12,
            );
        }
    }
}

#[test]
fn adjoint_satisfies_its_ode_under_the_base_control() {
    // Centered finite difference of the closed-form adjoint against the
    // adjoint equations evaluated on the base trajectory at u = pi.
    let specs = [
        l(-0.3, 0.2, Bound::Infinite),
        l(0.1, -0.05, Bound::Finite(7.0)),
        ProblemSpec::sigma24(-0.4).unwrap(),
        ProblemSpec::sigma34(-0.6).unwrap(),
        ProblemSpec::a4_bound(13.0).unwrap(),
    ];
    let h = 1e-5;
    for spec in &specs {
        let t_end = spec.horizon();
        for i in 1..10 {
            let t = t_end * i as f64 / 10.0;
            let x = base_state(t).unwrap();
            let psi = base_adjoint(spec, t).unwrap();
            let dpsi = adjoint_rhs(t, &x, &psi, PI);
            let plus = base_adjoint(spec, t + h).unwrap();
            let minus = base_adjoint(spec, t - h).unwrap();
            for k in 0..5 {
                let fd = (plus[k] - minus[k]) / (2.0 * h);
                assert_close(
                    &format!("{} dpsi[{k}] at t={t}", spec.variant),
                    dpsi[k],
                    fd,
                    1e-8,
                );
            }
        }
    }
}

#[test]
fn hamiltonian_cubic_matches_direct_hamiltonian_on_the_base() {
    let specs = [
        l(-0.3, 0.2, Bound::Infinite),
        l(0.1, -0.05, Bound::Finite(7.0)),
        ProblemSpec::sigma24(-0.4).unwrap(),
        ProblemSpec::sigma34(-0.6).unwrap(),
        ProblemSpec::a4_bound(13.0).unwrap(),
    ];
    for spec in &specs {
        let t_end = spec.horizon();
        for i in 0..=4 {
            let t = t_end * i as f64 / 4.0;
            let cubic = hamiltonian_cubic(spec, t).unwrap();
            let x = base_state(t).unwrap();
            let psi = base_adjoint(spec, t).unwrap();
            for k in 0..100 {
                let u = 2.0 * PI * k as f64 / 100.0;
                let direct = hamiltonian(t, &x, &psi, u);
                let via_cubic = cubic.eval(u.cos());
                assert_close(
                    &format!("{} H at t={t}, u={u}", spec.variant),
                    via_cubic,
                    direct,
                    1e-12,
                );
            }
        }
    }
}

#[test]
fn second_control_derivative_examples() {
    let s24 = ProblemSpec::sigma24(0.0).unwrap();
    assert_close("s24 huu(0)", huu_at_pi(&s24, 0.0).unwrap(), -4.0, 1e-14);

    let s34 = ProblemSpec::sigma34(0.0).unwrap();
    assert_close("s34 huu(0.5)", huu_at_pi(&s34, 0.5).unwrap(), -4.0, 1e-14);

    let origin = l(0.0, 0.0, Bound::Infinite);
    assert_close("origin huu(0)", huu_at_pi(&origin, 0.0).unwrap(), -2.0, 1e-14);
    assert_close(
        "origin huu(0.7)",
        huu_at_pi(&origin, 0.7).unwrap(),
        -2.0,
        1e-14,
    );
}

#[test]
fn cubic_curvature_agrees_with_direct_second_derivative_at_pi() {
    let specs = [
        l(-0.3, 0.2, Bound::Infinite),
        ProblemSpec::sigma24(-0.4).unwrap(),
        ProblemSpec::a4_bound(13.0).unwrap(),
    ];
    for spec in &specs {
        let t_end = spec.horizon();
        for i in 0..=8 {
            let t = t_end * i as f64 / 8.0;
            let x = base_state(t).unwrap();
            let psi = base_adjoint(spec, t).unwrap();
            assert_close(
                &format!("{} huu at t={t}", spec.variant),
                huu_at_pi(spec, t).unwrap(),
                hamiltonian_duu(t, &x, &psi, PI),
                1e-12,
            );
        }
    }
}

#[test]
fn analytic_control_derivatives_match_finite_differences_off_base() {
    // Generic (state, adjoint) pair exercising every term.
    let x = [0.7, -0.4, 1.3, 0.6, -2.1];
    let psi = [1.1, -0.8, 0.5, 1.7, -0.9];
    let t = 0.37;
    let h = 1e-5;
    for k in 0..24 {
        let u = 2.0 * PI * k as f64 / 24.0 + 0.05;
        let hu_fd = (hamiltonian(t, &x, &psi, u + h) - hamiltonian(t, &x, &psi, u - h)) / (2.0 * h);
        assert_close(
            &format!("H_u at u={u}"),
            hamiltonian_du(t, &x, &psi, u),
            hu_fd,
            1e-7,
        );
        let huu_fd = (hamiltonian_du(t, &x, &psi, u + h) - hamiltonian_du(t, &x, &psi, u - h))
            / (2.0 * h);
        assert_close(
            &format!("H_uu at u={u}"),
            hamiltonian_duu(t, &x, &psi, u),
            huu_fd,
            1e-7,
        );
    }
}

#[test]
fn bound_parsing_and_serialization() {
    assert_eq!(Bound::parse("inf").unwrap(), Bound::Infinite);
    assert_eq!(Bound::parse("Infinity").unwrap(), Bound::Infinite);
    assert_eq!(Bound::parse("∞").unwrap(), Bound::Infinite);
    assert_eq!(Bound::parse("25").unwrap(), Bound::Finite(25.0));
    assert_eq!(Bound::parse("2.5").unwrap(), Bound::Finite(2.5));
    assert!(Bound::parse("abc").is_err());

    let json = serde_json::to_string(&Bound::Infinite).unwrap();
    assert_eq!(json, "\"inf\"");
    let back: Bound = serde_json::from_str(&json).unwrap();
    assert_eq!(back, Bound::Infinite);

    let json = serde_json::to_string(&Bound::Finite(25.0)).unwrap();
    assert_eq!(json, "25.0");
    let back: Bound = serde_json::from_str(&json).unwrap();
    assert_eq!(back, Bound::Finite(25.0));
}

#[test]
fn spec_construction_validates_inputs() {
    assert!(ProblemSpec::l_functional(0.0, 0.0, Bound::Finite(0.9)).is_err());
    assert!(ProblemSpec::l_functional(f64::NAN, 0.0, Bound::Infinite).is_err());
    assert!(ProblemSpec::a4_bound(f64::INFINITY).is_err());
    let spec = ProblemSpec::a4_bound(25.0).unwrap();
    assert_close("horizon", spec.horizon(), 0.96, 1e-15);
    let unbounded = l(0.0, 0.0, Bound::Infinite);
    assert_close("horizon inf", unbounded.horizon(), 1.0, 0.0);
}

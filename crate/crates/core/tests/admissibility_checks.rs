//! Admissibility verification: the constant control must maximize the
//! Hamiltonian along the whole trajectory, with known margins and known
//! domain boundaries on each parameter axis.

mod common;
use common::assert_close;

use loewner_core::admissibility::{boundary_scan, check_admissible, ParamAxis};
use loewner_core::error::Error;
use loewner_core::problem::{Bound, ProblemSpec};

fn l(mu: f64, nu: f64) -> ProblemSpec {
    ProblemSpec::l_functional(mu, nu, Bound::Infinite).unwrap()
}

const GRID: usize = 2048;

#[test]
fn origin_is_admissible() {
    let report = check_admissible(&l(0.0, 0.0), GRID).unwrap();
    assert!(report.admissible);
    assert!(report.min_gap > 0.0);
    assert!(report.min_abs_huu > 0.0);
    assert_eq!(report.grid_n, GRID);
}

#[test]
fn margins_flip_sign_across_the_mu_boundary() {
    let inside = check_admissible(&l(-0.24, 0.0), GRID).unwrap();
    assert!(inside.admissible);
    assert_close("gap at mu=-0.24", inside.min_gap, 0.16, 1e-2);

    let outside = check_admissible(&l(-0.26, 0.0), GRID).unwrap();
    assert!(!outside.admissible);
    assert_close("gap at mu=-0.26", outside.min_gap, -0.16, 1e-2);
}

#[test]
fn margins_flip_sign_across_the_one_parameter_family_boundaries() {
    let s34_out = check_admissible(&ProblemSpec::sigma34(-0.9).unwrap(), GRID).unwrap();
    assert!(!s34_out.admissible);
    assert_close("s34 gap at -0.9", s34_out.min_gap, -0.1504, 1e-3);

    let s34_in = check_admissible(&ProblemSpec::sigma34(-0.8).unwrap(), GRID).unwrap();
    assert!(s34_in.admissible);
    assert_close("s34 gap at -0.8", s34_in.min_gap, 0.0168, 1e-3);

    let s24_in = check_admissible(&ProblemSpec::sigma24(-0.99).unwrap(), GRID).unwrap();
    assert!(s24_in.admissible);
    assert_close("s24 gap at -0.99", s24_in.min_gap, 0.00195, 5e-4);

    let s24_out = check_admissible(&ProblemSpec::sigma24(-1.01).unwrap(), GRID).unwrap();
    assert!(!s24_out.admissible);
    assert_close("s24 gap at -1.01", s24_out.min_gap, -0.01002, 5e-4);
}

#[test]
fn bound_family_is_admissible_above_its_threshold() {
    for m in [11.2, 15.0, 30.0, 300.0] {
        let report = check_admissible(&ProblemSpec::a4_bound(m).unwrap(), GRID).unwrap();
        assert!(report.admissible, "M = {m} should be admissible");
    }
    let below = check_admissible(&ProblemSpec::a4_bound(10.5).unwrap(), GRID).unwrap();
    assert!(!below.admissible, "M = 10.5 should not be admissible");
}

#[test]
fn exactly_critical_parameters_are_reported_indeterminate() {
    // At this parameter the curvature vanishes identically at the final
    // time, so no grid refinement can decide the verdict.
    let spec = l(0.0, -0.1);
    match check_admissible(&spec, 64) {
        Err(Error::IndeterminateAdmissibility { .. }) => {}
        other => panic!("expected indeterminate admissibility, got {other:?}"),
    }
}

#[test]
fn grid_must_have_at_least_two_intervals() {
    assert!(check_admissible(&l(0.0, 0.0), 1).is_err());
    assert!(check_admissible(&l(0.0, 0.0), 2).is_ok());
}

#[test]
fn boundary_locations_on_each_parameter_axis() {
    let tol = 1e-5;
    let mu_boundary = boundary_scan(&l(0.0, 0.0), ParamAxis::Mu, (-0.3, 0.0), tol, GRID).unwrap();
    assert_close("mu axis boundary", mu_boundary, -0.25, 1e-4);

    let nu_boundary = boundary_scan(&l(0.0, 0.0), ParamAxis::Nu, (-0.2, 0.0), tol, GRID).unwrap();
    assert_close("nu axis boundary", nu_boundary, -0.1, 1e-4);

    let s24 = ProblemSpec::sigma24(0.0).unwrap();
    let s24_boundary = boundary_scan(&s24, ParamAxis::Nu, (-1.2, -0.5), tol, GRID).unwrap();
    assert_close("fourth-vs-second boundary", s24_boundary, -1.0, 1e-4);

    let s34 = ProblemSpec::sigma34(0.0).unwrap();
    let s34_boundary = boundary_scan(&s34, ParamAxis::Mu, (-0.9, -0.5), tol, GRID).unwrap();
    assert_close(
        "fourth-vs-third boundary",
        s34_boundary,
        -2.0 * (std::f64::consts::SQRT_2 - 1.0),
        1e-4,
    );
}

#[test]
fn boundary_location_on_the_bound_axis() {
    let template = ProblemSpec::a4_bound(20.0).unwrap();
    let threshold =
        boundary_scan(&template, ParamAxis::BoundM, (10.5, 11.5), 1e-5, GRID).unwrap();
    assert_close("bound axis boundary", threshold, 11.0, 1e-3);
}

#[test]
fn boundary_scan_requires_disagreeing_endpoints() {
    let err = boundary_scan(&l(0.0, 0.0), ParamAxis::Nu, (-0.05, -0.01), 1e-5, GRID);
    assert!(err.is_err(), "both endpoints admissible must be an error");
    let err = boundary_scan(&l(0.0, 0.0), ParamAxis::Nu, (-0.9, -0.5), 1e-5, GRID);
    assert!(err.is_err(), "both endpoints inadmissible must be an error");
}

#[test]
fn worst_time_is_inside_the_horizon() {
    let report = check_admissible(&ProblemSpec::a4_bound(15.0).unwrap(), GRID).unwrap();
    let horizon = ProblemSpec::a4_bound(15.0).unwrap().horizon();
    assert!((0.0..=horizon).contains(&report.worst_t));
    assert_close("worst gap", report.min_gap, 0.2053373, 1e-4);
}

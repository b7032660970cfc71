#![allow(dead_code)]

/// Asserts `|got - want| <= tol` with a readable failure message.
pub fn assert_close(label: &str, got: f64, want: f64, tol: f64) {
    let err = (got - want).abs();
    assert!(
        err <= tol,
        "{label}: got {got:.15e}, want {want:.15e}, |err| = {err:.3e} > tol {tol:.1e}"
    );
}

/// Euclidean norm of the componentwise difference.
pub fn l2_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

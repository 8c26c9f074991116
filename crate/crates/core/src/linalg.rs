//! Small dense determinants for correlation functions.

use nalgebra::DMatrix;

/// Determinant by partially pivoted LU.
pub fn det(m: &DMatrix<f64>) -> f64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    if m.nrows() == 0 {
        return 1.0;
    }
    m.clone().lu().determinant()
}

/// Determinant of a correlation matrix: values smaller than `1e-14` times
/// the product of the diagonal magnitudes are reported as exactly 0, since
/// the true value is nonnegative and anything that small is rounding noise.
pub fn correlation_det(m: &DMatrix<f64>) -> f64 {
    let d = det(m);
    let scale: f64 = m.diagonal().iter().map(|v| v.abs()).product();
    if d.abs() < 1e-14 * scale {
        0.0
    } else {
        d
    }
}

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves the 2x2 system `m x = rhs` by Gaussian elimination with partial
/// pivoting. Fails with [`Error::SingularSystem`] when `|det m| <= det_tol`.
pub fn solve2<T: Real>(m: [[T; 2]; 2], rhs: [T; 2], det_tol: T) -> Result<[T; 2]> {
    let det = det2(m);
    if !(det.abs() > det_tol) {
        return Err(Error::SingularSystem(det.as_f64()));
    }
    let (mut m, mut rhs) = (m, rhs);
    if m[1][0].abs() > m[0][0].abs() {
        m.swap(0, 1);
        rhs.swap(0, 1);
    }
    let factor = m[1][0] / m[0][0];
    let m11 = m[1][1] - factor * m[0][1];
    let r1 = rhs[1] - factor * rhs[0];
    let x1 = r1 / m11;
    let x0 = (rhs[0] - m[0][1] * x1) / m[0][0];
    Ok([x0, x1])
}

pub fn det2<T: Real>(m: [[T; 2]; 2]) -> T {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

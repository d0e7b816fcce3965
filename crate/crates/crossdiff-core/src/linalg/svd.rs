//! Singular values by one-sided Jacobi orthogonalization.
//!
//! The routine rotates column pairs of a working copy until all columns are
//! mutually orthogonal; the singular values are then the column norms. For
//! the small matrices handled here this is simple, robust, and accurate
//! enough for rank decisions.

use alloc::vec::Vec;

use super::DMat;

/// Singular values of `a`, sorted descending.
pub fn singular_values(a: &DMat) -> Vec<f64> {
    let m = a.rows();
    let n = a.cols();
    let mut w = a.clone();
    if m == 0 || n == 0 {
        return Vec::new();
    }

    let eps = f64::EPSILON;
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..m {
                    let vp = w[(i, p)];
                    let vq = w[(i, q)];
                    app += vp * vp;
                    aqq += vq * vq;
                    apq += vp * vq;
                }
                if libm::fabs(apq) <= eps * libm::sqrt(app * aqq) {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + libm::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + libm::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / libm::sqrt(1.0 + t * t);
                let s = c * t;
                for i in 0..m {
                    let vp = w[(i, p)];
                    let vq = w[(i, q)];
                    w[(i, p)] = c * vp - s * vq;
                    w[(i, q)] = s * vp + c * vq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for i in 0..m {
                acc += w[(i, j)] * w[(i, j)];
            }
            libm::sqrt(acc)
        })
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Number of singular values strictly above `tol`.
pub fn rank(a: &DMat, tol: f64) -> usize {
    singular_values(a).into_iter().filter(|s| *s > tol).count()
}

/// Dimension of the numerical null space at threshold `tol`.
pub fn nullity(a: &DMat, tol: f64) -> usize {
    a.cols() - rank(a, tol)
}

//! Eigenvalue computation for small dense matrices.
//!
//! General real matrices go through balancing, Householder reduction to
//! Hessenberg form, and the Francis double-shift QR iteration in the
//! classic EISPACK `hqr` arrangement, eigenvalues only. Symmetric matrices
//! get the cyclic Jacobi method, which also serves as the positive
//! semidefiniteness test for Hermitian parts.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::DMat;

/// The QR iteration failed to deflate an eigenvalue within the iteration
/// budget, or the input contained non-finite entries.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EigenError {
    #[error("QR iteration did not converge")]
    NoConvergence,
    #[error("matrix contains non-finite entries")]
    NonFinite,
}

fn sign_of(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        libm::fabs(a)
    } else {
        -libm::fabs(a)
    }
}

/// Diagonal similarity scaling that roughly equalizes row and column norms.
/// Eigenvalues are unchanged; the QR iteration afterwards is more accurate.
fn balance(a: &mut DMat) {
    const RADIX: f64 = 2.0;
    let n = a.rows();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += libm::fabs(a[(j, i)]);
                    r += libm::fabs(a[(i, j)]);
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / RADIX;
                let mut f = 1.0;
                let s = c + r;
                let mut c_scaled = c;
                while c_scaled < g {
                    f *= RADIX;
                    c_scaled *= sqrdx;
                }
                g = r * RADIX;
                while c_scaled > g {
                    f /= RADIX;
                    c_scaled /= sqrdx;
                }
                if (c_scaled + r) / f < 0.95 * s {
                    done = false;
                    let ginv = 1.0 / f;
                    for j in 0..n {
                        a[(i, j)] *= ginv;
                    }
                    for j in 0..n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form, in place. Entries below
/// the first subdiagonal are zeroed explicitly afterwards.
fn hessenberg(a: &mut DMat) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    let high = n - 1;
    for m in 1..high {
        let mut scale = 0.0;
        for i in m..=high {
            scale += libm::fabs(a[(i, m - 1)]);
        }
        if scale == 0.0 {
            continue;
        }
        let mut h = 0.0;
        for i in (m..=high).rev() {
            ort[i] = a[(i, m - 1)] / scale;
            h += ort[i] * ort[i];
        }
        let mut g = libm::sqrt(h);
        if ort[m] > 0.0 {
            g = -g;
        }
        h -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let mut f = 0.0;
            for i in (m..=high).rev() {
                f += ort[i] * a[(i, j)];
            }
            f /= h;
            for i in m..=high {
                a[(i, j)] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let mut f = 0.0;
            for j in (m..=high).rev() {
                f += ort[j] * a[(i, j)];
            }
            f /= h;
            for j in m..=high {
                a[(i, j)] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        a[(m, m - 1)] = scale * g;
    }
    for i in 2..n {
        for j in 0..(i - 1) {
            a[(i, j)] = 0.0;
        }
    }
}

/// Francis double-shift QR iteration on an upper Hessenberg matrix.
/// Destroys the input and returns the eigenvalues in deflation order.
fn hqr(a: &mut DMat) -> Result<(Vec<f64>, Vec<f64>), EigenError> {
    let n = a.rows();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    if n == 0 {
        return Ok((wr, wi));
    }
    let eps = f64::EPSILON;

    let mut anorm = 0.0;
    for i in 0..n {
        let j0 = i.saturating_sub(1);
        for j in j0..n {
            anorm += libm::fabs(a[(i, j)]);
        }
    }
    if anorm == 0.0 {
        return Ok((wr, wi));
    }

    let mut nn = n - 1;
    let mut t = 0.0;
    'outer: loop {
        let mut its = 0usize;
        loop {
            let mut l = 0;
            let mut li = nn;
            while li >= 1 {
                let mut s = libm::fabs(a[(li - 1, li - 1)]) + libm::fabs(a[(li, li)]);
                if s == 0.0 {
                    s = anorm;
                }
                if libm::fabs(a[(li, li - 1)]) <= eps * s {
                    a[(li, li - 1)] = 0.0;
                    l = li;
                    break;
                }
                li -= 1;
            }
            let mut x = a[(nn, nn)];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                if nn == 0 {
                    break 'outer;
                }
                nn -= 1;
                break;
            }
            let mut y = a[(nn - 1, nn - 1)];
            let mut w = a[(nn, nn - 1)] * a[(nn - 1, nn)];
            if l + 1 == nn {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let mut z = libm::sqrt(libm::fabs(q));
                x += t;
                if q >= 0.0 {
                    z = p + sign_of(z, p);
                    wr[nn - 1] = x + z;
                    wr[nn] = wr[nn - 1];
                    if z != 0.0 {
                        wr[nn] = x - w / z;
                    }
                    wi[nn - 1] = 0.0;
                    wi[nn] = 0.0;
                } else {
                    wr[nn - 1] = x + p;
                    wr[nn] = x + p;
                    wi[nn] = z;
                    wi[nn - 1] = -z;
                }
                if nn <= 1 {
                    break 'outer;
                }
                nn -= 2;
                break;
            }

            if its == 60 {
                return Err(EigenError::NoConvergence);
            }
            if its > 0 && its.is_multiple_of(10) {
                t += x;
                for i in 0..=nn {
                    a[(i, i)] -= x;
                }
                let s = libm::fabs(a[(nn, nn - 1)]) + libm::fabs(a[(nn - 1, nn - 2)]);
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            let mut m = nn - 2;
            let mut p;
            let mut q;
            let mut r;
            loop {
                let z = a[(m, m)];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                q = a[(m + 1, m + 1)] - z - rr - ss;
                r = a[(m + 2, m + 1)];
                let s = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let u = libm::fabs(a[(m, m - 1)]) * (libm::fabs(q) + libm::fabs(r));
                let v = libm::fabs(p)
                    * (libm::fabs(a[(m - 1, m - 1)])
                        + libm::fabs(z)
                        + libm::fabs(a[(m + 1, m + 1)]));
                if u <= eps * v {
                    break;
                }
                m -= 1;
            }
            for i in (m + 2)..=nn {
                a[(i, i - 2)] = 0.0;
                if i != m + 2 {
                    a[(i, i - 3)] = 0.0;
                }
            }

            for k in m..nn {
                if k != m {
                    p = a[(k, k - 1)];
                    q = a[(k + 1, k - 1)];
                    r = if k != nn - 1 { a[(k + 2, k - 1)] } else { 0.0 };
                    x = libm::fabs(p) + libm::fabs(q) + libm::fabs(r);
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign_of(libm::sqrt(p * p + q * q + r * r), p);
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        a[(k, k - 1)] = -a[(k, k - 1)];
                    }
                } else {
                    a[(k, k - 1)] = -s * x;
                }
                p += s;
                x = p / s;
                let yy = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nn {
                    let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                    if k != nn - 1 {
                        pp += r * a[(k + 2, j)];
                        a[(k + 2, j)] -= pp * z;
                    }
                    a[(k + 1, j)] -= pp * yy;
                    a[(k, j)] -= pp * x;
                }
                let mmin = if nn < k + 3 { nn } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = x * a[(i, k)] + yy * a[(i, k + 1)];
                    if k != nn - 1 {
                        pp += z * a[(i, k + 2)];
                        a[(i, k + 2)] -= pp * r;
                    }
                    a[(i, k + 1)] -= pp * q;
                    a[(i, k)] -= pp;
                }
            }
        }
    }

    Ok((wr, wi))
}

/// Eigenvalues of a general square real matrix, sorted by real part and then
/// imaginary part. Complex eigenvalues appear in conjugate pairs.
pub fn eigenvalues(a: &DMat) -> Result<Vec<Complex64>, EigenError> {
    assert!(a.is_square(), "eigenvalues need a square matrix");
    if !a.is_finite() {
        return Err(EigenError::NonFinite);
    }
    let n = a.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![Complex64::new(a[(0, 0)], 0.0)]);
    }
    let mut work = a.clone();
    balance(&mut work);
    hessenberg(&mut work);
    let (wr, wi) = hqr(&mut work)?;
    let mut out: Vec<Complex64> = wr
        .into_iter()
        .zip(wi)
        .map(|(re, im)| Complex64::new(re, im))
        .collect();
    out.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.partial_cmp(&b.im).unwrap())
    });
    Ok(out)
}

/// Eigenvalues of a symmetric matrix by the cyclic Jacobi method, sorted
/// ascending. Only the lower triangle needs to agree with the upper one;
/// the routine symmetrizes internally.
pub fn symmetric_eigenvalues(a: &DMat) -> Vec<f64> {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.symmetric_part();
    if n <= 1 {
        return if n == 1 { vec![m[(0, 0)]] } else { Vec::new() };
    }

    let fro = m.norm_fro();
    let tol = f64::EPSILON * if fro > 0.0 { fro } else { 1.0 };
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)] * m[(p, q)];
            }
        }
        if libm::sqrt(2.0 * off) <= tol {
            break;
        }
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if libm::fabs(apq) <= 1e-3 * tol {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if libm::fabs(theta) > 1e15 {
                    1.0 / (2.0 * theta)
                } else {
                    let sgn = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sgn / (libm::fabs(theta) + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;

                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    eigs
}

/// Smallest eigenvalue of the symmetric part of `a`. Nonnegative up to
/// roundoff exactly when the Hermitian part is positive semidefinite.
pub fn min_symmetric_eigenvalue(a: &DMat) -> f64 {
    let eigs = symmetric_eigenvalues(&a.symmetric_part());
    eigs.first().copied().unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::lu::Lu;
    use approx::assert_abs_diff_eq;

    fn sorted_re(eigs: &[Complex64]) -> Vec<f64> {
        let mut v: Vec<f64> = eigs.iter().map(|z| z.re).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    #[test]
    fn symmetric_two_by_two() {
        let a = DMat::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eigs = eigenvalues(&a).unwrap();
        let re = sorted_re(&eigs);
        assert_abs_diff_eq!(re[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(re[1], 3.0, epsilon = 1e-13);
        assert!(eigs.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn rotation_generator_has_imaginary_pair() {
        let a = DMat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let eigs = eigenvalues(&a).unwrap();
        assert_abs_diff_eq!(eigs[0].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eigs[1].re, 0.0, epsilon = 1e-14);
        let mut ims: Vec<f64> = eigs.iter().map(|z| z.im).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_abs_diff_eq!(ims[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ims[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn companion_matrix_of_cubic() {
        let a = DMat::from_rows(&[&[6.0, -11.0, 6.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let eigs = eigenvalues(&a).unwrap();
        let re = sorted_re(&eigs);
        assert_abs_diff_eq!(re[0], 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(re[1], 2.0, epsilon = 1e-10);
        assert_abs_diff_eq!(re[2], 3.0, epsilon = 1e-10);
    }

    #[test]
    fn defective_jordan_block() {
        let a = DMat::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        let eigs = eigenvalues(&a).unwrap();
        for z in &eigs {
            assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-7);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn trace_and_determinant_identities_hold() {
        let a = DMat::from_rows(&[
            &[0.3, -1.2, 0.7, 2.0, 0.1],
            &[1.5, 0.4, -0.6, 0.2, -1.1],
            &[-0.8, 0.9, 1.7, -0.3, 0.5],
            &[0.2, -0.5, 1.1, -0.9, 1.3],
            &[1.0, 0.6, -0.4, 0.8, 0.2],
        ]);
        let eigs = eigenvalues(&a).unwrap();
        let sum: Complex64 = eigs.iter().sum();
        let mut trace = 0.0;
        for i in 0..5 {
            trace += a[(i, i)];
        }
        assert_abs_diff_eq!(sum.re, trace, epsilon = 1e-10);
        assert_abs_diff_eq!(sum.im, 0.0, epsilon = 1e-10);

        let prod = eigs.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc * z);
        let det = Lu::factor(&a).unwrap().det();
        assert_abs_diff_eq!(prod.re, det, epsilon = 1e-9);
        assert_abs_diff_eq!(prod.im, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn jacobi_recovers_known_spectrum() {
        let a = DMat::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let eigs = symmetric_eigenvalues(&a);
        assert_abs_diff_eq!(eigs[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eigs[1], 3.0, epsilon = 1e-13);
    }

    #[test]
    fn jacobi_on_diagonal_matrix_is_exact() {
        let a = DMat::from_rows(&[&[3.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 7.0]]);
        let eigs = symmetric_eigenvalues(&a);
        assert_eq!(eigs, alloc::vec![-1.0, 3.0, 7.0]);
    }

    #[test]
    fn min_symmetric_eigenvalue_flags_indefinite_part() {
        let a = DMat::from_rows(&[&[1.0, 4.0], &[0.0, 1.0]]);
        let lo = min_symmetric_eigenvalue(&a);
        assert_abs_diff_eq!(lo, -1.0, epsilon = 1e-13);
        let j = DMat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert_abs_diff_eq!(min_symmetric_eigenvalue(&j), 0.0, epsilon = 1e-15);
    }
}

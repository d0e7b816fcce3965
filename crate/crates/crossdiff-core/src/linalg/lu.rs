//! LU factorization with partial pivoting, in real and complex arithmetic.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::DMat;

/// LU factorization of a square real matrix, `P A = L U`.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    /// Factors `a`. Returns `None` when a pivot is exactly zero, which means
    /// the matrix is singular to working precision.
    pub fn factor(a: &DMat) -> Option<Lu> {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows();
        let mut lu = a.as_slice().to_vec();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;

        for k in 0..n {
            let mut p = k;
            let mut best = libm::fabs(lu[k * n + k]);
            for i in (k + 1)..n {
                let v = libm::fabs(lu[i * n + k]);
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in (k + 1)..n {
                    lu[i * n + j] -= m * lu[k * n + j];
                }
            }
        }

        Some(Lu { n, lu, piv, sign })
    }

    /// Solves `A x = b` in place.
    pub fn solve_vec(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[i] = b[self.piv[i]];
        }
        for i in 1..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }

    /// Solves `A X = B` column by column.
    pub fn solve_mat(&self, b: &DMat) -> DMat {
        assert_eq!(b.rows(), self.n);
        let mut out = DMat::zeros(self.n, b.cols());
        let mut col = vec![0.0; self.n];
        for j in 0..b.cols() {
            for i in 0..self.n {
                col[i] = b[(i, j)];
            }
            self.solve_vec(&mut col);
            for i in 0..self.n {
                out[(i, j)] = col[i];
            }
        }
        out
    }

    /// Determinant of the factored matrix.
    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }
}

/// LU factorization of a square complex matrix.
pub struct CLu {
    n: usize,
    lu: Vec<Complex64>,
    piv: Vec<usize>,
}

impl CLu {
    /// Factors `a`, given as row-major complex entries of an `n` by `n`
    /// matrix. Returns `None` on an exactly zero pivot.
    pub fn factor(n: usize, a: &[Complex64]) -> Option<CLu> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut piv: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut p = k;
            let mut best = lu[k * n + k].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[i * n + k].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in (k + 1)..n {
                    let sub = m * lu[k * n + j];
                    lu[i * n + j] -= sub;
                }
            }
        }

        Some(CLu { n, lu, piv })
    }

    /// Solves `A x = b` in place.
    pub fn solve_vec(&self, b: &mut [Complex64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            x[i] = b[self.piv[i]];
        }
        for i in 1..n {
            for j in 0..i {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
        }
        for i in (0..n).rev() {
            for j in (i + 1)..n {
                let sub = self.lu[i * n + j] * x[j];
                x[i] -= sub;
            }
            x[i] /= self.lu[i * n + i];
        }
        b.copy_from_slice(&x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::vec_norm;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solves_three_by_three_system() {
        let a = DMat::from_rows(&[&[2.0, 1.0, 1.0], &[4.0, -6.0, 0.0], &[-2.0, 7.0, 2.0]]);
        let f = Lu::factor(&a).unwrap();
        let mut b = [5.0, -2.0, 9.0];
        f.solve_vec(&mut b);
        let mut check = [0.0; 3];
        a.matvec(&b, &mut check);
        assert_abs_diff_eq!(check[0], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(check[1], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(check[2], 9.0, epsilon = 1e-12);
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = DMat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        assert_abs_diff_eq!(Lu::factor(&a).unwrap().det(), -2.0, epsilon = 1e-14);
        let b = DMat::from_rows(&[&[2.0, 0.0, 1.0], &[1.0, 3.0, 2.0], &[1.0, 1.0, 4.0]]);
        assert_abs_diff_eq!(Lu::factor(&b).unwrap().det(), 18.0, epsilon = 1e-13);
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = DMat::from_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(Lu::factor(&a).is_none());
    }

    #[test]
    fn solve_mat_inverts_identity() {
        let a = DMat::from_rows(&[&[3.0, 1.0], &[1.0, 2.0]]);
        let f = Lu::factor(&a).unwrap();
        let inv = f.solve_mat(&DMat::identity(2));
        let prod = a.matmul(&inv);
        let err = (&prod - &DMat::identity(2)).max_abs();
        assert!(err < 1e-14);
    }

    #[test]
    fn complex_solve_recovers_known_solution() {
        let i = Complex64::new(0.0, 1.0);
        let one = Complex64::new(1.0, 0.0);
        let a = [one + i, one, Complex64::new(0.0, 0.0), one - i];
        let f = CLu::factor(2, &a).unwrap();
        let x_true = [Complex64::new(2.0, -1.0), Complex64::new(0.5, 3.0)];
        let mut b = [
            a[0] * x_true[0] + a[1] * x_true[1],
            a[2] * x_true[0] + a[3] * x_true[1],
        ];
        f.solve_vec(&mut b);
        let err = [(b[0] - x_true[0]).norm(), (b[1] - x_true[1]).norm()];
        assert!(vec_norm(&err) < 1e-13);
    }
}

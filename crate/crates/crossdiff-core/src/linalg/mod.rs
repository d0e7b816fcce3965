//! Dense linear algebra kernels for small matrices.
//!
//! Everything here operates on heap-allocated row-major storage and is
//! written for the matrix sizes that show up in coupled reaction-diffusion
//! work: diffusion matrices of dimension two to a few dozen, and modal
//! propagators derived from them. Clarity and reproducibility win over
//! blocking or vectorization tricks at these sizes.

pub mod eigen;
pub mod expm;
pub mod gmres;
pub mod lu;
pub mod svd;

use alloc::vec;
use alloc::vec::Vec;

/// Dense real matrix with row-major storage.
#[derive(Clone, Debug, PartialEq)]
pub struct DMat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DMat {
    /// Matrix of the given shape filled with zeros.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DMat {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from row-major data. Panics if the length does not
    /// match the shape.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(
            data.len(),
            rows * cols,
            "row-major data length must equal rows * cols"
        );
        DMat { rows, cols, data }
    }

    /// Builds a square matrix from a slice of equally long rows.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "all rows must have the same length");
            data.extend_from_slice(row);
        }
        DMat {
            rows: r,
            cols: c,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Borrow of the underlying row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Mutable borrow of the underlying row-major storage.
    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Borrow of row `r` as a contiguous slice.
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Matrix-vector product `y = A x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.cols);
        assert_eq!(y.len(), self.rows);
        for (r, yr) in y.iter_mut().enumerate() {
            let row = self.row(r);
            let mut acc = 0.0;
            for (a, b) in row.iter().zip(x.iter()) {
                acc += a * b;
            }
            *yr = acc;
        }
    }

    /// Matrix product `A B`.
    pub fn matmul(&self, other: &DMat) -> DMat {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = DMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                if aik == 0.0 {
                    continue;
                }
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                let orow = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, b) in orow.iter_mut().zip(brow.iter()) {
                    *o += aik * b;
                }
            }
        }
        out
    }

    /// Transposed copy.
    pub fn transpose(&self) -> DMat {
        let mut out = DMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Scales every entry in place.
    pub fn scale_mut(&mut self, s: f64) {
        for v in &mut self.data {
            *v *= s;
        }
    }

    /// Scaled copy `s A`.
    pub fn scaled(&self, s: f64) -> DMat {
        let mut out = self.clone();
        out.scale_mut(s);
        out
    }

    /// Adds `s B` into `self`.
    pub fn axpy(&mut self, s: f64, other: &DMat) {
        assert_eq!(self.rows, other.rows);
        assert_eq!(self.cols, other.cols);
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += s * b;
        }
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        let mut acc = 0.0;
        for v in &self.data {
            acc += v * v;
        }
        libm::sqrt(acc)
    }

    /// Induced one-norm, the maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut best = 0.0f64;
        for j in 0..self.cols {
            let mut s = 0.0;
            for i in 0..self.rows {
                s += libm::fabs(self.data[i * self.cols + j]);
            }
            best = best.max(s);
        }
        best
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for v in &self.data {
            best = best.max(libm::fabs(*v));
        }
        best
    }

    /// True when every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| *v == 0.0)
    }

    /// True when every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Copy of the `nr` by `nc` submatrix with upper-left corner `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> DMat {
        assert!(r0 + nr <= self.rows && c0 + nc <= self.cols);
        let mut out = DMat::zeros(nr, nc);
        for i in 0..nr {
            for j in 0..nc {
                out.data[i * nc + j] = self.data[(r0 + i) * self.cols + (c0 + j)];
            }
        }
        out
    }

    /// Symmetric part `(A + Aᵀ) / 2`.
    pub fn symmetric_part(&self) -> DMat {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = DMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = 0.5 * (self.data[i * n + j] + self.data[j * n + i]);
            }
        }
        out
    }

    /// Commutator `A B - B A`.
    pub fn commutator(&self, other: &DMat) -> DMat {
        let mut ab = self.matmul(other);
        let ba = other.matmul(self);
        ab.axpy(-1.0, &ba);
        ab
    }
}

impl core::ops::Index<(usize, usize)> for DMat {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl core::ops::IndexMut<(usize, usize)> for DMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

impl core::ops::Add<&DMat> for &DMat {
    type Output = DMat;

    fn add(self, other: &DMat) -> DMat {
        let mut out = self.clone();
        out.axpy(1.0, other);
        out
    }
}

impl core::ops::Sub<&DMat> for &DMat {
    type Output = DMat;

    fn sub(self, other: &DMat) -> DMat {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }
}

impl core::ops::Mul<&DMat> for &DMat {
    type Output = DMat;

    fn mul(self, other: &DMat) -> DMat {
        self.matmul(other)
    }
}

/// Euclidean norm of a vector.
pub fn vec_norm(x: &[f64]) -> f64 {
    let mut acc = 0.0;
    for v in x {
        acc += v * v;
    }
    libm::sqrt(acc)
}

/// Dot product of two vectors of equal length.
pub fn vec_dot(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let mut acc = 0.0;
    for (a, b) in x.iter().zip(y.iter()) {
        acc += a * b;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn matmul_against_hand_product() {
        let a = DMat::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let b = DMat::from_rows(&[&[5.0, 6.0], &[7.0, 8.0]]);
        let c = a.matmul(&b);
        assert_eq!(c.as_slice(), &[19.0, 22.0, 43.0, 50.0]);
    }

    #[test]
    fn matvec_matches_matmul() {
        let a = DMat::from_rows(&[&[2.0, -1.0, 0.5], &[0.0, 3.0, 1.0], &[1.0, 1.0, 1.0]]);
        let x = [1.0, 2.0, 3.0];
        let mut y = [0.0; 3];
        a.matvec(&x, &mut y);
        assert_eq!(y, [1.5, 9.0, 6.0]);
    }

    #[test]
    fn norms_on_known_matrix() {
        let a = DMat::from_rows(&[&[3.0, -4.0], &[0.0, 0.0]]);
        assert_abs_diff_eq!(a.norm_fro(), 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.norm_one(), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(a.max_abs(), 4.0, epsilon = 1e-15);
    }

    #[test]
    fn transpose_is_involutive() {
        let a = DMat::from_rows(&[&[1.0, 2.0, 3.0], &[4.0, 5.0, 6.0]]);
        assert_eq!(a.transpose().transpose(), a);
    }

    #[test]
    fn commutator_of_commuting_matrices_vanishes() {
        let a = DMat::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        let b = DMat::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(a.commutator(&b).max_abs() < 1e-15);
    }

    #[test]
    fn symmetric_part_of_rotation_generator_is_zero() {
        let j = DMat::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        assert!(j.symmetric_part().max_abs() == 0.0);
    }

    #[test]
    fn block_extracts_quadrant() {
        let a = DMat::from_rows(&[
            &[1.0, 2.0, 3.0, 4.0],
            &[5.0, 6.0, 7.0, 8.0],
            &[9.0, 10.0, 11.0, 12.0],
            &[13.0, 14.0, 15.0, 16.0],
        ]);
        let q = a.block(2, 0, 2, 2);
        assert_eq!(q.as_slice(), &[9.0, 10.0, 13.0, 14.0]);
    }
}

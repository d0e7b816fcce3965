//! Matrix exponential by Padé approximation with scaling and squaring.
//!
//! The driver picks the lowest-degree diagonal Padé approximant whose
//! backward-error bound covers the one-norm of the input, scaling by a
//! power of two first when even the degree-13 bound is exceeded. The
//! degree thresholds and coefficient tables are the standard double
//! precision ones.
//!
//! A separate eigenvector-basis path serves callers that exponentiate many
//! scalar multiples of one fixed matrix. It refuses matrices that are
//! defective, nearly defective, or badly conditioned in their eigenbasis,
//! so the Padé driver remains the general-purpose route.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use super::eigen::eigenvalues;
use super::lu::{CLu, Lu};
use super::DMat;

const THETA_3: f64 = 1.495585217958292e-2;
const THETA_5: f64 = 2.53939833006323e-1;
const THETA_7: f64 = 9.504178996162932e-1;
const THETA_9: f64 = 2.097847961257068e0;
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

fn pade_3(a: &DMat, a2: &DMat) -> (DMat, DMat) {
    let n = a.rows();
    let ident = DMat::identity(n);
    let mut u = a2.scaled(B3[3]);
    u.axpy(B3[1], &ident);
    let u = a.matmul(&u);
    let mut v = a2.scaled(B3[2]);
    v.axpy(B3[0], &ident);
    (u, v)
}

fn pade_5(a: &DMat, a2: &DMat, a4: &DMat) -> (DMat, DMat) {
    let n = a.rows();
    let ident = DMat::identity(n);
    let mut u = a4.scaled(B5[5]);
    u.axpy(B5[3], a2);
    u.axpy(B5[1], &ident);
    let u = a.matmul(&u);
    let mut v = a4.scaled(B5[4]);
    v.axpy(B5[2], a2);
    v.axpy(B5[0], &ident);
    (u, v)
}

fn pade_7(a: &DMat, a2: &DMat, a4: &DMat, a6: &DMat) -> (DMat, DMat) {
    let n = a.rows();
    let ident = DMat::identity(n);
    let mut u = a6.scaled(B7[7]);
    u.axpy(B7[5], a4);
    u.axpy(B7[3], a2);
    u.axpy(B7[1], &ident);
    let u = a.matmul(&u);
    let mut v = a6.scaled(B7[6]);
    v.axpy(B7[4], a4);
    v.axpy(B7[2], a2);
    v.axpy(B7[0], &ident);
    (u, v)
}

fn pade_9(a: &DMat, a2: &DMat, a4: &DMat, a6: &DMat) -> (DMat, DMat) {
    let n = a.rows();
    let ident = DMat::identity(n);
    let a8 = a4.matmul(a4);
    let mut u = a8.scaled(B9[9]);
    u.axpy(B9[7], a6);
    u.axpy(B9[5], a4);
    u.axpy(B9[3], a2);
    u.axpy(B9[1], &ident);
    let u = a.matmul(&u);
    let mut v = a8.scaled(B9[8]);
    v.axpy(B9[6], a6);
    v.axpy(B9[4], a4);
    v.axpy(B9[2], a2);
    v.axpy(B9[0], &ident);
    (u, v)
}

fn pade_13(a: &DMat, a2: &DMat, a4: &DMat, a6: &DMat) -> (DMat, DMat) {
    let n = a.rows();
    let ident = DMat::identity(n);

    let mut u_hi = a6.scaled(B13[13]);
    u_hi.axpy(B13[11], a4);
    u_hi.axpy(B13[9], a2);
    let mut u = a6.matmul(&u_hi);
    u.axpy(B13[7], a6);
    u.axpy(B13[5], a4);
    u.axpy(B13[3], a2);
    u.axpy(B13[1], &ident);
    let u = a.matmul(&u);

    let mut v_hi = a6.scaled(B13[12]);
    v_hi.axpy(B13[10], a4);
    v_hi.axpy(B13[8], a2);
    let mut v = a6.matmul(&v_hi);
    v.axpy(B13[6], a6);
    v.axpy(B13[4], a4);
    v.axpy(B13[2], a2);
    v.axpy(B13[0], &ident);
    (u, v)
}

fn pade_solve(u: DMat, v: DMat) -> DMat {
    let num = &v + &u;
    let den = &v - &u;
    let f = Lu::factor(&den).expect("Pade denominator is singular; input must be finite");
    f.solve_mat(&num)
}

/// Matrix exponential of a square real matrix with finite entries.
pub fn expm(a: &DMat) -> DMat {
    assert!(a.is_square(), "expm needs a square matrix");
    assert!(a.is_finite(), "expm needs finite entries");
    let n = a.rows();
    if n == 0 {
        return DMat::zeros(0, 0);
    }
    if n == 1 {
        let mut out = DMat::zeros(1, 1);
        out[(0, 0)] = libm::exp(a[(0, 0)]);
        return out;
    }

    let norm = a.norm_one();
    if norm <= THETA_9 {
        let a2 = a.matmul(a);
        if norm <= THETA_3 {
            let (u, v) = pade_3(a, &a2);
            return pade_solve(u, v);
        }
        let a4 = a2.matmul(&a2);
        if norm <= THETA_5 {
            let (u, v) = pade_5(a, &a2, &a4);
            return pade_solve(u, v);
        }
        let a6 = a4.matmul(&a2);
        if norm <= THETA_7 {
            let (u, v) = pade_7(a, &a2, &a4, &a6);
            return pade_solve(u, v);
        }
        let (u, v) = pade_9(a, &a2, &a4, &a6);
        return pade_solve(u, v);
    }

    let mut squarings = 0i32;
    let mut work = a.clone();
    if norm > THETA_13 {
        squarings = libm::ceil(libm::log2(norm / THETA_13)) as i32;
        let factor = libm::exp2(-f64::from(squarings));
        work.scale_mut(factor);
    }
    let a2 = work.matmul(&work);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let (u, v) = pade_13(&work, &a2, &a4, &a6);
    let mut x = pade_solve(u, v);
    for _ in 0..squarings {
        x = x.matmul(&x);
    }
    x
}

/// Eigenvector basis of a real matrix with complex arithmetic throughout,
/// for repeated exponentiation of scalar multiples of the same matrix.
pub struct EigenBasis {
    n: usize,
    values: Vec<Complex64>,
    vectors: Vec<Complex64>,
    inverse: Vec<Complex64>,
    cond: f64,
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9e3779b97f4a7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
}

impl EigenBasis {
    /// Attempts the factorization `A = V diag(w) V^-1`. Returns `None` when
    /// the eigenvalues are too close to separate reliably, when an
    /// eigenvector residual fails verification, or when the basis condition
    /// estimate exceeds `cond_limit`.
    pub fn try_new(a: &DMat, cond_limit: f64) -> Option<EigenBasis> {
        assert!(a.is_square());
        let n = a.rows();
        if n == 0 {
            return None;
        }
        let values = eigenvalues(a).ok()?;
        let scale = a.norm_fro().max(1.0);

        let mut min_sep = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                min_sep = min_sep.min((values[i] - values[j]).norm());
            }
        }
        if n > 1 && min_sep < 1e-8 * scale {
            return None;
        }

        let ac: Vec<Complex64> = a
            .as_slice()
            .iter()
            .map(|v| Complex64::new(*v, 0.0))
            .collect();
        let mut vectors = vec![Complex64::new(0.0, 0.0); n * n];
        let mut rng_state = 0x1234_5678_9abc_def0u64;

        for (col, lambda) in values.iter().enumerate() {
            let shift = lambda + Complex64::new(1e-10 * scale, 1e-10 * scale);
            let mut shifted = ac.clone();
            for i in 0..n {
                shifted[i * n + i] -= shift;
            }
            let f = CLu::factor(n, &shifted)?;
            let mut x: Vec<Complex64> = (0..n)
                .map(|_| Complex64::new(splitmix(&mut rng_state), splitmix(&mut rng_state)))
                .collect();
            for _ in 0..5 {
                f.solve_vec(&mut x);
                let norm = libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum::<f64>());
                if !norm.is_finite() || norm == 0.0 {
                    return None;
                }
                for z in &mut x {
                    *z /= norm;
                }
            }

            let mut resid = 0.0;
            for i in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    acc += ac[i * n + j] * x[j];
                }
                acc -= lambda * x[i];
                resid += acc.norm_sqr();
            }
            if libm::sqrt(resid) > 1e-8 * scale {
                return None;
            }
            for i in 0..n {
                vectors[i * n + col] = x[i];
            }
        }

        let vf = CLu::factor(n, &vectors)?;
        let mut inverse = vec![Complex64::new(0.0, 0.0); n * n];
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if i == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            }
            vf.solve_vec(&mut col);
            for i in 0..n {
                inverse[i * n + j] = col[i];
            }
        }

        let fro = |m: &[Complex64]| libm::sqrt(m.iter().map(|z| z.norm_sqr()).sum::<f64>());
        let cond = fro(&vectors) * fro(&inverse);
        if !cond.is_finite() || cond > cond_limit {
            return None;
        }

        Some(EigenBasis {
            n,
            values,
            vectors,
            inverse,
            cond,
        })
    }

    /// Condition estimate of the eigenvector basis.
    pub fn cond(&self) -> f64 {
        self.cond
    }

    /// Eigenvalues in the order used by the factorization.
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Real part of `V exp(s w) V^-1`, which equals `exp(s A)` for real `A`.
    pub fn exp_scaled(&self, s: f64) -> DMat {
        let n = self.n;
        let exps: Vec<Complex64> = self.values.iter().map(|w| (w * s).exp()).collect();
        let mut out = DMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, e) in exps.iter().enumerate() {
                    acc += self.vectors[i * n + k] * *e * self.inverse[k * n + j];
                }
                out[(i, j)] = acc.re;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn zero_matrix_gives_identity() {
        let e = expm(&DMat::zeros(3, 3));
        assert_eq!(e, DMat::identity(3));
    }

    #[test]
    fn scalar_case_matches_exp() {
        let mut a = DMat::zeros(1, 1);
        a[(0, 0)] = -core::f64::consts::LN_2;
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn diagonal_matrix_exponentiates_entrywise() {
        let a = DMat::from_rows(&[&[1.0, 0.0], &[0.0, -3.0]]);
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)], libm::exp(1.0), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 1)], libm::exp(-3.0), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)], 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(e[(1, 0)], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn rotation_generator_gives_rotation_matrix() {
        let th = core::f64::consts::FRAC_PI_2;
        let a = DMat::from_rows(&[&[0.0, -th], &[th, 0.0]]);
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn nilpotent_matrix_truncates_series() {
        let a = DMat::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm(&a);
        assert_abs_diff_eq!(e[(0, 0)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(0, 1)], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 0)], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(e[(1, 1)], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn exponential_of_negation_is_inverse() {
        let a = DMat::from_rows(&[&[0.4, -1.1, 0.3], &[0.7, 0.2, -0.5], &[-0.2, 0.9, 0.6]]);
        let e = expm(&a);
        let einv = expm(&a.scaled(-1.0));
        let prod = e.matmul(&einv);
        let err = (&prod - &DMat::identity(3)).max_abs();
        assert!(err < 1e-13, "err = {err}");
    }

    #[test]
    fn large_norm_goes_through_scaling_and_squaring() {
        let a = DMat::from_rows(&[&[-30.0, 12.0], &[0.0, -45.0]]);
        let e = expm(&a);
        let e11 = libm::exp(-30.0);
        let e22 = libm::exp(-45.0);
        let e12 = 12.0 * (e11 - e22) / (-30.0 + 45.0);
        assert_abs_diff_eq!(e[(0, 0)], e11, epsilon = 1e-14 * e11.max(1.0));
        assert_abs_diff_eq!(e[(1, 1)], e22, epsilon = 1e-14);
        assert_abs_diff_eq!(e[(0, 1)], e12, epsilon = 1e-13 * e12.abs().max(1e-10));
        assert_abs_diff_eq!(e[(1, 0)], 0.0, epsilon = 1e-16);
    }

    #[test]
    fn semigroup_property_holds() {
        let a = DMat::from_rows(&[&[0.9, 2.0], &[-1.0, 0.3]]);
        let half = expm(&a.scaled(0.5));
        let full = expm(&a);
        let err = (&half.matmul(&half) - &full).max_abs();
        assert!(err < 1e-13, "err = {err}");
    }

    #[test]
    fn eigen_basis_agrees_with_pade_path() {
        let a = DMat::from_rows(&[&[2.0, 1.0], &[3.0, 4.0]]);
        let basis = EigenBasis::try_new(&a, 1e8).unwrap();
        for s in [-1.5, -0.3, 0.0, 0.7, 2.0] {
            let via_basis = basis.exp_scaled(s);
            let via_pade = expm(&a.scaled(s));
            let err = (&via_basis - &via_pade).max_abs();
            assert!(err < 1e-11 * via_pade.max_abs().max(1.0), "s={s} err={err}");
        }
    }

    #[test]
    fn eigen_basis_handles_complex_spectrum() {
        let a = DMat::from_rows(&[&[1.0, -2.0], &[2.0, 1.0]]);
        let basis = EigenBasis::try_new(&a, 1e8).unwrap();
        let e = basis.exp_scaled(1.0);
        let reference = expm(&a);
        let err = (&e - &reference).max_abs();
        assert!(err < 1e-12, "err = {err}");
    }

    #[test]
    fn eigen_basis_refuses_defective_matrix() {
        let a = DMat::from_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        assert!(EigenBasis::try_new(&a, 1e8).is_none());
    }
}

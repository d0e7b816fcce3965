//! Flexible GMRES with restarts for matrix-free linear solves.
//!
//! The operator and the right preconditioner are both closures, so callers
//! can wire in Jacobian actions and per-mode factorizations without forming
//! matrices. Preconditioned directions are stored alongside the Arnoldi
//! basis, which keeps the solution update correct even if the
//! preconditioner is not a fixed linear map.

use alloc::vec;
use alloc::vec::Vec;

use super::{vec_dot, vec_norm};

/// Iteration controls for [`gmres`].
#[derive(Clone, Debug)]
pub struct GmresOptions {
    /// Krylov subspace dimension before a restart.
    pub restart: usize,
    /// Maximum number of restart cycles.
    pub max_cycles: usize,
    /// Convergence when the residual drops below `rel_tol * ||b||`.
    pub rel_tol: f64,
    /// Convergence floor for very small right-hand sides.
    pub abs_tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        GmresOptions {
            restart: 50,
            max_cycles: 40,
            rel_tol: 1e-12,
            abs_tol: 1e-14,
        }
    }
}

/// Outcome of a [`gmres`] solve.
#[derive(Clone, Debug)]
pub struct GmresReport {
    /// Total operator applications.
    pub iterations: usize,
    /// Final true residual norm.
    pub residual: f64,
    /// Whether the tolerance was met.
    pub converged: bool,
}

/// Solves `A x = b` with the operator given as a closure `apply(input, output)`
/// and a right preconditioner `precond(input, output)` approximating `A^-1`.
/// `x` holds the initial guess on entry and the solution on exit.
pub fn gmres<A, P>(
    mut apply: A,
    mut precond: P,
    b: &[f64],
    x: &mut [f64],
    opts: &GmresOptions,
) -> GmresReport
where
    A: FnMut(&[f64], &mut [f64]),
    P: FnMut(&[f64], &mut [f64]),
{
    let n = b.len();
    assert_eq!(x.len(), n);
    let m = opts.restart.max(1);
    let tol = opts.abs_tol.max(opts.rel_tol * vec_norm(b));

    let mut iterations = 0usize;
    let mut r = vec![0.0; n];
    let mut w = vec![0.0; n];

    let mut residual = {
        apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        vec_norm(&r)
    };
    if residual <= tol {
        return GmresReport {
            iterations: 0,
            residual,
            converged: true,
        };
    }

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut directions: Vec<Vec<f64>> = Vec::new();
    let mut h = vec![0.0; (m + 1) * m];
    let mut cs = vec![0.0; m];
    let mut sn = vec![0.0; m];
    let mut g = vec![0.0; m + 1];

    for _cycle in 0..opts.max_cycles {
        basis.clear();
        directions.clear();
        for v in h.iter_mut() {
            *v = 0.0;
        }
        for v in g.iter_mut() {
            *v = 0.0;
        }
        g[0] = residual;
        let mut v0 = r.clone();
        for v in &mut v0 {
            *v /= residual;
        }
        basis.push(v0);

        let mut cols = 0usize;
        for j in 0..m {
            let mut z = vec![0.0; n];
            precond(&basis[j], &mut z);
            apply(&z, &mut w);
            iterations += 1;
            directions.push(z);

            for i in 0..=j {
                let hij = vec_dot(&w, &basis[i]);
                h[i * m + j] = hij;
                for (wk, vk) in w.iter_mut().zip(basis[i].iter()) {
                    *wk -= hij * vk;
                }
            }
            let hnext = vec_norm(&w);
            h[(j + 1) * m + j] = hnext;

            for i in 0..j {
                let hi = h[i * m + j];
                let hi1 = h[(i + 1) * m + j];
                h[i * m + j] = cs[i] * hi + sn[i] * hi1;
                h[(i + 1) * m + j] = -sn[i] * hi + cs[i] * hi1;
            }
            let hjj = h[j * m + j];
            let denom = libm::sqrt(hjj * hjj + hnext * hnext);
            if denom == 0.0 {
                cs[j] = 1.0;
                sn[j] = 0.0;
            } else {
                cs[j] = hjj / denom;
                sn[j] = hnext / denom;
            }
            h[j * m + j] = cs[j] * hjj + sn[j] * hnext;
            h[(j + 1) * m + j] = 0.0;
            g[j + 1] = -sn[j] * g[j];
            g[j] *= cs[j];
            cols = j + 1;

            let est = libm::fabs(g[j + 1]);
            if est <= tol || hnext <= f64::EPSILON * residual {
                break;
            }
            if j + 1 < m {
                let mut vnext = w.clone();
                for v in &mut vnext {
                    *v /= hnext;
                }
                basis.push(vnext);
            }
        }

        let mut y = vec![0.0; cols];
        for i in (0..cols).rev() {
            let mut acc = g[i];
            for k in (i + 1)..cols {
                acc -= h[i * m + k] * y[k];
            }
            y[i] = acc / h[i * m + i];
        }
        for (k, dir) in directions.iter().take(cols).enumerate() {
            for i in 0..n {
                x[i] += y[k] * dir[i];
            }
        }

        apply(x, &mut r);
        for i in 0..n {
            r[i] = b[i] - r[i];
        }
        iterations += 1;
        residual = vec_norm(&r);
        if residual <= tol {
            return GmresReport {
                iterations,
                residual,
                converged: true,
            };
        }
    }

    GmresReport {
        iterations,
        residual,
        converged: residual <= tol,
    }
}

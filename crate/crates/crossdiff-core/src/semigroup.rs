//! The linear diffusion semigroup, exact per mode.
//!
//! In the eigenbasis of the Laplacian the evolution u_t = M Δu decouples
//! into one d-dimensional linear ODE per mode with solution
//! exp(−t μₖ M) applied to the coefficient vector. Admissibility of M
//! (spectrum in the closed right half-plane, nonzero matrix) is enforced
//! here by default because the propagators grow exponentially otherwise.

use alloc::vec::Vec;

use crate::analysis::{check_h0, AnalysisError, DiffusionMatrix};
use crate::linalg::eigen::eigenvalues;
use crate::linalg::expm::{expm, EigenBasis};
use crate::linalg::svd::singular_values;
use crate::linalg::DMat;
use crate::spectral::{FieldState, SpectralBasis, SpectralError};

/// Failures in propagator construction or application.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum SemigroupError {
    #[error("diffusion matrix spectrum reaches real part {min_real_part:.6e}, outside the closed right half-plane")]
    H0Violation { min_real_part: f64 },
    #[error("field has {field} components but the matrix acts on {matrix}")]
    DimensionMismatch { field: usize, matrix: usize },
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Whether admissibility of the matrix is checked before exponentiating.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum H0Policy {
    /// Refuse matrices that fail the half-plane check or are zero.
    Enforce,
    /// Build the propagators regardless; solutions may grow.
    Override,
}

/// How the per-mode exponentials are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum ExpmMethod {
    /// Scaling-and-squaring Padé for every mode. Robust default.
    #[default]
    Pade,
    /// One eigendecomposition shared by all modes, used only when the
    /// eigenvector basis verifies with condition estimate below the limit;
    /// falls back to Padé otherwise.
    EigenBasis { cond_limit: f64 },
}

/// The matrix exponential `exp(-t mu M)` for a single mode.
pub fn modal_propagator(m: &DiffusionMatrix, mu: f64, t: f64) -> DMat {
    expm(&m.matrix().scaled(-t * mu))
}

fn min_real_part(m: &DiffusionMatrix) -> f64 {
    eigenvalues(m.matrix())
        .map(|eigs| eigs.iter().map(|z| z.re).fold(f64::INFINITY, f64::min))
        .unwrap_or(f64::NAN)
}

fn gate(m: &DiffusionMatrix, policy: H0Policy) -> Result<(), SemigroupError> {
    if let H0Policy::Enforce = policy {
        let report = check_h0(m)?;
        if !report.h0_pass {
            return Err(SemigroupError::H0Violation {
                min_real_part: min_real_part(m),
            });
        }
    }
    Ok(())
}

/// Precomputed per-mode propagators for one time increment.
#[derive(Clone, Debug)]
pub struct ModalPropagator {
    matrix: DiffusionMatrix,
    t: f64,
    propagators: Vec<DMat>,
}

impl ModalPropagator {
    /// Builds `exp(-t mu_k M)` for every mode of the basis.
    pub fn new(
        basis: &SpectralBasis,
        m: &DiffusionMatrix,
        t: f64,
        policy: H0Policy,
    ) -> Result<Self, SemigroupError> {
        Self::with_method(basis, m, t, policy, ExpmMethod::default())
    }

    /// Same as [`ModalPropagator::new`] with an explicit exponential method.
    pub fn with_method(
        basis: &SpectralBasis,
        m: &DiffusionMatrix,
        t: f64,
        policy: H0Policy,
        method: ExpmMethod,
    ) -> Result<Self, SemigroupError> {
        assert!(t >= 0.0, "time increment must be nonnegative");
        gate(m, policy)?;

        let eigen_basis = match method {
            ExpmMethod::Pade => None,
            ExpmMethod::EigenBasis { cond_limit } => EigenBasis::try_new(m.matrix(), cond_limit),
        };

        let propagators = basis
            .mu()
            .iter()
            .map(|mu| match &eigen_basis {
                Some(basis) => basis.exp_scaled(-t * mu),
                None => modal_propagator(m, *mu, t),
            })
            .collect();

        Ok(ModalPropagator {
            matrix: m.clone(),
            t,
            propagators,
        })
    }

    pub fn time_increment(&self) -> f64 {
        self.t
    }

    pub fn matrix(&self) -> &DiffusionMatrix {
        &self.matrix
    }

    pub fn mode_count(&self) -> usize {
        self.propagators.len()
    }

    /// Propagator of mode `k`.
    pub fn mode_matrix(&self, k: usize) -> &DMat {
        &self.propagators[k]
    }

    /// Advances the modal coefficients of `state` by one increment in place.
    pub fn apply_in_place(&self, state: &mut FieldState) -> Result<(), SemigroupError> {
        let d = self.matrix.dim();
        if state.components() != d {
            return Err(SemigroupError::DimensionMismatch {
                field: state.components(),
                matrix: d,
            });
        }
        state.ensure_modal()?;
        let n = self.propagators.len();
        let modal = state.modal_mut()?;
        debug_assert_eq!(modal.len(), d * n);

        let mut coeff = alloc::vec![0.0; d];
        let mut image = alloc::vec![0.0; d];
        for k in 0..n {
            for c in 0..d {
                coeff[c] = modal[c * n + k];
            }
            self.propagators[k].matvec(&coeff, &mut image);
            for c in 0..d {
                modal[c * n + k] = image[c];
            }
        }
        Ok(())
    }
}

/// Applies the diffusion semigroup for time `t` to a field.
///
/// The modal representation must be present; admissibility of the matrix is
/// checked unless the caller overrides.
pub fn diffuse(
    state: &FieldState,
    m: &DiffusionMatrix,
    t: f64,
    policy: H0Policy,
) -> Result<FieldState, SemigroupError> {
    if !state.has_modal() {
        return Err(SemigroupError::Spectral(
            SpectralError::MissingRepresentation,
        ));
    }
    let propagator = ModalPropagator::new(state.basis(), m, t, policy)?;
    let mut out = state.clone();
    propagator.apply_in_place(&mut out)?;
    Ok(out)
}

/// Largest operator two-norm of `exp(-tau M)` over the sampled values of
/// `tau`. Values above one quantify transient growth of non-normal
/// admissible matrices; normal admissible matrices stay at one. Returns
/// infinity when a sampled exponential overflows, which happens exactly
/// when an eigenvalue sits in the open left half-plane and the sample
/// times reach far enough.
pub fn transient_growth(m: &DiffusionMatrix, taus: &[f64]) -> f64 {
    let mut worst: f64 = 1.0;
    for tau in taus {
        let e = expm(&m.matrix().scaled(-tau));
        if e.as_slice().iter().any(|v| !v.is_finite()) {
            return f64::INFINITY;
        }
        let sigma = singular_values(&e).first().copied().unwrap_or(0.0);
        if !sigma.is_finite() {
            return f64::INFINITY;
        }
        worst = worst.max(sigma);
    }
    worst
}

/// Logarithmic sample grid for [`transient_growth`].
pub fn default_growth_times() -> Vec<f64> {
    let mut taus = Vec::with_capacity(25);
    for i in 0..25 {
        taus.push(libm::pow(10.0, -3.0 + 0.25 * i as f64));
    }
    taus
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, BoundaryKind};
    use alloc::sync::Arc;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn scalar_propagator_halves_in_ln_two() {
        let m = DiffusionMatrix::from_rows(&[&[1.0]]).unwrap();
        let p = modal_propagator(&m, 1.0, core::f64::consts::LN_2);
        assert_abs_diff_eq!(p[(0, 0)], 0.5, epsilon = 1e-15);
    }

    #[test]
    fn growth_probe_saturates_on_left_half_plane_eigenvalue() {
        let m = DiffusionMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let worst = transient_growth(&m, &default_growth_times());
        assert!(worst.is_infinite() && worst > 0.0);
    }

    #[test]
    fn zero_time_gives_identity() {
        let m = DiffusionMatrix::from_rows(&[&[3.0, 1.0], &[2.0, 4.0]]).unwrap();
        let p = modal_propagator(&m, 7.0, 0.0);
        assert_eq!(p, DMat::identity(2));
    }

    #[test]
    fn rotation_symbol_gives_rotation_propagator() {
        let m = DiffusionMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let p = modal_propagator(&m, 1.0, PI / 2.0);
        assert_abs_diff_eq!(p[(0, 0)], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(0, 1)], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(1, 0)], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(p[(1, 1)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn heat_eigenmode_decays_exactly() {
        let basis = Arc::new(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let grid: Vec<f64> = (0..8).map(|j| libm::sin(basis.node(j).0)).collect();
        let mut state = FieldState::from_grid(Arc::clone(&basis), 1, grid.clone()).unwrap();
        state.ensure_modal().unwrap();
        let m = DiffusionMatrix::from_rows(&[&[1.0]]).unwrap();
        let mut evolved = diffuse(&state, &m, 1.0, H0Policy::Enforce).unwrap();
        evolved.ensure_grid().unwrap();
        let decay = libm::exp(-1.0);
        for (v, g) in evolved.grid_component(0).unwrap().iter().zip(grid.iter()) {
            assert_abs_diff_eq!(*v, decay * g, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_time_leaves_field_unchanged() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Neumann, &[6]).unwrap());
        let data: Vec<f64> = (0..12).map(|i| 0.3 * i as f64 - 1.0).collect();
        let mut state = FieldState::from_grid(Arc::clone(&basis), 2, data).unwrap();
        state.ensure_modal().unwrap();
        let m = DiffusionMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let evolved = diffuse(&state, &m, 0.0, H0Policy::Enforce).unwrap();
        for c in 0..2 {
            let before = state.modal_component(c).unwrap();
            let after = evolved.modal_component(c).unwrap();
            for (b, a) in before.iter().zip(after.iter()) {
                assert_abs_diff_eq!(*b, *a, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn coupling_eigenvector_decays_at_coupled_rate() {
        let basis = Arc::new(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[1]).unwrap());
        assert_abs_diff_eq!(basis.mu()[0], 1.0, epsilon = 1e-13);
        let state = FieldState::from_modal(Arc::clone(&basis), 2, vec![1.0, 1.0]).unwrap();
        let m = DiffusionMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let t = 0.7;
        let evolved = diffuse(&state, &m, t, H0Policy::Enforce).unwrap();
        let decay = libm::exp(-3.0 * t);
        assert_abs_diff_eq!(
            evolved.modal_component(0).unwrap()[0],
            decay,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            evolved.modal_component(1).unwrap()[0],
            decay,
            epsilon = 1e-13
        );
    }

    #[test]
    fn semigroup_law_composition() {
        let basis = Arc::new(build_basis(1, &[2.0], BoundaryKind::Dirichlet, &[10]).unwrap());
        let data: Vec<f64> = (0..20).map(|i| libm::sin(1.7 * i as f64)).collect();
        let mut state = FieldState::from_grid(Arc::clone(&basis), 2, data).unwrap();
        state.ensure_modal().unwrap();
        let m = DiffusionMatrix::from_rows(&[&[1.5, 0.8], &[0.2, 1.1]]).unwrap();
        let two_steps = diffuse(
            &diffuse(&state, &m, 0.3, H0Policy::Enforce).unwrap(),
            &m,
            0.5,
            H0Policy::Enforce,
        )
        .unwrap();
        let one_step = diffuse(&state, &m, 0.8, H0Policy::Enforce).unwrap();
        for c in 0..2 {
            let a = two_steps.modal_component(c).unwrap();
            let b = one_step.modal_component(c).unwrap();
            for (x, y) in a.iter().zip(b.iter()) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn inadmissible_matrix_is_refused_by_default() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Dirichlet, &[4]).unwrap());
        let state = FieldState::from_modal(Arc::clone(&basis), 2, vec![1.0; 8]).unwrap();
        let m = DiffusionMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        match diffuse(&state, &m, 0.1, H0Policy::Enforce) {
            Err(SemigroupError::H0Violation { min_real_part }) => {
                assert_abs_diff_eq!(min_real_part, -1.0, epsilon = 1e-12);
            }
            other => panic!("expected H0Violation, got {other:?}"),
        }
        let overridden = diffuse(&state, &m, 0.1, H0Policy::Override).unwrap();
        assert!(overridden.modal_component(0).unwrap()[0].is_finite());
    }

    #[test]
    fn zero_matrix_is_refused_unless_overridden() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Dirichlet, &[3]).unwrap());
        let state = FieldState::from_modal(Arc::clone(&basis), 1, vec![1.0, 2.0, 3.0]).unwrap();
        let m = DiffusionMatrix::new(1, vec![0.0]).unwrap();
        assert!(matches!(
            diffuse(&state, &m, 1.0, H0Policy::Enforce),
            Err(SemigroupError::Analysis(AnalysisError::ZeroMatrix))
        ));
        let identity_evolution = diffuse(&state, &m, 1.0, H0Policy::Override).unwrap();
        assert_eq!(
            identity_evolution.modal_component(0).unwrap(),
            &[1.0, 2.0, 3.0]
        );
    }

    #[test]
    fn missing_modal_representation_is_an_error() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Dirichlet, &[3]).unwrap());
        let state = FieldState::from_grid(Arc::clone(&basis), 1, vec![1.0, 2.0, 3.0]).unwrap();
        let m = DiffusionMatrix::from_rows(&[&[1.0]]).unwrap();
        assert!(matches!(
            diffuse(&state, &m, 1.0, H0Policy::Enforce),
            Err(SemigroupError::Spectral(
                SpectralError::MissingRepresentation
            ))
        ));
    }

    #[test]
    fn eigen_method_matches_pade_method() {
        let basis = Arc::new(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[12]).unwrap());
        let m = DiffusionMatrix::from_rows(&[&[2.0, 1.0], &[0.5, 1.5]]).unwrap();
        let pade =
            ModalPropagator::with_method(&basis, &m, 0.37, H0Policy::Enforce, ExpmMethod::Pade)
                .unwrap();
        let eig = ModalPropagator::with_method(
            &basis,
            &m,
            0.37,
            H0Policy::Enforce,
            ExpmMethod::EigenBasis { cond_limit: 1e8 },
        )
        .unwrap();
        for k in 0..basis.mode_count() {
            let diff = (pade.mode_matrix(k) - eig.mode_matrix(k)).max_abs();
            assert!(diff < 1e-11, "mode {k} differs by {diff}");
        }
    }

    #[test]
    fn normal_matrix_has_no_transient_growth() {
        let m = DiffusionMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let growth = transient_growth(&m, &default_growth_times());
        assert!(growth <= 1.0 + 1e-10, "growth = {growth}");
    }

    #[test]
    fn nonnormal_admissible_matrix_shows_growth() {
        let m = DiffusionMatrix::from_rows(&[&[0.0, 8.0], &[0.0, 0.0]]).unwrap();
        let growth = transient_growth(&m, &default_growth_times());
        assert!(growth > 1.5, "growth = {growth}");
    }
}

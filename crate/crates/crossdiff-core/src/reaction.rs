//! Pointwise reaction terms and their resolvent machinery.
//!
//! A reaction is a C² map F on component space applied node by node. The
//! nonlinear half of the splitting schemes never evaluates F forward in
//! time; it inverts I + λR with R the monotone orientation of F, so this
//! module centers on the resolvent and the Yosida regularization built
//! from it. Monotonicity itself is probed on samples rather than assumed.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::linalg::lu::Lu;
use crate::linalg::{vec_norm, DMat};
use crate::spectral::{FieldState, SpectralError};

/// Failures in reaction registration or resolvent solves.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ReactionError {
    #[error("supplied Jacobian disagrees with finite differences by {max_error:.3e} (relative)")]
    JacobianMismatch { max_error: f64 },
    #[error("reaction produced a non-finite value")]
    NonFiniteValue,
    #[error("resolvent Newton iteration stalled at residual {residual:.3e}")]
    NewtonDivergence { residual: f64 },
    #[error("{0}")]
    InvalidParameter(&'static str),
    #[error("field has {field} components but the reaction acts on {reaction}")]
    DimensionMismatch { field: usize, reaction: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Which map plays the role of the monotone operator R.
///
/// Dissipative reactions such as F(u) = −u³ have monotone −F, so the
/// resolvent inverts I − λF by default. The direct orientation inverts
/// I + λF instead, for reactions already written in monotone form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Orientation {
    #[default]
    NegatedReaction,
    DirectReaction,
}

/// Structural information beyond the bare map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ReactionKind {
    General,
    /// Two-component coupling (−σ f(u,v), ρ f(u,v)) built from one scalar.
    Coupled {
        sigma: f64,
        rho: f64,
    },
}

type VectorMap = dyn Fn(&[f64], &mut [f64]) + Send + Sync;
type JacobianMap = dyn Fn(&[f64], &mut DMat) + Send + Sync;
type ScalarMap = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A registered pointwise reaction with validated Jacobian.
#[derive(Clone)]
pub struct ReactionSpec {
    dim: usize,
    map: Arc<VectorMap>,
    jacobian: Arc<JacobianMap>,
    kind: ReactionKind,
    scalar: Option<Arc<ScalarMap>>,
    orientation: Orientation,
}

impl core::fmt::Debug for ReactionSpec {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ReactionSpec")
            .field("dim", &self.dim)
            .field("kind", &self.kind)
            .field("orientation", &self.orientation)
            .finish()
    }
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

fn validation_points(dim: usize) -> Vec<Vec<f64>> {
    let mut state = 0x5851F42D4C957F2D ^ dim as u64;
    let mut points = Vec::with_capacity(24);
    points.push(alloc::vec![0.0; dim]);
    for _ in 0..23 {
        let p: Vec<f64> = (0..dim).map(|_| 1.8 * splitmix(&mut state) - 0.9).collect();
        points.push(p);
    }
    points
}

impl ReactionSpec {
    /// Registers a general reaction, verifying the Jacobian against central
    /// finite differences on a fixed sample set.
    pub fn new(
        dim: usize,
        map: Arc<VectorMap>,
        jacobian: Arc<JacobianMap>,
    ) -> Result<Self, ReactionError> {
        if dim == 0 {
            return Err(ReactionError::InvalidParameter(
                "reaction dimension must be positive",
            ));
        }
        let spec = ReactionSpec {
            dim,
            map,
            jacobian,
            kind: ReactionKind::General,
            scalar: None,
            orientation: Orientation::default(),
        };
        spec.validate_jacobian()?;
        Ok(spec)
    }

    /// Registers the two-component coupling F(u,v) = (−σ f(u,v), ρ f(u,v)).
    ///
    /// `grad` must return (∂f/∂u, ∂f/∂v); the composed Jacobian is checked
    /// the same way as for [`ReactionSpec::new`].
    pub fn coupled(
        sigma: f64,
        rho: f64,
        scalar: Arc<ScalarMap>,
        grad: Arc<dyn Fn(f64, f64) -> (f64, f64) + Send + Sync>,
    ) -> Result<Self, ReactionError> {
        if !sigma.is_finite() || !rho.is_finite() || sigma <= 0.0 || rho <= 0.0 {
            return Err(ReactionError::InvalidParameter(
                "coupling weights sigma and rho must be positive",
            ));
        }
        let f = Arc::clone(&scalar);
        let map = Arc::new(move |x: &[f64], out: &mut [f64]| {
            let val = f(x[0], x[1]);
            out[0] = -sigma * val;
            out[1] = rho * val;
        });
        let jacobian = Arc::new(move |x: &[f64], out: &mut DMat| {
            let (fu, fv) = grad(x[0], x[1]);
            out[(0, 0)] = -sigma * fu;
            out[(0, 1)] = -sigma * fv;
            out[(1, 0)] = rho * fu;
            out[(1, 1)] = rho * fv;
        });
        let spec = ReactionSpec {
            dim: 2,
            map,
            jacobian,
            kind: ReactionKind::Coupled { sigma, rho },
            scalar: Some(scalar),
            orientation: Orientation::default(),
        };
        spec.validate_jacobian()?;
        Ok(spec)
    }

    /// The zero reaction.
    pub fn zero(dim: usize) -> Self {
        ReactionSpec {
            dim,
            map: Arc::new(|_x: &[f64], out: &mut [f64]| out.fill(0.0)),
            jacobian: Arc::new(|_x: &[f64], out: &mut DMat| {
                out.as_mut_slice().fill(0.0);
            }),
            kind: ReactionKind::General,
            scalar: None,
            orientation: Orientation::default(),
        }
    }

    /// F(u) = −rate·u componentwise.
    pub fn linear_decay(dim: usize, rate: f64) -> Result<Self, ReactionError> {
        if !rate.is_finite() {
            return Err(ReactionError::InvalidParameter("decay rate must be finite"));
        }
        Self::new(
            dim,
            Arc::new(move |x: &[f64], out: &mut [f64]| {
                for (o, v) in out.iter_mut().zip(x.iter()) {
                    *o = -rate * v;
                }
            }),
            Arc::new(move |_x: &[f64], out: &mut DMat| {
                out.as_mut_slice().fill(0.0);
                for i in 0..dim {
                    out[(i, i)] = -rate;
                }
            }),
        )
    }

    /// F(u) = −coef·u³ componentwise.
    pub fn cubic_decay(dim: usize, coef: f64) -> Result<Self, ReactionError> {
        if !coef.is_finite() {
            return Err(ReactionError::InvalidParameter(
                "cubic coefficient must be finite",
            ));
        }
        Self::new(
            dim,
            Arc::new(move |x: &[f64], out: &mut [f64]| {
                for (o, v) in out.iter_mut().zip(x.iter()) {
                    *o = -coef * v * v * v;
                }
            }),
            Arc::new(move |x: &[f64], out: &mut DMat| {
                out.as_mut_slice().fill(0.0);
                for i in 0..dim {
                    out[(i, i)] = -3.0 * coef * x[i] * x[i];
                }
            }),
        )
    }

    /// Coupling through f(u,v) = u·v.
    pub fn coupled_product(sigma: f64, rho: f64) -> Result<Self, ReactionError> {
        Self::coupled(sigma, rho, Arc::new(|u, v| u * v), Arc::new(|u, v| (v, u)))
    }

    /// Coupling through f(u,v) = u·vᵐ for a positive integer power.
    pub fn coupled_power(sigma: f64, rho: f64, m: u32) -> Result<Self, ReactionError> {
        if m == 0 {
            return Err(ReactionError::InvalidParameter(
                "coupling power must be a positive integer",
            ));
        }
        let p = m as i32;
        Self::coupled(
            sigma,
            rho,
            Arc::new(move |u, v| u * libm::pow(v, p as f64)),
            Arc::new(move |u, v| {
                (
                    libm::pow(v, p as f64),
                    p as f64 * u * libm::pow(v, (p - 1) as f64),
                )
            }),
        )
    }

    /// Switches which orientation of F acts as the monotone operator.
    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> ReactionKind {
        self.kind
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Evaluates F at one point.
    pub fn eval(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        (self.map)(x, out);
    }

    /// Evaluates the Jacobian of F at one point.
    pub fn eval_jacobian(&self, x: &[f64], out: &mut DMat) {
        debug_assert_eq!(out.rows(), self.dim);
        debug_assert_eq!(out.cols(), self.dim);
        (self.jacobian)(x, out);
    }

    /// Evaluates the monotone-oriented operator R at one point.
    pub fn eval_monotone(&self, x: &[f64], out: &mut [f64]) {
        self.eval(x, out);
        if self.orientation == Orientation::NegatedReaction {
            for o in out.iter_mut() {
                *o = -*o;
            }
        }
    }

    fn monotone_jacobian(&self, x: &[f64], out: &mut DMat) {
        self.eval_jacobian(x, out);
        if self.orientation == Orientation::NegatedReaction {
            out.scale_mut(-1.0);
        }
    }

    /// The scalar coupling field f(u,v) at one point, when the reaction has
    /// one.
    pub fn scalar_value(&self, u: f64, v: f64) -> Option<f64> {
        self.scalar.as_ref().map(|f| f(u, v))
    }

    fn validate_jacobian(&self) -> Result<(), ReactionError> {
        let d = self.dim;
        let mut value = alloc::vec![0.0; d];
        let mut plus = alloc::vec![0.0; d];
        let mut minus = alloc::vec![0.0; d];
        let mut jac = DMat::zeros(d, d);
        let mut worst = 0.0f64;
        for point in validation_points(d) {
            self.eval(&point, &mut value);
            if value.iter().any(|v| !v.is_finite()) {
                return Err(ReactionError::NonFiniteValue);
            }
            self.eval_jacobian(&point, &mut jac);
            if !jac.is_finite() {
                return Err(ReactionError::NonFiniteValue);
            }
            let scale = 1.0 + jac.max_abs();
            let mut probe = point.clone();
            for j in 0..d {
                let h = 6e-6 * (1.0 + libm::fabs(point[j]));
                probe[j] = point[j] + h;
                self.eval(&probe, &mut plus);
                probe[j] = point[j] - h;
                self.eval(&probe, &mut minus);
                probe[j] = point[j];
                for i in 0..d {
                    let fd = (plus[i] - minus[i]) / (2.0 * h);
                    worst = worst.max(libm::fabs(fd - jac[(i, j)]) / scale);
                }
            }
        }
        if worst > 1e-6 {
            return Err(ReactionError::JacobianMismatch { max_error: worst });
        }
        Ok(())
    }
}

/// Parameters of the regularized operator R_λ = (I − (I + λR)⁻¹)/λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YosidaParams {
    pub lambda: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl YosidaParams {
    pub fn new(lambda: f64) -> Self {
        assert!(
            lambda > 0.0 && lambda.is_finite(),
            "regularization parameter must be positive"
        );
        YosidaParams {
            lambda,
            newton_tol: 1e-12,
            newton_max_iter: 50,
        }
    }
}

fn residual(
    spec: &ReactionSpec,
    lambda: f64,
    w: &[f64],
    v: &[f64],
    r: &mut [f64],
    g: &mut [f64],
) -> f64 {
    spec.eval_monotone(w, r);
    for i in 0..w.len() {
        g[i] = w[i] + lambda * r[i] - v[i];
    }
    vec_norm(g)
}

/// Solves w + λR(w) = v by damped Newton from w = v.
pub fn resolvent(
    spec: &ReactionSpec,
    params: &YosidaParams,
    v: &[f64],
) -> Result<Vec<f64>, ReactionError> {
    if v.len() != spec.dim() {
        return Err(ReactionError::DimensionMismatch {
            field: v.len(),
            reaction: spec.dim(),
        });
    }
    let d = spec.dim();
    let lambda = params.lambda;
    let mut w: Vec<f64> = v.to_vec();
    let mut r = alloc::vec![0.0; d];
    let mut g = alloc::vec![0.0; d];
    let mut trial = alloc::vec![0.0; d];
    let mut jac = DMat::zeros(d, d);

    let mut norm = residual(spec, lambda, &w, v, &mut r, &mut g);
    if !norm.is_finite() {
        return Err(ReactionError::NonFiniteValue);
    }
    for _ in 0..params.newton_max_iter {
        if norm <= params.newton_tol {
            return Ok(w);
        }
        spec.monotone_jacobian(&w, &mut jac);
        let mut system = DMat::identity(d);
        system.axpy(lambda, &jac);
        let lu = match Lu::factor(&system) {
            Some(lu) => lu,
            None => return Err(ReactionError::NewtonDivergence { residual: norm }),
        };
        let mut step = g.clone();
        lu.solve_vec(&mut step);

        let mut alpha = 1.0;
        loop {
            for i in 0..d {
                trial[i] = w[i] - alpha * step[i];
            }
            let trial_norm = residual(spec, lambda, &trial, v, &mut r, &mut g);
            if trial_norm.is_finite() && trial_norm <= (1.0 - 0.5 * alpha) * norm {
                w.copy_from_slice(&trial);
                norm = trial_norm;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-8 {
                return Err(ReactionError::NewtonDivergence { residual: norm });
            }
        }
    }
    if norm <= params.newton_tol {
        Ok(w)
    } else {
        Err(ReactionError::NewtonDivergence { residual: norm })
    }
}

/// The regularized operator R_λ(v) = (v − (I + λR)⁻¹v)/λ.
pub fn yosida(
    spec: &ReactionSpec,
    params: &YosidaParams,
    v: &[f64],
) -> Result<Vec<f64>, ReactionError> {
    let w = resolvent(spec, params, v)?;
    Ok(v.iter()
        .zip(w.iter())
        .map(|(vi, wi)| (vi - wi) / params.lambda)
        .collect())
}

fn require_components(spec: &ReactionSpec, state: &FieldState) -> Result<(), ReactionError> {
    if state.components() != spec.dim() {
        return Err(ReactionError::DimensionMismatch {
            field: state.components(),
            reaction: spec.dim(),
        });
    }
    Ok(())
}

fn map_grid_nodes<G>(
    spec: &ReactionSpec,
    state: &FieldState,
    mut node_map: G,
) -> Result<FieldState, ReactionError>
where
    G: FnMut(&[f64], &mut [f64]) -> Result<(), ReactionError>,
{
    require_components(spec, state)?;
    let d = spec.dim();
    let n = state.basis().node_count();
    let mut columns: Vec<&[f64]> = Vec::with_capacity(d);
    for c in 0..d {
        columns.push(state.grid_component(c)?);
    }
    let mut out = alloc::vec![0.0; d * n];
    let mut x = alloc::vec![0.0; d];
    let mut y = alloc::vec![0.0; d];
    for j in 0..n {
        for c in 0..d {
            x[c] = columns[c][j];
        }
        node_map(&x, &mut y)?;
        for c in 0..d {
            out[c * n + j] = y[c];
        }
    }
    let mut result = state.clone();
    result.set_grid(out)?;
    Ok(result)
}

/// Applies F node by node on the grid representation.
pub fn eval_reaction(spec: &ReactionSpec, state: &FieldState) -> Result<FieldState, ReactionError> {
    map_grid_nodes(spec, state, |x, y| {
        spec.eval(x, y);
        if y.iter().any(|v| !v.is_finite()) {
            return Err(ReactionError::NonFiniteValue);
        }
        Ok(())
    })
}

/// Applies the resolvent (I + λR)⁻¹ node by node on the grid representation.
pub fn resolvent_field(
    spec: &ReactionSpec,
    params: &YosidaParams,
    state: &FieldState,
) -> Result<FieldState, ReactionError> {
    map_grid_nodes(spec, state, |x, y| {
        let w = resolvent(spec, params, x)?;
        y.copy_from_slice(&w);
        Ok(())
    })
}

/// The scalar coupling field f(u,v) on the grid, for coupled reactions.
pub fn scalar_field(
    spec: &ReactionSpec,
    state: &FieldState,
) -> Result<Option<Vec<f64>>, ReactionError> {
    if spec.scalar.is_none() {
        return Ok(None);
    }
    require_components(spec, state)?;
    let u = state.grid_component(0)?;
    let v = state.grid_component(1)?;
    let f = spec.scalar.as_ref().unwrap();
    Ok(Some(
        u.iter().zip(v.iter()).map(|(a, b)| f(*a, *b)).collect(),
    ))
}

/// Sampled evidence about monotonicity and the structural sign conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccretivityReport {
    /// Fraction of sample pairs with ⟨R(x) − R(y), x − y⟩ ≥ −1e−12.
    pub monotone_fraction: f64,
    /// |f(0,0)| for coupled reactions, ‖F(0)‖ otherwise.
    pub f_origin: f64,
    /// Minimum of −σ·u·f(u,v) + ρ·v·f(u,v) over all sampled points, for
    /// coupled reactions.
    pub sign_condition_min: Option<f64>,
}

/// Probes monotonicity of R and the origin/sign conditions on sample pairs.
pub fn accretivity_probe(
    spec: &ReactionSpec,
    samples: &[(Vec<f64>, Vec<f64>)],
) -> AccretivityReport {
    assert!(!samples.is_empty(), "probe needs at least one sample pair");
    let d = spec.dim();
    let mut rx = alloc::vec![0.0; d];
    let mut ry = alloc::vec![0.0; d];
    let mut monotone = 0usize;
    for (x, y) in samples {
        spec.eval_monotone(x, &mut rx);
        spec.eval_monotone(y, &mut ry);
        let mut inner = 0.0;
        for i in 0..d {
            inner += (rx[i] - ry[i]) * (x[i] - y[i]);
        }
        if inner >= -1e-12 {
            monotone += 1;
        }
    }

    let f_origin = match (&spec.kind, &spec.scalar) {
        (ReactionKind::Coupled { .. }, Some(f)) => libm::fabs(f(0.0, 0.0)),
        _ => {
            let origin = alloc::vec![0.0; d];
            spec.eval(&origin, &mut rx);
            vec_norm(&rx)
        }
    };

    let sign_condition_min = match (&spec.kind, &spec.scalar) {
        (ReactionKind::Coupled { sigma, rho }, Some(f)) => {
            let mut min = f64::INFINITY;
            for (x, y) in samples {
                for point in [x, y] {
                    let (u, v) = (point[0], point[1]);
                    let val = f(u, v);
                    min = min.min(-sigma * u * val + rho * v * val);
                }
            }
            Some(min)
        }
        _ => None,
    };

    AccretivityReport {
        monotone_fraction: monotone as f64 / samples.len() as f64,
        f_origin,
        sign_condition_min,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, BoundaryKind};
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    #[test]
    fn zero_reaction_maps_field_to_zero() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Dirichlet, &[5]).unwrap());
        let state =
            FieldState::from_grid(Arc::clone(&basis), 2, (0..10).map(|i| i as f64).collect())
                .unwrap();
        let spec = ReactionSpec::zero(2);
        let image = eval_reaction(&spec, &state).unwrap();
        for c in 0..2 {
            assert!(image.grid_component(c).unwrap().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn coupled_product_composes_signs_and_weights() {
        let spec = ReactionSpec::coupled_product(1.0, 2.0).unwrap();
        let mut out = [0.0; 2];
        spec.eval(&[3.0, 1.0], &mut out);
        assert_abs_diff_eq!(out[0], -3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(out[1], 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.scalar_value(3.0, 1.0).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn negation_reaction_negates_sine() {
        let basis = Arc::new(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[6]).unwrap());
        let grid: Vec<f64> = (0..6).map(|j| libm::sin(basis.node(j).0)).collect();
        let state = FieldState::from_grid(Arc::clone(&basis), 1, grid.clone()).unwrap();
        let spec = ReactionSpec::linear_decay(1, 1.0).unwrap();
        let image = eval_reaction(&spec, &state).unwrap();
        for (out, orig) in image.grid_component(0).unwrap().iter().zip(grid.iter()) {
            assert_abs_diff_eq!(*out, -orig, epsilon = 1e-15);
        }
    }

    #[test]
    fn linear_resolvent_divides_by_one_plus_lambda() {
        let spec = ReactionSpec::linear_decay(1, 1.0).unwrap();
        let params = YosidaParams::new(1.0);
        let w = resolvent(&spec, &params, &[2.0]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn zero_reaction_has_identity_resolvent() {
        let spec = ReactionSpec::zero(3);
        let params = YosidaParams::new(0.7);
        let v = vec![0.4, -1.2, 2.5];
        let w = resolvent(&spec, &params, &v).unwrap();
        for (a, b) in w.iter().zip(v.iter()) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-15);
        }
    }

    #[test]
    fn cubic_resolvent_finds_real_root() {
        let spec = ReactionSpec::cubic_decay(1, 1.0).unwrap();
        let params = YosidaParams::new(1.0);
        let w = resolvent(&spec, &params, &[2.0]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn yosida_of_zero_reaction_vanishes() {
        let spec = ReactionSpec::zero(2);
        let params = YosidaParams::new(0.3);
        let y = yosida(&spec, &params, &[1.0, -2.0]).unwrap();
        assert_abs_diff_eq!(vec_norm(&y), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn yosida_of_linear_reaction_matches_algebra() {
        let spec = ReactionSpec::linear_decay(1, 1.0).unwrap();
        let params = YosidaParams::new(1.0);
        let y = yosida(&spec, &params, &[2.0]).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn yosida_of_cubic_reaction_matches_root() {
        let spec = ReactionSpec::cubic_decay(1, 1.0).unwrap();
        let params = YosidaParams::new(1.0);
        let y = yosida(&spec, &params, &[2.0]).unwrap();
        assert_abs_diff_eq!(y[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn yosida_fixes_origin_when_reaction_does() {
        let spec = ReactionSpec::cubic_decay(2, 0.8).unwrap();
        let params = YosidaParams::new(0.05);
        let y = yosida(&spec, &params, &[0.0, 0.0]).unwrap();
        assert!(vec_norm(&y) <= 1e-12);
    }

    #[test]
    fn registration_rejects_wrong_jacobian() {
        let err = ReactionSpec::new(
            1,
            Arc::new(|x: &[f64], out: &mut [f64]| out[0] = x[0] * x[0]),
            Arc::new(|_x: &[f64], out: &mut DMat| out[(0, 0)] = 1.0),
        )
        .unwrap_err();
        assert!(matches!(err, ReactionError::JacobianMismatch { .. }));
    }

    #[test]
    fn cubic_probe_is_fully_monotone() {
        let spec = ReactionSpec::cubic_decay(2, 1.0).unwrap();
        let mut state = 42u64;
        let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..200)
            .map(|_| {
                let a: Vec<f64> = (0..2).map(|_| 4.0 * splitmix(&mut state) - 2.0).collect();
                let b: Vec<f64> = (0..2).map(|_| 4.0 * splitmix(&mut state) - 2.0).collect();
                (a, b)
            })
            .collect();
        let report = accretivity_probe(&spec, &samples);
        assert_abs_diff_eq!(report.monotone_fraction, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(report.f_origin, 0.0, epsilon = 1e-15);
        assert!(report.sign_condition_min.is_none());
    }

    #[test]
    fn coupled_probe_reports_origin_and_sign_values() {
        let spec = ReactionSpec::coupled_product(1.0, 1.0).unwrap();
        let samples = vec![(vec![1.0, 2.0], vec![1.0, 2.0])];
        let report = accretivity_probe(&spec, &samples);
        assert_abs_diff_eq!(report.f_origin, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(report.sign_condition_min.unwrap(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn growth_reaction_under_direct_orientation_is_monotone() {
        let spec = ReactionSpec::new(
            1,
            Arc::new(|x: &[f64], out: &mut [f64]| out[0] = x[0]),
            Arc::new(|_x: &[f64], out: &mut DMat| out[(0, 0)] = 1.0),
        )
        .unwrap()
        .with_orientation(Orientation::DirectReaction);
        let params = YosidaParams::new(1.0);
        let w = resolvent(&spec, &params, &[2.0]).unwrap();
        assert_abs_diff_eq!(w[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn resolvent_field_applies_per_node() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Neumann, &[4]).unwrap());
        let state =
            FieldState::from_grid(Arc::clone(&basis), 1, vec![2.0, 0.0, -2.0, 1.0]).unwrap();
        let spec = ReactionSpec::cubic_decay(1, 1.0).unwrap();
        let params = YosidaParams::new(1.0);
        let image = resolvent_field(&spec, &params, &state).unwrap();
        let got = image.grid_component(0).unwrap();
        assert_abs_diff_eq!(got[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(got[2], -1.0, epsilon = 1e-12);
    }

    #[test]
    fn scalar_field_exposes_pointwise_product() {
        let basis = Arc::new(build_basis(1, &[1.0], BoundaryKind::Neumann, &[3]).unwrap());
        let state =
            FieldState::from_grid(Arc::clone(&basis), 2, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
                .unwrap();
        let spec = ReactionSpec::coupled_product(1.0, 2.0).unwrap();
        let f = scalar_field(&spec, &state).unwrap().unwrap();
        assert_eq!(f, vec![4.0, 10.0, 18.0]);
        let general = ReactionSpec::zero(2);
        assert!(scalar_field(&general, &state).unwrap().is_none());
    }

    #[test]
    fn stiff_resolvent_overflow_is_reported_not_propagated() {
        let spec = ReactionSpec::new(
            1,
            Arc::new(|x: &[f64], out: &mut [f64]| out[0] = libm::exp(x[0])),
            Arc::new(|x: &[f64], out: &mut DMat| out[(0, 0)] = libm::exp(x[0])),
        )
        .unwrap();
        let params = YosidaParams::new(1.0);
        let outcome = resolvent(&spec, &params, &[800.0]);
        assert!(matches!(
            outcome,
            Err(ReactionError::NewtonDivergence { .. }) | Err(ReactionError::NonFiniteValue)
        ));
    }
}

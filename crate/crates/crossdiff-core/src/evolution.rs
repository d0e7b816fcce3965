//! Time stepping by operator splitting and the regularized stationary solve.
//!
//! Each step alternates exact modal diffusion with an implicit pointwise
//! reaction substep built from the resolvent, so monotone reactions keep
//! every substep nonexpansive and the discrete flow inherits the
//! contraction of the continuous problem. The symmetric scheme replaces
//! backward Euler by the reflected resolvent in its middle substep, which
//! restores second order while staying nonexpansive.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::analysis::{check_h0, AnalysisError, DiffusionMatrix};
use crate::linalg::gmres::{gmres, GmresOptions};
use crate::linalg::lu::Lu;
use crate::linalg::{vec_norm, DMat};
use crate::reaction::{
    resolvent, resolvent_field, yosida, ReactionError, ReactionSpec, YosidaParams,
};
use crate::semigroup::{H0Policy, ModalPropagator, SemigroupError};
use crate::spectral::{BoundaryKind, FieldState, SpectralError};

/// Failures while advancing in time or solving the stationary problem.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EvolutionError {
    #[error("time step {step} failed: {source}")]
    StepFailed { step: usize, source: ReactionError },
    #[error("stationary Newton iteration stalled at relative residual {residual:.3e}")]
    StationaryDivergence { residual: f64 },
    #[error("stationary solution norm {norm:.6e} exceeds the a-priori bound {bound:.6e}")]
    BoundViolated { norm: f64, bound: f64 },
    #[error("{0}")]
    InvalidProblem(&'static str),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Splitting order of one time step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplitOrder {
    /// Diffusion over dt, then implicit Euler reaction over dt.
    Lie,
    /// Half diffusion, reflected-resolvent reaction over dt, half diffusion.
    Strang,
}

/// A validated time-stepping scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitScheme {
    pub order: SplitOrder,
    pub dt: f64,
    pub steps: usize,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl SplitScheme {
    pub fn new(order: SplitOrder, dt: f64, steps: usize) -> Result<Self, EvolutionError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(EvolutionError::InvalidProblem(
                "time step must be positive and finite",
            ));
        }
        if steps == 0 {
            return Err(EvolutionError::InvalidProblem(
                "step count must be at least one",
            ));
        }
        Ok(SplitScheme {
            order,
            dt,
            steps,
            newton_tol: 1e-12,
            newton_max_iter: 50,
        })
    }

    /// Scheme reaching `final_time` in `steps` equal increments.
    pub fn for_final_time(
        order: SplitOrder,
        final_time: f64,
        steps: usize,
    ) -> Result<Self, EvolutionError> {
        if !final_time.is_finite() || final_time <= 0.0 {
            return Err(EvolutionError::InvalidProblem(
                "final time must be positive and finite",
            ));
        }
        if steps == 0 {
            return Err(EvolutionError::InvalidProblem(
                "step count must be at least one",
            ));
        }
        Self::new(order, final_time / steps as f64, steps)
    }

    pub fn final_time(&self) -> f64 {
        self.dt * self.steps as f64
    }

    /// Confirms dt·steps reproduces the requested horizon to 1e−12.
    pub fn covers(&self, final_time: f64) -> bool {
        libm::fabs(self.final_time() - final_time) <= 1e-12 * (1.0 + libm::fabs(final_time))
    }

    fn reaction_params(&self) -> YosidaParams {
        let lambda = match self.order {
            SplitOrder::Lie => self.dt,
            SplitOrder::Strang => 0.5 * self.dt,
        };
        YosidaParams {
            lambda,
            newton_tol: self.newton_tol,
            newton_max_iter: self.newton_max_iter,
        }
    }
}

/// Reusable machinery for repeated steps of one scheme.
pub struct Stepper {
    scheme: SplitScheme,
    diffusion: ModalPropagator,
    params: YosidaParams,
}

impl Stepper {
    pub fn new(
        state: &FieldState,
        m: &DiffusionMatrix,
        scheme: SplitScheme,
        policy: H0Policy,
    ) -> Result<Self, EvolutionError> {
        let increment = match scheme.order {
            SplitOrder::Lie => scheme.dt,
            SplitOrder::Strang => 0.5 * scheme.dt,
        };
        let diffusion = ModalPropagator::new(state.basis(), m, increment, policy)?;
        Ok(Stepper {
            scheme,
            diffusion,
            params: scheme.reaction_params(),
        })
    }

    /// Advances `state` by one step of the scheme, leaving both
    /// representations in place.
    pub fn advance(
        &self,
        state: &mut FieldState,
        spec: &ReactionSpec,
    ) -> Result<(), EvolutionError> {
        match self.scheme.order {
            SplitOrder::Lie => {
                state.ensure_modal()?;
                self.diffusion.apply_in_place(state)?;
                state.ensure_grid()?;
                *state = resolvent_field(spec, &self.params, state)?;
            }
            SplitOrder::Strang => {
                state.ensure_modal()?;
                self.diffusion.apply_in_place(state)?;
                state.ensure_grid()?;
                *state = reflected_resolvent_field(spec, &self.params, state)?;
                state.ensure_modal()?;
                self.diffusion.apply_in_place(state)?;
            }
        }
        state.ensure_modal()?;
        state.ensure_grid()?;
        Ok(())
    }
}

/// The reflected resolvent 2(I + λR)⁻¹ − I applied node by node.
fn reflected_resolvent_field(
    spec: &ReactionSpec,
    params: &YosidaParams,
    state: &FieldState,
) -> Result<FieldState, ReactionError> {
    let resolved = resolvent_field(spec, params, state)?;
    let d = state.components();
    let n = state.basis().node_count();
    let mut out = alloc::vec![0.0; d * n];
    for c in 0..d {
        let u = state.grid_component(c)?;
        let w = resolved.grid_component(c)?;
        for j in 0..n {
            out[c * n + j] = 2.0 * w[j] - u[j];
        }
    }
    let mut result = state.clone();
    result.set_grid(out)?;
    Ok(result)
}

/// One discrete increment of the splitting scheme.
pub fn step(
    state: &FieldState,
    m: &DiffusionMatrix,
    spec: &ReactionSpec,
    scheme: SplitScheme,
) -> Result<FieldState, EvolutionError> {
    let stepper = Stepper::new(state, m, scheme, H0Policy::Enforce)?;
    let mut out = state.clone();
    stepper.advance(&mut out, spec)?;
    Ok(out)
}

/// Scalar functional evaluated on every emitted frame.
pub type BalanceFunctional = Arc<dyn Fn(&FieldState) -> f64 + Send + Sync>;

/// Run controls beyond the scheme itself.
#[derive(Clone)]
pub struct EvolutionOptions {
    pub scheme: SplitScheme,
    pub frame_stride: usize,
    pub policy: H0Policy,
    pub balance: Option<BalanceFunctional>,
}

impl core::fmt::Debug for EvolutionOptions {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EvolutionOptions")
            .field("scheme", &self.scheme)
            .field("frame_stride", &self.frame_stride)
            .field("policy", &self.policy)
            .field("balance", &self.balance.is_some())
            .finish()
    }
}

impl EvolutionOptions {
    pub fn new(scheme: SplitScheme) -> Self {
        EvolutionOptions {
            scheme,
            frame_stride: 1,
            policy: H0Policy::Enforce,
            balance: None,
        }
    }

    pub fn with_frame_stride(mut self, stride: usize) -> Self {
        self.frame_stride = stride;
        self
    }

    pub fn with_policy(mut self, policy: H0Policy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_balance(mut self, balance: BalanceFunctional) -> Self {
        self.balance = Some(balance);
        self
    }
}

/// State snapshot with per-component diagnostics.
#[derive(Clone, Debug)]
pub struct FrameOutput {
    pub step: usize,
    pub time: f64,
    pub state: FieldState,
    pub component_l2: Vec<f64>,
    pub component_min: Vec<f64>,
    pub component_max: Vec<f64>,
    pub balance: Option<f64>,
}

/// A completed trajectory.
#[derive(Clone, Debug)]
pub struct EvolutionRun {
    pub frames: Vec<FrameOutput>,
    pub steps_completed: usize,
    pub final_time: f64,
}

fn make_frame(
    step: usize,
    time: f64,
    state: &FieldState,
    balance: &Option<BalanceFunctional>,
) -> Result<FrameOutput, EvolutionError> {
    let d = state.components();
    let weight = state.basis().node_weight();
    let mut l2 = Vec::with_capacity(d);
    let mut min = Vec::with_capacity(d);
    let mut max = Vec::with_capacity(d);
    for c in 0..d {
        let g = state.grid_component(c)?;
        let mut sum = 0.0;
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for v in g {
            sum += v * v * weight;
            lo = lo.min(*v);
            hi = hi.max(*v);
        }
        l2.push(libm::sqrt(sum));
        min.push(lo);
        max.push(hi);
    }
    Ok(FrameOutput {
        step,
        time,
        state: state.clone(),
        component_l2: l2,
        component_min: min,
        component_max: max,
        balance: balance.as_ref().map(|q| q(state)),
    })
}

/// Advances the initial field through the whole scheme, emitting frames at
/// the configured stride (first and last step always included).
pub fn solve_evolution(
    initial: &FieldState,
    m: &DiffusionMatrix,
    spec: &ReactionSpec,
    options: &EvolutionOptions,
) -> Result<EvolutionRun, EvolutionError> {
    if options.frame_stride == 0 {
        return Err(EvolutionError::InvalidProblem(
            "frame stride must be at least one",
        ));
    }
    let mut state = initial.clone();
    state.ensure_modal()?;
    state.ensure_grid()?;
    let stepper = Stepper::new(&state, m, options.scheme, options.policy)?;

    let mut frames = Vec::new();
    frames.push(make_frame(0, 0.0, &state, &options.balance)?);
    let total = options.scheme.steps;
    for k in 1..=total {
        stepper.advance(&mut state, spec).map_err(|err| match err {
            EvolutionError::Reaction(source) => EvolutionError::StepFailed { step: k, source },
            other => other,
        })?;
        if k % options.frame_stride == 0 || k == total {
            frames.push(make_frame(
                k,
                k as f64 * options.scheme.dt,
                &state,
                &options.balance,
            )?);
        }
    }
    Ok(EvolutionRun {
        frames,
        steps_completed: total,
        final_time: options.scheme.final_time(),
    })
}

/// The regularized stationary problem ε·u − MΔu + R_λ(u) = v.
#[derive(Clone, Debug)]
pub struct StationaryProblem {
    pub epsilon: f64,
    pub v: FieldState,
    pub lambda: f64,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
}

impl StationaryProblem {
    pub fn new(epsilon: f64, v: FieldState, lambda: f64) -> Result<Self, EvolutionError> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(EvolutionError::InvalidProblem(
                "stationary shift epsilon must be positive and finite",
            ));
        }
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(EvolutionError::InvalidProblem(
                "regularization parameter lambda must be positive and finite",
            ));
        }
        Ok(StationaryProblem {
            epsilon,
            v,
            lambda,
            newton_tol: 1e-10,
            newton_max_iter: 50,
        })
    }
}

struct StationaryWorkspace<'a> {
    basis: Arc<crate::spectral::SpectralBasis>,
    spec: &'a ReactionSpec,
    d: usize,
    n: usize,
    epsilon: f64,
    m: DMat,
    params: YosidaParams,
    mode_solvers: Vec<Lu>,
    node_jacobians: Vec<DMat>,
}

impl<'a> StationaryWorkspace<'a> {
    fn to_grid(&self, modal: &[f64]) -> Result<Vec<f64>, EvolutionError> {
        let mut state = FieldState::from_modal(Arc::clone(&self.basis), self.d, modal.to_vec())?;
        state.ensure_grid()?;
        let mut out = alloc::vec![0.0; self.d * self.n];
        for c in 0..self.d {
            out[c * self.n..(c + 1) * self.n].copy_from_slice(state.grid_component(c)?);
        }
        Ok(out)
    }

    fn to_modal(&self, grid: Vec<f64>) -> Result<Vec<f64>, EvolutionError> {
        let mut state = FieldState::from_grid(Arc::clone(&self.basis), self.d, grid)?;
        state.ensure_modal()?;
        let mut out = alloc::vec![0.0; self.d * self.n];
        for c in 0..self.d {
            out[c * self.n..(c + 1) * self.n].copy_from_slice(state.modal_component(c)?);
        }
        Ok(out)
    }

    fn linear_apply(&self, modal: &[f64], out: &mut [f64]) {
        let (d, n) = (self.d, self.n);
        let mu = self.basis.mu();
        let mut coeff = alloc::vec![0.0; d];
        let mut image = alloc::vec![0.0; d];
        for k in 0..n {
            for c in 0..d {
                coeff[c] = modal[c * n + k];
            }
            self.m.matvec(&coeff, &mut image);
            for c in 0..d {
                out[c * n + k] = self.epsilon * coeff[c] + mu[k] * image[c];
            }
        }
    }

    /// Residual of G(u) = εu − MΔu + R_λ(u) − v in modal space; refreshes
    /// the cached per-node Jacobians of R_λ.
    fn residual(
        &mut self,
        u_modal: &[f64],
        v_modal: &[f64],
        out: &mut [f64],
    ) -> Result<(), EvolutionError> {
        let (d, n) = (self.d, self.n);
        let grid = self.to_grid(u_modal)?;
        let mut ry_grid = alloc::vec![0.0; d * n];
        let mut x = alloc::vec![0.0; d];
        let mut jr = DMat::zeros(d, d);
        let lambda = self.params.lambda;
        for j in 0..n {
            for c in 0..d {
                x[c] = grid[c * n + j];
            }
            let w = resolvent(self.spec, &self.params, &x)?;
            for c in 0..d {
                ry_grid[c * n + j] = (x[c] - w[c]) / lambda;
            }
            self.spec.eval_jacobian(&w, &mut jr);
            if self.spec.orientation() == crate::reaction::Orientation::NegatedReaction {
                jr.scale_mut(-1.0);
            }
            let mut b = DMat::identity(d);
            b.axpy(lambda, &jr);
            let lu = Lu::factor(&b).ok_or(EvolutionError::StationaryDivergence {
                residual: f64::INFINITY,
            })?;
            let inv = lu.solve_mat(&DMat::identity(d));
            let mut y = DMat::identity(d);
            y.axpy(-1.0, &inv);
            y.scale_mut(1.0 / lambda);
            self.node_jacobians[j] = y;
        }
        let ry_modal = self.to_modal(ry_grid)?;
        self.linear_apply(u_modal, out);
        for i in 0..d * n {
            out[i] += ry_modal[i] - v_modal[i];
        }
        Ok(())
    }

    fn jacobian_apply(&self, delta: &[f64], out: &mut [f64]) -> Result<(), EvolutionError> {
        let (d, n) = (self.d, self.n);
        self.linear_apply(delta, out);
        let grid = self.to_grid(delta)?;
        let mut mapped = alloc::vec![0.0; d * n];
        let mut x = alloc::vec![0.0; d];
        let mut y = alloc::vec![0.0; d];
        for j in 0..n {
            for c in 0..d {
                x[c] = grid[c * n + j];
            }
            self.node_jacobians[j].matvec(&x, &mut y);
            for c in 0..d {
                mapped[c * n + j] = y[c];
            }
        }
        let modal = self.to_modal(mapped)?;
        for i in 0..d * n {
            out[i] += modal[i];
        }
        Ok(())
    }

    fn precondition(&self, r: &[f64], out: &mut [f64]) {
        let (d, n) = (self.d, self.n);
        let mut coeff = alloc::vec![0.0; d];
        for k in 0..n {
            for c in 0..d {
                coeff[c] = r[c * n + k];
            }
            self.mode_solvers[k].solve_vec(&mut coeff);
            for c in 0..d {
                out[c * n + k] = coeff[c];
            }
        }
    }
}

/// Solves the regularized stationary problem by Newton over exact modal
/// preconditioning, then checks the a-priori norm bound.
pub fn solve_stationary(
    problem: &StationaryProblem,
    m: &DiffusionMatrix,
    spec: &ReactionSpec,
) -> Result<FieldState, EvolutionError> {
    let basis = Arc::clone(problem.v.basis());
    if basis.bc() != BoundaryKind::Dirichlet {
        return Err(EvolutionError::InvalidProblem(
            "stationary solve requires a Dirichlet basis",
        ));
    }
    let d = m.dim();
    if problem.v.components() != d || spec.dim() != d {
        return Err(EvolutionError::InvalidProblem(
            "field, matrix, and reaction dimensions must agree",
        ));
    }
    let report = check_h0(m)?;
    if !report.h0_pass || !report.symbol_accretive {
        return Err(EvolutionError::InvalidProblem(
            "stationary solve requires an accretive modal symbol",
        ));
    }

    let n = basis.mode_count();
    let mut v = problem.v.clone();
    v.ensure_modal()?;
    let mut v_modal = alloc::vec![0.0; d * n];
    for c in 0..d {
        v_modal[c * n..(c + 1) * n].copy_from_slice(v.modal_component(c)?);
    }
    let v_norm = vec_norm(&v_modal);

    let mode_solvers: Vec<Lu> = basis
        .mu()
        .iter()
        .map(|mu| {
            let mut block = m.matrix().scaled(*mu);
            for i in 0..d {
                block[(i, i)] += problem.epsilon;
            }
            Lu::factor(&block).ok_or(EvolutionError::InvalidProblem(
                "modal preconditioner block is singular",
            ))
        })
        .collect::<Result<_, _>>()?;

    let mut ws = StationaryWorkspace {
        basis: Arc::clone(&basis),
        spec,
        d,
        n,
        epsilon: problem.epsilon,
        m: m.matrix().clone(),
        params: YosidaParams {
            lambda: problem.lambda,
            newton_tol: 1e-13,
            newton_max_iter: 60,
        },
        mode_solvers,
        node_jacobians: alloc::vec![DMat::zeros(d, d); n],
    };

    let mut u = alloc::vec![0.0; d * n];
    ws.precondition(&v_modal, &mut u);

    let tol = 1e-10 * v_norm + 1e-14;
    let mut g = alloc::vec![0.0; d * n];
    ws.residual(&u, &v_modal, &mut g)?;
    let mut res = vec_norm(&g);
    let mut converged = res <= tol;
    let mut trial_g = alloc::vec![0.0; d * n];

    for _ in 0..problem.newton_max_iter {
        if converged {
            break;
        }
        let mut delta = alloc::vec![0.0; d * n];
        let apply = |x: &[f64], y: &mut [f64]| {
            ws.jacobian_apply(x, y)
                .expect("modal transform failed during Jacobian application");
        };
        let precond = |x: &[f64], y: &mut [f64]| ws.precondition(x, y);
        let opts = GmresOptions {
            restart: 60,
            max_cycles: 20,
            rel_tol: 1e-10,
            abs_tol: 1e-16,
        };
        gmres(apply, precond, &g, &mut delta, &opts);

        let mut alpha = 1.0f64;
        loop {
            let trial: Vec<f64> = u
                .iter()
                .zip(delta.iter())
                .map(|(ui, di)| ui - alpha * di)
                .collect();
            ws.residual(&trial, &v_modal, &mut trial_g)?;
            let trial_res = vec_norm(&trial_g);
            if trial_res.is_finite() && trial_res <= (1.0 - 0.5 * alpha) * res {
                u = trial;
                g.copy_from_slice(&trial_g);
                res = trial_res;
                break;
            }
            alpha *= 0.5;
            if alpha < 1e-8 {
                return Err(EvolutionError::StationaryDivergence {
                    residual: res / (v_norm + 1e-300),
                });
            }
        }
        converged = res <= tol;
    }
    if !converged {
        return Err(EvolutionError::StationaryDivergence {
            residual: res / (v_norm + 1e-300),
        });
    }

    let norm = vec_norm(&u);
    let bound = v_norm / problem.epsilon + 1e-8;
    if norm > bound {
        return Err(EvolutionError::BoundViolated { norm, bound });
    }
    let mut out = FieldState::from_modal(Arc::clone(&basis), d, u)?;
    out.ensure_grid()?;
    Ok(out)
}

/// Discrete inner product ⟨−MΔu, R_λ(u)⟩ with quadrature weights.
pub fn coupling_integral(
    u: &FieldState,
    m: &DiffusionMatrix,
    spec: &ReactionSpec,
    params: &YosidaParams,
) -> Result<f64, EvolutionError> {
    let d = u.components();
    if m.dim() != d || spec.dim() != d {
        return Err(EvolutionError::InvalidProblem(
            "field, matrix, and reaction dimensions must agree",
        ));
    }
    let mut work = u.clone();
    work.ensure_modal()?;
    work.ensure_grid()?;
    let basis = Arc::clone(work.basis());
    let n = basis.mode_count();
    let mu = basis.mu();

    let mut t_modal = alloc::vec![0.0; d * n];
    let mut coeff = alloc::vec![0.0; d];
    let mut image = alloc::vec![0.0; d];
    for k in 0..n {
        for (c, slot) in coeff.iter_mut().enumerate() {
            *slot = work.modal_component(c)?[k];
        }
        m.matrix().matvec(&coeff, &mut image);
        for c in 0..d {
            t_modal[c * n + k] = mu[k] * image[c];
        }
    }
    let mut t_state = FieldState::from_modal(Arc::clone(&basis), d, t_modal)?;
    t_state.ensure_grid()?;

    let nodes = basis.node_count();
    let weight = basis.node_weight();
    let mut x = alloc::vec![0.0; d];
    let mut total = 0.0;
    for j in 0..nodes {
        for (c, slot) in x.iter_mut().enumerate() {
            *slot = work.grid_component(c)?[j];
        }
        let ry = yosida(spec, params, &x)?;
        for (c, r) in ry.iter().enumerate() {
            total += t_state.grid_component(c)?[j] * r * weight;
        }
    }
    Ok(total)
}

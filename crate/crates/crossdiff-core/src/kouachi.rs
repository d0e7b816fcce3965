//! Preset assembly for the two-component model with matrix [[α, β], [γ, α]].
//!
//! The preset couples equal diagonal diffusion with the reaction pair
//! (−σ f(u,v), ρ f(u,v)) under Neumann boundaries. Its matrix has the
//! closed-form spectrum {α ± √(βγ)}, and the weighted mass ∫(ρu + σv)
//! is conserved along trajectories because the reaction cancels in that
//! combination pointwise and Neumann diffusion moves no net mass.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::analysis::{
    kouachi_conditions, AnalysisError, DiffusionMatrix, KouachiConditions, WellPosednessReport,
};
use crate::evolution::BalanceFunctional;
use crate::reaction::{accretivity_probe, ReactionError, ReactionSpec};
use crate::spectral::{build_basis, BoundaryKind, FieldState, SpectralBasis, SpectralError};

/// Failures while assembling the preset.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum KouachiError {
    #[error("{0}")]
    InvalidParameter(&'static str),
    #[error("unknown scalar coupling `{0}`")]
    UnknownScalar(String),
    #[error("diagonal dominance 2α > β + γ fails: 2·{alpha} = {lhs} vs {rhs}")]
    ConditionFailed { alpha: f64, lhs: f64, rhs: f64 },
    #[error("matrix eigenvalue {min_eigenvalue:.6e} lies outside the closed right half-plane")]
    Inadmissible { min_eigenvalue: f64 },
    #[error("scalar coupling does not vanish at the origin: |f(0,0)| = {value:.3e}")]
    OriginNotFixed { value: f64 },
    #[error(transparent)]
    Reaction(#[from] ReactionError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Whether the diagonal dominance inequality is required or merely reported.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConditionPolicy {
    #[default]
    Strict,
    Lenient,
}

/// Parameters of the preset model.
#[derive(Clone, Debug, PartialEq)]
pub struct KouachiParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub rho: f64,
    pub f_name: String,
    pub f_params: BTreeMap<String, f64>,
}

impl KouachiParams {
    pub fn new(
        alpha: f64,
        beta: f64,
        gamma: f64,
        sigma: f64,
        rho: f64,
    ) -> Result<Self, KouachiError> {
        for value in [alpha, beta, gamma, sigma, rho] {
            if !value.is_finite() || value <= 0.0 {
                return Err(KouachiError::InvalidParameter(
                    "all five model constants must be positive and finite",
                ));
            }
        }
        Ok(KouachiParams {
            alpha,
            beta,
            gamma,
            sigma,
            rho,
            f_name: String::from("product"),
            f_params: BTreeMap::new(),
        })
    }

    pub fn with_scalar(mut self, name: &str, params: BTreeMap<String, f64>) -> Self {
        self.f_name = String::from(name);
        self.f_params = params;
        self
    }

    /// The diffusion matrix [[α, β], [γ, α]].
    pub fn matrix(&self) -> DiffusionMatrix {
        DiffusionMatrix::equal_diagonal(self.alpha, self.beta, self.gamma)
            .expect("validated parameters always build a finite matrix")
    }

    /// Closed-form spectrum {α + √(βγ), α − √(βγ)}.
    pub fn eigenvalues(&self) -> (f64, f64) {
        let root = libm::sqrt(self.beta * self.gamma);
        (self.alpha + root, self.alpha - root)
    }

    fn reaction(&self) -> Result<ReactionSpec, KouachiError> {
        match self.f_name.as_str() {
            "product" => Ok(ReactionSpec::coupled_product(self.sigma, self.rho)?),
            "power" => {
                let m = self.f_params.get("m").copied().unwrap_or(1.0);
                if m < 1.0 || libm::floor(m) != m || m > u32::MAX as f64 {
                    return Err(KouachiError::InvalidParameter(
                        "scalar coupling `power` needs a positive integer parameter m",
                    ));
                }
                Ok(ReactionSpec::coupled_power(self.sigma, self.rho, m as u32)?)
            }
            other => Err(KouachiError::UnknownScalar(String::from(other))),
        }
    }
}

/// A fully assembled preset run configuration.
#[derive(Clone, Debug)]
pub struct KouachiSystem {
    pub params: KouachiParams,
    pub matrix: DiffusionMatrix,
    pub reaction: ReactionSpec,
    pub basis: Arc<SpectralBasis>,
    pub conditions: KouachiConditions,
    pub eigenvalues: (f64, f64),
    pub wellposed: WellPosednessReport,
    pub origin_value: f64,
    pub sign_condition_min: f64,
    pub policy: ConditionPolicy,
    pub notes: Vec<String>,
}

fn splitmix(state: &mut u64) -> f64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}

/// Assembles matrix, reaction, Neumann basis, and analyzer verdicts.
///
/// `sample_box` bounds the rectangle on which the reaction sign expression
/// −σ·u·f + ρ·v·f is sampled; its minimum is reported, not asserted.
pub fn build_kouachi(
    params: &KouachiParams,
    lengths: &[f64],
    modes: &[usize],
    policy: ConditionPolicy,
    sample_box: (f64, f64),
) -> Result<KouachiSystem, KouachiError> {
    let matrix = params.matrix();
    let conditions = kouachi_conditions(params.alpha, params.beta, params.gamma)?;
    let mut notes = Vec::new();

    if !conditions.dominance {
        match policy {
            ConditionPolicy::Strict => {
                return Err(KouachiError::ConditionFailed {
                    alpha: params.alpha,
                    lhs: 2.0 * params.alpha,
                    rhs: params.beta + params.gamma,
                });
            }
            ConditionPolicy::Lenient => {
                notes.push(String::from(
                    "diagonal dominance 2α > β + γ fails; proceeding leniently",
                ));
            }
        }
    }

    let wellposed = crate::analysis::check_h0(&matrix)?;
    if !wellposed.h0_pass {
        let (_, low) = params.eigenvalues();
        return Err(KouachiError::Inadmissible {
            min_eigenvalue: low,
        });
    }

    let reaction = params.reaction()?;
    let origin_value = reaction
        .scalar_value(0.0, 0.0)
        .map(libm::fabs)
        .unwrap_or(f64::INFINITY);
    if origin_value > 1e-12 {
        return Err(KouachiError::OriginNotFixed {
            value: origin_value,
        });
    }

    let (lo, hi) = sample_box;
    if !lo.is_finite() || !hi.is_finite() || hi <= lo {
        return Err(KouachiError::InvalidParameter(
            "sample box must be a finite nonempty interval",
        ));
    }
    let span = hi - lo;
    let mut rng = 0x8A5CD789635D2DFFu64;
    let samples: Vec<(Vec<f64>, Vec<f64>)> = (0..256)
        .map(|_| {
            let a = alloc::vec![
                lo + span * splitmix(&mut rng),
                lo + span * splitmix(&mut rng)
            ];
            let b = alloc::vec![
                lo + span * splitmix(&mut rng),
                lo + span * splitmix(&mut rng)
            ];
            (a, b)
        })
        .collect();
    let probe = accretivity_probe(&reaction, &samples);
    let sign_condition_min = probe.sign_condition_min.unwrap_or(f64::NAN);

    let basis = Arc::new(build_basis(
        lengths.len(),
        lengths,
        BoundaryKind::Neumann,
        modes,
    )?);

    Ok(KouachiSystem {
        params: params.clone(),
        matrix,
        reaction,
        basis,
        conditions,
        eigenvalues: params.eigenvalues(),
        wellposed,
        origin_value,
        sign_condition_min,
        policy,
        notes,
    })
}

/// Weighted mass Q = ∫(ρ·u + σ·v) dx by quadrature.
pub fn balance(state: &FieldState, sigma: f64, rho: f64) -> Result<f64, SpectralError> {
    let u = state.grid_component(0)?;
    let v = state.grid_component(1)?;
    let w = state.basis().node_weight();
    let mut q = 0.0;
    for (a, b) in u.iter().zip(v.iter()) {
        q += (rho * a + sigma * b) * w;
    }
    Ok(q)
}

/// The conserved functional as a frame diagnostic.
pub fn balance_functional(params: &KouachiParams) -> BalanceFunctional {
    let sigma = params.sigma;
    let rho = params.rho;
    Arc::new(move |state: &FieldState| balance(state, sigma, rho).unwrap_or(f64::NAN))
}

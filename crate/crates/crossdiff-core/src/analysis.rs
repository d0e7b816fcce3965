//! Structural analysis of diffusion matrices.
//!
//! A full coupling matrix is admissible for the semigroup construction when
//! its spectrum lies in the closed right half-plane and it is not the zero
//! matrix. This module computes that verdict, estimates the Jordan
//! structure for diagnostics, checks the block commutation and kernel
//! conditions that apply in even dimension, and evaluates the scalar
//! inequalities used by the two-component model with equal diagonal
//! diffusion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::linalg::eigen::{eigenvalues, symmetric_eigenvalues, EigenError};
use crate::linalg::svd::nullity;
use crate::linalg::DMat;

/// Failures surfaced by the analysis routines.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AnalysisError {
    #[error("diffusion matrix must be square with finite entries and dimension at least 1")]
    InvalidMatrix,
    #[error("eigenvalue iteration did not converge; the matrix is numerically pathological")]
    SpectrumError,
    #[error("the zero matrix generates no diffusion and is excluded from the analysis")]
    ZeroMatrix,
    #[error("beta * gamma is negative, so the square root in the eigenvalue formula is not real")]
    NegativeProduct,
}

/// Immutable d-by-d real coupling matrix for the diffusion term.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionMatrix {
    mat: DMat,
}

impl DiffusionMatrix {
    /// Validates dimension and finiteness of row-major entries.
    pub fn new(d: usize, entries: Vec<f64>) -> Result<Self, AnalysisError> {
        if d == 0 || entries.len() != d * d || !entries.iter().all(|v| v.is_finite()) {
            return Err(AnalysisError::InvalidMatrix);
        }
        Ok(DiffusionMatrix {
            mat: DMat::from_vec(d, d, entries),
        })
    }

    /// Convenience constructor from row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, AnalysisError> {
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(AnalysisError::InvalidMatrix);
            }
            entries.extend_from_slice(row);
        }
        DiffusionMatrix::new(d, entries)
    }

    /// Two-component matrix with equal diagonal entries.
    pub fn equal_diagonal(alpha: f64, beta: f64, gamma: f64) -> Result<Self, AnalysisError> {
        DiffusionMatrix::from_rows(&[&[alpha, beta], &[gamma, alpha]])
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    /// Borrow of the underlying matrix.
    pub fn matrix(&self) -> &DMat {
        &self.mat
    }

    pub fn norm_fro(&self) -> f64 {
        self.mat.norm_fro()
    }

    pub fn is_zero(&self) -> bool {
        self.mat.is_zero()
    }

    /// The four square blocks `[M1 M2; M3 M4]` when the dimension is even.
    pub fn half_blocks(&self) -> Option<[DMat; 4]> {
        let d = self.dim();
        if !d.is_multiple_of(2) {
            return None;
        }
        let n = d / 2;
        Some([
            self.mat.block(0, 0, n, n),
            self.mat.block(0, n, n, n),
            self.mat.block(n, 0, n, n),
            self.mat.block(n, n, n, n),
        ])
    }
}

/// Default clustering tolerance for Jordan structure estimation.
pub fn default_cluster_tol(m: &DiffusionMatrix) -> f64 {
    let t = 1e-8 * m.norm_fro();
    if t > 0.0 {
        t
    } else {
        1e-8
    }
}

/// Default tolerance for eigenvalue sign decisions and kernel tests.
pub fn default_eigen_tol(m: &DiffusionMatrix) -> f64 {
    1e-10 * (1.0 + m.norm_fro())
}

/// One eigenvalue with its algebraic multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenvalueGroup {
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Estimated Jordan block sizes attached to one eigenvalue.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanEstimate {
    pub value: Complex64,
    /// Block sizes in descending order; they sum to the multiplicity.
    pub block_sizes: Vec<usize>,
}

/// Spectral structure of a diffusion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<EigenvalueGroup>,
    pub jordan_blocks: Vec<JordanEstimate>,
    /// Frobenius norm of `M Mᵀ - Mᵀ M`.
    pub normality_defect: f64,
    pub min_real_part: f64,
    /// Set when eigenvalue clusters sit close enough together that the
    /// block estimates should be treated as indicative only.
    pub diagnostic: bool,
    pub tol_cluster: f64,
}

struct Cluster {
    center: Complex64,
    multiplicity: usize,
}

fn cluster_eigenvalues(eigs: &[Complex64], tol: f64) -> Vec<Cluster> {
    let n = eigs.len();
    let mut assigned = alloc::vec![usize::MAX; n];
    let mut count = 0usize;
    for i in 0..n {
        if assigned[i] != usize::MAX {
            continue;
        }
        let id = count;
        count += 1;
        assigned[i] = id;
        let mut frontier = alloc::vec![i];
        while let Some(k) = frontier.pop() {
            for j in 0..n {
                if assigned[j] == usize::MAX && (eigs[k] - eigs[j]).norm() <= tol {
                    assigned[j] = id;
                    frontier.push(j);
                }
            }
        }
    }
    let mut clusters = Vec::with_capacity(count);
    for id in 0..count {
        let members: Vec<Complex64> = eigs
            .iter()
            .zip(assigned.iter())
            .filter(|(_, a)| **a == id)
            .map(|(z, _)| *z)
            .collect();
        let sum: Complex64 = members.iter().sum();
        clusters.push(Cluster {
            center: sum / members.len() as f64,
            multiplicity: members.len(),
        });
    }
    clusters.sort_by(|a, b| {
        a.center
            .re
            .partial_cmp(&b.center.re)
            .unwrap()
            .then(a.center.im.partial_cmp(&b.center.im).unwrap())
    });
    clusters
}

/// Weyr nullity sequence for the matrix power rank tests, clamped to the
/// algebraic multiplicity. Returns `(sequence, clamped_or_stalled)`.
fn weyr_sequence(base: &DMat, multiplicity: usize, divisor: usize, tol: f64) -> (Vec<usize>, bool) {
    let mut seq = Vec::new();
    let mut irregular = false;
    let scale = base.norm_fro();
    if scale == 0.0 {
        seq.push(multiplicity);
        return (seq, false);
    }
    let normalized = base.scaled(1.0 / scale);
    let threshold = (tol / scale).max(f64::EPSILON * base.rows() as f64);

    let mut power = normalized.clone();
    let mut prev = 0usize;
    for _k in 1..=multiplicity {
        let raw = nullity(&power, threshold) / divisor;
        let mut nu = raw.min(multiplicity).max(prev);
        if raw > multiplicity {
            irregular = true;
        }
        if nu == prev && nu < multiplicity {
            // rank test failed to reveal further null directions; pad so the
            // sequence still terminates at the multiplicity
            nu = prev + 1;
            irregular = true;
        }
        seq.push(nu);
        prev = nu;
        if nu == multiplicity {
            break;
        }
        power = power.matmul(&normalized);
    }
    (seq, irregular)
}

/// Converts the Weyr increments into block sizes (conjugate partition).
fn blocks_from_weyr(seq: &[usize]) -> Vec<usize> {
    let mut counts = Vec::with_capacity(seq.len());
    let mut prev = 0usize;
    for nu in seq {
        counts.push(nu - prev);
        prev = *nu;
    }
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let mut sizes = Vec::new();
    for i in 1..=max_count {
        let size = counts.iter().filter(|c| **c >= i).count();
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

/// Computes eigenvalues, multiplicities, and Jordan block estimates.
///
/// Eigenvalues closer than `tol_cluster` are merged into one group whose
/// center feeds the rank tests. The block estimates are diagnostics: the
/// evolution solvers never consume them.
pub fn compute_spectrum(
    m: &DiffusionMatrix,
    tol_cluster: f64,
) -> Result<SpectrumReport, AnalysisError> {
    assert!(tol_cluster > 0.0, "cluster tolerance must be positive");
    let d = m.dim();
    let raw = eigenvalues(m.matrix()).map_err(|e| match e {
        EigenError::NoConvergence => AnalysisError::SpectrumError,
        EigenError::NonFinite => AnalysisError::InvalidMatrix,
    })?;

    let clusters = cluster_eigenvalues(&raw, tol_cluster);
    let mut diagnostic = false;
    for i in 0..clusters.len() {
        for j in (i + 1)..clusters.len() {
            if (clusters[i].center - clusters[j].center).norm() < 10.0 * tol_cluster {
                diagnostic = true;
            }
        }
    }

    let ident = DMat::identity(d);
    let mut groups = Vec::new();
    let mut jordan = Vec::new();
    let mut visited = alloc::vec![false; clusters.len()];

    for (ci, cluster) in clusters.iter().enumerate() {
        if visited[ci] {
            continue;
        }
        visited[ci] = true;
        let center = cluster.center;

        if libm::fabs(center.im) <= tol_cluster {
            let lambda = center.re;
            let mut shifted = m.matrix().clone();
            shifted.axpy(-lambda, &ident);
            let (seq, irregular) = weyr_sequence(&shifted, cluster.multiplicity, 1, tol_cluster);
            diagnostic |= irregular;
            let value = Complex64::new(lambda, 0.0);
            groups.push(EigenvalueGroup {
                value,
                multiplicity: cluster.multiplicity,
            });
            jordan.push(JordanEstimate {
                value,
                block_sizes: blocks_from_weyr(&seq),
            });
        } else {
            // find and consume the conjugate cluster
            let mut partner = None;
            for (cj, other) in clusters.iter().enumerate() {
                if cj != ci
                    && !visited[cj]
                    && (other.center - center.conj()).norm() <= 10.0 * tol_cluster
                    && other.multiplicity == cluster.multiplicity
                {
                    partner = Some(cj);
                    break;
                }
            }
            if let Some(cj) = partner {
                visited[cj] = true;
            } else {
                diagnostic = true;
            }

            // real quadratic factor (M - λI)(M - conj(λ)I)
            let mut quad = m.matrix().matmul(m.matrix());
            quad.axpy(-2.0 * center.re, m.matrix());
            quad.axpy(center.norm_sqr(), &ident);
            let (seq, irregular) = weyr_sequence(&quad, cluster.multiplicity, 2, tol_cluster);
            diagnostic |= irregular;
            let sizes = blocks_from_weyr(&seq);

            for value in [center, center.conj()] {
                groups.push(EigenvalueGroup {
                    value,
                    multiplicity: cluster.multiplicity,
                });
                jordan.push(JordanEstimate {
                    value,
                    block_sizes: sizes.clone(),
                });
            }
        }
    }

    groups.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap()
            .then(a.value.im.partial_cmp(&b.value.im).unwrap())
    });
    jordan.sort_by(|a, b| {
        a.value
            .re
            .partial_cmp(&b.value.re)
            .unwrap()
            .then(a.value.im.partial_cmp(&b.value.im).unwrap())
    });

    let mt = m.matrix().transpose();
    let defect = (&m.matrix().matmul(&mt) - &mt.matmul(m.matrix())).norm_fro();
    let min_real = raw.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);

    Ok(SpectrumReport {
        eigenvalues: groups,
        jordan_blocks: jordan,
        normality_defect: defect,
        min_real_part: min_real,
        diagnostic,
        tol_cluster,
    })
}

/// Block conditions that apply when the dimension is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockConditionRecord {
    pub blocks_commute: bool,
    pub m1_invertible: bool,
    pub m4_invertible: bool,
    pub d_even: bool,
}

/// Combined admissibility verdict for a diffusion matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct WellPosednessReport {
    /// Every eigenvalue has real part at least `-tol_eig`.
    pub h0_pass: bool,
    pub is_zero_matrix: bool,
    pub blocks: Option<BlockConditionRecord>,
    /// The Hermitian part of M is positive semidefinite within tolerance,
    /// which makes every modal symbol accretive.
    pub symbol_accretive: bool,
    pub notes: Vec<String>,
}

fn base_report(m: &DiffusionMatrix) -> Result<WellPosednessReport, AnalysisError> {
    let tol = default_eigen_tol(m);
    let eigs = eigenvalues(m.matrix()).map_err(|e| match e {
        EigenError::NoConvergence => AnalysisError::SpectrumError,
        EigenError::NonFinite => AnalysisError::InvalidMatrix,
    })?;
    let min_real = eigs.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let h0_pass = min_real >= -tol;

    let herm_eigs = symmetric_eigenvalues(&m.matrix().symmetric_part());
    let herm_min = herm_eigs.first().copied().unwrap_or(0.0);
    let symbol_accretive = herm_min >= -tol;

    let mut notes = Vec::new();
    if h0_pass && min_real < tol {
        notes.push(format!(
            "an eigenvalue lies within {tol:.3e} of the imaginary axis; the closed half-plane convention admits it"
        ));
    }
    if h0_pass && !symbol_accretive {
        notes.push(String::from(
            "spectrum is admissible but the Hermitian part is indefinite; modal propagators may show transient growth",
        ));
    }

    Ok(WellPosednessReport {
        h0_pass,
        is_zero_matrix: m.is_zero(),
        blocks: None,
        symbol_accretive,
        notes,
    })
}

/// Verdict on the spectral admissibility hypothesis: all eigenvalues in the
/// closed right half-plane, zero matrix excluded.
pub fn check_h0(m: &DiffusionMatrix) -> Result<WellPosednessReport, AnalysisError> {
    if m.is_zero() {
        return Err(AnalysisError::ZeroMatrix);
    }
    base_report(m)
}

/// Block commutation and kernel conditions for even dimension. For odd
/// dimension the record is absent and a note explains why.
pub fn block_conditions(m: &DiffusionMatrix) -> Result<WellPosednessReport, AnalysisError> {
    let mut report = base_report(m)?;
    if report.is_zero_matrix {
        report.notes.push(String::from(
            "the zero matrix is excluded from the semigroup construction",
        ));
    }
    let d = m.dim();
    if !d.is_multiple_of(2) {
        report.notes.push(format!(
            "dimension {d} is odd; the four-block decomposition needs an even dimension"
        ));
        return Ok(report);
    }

    let blocks = m.half_blocks().unwrap();
    let scale = 1.0 + m.norm_fro();
    let commute_tol = 1e-10 * scale * scale;
    let mut blocks_commute = true;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if blocks[i].commutator(&blocks[j]).norm_fro() > commute_tol {
                blocks_commute = false;
            }
        }
    }

    let kernel_tol = default_eigen_tol(m);
    let smallest_sv = |b: &DMat| {
        crate::linalg::svd::singular_values(b)
            .last()
            .copied()
            .unwrap_or(0.0)
    };
    let m1_invertible = smallest_sv(&blocks[0]) > kernel_tol;
    let m4_invertible = smallest_sv(&blocks[3]) > kernel_tol;

    report.notes.push(String::from(
        "kernel conditions on the diagonal block operators reduce to invertibility of M1 and M4 because the Dirichlet Laplacian is injective",
    ));
    report.blocks = Some(BlockConditionRecord {
        blocks_commute,
        m1_invertible,
        m4_invertible,
        d_even: true,
    });
    Ok(report)
}

/// The two scalar inequalities for the equal-diagonal two-component matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KouachiConditions {
    /// `2 alpha > beta + gamma`
    pub dominance: bool,
    /// `alpha > sqrt(beta * gamma)`
    pub positivity: bool,
}

/// Evaluates both inequalities. The first implies the second by the
/// arithmetic-geometric mean inequality whenever the product is nonnegative.
pub fn kouachi_conditions(
    alpha: f64,
    beta: f64,
    gamma: f64,
) -> Result<KouachiConditions, AnalysisError> {
    let product = beta * gamma;
    if product < 0.0 {
        return Err(AnalysisError::NegativeProduct);
    }
    Ok(KouachiConditions {
        dominance: 2.0 * alpha > beta + gamma,
        positivity: alpha > libm::sqrt(product),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_spectrum_and_blocks() {
        let m = DiffusionMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let report = compute_spectrum(&m, default_cluster_tol(&m)).unwrap();
        assert_eq!(report.eigenvalues.len(), 1);
        assert_eq!(report.eigenvalues[0].multiplicity, 2);
        assert_abs_diff_eq!(report.eigenvalues[0].value.re, 1.0, epsilon = 1e-14);
        assert_eq!(report.jordan_blocks[0].block_sizes, alloc::vec![1, 1]);
        assert_abs_diff_eq!(report.normality_defect, 0.0, epsilon = 1e-15);
        assert!(!report.diagnostic);
    }

    #[test]
    fn symmetric_coupling_spectrum() {
        let m = DiffusionMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let report = compute_spectrum(&m, default_cluster_tol(&m)).unwrap();
        let values: Vec<f64> = report.eigenvalues.iter().map(|g| g.value.re).collect();
        assert_abs_diff_eq!(values[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(values[1], 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.min_real_part, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn rotation_generator_spectrum() {
        let m = DiffusionMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let report = compute_spectrum(&m, default_cluster_tol(&m)).unwrap();
        assert_eq!(report.eigenvalues.len(), 2);
        assert_abs_diff_eq!(report.min_real_part, 0.0, epsilon = 1e-13);
        let ims: Vec<f64> = report.eigenvalues.iter().map(|g| g.value.im).collect();
        assert_abs_diff_eq!(ims[0], -1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ims[1], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(report.normality_defect, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn jordan_block_recovered_with_generous_tolerance() {
        // a similarity transform of a 2-block so the QR iteration actually
        // perturbs the double eigenvalue
        let m = DiffusionMatrix::from_rows(&[&[1.3, 0.7], &[-0.12857142857142856, 0.7]]).unwrap();
        // eigenvalues of [[1.3,0.7],[-9/70,0.7]] are both 1.0: trace 2,
        // det = 0.91 + 0.09 = 1.0
        let report = compute_spectrum(&m, 1e-6).unwrap();
        assert_eq!(report.eigenvalues.len(), 1);
        assert_eq!(report.eigenvalues[0].multiplicity, 2);
        assert_eq!(report.jordan_blocks[0].block_sizes, alloc::vec![2]);
    }

    #[test]
    fn multiplicities_always_sum_to_dimension() {
        let m = DiffusionMatrix::from_rows(&[
            &[1.0, 2.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 3.0, -4.0],
            &[0.0, 0.0, 4.0, 3.0],
        ])
        .unwrap();
        let report = compute_spectrum(&m, 1e-6).unwrap();
        let total: usize = report.eigenvalues.iter().map(|g| g.multiplicity).sum();
        assert_eq!(total, 4);
        for est in &report.jordan_blocks {
            let block_sum: usize = est.block_sizes.iter().sum();
            let group = report
                .eigenvalues
                .iter()
                .find(|g| (g.value - est.value).norm() < 1e-9)
                .unwrap();
            assert_eq!(block_sum, group.multiplicity);
        }
    }

    #[test]
    fn h0_rejects_negative_real_part() {
        let m = DiffusionMatrix::from_rows(&[&[-1.0, 0.0], &[0.0, 1.0]]).unwrap();
        let report = check_h0(&m).unwrap();
        assert!(!report.h0_pass);
    }

    #[test]
    fn h0_refuses_zero_matrix() {
        let m = DiffusionMatrix::new(2, alloc::vec![0.0; 4]).unwrap();
        assert_eq!(check_h0(&m).unwrap_err(), AnalysisError::ZeroMatrix);
    }

    #[test]
    fn h0_accepts_symmetric_positive_definite() {
        let m = DiffusionMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]).unwrap();
        let report = check_h0(&m).unwrap();
        assert!(report.h0_pass);
        assert!(report.symbol_accretive);
        assert!(!report.is_zero_matrix);
    }

    #[test]
    fn boundary_spectrum_passes_with_note() {
        let m = DiffusionMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        let report = check_h0(&m).unwrap();
        assert!(report.h0_pass);
        assert!(report.symbol_accretive);
        assert!(!report.notes.is_empty());
    }

    #[test]
    fn block_conditions_for_identity_four() {
        let m = DiffusionMatrix::from_rows(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let report = block_conditions(&m).unwrap();
        let record = report.blocks.unwrap();
        assert!(record.blocks_commute);
        assert!(record.m1_invertible);
        assert!(record.m4_invertible);
        assert!(record.d_even);
    }

    #[test]
    fn scalar_blocks_always_commute() {
        let m = DiffusionMatrix::equal_diagonal(2.0, 1.0, 1.0).unwrap();
        let report = block_conditions(&m).unwrap();
        let record = report.blocks.unwrap();
        assert!(record.blocks_commute);
        assert!(record.m1_invertible);

        let m0 = DiffusionMatrix::equal_diagonal(0.0, 1.0, 1.0).unwrap();
        let record0 = block_conditions(&m0).unwrap().blocks.unwrap();
        assert!(!record0.m1_invertible);
    }

    #[test]
    fn noncommuting_blocks_detected() {
        let m = DiffusionMatrix::from_rows(&[
            &[1.0, 0.0, 0.0, 1.0],
            &[0.0, 2.0, 1.0, 0.0],
            &[1.0, 0.0, 1.0, 0.0],
            &[0.0, 1.0, 0.0, 1.0],
        ])
        .unwrap();
        let record = block_conditions(&m).unwrap().blocks.unwrap();
        assert!(!record.blocks_commute);
    }

    #[test]
    fn odd_dimension_gets_note_instead_of_record() {
        let m = DiffusionMatrix::from_rows(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])
            .unwrap();
        let report = block_conditions(&m).unwrap();
        assert!(report.blocks.is_none());
        assert!(report.notes.iter().any(|n| n.contains("odd")));
    }

    #[test]
    fn inequality_examples() {
        let c = kouachi_conditions(2.0, 1.0, 1.0).unwrap();
        assert!(c.dominance && c.positivity);
        let c = kouachi_conditions(1.0, 1.0, 1.0).unwrap();
        assert!(!c.dominance && !c.positivity);
        let c = kouachi_conditions(5.0, 1.0, 4.0).unwrap();
        assert!(c.dominance && c.positivity);
    }

    #[test]
    fn opposite_sign_product_is_rejected() {
        assert_eq!(
            kouachi_conditions(1.0, 1.0, -1.0).unwrap_err(),
            AnalysisError::NegativeProduct
        );
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(DiffusionMatrix::new(0, Vec::new()).is_err());
        assert!(DiffusionMatrix::new(2, alloc::vec![1.0; 3]).is_err());
        assert!(DiffusionMatrix::new(1, alloc::vec![f64::NAN]).is_err());
    }
}

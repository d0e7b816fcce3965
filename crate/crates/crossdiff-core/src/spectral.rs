//! Laplacian eigenbases on intervals and rectangles.
//!
//! Sine modes realize the homogeneous Dirichlet condition and cosine modes
//! the homogeneous Neumann condition. Collocation nodes are chosen so the
//! discrete quadrature reproduces the continuum orthonormality exactly:
//! interior equispaced nodes for sines, midpoint nodes for cosines. That
//! makes forward and inverse transforms exact inverses of each other and
//! turns the diffusion semigroup into a per-mode matrix multiplication.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::DMat;

/// Homogeneous boundary condition selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Field vanishes on the boundary; sine modes, all eigenvalues positive.
    Dirichlet,
    /// Normal derivative vanishes; cosine modes including the constant.
    Neumann,
}

/// Transform direction for [`FieldState::transform`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Grid values to modal coefficients.
    Forward,
    /// Modal coefficients to grid values.
    Inverse,
}

/// Failures in basis construction or representation handling.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SpectralError {
    #[error("space dimension must be 1 or 2")]
    UnsupportedDim,
    #[error("box lengths must be positive and mode counts at least 1")]
    InvalidDomain,
    #[error("the representation required by this operation is not present")]
    MissingRepresentation,
    #[error("field data length does not match the basis")]
    ShapeMismatch,
}

#[derive(Debug)]
struct Axis {
    length: f64,
    modes: usize,
    nodes: Vec<f64>,
    mu: Vec<f64>,
    /// `phi[(j, k)]` is the k-th orthonormal eigenfunction at node j.
    phi: DMat,
    weight: f64,
}

impl Axis {
    fn build(length: f64, modes: usize, bc: BoundaryKind) -> Axis {
        let n = modes;
        let mut nodes = Vec::with_capacity(n);
        let mut mu = Vec::with_capacity(n);
        let mut phi = DMat::zeros(n, n);
        let weight;
        match bc {
            BoundaryKind::Dirichlet => {
                weight = length / (n as f64 + 1.0);
                for j in 0..n {
                    nodes.push((j as f64 + 1.0) * length / (n as f64 + 1.0));
                }
                let amp = libm::sqrt(2.0 / length);
                for k in 0..n {
                    let wave = (k as f64 + 1.0) * core::f64::consts::PI / length;
                    mu.push(wave * wave);
                    for j in 0..n {
                        phi[(j, k)] = amp * libm::sin(wave * nodes[j]);
                    }
                }
            }
            BoundaryKind::Neumann => {
                weight = length / n as f64;
                for j in 0..n {
                    nodes.push((j as f64 + 0.5) * length / n as f64);
                }
                for k in 0..n {
                    let wave = k as f64 * core::f64::consts::PI / length;
                    mu.push(wave * wave);
                    let amp = if k == 0 {
                        libm::sqrt(1.0 / length)
                    } else {
                        libm::sqrt(2.0 / length)
                    };
                    for j in 0..n {
                        phi[(j, k)] = amp * libm::cos(wave * nodes[j]);
                    }
                }
            }
        }
        Axis {
            length,
            modes: n,
            nodes,
            mu,
            phi,
            weight,
        }
    }
}

/// Discrete Laplacian eigenbasis on a box, with quadrature and transforms.
#[derive(Debug)]
pub struct SpectralBasis {
    space_dim: usize,
    bc: BoundaryKind,
    axes: Vec<Axis>,
    /// Eigenvalues of −Δ in nondecreasing order, one per mode.
    mu: Vec<f64>,
    /// `order[s] = (k1, k2)`: per-axis mode indices of sorted mode `s`.
    order: Vec<(usize, usize)>,
    /// `tensor_to_sorted[k1 * n2 + k2]` is the sorted position of that pair.
    tensor_to_sorted: Vec<usize>,
    node_weight: f64,
}

/// Constructs the eigenbasis. `lengths` and `modes_per_axis` must have one
/// entry per space dimension.
pub fn build_basis(
    space_dim: usize,
    lengths: &[f64],
    bc: BoundaryKind,
    modes_per_axis: &[usize],
) -> Result<SpectralBasis, SpectralError> {
    if space_dim != 1 && space_dim != 2 {
        return Err(SpectralError::UnsupportedDim);
    }
    if lengths.len() != space_dim || modes_per_axis.len() != space_dim {
        return Err(SpectralError::InvalidDomain);
    }
    if lengths.iter().any(|l| !l.is_finite() || *l <= 0.0) || modes_per_axis.contains(&0) {
        return Err(SpectralError::InvalidDomain);
    }

    let axes: Vec<Axis> = (0..space_dim)
        .map(|i| Axis::build(lengths[i], modes_per_axis[i], bc))
        .collect();

    let n2 = if space_dim == 2 { axes[1].modes } else { 1 };
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for k1 in 0..axes[0].modes {
        for k2 in 0..n2 {
            pairs.push((k1, k2));
        }
    }
    let mu_of = |&(k1, k2): &(usize, usize)| {
        axes[0].mu[k1] + if space_dim == 2 { axes[1].mu[k2] } else { 0.0 }
    };
    let mut order = pairs.clone();
    order.sort_by(|a, b| mu_of(a).partial_cmp(&mu_of(b)).unwrap().then(a.cmp(b)));
    let mu: Vec<f64> = order.iter().map(mu_of).collect();
    let mut tensor_to_sorted = vec![0usize; order.len()];
    for (s, (k1, k2)) in order.iter().enumerate() {
        tensor_to_sorted[k1 * n2 + k2] = s;
    }

    let node_weight = axes.iter().map(|a| a.weight).product();

    Ok(SpectralBasis {
        space_dim,
        bc,
        axes,
        mu,
        order,
        tensor_to_sorted,
        node_weight,
    })
}

impl SpectralBasis {
    pub fn space_dim(&self) -> usize {
        self.space_dim
    }

    pub fn bc(&self) -> BoundaryKind {
        self.bc
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.length).collect()
    }

    pub fn modes_per_axis(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.modes).collect()
    }

    /// Total number of modes, which equals the number of grid nodes.
    pub fn mode_count(&self) -> usize {
        self.mu.len()
    }

    pub fn node_count(&self) -> usize {
        self.mu.len()
    }

    /// Eigenvalues of −Δ in nondecreasing order.
    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Quadrature weight of every node (the grid is uniform per axis, so a
    /// single scalar defines the discrete measure).
    pub fn node_weight(&self) -> f64 {
        self.node_weight
    }

    /// Measure of the box.
    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| a.length).product()
    }

    /// Coordinates of grid node `j` (second entry 0 in one dimension).
    /// Nodes are ordered with the second axis fastest.
    pub fn node(&self, j: usize) -> (f64, f64) {
        if self.space_dim == 1 {
            (self.axes[0].nodes[j], 0.0)
        } else {
            let n2 = self.axes[1].modes;
            (self.axes[0].nodes[j / n2], self.axes[1].nodes[j % n2])
        }
    }

    /// Projects one grid component onto modal coefficients.
    fn analyze(&self, grid: &[f64], modal: &mut [f64]) {
        match self.space_dim {
            1 => {
                let axis = &self.axes[0];
                for (s, slot) in modal.iter_mut().enumerate() {
                    let (k, _) = self.order[s];
                    let mut acc = 0.0;
                    for (j, value) in grid.iter().enumerate() {
                        acc += axis.phi[(j, k)] * value;
                    }
                    *slot = acc * axis.weight;
                }
            }
            _ => {
                let (ax, ay) = (&self.axes[0], &self.axes[1]);
                let (n1, n2) = (ax.modes, ay.modes);
                let g = DMat::from_vec(n1, n2, grid.to_vec());
                let tensor = &ax.phi.transpose().matmul(&g) * &ay.phi;
                for k1 in 0..n1 {
                    for k2 in 0..n2 {
                        modal[self.tensor_to_sorted[k1 * n2 + k2]] =
                            tensor[(k1, k2)] * self.node_weight;
                    }
                }
            }
        }
    }

    /// Evaluates one modal component on the grid.
    fn synthesize(&self, modal: &[f64], grid: &mut [f64]) {
        match self.space_dim {
            1 => {
                let axis = &self.axes[0];
                for v in grid.iter_mut() {
                    *v = 0.0;
                }
                for (s, &c) in modal.iter().enumerate() {
                    let (k, _) = self.order[s];
                    if c == 0.0 {
                        continue;
                    }
                    for (j, slot) in grid.iter_mut().enumerate() {
                        *slot += c * axis.phi[(j, k)];
                    }
                }
            }
            _ => {
                let (ax, ay) = (&self.axes[0], &self.axes[1]);
                let (n1, n2) = (ax.modes, ay.modes);
                let mut tensor = DMat::zeros(n1, n2);
                for k1 in 0..n1 {
                    for k2 in 0..n2 {
                        tensor[(k1, k2)] = modal[self.tensor_to_sorted[k1 * n2 + k2]];
                    }
                }
                let g = &ax.phi.matmul(&tensor) * &ay.phi.transpose();
                grid.copy_from_slice(g.as_slice());
            }
        }
    }
}

/// A d-component field carrying grid values, modal coefficients, or both.
#[derive(Clone, Debug)]
pub struct FieldState {
    basis: Arc<SpectralBasis>,
    components: usize,
    grid: Option<Vec<f64>>,
    modal: Option<Vec<f64>>,
}

impl FieldState {
    /// Wraps grid values, component-major (`data[c * nodes + j]`).
    pub fn from_grid(
        basis: Arc<SpectralBasis>,
        components: usize,
        data: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        if components == 0 || data.len() != components * basis.node_count() {
            return Err(SpectralError::ShapeMismatch);
        }
        Ok(FieldState {
            basis,
            components,
            grid: Some(data),
            modal: None,
        })
    }

    /// Wraps modal coefficients, component-major (`data[c * modes + s]`).
    pub fn from_modal(
        basis: Arc<SpectralBasis>,
        components: usize,
        data: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        if components == 0 || data.len() != components * basis.mode_count() {
            return Err(SpectralError::ShapeMismatch);
        }
        Ok(FieldState {
            basis,
            components,
            grid: None,
            modal: Some(data),
        })
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn has_grid(&self) -> bool {
        self.grid.is_some()
    }

    pub fn has_modal(&self) -> bool {
        self.modal.is_some()
    }

    /// Grid values of component `c`; call `ensure_grid` first if needed.
    pub fn grid_component(&self, c: usize) -> Result<&[f64], SpectralError> {
        let n = self.basis.node_count();
        self.grid
            .as_deref()
            .map(|g| &g[c * n..(c + 1) * n])
            .ok_or(SpectralError::MissingRepresentation)
    }

    /// Modal coefficients of component `c`.
    pub fn modal_component(&self, c: usize) -> Result<&[f64], SpectralError> {
        let n = self.basis.mode_count();
        self.modal
            .as_deref()
            .map(|m| &m[c * n..(c + 1) * n])
            .ok_or(SpectralError::MissingRepresentation)
    }

    /// Computes the modal representation if absent.
    pub fn ensure_modal(&mut self) -> Result<(), SpectralError> {
        if self.modal.is_some() {
            return Ok(());
        }
        let grid = self
            .grid
            .as_deref()
            .ok_or(SpectralError::MissingRepresentation)?;
        let n = self.basis.node_count();
        let mut modal = vec![0.0; self.components * n];
        for c in 0..self.components {
            self.basis
                .analyze(&grid[c * n..(c + 1) * n], &mut modal[c * n..(c + 1) * n]);
        }
        self.modal = Some(modal);
        Ok(())
    }

    /// Computes the grid representation if absent.
    pub fn ensure_grid(&mut self) -> Result<(), SpectralError> {
        if self.grid.is_some() {
            return Ok(());
        }
        let modal = self
            .modal
            .as_deref()
            .ok_or(SpectralError::MissingRepresentation)?;
        let n = self.basis.mode_count();
        let mut grid = vec![0.0; self.components * n];
        for c in 0..self.components {
            self.basis
                .synthesize(&modal[c * n..(c + 1) * n], &mut grid[c * n..(c + 1) * n]);
        }
        self.grid = Some(grid);
        Ok(())
    }

    /// Fills the requested representation from the other one. The source
    /// must be present; the result carries both.
    pub fn transform(&self, direction: Direction) -> Result<FieldState, SpectralError> {
        let mut out = self.clone();
        match direction {
            Direction::Forward => {
                if out.grid.is_none() {
                    return Err(SpectralError::MissingRepresentation);
                }
                out.modal = None;
                out.ensure_modal()?;
            }
            Direction::Inverse => {
                if out.modal.is_none() {
                    return Err(SpectralError::MissingRepresentation);
                }
                out.grid = None;
                out.ensure_grid()?;
            }
        }
        Ok(out)
    }

    /// Applies the Laplacian by scaling each modal coefficient with −μ.
    pub fn laplacian_apply(&self) -> Result<FieldState, SpectralError> {
        let modal = self
            .modal
            .as_deref()
            .ok_or(SpectralError::MissingRepresentation)?;
        let n = self.basis.mode_count();
        let mut out = vec![0.0; modal.len()];
        for c in 0..self.components {
            for s in 0..n {
                out[c * n + s] = -self.basis.mu[s] * modal[c * n + s];
            }
        }
        Ok(FieldState {
            basis: Arc::clone(&self.basis),
            components: self.components,
            grid: None,
            modal: Some(out),
        })
    }

    /// Discrete weighted L² norm over all components of the grid values.
    pub fn grid_norm(&self) -> Result<f64, SpectralError> {
        let grid = self
            .grid
            .as_deref()
            .ok_or(SpectralError::MissingRepresentation)?;
        let mut acc = 0.0;
        for v in grid {
            acc += v * v;
        }
        Ok(libm::sqrt(acc * self.basis.node_weight))
    }

    /// L² norm computed from modal coefficients.
    pub fn modal_norm(&self) -> Result<f64, SpectralError> {
        let modal = self
            .modal
            .as_deref()
            .ok_or(SpectralError::MissingRepresentation)?;
        let mut acc = 0.0;
        for v in modal {
            acc += v * v;
        }
        Ok(libm::sqrt(acc))
    }

    /// Weighted mean of one component over the box.
    pub fn component_mean(&self, c: usize) -> Result<f64, SpectralError> {
        let grid = self.grid_component(c)?;
        let total: f64 = grid.iter().sum();
        Ok(total * self.basis.node_weight / self.basis.volume())
    }

    /// Replaces the grid values, dropping any stale modal data.
    pub fn set_grid(&mut self, data: Vec<f64>) -> Result<(), SpectralError> {
        if data.len() != self.components * self.basis.node_count() {
            return Err(SpectralError::ShapeMismatch);
        }
        self.grid = Some(data);
        self.modal = None;
        Ok(())
    }

    /// Replaces the modal coefficients, dropping any stale grid data.
    pub fn set_modal(&mut self, data: Vec<f64>) -> Result<(), SpectralError> {
        if data.len() != self.components * self.basis.mode_count() {
            return Err(SpectralError::ShapeMismatch);
        }
        self.modal = Some(data);
        self.grid = None;
        Ok(())
    }

    /// Mutable access to modal data for in-place per-mode updates.
    pub fn modal_mut(&mut self) -> Result<&mut [f64], SpectralError> {
        self.grid = None;
        self.modal
            .as_deref_mut()
            .ok_or(SpectralError::MissingRepresentation)
    }

    /// Mutable access to grid data for in-place pointwise updates.
    pub fn grid_mut(&mut self) -> Result<&mut [f64], SpectralError> {
        self.modal = None;
        self.grid
            .as_deref_mut()
            .ok_or(SpectralError::MissingRepresentation)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    fn arc(basis: SpectralBasis) -> Arc<SpectralBasis> {
        Arc::new(basis)
    }

    #[test]
    fn dirichlet_eigenvalues_on_pi_interval() {
        let b = build_basis(1, &[PI], BoundaryKind::Dirichlet, &[3]).unwrap();
        assert_abs_diff_eq!(b.mu()[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.mu()[1], 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.mu()[2], 9.0, epsilon = 1e-12);
    }

    #[test]
    fn neumann_eigenvalues_include_zero() {
        let b = build_basis(1, &[PI], BoundaryKind::Neumann, &[3]).unwrap();
        assert_abs_diff_eq!(b.mu()[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b.mu()[1], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.mu()[2], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn two_dimensional_eigenvalues_are_sums() {
        let b = build_basis(2, &[PI, PI], BoundaryKind::Dirichlet, &[2, 2]).unwrap();
        let mu = b.mu();
        assert_abs_diff_eq!(mu[0], 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu[1], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu[2], 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mu[3], 8.0, epsilon = 1e-12);
    }

    #[test]
    fn unsupported_dimension_rejected() {
        assert_eq!(
            build_basis(3, &[1.0, 1.0, 1.0], BoundaryKind::Dirichlet, &[2, 2, 2]).unwrap_err(),
            SpectralError::UnsupportedDim
        );
    }

    #[test]
    fn discrete_orthonormality_both_conditions() {
        for bc in [BoundaryKind::Dirichlet, BoundaryKind::Neumann] {
            let b = build_basis(1, &[2.5], bc, &[16]).unwrap();
            let axis = &b.axes[0];
            for k in 0..16 {
                for l in 0..16 {
                    let mut acc = 0.0;
                    for j in 0..16 {
                        acc += axis.phi[(j, k)] * axis.phi[(j, l)] * axis.weight;
                    }
                    let expect = if k == l { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(acc, expect, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sine_mode_projects_to_single_coefficient() {
        let b = arc(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let grid: Vec<f64> = (0..8).map(|j| libm::sin(b.node(j).0)).collect();
        let state = FieldState::from_grid(Arc::clone(&b), 1, grid).unwrap();
        let modal_state = state.transform(Direction::Forward).unwrap();
        let coeffs = modal_state.modal_component(0).unwrap();
        assert_abs_diff_eq!(coeffs[0], libm::sqrt(PI / 2.0), epsilon = 1e-12);
        for c in &coeffs[1..] {
            assert!(c.abs() < 1e-12);
        }
    }

    #[test]
    fn zero_field_has_zero_coefficients() {
        let b = arc(build_basis(1, &[1.0], BoundaryKind::Neumann, &[6]).unwrap());
        let state = FieldState::from_grid(Arc::clone(&b), 2, vec![0.0; 12]).unwrap();
        let modal_state = state.transform(Direction::Forward).unwrap();
        for c in 0..2 {
            assert!(modal_state
                .modal_component(c)
                .unwrap()
                .iter()
                .all(|v| *v == 0.0));
        }
    }

    #[test]
    fn coefficient_ratios_match_field_composition() {
        let b = arc(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let grid: Vec<f64> = (0..8)
            .map(|j| {
                let x = b.node(j).0;
                libm::sin(x) + 3.0 * libm::sin(2.0 * x)
            })
            .collect();
        let state = FieldState::from_grid(Arc::clone(&b), 1, grid).unwrap();
        let modal_state = state.transform(Direction::Forward).unwrap();
        let coeffs = modal_state.modal_component(0).unwrap();
        assert_abs_diff_eq!(coeffs[1] / coeffs[0], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn round_trip_is_identity() {
        let b = arc(build_basis(2, &[1.7, 0.9], BoundaryKind::Neumann, &[7, 5]).unwrap());
        let n = b.node_count();
        let grid: Vec<f64> = (0..2 * n)
            .map(|i| libm::sin(0.37 * i as f64) + 0.2 * libm::cos(1.3 * i as f64))
            .collect();
        let state = FieldState::from_grid(Arc::clone(&b), 2, grid.clone()).unwrap();
        let forward = state.transform(Direction::Forward).unwrap();
        let mut stripped = forward.clone();
        stripped.grid = None;
        let back = stripped.transform(Direction::Inverse).unwrap();
        for c in 0..2 {
            let original = &grid[c * n..(c + 1) * n];
            let recovered = back.grid_component(c).unwrap();
            for (o, r) in original.iter().zip(recovered.iter()) {
                assert_abs_diff_eq!(o, r, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn laplacian_of_sine_is_negative_sine() {
        let b = arc(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let grid: Vec<f64> = (0..8).map(|j| libm::sin(b.node(j).0)).collect();
        let mut state = FieldState::from_grid(Arc::clone(&b), 1, grid.clone()).unwrap();
        state.ensure_modal().unwrap();
        let mut lap = state.laplacian_apply().unwrap();
        lap.ensure_grid().unwrap();
        let values = lap.grid_component(0).unwrap();
        for (v, g) in values.iter().zip(grid.iter()) {
            assert_abs_diff_eq!(*v, -g, epsilon = 1e-12);
        }
    }

    #[test]
    fn laplacian_of_second_mode_scales_by_four() {
        let b = arc(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let grid: Vec<f64> = (0..8).map(|j| libm::sin(2.0 * b.node(j).0)).collect();
        let mut state = FieldState::from_grid(Arc::clone(&b), 1, grid.clone()).unwrap();
        state.ensure_modal().unwrap();
        let mut lap = state.laplacian_apply().unwrap();
        lap.ensure_grid().unwrap();
        let values = lap.grid_component(0).unwrap();
        for (v, g) in values.iter().zip(grid.iter()) {
            assert_abs_diff_eq!(*v, -4.0 * g, epsilon = 1e-11);
        }
    }

    #[test]
    fn constant_field_is_harmonic_under_neumann() {
        let b = arc(build_basis(2, &[1.0, 2.0], BoundaryKind::Neumann, &[4, 4]).unwrap());
        let mut state = FieldState::from_grid(Arc::clone(&b), 1, vec![5.0; 16]).unwrap();
        state.ensure_modal().unwrap();
        let mut lap = state.laplacian_apply().unwrap();
        lap.ensure_grid().unwrap();
        for v in lap.grid_component(0).unwrap() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn missing_representation_is_reported() {
        let b = arc(build_basis(1, &[1.0], BoundaryKind::Dirichlet, &[4]).unwrap());
        let state = FieldState::from_modal(Arc::clone(&b), 1, vec![0.0; 4]).unwrap();
        assert_eq!(
            state.transform(Direction::Forward).unwrap_err(),
            SpectralError::MissingRepresentation
        );
        let state = FieldState::from_grid(Arc::clone(&b), 1, vec![0.0; 4]).unwrap();
        assert_eq!(
            state.transform(Direction::Inverse).unwrap_err(),
            SpectralError::MissingRepresentation
        );
        assert_eq!(
            state.laplacian_apply().unwrap_err(),
            SpectralError::MissingRepresentation
        );
    }

    #[test]
    fn neumann_zero_mode_tracks_weighted_mean() {
        let b = arc(build_basis(1, &[2.0], BoundaryKind::Neumann, &[10]).unwrap());
        let grid: Vec<f64> = (0..10).map(|j| 1.0 + libm::sin(3.1 * j as f64)).collect();
        let mut state = FieldState::from_grid(Arc::clone(&b), 1, grid).unwrap();
        state.ensure_modal().unwrap();
        let mean = state.component_mean(0).unwrap();
        let c0 = state.modal_component(0).unwrap()[0];
        assert_abs_diff_eq!(c0, mean * libm::sqrt(b.volume()), epsilon = 1e-12);
    }
}

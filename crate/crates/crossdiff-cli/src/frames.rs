//! CSV writers for solution frames and per-frame diagnostics.
//!
//! Frame files carry node coordinates followed by the solution components,
//! one grid node per row. All floats print as `{:.16e}`, seventeen
//! significant decimal digits, so reruns of the same config produce
//! byte-identical files.

use std::fmt::Write as _;

use crossdiff_core::evolution::{EvolutionRun, FrameOutput};
use crossdiff_core::spectral::{FieldState, SpectralError};

/// File name of the `index`-th emitted frame.
pub fn frame_file_name(index: usize) -> String {
    format!("frame_{index:06}.csv")
}

fn push_float(out: &mut String, value: f64) {
    write!(out, "{value:.16e}").expect("writing to a string never fails");
}

/// Renders one state as CSV with columns `x[,y],u1..ud`.
pub fn state_csv(state: &FieldState) -> Result<String, SpectralError> {
    let basis = state.basis();
    let dim = basis.space_dim();
    let d = state.components();
    let nodes = basis.node_count();
    let mut grid = Vec::with_capacity(d);
    for c in 0..d {
        grid.push(state.grid_component(c)?);
    }

    let mut out = String::new();
    out.push('x');
    if dim == 2 {
        out.push_str(",y");
    }
    for c in 1..=d {
        write!(out, ",u{c}").expect("writing to a string never fails");
    }
    out.push('\n');

    for j in 0..nodes {
        let (x, y) = basis.node(j);
        push_float(&mut out, x);
        if dim == 2 {
            out.push(',');
            push_float(&mut out, y);
        }
        for component in &grid {
            out.push(',');
            push_float(&mut out, component[j]);
        }
        out.push('\n');
    }
    Ok(out)
}

/// Renders the CSV for one frame of a trajectory.
pub fn frame_csv(frame: &FrameOutput) -> Result<String, SpectralError> {
    state_csv(&frame.state)
}

/// Renders the per-frame diagnostics table. Columns: time, then l2, min,
/// and max for every component, then the balance value when the run
/// tracked one.
pub fn diagnostics_csv(run: &EvolutionRun) -> String {
    let d = run
        .frames
        .first()
        .map(|f| f.component_l2.len())
        .unwrap_or(0);
    let with_balance = run.frames.iter().any(|f| f.balance.is_some());

    let mut out = String::new();
    out.push_str("time");
    for c in 1..=d {
        write!(out, ",l2_{c}").expect("writing to a string never fails");
    }
    for c in 1..=d {
        write!(out, ",min_{c}").expect("writing to a string never fails");
    }
    for c in 1..=d {
        write!(out, ",max_{c}").expect("writing to a string never fails");
    }
    if with_balance {
        out.push_str(",balance");
    }
    out.push('\n');

    for frame in &run.frames {
        push_float(&mut out, frame.time);
        for v in &frame.component_l2 {
            out.push(',');
            push_float(&mut out, *v);
        }
        for v in &frame.component_min {
            out.push(',');
            push_float(&mut out, *v);
        }
        for v in &frame.component_max {
            out.push(',');
            push_float(&mut out, *v);
        }
        if with_balance {
            out.push(',');
            push_float(&mut out, frame.balance.unwrap_or(f64::NAN));
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::sync::Arc;

    use crossdiff_core::spectral::{build_basis, BoundaryKind};

    fn sine_state() -> FieldState {
        let basis = Arc::new(build_basis(1, &[PI], BoundaryKind::Dirichlet, &[8]).unwrap());
        let values: Vec<f64> = (0..basis.node_count())
            .map(|j| basis.node(j).0.sin())
            .collect();
        FieldState::from_grid(basis, 1, values).unwrap()
    }

    #[test]
    fn one_dimensional_header_and_shape() {
        let csv = state_csv(&sine_state()).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("x,u1"));
        assert_eq!(csv.lines().count(), 9);
        for line in csv.lines().skip(1) {
            assert_eq!(line.matches(',').count(), 1);
        }
    }

    #[test]
    fn floats_use_seventeen_significant_digits() {
        let csv = state_csv(&sine_state()).unwrap();
        let first_row = csv.lines().nth(1).unwrap();
        let x = first_row.split(',').next().unwrap();
        let mantissa = x.split('e').next().unwrap();
        let digits = mantissa.chars().filter(|c| c.is_ascii_digit()).count();
        assert_eq!(digits, 17, "unexpected float shape in {x}");
    }

    #[test]
    fn two_dimensional_header_includes_y() {
        let basis = Arc::new(build_basis(2, &[1.0, 2.0], BoundaryKind::Neumann, &[4, 4]).unwrap());
        let n = basis.node_count();
        let state = FieldState::from_grid(basis, 2, vec![0.5; 2 * n]).unwrap();
        let csv = state_csv(&state).unwrap();
        assert_eq!(csv.lines().next(), Some("x,y,u1,u2"));
        assert_eq!(csv.lines().count(), n + 1);
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = state_csv(&sine_state()).unwrap();
        let b = state_csv(&sine_state()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn frame_names_are_zero_padded() {
        assert_eq!(frame_file_name(0), "frame_000000.csv");
        assert_eq!(frame_file_name(12), "frame_000012.csv");
        assert_eq!(frame_file_name(123456), "frame_123456.csv");
    }

    #[test]
    fn diagnostics_table_covers_all_frames() {
        use crossdiff_core::analysis::DiffusionMatrix;
        use crossdiff_core::evolution::{
            solve_evolution, EvolutionOptions, SplitOrder, SplitScheme,
        };
        use crossdiff_core::reaction::ReactionSpec;

        let m = DiffusionMatrix::new(1, vec![1.0]).unwrap();
        let scheme = SplitScheme::new(SplitOrder::Strang, 0.1, 4).unwrap();
        let options = EvolutionOptions::new(scheme).with_frame_stride(2);
        let run = solve_evolution(&sine_state(), &m, &ReactionSpec::zero(1), &options).unwrap();
        let csv = diagnostics_csv(&run);
        assert_eq!(csv.lines().next(), Some("time,l2_1,min_1,max_1"));
        assert_eq!(csv.lines().count(), run.frames.len() + 1);
        assert!(!csv.contains("balance"));
    }
}

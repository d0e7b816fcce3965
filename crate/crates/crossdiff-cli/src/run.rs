//! Command orchestration: configs in, artifacts out, exit codes back.
//!
//! Exit codes: 0 success, 2 analyzer refusal (the problem is rejected
//! before any stepping), 1 everything else (syntax, validation, IO,
//! runtime failures). Every nonzero exit also writes error.json.

use std::fs;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use crossdiff_core::analysis::AnalysisError;
use crossdiff_core::evolution::{
    solve_evolution, solve_stationary, EvolutionError, EvolutionOptions, EvolutionRun,
    StationaryProblem,
};
use crossdiff_core::kouachi::{balance_functional, build_kouachi, ConditionPolicy, KouachiError};
use crossdiff_core::semigroup::{H0Policy, SemigroupError};
use crossdiff_core::spectral::{build_basis, FieldState, SpectralBasis};

use crate::config::{parse_config, CommandKind, ConfigError, InitialComponent, SimulationConfig};
use crate::expr::parse_expression;
use crate::frames::{diagnostics_csv, frame_csv, frame_file_name, state_csv};
use crate::report::{
    build_analysis_report, sorted_json, AnalysisReport, ErrorReport, FrameIndexEntry, KouachiMeta,
    MetaReport, StationaryRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_REFUSED: i32 = 2;

/// Command-line arguments shared by all subcommands.
#[derive(Clone, Debug)]
pub struct RunArgs {
    pub config_path: PathBuf,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub allow_h0_violation: bool,
}

struct Failure {
    report: ErrorReport,
    code: i32,
}

impl Failure {
    fn runtime(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            report: ErrorReport::new(kind, message),
            code: EXIT_FAILURE,
        }
    }

    fn refused(kind: &str, message: impl Into<String>) -> Self {
        Failure {
            report: ErrorReport::new(kind, message),
            code: EXIT_REFUSED,
        }
    }

    fn validation(violations: Vec<String>) -> Self {
        Failure {
            report: ErrorReport::new("ValidationError", "the configuration is invalid")
                .with_details(violations),
            code: EXIT_FAILURE,
        }
    }
}

struct Artifacts {
    dir: PathBuf,
    csv: bool,
    json: bool,
}

impl Artifacts {
    fn new(args: &RunArgs, config: Option<&SimulationConfig>) -> Self {
        let output = config.and_then(|c| c.output.clone()).unwrap_or_default();
        let dir = args
            .out
            .clone()
            .unwrap_or_else(|| PathBuf::from(&output.directory));
        Artifacts {
            dir,
            csv: output.formats.iter().any(|f| f == "csv"),
            json: output.formats.iter().any(|f| f == "json"),
        }
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), Failure> {
        fs::create_dir_all(&self.dir).map_err(|e| {
            Failure::runtime(
                "IoError",
                format!("cannot create {}: {e}", self.dir.display()),
            )
        })?;
        let path = self.dir.join(name);
        fs::write(&path, contents)
            .map_err(|e| Failure::runtime("IoError", format!("cannot write {name}: {e}")))
    }

    /// Writes error.json; failures here go to stderr, the exit code stands.
    fn record_failure(&self, report: &ErrorReport) {
        if fs::create_dir_all(&self.dir).is_err() {
            eprintln!(
                "error: cannot create output directory {}",
                self.dir.display()
            );
            return;
        }
        let path = self.dir.join("error.json");
        if fs::write(&path, sorted_json(report)).is_err() {
            eprintln!("error: cannot write {}", path.display());
        }
    }
}

/// Runs one subcommand end to end and returns the process exit code.
pub fn execute(command: CommandKind, args: &RunArgs) -> i32 {
    let started = Instant::now();
    let text = match fs::read_to_string(&args.config_path) {
        Ok(text) => text,
        Err(e) => {
            let artifacts = Artifacts::new(args, None);
            let failure = Failure::runtime(
                "IoError",
                format!("cannot read {}: {e}", args.config_path.display()),
            );
            artifacts.record_failure(&failure.report);
            eprintln!("{}", failure.report.message);
            return failure.code;
        }
    };
    let parsed = parse_config(&text).map_err(|e| match e {
        ConfigError::Parse(msg) => Failure::runtime("ParseError", msg),
        ConfigError::Validation(violations) => Failure::validation(violations),
    });
    let config = match parsed {
        Ok(config) => config,
        Err(failure) => {
            let artifacts = Artifacts::new(args, None);
            artifacts.record_failure(&failure.report);
            eprintln!("{}", failure.report.message);
            return failure.code;
        }
    };

    let artifacts = Artifacts::new(args, Some(&config));
    let outcome = {
        let violations = config.validate(command);
        if violations.is_empty() {
            match command {
                CommandKind::Analyze => run_analyze(&config, &artifacts, args),
                CommandKind::Simulate => run_simulate(&config, &artifacts, args, started),
                CommandKind::Stationary => run_stationary(&config, &artifacts, started),
                CommandKind::Kouachi => run_kouachi(&config, &artifacts, args, started),
            }
        } else {
            Err(Failure::validation(violations))
        }
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(failure) => {
            artifacts.record_failure(&failure.report);
            eprintln!("{}", failure.report.message);
            failure.code
        }
    }
}

fn analyzer_report(config: &SimulationConfig) -> Result<AnalysisReport, Failure> {
    let m = config
        .diffusion_matrix()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    build_analysis_report(&m).map_err(|msg| Failure::runtime("RuntimeError", msg))
}

fn run_analyze(
    config: &SimulationConfig,
    artifacts: &Artifacts,
    args: &RunArgs,
) -> Result<(), Failure> {
    let report = analyzer_report(config)?;
    artifacts.write("report.json", &sorted_json(&report))?;
    if report.h0.zero_matrix {
        return Err(Failure::refused(
            "ZeroMatrix",
            "the zero matrix is excluded from the semigroup construction",
        ));
    }
    if !report.h0.pass && !args.allow_h0_violation {
        return Err(Failure::refused(
            "H0Violation",
            format!(
                "an eigenvalue has real part {:.6e}; every real part must be nonnegative",
                report.spectrum.min_real_part
            ),
        ));
    }
    Ok(())
}

fn build_field_basis(config: &SimulationConfig) -> Result<Arc<SpectralBasis>, Failure> {
    let domain = config
        .domain
        .as_ref()
        .expect("validated config has a domain");
    let grid = config.grid.as_ref().expect("validated config has a grid");
    let bc = config
        .boundary_kind()
        .expect("validated config names a boundary kind");
    build_basis(domain.space_dim, &domain.lengths, bc, &grid.modes_per_axis)
        .map(Arc::new)
        .map_err(|e| Failure::runtime("RuntimeError", e.to_string()))
}

fn build_initial_state(
    config: &SimulationConfig,
    basis: &Arc<SpectralBasis>,
) -> Result<FieldState, Failure> {
    let matrix = config
        .matrix
        .as_ref()
        .expect("validated config has a matrix");
    let initial = config
        .initial
        .as_ref()
        .expect("validated config has initial data");
    let domain = config
        .domain
        .as_ref()
        .expect("validated config has a domain");
    let d = matrix.d;
    let n = basis.node_count();
    let lengths = basis.lengths();
    let mut data = Vec::with_capacity(d * n);
    for (index, component) in initial.components.iter().enumerate() {
        match component {
            InitialComponent::Expression(text) => {
                let expr = parse_expression(text, domain.space_dim).map_err(|e| {
                    Failure::validation(vec![format!("initial.components[{index}]: {e}")])
                })?;
                for j in 0..n {
                    data.push(expr.eval(basis.node(j), &lengths));
                }
            }
            InitialComponent::Values(values) => {
                if values.len() != n {
                    return Err(Failure::validation(vec![format!(
                        "initial.components[{index}]: expected {n} grid values, found {}",
                        values.len()
                    )]));
                }
                data.extend_from_slice(values);
            }
        }
    }
    FieldState::from_grid(Arc::clone(basis), d, data)
        .map_err(|e| Failure::runtime("RuntimeError", e.to_string()))
}

fn classify_evolution(err: EvolutionError) -> Failure {
    let message = err.to_string();
    match err {
        EvolutionError::StepFailed { .. } => Failure::runtime("StepFailed", message),
        EvolutionError::StationaryDivergence { .. } => {
            Failure::runtime("StationaryDivergence", message)
        }
        EvolutionError::BoundViolated { .. } => Failure::runtime("BoundViolated", message),
        EvolutionError::InvalidProblem(_) => Failure::runtime("InvalidProblem", message),
        EvolutionError::Semigroup(SemigroupError::H0Violation { .. }) => {
            Failure::refused("H0Violation", message)
        }
        EvolutionError::Semigroup(SemigroupError::Analysis(AnalysisError::ZeroMatrix)) => {
            Failure::refused("ZeroMatrix", message)
        }
        EvolutionError::Analysis(AnalysisError::ZeroMatrix) => {
            Failure::refused("ZeroMatrix", message)
        }
        EvolutionError::Reaction(_) => Failure::runtime("ReactionError", message),
        _ => Failure::runtime("RuntimeError", message),
    }
}

fn write_trajectory(
    artifacts: &Artifacts,
    run: &EvolutionRun,
) -> Result<Vec<FrameIndexEntry>, Failure> {
    let mut index = Vec::with_capacity(run.frames.len());
    for (i, frame) in run.frames.iter().enumerate() {
        let file = frame_file_name(i);
        if artifacts.csv {
            let csv =
                frame_csv(frame).map_err(|e| Failure::runtime("RuntimeError", e.to_string()))?;
            artifacts.write(&file, &csv)?;
        }
        index.push(FrameIndexEntry {
            file,
            step: frame.step,
            time: frame.time,
        });
    }
    if artifacts.csv {
        artifacts.write("diagnostics.csv", &diagnostics_csv(run))?;
    }
    Ok(index)
}

fn run_simulate(
    config: &SimulationConfig,
    artifacts: &Artifacts,
    args: &RunArgs,
    started: Instant,
) -> Result<(), Failure> {
    let m = config
        .diffusion_matrix()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let report = analyzer_report(config)?;
    if !args.allow_h0_violation {
        if report.h0.zero_matrix {
            return Err(Failure::refused(
                "ZeroMatrix",
                "the zero matrix is excluded from the semigroup construction",
            ));
        }
        if !report.h0.pass {
            return Err(Failure::refused(
                "H0Violation",
                format!(
                    "an eigenvalue has real part {:.6e}; pass --allow-h0-violation to step anyway",
                    report.spectrum.min_real_part
                ),
            ));
        }
    }

    let basis = build_field_basis(config)?;
    let state = build_initial_state(config, &basis)?;
    let spec = config
        .reaction_spec()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let scheme = config
        .scheme()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let stride = config.time.as_ref().map(|t| t.frame_stride).unwrap_or(10);
    let policy = if args.allow_h0_violation {
        H0Policy::Override
    } else {
        H0Policy::Enforce
    };
    let mut options = EvolutionOptions::new(scheme)
        .with_frame_stride(stride)
        .with_policy(policy);
    let preset = config
        .kouachi_params()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    if let Some(params) = &preset {
        options = options.with_balance(balance_functional(params));
    }

    let run = solve_evolution(&state, &m, &spec, &options).map_err(classify_evolution)?;
    let frames = write_trajectory(artifacts, &run)?;
    if artifacts.json {
        let meta = MetaReport {
            command: String::from("simulate"),
            config: config.clone(),
            analysis: report,
            kouachi: None,
            frames,
            steps_completed: run.steps_completed,
            final_time: run.final_time,
            wall_time_ms: started.elapsed().as_millis() as u64,
        };
        artifacts.write("meta.json", &sorted_json(&meta))?;
    }
    Ok(())
}

fn run_stationary(
    config: &SimulationConfig,
    artifacts: &Artifacts,
    started: Instant,
) -> Result<(), Failure> {
    let m = config
        .diffusion_matrix()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let report = analyzer_report(config)?;
    if report.h0.zero_matrix {
        return Err(Failure::refused(
            "ZeroMatrix",
            "the zero matrix is excluded from the semigroup construction",
        ));
    }
    if !report.h0.pass {
        return Err(Failure::refused(
            "H0Violation",
            "the stationary problem needs every eigenvalue in the closed right half-plane",
        ));
    }
    if !report.h0.symbol_accretive {
        return Err(Failure::refused(
            "NotAccretive",
            "the stationary problem needs an accretive modal symbol: the symmetric part of the matrix must be positive semidefinite",
        ));
    }

    let section = config
        .stationary
        .as_ref()
        .expect("validated config has a stationary section");
    let basis = build_field_basis(config)?;
    let mut v = build_initial_state(config, &basis)?;
    v.ensure_modal()
        .map_err(|e| Failure::runtime("RuntimeError", e.to_string()))?;
    let spec = config
        .reaction_spec()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let problem = StationaryProblem::new(section.epsilon, v.clone(), section.lambda)
        .map_err(classify_evolution)?;
    let solution = solve_stationary(&problem, &m, &spec).map_err(classify_evolution)?;

    let norm_source = v
        .modal_norm()
        .map_err(|e| Failure::runtime("RuntimeError", e.to_string()))?;
    let norm_solution = solution
        .modal_norm()
        .map_err(|e| Failure::runtime("RuntimeError", e.to_string()))?;
    let bound = norm_source / section.epsilon + 1e-8;
    if artifacts.csv {
        let csv =
            state_csv(&solution).map_err(|e| Failure::runtime("RuntimeError", e.to_string()))?;
        artifacts.write("solution.csv", &csv)?;
    }
    if artifacts.json {
        let record = StationaryRecord {
            epsilon: section.epsilon,
            lambda: section.lambda,
            norm_source,
            norm_solution,
            bound,
            bound_satisfied: norm_solution <= bound,
            wall_time_ms: started.elapsed().as_millis() as u64,
        };
        artifacts.write("stationary.json", &sorted_json(&record))?;
    }
    Ok(())
}

fn classify_kouachi(err: KouachiError) -> Failure {
    let message = err.to_string();
    match err {
        KouachiError::ConditionFailed { .. } => Failure::refused("ConditionFailed", message),
        KouachiError::Inadmissible { .. } => Failure::refused("Inadmissible", message),
        KouachiError::OriginNotFixed { .. } => Failure::refused("OriginNotFixed", message),
        KouachiError::UnknownScalar(_) | KouachiError::InvalidParameter(_) => {
            Failure::validation(vec![message])
        }
        _ => Failure::runtime("RuntimeError", message),
    }
}

fn run_kouachi(
    config: &SimulationConfig,
    artifacts: &Artifacts,
    args: &RunArgs,
    started: Instant,
) -> Result<(), Failure> {
    let params = config
        .kouachi_params()
        .map_err(|msg| Failure::validation(vec![msg]))?
        .expect("validated config has a kouachi section");
    let section = config
        .kouachi
        .as_ref()
        .expect("validated config has a kouachi section");
    let domain = config
        .domain
        .as_ref()
        .expect("validated config has a domain");
    let grid = config.grid.as_ref().expect("validated config has a grid");
    let policy = if args.strict {
        ConditionPolicy::Strict
    } else {
        ConditionPolicy::Lenient
    };
    let sample_box = (section.sample_box[0], section.sample_box[1]);
    let system = build_kouachi(
        &params,
        &domain.lengths,
        &grid.modes_per_axis,
        policy,
        sample_box,
    )
    .map_err(classify_kouachi)?;

    let state = build_initial_state(config, &system.basis)?;
    let scheme = config
        .scheme()
        .map_err(|msg| Failure::validation(vec![msg]))?;
    let stride = config.time.as_ref().map(|t| t.frame_stride).unwrap_or(10);
    let options = EvolutionOptions::new(scheme)
        .with_frame_stride(stride)
        .with_balance(balance_functional(&params));
    let run = solve_evolution(&state, &system.matrix, &system.reaction, &options)
        .map_err(classify_evolution)?;

    let frames = write_trajectory(artifacts, &run)?;
    if artifacts.json {
        let report = build_analysis_report(&system.matrix)
            .map_err(|msg| Failure::runtime("RuntimeError", msg))?;
        let meta = MetaReport {
            command: String::from("kouachi"),
            config: config.clone(),
            analysis: report,
            kouachi: Some(KouachiMeta::from_system(&system)),
            frames,
            steps_completed: run.steps_completed,
            final_time: run.final_time,
            wall_time_ms: started.elapsed().as_millis() as u64,
        };
        artifacts.write("meta.json", &sorted_json(&meta))?;
    }
    Ok(())
}

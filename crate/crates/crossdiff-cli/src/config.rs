//! Configuration grammar, defaults, preset expansion, and validation.
//!
//! Configs are TOML with flat sections. Validation never stops at the
//! first problem: every violation found is collected into one error so a
//! config can be fixed in a single pass.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crossdiff_core::analysis::DiffusionMatrix;
use crossdiff_core::evolution::{SplitOrder, SplitScheme};
use crossdiff_core::kouachi::KouachiParams;
use crossdiff_core::reaction::{Orientation, ReactionSpec};
use crossdiff_core::spectral::BoundaryKind;

use crate::expr::parse_expression;

/// Which subcommand the config must support.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommandKind {
    Analyze,
    Simulate,
    Stationary,
    Kouachi,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Analyze => "analyze",
            CommandKind::Simulate => "simulate",
            CommandKind::Stationary => "stationary",
            CommandKind::Kouachi => "kouachi",
        }
    }
}

/// Errors from reading a configuration.
#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Validation(Vec<String>),
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "configuration syntax error: {msg}"),
            ConfigError::Validation(violations) => {
                writeln!(f, "configuration is invalid:")?;
                for v in violations {
                    writeln!(f, "  - {v}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSection {
    pub space_dim: usize,
    pub lengths: Vec<f64>,
    pub bc: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSection {
    pub modes_per_axis: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixSection {
    pub d: usize,
    pub entries: Vec<f64>,
}

fn default_orientation() -> String {
    String::from("negated")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReactionSection {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default = "default_orientation")]
    pub orientation: String,
}

impl Default for ReactionSection {
    fn default() -> Self {
        ReactionSection {
            name: String::from("zero"),
            params: BTreeMap::new(),
            orientation: default_orientation(),
        }
    }
}

fn default_frame_stride() -> usize {
    10
}

fn default_scheme() -> String {
    String::from("strang")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSection {
    #[serde(default)]
    pub dt: Option<f64>,
    pub t_final: f64,
    #[serde(default)]
    pub steps: Option<usize>,
    #[serde(default = "default_frame_stride")]
    pub frame_stride: usize,
    #[serde(default = "default_scheme")]
    pub scheme: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarySection {
    pub epsilon: f64,
    pub lambda: f64,
}

/// One component of the initial data: an expression or inline grid values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitialComponent {
    Expression(String),
    Values(Vec<f64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialSection {
    pub components: Vec<InitialComponent>,
}

fn default_directory() -> String {
    String::from("out")
}

fn default_formats() -> Vec<String> {
    vec![String::from("csv"), String::from("json")]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputSection {
    #[serde(default = "default_directory")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            directory: default_directory(),
            formats: default_formats(),
        }
    }
}

fn default_f_name() -> String {
    String::from("product")
}

fn default_sample_box() -> Vec<f64> {
    vec![0.0, 1.0]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KouachiSection {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub rho: f64,
    #[serde(default = "default_f_name")]
    pub f: String,
    #[serde(default)]
    pub f_params: BTreeMap<String, f64>,
    #[serde(default = "default_sample_box")]
    pub sample_box: Vec<f64>,
}

/// The full parsed configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    #[serde(default)]
    pub domain: Option<DomainSection>,
    #[serde(default)]
    pub grid: Option<GridSection>,
    #[serde(default)]
    pub matrix: Option<MatrixSection>,
    #[serde(default)]
    pub reaction: Option<ReactionSection>,
    #[serde(default)]
    pub time: Option<TimeSection>,
    #[serde(default)]
    pub stationary: Option<StationarySection>,
    #[serde(default)]
    pub initial: Option<InitialSection>,
    #[serde(default)]
    pub output: Option<OutputSection>,
    #[serde(default)]
    pub kouachi: Option<KouachiSection>,
}

/// Parses TOML text, expands the preset block, and fills defaults. The
/// returned config has passed the structural checks shared by every
/// command; command-specific checks run in [`SimulationConfig::validate`].
pub fn parse_config(text: &str) -> Result<SimulationConfig, ConfigError> {
    let mut config: SimulationConfig =
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
    let violations = expand_preset(&mut config);
    if !violations.is_empty() {
        return Err(ConfigError::Validation(violations));
    }
    if config.reaction.is_none() {
        config.reaction = Some(ReactionSection::default());
    }
    if config.output.is_none() {
        config.output = Some(OutputSection::default());
    }
    let violations = config.structural_violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Validation(violations))
    }
}

/// Serializes a config back to the TOML grammar.
pub fn serialize_config(config: &SimulationConfig) -> String {
    toml::to_string_pretty(config).expect("config serializes to TOML")
}

fn expand_preset(config: &mut SimulationConfig) -> Vec<String> {
    let mut violations = Vec::new();
    let Some(preset) = config.kouachi.clone() else {
        return violations;
    };
    if config.matrix.is_some() {
        violations.push(String::from(
            "matrix: remove this section when the kouachi preset is present; the preset defines the matrix",
        ));
    }
    if config.reaction.is_some() {
        violations.push(String::from(
            "reaction: remove this section when the kouachi preset is present; the preset defines the reaction",
        ));
    }
    if let Some(domain) = &config.domain {
        if domain.bc.to_lowercase() != "neumann" {
            violations.push(String::from(
                "domain.bc: the kouachi preset requires neumann boundaries",
            ));
        }
    }
    if !violations.is_empty() {
        return violations;
    }
    config.matrix = Some(MatrixSection {
        d: 2,
        entries: vec![preset.alpha, preset.beta, preset.gamma, preset.alpha],
    });
    let mut params = preset.f_params.clone();
    params.insert(String::from("sigma"), preset.sigma);
    params.insert(String::from("rho"), preset.rho);
    config.reaction = Some(ReactionSection {
        name: preset.f.clone(),
        params,
        orientation: default_orientation(),
    });
    violations
}

impl SimulationConfig {
    fn structural_violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if let Some(domain) = &self.domain {
            if !(1..=2).contains(&domain.space_dim) {
                violations.push(String::from("domain.space_dim: must be 1 or 2"));
            }
            if domain.lengths.len() != domain.space_dim {
                violations.push(format!(
                    "domain.lengths: expected {} value(s), found {}",
                    domain.space_dim,
                    domain.lengths.len()
                ));
            }
            if domain.lengths.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                violations.push(String::from(
                    "domain.lengths: every length must be positive",
                ));
            }
            if self.boundary_kind().is_none() {
                violations.push(format!(
                    "domain.bc: `{}` is not one of dirichlet, neumann",
                    domain.bc
                ));
            }
        }
        if let Some(grid) = &self.grid {
            if grid.modes_per_axis.contains(&0) {
                violations.push(String::from(
                    "grid.modes_per_axis: mode counts must be positive",
                ));
            }
            if grid.modes_per_axis.iter().any(|m| *m > 128) {
                violations.push(String::from(
                    "grid.modes_per_axis: mode counts above 128 are not supported",
                ));
            }
            if let Some(domain) = &self.domain {
                if grid.modes_per_axis.len() != domain.space_dim {
                    violations.push(format!(
                        "grid.modes_per_axis: expected {} value(s), found {}",
                        domain.space_dim,
                        grid.modes_per_axis.len()
                    ));
                }
            }
        }
        if let Some(matrix) = &self.matrix {
            if matrix.d == 0 {
                violations.push(String::from("matrix.d: dimension must be positive"));
            } else if matrix.entries.len() != matrix.d * matrix.d {
                violations.push(format!(
                    "matrix.entries: expected {} entries for d = {}, found {}",
                    matrix.d * matrix.d,
                    matrix.d,
                    matrix.entries.len()
                ));
            }
            if matrix.entries.iter().any(|e| !e.is_finite()) {
                violations.push(String::from("matrix.entries: entries must be finite"));
            }
        }
        if let Some(reaction) = &self.reaction {
            if self.reaction_orientation().is_none() {
                violations.push(format!(
                    "reaction.orientation: `{}` is not one of negated, direct",
                    reaction.orientation
                ));
            }
            if !matches!(
                reaction.name.as_str(),
                "zero" | "linear_decay" | "cubic_decay" | "product" | "power"
            ) {
                violations.push(format!(
                    "reaction.name: `{}` is not a known reaction (zero, linear_decay, cubic_decay, product, power)",
                    reaction.name
                ));
            }
        }
        if let Some(time) = &self.time {
            if !(time.t_final > 0.0 && time.t_final.is_finite()) {
                violations.push(String::from("time.t_final: must be positive and finite"));
            }
            match (time.dt, time.steps) {
                (None, None) => violations.push(String::from("time: provide dt, steps, or both")),
                (Some(dt), _) if !(dt > 0.0 && dt.is_finite()) => {
                    violations.push(String::from("time.dt: must be positive and finite"));
                }
                (Some(dt), Some(steps)) => {
                    if steps == 0 {
                        violations.push(String::from("time.steps: must be at least one"));
                    } else if (dt * steps as f64 - time.t_final).abs()
                        > 1e-12 * (1.0 + time.t_final.abs())
                    {
                        violations.push(format!(
                            "time: dt*steps = {} does not reproduce t_final = {}",
                            dt * steps as f64,
                            time.t_final
                        ));
                    }
                }
                (Some(dt), None) => {
                    let steps = (time.t_final / dt).round();
                    if steps < 1.0
                        || (dt * steps - time.t_final).abs() > 1e-12 * (1.0 + time.t_final.abs())
                    {
                        violations.push(String::from(
                            "time.dt: t_final must be an integer multiple of dt",
                        ));
                    }
                }
                (None, Some(0)) => {
                    violations.push(String::from("time.steps: must be at least one"));
                }
                (None, Some(_)) => {}
            }
            if time.frame_stride == 0 {
                violations.push(String::from("time.frame_stride: must be at least one"));
            }
            if self.split_order().is_none() {
                violations.push(format!(
                    "time.scheme: `{}` is not one of lie, strang",
                    time.scheme
                ));
            }
        }
        if let Some(stationary) = &self.stationary {
            if !(stationary.epsilon > 0.0 && stationary.epsilon.is_finite()) {
                violations.push(String::from(
                    "stationary.epsilon: must be positive and finite",
                ));
            }
            if !(stationary.lambda > 0.0 && stationary.lambda.is_finite()) {
                violations.push(String::from(
                    "stationary.lambda: must be positive and finite",
                ));
            }
        }
        if let Some(output) = &self.output {
            for format in &output.formats {
                if !matches!(format.as_str(), "csv" | "json") {
                    violations.push(format!(
                        "output.formats: `{format}` is not one of csv, json"
                    ));
                }
            }
        }
        if let Some(preset) = &self.kouachi {
            for (name, value) in [
                ("alpha", preset.alpha),
                ("beta", preset.beta),
                ("gamma", preset.gamma),
                ("sigma", preset.sigma),
                ("rho", preset.rho),
            ] {
                if !(value > 0.0 && value.is_finite()) {
                    violations.push(format!("kouachi.{name}: must be positive and finite"));
                }
            }
            if preset.sample_box.len() != 2
                || preset.sample_box.iter().any(|b| !b.is_finite())
                || preset.sample_box[0] >= preset.sample_box[1]
            {
                violations.push(String::from(
                    "kouachi.sample_box: expected finite [low, high] with low < high",
                ));
            }
        }
        violations
    }

    /// Collects every violation that would block the given command.
    pub fn validate(&self, command: CommandKind) -> Vec<String> {
        let mut violations = self.structural_violations();
        let mut require = |present: bool, what: &str| {
            if !present {
                violations.push(format!(
                    "{what}: section required by the {} command",
                    command.name()
                ));
            }
        };
        match command {
            CommandKind::Analyze => {
                require(self.matrix.is_some(), "matrix");
            }
            CommandKind::Simulate => {
                require(self.domain.is_some(), "domain");
                require(self.grid.is_some(), "grid");
                require(self.matrix.is_some(), "matrix");
                require(self.time.is_some(), "time");
                require(self.initial.is_some(), "initial");
            }
            CommandKind::Stationary => {
                require(self.domain.is_some(), "domain");
                require(self.grid.is_some(), "grid");
                require(self.matrix.is_some(), "matrix");
                require(self.stationary.is_some(), "stationary");
                require(self.initial.is_some(), "initial");
                if let Some(kind) = self.boundary_kind() {
                    if kind != BoundaryKind::Dirichlet {
                        violations.push(String::from(
                            "domain.bc: the stationary command requires dirichlet boundaries",
                        ));
                    }
                }
            }
            CommandKind::Kouachi => {
                require(self.kouachi.is_some(), "kouachi");
                require(self.domain.is_some(), "domain");
                require(self.grid.is_some(), "grid");
                require(self.time.is_some(), "time");
                require(self.initial.is_some(), "initial");
            }
        }
        if matches!(
            command,
            CommandKind::Simulate | CommandKind::Stationary | CommandKind::Kouachi
        ) {
            violations.extend(self.initial_violations());
        }
        violations
    }

    fn initial_violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let (Some(initial), Some(matrix)) = (&self.initial, &self.matrix) else {
            return violations;
        };
        if initial.components.len() != matrix.d {
            violations.push(format!(
                "initial.components: expected {} component(s) for d = {}, found {}",
                matrix.d,
                matrix.d,
                initial.components.len()
            ));
        }
        let Some(domain) = &self.domain else {
            return violations;
        };
        let node_count: usize = self
            .grid
            .as_ref()
            .map(|g| g.modes_per_axis.iter().product())
            .unwrap_or(0);
        for (index, component) in initial.components.iter().enumerate() {
            match component {
                InitialComponent::Expression(text) => {
                    if let Err(e) = parse_expression(text, domain.space_dim) {
                        violations.push(format!("initial.components[{index}]: {e}"));
                    }
                }
                InitialComponent::Values(values) => {
                    if node_count > 0 && values.len() != node_count {
                        violations.push(format!(
                            "initial.components[{index}]: expected {node_count} grid values, found {}",
                            values.len()
                        ));
                    }
                    if values.iter().any(|v| !v.is_finite()) {
                        violations.push(format!(
                            "initial.components[{index}]: values must be finite"
                        ));
                    }
                }
            }
        }
        violations
    }

    pub fn boundary_kind(&self) -> Option<BoundaryKind> {
        match self.domain.as_ref()?.bc.to_lowercase().as_str() {
            "dirichlet" => Some(BoundaryKind::Dirichlet),
            "neumann" => Some(BoundaryKind::Neumann),
            _ => None,
        }
    }

    pub fn split_order(&self) -> Option<SplitOrder> {
        match self.time.as_ref()?.scheme.to_lowercase().as_str() {
            "lie" => Some(SplitOrder::Lie),
            "strang" => Some(SplitOrder::Strang),
            _ => None,
        }
    }

    pub fn reaction_orientation(&self) -> Option<Orientation> {
        match self
            .reaction
            .as_ref()
            .map(|r| r.orientation.to_lowercase())
            .unwrap_or_else(default_orientation)
            .as_str()
        {
            "negated" => Some(Orientation::NegatedReaction),
            "direct" => Some(Orientation::DirectReaction),
            _ => None,
        }
    }

    /// The diffusion matrix described by the config.
    pub fn diffusion_matrix(&self) -> Result<DiffusionMatrix, String> {
        let section = self.matrix.as_ref().ok_or("matrix section missing")?;
        DiffusionMatrix::new(section.d, section.entries.clone()).map_err(|e| e.to_string())
    }

    /// The time-stepping scheme, with steps inferred from dt when needed.
    pub fn scheme(&self) -> Result<SplitScheme, String> {
        let time = self.time.as_ref().ok_or("time section missing")?;
        let order = self.split_order().ok_or("unknown scheme")?;
        let (dt, steps) = match (time.dt, time.steps) {
            (Some(dt), Some(steps)) => (dt, steps),
            (Some(dt), None) => (dt, (time.t_final / dt).round() as usize),
            (None, Some(steps)) => (time.t_final / steps as f64, steps),
            (None, None) => return Err(String::from("time: provide dt, steps, or both")),
        };
        let scheme = SplitScheme::new(order, dt, steps).map_err(|e| e.to_string())?;
        if !scheme.covers(time.t_final) {
            return Err(format!(
                "time: dt*steps = {} does not reproduce t_final = {}",
                scheme.final_time(),
                time.t_final
            ));
        }
        Ok(scheme)
    }

    /// The reaction described by the config.
    pub fn reaction_spec(&self) -> Result<ReactionSpec, String> {
        let section = self.reaction.clone().unwrap_or_default();
        let d = self.matrix.as_ref().map(|m| m.d).unwrap_or(1);
        let orientation = self.reaction_orientation().ok_or("unknown orientation")?;
        let spec = match section.name.as_str() {
            "zero" => ReactionSpec::zero(d),
            "linear_decay" => {
                let rate = section.params.get("rate").copied().unwrap_or(1.0);
                ReactionSpec::linear_decay(d, rate).map_err(|e| e.to_string())?
            }
            "cubic_decay" => {
                let coef = section.params.get("coef").copied().unwrap_or(1.0);
                ReactionSpec::cubic_decay(d, coef).map_err(|e| e.to_string())?
            }
            "product" => {
                let sigma = section.params.get("sigma").copied().unwrap_or(1.0);
                let rho = section.params.get("rho").copied().unwrap_or(1.0);
                if d != 2 {
                    return Err(String::from("reaction `product` needs d = 2"));
                }
                ReactionSpec::coupled_product(sigma, rho).map_err(|e| e.to_string())?
            }
            "power" => {
                let sigma = section.params.get("sigma").copied().unwrap_or(1.0);
                let rho = section.params.get("rho").copied().unwrap_or(1.0);
                let m = section.params.get("m").copied().unwrap_or(1.0);
                if d != 2 {
                    return Err(String::from("reaction `power` needs d = 2"));
                }
                if m < 1.0 || m.floor() != m {
                    return Err(String::from(
                        "reaction.params.m: must be a positive integer",
                    ));
                }
                ReactionSpec::coupled_power(sigma, rho, m as u32).map_err(|e| e.to_string())?
            }
            other => return Err(format!("unknown reaction `{other}`")),
        };
        Ok(spec.with_orientation(orientation))
    }

    /// The preset parameters when the preset block is present.
    pub fn kouachi_params(&self) -> Result<Option<KouachiParams>, String> {
        let Some(preset) = &self.kouachi else {
            return Ok(None);
        };
        let params = KouachiParams::new(
            preset.alpha,
            preset.beta,
            preset.gamma,
            preset.sigma,
            preset.rho,
        )
        .map_err(|e| e.to_string())?
        .with_scalar(&preset.f, preset.f_params.clone());
        Ok(Some(params))
    }
}

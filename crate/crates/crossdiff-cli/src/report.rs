//! JSON artifacts: the analyzer report, run metadata, and error records.
//!
//! Every JSON file is printed through [`sorted_json`], which rebuilds all
//! objects with alphabetically ordered keys so output bytes never depend
//! on struct field order or map implementation details.

use serde::Serialize;
use serde_json::{Map, Value};

use crossdiff_core::analysis::{
    block_conditions, compute_spectrum, kouachi_conditions, DiffusionMatrix,
};
use crossdiff_core::kouachi::KouachiSystem;
use crossdiff_core::semigroup::{default_growth_times, transient_growth};

use crate::config::SimulationConfig;

/// JSON Schema the analyzer report is guaranteed to validate against.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

/// Serializes a value as pretty JSON with sorted keys and a trailing newline.
pub fn sorted_json<T: Serialize>(value: &T) -> String {
    let raw = serde_json::to_value(value).expect("report values serialize");
    let canonical = canonicalize(raw);
    let mut text = serde_json::to_string_pretty(&canonical).expect("JSON prints");
    text.push('\n');
    text
}

fn canonicalize(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut sorted = Map::new();
            for (key, inner) in entries {
                sorted.insert(key, canonicalize(inner));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(canonicalize).collect()),
        other => other,
    }
}

/// Machine-readable failure record, written as error.json.
#[derive(Clone, Debug, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub details: Vec<String>,
}

impl ErrorReport {
    pub fn new(kind: &str, message: impl Into<String>) -> Self {
        ErrorReport {
            kind: String::from(kind),
            message: message.into(),
            details: Vec::new(),
        }
    }

    pub fn with_details(mut self, details: Vec<String>) -> Self {
        self.details = details;
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MatrixSummary {
    pub d: usize,
    pub entries: Vec<f64>,
    pub norm_fro: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenvalueEntry {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct JordanEntry {
    pub re: f64,
    pub im: f64,
    pub block_sizes: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumSection {
    pub eigenvalues: Vec<EigenvalueEntry>,
    pub jordan_blocks: Vec<JordanEntry>,
    pub normality_defect: f64,
    pub min_real_part: f64,
    pub diagnostic: bool,
    pub tol_cluster: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct H0Section {
    pub pass: bool,
    pub symbol_accretive: bool,
    pub zero_matrix: bool,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockSection {
    pub blocks_commute: bool,
    pub m1_invertible: bool,
    pub m4_invertible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KouachiVerdicts {
    pub dominance: bool,
    pub positivity: bool,
    pub eigenvalue_high: f64,
    pub eigenvalue_low: f64,
}

/// JSON cannot carry infinities, so an overflowing amplification is
/// clamped to `f64::MAX` and flagged through `unbounded`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthSection {
    pub max_amplification: f64,
    pub sampled_times: Vec<f64>,
    pub unbounded: bool,
}

/// Everything the analyze command reports about one diffusion matrix.
#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub matrix: MatrixSummary,
    pub spectrum: SpectrumSection,
    pub h0: H0Section,
    pub block_conditions: Option<BlockSection>,
    pub kouachi: Option<KouachiVerdicts>,
    pub transient_growth: GrowthSection,
}

/// Runs the full analyzer pipeline on one matrix. Works for any matrix the
/// constructors accept, the zero matrix included; refusal decisions belong
/// to the caller.
pub fn build_analysis_report(m: &DiffusionMatrix) -> Result<AnalysisReport, String> {
    let d = m.dim();
    let mut entries = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            entries.push(m.entry(i, j));
        }
    }
    let tol_cluster = 1e-8 * (1.0 + m.norm_fro());
    let spectrum = compute_spectrum(m, tol_cluster).map_err(|e| e.to_string())?;
    let verdicts = block_conditions(m).map_err(|e| e.to_string())?;

    let kouachi = detect_kouachi_shape(m, &entries);
    let times = default_growth_times();
    let amplification = transient_growth(m, &times);
    let growth = GrowthSection {
        max_amplification: if amplification.is_finite() {
            amplification
        } else {
            f64::MAX
        },
        sampled_times: times,
        unbounded: !amplification.is_finite(),
    };

    Ok(AnalysisReport {
        matrix: MatrixSummary {
            d,
            entries,
            norm_fro: m.norm_fro(),
        },
        spectrum: SpectrumSection {
            eigenvalues: spectrum
                .eigenvalues
                .iter()
                .map(|g| EigenvalueEntry {
                    re: g.value.re,
                    im: g.value.im,
                    multiplicity: g.multiplicity,
                })
                .collect(),
            jordan_blocks: spectrum
                .jordan_blocks
                .iter()
                .map(|j| JordanEntry {
                    re: j.value.re,
                    im: j.value.im,
                    block_sizes: j.block_sizes.clone(),
                })
                .collect(),
            normality_defect: spectrum.normality_defect,
            min_real_part: spectrum.min_real_part,
            diagnostic: spectrum.diagnostic,
            tol_cluster: spectrum.tol_cluster,
        },
        h0: H0Section {
            pass: verdicts.h0_pass,
            symbol_accretive: verdicts.symbol_accretive,
            zero_matrix: verdicts.is_zero_matrix,
            notes: verdicts.notes.clone(),
        },
        block_conditions: verdicts.blocks.map(|b| BlockSection {
            blocks_commute: b.blocks_commute,
            m1_invertible: b.m1_invertible,
            m4_invertible: b.m4_invertible,
        }),
        kouachi,
        transient_growth: growth,
    })
}

fn detect_kouachi_shape(m: &DiffusionMatrix, entries: &[f64]) -> Option<KouachiVerdicts> {
    if m.dim() != 2 {
        return None;
    }
    let (alpha, beta, gamma, delta) = (entries[0], entries[1], entries[2], entries[3]);
    if (alpha - delta).abs() > 1e-12 * (1.0 + alpha.abs()) {
        return None;
    }
    let conditions = kouachi_conditions(alpha, beta, gamma).ok()?;
    let root = (beta * gamma).sqrt();
    Some(KouachiVerdicts {
        dominance: conditions.dominance,
        positivity: conditions.positivity,
        eigenvalue_high: alpha + root,
        eigenvalue_low: alpha - root,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FrameIndexEntry {
    pub file: String,
    pub step: usize,
    pub time: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct KouachiMeta {
    pub dominance: bool,
    pub positivity: bool,
    pub eigenvalue_high: f64,
    pub eigenvalue_low: f64,
    pub origin_value: f64,
    pub sign_condition_min: f64,
    pub notes: Vec<String>,
}

impl KouachiMeta {
    pub fn from_system(system: &KouachiSystem) -> Self {
        KouachiMeta {
            dominance: system.conditions.dominance,
            positivity: system.conditions.positivity,
            eigenvalue_high: system.eigenvalues.0,
            eigenvalue_low: system.eigenvalues.1,
            origin_value: system.origin_value,
            sign_condition_min: system.sign_condition_min,
            notes: system.notes.clone(),
        }
    }
}

/// Sidecar metadata for simulate and kouachi runs.
#[derive(Clone, Debug, Serialize)]
pub struct MetaReport {
    pub command: String,
    pub config: SimulationConfig,
    pub analysis: AnalysisReport,
    pub kouachi: Option<KouachiMeta>,
    pub frames: Vec<FrameIndexEntry>,
    pub steps_completed: usize,
    pub final_time: f64,
    pub wall_time_ms: u64,
}

/// Bound-check record for the stationary command.
#[derive(Clone, Debug, Serialize)]
pub struct StationaryRecord {
    pub epsilon: f64,
    pub lambda: f64,
    pub norm_source: f64,
    pub norm_solution: f64,
    pub bound: f64,
    pub bound_satisfied: bool,
    pub wall_time_ms: u64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn identity2() -> DiffusionMatrix {
        DiffusionMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap()
    }

    #[test]
    fn json_keys_come_out_sorted() {
        let report = build_analysis_report(&identity2()).unwrap();
        let text = sorted_json(&report);
        let block = text.find("\"block_conditions\"").unwrap();
        let h0 = text.find("\"h0\"").unwrap();
        let kouachi = text.find("\"kouachi\"").unwrap();
        let matrix = text.find("\"matrix\"").unwrap();
        let spectrum = text.find("\"spectrum\"").unwrap();
        let growth = text.find("\"transient_growth\"").unwrap();
        assert!(block < h0 && h0 < kouachi && kouachi < matrix);
        assert!(matrix < spectrum && spectrum < growth);
        assert!(text.ends_with('\n'));
    }

    #[test]
    fn equal_diagonal_matrix_gets_kouachi_verdicts() {
        let m = DiffusionMatrix::new(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let report = build_analysis_report(&m).unwrap();
        let verdicts = report.kouachi.expect("shape matches the preset");
        assert!(verdicts.dominance);
        assert!(verdicts.positivity);
        assert!((verdicts.eigenvalue_high - 3.0).abs() < 1e-12);
        assert!((verdicts.eigenvalue_low - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_diagonal_omits_kouachi_verdicts() {
        let m = DiffusionMatrix::new(2, vec![2.0, 1.0, 1.0, 5.0]).unwrap();
        let report = build_analysis_report(&m).unwrap();
        assert!(report.kouachi.is_none());
    }

    #[test]
    fn zero_matrix_still_reports() {
        let m = DiffusionMatrix::new(2, vec![0.0; 4]).unwrap();
        let report = build_analysis_report(&m).unwrap();
        assert!(report.h0.zero_matrix);
        assert_eq!(report.spectrum.min_real_part, 0.0);
    }

    #[test]
    fn shear_matrix_shows_transient_growth() {
        let m = DiffusionMatrix::new(2, vec![0.0, 8.0, 0.0, 0.0]).unwrap();
        let report = build_analysis_report(&m).unwrap();
        assert!(report.transient_growth.max_amplification > 1.5);
        assert_eq!(report.transient_growth.sampled_times.len(), 25);
    }

    #[test]
    fn identity_has_no_transient_growth() {
        let report = build_analysis_report(&identity2()).unwrap();
        assert!(report.transient_growth.max_amplification <= 1.0 + 1e-10);
    }

    #[test]
    fn reports_validate_against_shipped_schema() {
        let schema: serde_json::Value = serde_json::from_str(REPORT_SCHEMA).unwrap();
        let validator = jsonschema::validator_for(&schema).unwrap();
        let cases: Vec<(usize, Vec<f64>)> = vec![
            (1, vec![1.0]),
            (2, vec![2.0, 1.0, 1.0, 2.0]),
            (2, vec![0.0; 4]),
            (2, vec![0.0, 8.0, 0.0, 0.0]),
            (3, vec![1.0, 2.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 4.0]),
            (2, vec![1.0, -1.0, 1.0, 1.0]),
            (4, {
                let mut e = vec![0.0; 16];
                for i in 0..4 {
                    e[i * 4 + i] = (i + 1) as f64;
                }
                e
            }),
        ];
        for (d, entries) in cases {
            let m = DiffusionMatrix::new(d, entries.clone()).unwrap();
            let report = build_analysis_report(&m).unwrap();
            let value: serde_json::Value = serde_json::from_str(&sorted_json(&report)).unwrap();
            let errors: Vec<String> = validator
                .iter_errors(&value)
                .map(|e| e.to_string())
                .collect();
            assert!(
                errors.is_empty(),
                "d = {d}, entries {entries:?}: {errors:?}"
            );
        }
    }
}

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::conditions::ConditionReport;
use super::config::ExperimentConfig;
use crate::asymptotics::{DichotomyVerdict, ExpansionFit};
use crate::constructions::{BundleSummary, SubsolutionReport, VertexBarrierReport};
use crate::solver::{DiscreteSolution, ResidualReport};
use crate::spectral::EigenResult;

/// Solver metadata for one grid of a ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub label: String,
    pub h: f64,
    pub nodes: usize,
    pub iterations: usize,
    pub pseudo_time_steps: usize,
    pub residual: f64,
    pub convexity_violations: usize,
    pub min_second_difference: f64,
    pub scheme: String,
    pub seconds: f64,
}

impl SolveReport {
    pub fn new(label: impl Into<String>, sol: &DiscreteSolution, seconds: f64) -> Self {
        SolveReport {
            label: label.into(),
            h: sol.h,
            nodes: sol.len(),
            iterations: sol.iterations,
            pseudo_time_steps: sol.pseudo_time_steps,
            residual: sol.residual,
            convexity_violations: sol.convexity_violations,
            min_second_difference: sol.min_second_difference,
            scheme: sol.scheme_id.clone(),
            seconds,
        }
    }
}

/// A named pass/fail check with the measured value and the threshold it was held to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub threshold: Option<f64>,
    pub detail: String,
}

impl Verdict {
    pub fn check(name: impl Into<String>, passed: bool, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed,
            value: Some(value),
            threshold: Some(threshold),
            detail: detail.into(),
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Verdict {
            name: name.into(),
            passed,
            value: None,
            threshold: None,
            detail: detail.into(),
        }
    }
}

/// A table destined for a CSV file. Undefined cells (a rate before enough rungs exist) are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Series {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

impl Series {
    pub fn new(columns: &[&str]) -> Self {
        Series {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; non-finite values become empty cells.
    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows
            .push(row.into_iter().map(|v| v.is_finite().then_some(v)).collect());
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySummary {
    pub cube_simple: bool,
    pub octahedron_simple: bool,
    /// `(b, Θ, arccos b)`.
    pub theta: Vec<(f64, f64, f64)>,
    pub instances: usize,
    pub orthogonal_deviation: f64,
    pub affine_deviation: f64,
    pub scaling_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationSummary {
    pub functions: usize,
    pub sup_violations: usize,
    pub holder_violations: usize,
    /// Largest measured/bound ratios.
    pub worst_sup_ratio: f64,
    pub worst_holder_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub pairs: usize,
    pub violations: usize,
    /// Largest `u₁ − u₂` over all pairs and nodes; non-positive when comparison holds exactly.
    pub worst_excess: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCertificates {
    pub bump_continuity_defect: f64,
    pub bump_min_second_derivative: f64,
    pub bump_values: [f64; 2],
    pub h_continuity_defect: f64,
    pub h_second_derivative_range: [f64; 2],
    pub anchors_exact: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleSummary {
    pub bundle: BundleSummary,
    pub g_lipschitz: f64,
    pub g_tilde_lipschitz: f64,
    /// `min (G̃ − G)` and the range of both profiles over the samples.
    pub min_gap: f64,
    pub range: [f64; 2],
    /// `(k, μ_k, window scale, amplitude)`.
    pub windows: Vec<(u32, f64, f64, f64)>,
    /// `max (u_F̃ − u_F)` when the comparison solve ran.
    pub comparison_excess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AnalysisOutput {
    Dichotomy {
        verdict: DichotomyVerdict,
        zoom_radii: Vec<f64>,
    },
    Expansion {
        fit: ExpansionFit,
        noise_floor: f64,
        nodes: usize,
    },
    Eigen {
        name: String,
        result: EigenResult,
    },
    Refinement {
        report: ResidualReport,
    },
    Scalar {
        name: String,
        values: Vec<f64>,
    },
    Conditions {
        report: ConditionReport,
    },
    Geometry {
        summary: GeometrySummary,
    },
    Interpolation {
        summary: InterpolationSummary,
    },
    Comparison {
        summary: ComparisonSummary,
    },
    Subsolution {
        report: Option<SubsolutionReport>,
        error: Option<String>,
    },
    VertexBarrier {
        report: Option<VertexBarrierReport>,
        error: Option<String>,
    },
    Profiles {
        certificates: ProfileCertificates,
    },
    Counterexample {
        summary: CounterexampleSummary,
    },
}

/// Everything an experiment produced, keyed to its configuration and the crate version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub id: String,
    pub kind: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub solves: Vec<SolveReport>,
    pub analyses: Vec<AnalysisOutput>,
    pub verdicts: Vec<Verdict>,
    pub series: BTreeMap<String, Series>,
    pub seconds: f64,
}

impl ResultDocument {
    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// The document with every wall-clock field zeroed, for determinism comparisons.
    pub fn without_timings(&self) -> Self {
        let mut d = self.clone();
        d.seconds = 0.0;
        for s in &mut d.solves {
            s.seconds = 0.0;
        }
        d.verdicts.retain(|v| v.name != "runtime");
        d
    }
}

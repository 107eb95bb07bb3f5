//! Experiment configuration, execution, persistence and presets.

pub mod conditions;
pub mod config;
pub mod document;
pub mod expr;
pub mod output;
pub mod presets;
mod run;
mod suites;

pub use conditions::{condition_report, ConditionReport, ConditionStatus, ConditionVerdict, VertexAngle};
pub use config::{
    parse_config, read_config, validate, Analysis, ConeSpec, ConstructionSpec, DomainSpec, EdgeExpectation,
    EigenDomain, EigenTarget, Experiment, ExperimentConfig, GridSpec, Outcome, PinSpec, PolytopeInput,
    VertexQuadratics,
};
pub use document::{AnalysisOutput, ResultDocument, Series, SolveReport, Verdict};
pub use expr::{parse as parse_expr, CompiledExpr, Expr};
pub use output::{emit_plot_data, read_result, write_result, PLOT_KINDS};
pub use presets::{list_presets, load_preset, PRESETS};
pub use run::run_experiment;
pub use suites::{error_name, COMPARISON_TOL};

//! Experiment configuration schema (JSON).

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::asymptotics::DichotomyClass;
use crate::constructions::{SubsolutionParams, VertexBarrierParams};
use crate::error::{Error, Result};
use crate::geometry::{Polytope, TangentCone};
use crate::normalize::AffineMap;
use crate::solver::{ComputationalDomain, SolverParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub experiment: Experiment,
    /// Named scalar thresholds, e.g. `max_seconds`.
    #[serde(default)]
    pub thresholds: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Dirichlet {
        domain: DomainSpec,
        f: String,
        phi: String,
        grid: GridSpec,
        #[serde(default)]
        analyses: Vec<Analysis>,
    },
    TruncatedCone {
        cone: ConeSpec,
        radius: f64,
        c: f64,
        #[serde(default)]
        pin: Option<PinSpec>,
        grid: GridSpec,
        #[serde(default)]
        analyses: Vec<Analysis>,
    },
    Eigen {
        mesh_h: f64,
        targets: Vec<EigenTarget>,
    },
    Conditions {
        polytope: PolytopeInput,
        f: String,
        phi: String,
        #[serde(default)]
        subsolution: Option<String>,
        #[serde(default = "default_per_edge")]
        per_edge: usize,
        /// Expected pass/fail per condition name (`C1` … `C5`).
        #[serde(default)]
        expect: BTreeMap<String, bool>,
    },
    Construction {
        construction: ConstructionSpec,
    },
    Counterexample {
        k_max: u32,
        lambda0: f64,
        #[serde(default)]
        windows: Vec<u32>,
        #[serde(default = "default_profile_samples")]
        samples: usize,
        /// Solve with both right-hand sides on this grid and compare nodewise.
        #[serde(default)]
        comparison_h: Option<f64>,
    },
    Geometry {
        #[serde(default = "default_b_values")]
        theta_b: Vec<f64>,
        #[serde(default = "default_instances")]
        invariance_instances: usize,
        seed: u64,
    },
    Interpolation {
        count: usize,
        seed: u64,
        #[serde(default = "default_degree")]
        max_degree: usize,
        #[serde(default = "default_interp_samples")]
        samples: usize,
    },
    Comparison {
        pairs: usize,
        seed: u64,
        h: f64,
    },
}

fn default_per_edge() -> usize {
    33
}
fn default_profile_samples() -> usize {
    10_000
}
fn default_b_values() -> Vec<f64> {
    vec![-0.5, 0.0, 0.5]
}
fn default_instances() -> usize {
    100
}
fn default_degree() -> usize {
    5
}
fn default_interp_samples() -> usize {
    201
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Dirichlet { .. } => "dirichlet",
            Experiment::TruncatedCone { .. } => "truncated_cone",
            Experiment::Eigen { .. } => "eigen",
            Experiment::Conditions { .. } => "conditions",
            Experiment::Construction { .. } => "construction",
            Experiment::Counterexample { .. } => "counterexample",
            Experiment::Geometry { .. } => "geometry",
            Experiment::Interpolation { .. } => "interpolation",
            Experiment::Comparison { .. } => "comparison",
        }
    }

    pub fn analyses(&self) -> &[Analysis] {
        match self {
            Experiment::Dirichlet { analyses, .. } | Experiment::TruncatedCone { analyses, .. } => analyses,
            _ => &[],
        }
    }

    /// Replaces the grid ladder (or the eigen mesh size) by a single value.
    pub fn override_grid(&mut self, h: f64) {
        match self {
            Experiment::Dirichlet { grid, .. } | Experiment::TruncatedCone { grid, .. } => grid.ladder = vec![h],
            Experiment::Eigen { mesh_h, .. } => *mesh_h = h,
            Experiment::Comparison { h: hh, .. } => *hh = h,
            Experiment::Counterexample { comparison_h, .. } => *comparison_h = Some(h),
            _ => {}
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Grid sizes, coarse to fine.
    pub ladder: Vec<f64>,
    #[serde(default)]
    pub stencil_width: Option<i32>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub max_damping: Option<usize>,
}

impl GridSpec {
    pub fn params(&self, h: f64) -> SolverParams {
        let d = SolverParams::with_h(h);
        SolverParams {
            stencil_width: self.stencil_width,
            tol: self.tol.unwrap_or(d.tol),
            max_damping: self.max_damping.unwrap_or(d.max_damping),
            ..d
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PinSpec {
    pub p0: Vec<f64>,
    pub a: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConeSpec {
    Orthant { k: usize, n: usize },
    VMu { mu: f64, n: usize },
    Normals { normals: Vec<Vec<f64>> },
}

impl ConeSpec {
    pub fn build(&self) -> Result<TangentCone> {
        match self {
            ConeSpec::Orthant { k, n } => TangentCone::orthant(*k, *n),
            ConeSpec::VMu { mu, n } => TangentCone::v_mu(*mu, *n),
            ConeSpec::Normals { normals } => {
                let n = normals.first().map_or(0, Vec::len);
                let vs: Vec<DVector<f64>> = normals.iter().map(|v| DVector::from_column_slice(v)).collect();
                TangentCone::from_normals(DVector::zeros(n), &vs, 1e-9)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolytopeInput {
    Cube { n: usize },
    CrossPolytope { n: usize },
    Simplex { n: usize },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Vertices { vertices: Vec<Vec<f64>> },
}

impl PolytopeInput {
    pub fn build(&self) -> Result<Polytope> {
        match self {
            PolytopeInput::Cube { n } => Ok(Polytope::unit_cube(*n)),
            PolytopeInput::CrossPolytope { n } => Ok(Polytope::cross_polytope(*n)),
            PolytopeInput::Simplex { n } => Ok(Polytope::standard_simplex(*n)),
            PolytopeInput::Box { lo, hi } => Polytope::axis_box(lo, hi),
            PolytopeInput::Vertices { vertices } => {
                let pts: Vec<DVector<f64>> = vertices.iter().map(|v| DVector::from_column_slice(v)).collect();
                Polytope::from_vertices(&pts, 1e-9)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Polytope { polytope: PolytopeInput },
    Wedge { mu: f64, radius: f64, half_length: f64 },
    Cone { cone: ConeSpec, radius: f64 },
}

impl DomainSpec {
    pub fn build(&self) -> Result<ComputationalDomain> {
        match self {
            DomainSpec::Polytope { polytope } => ComputationalDomain::from_polytope(&polytope.build()?),
            DomainSpec::Wedge {
                mu,
                radius,
                half_length,
            } => ComputationalDomain::wedge(*mu, *radius, *half_length),
            DomainSpec::Cone { cone, radius } => ComputationalDomain::truncated_cone(&cone.build()?, *radius),
        }
    }

    pub fn dim(&self) -> Result<usize> {
        Ok(self.build()?.dim)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EdgeExpectation {
    /// Every `|c(x₃)|` below the oracle-calibrated noise floor.
    BelowNoiseFloor,
    /// Every `c(x₃)` below the given value.
    Negative { below: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Analysis {
    /// Nodal error against a closed form, `≤ factor·h²` on every grid.
    ExactError { exact: String, factor: f64 },
    /// `u ≤ bound + slack_h·h` at every node of every grid.
    UpperBound { bound: String, slack_h: f64 },
    /// `min (u − reference) < below` on the finest grid.
    MinGap { reference: String, below: f64 },
    /// `|u(p₀) − a| ≤ tol` for the pinned cone solve.
    Pin { tol: f64 },
    Corner {
        corner: Vec<f64>,
        f0: f64,
        /// Linear part of the normalizing map; the shift sends the corner to the origin.
        #[serde(default)]
        normalizing_linear: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        subsolution_u12: Option<f64>,
        #[serde(default)]
        zoom_levels: Option<usize>,
        #[serde(default)]
        cells: Option<usize>,
        #[serde(default)]
        expect: Option<DichotomyClass>,
        #[serde(default)]
        expect_u12: Option<f64>,
        #[serde(default = "default_u12_tol")]
        u12_tol: f64,
        #[serde(default)]
        spread_above: Option<f64>,
    },
    Edge {
        mu: f64,
        radius: f64,
        x3: Vec<f64>,
        expect: EdgeExpectation,
        #[serde(default)]
        max_nodes: Option<usize>,
    },
    /// Convergence metadata of the ladder; fails on convexity violations when requested.
    Refinement {
        #[serde(default)]
        max_violations: Option<usize>,
    },
    /// Largest Hessian eigenvalue along the ladder: per-refinement relative increase at most
    /// `max_relative_increase` and increments non-increasing.
    HessianTrend { max_relative_increase: f64 },
}

fn default_u12_tol() -> f64 {
    0.05
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::ExactError { .. } => "exact_error",
            Analysis::UpperBound { .. } => "upper_bound",
            Analysis::MinGap { .. } => "min_gap",
            Analysis::Pin { .. } => "pin",
            Analysis::Corner { .. } => "corner",
            Analysis::Edge { .. } => "edge",
            Analysis::Refinement { .. } => "refinement",
            Analysis::HessianTrend { .. } => "hessian_trend",
        }
    }
}

/// Expected outcome of a construction: success or a named error variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Accepted,
    Error(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexQuadratics {
    /// Hessians making every normalized angle acute.
    Acute,
    /// `½|x − p|²` at every vertex.
    HalfNormSq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstructionSpec {
    Subsolution {
        polytope: PolytopeInput,
        quadratics: VertexQuadratics,
        #[serde(default)]
        params: Option<SubsolutionParams>,
        expect: Outcome,
    },
    VertexBarrier {
        polytope: PolytopeInput,
        f: String,
        phi: String,
        vertex: usize,
        #[serde(default)]
        params: Option<VertexBarrierParams>,
        expect: Outcome,
    },
    /// Certificates of the one-dimensional profiles.
    Profiles {
        eps0: f64,
        delta: f64,
        k_max: u32,
        #[serde(default = "default_profile_samples")]
        samples: usize,
    },
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

pub fn read_config(path: &std::path::Path) -> Result<ExperimentConfig> {
    parse_config(&std::fs::read_to_string(path)?)
}

fn check_ladder(grid: &GridSpec) -> Result<()> {
    if grid.ladder.is_empty() || grid.ladder.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::Config("grid ladder must be non-empty and positive".into()));
    }
    if grid.ladder.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("grid ladder must decrease".into()));
    }
    Ok(())
}

/// Schema checks beyond what deserialization enforces, including expression parsing.
pub fn validate(cfg: &ExperimentConfig) -> Result<()> {
    use super::expr::CompiledExpr;
    if cfg.id.trim().is_empty() {
        return Err(Error::Config("experiment id is empty".into()));
    }
    let exprs = |dim: usize, list: &[&str]| -> Result<()> {
        for s in list {
            CompiledExpr::new(s, dim)?;
        }
        Ok(())
    };
    let analysis_exprs = |dim: usize, analyses: &[Analysis]| -> Result<()> {
        for a in analyses {
            match a {
                Analysis::ExactError { exact, .. } => exprs(dim, &[exact])?,
                Analysis::UpperBound { bound, .. } => exprs(dim, &[bound])?,
                Analysis::MinGap { reference, .. } => exprs(dim, &[reference])?,
                Analysis::Corner { corner, .. } if corner.len() != dim => {
                    return Err(Error::Config(format!("corner {corner:?} is not {dim}-dimensional")))
                }
                _ => {}
            }
        }
        Ok(())
    };
    match &cfg.experiment {
        Experiment::Dirichlet {
            domain,
            f,
            phi,
            grid,
            analyses,
        } => {
            let dim = domain.dim()?;
            check_ladder(grid)?;
            exprs(dim, &[f, phi])?;
            analysis_exprs(dim, analyses)?;
        }
        Experiment::TruncatedCone {
            cone,
            grid,
            analyses,
            pin,
            ..
        } => {
            let dim = cone.build()?.dim();
            check_ladder(grid)?;
            analysis_exprs(dim, analyses)?;
            if analyses.iter().any(|a| matches!(a, Analysis::Pin { .. })) && pin.is_none() {
                return Err(Error::Config("pin analysis without a pin".into()));
            }
        }
        Experiment::Eigen { mesh_h, targets } => {
            if !(*mesh_h > 0.0) || targets.is_empty() {
                return Err(Error::Config("eigen experiment needs mesh_h > 0 and a target".into()));
            }
        }
        Experiment::Conditions {
            polytope,
            f,
            phi,
            subsolution,
            ..
        } => {
            let dim = polytope.build()?.dim;
            exprs(dim, &[f, phi])?;
            if let Some(s) = subsolution {
                exprs(dim, &[s])?;
            }
        }
        Experiment::Construction {
            construction: ConstructionSpec::VertexBarrier { polytope, f, phi, .. },
        } => {
            exprs(polytope.build()?.dim, &[f, phi])?;
        }
        Experiment::Comparison { pairs, h, .. } if *pairs == 0 || !(*h > 0.0) => {
            return Err(Error::Config("comparison needs pairs > 0 and h > 0".into()));
        }
        _ => {}
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EigenTarget {
    pub name: String,
    pub target: EigenDomain,
    #[serde(default)]
    pub expected: Option<f64>,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
}

fn default_rel_tol() -> f64 {
    0.01
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum EigenDomain {
    Arc { opening: f64 },
    Cone { cone: ConeSpec },
}

/// Normalizing map with the given linear part sending `corner` to the origin.
pub fn corner_map(linear: Option<&Vec<Vec<f64>>>, corner: &[f64]) -> Result<AffineMap> {
    let n = corner.len();
    let l = match linear {
        Some(rows) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Config("normalizing map has the wrong shape".into()));
            }
            DMatrix::from_fn(n, n, |i, j| rows[i][j])
        }
        None => DMatrix::identity(n, n),
    };
    let c = DVector::from_column_slice(corner);
    let shift = -(&l * c);
    AffineMap::new(l, shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_unknown_fields_and_identifiers() {
        let ok = r#"{"id":"q","experiment":{"kind":"dirichlet","domain":{"type":"polytope","polytope":{"type":"cube","n":2}},
            "f":"1","phi":"0.5*(x1^2+x2^2)","grid":{"ladder":[0.125]}}}"#;
        assert!(parse_config(ok).is_ok());
        let bad_ident = ok.replace("x2^2", "y^2");
        assert!(matches!(parse_config(&bad_ident), Err(Error::Expr(_))));
        let bad_field = ok.replace("\"f\":\"1\"", "\"f\":\"1\",\"g\":\"2\"");
        assert!(matches!(parse_config(&bad_field), Err(Error::Config(_))));
        let bad_var = ok.replace("x2^2", "x3^2");
        assert!(matches!(parse_config(&bad_var), Err(Error::Expr(_))));
    }
}

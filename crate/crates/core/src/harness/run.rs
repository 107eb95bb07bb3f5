//! Experiment pipeline: build the domain, solve the ladder, run the analyses, issue verdicts.

use std::collections::BTreeMap;
use std::time::Instant;

use super::config::{corner_map, Analysis, EdgeExpectation, EigenDomain, Experiment, ExperimentConfig, PinSpec};
use super::document::{AnalysisOutput, ResultDocument, Series, SolveReport, Verdict};
use super::expr::CompiledExpr;
use super::suites;
use crate::asymptotics::{
    corner_jet_extract, corner_zoom, default_fit_params, edge_expansion_fit, edge_samples, oracle_noise_floor,
    CornerParams,
};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::solver::{
    residual_report, solve_dirichlet, solve_truncated_cone, ComputationalDomain, DiscreteSolution, Pin,
};
use crate::spectral::{lambda1_arc, lambda1_of_cone};

/// Output being assembled by a pipeline.
#[derive(Default)]
pub(crate) struct Sink {
    pub solves: Vec<SolveReport>,
    pub analyses: Vec<AnalysisOutput>,
    pub verdicts: Vec<Verdict>,
    pub series: BTreeMap<String, Series>,
}

/// Runs one experiment. Deterministic given the configuration; errors carry the experiment id.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultDocument> {
    let start = Instant::now();
    let mut sink = Sink::default();
    run_inner(cfg, &mut sink).map_err(|e| Error::Experiment {
        id: cfg.id.clone(),
        source: Box::new(e),
    })?;
    let seconds = start.elapsed().as_secs_f64();
    if let Some(&limit) = cfg.thresholds.get("max_seconds") {
        sink.verdicts.push(Verdict::check(
            "runtime",
            seconds < limit,
            seconds,
            limit,
            "wall-clock seconds for the whole experiment",
        ));
    }
    Ok(ResultDocument {
        id: cfg.id.clone(),
        kind: cfg.experiment.kind().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: cfg.clone(),
        solves: sink.solves,
        analyses: sink.analyses,
        verdicts: sink.verdicts,
        series: sink.series,
        seconds,
    })
}

fn run_inner(cfg: &ExperimentConfig, sink: &mut Sink) -> Result<()> {
    super::config::validate(cfg)?;
    match &cfg.experiment {
        Experiment::Dirichlet {
            domain,
            f,
            phi,
            grid,
            analyses,
        } => {
            let dom = domain.build()?;
            let f = CompiledExpr::new(f, dom.dim)?.field();
            let phi = CompiledExpr::new(phi, dom.dim)?.field();
            let mut ladder = Vec::new();
            for &h in &grid.ladder {
                let t = Instant::now();
                let sol = solve_dirichlet(&dom, &f, &phi, &grid.params(h))?;
                sink.solves
                    .push(SolveReport::new(format!("h={h}"), &sol, t.elapsed().as_secs_f64()));
                ladder.push(sol);
            }
            let ctx = SolveContext {
                dom: &dom,
                f: &f,
                phi: &phi,
                pin: None,
            };
            run_analyses(&ctx, &ladder, grid, analyses, sink)
        }
        Experiment::TruncatedCone {
            cone,
            radius,
            c,
            pin,
            grid,
            analyses,
        } => {
            let tc = cone.build()?;
            let dom = ComputationalDomain::truncated_cone(&tc, *radius)?;
            let pin_v = pin.as_ref().map(|p| Pin {
                p0: p.p0.clone(),
                a: p.a,
                tol: p.tol,
            });
            let mut ladder = Vec::new();
            for &h in &grid.ladder {
                let t = Instant::now();
                let sol = solve_truncated_cone(&tc, *radius, *c, pin_v.as_ref(), &grid.params(h))?;
                sink.solves
                    .push(SolveReport::new(format!("h={h}"), &sol, t.elapsed().as_secs_f64()));
                ladder.push(sol);
            }
            let f = ScalarField::constant(*c);
            let phi = ScalarField::half_norm_sq();
            let ctx = SolveContext {
                dom: &dom,
                f: &f,
                phi: &phi,
                pin: pin.as_ref(),
            };
            run_analyses(&ctx, &ladder, grid, analyses, sink)
        }
        Experiment::Eigen { mesh_h, targets } => {
            let mut table = Series::new(&["target", "level", "mesh_size", "dofs", "lambda1"]);
            for (i, t) in targets.iter().enumerate() {
                let res = match &t.target {
                    EigenDomain::Arc { opening } => lambda1_arc(*opening)?,
                    EigenDomain::Cone { cone } => lambda1_of_cone(&cone.build()?, *mesh_h)?,
                };
                for l in &res.levels {
                    table.push(vec![i as f64, l.level as f64, l.mesh_size, l.dofs as f64, l.lambda1]);
                }
                if let Some(e) = t.expected {
                    let rel = (res.lambda1 - e).abs() / e.abs();
                    sink.verdicts.push(Verdict::check(
                        format!("lambda1[{}]", t.name),
                        rel <= t.rel_tol,
                        res.lambda1,
                        e,
                        format!("relative error {rel:.2e} against tolerance {:.0e}", t.rel_tol),
                    ));
                }
                sink.analyses.push(AnalysisOutput::Eigen {
                    name: t.name.clone(),
                    result: res,
                });
            }
            sink.series.insert("eigen-vs-mesh".into(), table);
            Ok(())
        }
        Experiment::Conditions { .. } => suites::conditions(&cfg.experiment, sink),
        Experiment::Construction { construction } => suites::construction(construction, sink),
        Experiment::Counterexample { .. } => suites::counterexample(&cfg.experiment, sink),
        Experiment::Geometry {
            theta_b,
            invariance_instances,
            seed,
        } => suites::geometry(theta_b, *invariance_instances, *seed, sink),
        Experiment::Interpolation {
            count,
            seed,
            max_degree,
            samples,
        } => suites::interpolation(*count, *seed, *max_degree, *samples, sink),
        Experiment::Comparison { pairs, seed, h } => suites::comparison(*pairs, *seed, *h, sink),
    }
}

struct SolveContext<'a> {
    dom: &'a ComputationalDomain,
    f: &'a ScalarField,
    phi: &'a ScalarField,
    pin: Option<&'a PinSpec>,
}

fn field(src: &str, dim: usize) -> Result<CompiledExpr> {
    CompiledExpr::new(src, dim)
}

fn run_analyses(
    ctx: &SolveContext<'_>,
    ladder: &[DiscreteSolution],
    grid: &super::config::GridSpec,
    analyses: &[Analysis],
    sink: &mut Sink,
) -> Result<()> {
    let finest = ladder.last().ok_or_else(|| Error::Config("empty ladder".into()))?;
    let dim = ctx.dom.dim;
    let mut refinement = Series::new(&["h", "residual", "rate"]);
    for k in 0..ladder.len() {
        let rate = if k >= 2 {
            residual_report(&ladder[..=k])?
                .grid_convergence_rate
                .unwrap_or(f64::NAN)
        } else {
            f64::NAN
        };
        refinement.push(vec![ladder[k].h, ladder[k].residual, rate]);
    }
    sink.series.insert("refinement".into(), refinement);

    for a in analyses {
        match a {
            Analysis::ExactError { exact, factor } => {
                let ex = field(exact, dim)?;
                let mut s = Series::new(&["h", "max_error", "bound"]);
                for sol in ladder {
                    let err = sol.max_error(|x| ex.eval(x));
                    let bound = factor * sol.h * sol.h;
                    s.push(vec![sol.h, err, bound]);
                    sink.verdicts.push(Verdict::check(
                        format!("exact_error[h={}]", sol.h),
                        err <= bound,
                        err,
                        bound,
                        format!("max nodal error against {exact}"),
                    ));
                }
                sink.series.insert("exact-error".into(), s);
            }
            Analysis::UpperBound { bound, slack_h } => {
                let b = field(bound, dim)?;
                for sol in ladder {
                    let excess = (0..sol.len())
                        .map(|id| sol.values[id] - b.eval(&sol.physical_point(id)) - slack_h * sol.h)
                        .fold(f64::NEG_INFINITY, f64::max);
                    sink.verdicts.push(Verdict::check(
                        format!("upper_bound[h={}]", sol.h),
                        excess <= 0.0,
                        excess,
                        0.0,
                        format!("max over nodes of u - ({bound}) - {slack_h} h"),
                    ));
                }
            }
            Analysis::MinGap { reference, below } => {
                let r = field(reference, dim)?;
                let gap = (0..finest.len())
                    .map(|id| finest.values[id] - r.eval(&finest.physical_point(id)))
                    .fold(f64::INFINITY, f64::min);
                sink.analyses.push(AnalysisOutput::Scalar {
                    name: "min_gap".into(),
                    values: vec![gap],
                });
                sink.verdicts.push(Verdict::check(
                    "min_gap",
                    gap < *below,
                    gap,
                    *below,
                    format!("min over nodes of u - ({reference})"),
                ));
            }
            Analysis::Pin { tol } => {
                let pin = ctx
                    .pin
                    .ok_or_else(|| Error::Config("pin analysis without a pin".into()))?;
                let v = finest.interpolate(&pin.p0)?;
                sink.analyses.push(AnalysisOutput::Scalar {
                    name: "pinned_value".into(),
                    values: vec![v],
                });
                sink.verdicts.push(Verdict::check(
                    "pin",
                    (v - pin.a).abs() <= *tol,
                    v,
                    pin.a,
                    format!("u(p0) within {tol:e} of the target"),
                ));
            }
            Analysis::Corner {
                corner,
                f0,
                normalizing_linear,
                subsolution_u12,
                zoom_levels,
                cells,
                expect,
                expect_u12,
                u12_tol,
                spread_above,
            } => {
                let d = CornerParams::default();
                let prm = CornerParams {
                    zoom_levels: zoom_levels.unwrap_or(d.zoom_levels),
                    cells: cells.unwrap_or(d.cells),
                    ..d
                };
                let levels = corner_zoom(
                    ctx.dom,
                    ctx.f,
                    ctx.phi,
                    finest.clone(),
                    corner,
                    &grid.params(finest.h),
                    &prm,
                )?;
                let map = corner_map(normalizing_linear.as_ref(), corner)?;
                let verdict = corner_jet_extract(&levels, corner, *f0, &map, *subsolution_u12, &prm)?;
                let mut s = Series::new(&["r", "direction", "estimate"]);
                for (k, dir) in verdict.series.iter().enumerate() {
                    for (r, e) in dir.radii.iter().zip(&dir.estimates) {
                        s.push(vec![*r, k as f64, *e]);
                    }
                }
                sink.series.insert("corner-u12-vs-r".into(), s);
                if let Some(c) = expect {
                    sink.verdicts.push(Verdict::flag(
                        "dichotomy_class",
                        verdict.class == *c,
                        format!("classified {:?}, expected {c:?}", verdict.class),
                    ));
                }
                if let Some(u) = expect_u12 {
                    sink.verdicts.push(Verdict::check(
                        "corner_u12",
                        (verdict.estimated_u12 - u).abs() <= *u12_tol,
                        verdict.estimated_u12,
                        *u,
                        format!("extrapolated mixed derivative within {u12_tol}"),
                    ));
                }
                if let Some(t) = spread_above {
                    sink.verdicts.push(Verdict::check(
                        "direction_spread",
                        verdict.direction_spread > *t,
                        verdict.direction_spread,
                        *t,
                        "spread of the extrapolated estimates over approach directions",
                    ));
                }
                sink.analyses.push(AnalysisOutput::Dichotomy {
                    verdict,
                    zoom_radii: levels.iter().map(|l| l.rho).collect(),
                });
            }
            Analysis::Edge {
                mu,
                radius,
                x3,
                expect,
                max_nodes,
            } => {
                let prm = default_fit_params(finest, *radius);
                let fit = edge_expansion_fit(finest, *mu, x3, &prm)?;
                let floor = oracle_noise_floor(&edge_samples(finest)?, *mu, x3, &prm)?;
                let mut s = Series::new(&["x3", "c"]);
                for (z, c) in fit.x3.iter().zip(&fit.coefficient_c) {
                    s.push(vec![*z, *c]);
                }
                sink.series.insert("edge-coefficient".into(), s);
                let worst_abs = fit.coefficient_c.iter().map(|c| c.abs()).fold(0.0, f64::max);
                let worst = fit.coefficient_c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                sink.verdicts.push(match expect {
                    EdgeExpectation::BelowNoiseFloor => Verdict::check(
                        "edge_coefficient",
                        worst_abs < floor,
                        worst_abs,
                        floor,
                        "max |c(x3)| against the oracle noise floor",
                    ),
                    EdgeExpectation::Negative { below } => Verdict::check(
                        "edge_coefficient",
                        worst < *below,
                        worst,
                        *below,
                        "max c(x3) over the requested slices",
                    ),
                });
                if let Some(m) = max_nodes {
                    sink.verdicts.push(Verdict::check(
                        "edge_nodes",
                        finest.len() <= *m,
                        finest.len() as f64,
                        *m as f64,
                        "lattice nodes of the wedge solve",
                    ));
                }
                sink.analyses.push(AnalysisOutput::Expansion {
                    fit,
                    noise_floor: floor,
                    nodes: finest.len(),
                });
            }
            Analysis::Refinement { max_violations } => {
                let report = residual_report(ladder)?;
                if let Some(m) = max_violations {
                    sink.verdicts.push(Verdict::check(
                        "convexity_violations",
                        report.convexity_violations <= *m,
                        report.convexity_violations as f64,
                        *m as f64,
                        "unknowns with a second difference below -10 h^2",
                    ));
                }
                sink.analyses.push(AnalysisOutput::Refinement { report });
            }
            Analysis::HessianTrend { max_relative_increase } => {
                if ladder.len() < 3 {
                    return Err(Error::Config("hessian trend needs at least three grids".into()));
                }
                let m: Vec<f64> = ladder.iter().map(|s| s.max_hessian_eigenvalue()).collect();
                let mut s = Series::new(&["h", "max_eigenvalue"]);
                for (sol, v) in ladder.iter().zip(&m) {
                    s.push(vec![sol.h, *v]);
                }
                sink.series.insert("hessian-trend".into(), s);
                let incs: Vec<f64> = m.windows(2).map(|w| w[1] - w[0]).collect();
                let worst_rel = m
                    .windows(2)
                    .map(|w| (w[1] - w[0]) / w[0].abs())
                    .fold(f64::NEG_INFINITY, f64::max);
                let shrinking = incs.last().copied().unwrap_or(0.0) <= incs[0].max(0.0);
                sink.verdicts.push(Verdict::check(
                    "hessian_trend",
                    worst_rel <= *max_relative_increase && shrinking,
                    worst_rel,
                    *max_relative_increase,
                    format!("max probed eigenvalue per grid {m:?}; last increment must not exceed the first"),
                ));
                sink.analyses.push(AnalysisOutput::Scalar {
                    name: "max_hessian_eigenvalue".into(),
                    values: m,
                });
            }
        }
    }
    Ok(())
}

//! Monotone wide-stencil solver for `det D²u = f` with Dirichlet data.
//!
//! The grid lives on `h·ℤⁿ` intersected with the domain. Stencil arms that leave the domain are
//! cut at the boundary and take the data there, so the scheme stays monotone on any convex
//! domain. The nonlinear system is solved by semismooth Newton from a Poisson start.

pub mod domain;
pub mod grid;
pub mod io;
pub mod newton;
pub mod scheme;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use domain::{BoundaryPiece, ComputationalDomain, DomainKind, Round};
pub use grid::{Discretization, Lattice};
pub use scheme::Stencil;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::TangentCone;
use crate::linalg;
use crate::normalize::AffineMap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub h: f64,
    /// Maximum stencil offset per coordinate; `None` picks 3 in the plane and 1 in space.
    pub stencil_width: Option<i32>,
    pub tol: f64,
    pub max_newton: usize,
    pub max_damping: usize,
    pub pseudo_time_steps: usize,
}

impl SolverParams {
    pub fn with_h(h: f64) -> Self {
        SolverParams { h, ..Self::default() }
    }

    pub fn width_for(&self, dim: usize) -> i32 {
        self.stencil_width.unwrap_or(if dim == 2 { 3 } else { 1 })
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            h: 1.0 / 32.0,
            stencil_width: None,
            tol: 1e-8,
            max_newton: 80,
            max_damping: 12,
            pseudo_time_steps: 50,
        }
    }
}

/// Grid function solving the discrete scheme, with its lattice and convergence metadata.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub dim: usize,
    pub h: f64,
    pub kind: DomainKind,
    pub lattice: Lattice,
    /// One value per lattice node; boundary nodes carry the Dirichlet data.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub pseudo_time_steps: usize,
    /// `max |MA_h(u) − f|` over unknowns.
    pub residual: f64,
    pub scheme_id: String,
    /// Unknowns with some second difference below `−10h²`.
    pub convexity_violations: usize,
    pub min_second_difference: f64,
    /// Grid coordinates relate to physical ones by `x = S y`.
    pub affine: Option<AffineMap>,
    pub description: String,
}

/// A second-derivative estimate and the formal order of the stencil used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeEstimate {
    pub value: f64,
    pub order: u32,
    pub centered: bool,
}

impl DiscreteSolution {
    pub fn convexity_tolerance(&self) -> f64 {
        10.0 * self.h * self.h
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, id: usize) -> &[f64] {
        self.lattice.point(id)
    }

    pub fn physical_point(&self, id: usize) -> Vec<f64> {
        let y = self.point(id);
        match &self.affine {
            Some(s) => s.apply(&DVector::from_column_slice(y)).iter().copied().collect(),
            None => y.to_vec(),
        }
    }

    pub fn is_interior(&self, id: usize) -> bool {
        self.lattice.interior[id]
    }

    fn value_at(&self, k: &[i64]) -> Option<f64> {
        self.lattice.node_at(k).map(|i| self.values[i])
    }

    /// Multilinear interpolation in grid coordinates; every corner of the cell must be a node.
    pub fn interpolate(&self, y: &[f64]) -> Result<f64> {
        let n = self.dim;
        let base: Vec<i64> = y.iter().map(|c| (c / self.h).floor() as i64).collect();
        let frac: Vec<f64> = y.iter().zip(&base).map(|(c, b)| c / self.h - *b as f64).collect();
        let mut acc = 0.0;
        for mask in 0..(1usize << n) {
            let mut w = 1.0;
            let mut k = base.clone();
            for i in 0..n {
                if mask >> i & 1 == 1 {
                    k[i] += 1;
                    w *= frac[i];
                } else {
                    w *= 1.0 - frac[i];
                }
            }
            if w == 0.0 {
                continue;
            }
            acc += w * self.value_at(&k).ok_or_else(|| Error::OutOfDomain(y.to_vec()))?;
        }
        Ok(acc)
    }

    /// `∂ᵢⱼu` (0-based indices, grid coordinates) at the node nearest `y`. Centered differences
    /// when the neighbours exist, one-sided ones otherwise.
    pub fn hessian_probe(&self, y: &[f64], i: usize, j: usize) -> Result<ProbeEstimate> {
        let n = self.dim;
        if y.len() != n || i >= n || j >= n {
            return Err(Error::InvalidParams(format!("probe ({i},{j}) at a {}-point", y.len())));
        }
        let k0: Vec<i64> = y.iter().map(|c| (c / self.h).round() as i64).collect();
        let out = || Error::OutOfDomain(y.to_vec());
        let u0 = self.value_at(&k0).ok_or_else(out)?;
        let shifted = |steps: &[(usize, i64)]| {
            let mut k = k0.clone();
            for &(a, s) in steps {
                k[a] += s;
            }
            self.value_at(&k)
        };
        let h2 = self.h * self.h;
        if i == j {
            if let (Some(p), Some(m)) = (shifted(&[(i, 1)]), shifted(&[(i, -1)])) {
                return Ok(ProbeEstimate {
                    value: (p - 2.0 * u0 + m) / h2,
                    order: 2,
                    centered: true,
                });
            }
            for s in [1i64, -1] {
                if let (Some(u1), Some(u2), Some(u3)) =
                    (shifted(&[(i, s)]), shifted(&[(i, 2 * s)]), shifted(&[(i, 3 * s)]))
                {
                    return Ok(ProbeEstimate {
                        value: (2.0 * u0 - 5.0 * u1 + 4.0 * u2 - u3) / h2,
                        order: 2,
                        centered: false,
                    });
                }
            }
            return Err(out());
        }
        let corners = [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)].map(|(a, b)| shifted(&[(i, a), (j, b)]));
        if let [Some(pp), Some(pm), Some(mp), Some(mm)] = corners {
            return Ok(ProbeEstimate {
                value: (pp - pm - mp + mm) / (4.0 * h2),
                order: 2,
                centered: true,
            });
        }
        for (si, sj) in [(1i64, 1i64), (1, -1), (-1, 1), (-1, -1)] {
            if let (Some(a), Some(b), Some(c)) =
                (shifted(&[(i, si)]), shifted(&[(j, sj)]), shifted(&[(i, si), (j, sj)]))
            {
                return Ok(ProbeEstimate {
                    value: (si * sj) as f64 * (c - a - b + u0) / h2,
                    order: 1,
                    centered: false,
                });
            }
        }
        Err(out())
    }

    /// Full probed Hessian at the node nearest `y`.
    pub fn hessian_at(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = self.hessian_probe(y, i, j)?.value;
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        Ok(m)
    }

    /// Largest eigenvalue of the probed Hessian over all nodes where every probe is defined.
    pub fn max_hessian_eigenvalue(&self) -> f64 {
        (0..self.len())
            .filter_map(|id| self.hessian_at(self.point(id)).ok())
            .map(|m| *linalg::sym_eigen(&m).0.iter().next_back().expect("nonempty"))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest nodal deviation from a reference function of the physical coordinates.
    pub fn max_error(&self, exact: impl Fn(&[f64]) -> f64) -> f64 {
        (0..self.len())
            .map(|id| (self.values[id] - exact(&self.physical_point(id))).abs())
            .fold(0.0, f64::max)
    }
}

fn build_solution(dom: &ComputationalDomain, disc: &Discretization, out: newton::NewtonOutcome) -> DiscreteSolution {
    let h = disc.lattice.h;
    let mins = disc.min_second_differences(&out.u);
    let tau = 10.0 * h * h;
    DiscreteSolution {
        dim: dom.dim,
        h,
        kind: dom.kind,
        values: disc.node_values(&out.u),
        lattice: disc.lattice.clone(),
        iterations: out.iterations,
        pseudo_time_steps: out.pseudo_time_steps,
        residual: out.residual,
        scheme_id: disc.stencil.id(),
        convexity_violations: mins.iter().filter(|d| **d < -tau).count(),
        min_second_difference: mins.iter().copied().fold(f64::INFINITY, f64::min),
        affine: dom.affine_precompose.clone(),
        description: dom.description.clone(),
    }
}

fn controls(params: &SolverParams) -> newton::NewtonControls {
    newton::NewtonControls {
        tol: params.tol,
        max_newton: params.max_newton,
        max_damping: params.max_damping,
        pseudo_time_steps: params.pseudo_time_steps,
    }
}

/// Solves `det D²u = f` in `dom` with `u = φ` on the boundary. With an affine precomposition
/// `x = S y` the grid problem is `det D²w = (det S)² f(S y)`, `w = φ(S y)`.
pub fn solve_dirichlet(
    dom: &ComputationalDomain,
    f: &ScalarField,
    phi: &ScalarField,
    params: &SolverParams,
) -> Result<DiscreteSolution> {
    solve_with_start(dom, f, phi, params, None).map(|(s, _)| s)
}

/// As [`solve_dirichlet`], starting Newton from `guess` (a function of grid coordinates)
/// instead of the Poisson solve.
pub fn solve_dirichlet_from(
    dom: &ComputationalDomain,
    f: &ScalarField,
    phi: &ScalarField,
    params: &SolverParams,
    guess: &ScalarField,
) -> Result<DiscreteSolution> {
    let disc = Discretization::new(dom, params.h, params.width_for(dom.dim), f, phi)?;
    let u0: Vec<f64> = disc
        .unknowns
        .iter()
        .map(|&i| guess.eval(disc.lattice.point(i)))
        .collect();
    let out = newton::solve(&disc, u0, &controls(params))?;
    Ok(build_solution(dom, &disc, out))
}

fn solve_with_start(
    dom: &ComputationalDomain,
    f: &ScalarField,
    phi: &ScalarField,
    params: &SolverParams,
    start: Option<Vec<f64>>,
) -> Result<(DiscreteSolution, Vec<f64>)> {
    let disc = Discretization::new(dom, params.h, params.width_for(dom.dim), f, phi)?;
    let u0 = match start {
        Some(u) if u.len() == disc.nunknowns() => u,
        _ => newton::poisson_start(&disc)?,
    };
    let out = newton::solve(&disc, u0, &controls(params))?;
    let u = out.u.clone();
    Ok((build_solution(dom, &disc, out), u))
}

/// Target value of the solution at an interior point of the cone.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub p0: Vec<f64>,
    pub a: f64,
    pub tol: f64,
}

/// Solution on `V ∩ B_R` with `det D²v = c`, `v = ½|x|²` on the lateral boundary and outer data
/// `½|x|² + s·R·dist(x, ∂V)`. Without a pin `s = 0`; with one, `s ≤ 0` is found by bracketing and
/// bisection so that `v(p₀) = a`.
pub fn solve_truncated_cone(
    cone: &TangentCone,
    radius: f64,
    c: f64,
    pin: Option<&Pin>,
    params: &SolverParams,
) -> Result<DiscreteSolution> {
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("c = {c} must be positive")));
    }
    let dom = ComputationalDomain::truncated_cone(cone, radius)?;
    let f = ScalarField::constant(c);
    let Some(pin) = pin else {
        return solve_dirichlet(&dom, &f, &ScalarField::half_norm_sq(), params);
    };
    if pin.p0.len() != dom.dim || dom.slack(&pin.p0) <= 0.0 {
        return Err(Error::PinInfeasible(format!(
            "p0 {:?} is not inside the truncated cone",
            pin.p0
        )));
    }
    if !(pin.a < 0.5) {
        return Err(Error::PinInfeasible(format!("a = {} must be below 1/2", pin.a)));
    }
    let normals: Vec<DVector<f64>> = cone.inward_normals.iter().map(|v| v.normalize()).collect();
    let data = |s: f64| {
        let normals = normals.clone();
        ScalarField::new(format!("0.5*|x|^2 + {s}*R*dist"), move |x| {
            let d = normals
                .iter()
                .map(|nu| nu.iter().zip(x).map(|(a, b)| a * b).sum::<f64>())
                .fold(f64::INFINITY, f64::min)
                .max(0.0);
            0.5 * x.iter().map(|v| v * v).sum::<f64>() + s * radius * d
        })
    };
    let mut warm: Option<Vec<f64>> = None;
    let mut eval = |s: f64| -> Result<(DiscreteSolution, f64)> {
        let (sol, u) = solve_with_start(&dom, &f, &data(s), params, warm.take())?;
        warm = Some(u);
        let v = sol.interpolate(&pin.p0)?;
        Ok((sol, v - pin.a))
    };
    let (mut hi_sol, mut g_hi) = eval(0.0)?;
    let mut s_hi = 0.0;
    if g_hi.abs() <= pin.tol {
        return Ok(hi_sol);
    }
    if g_hi < 0.0 {
        return Err(Error::PinInfeasible(format!(
            "v(p0) - a = {g_hi:.3e} < 0 already at s = 0"
        )));
    }
    let mut s_lo = -1.0;
    let (mut lo_sol, mut g_lo) = eval(s_lo)?;
    let mut doublings = 0;
    while g_lo > 0.0 {
        doublings += 1;
        if doublings > 12 {
            return Err(Error::PinInfeasible(format!("no sign change down to s = {s_lo}")));
        }
        s_hi = s_lo;
        hi_sol = lo_sol;
        g_hi = g_lo;
        s_lo *= 2.0;
        (lo_sol, g_lo) = eval(s_lo)?;
    }
    for _ in 0..60 {
        if g_lo.abs() <= pin.tol {
            return Ok(lo_sol);
        }
        if g_hi.abs() <= pin.tol {
            return Ok(hi_sol);
        }
        // Regula falsi step, kept away from the ends of the bracket.
        let t = (g_hi / (g_hi - g_lo)).clamp(0.1, 0.9);
        let s = s_hi + t * (s_lo - s_hi);
        let (sol, g) = eval(s)?;
        if g > 0.0 {
            s_hi = s;
            g_hi = g;
            hi_sol = sol;
        } else {
            s_lo = s;
            g_lo = g;
            lo_sol = sol;
        }
    }
    Err(Error::PinInfeasible(format!(
        "bisection stalled at v(p0) - a = {g_lo:.3e}"
    )))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    pub convexity_violations: usize,
    /// Observed order from the last three grids of a halving ladder.
    pub grid_convergence_rate: Option<f64>,
}

/// Largest nodal difference between two solutions at the nodes of the coarser one.
pub fn solution_difference(coarse: &DiscreteSolution, fine: &DiscreteSolution) -> Result<f64> {
    let ratio = coarse.h / fine.h;
    let r = ratio.round();
    if (ratio - r).abs() > 1e-9 || r < 1.0 {
        return Err(Error::InvalidParams(format!("grid ratio {ratio} is not an integer")));
    }
    let mut worst: f64 = 0.0;
    let mut shared = 0;
    for id in 0..coarse.len() {
        let k: Vec<i64> = coarse.lattice.multi_index(id).iter().map(|c| c * r as i64).collect();
        if let Some(j) = fine.lattice.node_at(&k) {
            worst = worst.max((coarse.values[id] - fine.values[j]).abs());
            shared += 1;
        }
    }
    if shared == 0 {
        return Err(Error::InvalidParams("grids share no nodes".into()));
    }
    Ok(worst)
}

/// Report for the finest solution of `ladder` (coarse to fine).
pub fn residual_report(ladder: &[DiscreteSolution]) -> Result<ResidualReport> {
    let last = ladder
        .last()
        .ok_or_else(|| Error::InvalidParams("empty ladder".into()))?;
    let rate = if ladder.len() >= 3 {
        let k = ladder.len();
        let e1 = solution_difference(&ladder[k - 3], &ladder[k - 2])?;
        let e2 = solution_difference(&ladder[k - 2], &ladder[k - 1])?;
        let ratio = ladder[k - 3].h / ladder[k - 2].h;
        (e1 > 0.0 && e2 > 0.0).then(|| (e1 / e2).ln() / ratio.ln())
    } else {
        None
    };
    Ok(ResidualReport {
        max_residual: last.residual,
        convexity_violations: last.convexity_violations,
        grid_convergence_rate: rate,
    })
}

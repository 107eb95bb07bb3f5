//! Convex sub-solution on a simple 3-polytope with prescribed vertex quadratics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::barrier::BarrierFunction;
use super::profiles::{cutoff_profile, prop52_bump};
use super::sample_points;
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::linalg;
use crate::normalize::{check_a_condition, theta_functionals, AConditionParams, SecondOrderJet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionParams {
    pub eps0: f64,
    pub c0: f64,
    /// Radius outside of which `C₀ℓ − P ≥ 2ε₀` is required.
    pub delta0: f64,
    pub lambda0: f64,
    /// The cutoff vanishes on `B_{r1}` of every vertex and equals 1 outside `B_{r2}`.
    pub cutoff_r1: f64,
    pub cutoff_r2: f64,
    pub samples_per_axis: usize,
}

impl Default for SubsolutionParams {
    fn default() -> Self {
        SubsolutionParams {
            eps0: 0.35,
            c0: 4.0,
            delta0: 0.4,
            lambda0: 5e-5,
            cutoff_r1: 0.04,
            cutoff_r2: 0.08,
            samples_per_axis: 17,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexTheta {
    pub vertex: Vec<f64>,
    pub theta_max: f64,
    pub strong: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionReport {
    pub vertices: Vec<VertexTheta>,
    pub min_hessian_eigenvalue: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct Subsolution {
    pub function: BarrierFunction,
    pub report: SubsolutionReport,
}

/// Normalized sum of the inward normals of the facets through vertex `v`.
pub fn vertex_direction(p: &Polytope, v: usize) -> DVector<f64> {
    let x = &p.vertices[v];
    let s: DVector<f64> = p
        .facets
        .iter()
        .filter(|f| f.slack(x).abs() <= p.tol.max(1e-9))
        .map(|f| f.normal.clone())
        .fold(DVector::zeros(p.dim), |a, b| a + b);
    s.normalize()
}

/// Vertex Hessians `Nᵀ(½I + ½J)N` (rows of `N` the inward normals). In the normalized frame
/// every pair of normals has cosine `−1/3`, so every angle is `arccos(1/3)`. On a box they
/// reduce to `H_kl = ½σ_kσ_l`, `H_kk = 1`.
pub fn acute_vertex_quadratics(p: &Polytope) -> Result<Vec<SecondOrderJet>> {
    if !p.is_simple() {
        return Err(Error::ACheckFailed("polytope is not simple".into()));
    }
    let n = p.dim;
    let g_inv = (DMatrix::identity(n, n) + DMatrix::from_element(n, n, 1.0)) * 0.5;
    p.vertices
        .iter()
        .map(|x| {
            let rows: Vec<DVector<f64>> = p
                .facets
                .iter()
                .filter(|f| f.slack(x).abs() <= p.tol.max(1e-9))
                .map(|f| f.normal.clone())
                .collect();
            let nm = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
            Ok(SecondOrderJet::from_hessian(x.clone(), nm.transpose() * &g_inv * nm))
        })
        .collect()
}

/// `û = Σ_p g(C₀ℓ_p − P_p) + λ₀ χ |x − c|²` with `χ` vanishing near every vertex.
pub fn simple_subsolution_3d(
    p: &Polytope,
    quadratics: &[SecondOrderJet],
    prm: &SubsolutionParams,
) -> Result<Subsolution> {
    if p.dim != 3 {
        return Err(Error::InvalidParams(format!("dimension {} is not 3", p.dim)));
    }
    if !p.is_simple() {
        return Err(Error::ACheckFailed("polytope is not simple".into()));
    }
    if quadratics.len() != p.vertices.len() {
        return Err(Error::InvalidParams("one quadratic per vertex required".into()));
    }
    for (v, q) in p.vertices.iter().zip(quadratics) {
        if (&q.base_point - v).amax() > 1e-9 {
            return Err(Error::InvalidParams(
                "quadratic base points must match the vertex order".into(),
            ));
        }
        if !check_a_condition(q, p, true, AConditionParams::default())? {
            return Err(Error::ACheckFailed(format!(
                "strong condition fails at vertex {:?}",
                v.as_slice()
            )));
        }
    }
    if !(prm.cutoff_r1 < prm.cutoff_r2 && prm.cutoff_r2 * prm.c0 <= prm.eps0) {
        return Err(Error::InvalidParams(
            "cutoff annulus must lie inside {C0 l - P < eps0}".into(),
        ));
    }
    let g = prop52_bump(prm.eps0)?;
    let mut args = Vec::with_capacity(p.vertices.len());
    for (i, q) in quadratics.iter().enumerate() {
        let nu = vertex_direction(p, i);
        let x0 = &p.vertices[i];
        args.push(BarrierFunction::Quadratic {
            q: -&q.hessian,
            b: nu * prm.c0,
            center: x0.clone(),
            constant: 0.0,
        });
    }
    let pts = sample_points(p, prm.samples_per_axis);
    for (i, arg) in args.iter().enumerate() {
        let x0 = &p.vertices[i];
        for x in &pts {
            let a = arg.value(x);
            if a < -1e-12 || ((x - x0).norm() >= prm.delta0 && a < 2.0 * prm.eps0) {
                return Err(Error::C0TooSmall(format!(
                    "C0 l - P = {a:.3e} at {:?} for vertex {:?}",
                    x.as_slice(),
                    x0.as_slice()
                )));
            }
        }
    }
    let mut terms: Vec<BarrierFunction> = args
        .into_iter()
        .map(|a| BarrierFunction::compose(g.clone(), a))
        .collect();
    let n = p.dim;
    let c = p.centroid();
    let bump = cutoff_profile(prm.cutoff_r1, prm.cutoff_r2)?;
    let chi = p
        .vertices
        .iter()
        .map(|v| {
            BarrierFunction::Sum(vec![
                BarrierFunction::constant(n, 1.0),
                BarrierFunction::Radial {
                    profile: bump.clone(),
                    a: DMatrix::identity(n, n),
                    center: v.clone(),
                }
                .scaled(-1.0),
            ])
        })
        .reduce(|a, b| a.times(b))
        .expect("polytope has vertices");
    terms.push(
        chi.times(BarrierFunction::quadratic(DMatrix::identity(n, n) * 2.0, c))
            .scaled(prm.lambda0),
    );
    let u = BarrierFunction::Sum(terms);

    let mut vertices = Vec::new();
    for x0 in &p.vertices {
        let j = u.jet(x0);
        let jet = SecondOrderJet {
            base_point: x0.clone(),
            value: j.value,
            gradient: j.gradient,
            hessian: j.hessian,
        };
        let rep = theta_functionals(&jet, p)?;
        vertices.push(VertexTheta {
            vertex: x0.iter().copied().collect(),
            theta_max: rep.theta_max,
            strong: rep.theta_max < std::f64::consts::FRAC_PI_2,
        });
    }
    let mut min_eig = f64::INFINITY;
    let mut worst = DVector::zeros(n);
    for x in pts.iter().chain(p.vertices.iter()) {
        let (vals, _) = linalg::sym_eigen(&u.jet(x).hessian);
        if vals[0] < min_eig {
            min_eig = vals[0];
            worst = x.clone();
        }
    }
    if min_eig <= 0.0 {
        return Err(Error::NotConvex(format!(
            "min Hessian eigenvalue {min_eig:.3e} at {:?}",
            worst.as_slice()
        )));
    }
    Ok(Subsolution {
        function: u,
        report: SubsolutionReport {
            vertices,
            min_hessian_eigenvalue: min_eig,
            samples: pts.len() + p.vertices.len(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_patterns_match_box_formula() {
        let p = Polytope::unit_cube(3);
        let qs = acute_vertex_quadratics(&p).unwrap();
        for (v, q) in p.vertices.iter().zip(&qs) {
            let s: Vec<f64> = v.iter().map(|c| if *c < 0.5 { 1.0 } else { -1.0 }).collect();
            for k in 0..3 {
                for l in 0..3 {
                    let want = if k == l { 1.0 } else { 0.5 * s[k] * s[l] };
                    assert!((q.hessian[(k, l)] - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn octahedron_is_rejected() {
        let p = Polytope::cross_polytope(3);
        assert!(matches!(acute_vertex_quadratics(&p), Err(Error::ACheckFailed(_))));
    }

    #[test]
    fn cube_subsolution_is_strong_at_every_vertex() {
        let p = Polytope::unit_cube(3);
        let qs = acute_vertex_quadratics(&p).unwrap();
        let s = simple_subsolution_3d(&p, &qs, &SubsolutionParams::default()).unwrap();
        assert_eq!(s.report.vertices.len(), 8);
        let want = (1.0f64 / 3.0).acos();
        for v in &s.report.vertices {
            assert!(v.strong);
            assert!((v.theta_max - want).abs() < 1e-9, "{v:?}");
        }
        assert!(s.report.min_hessian_eigenvalue > 0.0);
    }

    #[test]
    fn right_angle_quadratics_are_rejected() {
        let p = Polytope::unit_cube(3);
        let qs: Vec<SecondOrderJet> = p
            .vertices
            .iter()
            .map(|v| SecondOrderJet::from_hessian(v.clone(), DMatrix::identity(3, 3)))
            .collect();
        let r = simple_subsolution_3d(&p, &qs, &SubsolutionParams::default());
        assert!(matches!(r, Err(Error::ACheckFailed(_))));
    }

    #[test]
    fn small_c0_is_reported() {
        let p = Polytope::unit_cube(3);
        let qs = acute_vertex_quadratics(&p).unwrap();
        let prm = SubsolutionParams {
            c0: 1.0,
            cutoff_r2: 0.06,
            ..SubsolutionParams::default()
        };
        let r = simple_subsolution_3d(&p, &qs, &prm);
        assert!(matches!(r, Err(Error::C0TooSmall(_))), "{r:?}");
    }
}

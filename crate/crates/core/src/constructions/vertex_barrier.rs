//! Vertex barrier for the small-right-hand-side regime in dimensions 2 and 3.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::barrier::BarrierFunction;
use super::profiles::{cutoff_profile, prop52_bump, thm63_h_profile};
use super::subsolution::vertex_direction;
use super::{boundary_points, sample_points};
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Polytope;
use crate::linalg;
use crate::normalize::SecondOrderJet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexBarrierParams {
    pub delta: f64,
    /// `ε₀ = eps0_factor · δ³`.
    pub eps0_factor: f64,
    /// Vertex barrier slope; chosen from the geometry when absent.
    pub c0: Option<f64>,
    /// Smallness parameter `ω(δ)`; `κ = 2ω`. Defaults to the smallest value that keeps
    /// `P_{0,κ} + δ⁶|x − p₀|²` below the boundary data.
    pub omega: Option<f64>,
    /// Multiply the `δ⁶|x − p₀|²` term by a cutoff vanishing on `B_{δ⁶/2}(p₀)`.
    pub cutoff: bool,
    pub samples_per_axis: usize,
    pub boundary_per_edge: usize,
}

impl Default for VertexBarrierParams {
    fn default() -> Self {
        VertexBarrierParams {
            delta: 0.7,
            eps0_factor: 0.1,
            c0: None,
            omega: None,
            cutoff: false,
            samples_per_axis: 41,
            boundary_per_edge: 200,
        }
    }
}

/// Which vertex plays `p₀`, optionally with the boundary data's jet there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexData {
    pub index: usize,
    pub jet: Option<SecondOrderJet>,
}

impl VertexData {
    pub fn vertex(index: usize) -> Self {
        VertexData { index, jet: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexBarrierReport {
    pub n: usize,
    pub delta: f64,
    pub kappa: f64,
    pub eps0: f64,
    pub c0: f64,
    pub f_sup: f64,
    /// Hessian of `P_{0,κ}`.
    pub p0_kappa: Vec<Vec<f64>>,
    pub boundary_samples: usize,
    pub interior_samples: usize,
    /// `min (φ − u₀)` over boundary samples.
    pub min_boundary_gap: f64,
    pub worst_boundary_point: Vec<f64>,
    /// `min (det D²u₀ − f)` over interior samples.
    pub min_det_margin: f64,
    pub worst_interior_point: Vec<f64>,
    pub boundary_ok: bool,
    pub determinant_ok: bool,
}

#[derive(Debug, Clone)]
pub struct VertexBarrier {
    pub function: BarrierFunction,
    pub p0: DVector<f64>,
    pub kappa: f64,
    pub eps0: f64,
    pub c0: f64,
    pub f_sup: f64,
    pub q: DMatrix<f64>,
}

fn fd_jet(phi: &ScalarField, x: &DVector<f64>) -> SecondOrderJet {
    let h = 1e-4;
    SecondOrderJet {
        base_point: x.clone(),
        value: phi.at(x),
        gradient: phi.gradient_fd(x, h),
        hessian: phi.hessian_fd(x, h),
    }
}

/// Edge directions leaving vertex `v`.
fn edge_directions(p: &Polytope, v: usize) -> Vec<DVector<f64>> {
    p.faces[1]
        .iter()
        .filter(|f| f.vertex_ids.contains(&v))
        .map(|f| {
            let w = if f.vertex_ids[0] == v {
                f.vertex_ids[1]
            } else {
                f.vertex_ids[0]
            };
            (&p.vertices[w] - &p.vertices[v]).normalize()
        })
        .collect()
}

fn is_pd(m: &DMatrix<f64>) -> bool {
    linalg::sym_eigen(m).0[0] > 0.0
}

/// Hessian of `P_{0,κ}` and the value of `κ`.
fn p0_kappa(
    p: &Polytope,
    v: usize,
    hphi: &DMatrix<f64>,
    f0: f64,
    prm: &VertexBarrierParams,
) -> Result<(DMatrix<f64>, f64)> {
    let n = p.dim;
    let d6 = prm.delta.powi(6);
    let x0: Vec<f64> = p.vertices[v].iter().copied().collect();
    if n == 2 {
        let e = edge_directions(p, v);
        if e.len() != 2 {
            return Err(Error::DegenerateInput("planar vertex without two edges".into()));
        }
        let scales: Vec<f64> = e.iter().map(|d| d.dot(&(hphi * d))).collect();
        if scales.iter().any(|s| *s <= 0.0) {
            return Err(Error::NonConvexData("boundary data not convex along an edge".into()));
        }
        // Edge frame in which φ restricted to each edge has unit second derivative.
        let m = DMatrix::from_fn(2, 2, |i, j| e[j][i] / scales[j].sqrt());
        let det_m = m.determinant();
        let s2 = 1.0 - f0 * det_m * det_m;
        if s2 <= 0.0 {
            return Err(Error::DeterminantDominationFailed(x0));
        }
        let s = s2.sqrt();
        let sigma = linalg::sym_eigen(&(m.transpose() * &m)).0[1];
        let omega = prm.omega.unwrap_or(d6 * sigma);
        let kappa = 2.0 * omega;
        let off = s - 4.0 * kappa / s;
        let qy = DMatrix::from_row_slice(2, 2, &[1.0 - 2.0 * kappa, off, off, 1.0 - 2.0 * kappa]);
        if !is_pd(&qy) {
            return Err(Error::DeterminantDominationFailed(x0));
        }
        let mi = m
            .try_inverse()
            .ok_or_else(|| Error::DegenerateInput("parallel edges".into()))?;
        Ok((mi.transpose() * qy * mi, kappa))
    } else {
        // Three face restrictions fix every entry of the vertex quadratic; only a uniform shift is free.
        let omega = prm.omega.unwrap_or(d6);
        let kappa = 2.0 * omega;
        let q = hphi - DMatrix::identity(n, n) * (2.0 * kappa);
        if !is_pd(&q) {
            return Err(Error::DeterminantDominationFailed(x0));
        }
        Ok((q, kappa))
    }
}

/// `u₀ = L + h(|A(x − p₀)|) + Σ_{i≠0} gᵢ + δ⁶ χ |x − p₀|²` with `L` the tangent plane of `φ` at `p₀`.
pub fn build_vertex_barrier(
    p: &Polytope,
    vd: &VertexData,
    f: &ScalarField,
    phi: &ScalarField,
    prm: &VertexBarrierParams,
) -> Result<VertexBarrier> {
    let n = p.dim;
    if !(n == 2 || n == 3) {
        return Err(Error::InvalidParams(format!("dimension {n} not in {{2, 3}}")));
    }
    if vd.index >= p.vertices.len() {
        return Err(Error::InvalidParams(format!("vertex index {} out of range", vd.index)));
    }
    if !(prm.delta > 0.0 && prm.delta < 1.0) {
        return Err(Error::HypothesisViolated(format!(
            "delta = {} must be in (0, 1)",
            prm.delta
        )));
    }
    let p0 = p.vertices[vd.index].clone();
    let jet = vd.jet.clone().unwrap_or_else(|| fd_jet(phi, &p0));
    let pts = sample_points(p, prm.samples_per_axis);
    let f_sup = pts
        .iter()
        .chain(p.vertices.iter())
        .map(|x| f.at(x))
        .fold(f.sup.unwrap_or(0.0), f64::max);
    if !(f_sup > 0.0) {
        return Err(Error::HypothesisViolated("f must be positive".into()));
    }
    let (q, kappa) = p0_kappa(p, vd.index, &jet.hessian, f.at(&p0), prm)?;
    let a = linalg::spd_power(&q, 0.5);
    let d3 = prm.delta.powi(3);
    let d6 = d3 * d3;
    let eps0 = prm.eps0_factor * d3;
    let root = f_sup.powf(1.0 / n as f64);

    let mut terms = vec![
        BarrierFunction::affine(jet.gradient.clone(), p0.clone(), jet.value),
        BarrierFunction::Radial {
            profile: thm63_h_profile(prm.delta)?,
            a,
            center: p0.clone(),
        },
    ];
    let g = prop52_bump(eps0)?;
    let others: Vec<usize> = (0..p.vertices.len()).filter(|&i| i != vd.index).collect();
    let c0 = match prm.c0 {
        Some(c) => c,
        None => auto_c0(p, &others, &pts, root, eps0),
    };
    for &i in &others {
        let nu = vertex_direction(p, i);
        let arg = BarrierFunction::Quadratic {
            q: DMatrix::identity(n, n) * (-4.0 * root),
            b: nu * c0,
            center: p.vertices[i].clone(),
            constant: 0.0,
        };
        terms.push(BarrierFunction::compose(g.clone(), arg));
        terms.push(BarrierFunction::constant(n, 1.25 * eps0));
    }
    let quad = BarrierFunction::quadratic(DMatrix::identity(n, n) * (2.0 * d6), p0.clone());
    if prm.cutoff {
        let chi = BarrierFunction::Sum(vec![
            BarrierFunction::constant(n, 1.0),
            BarrierFunction::Radial {
                profile: cutoff_profile(0.5 * d6, d6)?,
                a: DMatrix::identity(n, n),
                center: p0.clone(),
            }
            .scaled(-1.0),
        ]);
        terms.push(chi.times(quad));
    } else {
        terms.push(quad);
    }
    Ok(VertexBarrier {
        function: BarrierFunction::Sum(terms),
        p0,
        kappa,
        eps0,
        c0,
        f_sup,
        q,
    })
}

/// Smallest slope with `C₀ν·(x−pᵢ) − 2F^{1/n}|x−pᵢ|² ≥ 0` on the samples and `≥ 2ε₀` beyond
/// half the distance to the nearest other vertex, padded by 5%.
fn auto_c0(p: &Polytope, others: &[usize], pts: &[DVector<f64>], root: f64, eps0: f64) -> f64 {
    let mut c0: f64 = 0.0;
    for &i in others {
        let pi = &p.vertices[i];
        let nu = vertex_direction(p, i);
        let r_loc = p
            .vertices
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, v)| (v - pi).norm())
            .fold(f64::INFINITY, f64::min)
            / 2.0;
        for x in pts.iter().chain(p.vertices.iter()) {
            let d = x - pi;
            let r = d.norm();
            let l = nu.dot(&d);
            if r < 1e-12 || l <= 1e-12 {
                continue;
            }
            let need = if r >= r_loc { 2.0 * eps0 } else { 0.0 } + 2.0 * root * r * r;
            c0 = c0.max(need / l);
        }
    }
    1.05 * c0
}

impl VertexBarrier {
    pub fn verify(
        &self,
        p: &Polytope,
        f: &ScalarField,
        phi: &ScalarField,
        prm: &VertexBarrierParams,
    ) -> VertexBarrierReport {
        let bpts = boundary_points(p, prm.boundary_per_edge);
        let mut min_gap = f64::INFINITY;
        let mut worst_b = self.p0.clone();
        for x in &bpts {
            let gap = phi.at(x) - self.function.value(x);
            if gap < min_gap {
                min_gap = gap;
                worst_b = x.clone();
            }
        }
        let ipts: Vec<DVector<f64>> = sample_points(p, prm.samples_per_axis)
            .into_iter()
            .filter(|x| p.facets.iter().all(|fc| fc.slack(x) > 1e-9))
            .collect();
        let mut min_margin = f64::INFINITY;
        let mut worst_i = self.p0.clone();
        for x in &ipts {
            let m = self.function.jet(x).hessian.determinant() - f.at(x);
            if m < min_margin {
                min_margin = m;
                worst_i = x.clone();
            }
        }
        let scale = 1.0 + self.function.value(&self.p0).abs();
        VertexBarrierReport {
            n: p.dim,
            delta: prm.delta,
            kappa: self.kappa,
            eps0: self.eps0,
            c0: self.c0,
            f_sup: self.f_sup,
            p0_kappa: linalg::mat_rows(&self.q),
            boundary_samples: bpts.len(),
            interior_samples: ipts.len(),
            min_boundary_gap: min_gap,
            worst_boundary_point: worst_b.iter().copied().collect(),
            min_det_margin: min_margin,
            worst_interior_point: worst_i.iter().copied().collect(),
            boundary_ok: min_gap >= -1e-10 * scale,
            determinant_ok: min_margin >= 0.0,
        }
    }
}

/// Builds the barrier and checks both comparison inequalities on samples.
pub fn thm63_barrier(
    p: &Polytope,
    vd: &VertexData,
    f: &ScalarField,
    phi: &ScalarField,
    prm: &VertexBarrierParams,
) -> Result<(VertexBarrier, VertexBarrierReport)> {
    let b = build_vertex_barrier(p, vd, f, phi, prm)?;
    let rep = b.verify(p, f, phi, prm);
    if !rep.boundary_ok {
        return Err(Error::BoundaryDominationFailed(rep.worst_boundary_point));
    }
    if !rep.determinant_ok {
        return Err(Error::DeterminantDominationFailed(rep.worst_interior_point));
    }
    Ok((b, rep))
}

//! Explicit barrier functions, convex profiles and the Lipschitz counterexample data.

mod barrier;
mod piecewise;
mod profiles;
mod subsolution;
mod vertex_barrier;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

pub use barrier::{BarrierFunction, FdReport, Jet};
pub use piecewise::{Continuity, Piecewise1D};
pub use profiles::{
    base_profile_g, base_profile_g_tilde, counterexample_rhs, cutoff_profile, mu_k, prop52_bump, thm63_h_profile,
    CounterexampleRhs, BUMP_Q,
};
pub use subsolution::{
    acute_vertex_quadratics, simple_subsolution_3d, vertex_direction, Subsolution, SubsolutionParams,
    SubsolutionReport, VertexTheta,
};
pub use vertex_barrier::{
    build_vertex_barrier, thm63_barrier, VertexBarrier, VertexBarrierParams, VertexBarrierReport, VertexData,
};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Polytope;
use crate::normalize::{a_mu_map, AffineMap};

/// Tensor grid over the bounding box, restricted to the closed polytope.
pub fn sample_points(p: &Polytope, per_axis: usize) -> Vec<DVector<f64>> {
    let n = p.dim;
    let m = per_axis.max(2);
    let lo: Vec<f64> = (0..n)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi: Vec<f64> = (0..n)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let total = m.pow(n as u32);
    (0..total)
        .filter_map(|mut idx| {
            let x = DVector::from_fn(n, |i, _| {
                let k = idx % m;
                idx /= m;
                lo[i] + (hi[i] - lo[i]) * k as f64 / (m - 1) as f64
            });
            p.contains(&x).then_some(x)
        })
        .collect()
}

/// Points on every edge and, in 3-D, on fan triangles of every facet.
pub fn boundary_points(p: &Polytope, per_edge: usize) -> Vec<DVector<f64>> {
    let m = per_edge.max(2);
    let edges: Vec<(usize, usize)> = p.faces[1]
        .iter()
        .filter(|f| f.vertex_ids.len() == 2)
        .map(|f| (f.vertex_ids[0], f.vertex_ids[1]))
        .collect();
    let mut out = Vec::new();
    for &(a, b) in &edges {
        for k in 0..m {
            let t = k as f64 / (m - 1) as f64;
            out.push(&p.vertices[a] * (1.0 - t) + &p.vertices[b] * t);
        }
    }
    if p.dim == 3 {
        let tri = (m / 4).max(2);
        for f in &p.facets {
            let c = f
                .vertex_ids
                .iter()
                .fold(DVector::zeros(3), |acc, &i| acc + &p.vertices[i])
                / f.vertex_ids.len() as f64;
            for &(a, b) in edges
                .iter()
                .filter(|(a, b)| f.vertex_ids.contains(a) && f.vertex_ids.contains(b))
            {
                for i in 0..=tri {
                    for j in 0..=(tri - i) {
                        let (s, t) = (i as f64 / tri as f64, j as f64 / tri as f64);
                        out.push(&c * (1.0 - s - t) + &p.vertices[a] * s + &p.vertices[b] * t);
                    }
                }
            }
        }
    }
    out
}

/// Domain, boundary data and the two right-hand sides of the Lipschitz counterexample.
#[derive(Debug, Clone)]
pub struct CounterexampleBundle {
    pub polytope: Polytope,
    pub phi: ScalarField,
    /// Built from `G`; solutions fail to be `C^{2,α}` at the origin edge.
    pub f: ScalarField,
    /// Built from `G̃ ≥ G`.
    pub f_tilde: ScalarField,
    pub rhs: CounterexampleRhs,
    pub lambda0: f64,
}

/// Vertices of `{x₁, x₂ > 0, 10 > x₃ > 2(x₁ + x₂)}`.
pub fn counterexample_domain() -> Polytope {
    let v = [[0.0, 0.0, 0.0], [5.0, 0.0, 10.0], [0.0, 5.0, 10.0], [0.0, 0.0, 10.0]];
    let pts: Vec<DVector<f64>> = v.iter().map(|r| DVector::from_column_slice(r)).collect();
    Polytope::from_vertices(&pts, 1e-9).expect("tetrahedron")
}

/// `φ = ½|x|² + λ₀ χ x₁x₂` with `χ` supported near `(0, 0, 10)`, and `F`, `F̃` equal to
/// `G(x₃)`, `G̃(x₃) + (x₁ + x₂)/10` near the origin, raised to `det D²φ` at the far vertices.
pub fn counterexample_bundle(k_max: u32, lambda0: f64) -> Result<CounterexampleBundle> {
    if !(0.0..0.5).contains(&lambda0) {
        return Err(Error::InvalidParams(format!("lambda0 = {lambda0} must be in [0, 0.5)")));
    }
    let polytope = counterexample_domain();
    let rhs = counterexample_rhs(k_max)?;
    let top = DVector::from_vec(vec![0.0, 0.0, 10.0]);
    let chi = BarrierFunction::Radial {
        profile: cutoff_profile(0.5, 1.0)?,
        a: DMatrix::identity(3, 3),
        center: top.clone(),
    };
    let mut x1x2 = DMatrix::zeros(3, 3);
    x1x2[(0, 1)] = 1.0;
    x1x2[(1, 0)] = 1.0;
    let phi_fn = BarrierFunction::Sum(vec![
        BarrierFunction::quadratic(DMatrix::identity(3, 3), DVector::zeros(3)),
        chi.times(BarrierFunction::quadratic(x1x2, DVector::zeros(3)))
            .scaled(lambda0),
    ]);
    let phi = phi_fn.to_field("counterexample_phi");
    let far: Vec<(DVector<f64>, f64)> = polytope
        .vertices
        .iter()
        .filter(|v| v[2] > 5.0)
        .map(|v| (v.clone(), phi_fn.jet(v).hessian.determinant()))
        .collect();
    let vertex_floor = move |x: &[f64]| {
        far.iter()
            .map(|(v, d)| {
                let r = ((x[0] - v[0]).powi(2) + (x[1] - v[1]).powi(2) + (x[2] - v[2]).powi(2)).sqrt();
                d * (1.0 - r).max(0.0)
            })
            .fold(0.0, f64::max)
    };
    let floor2 = vertex_floor.clone();
    let g = rhs.g.clone();
    let gt = rhs.g_tilde.clone();
    let f = ScalarField::new("counterexample_F", move |x| {
        g.eval(x[2].clamp(0.0, 0.5)).max(vertex_floor(x))
    })
    .with_bounds(0.5, 1.0)
    .with_beta(1.0);
    let f_tilde = ScalarField::new("counterexample_F_tilde", move |x| {
        (gt.eval(x[2].clamp(0.0, 0.5)) + (x[0] + x[1]) / 10.0).max(floor2(x))
    })
    .with_beta(1.0);
    Ok(CounterexampleBundle {
        polytope,
        phi,
        f,
        f_tilde,
        rhs,
        lambda0,
    })
}

/// Window map `x ↦ (0, 0, 3/2^{k+2}) + A_{μ_k} x / 2^{k+4}` taking `V_{μ_k} × ℝ` into the
/// edge-normalized domain, and the amplitude factor `2^{2k+8}` of the rescaled windows.
pub fn counterexample_window(k: u32) -> Result<(AffineMap, f64)> {
    let a = a_mu_map(mu_k(k), 3)?;
    let s = 0.5f64.powi(k as i32 + 4);
    let shift = DVector::from_vec(vec![0.0, 0.0, 3.0 * 0.5f64.powi(k as i32 + 2)]);
    Ok((AffineMap::new(a.linear * s, shift)?, 2f64.powi(2 * k as i32 + 8)))
}

/// Serializable summary of a bundle, shipped with presets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleSummary {
    pub k_max: u32,
    pub lambda0: f64,
    pub vertices: Vec<Vec<f64>>,
    pub anchors: Vec<(u32, f64, f64)>,
    pub mu_k: Vec<f64>,
}

impl CounterexampleBundle {
    pub fn summary(&self) -> BundleSummary {
        BundleSummary {
            k_max: self.rhs.k_max,
            lambda0: self.lambda0,
            vertices: self
                .polytope
                .vertices
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect(),
            anchors: self.rhs.anchors(),
            mu_k: (1..=self.rhs.k_max).map(mu_k).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundle_shape() {
        let b = counterexample_bundle(8, 0.05).unwrap();
        assert_eq!(b.polytope.vertices.len(), 4);
        let o = [0.0, 0.0, 0.0];
        assert_eq!(b.f.eval(&o), 1.0);
        assert_eq!(b.f_tilde.eval(&o), 1.0);
        for (_, t, v) in b.rhs.anchors() {
            assert_eq!(b.f.eval(&[0.0, 0.0, t]), v);
        }
        let top = [0.0, 0.0, 10.0];
        assert!((b.f.eval(&top) - (1.0 - 0.05f64 * 0.05)).abs() < 1e-12);
        assert!((b.phi.eval(&[1.0, 2.0, 3.0]) - 7.0).abs() < 1e-12);
    }

    #[test]
    fn window_maps_sector_to_quadrant() {
        let (m, amp) = counterexample_window(3).unwrap();
        assert_eq!(amp, 2f64.powi(14));
        let a = std::f64::consts::PI * mu_k(3);
        // A ray on the far side of V_μ lands on the x₂ axis of the edge frame.
        let x = DVector::from_vec(vec![a.cos(), a.sin(), 0.0]);
        let y = m.apply(&x);
        assert!(y[0].abs() < 1e-14);
        assert!(y[1] > 0.0);
    }

    #[test]
    fn grid_samples_are_inside() {
        let p = Polytope::standard_simplex(2);
        let pts = sample_points(&p, 11);
        assert_eq!(pts.len(), 66);
        assert!(pts.iter().all(|x| p.contains(x)));
        let b = boundary_points(&Polytope::unit_cube(3), 8);
        assert!(b
            .iter()
            .all(|x| x.iter().any(|c| c.abs() < 1e-12 || (c - 1.0).abs() < 1e-12)));
    }
}

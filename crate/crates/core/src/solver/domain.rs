use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Polytope, TangentCone};
use crate::normalize::AffineMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DomainKind {
    Polygon2d,
    Box3d,
    Wedge3d,
    TruncatedCone,
}

/// Curved part of the boundary, centred at the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Round {
    /// `|x| ≤ R`.
    Ball(f64),
    /// `x₁² + x₂² ≤ R²`.
    Cylinder(f64),
}

/// Which piece of the boundary a boundary point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryPiece {
    Facet(usize),
    Round,
}

/// Convex region `{ν_i·x ≥ b_i} ∩ round`, optionally pulled back through an affine map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComputationalDomain {
    pub kind: DomainKind,
    pub dim: usize,
    /// Unit inward normals and offsets.
    pub halfspaces: Vec<(DVector<f64>, f64)>,
    pub round: Option<Round>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    /// Grid coordinates `y` relate to physical ones by `x = S y`.
    pub affine_precompose: Option<AffineMap>,
    pub description: String,
}

fn bbox(p: &Polytope) -> (Vec<f64>, Vec<f64>) {
    let lo = (0..p.dim)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min))
        .collect();
    let hi = (0..p.dim)
        .map(|i| p.vertices.iter().map(|v| v[i]).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    (lo, hi)
}

impl ComputationalDomain {
    pub fn from_polytope(p: &Polytope) -> Result<Self> {
        let kind = match p.dim {
            2 => DomainKind::Polygon2d,
            3 => DomainKind::Box3d,
            d => return Err(Error::InvalidParams(format!("cannot solve in dimension {d}"))),
        };
        let (lo, hi) = bbox(p);
        Ok(ComputationalDomain {
            kind,
            dim: p.dim,
            halfspaces: p.halfspaces(),
            round: None,
            lo,
            hi,
            affine_precompose: None,
            description: format!("polytope with {} vertices", p.vertices.len()),
        })
    }

    /// `(V_μ ∩ {x₁² + x₂² ≤ R²}) × [−L, L]`.
    pub fn wedge(mu: f64, radius: f64, half_length: f64) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::MuOutOfRange(mu));
        }
        if !(radius > 0.0 && half_length > 0.0) {
            return Err(Error::InvalidParams("wedge radius and length must be positive".into()));
        }
        let a = mu * PI;
        let hs = vec![
            (DVector::from_vec(vec![0.0, 1.0, 0.0]), 0.0),
            (DVector::from_vec(vec![a.sin(), -a.cos(), 0.0]), 0.0),
            (DVector::from_vec(vec![0.0, 0.0, 1.0]), -half_length),
            (DVector::from_vec(vec![0.0, 0.0, -1.0]), -half_length),
        ];
        let x2max = if mu >= 0.5 { radius } else { radius * a.sin() };
        Ok(ComputationalDomain {
            kind: DomainKind::Wedge3d,
            dim: 3,
            halfspaces: hs,
            round: Some(Round::Cylinder(radius)),
            lo: vec![(radius * a.cos()).min(0.0), 0.0, -half_length],
            hi: vec![radius, x2max, half_length],
            affine_precompose: None,
            description: format!("wedge mu={mu} R={radius} L={half_length}"),
        })
    }

    /// `V ∩ B_R` for a cone with apex at the origin.
    pub fn truncated_cone(cone: &TangentCone, radius: f64) -> Result<Self> {
        if cone.apex.amax() > 1e-12 {
            return Err(Error::InvalidParams("cone apex must be the origin".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidParams("radius must be positive".into()));
        }
        let n = cone.dim();
        let hs = cone.inward_normals.iter().map(|v| (v.normalize(), 0.0)).collect();
        // Tighten the box on coordinates the cone keeps non-negative.
        let lo = (0..n)
            .map(|i| {
                let e = crate::linalg::unit(n, i);
                if cone.inward_normals.iter().any(|v| (v.normalize() - &e).norm() < 1e-12) {
                    0.0
                } else {
                    -radius
                }
            })
            .collect();
        Ok(ComputationalDomain {
            kind: DomainKind::TruncatedCone,
            dim: n,
            halfspaces: hs,
            round: Some(Round::Ball(radius)),
            lo,
            hi: vec![radius; n],
            affine_precompose: None,
            description: format!("cone with {} facets, R={radius}", cone.inward_normals.len()),
        })
    }

    /// Pulls the domain back through `x = S y`, so the grid lives on `S⁻¹(Ω)`.
    pub fn with_affine_precompose(mut self, s: AffineMap) -> Result<Self> {
        if self.round.is_some() {
            return Err(Error::InvalidParams(
                "affine precomposition needs a polyhedral domain".into(),
            ));
        }
        let l = &s.linear;
        let inv = s.inverse();
        // ν·(S y) ≥ b  ⇔  (Sᵀν)·y ≥ b − ν·shift
        self.halfspaces = self
            .halfspaces
            .iter()
            .map(|(nu, b)| {
                let m = l.transpose() * nu;
                let k = m.norm();
                (m / k, (b - nu.dot(&s.shift)) / k)
            })
            .collect();
        let corners = (0..(1usize << self.dim)).map(|mask| {
            DVector::from_fn(
                self.dim,
                |i, _| if mask >> i & 1 == 1 { self.hi[i] } else { self.lo[i] },
            )
        });
        let ys: Vec<DVector<f64>> = corners.map(|c| inv.apply(&c)).collect();
        self.lo = (0..self.dim)
            .map(|i| ys.iter().map(|y| y[i]).fold(f64::INFINITY, f64::min))
            .collect();
        self.hi = (0..self.dim)
            .map(|i| ys.iter().map(|y| y[i]).fold(f64::NEG_INFINITY, f64::max))
            .collect();
        self.affine_precompose = Some(s);
        Ok(self)
    }

    /// Smallest constraint slack; positive inside.
    pub fn slack(&self, y: &[f64]) -> f64 {
        let mut s = f64::INFINITY;
        for (nu, b) in &self.halfspaces {
            let v: f64 = nu.iter().zip(y).map(|(a, c)| a * c).sum::<f64>() - b;
            s = s.min(v);
        }
        match self.round {
            Some(Round::Ball(r)) => s = s.min(r - y.iter().map(|c| c * c).sum::<f64>().sqrt()),
            Some(Round::Cylinder(r)) => s = s.min(r - (y[0] * y[0] + y[1] * y[1]).sqrt()),
            None => {}
        }
        s
    }

    /// Distance from an interior point along a unit direction to the boundary, and the piece hit.
    pub fn exit(&self, y: &[f64], e: &[f64]) -> (f64, BoundaryPiece) {
        let mut best = (f64::INFINITY, BoundaryPiece::Round);
        for (k, (nu, b)) in self.halfspaces.iter().enumerate() {
            let rate: f64 = nu.iter().zip(e).map(|(a, c)| a * c).sum();
            if rate < 0.0 {
                let sl: f64 = nu.iter().zip(y).map(|(a, c)| a * c).sum::<f64>() - b;
                let t = (sl / -rate).max(0.0);
                if t < best.0 {
                    best = (t, BoundaryPiece::Facet(k));
                }
            }
        }
        let quad = |m: usize, r: f64| {
            let a: f64 = e[..m].iter().map(|c| c * c).sum();
            if a == 0.0 {
                return f64::INFINITY;
            }
            let b: f64 = e[..m].iter().zip(&y[..m]).map(|(c, d)| c * d).sum();
            let c: f64 = y[..m].iter().map(|d| d * d).sum::<f64>() - r * r;
            let disc = (b * b - a * c).max(0.0);
            ((-b + disc.sqrt()) / a).max(0.0)
        };
        let t = match self.round {
            Some(Round::Ball(r)) => quad(self.dim, r),
            Some(Round::Cylinder(r)) => quad(2, r),
            None => f64::INFINITY,
        };
        if t < best.0 {
            best = (t, BoundaryPiece::Round);
        }
        best
    }

    /// Physical coordinates of a grid point.
    pub fn physical(&self, y: &[f64]) -> Vec<f64> {
        match &self.affine_precompose {
            Some(s) => s.apply(&DVector::from_column_slice(y)).iter().copied().collect(),
            None => y.to_vec(),
        }
    }

    /// `(det S)²`, the factor multiplying `f` in grid coordinates.
    pub fn rhs_factor(&self) -> f64 {
        self.affine_precompose.as_ref().map_or(1.0, |s| s.determinant().powi(2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_exit_distances() {
        let d = ComputationalDomain::from_polytope(&Polytope::unit_cube(2)).unwrap();
        let (t, _) = d.exit(&[0.25, 0.5], &[-1.0, 0.0]);
        assert!((t - 0.25).abs() < 1e-15);
        let s = 0.5f64.sqrt();
        let (t, _) = d.exit(&[0.75, 0.5], &[s, s]);
        assert!((t - 0.25 / s).abs() < 1e-15);
        assert!((d.slack(&[0.1, 0.3]) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn cone_ball_exit() {
        let c = TangentCone::orthant(2, 2).unwrap();
        let d = ComputationalDomain::truncated_cone(&c, 2.0).unwrap();
        assert_eq!(d.lo, vec![0.0, 0.0]);
        let (t, piece) = d.exit(&[1.0, 1.0], &[1.0, 0.0]);
        assert_eq!(piece, BoundaryPiece::Round);
        assert!((t - (3f64.sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn wedge_contains_bisector() {
        let d = ComputationalDomain::wedge(0.4, 1.0, 1.0).unwrap();
        let a = 0.2 * PI;
        assert!(d.slack(&[0.5 * a.cos(), 0.5 * a.sin(), 0.0]) > 0.0);
        assert!(d.slack(&[0.5, -0.01, 0.0]) < 0.0);
        let b = 0.5 * PI;
        assert!(d.slack(&[0.1 * b.cos(), 0.1 * b.sin(), 0.0]) < 0.0);
    }
}

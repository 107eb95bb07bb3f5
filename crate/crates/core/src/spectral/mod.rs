//! First Dirichlet eigenvalue of the spherical Laplacian on cone cross-sections and the
//! associated homogeneity exponent.

mod fem;
mod mesh;

use std::f64::consts::PI;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::TangentCone;
pub use mesh::{coarse_mesh, mesh_for_size, SphereMesh};

/// Eigenvalue estimate on one mesh level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelInfo {
    pub level: usize,
    pub mesh_size: f64,
    pub dofs: usize,
    pub lambda1: f64,
    pub lambda2: Option<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub nodes: Vec<[f64; 3]>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    pub n: usize,
    pub lambda1: f64,
    pub exponent_mu: f64,
    pub mesh_size: f64,
    pub estimated_error: f64,
    /// Extrapolated second eigenvalue when requested.
    pub lambda2: Option<f64>,
    pub levels: Vec<LevelInfo>,
    #[serde(skip)]
    pub eigenfunction: Option<Eigenfunction>,
}

/// Positive root of `μ(μ + n − 2) = λ`.
pub fn exponent_from_lambda(lambda1: f64, n: usize) -> f64 {
    let a = n as f64 - 2.0;
    (-a + (a * a + 4.0 * lambda1).sqrt()) / 2.0
}

/// Closed form on an arc of the given opening: `λ₁ = (π/opening)²`.
pub fn lambda1_arc(opening: f64) -> Result<EigenResult> {
    if !(opening > 0.0 && opening < 2.0 * PI) {
        return Err(Error::OpeningOutOfRange(opening));
    }
    let mu = PI / opening;
    Ok(EigenResult {
        n: 2,
        lambda1: mu * mu,
        exponent_mu: mu,
        mesh_size: 0.0,
        estimated_error: 0.0,
        lambda2: Some(4.0 * mu * mu),
        levels: Vec::new(),
        eigenfunction: None,
    })
}

/// Cross-section `V ∩ 𝕊^{n−1}` of a convex cone.
#[derive(Debug, Clone)]
pub enum SphericalDomain {
    Arc { opening: f64 },
    Polygon { cone: TangentCone },
}

impl SphericalDomain {
    pub fn from_cone(cone: &TangentCone) -> Result<Self> {
        match cone.dim() {
            2 => {
                let opening = match cone.inward_normals.len() {
                    1 => PI,
                    2 => {
                        let c = cone.inward_normals[0].dot(&cone.inward_normals[1]).clamp(-1.0, 1.0);
                        PI - c.acos()
                    }
                    _ => return Err(Error::MeshFailure("planar cone with more than two facets".into())),
                };
                Ok(SphericalDomain::Arc { opening })
            }
            3 => Ok(SphericalDomain::Polygon { cone: cone.clone() }),
            d => Err(Error::MeshFailure(format!("unsupported cone dimension {d}"))),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            SphericalDomain::Arc { .. } => 2,
            SphericalDomain::Polygon { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenParams {
    pub max_iter: usize,
    pub tol: f64,
    pub max_level: usize,
    pub want_lambda2: bool,
}

impl Default for EigenParams {
    fn default() -> Self {
        EigenParams {
            max_iter: 500,
            tol: 1e-12,
            max_level: 9,
            want_lambda2: false,
        }
    }
}

fn solve_level(
    mesh: &SphereMesh,
    level: usize,
    prm: &EigenParams,
) -> Result<(LevelInfo, Vec<f64>, Vec<Option<usize>>)> {
    let sys = fem::assemble(mesh)?;
    let count = if prm.want_lambda2 { 2 } else { 1 };
    let pairs = fem::smallest_eigenpairs(&sys, count, prm.max_iter, prm.tol)?;
    Ok((
        LevelInfo {
            level,
            mesh_size: mesh.max_edge(),
            dofs: sys.ndof,
            lambda1: pairs.values[0],
            lambda2: pairs.values.get(1).copied(),
            iterations: pairs.iterations,
        },
        pairs.vectors[0].clone(),
        sys.dof_of_node,
    ))
}

/// Piecewise-linear (radially lifted) Dirichlet eigenvalue on two nested meshes, with Richardson extrapolation.
pub fn lambda1_spherical(dom: &SphericalDomain, mesh_h: f64) -> Result<EigenResult> {
    lambda1_spherical_with(dom, mesh_h, &EigenParams::default())
}

pub fn lambda1_spherical_with(dom: &SphericalDomain, mesh_h: f64, prm: &EigenParams) -> Result<EigenResult> {
    let cone = match dom {
        SphericalDomain::Arc { opening } => return lambda1_arc(*opening),
        SphericalDomain::Polygon { cone } => cone,
    };
    let (coarse, normals, level) = mesh_for_size(cone, mesh_h, prm.max_level)?;
    let fine = coarse.refine(&normals);
    let (lc, _, _) = solve_level(&coarse, level, prm)?;
    let (lf, vec, dofs) = solve_level(&fine, level + 1, prm)?;
    let extrap = (4.0 * lf.lambda1 - lc.lambda1) / 3.0;
    let lambda2 = match (lc.lambda2, lf.lambda2) {
        (Some(c), Some(f)) => Some((4.0 * f - c) / 3.0),
        _ => None,
    };
    let values: Vec<f64> = dofs.iter().map(|d| d.map_or(0.0, |i| vec[i])).collect();
    Ok(EigenResult {
        n: 3,
        lambda1: extrap,
        exponent_mu: exponent_from_lambda(extrap, 3),
        mesh_size: lf.mesh_size,
        estimated_error: (extrap - lf.lambda1).abs(),
        lambda2,
        levels: vec![lc, lf],
        eigenfunction: Some(Eigenfunction {
            nodes: fine.nodes.iter().map(|x| [x[0], x[1], x[2]]).collect(),
            values,
        }),
    })
}

/// λ₁ of `V ∩ 𝕊^{n−1}` for a cone in ℝ² or ℝ³.
pub fn lambda1_of_cone(cone: &TangentCone, mesh_h: f64) -> Result<EigenResult> {
    lambda1_spherical(&SphericalDomain::from_cone(cone)?, mesh_h)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub lambda1: f64,
    pub exponent_mu: f64,
    /// `λ₁ − 2n`.
    pub gap: f64,
    pub estimated_error: f64,
    /// Whether `μ > 2` holds beyond the numerical error.
    pub theorem31_applicable: bool,
}

/// Compares λ₁ of the cone's cross-section with the quarter-space value `2n`.
pub fn eigenvalue_gap_check(cone: &TangentCone, mesh_h: f64) -> Result<GapReport> {
    let r = lambda1_of_cone(cone, mesh_h)?;
    let n = r.n as f64;
    let a = n - 2.0;
    // dμ/dλ = 1/(2μ + n − 2).
    let err_mu = r.estimated_error / (2.0 * r.exponent_mu + a);
    let margin = (3.0 * err_mu).max(1e-6);
    Ok(GapReport {
        lambda1: r.lambda1,
        exponent_mu: r.exponent_mu,
        gap: r.lambda1 - 2.0 * n,
        estimated_error: r.estimated_error,
        theorem31_applicable: r.exponent_mu - 2.0 > margin,
    })
}

/// Lune `V_μ × ℝ` in ℝ³.
pub fn lune(mu: f64) -> Result<TangentCone> {
    TangentCone::v_mu(mu, 3)
}

pub fn octant() -> TangentCone {
    TangentCone::orthant(3, 3).expect("octant is valid")
}

pub fn quarter_space() -> TangentCone {
    TangentCone::orthant(2, 3).expect("quarter-space is valid")
}

/// Cone in ℝ³ with apex at the origin from raw inward normals.
pub fn cone_from_normals(normals: &[[f64; 3]]) -> Result<TangentCone> {
    let ns: Vec<DVector<f64>> = normals.iter().map(|v| DVector::from_column_slice(v)).collect();
    TangentCone::from_normals(DVector::zeros(3), &ns, 1e-9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arc_examples() {
        let r = lambda1_arc(PI / 2.0).unwrap();
        assert_eq!(r.lambda1, 4.0);
        assert_eq!(r.exponent_mu, 2.0);
        let r = lambda1_arc(PI).unwrap();
        assert_eq!(r.lambda1, 1.0);
        let r = lambda1_arc(0.4 * PI).unwrap();
        assert!((r.exponent_mu - 2.5).abs() < 1e-14);
        assert!(matches!(lambda1_arc(0.0), Err(Error::OpeningOutOfRange(_))));
        assert!(matches!(lambda1_arc(7.0), Err(Error::OpeningOutOfRange(_))));
    }

    #[test]
    fn exponent_examples() {
        assert!((exponent_from_lambda(4.0, 2) - 2.0).abs() < 1e-14);
        assert!((exponent_from_lambda(12.0, 3) - 3.0).abs() < 1e-14);
        for n in 2..6 {
            assert!((exponent_from_lambda(2.0 * n as f64, n) - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn octant_coarse() {
        let r = lambda1_of_cone(&octant(), 0.2).unwrap();
        assert!((r.lambda1 - 12.0).abs() < 0.12, "{r:?}");
        assert!(r.levels[0].lambda1 > r.levels[1].lambda1);
        assert!(r.levels[1].lambda1 > 12.0);
    }

    #[test]
    fn planar_cone_goes_to_arc() {
        let c = TangentCone::v_mu(0.25, 2).unwrap();
        let r = lambda1_of_cone(&c, 0.1).unwrap();
        assert!((r.exponent_mu - 4.0).abs() < 1e-12);
    }
}

//! Hessian normalization, the dihedral-angle functionals Θ and θ, the (strong) A-condition
//! and the planar-sector map `A_μ`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Polytope, TangentCone};
use crate::linalg;

/// Value, gradient and Hessian of a function at a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SecondOrderJet {
    pub base_point: DVector<f64>,
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl SecondOrderJet {
    /// Jet with only a Hessian, value and gradient zero.
    pub fn from_hessian(base_point: DVector<f64>, hessian: DMatrix<f64>) -> Self {
        let n = base_point.len();
        SecondOrderJet {
            base_point,
            value: 0.0,
            gradient: DVector::zeros(n),
            hessian,
        }
    }
}

/// `x ↦ linear · x + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineMap {
    pub linear: DMatrix<f64>,
    pub shift: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, shift: DVector<f64>) -> Result<Self> {
        if linear.nrows() != linear.ncols() || linear.nrows() != shift.len() {
            return Err(Error::InconsistentInput("affine map shape".into()));
        }
        if linear.determinant().abs() < 1e-14 {
            return Err(Error::InconsistentInput("affine map is singular".into()));
        }
        Ok(AffineMap { linear, shift })
    }

    pub fn identity(n: usize) -> Self {
        AffineMap {
            linear: DMatrix::identity(n, n),
            shift: DVector::zeros(n),
        }
    }

    pub fn linear(linear: DMatrix<f64>) -> Result<Self> {
        let n = linear.nrows();
        AffineMap::new(linear, DVector::zeros(n))
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.linear * x + &self.shift
    }

    pub fn inverse(&self) -> AffineMap {
        let inv = self.linear.clone().try_inverse().expect("checked at construction");
        let shift = -(&inv * &self.shift);
        AffineMap { linear: inv, shift }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear * &other.linear,
            shift: &self.linear * &other.shift + &self.shift,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.linear.determinant()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub theta_max: f64,
    pub theta_min: f64,
    pub per_pair: Vec<((usize, usize), f64)>,
}

/// Tolerances for the A-condition predicates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AConditionParams {
    pub tau_geom: f64,
    pub tau_strict: f64,
}

impl Default for AConditionParams {
    fn default() -> Self {
        AConditionParams {
            tau_geom: 1e-9,
            tau_strict: 0.0,
        }
    }
}

fn check_spd(h: &DMatrix<f64>) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::InconsistentInput("Hessian must be square".into()));
    }
    let scale = h.amax().max(1.0);
    if linalg::max_abs_asymmetry(h) > 1e-10 * scale {
        return Err(Error::InconsistentInput("Hessian must be symmetric".into()));
    }
    let (vals, _) = linalg::sym_eigen(h);
    if vals[0] <= 1e-14 * scale {
        return Err(Error::NotPositiveDefinite(vals[0]));
    }
    Ok(())
}

/// `T = H^{-1/2}`, so that `Tᵀ H T = I`.
pub fn hessian_normalizer(h: &DMatrix<f64>) -> Result<AffineMap> {
    check_spd(h)?;
    AffineMap::linear(linalg::spd_power(h, -0.5))
}

/// Dihedral angles `π − arccos(ν_i·ν_j)` over adjacent facet pairs.
pub fn dihedral_angles(cone: &TangentCone) -> Result<AngleReport> {
    if cone.inward_normals.len() < 2 || cone.adjacent_pairs.is_empty() {
        return Err(Error::DegenerateCone);
    }
    let per_pair: Vec<((usize, usize), f64)> = cone
        .adjacent_pairs
        .iter()
        .map(|&(i, j)| {
            let c = cone.inward_normals[i].dot(&cone.inward_normals[j]).clamp(-1.0, 1.0);
            ((i, j), PI - c.acos())
        })
        .collect();
    let theta_max = per_pair.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let theta_min = per_pair.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    Ok(AngleReport {
        theta_max,
        theta_min,
        per_pair,
    })
}

/// Angles of `T⁻¹(V)` for an explicit normalizer `T`.
pub fn angles_with_normalizer(cone: &TangentCone, t: &DMatrix<f64>) -> Result<AngleReport> {
    let t_inv = t
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InconsistentInput("normalizer is singular".into()))?;
    let image = cone.transformed(&t_inv, DVector::zeros(cone.dim()), 1e-9)?;
    dihedral_angles(&image)
}

/// Θ and θ of `jet` at its base point on the (n−2)-skeleton of `p`.
pub fn theta_functionals(jet: &SecondOrderJet, p: &Polytope) -> Result<AngleReport> {
    check_spd(&jet.hessian)?;
    let x0 = &jet.base_point;
    if !p.on_skeleton(x0, p.dim - 2) {
        return Err(Error::NotOnSkeleton(x0.iter().copied().collect()));
    }
    let cone = p.tangent_cone(x0)?;
    let t = hessian_normalizer(&jet.hessian)?;
    angles_with_normalizer(&cone, &t.linear)
}

/// Θ ≤ π/2 (with `tau_geom` slack), or strongly `π/2 − Θ > tau_strict + tau_geom`.
pub fn check_a_condition(jet: &SecondOrderJet, p: &Polytope, strong: bool, params: AConditionParams) -> Result<bool> {
    let rep = theta_functionals(jet, p)?;
    Ok(a_condition_from_theta(rep.theta_max, strong, params))
}

pub fn a_condition_from_theta(theta: f64, strong: bool, params: AConditionParams) -> bool {
    if strong {
        FRAC_PI_2 - theta > params.tau_strict + params.tau_geom
    } else {
        theta <= FRAC_PI_2 + params.tau_geom
    }
}

/// Block map sending `V_μ × ℝ^{n−2}` onto `(ℝ₊)² × ℝ^{n−2}`.
pub fn a_mu_map(mu: f64, n: usize) -> Result<AffineMap> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::MuOutOfRange(mu));
    }
    if n < 2 {
        return Err(Error::InconsistentInput("n must be at least 2".into()));
    }
    let a = mu * PI;
    let mut m = DMatrix::identity(n, n);
    m[(0, 1)] = -a.cos() / a.sin();
    m[(1, 1)] = 1.0 / a.sin();
    AffineMap::linear(m)
}

/// Jet at a skeleton sample, with the optional sub-solution gap `det D²u̲ − f` used by the (C4) variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSample {
    pub jet: SecondOrderJet,
    pub gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Epsilon0Variant {
    Angle,
    Gap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Epsilon0Report {
    /// `min (π/2 − Θ)` over all samples.
    pub angle_variant: f64,
    /// Mixed variant; `None` when some sample off Γ_{n−3} lacks a gap.
    pub gap_variant: Option<f64>,
    pub selected: Epsilon0Variant,
    pub value: f64,
    pub worst_point: Vec<f64>,
}

/// Both ε₀ variants over a finite skeleton sample.
pub fn epsilon0(p: &Polytope, samples: &[SkeletonSample], selected: Epsilon0Variant) -> Result<Epsilon0Report> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    let n = p.dim as isize;
    let mut angle_min = f64::INFINITY;
    let mut worst = Vec::new();
    let mut mixed = Some(f64::INFINITY);
    let mut worst_mixed = Vec::new();
    for s in samples {
        let rep = theta_functionals(&s.jet, p)?;
        let slack = FRAC_PI_2 - rep.theta_max;
        if slack < angle_min {
            angle_min = slack;
            worst = s.jet.base_point.iter().copied().collect();
        }
        let face_dim = p.minimal_face(&s.jet.base_point).map(|f| f.dim as isize).unwrap_or(n);
        let term = if face_dim <= n - 3 {
            Some(slack)
        } else {
            s.gap.map(|g| g.max(slack))
        };
        mixed = match (mixed, term) {
            (Some(m), Some(t)) => {
                if t < m {
                    worst_mixed = s.jet.base_point.iter().copied().collect();
                }
                Some(m.min(t))
            }
            _ => None,
        };
    }
    let (value, worst_point) = match selected {
        Epsilon0Variant::Angle => (angle_min, worst),
        Epsilon0Variant::Gap => (
            mixed.ok_or_else(|| Error::IncompleteJets("gap missing for a (C4) sample".into()))?,
            worst_mixed,
        ),
    };
    Ok(Epsilon0Report {
        angle_variant: angle_min,
        gap_variant: mixed,
        selected,
        value,
        worst_point,
    })
}

/// Points of Γ_k: vertices, plus `per_edge` uniform samples along each edge when `k ≥ 1`,
/// plus segment samples between vertex pairs and centroids for higher faces.
pub fn sample_skeleton(p: &Polytope, k: usize, per_edge: usize) -> Vec<DVector<f64>> {
    let mut pts: Vec<DVector<f64>> = p.vertices.clone();
    let push = |pts: &mut Vec<DVector<f64>>, x: DVector<f64>| {
        if !pts.iter().any(|q| (q - &x).amax() < 1e-12) {
            pts.push(x);
        }
    };
    let k = k.min(p.dim - 1);
    for d in 1..=k {
        for face in &p.faces[d] {
            let vs: Vec<&DVector<f64>> = face.vertex_ids.iter().map(|&i| &p.vertices[i]).collect();
            for a in 0..vs.len() {
                for b in (a + 1)..vs.len() {
                    for s in 1..per_edge.saturating_sub(1) {
                        let t = s as f64 / (per_edge - 1) as f64;
                        let x = vs[a] * (1.0 - t) + vs[b] * t;
                        if d == 1 || p.minimal_face(&x).is_some_and(|f| f.dim == d) {
                            push(&mut pts, x);
                        }
                    }
                }
            }
            if d >= 2 {
                let mut c = DVector::zeros(p.dim);
                for v in &vs {
                    c += *v;
                }
                push(&mut pts, c / vs.len() as f64);
            }
        }
    }
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dmat, dvec};

    fn corner_jet(b: f64) -> SecondOrderJet {
        SecondOrderJet::from_hessian(dvec(&[0.0, 0.0]), dmat(&[vec![1.0, b], vec![b, 1.0]]))
    }

    #[test]
    fn normalizer_examples() {
        let t = hessian_normalizer(&DMatrix::identity(2, 2)).unwrap();
        assert!((t.linear.clone() - DMatrix::identity(2, 2)).amax() < 1e-14);
        let t = hessian_normalizer(&dmat(&[vec![4.0, 0.0], vec![0.0, 1.0]])).unwrap();
        assert!((t.linear[(0, 0)] - 0.5).abs() < 1e-14);
        let h = dmat(&[vec![1.0, -0.5], vec![-0.5, 1.0]]);
        let t = hessian_normalizer(&h).unwrap();
        let id = t.linear.transpose() * &h * &t.linear;
        assert!((id - DMatrix::identity(2, 2)).amax() < 1e-12);
        assert!(matches!(
            hessian_normalizer(&dmat(&[vec![1.0, 2.0], vec![2.0, 1.0]])),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn dihedral_examples() {
        let q = TangentCone::orthant(2, 2).unwrap();
        let r = dihedral_angles(&q).unwrap();
        assert_eq!(r.per_pair.len(), 1);
        assert!((r.theta_max - FRAC_PI_2).abs() < 1e-12);
        let v = TangentCone::v_mu(1.0 / 3.0, 2).unwrap();
        assert!((dihedral_angles(&v).unwrap().theta_max - PI / 3.0).abs() < 1e-12);
        let o = TangentCone::orthant(3, 3).unwrap();
        let r = dihedral_angles(&o).unwrap();
        assert_eq!(r.per_pair.len(), 3);
        assert!(r.per_pair.iter().all(|p| (p.1 - FRAC_PI_2).abs() < 1e-12));
        let h = TangentCone::orthant(1, 3).unwrap();
        assert_eq!(dihedral_angles(&h).unwrap_err(), Error::DegenerateCone);
    }

    #[test]
    fn theta_is_arccos_b() {
        let sq = Polytope::unit_cube(2);
        for b in [-0.5, 0.0, 0.5] {
            let r = theta_functionals(&corner_jet(b), &sq).unwrap();
            assert!((r.theta_max - b.acos()).abs() < 1e-9, "b = {b}");
        }
    }

    #[test]
    fn a_condition_examples() {
        let sq = Polytope::unit_cube(2);
        let prm = AConditionParams::default();
        assert!(check_a_condition(&corner_jet(0.0), &sq, false, prm).unwrap());
        assert!(!check_a_condition(&corner_jet(0.0), &sq, true, prm).unwrap());
        assert!(!check_a_condition(&corner_jet(-0.5), &sq, false, prm).unwrap());
        assert!(check_a_condition(&corner_jet(0.5), &sq, false, prm).unwrap());
        assert!(check_a_condition(&corner_jet(0.5), &sq, true, prm).unwrap());
    }

    #[test]
    fn not_on_skeleton() {
        let cube = Polytope::unit_cube(3);
        let jet = SecondOrderJet::from_hessian(dvec(&[0.5, 0.5, 0.0]), DMatrix::identity(3, 3));
        assert!(matches!(theta_functionals(&jet, &cube), Err(Error::NotOnSkeleton(_))));
    }

    #[test]
    fn a_mu_examples() {
        let a = a_mu_map(0.5, 2).unwrap();
        assert!((a.linear.clone() - DMatrix::identity(2, 2)).amax() < 1e-15);
        let a = a_mu_map(1.0 / 3.0, 2).unwrap();
        let s3 = 3f64.sqrt();
        assert!((a.linear[(0, 1)] + 1.0 / s3).abs() < 1e-14);
        assert!((a.linear[(1, 1)] - 2.0 / s3).abs() < 1e-14);
        let ang = PI / 3.0;
        let img = a.apply(&dvec(&[ang.cos(), ang.sin()]));
        assert!(img[0].abs() < 1e-12 && img[1] > 0.0);
        let img = a.apply(&dvec(&[1.0, 0.0]));
        assert!(img[1].abs() < 1e-12 && img[0] > 0.0);
        assert!(matches!(a_mu_map(1.0, 2), Err(Error::MuOutOfRange(_))));
    }

    #[test]
    fn epsilon0_examples() {
        let cube = Polytope::unit_cube(3);
        let samples: Vec<SkeletonSample> = sample_skeleton(&cube, 1, 5)
            .into_iter()
            .map(|x| SkeletonSample {
                jet: SecondOrderJet::from_hessian(x, DMatrix::identity(3, 3)),
                gap: None,
            })
            .collect();
        let r = epsilon0(&cube, &samples, Epsilon0Variant::Angle).unwrap();
        assert!(r.value.abs() < 1e-12);

        let sq = Polytope::unit_cube(2);
        let h = dmat(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
        let samples: Vec<SkeletonSample> = sq
            .vertices
            .iter()
            .map(|v| SkeletonSample {
                jet: SecondOrderJet::from_hessian(v.clone(), h.clone()),
                gap: Some(0.0),
            })
            .collect();
        // Corners other than (0,0) and (1,1) see the angle arccos(-1/2).
        let r = epsilon0(&sq, &samples[..1], Epsilon0Variant::Angle).unwrap();
        assert!((r.value - PI / 6.0).abs() < 1e-12);

        let samples: Vec<SkeletonSample> = sq
            .vertices
            .iter()
            .map(|v| SkeletonSample {
                jet: SecondOrderJet::from_hessian(v.clone(), DMatrix::identity(2, 2)),
                gap: Some(0.3),
            })
            .collect();
        let r = epsilon0(&sq, &samples, Epsilon0Variant::Gap).unwrap();
        assert!((r.value - 0.3).abs() < 1e-12);
        assert_eq!(
            epsilon0(&sq, &[], Epsilon0Variant::Angle).unwrap_err(),
            Error::EmptySample
        );
    }

    #[test]
    fn skeleton_sampler_density() {
        let cube = Polytope::unit_cube(3);
        let pts = sample_skeleton(&cube, 1, 33);
        assert_eq!(pts.len(), 8 + 12 * 31);
        assert!(pts.iter().all(|x| cube.on_skeleton(x, 1)));
    }
}

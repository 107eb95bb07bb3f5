//! Structured verdict of the boundary-compatibility conditions (C1)–(C5) on the skeleton.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::geometry::Polytope;
use crate::normalize::{
    a_condition_from_theta, epsilon0, sample_skeleton, theta_functionals, AConditionParams, Epsilon0Report,
    Epsilon0Variant, SecondOrderJet, SkeletonSample,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionStatus {
    Pass,
    Fail,
    /// No skeleton points of the relevant dimension exist.
    Vacuous,
    /// Requires a sub-solution that was not supplied.
    NotEvaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub name: String,
    pub status: ConditionStatus,
    pub samples: usize,
    /// Worst margin (positive means satisfied) and where it occurs.
    pub worst_margin: Option<f64>,
    pub worst_point: Option<Vec<f64>>,
}

impl ConditionVerdict {
    pub fn passed(&self) -> bool {
        matches!(self.status, ConditionStatus::Pass | ConditionStatus::Vacuous)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexAngle {
    pub point: Vec<f64>,
    pub theta_max: f64,
    pub theta_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub dim: usize,
    pub simple: bool,
    pub conditions: Vec<ConditionVerdict>,
    /// `None` when Θ cannot be evaluated at some sample (e.g. a non-SPD jet).
    pub epsilon0: Option<Epsilon0Report>,
    /// Θ of the boundary data at every vertex, for reference even where no condition applies.
    pub vertex_angles: Vec<VertexAngle>,
}

impl ConditionReport {
    pub fn get(&self, name: &str) -> Option<&ConditionVerdict> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

struct Acc {
    samples: usize,
    worst: Option<(f64, Vec<f64>)>,
}

impl Acc {
    fn new() -> Self {
        Acc {
            samples: 0,
            worst: None,
        }
    }

    fn push(&mut self, margin: f64, x: &[f64]) {
        self.samples += 1;
        if self.worst.as_ref().is_none_or(|(m, _)| margin < *m) {
            self.worst = Some((margin, x.to_vec()));
        }
    }

    fn verdict(self, name: &str, pass: impl Fn(f64) -> bool) -> ConditionVerdict {
        let status = match &self.worst {
            None => ConditionStatus::Vacuous,
            Some((m, _)) if pass(*m) => ConditionStatus::Pass,
            Some(_) => ConditionStatus::Fail,
        };
        ConditionVerdict {
            name: name.into(),
            status,
            samples: self.samples,
            worst_margin: self.worst.as_ref().map(|w| w.0),
            worst_point: self.worst.map(|w| w.1),
        }
    }
}

fn find_jet<'a>(jets: &'a [SecondOrderJet], x: &nalgebra::DVector<f64>, what: &str) -> Result<&'a SecondOrderJet> {
    jets.iter()
        .find(|j| (&j.base_point - x).amax() <= 1e-9)
        .ok_or_else(|| Error::IncompleteJets(format!("no {what} jet at {:?}", x.as_slice())))
}

/// Evaluates (C1)–(C5) at `sample_skeleton(p, n − 2, per_edge)`. The jets of `φ` (and of the
/// sub-solution, when given) must cover every sample point. Θ is measured against the
/// `π/2` threshold with the tolerances in `prm`.
pub fn condition_report(
    p: &Polytope,
    phi_jets: &[SecondOrderJet],
    f: &ScalarField,
    subsolution: Option<&[SecondOrderJet]>,
    per_edge: usize,
    prm: AConditionParams,
) -> Result<ConditionReport> {
    let n = p.dim;
    if n < 2 {
        return Err(Error::InvalidParams("conditions need dimension at least 2".into()));
    }
    let pts = sample_skeleton(p, n - 2, per_edge);
    let (mut c1, mut c2, mut c3, mut c4, mut c5) = (Acc::new(), Acc::new(), Acc::new(), Acc::new(), Acc::new());
    let mut eps_samples = Vec::new();
    let mut eps_ok = true;
    for x in &pts {
        let jet = find_jet(phi_jets, x, "boundary data")?;
        let face_dim = p.minimal_face(x).map_or(n, |fc| fc.dim);
        let fx = f.at(x);
        let xs = x.as_slice();
        let theta = theta_functionals(jet, p).map(|r| r.theta_max);
        let sub = match subsolution {
            Some(s) => Some(find_jet(s, x, "sub-solution")?),
            None => None,
        };
        let mut gap = None;
        if face_dim + 3 <= n {
            let det = jet.hessian.determinant();
            let scale = fx.abs().max(1.0);
            c1.push(-(det - fx).abs() / scale, xs);
            let th = theta.clone()?;
            c2.push(std::f64::consts::FRAC_PI_2 - th, xs);
            c3.push(std::f64::consts::FRAC_PI_2 - th, xs);
        } else if let Some(s) = sub {
            let g = s.hessian.determinant() - fx;
            gap = Some(g);
            c4.push(g, xs);
            let th = theta_functionals(s, p)?.theta_max;
            c5.push(std::f64::consts::FRAC_PI_2 - th, xs);
        }
        match theta {
            Ok(_) => eps_samples.push(SkeletonSample { jet: jet.clone(), gap }),
            Err(_) => eps_ok = false,
        }
    }
    let tol_det = 1e-9;
    let weak = |m: f64| a_condition_from_theta(std::f64::consts::FRAC_PI_2 - m, false, prm);
    let strong = |m: f64| a_condition_from_theta(std::f64::consts::FRAC_PI_2 - m, true, prm);
    let mut conditions = vec![
        c1.verdict("C1", |m| m >= -tol_det),
        c2.verdict("C2", weak),
        c3.verdict("C3", strong),
    ];
    if subsolution.is_some() {
        conditions.push(c4.verdict("C4", |m| m > 0.0));
        conditions.push(c5.verdict("C5", strong));
    } else {
        for name in ["C4", "C5"] {
            conditions.push(ConditionVerdict {
                name: name.into(),
                status: ConditionStatus::NotEvaluated,
                samples: 0,
                worst_margin: None,
                worst_point: None,
            });
        }
    }
    let variant = if subsolution.is_some() {
        Epsilon0Variant::Gap
    } else {
        Epsilon0Variant::Angle
    };
    let eps = if eps_ok && !eps_samples.is_empty() {
        Some(epsilon0(p, &eps_samples, variant)?)
    } else {
        None
    };
    let vertex_angles = p
        .vertices
        .iter()
        .filter_map(|v| {
            let jet = find_jet(phi_jets, v, "boundary data").ok()?;
            let r = theta_functionals(jet, p).ok()?;
            Some(VertexAngle {
                point: v.iter().copied().collect(),
                theta_max: r.theta_max,
                theta_min: r.theta_min,
            })
        })
        .collect();
    Ok(ConditionReport {
        dim: n,
        simple: p.is_simple(),
        conditions,
        epsilon0: eps,
        vertex_angles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::expr::CompiledExpr;

    fn jets(p: &Polytope, phi: &str, per_edge: usize) -> Vec<SecondOrderJet> {
        let c = CompiledExpr::new(phi, p.dim).unwrap();
        sample_skeleton(p, p.dim - 2, per_edge)
            .into_iter()
            .map(|x| {
                let mut j = SecondOrderJet::from_hessian(x.clone(), c.hessian_at(x.as_slice()));
                j.value = c.eval(x.as_slice());
                j.gradient = c.gradient_at(x.as_slice());
                j
            })
            .collect()
    }

    #[test]
    fn cube_with_round_data() {
        let p = Polytope::unit_cube(3);
        let phi = "0.5*(x1^2 + x2^2 + x3^2)";
        let r = condition_report(
            &p,
            &jets(&p, phi, 3),
            &ScalarField::constant(1.0),
            None,
            3,
            AConditionParams::default(),
        )
        .unwrap();
        assert_eq!(r.get("C1").unwrap().status, ConditionStatus::Pass);
        assert_eq!(r.get("C2").unwrap().status, ConditionStatus::Pass);
        assert_eq!(r.get("C3").unwrap().status, ConditionStatus::Fail);
        assert_eq!(r.get("C1").unwrap().samples, 8);
        assert_eq!(r.get("C4").unwrap().status, ConditionStatus::NotEvaluated);
    }

    #[test]
    fn planar_conditions_are_vacuous() {
        let p = Polytope::unit_cube(2);
        let phi = "0.5*(x1^2 + x2^2) + 0.5*x1*x2";
        let r = condition_report(
            &p,
            &jets(&p, phi, 3),
            &ScalarField::constant(0.75),
            None,
            3,
            AConditionParams::default(),
        )
        .unwrap();
        for name in ["C1", "C2", "C3"] {
            assert_eq!(r.get(name).unwrap().status, ConditionStatus::Vacuous);
        }
        // Θ = π/3 at the corners where the mixed term is positive, 2π/3 at the other two.
        let mut thetas: Vec<f64> = r.vertex_angles.iter().map(|v| v.theta_max).collect();
        thetas.sort_by(f64::total_cmp);
        assert!((thetas[0] - std::f64::consts::FRAC_PI_3).abs() < 1e-9);
        assert!((thetas[3] - 2.0 * std::f64::consts::FRAC_PI_3).abs() < 1e-9);
    }

    #[test]
    fn missing_jets() {
        let p = Polytope::unit_cube(3);
        let mut j = jets(&p, "0.5*(x1^2 + x2^2 + x3^2)", 3);
        j.pop();
        assert!(matches!(
            condition_report(
                &p,
                &j,
                &ScalarField::constant(1.0),
                None,
                3,
                AConditionParams::default()
            ),
            Err(Error::IncompleteJets(_))
        ));
    }
}

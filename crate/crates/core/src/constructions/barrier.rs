//! Composable functions with exact value, gradient and Hessian.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::piecewise::Piecewise1D;
use crate::field::ScalarField;

/// Value, gradient and Hessian at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub gradient: DVector<f64>,
    pub hessian: DMatrix<f64>,
}

impl Jet {
    fn zeros(n: usize) -> Self {
        Jet {
            value: 0.0,
            gradient: DVector::zeros(n),
            hessian: DMatrix::zeros(n, n),
        }
    }
}

/// Expression tree; every node differentiates exactly through second order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum BarrierFunction {
    /// `½ (x−c)ᵀ Q (x−c) + b·(x−c) + k`.
    Quadratic {
        q: DMatrix<f64>,
        b: DVector<f64>,
        center: DVector<f64>,
        constant: f64,
    },
    /// `p(inner(x))`.
    Profile {
        profile: Piecewise1D,
        inner: Box<BarrierFunction>,
    },
    /// `p(|A(x−c)|)`; the profile must satisfy `p′(0) = 0`.
    Radial {
        profile: Piecewise1D,
        a: DMatrix<f64>,
        center: DVector<f64>,
    },
    Sum(Vec<BarrierFunction>),
    Scale(f64, Box<BarrierFunction>),
    Product(Box<BarrierFunction>, Box<BarrierFunction>),
}

impl BarrierFunction {
    pub fn quadratic(q: DMatrix<f64>, center: DVector<f64>) -> Self {
        let n = center.len();
        BarrierFunction::Quadratic {
            q,
            b: DVector::zeros(n),
            center,
            constant: 0.0,
        }
    }

    /// Affine function `b·(x−c) + k`.
    pub fn affine(b: DVector<f64>, center: DVector<f64>, constant: f64) -> Self {
        let n = b.len();
        BarrierFunction::Quadratic {
            q: DMatrix::zeros(n, n),
            b,
            center,
            constant,
        }
    }

    pub fn constant(n: usize, k: f64) -> Self {
        BarrierFunction::affine(DVector::zeros(n), DVector::zeros(n), k)
    }

    pub fn compose(profile: Piecewise1D, inner: BarrierFunction) -> Self {
        BarrierFunction::Profile {
            profile,
            inner: Box::new(inner),
        }
    }

    pub fn scaled(self, s: f64) -> Self {
        BarrierFunction::Scale(s, Box::new(self))
    }

    pub fn times(self, other: BarrierFunction) -> Self {
        BarrierFunction::Product(Box::new(self), Box::new(other))
    }

    pub fn dim(&self) -> usize {
        match self {
            BarrierFunction::Quadratic { center, .. } => center.len(),
            BarrierFunction::Radial { center, .. } => center.len(),
            BarrierFunction::Profile { inner, .. } => inner.dim(),
            BarrierFunction::Sum(v) => v.first().map_or(0, |f| f.dim()),
            BarrierFunction::Scale(_, f) => f.dim(),
            BarrierFunction::Product(f, _) => f.dim(),
        }
    }

    pub fn jet(&self, x: &DVector<f64>) -> Jet {
        match self {
            BarrierFunction::Quadratic { q, b, center, constant } => {
                let d = x - center;
                let qd = q * &d;
                Jet {
                    value: 0.5 * d.dot(&qd) + b.dot(&d) + constant,
                    gradient: qd + b,
                    hessian: q.clone(),
                }
            }
            BarrierFunction::Profile { profile, inner } => {
                let j = inner.jet(x);
                let [p0, p1, p2] = profile.eval_all(j.value);
                Jet {
                    value: p0,
                    gradient: &j.gradient * p1,
                    hessian: &j.gradient * j.gradient.transpose() * p2 + j.hessian * p1,
                }
            }
            BarrierFunction::Radial { profile, a, center } => {
                let w = a * (x - center);
                let rho = w.norm();
                let [p0, p1, p2] = profile.eval_all(rho);
                let n = x.len();
                if rho < 1e-14 {
                    return Jet {
                        value: p0,
                        gradient: DVector::zeros(n),
                        hessian: a.transpose() * a * p2,
                    };
                }
                let u = &w / rho;
                let uu = &u * u.transpose();
                let inner = &uu * p2 + (DMatrix::identity(w.len(), w.len()) - &uu) * (p1 / rho);
                Jet {
                    value: p0,
                    gradient: a.transpose() * u * p1,
                    hessian: a.transpose() * inner * a,
                }
            }
            BarrierFunction::Sum(terms) => {
                let mut acc = Jet::zeros(x.len());
                for t in terms {
                    let j = t.jet(x);
                    acc.value += j.value;
                    acc.gradient += j.gradient;
                    acc.hessian += j.hessian;
                }
                acc
            }
            BarrierFunction::Scale(s, f) => {
                let j = f.jet(x);
                Jet {
                    value: s * j.value,
                    gradient: j.gradient * *s,
                    hessian: j.hessian * *s,
                }
            }
            BarrierFunction::Product(f, g) => {
                let a = f.jet(x);
                let b = g.jet(x);
                let cross = &a.gradient * b.gradient.transpose();
                Jet {
                    value: a.value * b.value,
                    gradient: &a.gradient * b.value + &b.gradient * a.value,
                    hessian: &a.hessian * b.value + &b.hessian * a.value + &cross + cross.transpose(),
                }
            }
        }
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.jet(x).value
    }

    /// Human-readable composition tree.
    pub fn describe(&self) -> String {
        match self {
            BarrierFunction::Quadratic { q, b, .. } => {
                if q.amax() == 0.0 {
                    if b.amax() == 0.0 {
                        "const".into()
                    } else {
                        "affine".into()
                    }
                } else {
                    "quadratic".into()
                }
            }
            BarrierFunction::Profile { profile, inner } => {
                format!("profile[{} pieces]({})", profile.pieces.len(), inner.describe())
            }
            BarrierFunction::Radial { profile, .. } => format!("radial[{} pieces](|A(x-c)|)", profile.pieces.len()),
            BarrierFunction::Sum(v) => format!("({})", v.iter().map(|t| t.describe()).collect::<Vec<_>>().join(" + ")),
            BarrierFunction::Scale(s, f) => format!("{s}*{}", f.describe()),
            BarrierFunction::Product(f, g) => format!("{}*{}", f.describe(), g.describe()),
        }
    }

    /// Value evaluator as a [`ScalarField`].
    pub fn to_field(&self, name: &str) -> ScalarField {
        let me = self.clone();
        ScalarField::new(name, move |x| me.value(&DVector::from_column_slice(x)))
    }

    /// Largest deviation of the analytic gradient and Hessian from central differences.
    pub fn fd_check(&self, probes: &[DVector<f64>], h: f64) -> FdReport {
        let mut rep = FdReport::default();
        for x in probes {
            let j = self.jet(x);
            let n = x.len();
            for i in 0..n {
                let mut a = x.clone();
                let mut b = x.clone();
                a[i] += h;
                b[i] -= h;
                let g = (self.value(&a) - self.value(&b)) / (2.0 * h);
                let ga = self.jet(&a).gradient;
                let gb = self.jet(&b).gradient;
                let scale = 1.0 + j.gradient.amax();
                rep.gradient_error = rep.gradient_error.max((g - j.gradient[i]).abs() / scale);
                let col = (ga - gb) / (2.0 * h);
                let hscale = 1.0 + j.hessian.amax();
                for k in 0..n {
                    rep.hessian_error = rep.hessian_error.max((col[k] - j.hessian[(k, i)]).abs() / hscale);
                }
            }
        }
        rep.probes = probes.len();
        rep
    }
}

/// Relative finite-difference discrepancies.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FdReport {
    pub probes: usize,
    pub gradient_error: f64,
    pub hessian_error: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::profiles::{cutoff_profile, thm63_h_profile};

    #[test]
    fn radial_matches_quadratic_near_center() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, 0.0, 0.8]);
        let c = DVector::from_vec(vec![0.1, 0.2]);
        let r = BarrierFunction::Radial {
            profile: thm63_h_profile(0.9).unwrap(),
            a: a.clone(),
            center: c.clone(),
        };
        let x = DVector::from_vec(vec![0.12, 0.21]);
        let j = r.jet(&x);
        let ata = a.transpose() * &a;
        assert!((j.hessian - &ata).amax() < 1e-12);
        assert!((j.value - 0.5 * (&x - &c).dot(&(&ata * (&x - &c)))).abs() < 1e-15);
        let j0 = r.jet(&c);
        assert!((j0.hessian - ata).amax() < 1e-15);
    }

    #[test]
    fn product_and_profile_fd() {
        let n = 3;
        let chi = BarrierFunction::Radial {
            profile: cutoff_profile(0.1, 0.6).unwrap(),
            a: DMatrix::identity(n, n),
            center: DVector::zeros(n),
        };
        let q = BarrierFunction::quadratic(DMatrix::identity(n, n) * 2.0, DVector::from_element(n, 0.2));
        let f = BarrierFunction::Sum(vec![
            chi.times(q),
            BarrierFunction::compose(
                thm63_h_profile(0.8).unwrap(),
                BarrierFunction::affine(DVector::from_vec(vec![1.0, 0.5, -0.2]), DVector::zeros(n), 0.0),
            )
            .scaled(0.7),
        ]);
        let probes: Vec<DVector<f64>> = (0..50)
            .map(|i| {
                let t = i as f64 * 0.37;
                DVector::from_vec(vec![0.4 * t.sin(), 0.3 * (1.3 * t).cos(), 0.2 * (0.7 * t).sin()])
            })
            .collect();
        let r = f.fd_check(&probes, 1e-4);
        assert!(r.gradient_error < 1e-6, "{r:?}");
        assert!(r.hessian_error < 1e-6, "{r:?}");
    }
}

//! Scalar fields used as right-hand sides and boundary data.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

type Eval = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// A point evaluator plus the metadata the solver and checks need.
#[derive(Clone)]
pub struct ScalarField {
    eval: Arc<Eval>,
    pub name: String,
    /// Hölder exponent of the field, when known.
    pub beta: Option<f64>,
    pub inf: Option<f64>,
    pub sup: Option<f64>,
}

impl fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarField")
            .field("name", &self.name)
            .field("beta", &self.beta)
            .field("inf", &self.inf)
            .field("sup", &self.sup)
            .finish()
    }
}

impl ScalarField {
    pub fn new(name: impl Into<String>, eval: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        ScalarField {
            eval: Arc::new(eval),
            name: name.into(),
            beta: None,
            inf: None,
            sup: None,
        }
    }

    pub fn constant(c: f64) -> Self {
        let mut f = ScalarField::new(format!("{c}"), move |_| c);
        f.beta = Some(1.0);
        f.inf = Some(c);
        f.sup = Some(c);
        f
    }

    /// `½|x|²`.
    pub fn half_norm_sq() -> Self {
        ScalarField::new("0.5*|x|^2", |x| 0.5 * x.iter().map(|v| v * v).sum::<f64>())
    }

    /// `½ xᵀ Q x + b·x + c`.
    pub fn quadratic(q: DMatrix<f64>, b: DVector<f64>, c: f64) -> Self {
        ScalarField::new("quadratic", move |x| {
            let v = DVector::from_column_slice(x);
            0.5 * v.dot(&(&q * &v)) + b.dot(&v) + c
        })
    }

    pub fn with_bounds(mut self, inf: f64, sup: f64) -> Self {
        self.inf = Some(inf);
        self.sup = Some(sup);
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        (self.eval)(x)
    }

    pub fn at(&self, x: &DVector<f64>) -> f64 {
        (self.eval)(x.as_slice())
    }

    /// Central-difference gradient.
    pub fn gradient_fd(&self, x: &DVector<f64>, h: f64) -> DVector<f64> {
        let n = x.len();
        DVector::from_fn(n, |i, _| {
            let mut a = x.clone();
            let mut b = x.clone();
            a[i] += h;
            b[i] -= h;
            (self.at(&a) - self.at(&b)) / (2.0 * h)
        })
    }

    /// Central-difference Hessian.
    pub fn hessian_fd(&self, x: &DVector<f64>, h: f64) -> DMatrix<f64> {
        let n = x.len();
        let f0 = self.at(x);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = if i == j {
                    let mut a = x.clone();
                    let mut b = x.clone();
                    a[i] += h;
                    b[i] -= h;
                    (self.at(&a) - 2.0 * f0 + self.at(&b)) / (h * h)
                } else {
                    let shift = |si: f64, sj: f64| {
                        let mut p = x.clone();
                        p[i] += si * h;
                        p[j] += sj * h;
                        self.at(&p)
                    };
                    (shift(1.0, 1.0) - shift(1.0, -1.0) - shift(-1.0, 1.0) + shift(-1.0, -1.0)) / (4.0 * h * h)
                };
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Sampled minimum and maximum over a point cloud, used to fill in `inf`/`sup`.
    pub fn sample_bounds(&self, pts: &[DVector<f64>]) -> (f64, f64) {
        pts.iter()
            .map(|p| self.at(p))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fd_hessian_of_quadratic() {
        let q = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let f = ScalarField::quadratic(q.clone(), DVector::from_vec(vec![1.0, -1.0]), 3.0);
        let h = f.hessian_fd(&DVector::from_vec(vec![0.3, -0.2]), 1e-3);
        assert!((h - q).amax() < 1e-6);
    }
}

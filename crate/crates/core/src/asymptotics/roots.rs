use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::SecondOrderJet;

/// Roots of `det H(t) = f` where `H(t)` is the jet's Hessian with `H₁₂ = H₂₁ = t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixedRoot {
    /// The larger root (the only one when `degenerate`).
    pub big: f64,
    pub small: f64,
    /// The quadratic collapsed to a linear equation.
    pub degenerate: bool,
    /// Coefficients of `a t² + b t + c = f`.
    pub coefficients: [f64; 3],
}

fn det_with(h: &DMatrix<f64>, t: f64) -> f64 {
    let mut m = h.clone();
    m[(0, 1)] = t;
    m[(1, 0)] = t;
    m.determinant()
}

/// Expands `det D²u = f` in the unknown `t = u₁₂`.
pub fn mixed_root(jet: &SecondOrderJet, f: f64) -> Result<MixedRoot> {
    let h = &jet.hessian;
    if h.nrows() < 2 || h.nrows() != h.ncols() {
        return Err(Error::InvalidParams("need a square Hessian of size at least 2".into()));
    }
    let d0 = det_with(h, 0.0);
    let dp = det_with(h, 1.0);
    let dm = det_with(h, -1.0);
    let a = 0.5 * (dp + dm) - d0;
    let b = 0.5 * (dp - dm);
    let c = d0 - f;
    let scale = a.abs().max(b.abs()).max(c.abs()).max(1.0);
    if a.abs() <= 1e-13 * scale {
        if b.abs() <= 1e-13 * scale {
            return Err(Error::NoRealRoot);
        }
        let t = -c / b;
        return Ok(MixedRoot {
            big: t,
            small: t,
            degenerate: true,
            coefficients: [a, b, d0],
        });
    }
    if a > 0.0 {
        return Err(Error::WrongSignQuadratic(a));
    }
    let disc = b * b - 4.0 * a * c;
    // A double root can come out slightly negative in floating point.
    if disc < -1e-12 * scale * scale {
        return Err(Error::NoRealRoot);
    }
    let s = disc.max(0.0).sqrt();
    let r1 = (-b + s) / (2.0 * a);
    let r2 = (-b - s) / (2.0 * a);
    Ok(MixedRoot {
        big: r1.max(r2),
        small: r1.min(r2),
        degenerate: false,
        coefficients: [a, b, d0],
    })
}

/// The larger root of the mixed-derivative quadratic.
pub fn mixed_root_big(jet: &SecondOrderJet, f: f64) -> Result<f64> {
    mixed_root(jet, f).map(|r| r.big)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;

    fn jet(diag: &[f64]) -> SecondOrderJet {
        let n = diag.len();
        SecondOrderJet::from_hessian(
            DVector::zeros(n),
            DMatrix::from_diagonal(&DVector::from_column_slice(diag)),
        )
    }

    #[test]
    fn normal_form_roots() {
        assert!((mixed_root_big(&jet(&[1.0, 1.0]), 0.75).unwrap() - 0.5).abs() < 1e-14);
        let r = mixed_root(&jet(&[1.0, 1.0]), 0.75).unwrap();
        assert!((r.small + 0.5).abs() < 1e-14);
        assert!(mixed_root_big(&jet(&[1.0, 1.0]), 1.0).unwrap().abs() < 1e-7);
        // 2(1 − t²) = 3/2
        assert!((mixed_root_big(&jet(&[1.0, 1.0, 2.0]), 1.5).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn failures() {
        assert_eq!(mixed_root_big(&jet(&[1.0, 1.0]), 1.5), Err(Error::NoRealRoot));
        // A negative 3×3 minor flips the sign of the t² coefficient.
        assert!(matches!(
            mixed_root_big(&jet(&[1.0, 1.0, -1.0]), -0.5),
            Err(Error::WrongSignQuadratic(_))
        ));
        // A vanishing (3,3) entry kills the t² term: det = 2t − 2.
        let h = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        let r = mixed_root(&SecondOrderJet::from_hessian(DVector::zeros(3), h), 0.0).unwrap();
        assert!(r.degenerate);
        assert!((r.big - 1.0).abs() < 1e-14);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationBound {
    /// Bound on `‖f′‖_∞`.
    pub sup_bound: f64,
    /// Bound on the `C^{α/2}` seminorm of `f′`.
    pub holder_half_bound: f64,
}

/// Bounds for `f ∈ C^{1,α}([0,1])` with `‖f‖_∞ ≤ A`, `‖f′‖_{C^{0,α}} ≤ B`, `A ≤ B`.
pub fn interpolation_bound(a: f64, b: f64, alpha: f64) -> Result<InterpolationBound> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::HypothesisViolated(format!("A = {a}, B = {b} must be positive")));
    }
    if a > b {
        return Err(Error::HypothesisViolated(format!("A = {a} exceeds B = {b}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::HypothesisViolated(format!("alpha = {alpha} is outside (0, 1]")));
    }
    let p = 1.0 / (1.0 + alpha);
    Ok(InterpolationBound {
        sup_bound: 6.0 * a.powf(alpha * p) * b.powf(p),
        holder_half_bound: (12.0 * b.powf(p) + b) * a.powf(0.5 * alpha * p),
    })
}

/// `sup |g(x) − g(y)| / |x − y|^γ` over all pairs of sample points.
pub fn holder_seminorm(xs: &[f64], gs: &[f64], gamma: f64) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let d = (xs[i] - xs[j]).abs();
            if d > 0.0 {
                best = best.max((gs[i] - gs[j]).abs() / d.powf(gamma));
            }
        }
    }
    best
}

/// Measured quantities of a function on `[0, 1]` given samples of `f` and `f′`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredNorms {
    pub a: f64,
    pub b: f64,
    pub derivative_sup: f64,
    pub derivative_half_seminorm: f64,
}

pub fn measure_norms(xs: &[f64], f: &[f64], df: &[f64], alpha: f64) -> MeasuredNorms {
    let sup = |v: &[f64]| v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    MeasuredNorms {
        a: sup(f),
        b: sup(df) + holder_seminorm(xs, df, alpha),
        derivative_sup: sup(df),
        derivative_half_seminorm: holder_seminorm(xs, df, 0.5 * alpha),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plug_in_values() {
        assert!((interpolation_bound(1.0, 1.0, 1.0).unwrap().sup_bound - 6.0).abs() < 1e-14);
        let b = interpolation_bound(1.0, 8.0, 1.0).unwrap();
        assert!((b.sup_bound - 6.0 * 8f64.sqrt()).abs() < 1e-12);
        assert!(interpolation_bound(2.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn square_function() {
        // f = x²: ‖f‖ = 1, ‖f′‖ = 2, [f′]_1 = 2.
        let xs: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
        let f: Vec<f64> = xs.iter().map(|x| x * x).collect();
        let df: Vec<f64> = xs.iter().map(|x| 2.0 * x).collect();
        let m = measure_norms(&xs, &f, &df, 1.0);
        assert!((m.a - 1.0).abs() < 1e-12 && (m.derivative_sup - 2.0).abs() < 1e-12);
        assert!((m.b - 4.0).abs() < 1e-9);
        let bound = interpolation_bound(m.a, m.b, 1.0).unwrap();
        assert!(m.derivative_sup <= bound.sup_bound);
        assert!(m.derivative_half_seminorm <= bound.holder_half_bound);
    }
}

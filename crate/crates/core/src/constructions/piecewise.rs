use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Continuity {
    C0,
    C1,
    C2,
}

impl Continuity {
    fn order(self) -> usize {
        match self {
            Continuity::C0 => 0,
            Continuity::C1 => 1,
            Continuity::C2 => 2,
        }
    }
}

/// Piecewise polynomial in local coordinates: on `[b_k, b_{k+1})` the value is
/// `Σ_j pieces[k][j] (t − b_k)^j`. Outside the breakpoint range the end pieces are extended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Piecewise1D {
    pub breakpoints: Vec<f64>,
    pub pieces: Vec<Vec<f64>>,
    pub continuity: Continuity,
}

fn poly_derivs(c: &[f64], s: f64) -> [f64; 3] {
    let (mut v, mut d1, mut d2) = (0.0, 0.0, 0.0);
    for &cj in c.iter().rev() {
        d2 = d2 * s + 2.0 * d1;
        d1 = d1 * s + v;
        v = v * s + cj;
    }
    [v, d1, d2]
}

impl Piecewise1D {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Vec<f64>>, continuity: Continuity) -> Result<Self> {
        if breakpoints.len() != pieces.len() + 1 || pieces.is_empty() {
            return Err(Error::InconsistentInput("need one more breakpoint than pieces".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InconsistentInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        Ok(Piecewise1D {
            breakpoints,
            pieces,
            continuity,
        })
    }

    pub fn piece_index(&self, t: f64) -> usize {
        let m = self.pieces.len();
        // Last breakpoint not exceeding t; exact breakpoints select the piece to their right.
        match self.breakpoints[1..m].binary_search_by(|b| b.total_cmp(&t)) {
            Ok(i) => i + 1,
            Err(i) => i,
        }
    }

    /// Value, first and second derivative.
    pub fn eval_all(&self, t: f64) -> [f64; 3] {
        let k = self.piece_index(t);
        poly_derivs(&self.pieces[k], t - self.breakpoints[k])
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_all(t)[0]
    }

    pub fn d1(&self, t: f64) -> f64 {
        self.eval_all(t)[1]
    }

    pub fn d2(&self, t: f64) -> f64 {
        self.eval_all(t)[2]
    }

    /// Largest jump of value and derivatives up to the declared class across interior breakpoints.
    pub fn continuity_defect(&self) -> f64 {
        let ord = self.continuity.order();
        let mut worst: f64 = 0.0;
        for k in 1..self.pieces.len() {
            let left = poly_derivs(&self.pieces[k - 1], self.breakpoints[k] - self.breakpoints[k - 1]);
            let right = poly_derivs(&self.pieces[k], 0.0);
            for d in 0..=ord {
                worst = worst.max((left[d] - right[d]).abs());
            }
        }
        worst
    }

    pub fn verify_continuity(&self, tol: f64) -> Result<()> {
        let d = self.continuity_defect();
        if d > tol {
            return Err(Error::HypothesisViolated(format!(
                "declared {:?} continuity broken by {d:e}",
                self.continuity
            )));
        }
        Ok(())
    }

    /// Minimum second derivative over `samples` uniform points in `[a, b]`.
    pub fn min_second_derivative(&self, a: f64, b: f64, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.d2(a + (b - a) * i as f64 / (samples - 1).max(1) as f64))
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|p'|` over pieces, sampled at piece ends and midpoints (exact for degree ≤ 2).
    pub fn max_slope(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, c) in self.pieces.iter().enumerate() {
            let w = self.breakpoints[k + 1] - self.breakpoints[k];
            for s in [0.0, 0.5 * w, w] {
                m = m.max(poly_derivs(c, s)[1].abs());
            }
        }
        m
    }

    /// Distinct slopes of a piecewise-linear function.
    pub fn slopes(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().map(|c| c.get(1).copied().unwrap_or(0.0)).collect();
        v.sort_by(|a, b| a.total_cmp(b));
        v.dedup();
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abs_like_profile() {
        let p = Piecewise1D::new(
            vec![-1.0, 0.0, 1.0],
            vec![vec![1.0, -1.0], vec![0.0, 1.0]],
            Continuity::C0,
        )
        .unwrap();
        assert_eq!(p.eval(-0.5), 0.5);
        assert_eq!(p.eval(0.25), 0.25);
        assert_eq!(p.eval(3.0), 3.0);
        assert_eq!(p.eval(-3.0), 3.0);
        assert_eq!(p.continuity_defect(), 0.0);
        assert_eq!(p.max_slope(), 1.0);
        assert_eq!(p.piece_index(0.0), 1);
    }

    #[test]
    fn derivative_recurrence() {
        // 1 + 2s + 3s^2 + 4s^3 at s = 0.5
        let [v, d1, d2] = poly_derivs(&[1.0, 2.0, 3.0, 4.0], 0.5);
        assert!((v - (1.0 + 1.0 + 0.75 + 0.5)).abs() < 1e-15);
        assert!((d1 - (2.0 + 3.0 + 3.0)).abs() < 1e-15);
        assert!((d2 - (6.0 + 12.0)).abs() < 1e-15);
    }
}

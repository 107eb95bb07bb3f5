//! One-dimensional profiles: the convex bump `g`, the dyadic counterexample right-hand sides,
//! the radial `h` profile and a C² cutoff.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::piecewise::{Continuity, Piecewise1D};
use crate::error::{Error, Result};

/// Coefficients of `q(s) = −s + 7s³ − 35/2 s⁴ + 21s⁵ − 14s⁶ + 5s⁷ − 3/4 s⁸`, which has
/// `q″ = 42 s (1 − s)⁵`, `q(0) = 0`, `q′(0) = −1`, `q(1) = −1/4`, `q′(1) = q″(1) = 0`.
pub const BUMP_Q: [f64; 9] = [0.0, -1.0, 0.0, 7.0, -17.5, 21.0, -14.0, 5.0, -0.75];

/// C² convex non-increasing profile: `−t` on `t ≤ ε₀`, constant `−5ε₀/4` on `t ≥ 2ε₀`.
pub fn prop52_bump(eps0: f64) -> Result<Piecewise1D> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::HypothesisViolated(format!("eps0 = {eps0} must be positive")));
    }
    let mid: Vec<f64> = BUMP_Q
        .iter()
        .enumerate()
        .map(|(j, &c)| {
            let v = eps0 * c / eps0.powi(j as i32);
            if j == 0 {
                v - eps0
            } else {
                v
            }
        })
        .collect();
    Piecewise1D::new(
        vec![0.0, eps0, 2.0 * eps0, 3.0 * eps0],
        vec![vec![0.0, -1.0], mid, vec![-1.25 * eps0]],
        Continuity::C2,
    )
}

/// Base profile `g` on `[0, 1]`.
pub fn base_profile_g() -> Piecewise1D {
    Piecewise1D::new(
        vec![0.0, 0.25, 0.75, 1.0],
        vec![vec![1.0, -2.0], vec![0.5, 0.0], vec![0.5, -2.0]],
        Continuity::C0,
    )
    .expect("static profile")
}

/// Base profile `g̃` on `[0, 1]`.
pub fn base_profile_g_tilde() -> Piecewise1D {
    Piecewise1D::new(
        vec![0.0, 0.5, 0.75, 1.0],
        vec![vec![1.0, -1.0], vec![0.5, 1.0], vec![0.75, -3.0]],
        Continuity::C0,
    )
    .expect("static profile")
}

/// Assembles `1 − 2^{−k} + 2^{−(k+1)} base(2^{k+1} t − 1)` on each dyadic block
/// `(2^{−(k+1)}, 2^{−k}]`, `k = 1..=k_max`, with `1 − t` below `2^{−(k_max+1)}`.
fn dyadic_profile(base: &Piecewise1D, k_max: u32) -> Piecewise1D {
    let mut breaks = vec![0.0];
    let mut pieces = vec![vec![1.0, -1.0]];
    for k in (1..=k_max).rev() {
        let lo = 0.5f64.powi(k as i32 + 1);
        let scale = 2f64.powi(k as i32 + 1);
        let shift = 1.0 - 0.5f64.powi(k as i32);
        for (j, c) in base.pieces.iter().enumerate() {
            let start = lo + base.breakpoints[j] / scale;
            breaks.push(start);
            // Local coordinate is preserved up to the factor `scale` and the prefactor `1/scale`.
            let mut p: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(d, &cd)| cd * scale.powi(d as i32) / scale)
                .collect();
            p[0] += shift;
            pieces.push(p);
        }
    }
    breaks.push(0.5);
    Piecewise1D::new(breaks, pieces, Continuity::C0).expect("dyadic breakpoints increase")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRhs {
    pub k_max: u32,
    pub g: Piecewise1D,
    pub g_tilde: Piecewise1D,
}

impl CounterexampleRhs {
    /// Anchor points `3/2^{k+2}` where both profiles equal `1 − 3/2^{k+2}`.
    pub fn anchors(&self) -> Vec<(u32, f64, f64)> {
        (1..=self.k_max)
            .map(|k| {
                let t = 3.0 * 0.5f64.powi(k as i32 + 2);
                (k, t, 1.0 - t)
            })
            .collect()
    }
}

/// The Lipschitz profiles `G ≤ G̃` on `[0, 1/2]`, truncated below scale `2^{−(k_max+1)}`.
pub fn counterexample_rhs(k_max: u32) -> Result<CounterexampleRhs> {
    if !(1..=50).contains(&k_max) {
        return Err(Error::HypothesisViolated(format!("k_max = {k_max} must be in 1..=50")));
    }
    Ok(CounterexampleRhs {
        k_max,
        g: dyadic_profile(&base_profile_g(), k_max),
        g_tilde: dyadic_profile(&base_profile_g_tilde(), k_max),
    })
}

/// `μ_k = arccos(√3 / 2^{k/2+1}) / π`, the sector parameter seen at anchor `k`.
pub fn mu_k(k: u32) -> f64 {
    (3f64.sqrt() / 2f64.powf(k as f64 / 2.0 + 1.0)).acos() / PI
}

/// `h″ = min(1, 2(1 − t/δ³)⁺)`, `h(0) = h′(0) = 0`.
pub fn thm63_h_profile(delta: f64) -> Result<Piecewise1D> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::HypothesisViolated(format!("delta = {delta} must be in (0, 1)")));
    }
    let d = delta.powi(3);
    // Each piece starts from the left limit of the previous one, so value and slope match bit for bit.
    let first = vec![0.0, 0.0, 0.5];
    let left = Piecewise1D::new(vec![0.0, 0.5 * d], vec![first.clone()], Continuity::C2)?.eval_all(0.5 * d);
    let mut mid = vec![left[0], left[1], 0.5, -1.0 / (3.0 * d)];
    // h″(δ³) cannot round to exactly 0, so the last piece inherits the left limit of the middle one
    // (value, slope and residual curvature); the cubic coefficient is nudged until that residual is ≥ 0.
    let mut right = [0.0; 3];
    for _ in 0..64 {
        right = Piecewise1D::new(vec![0.5 * d, d], vec![mid.clone()], Continuity::C2)?.eval_all(d);
        if right[2] >= 0.0 {
            break;
        }
        mid[3] = mid[3].next_up();
    }
    if right[2] < 0.0 {
        return Err(Error::HypothesisViolated(format!(
            "h'' residual {} at delta^3",
            right[2]
        )));
    }
    Piecewise1D::new(
        vec![0.0, 0.5 * d, d, 2.0 * d],
        vec![first, mid, vec![right[0], right[1], 0.5 * right[2]]],
        Continuity::C2,
    )
}

/// C² cutoff equal to 1 on `[0, r1]` and 0 on `[r2, ∞)` (quintic smoothstep between).
pub fn cutoff_profile(r1: f64, r2: f64) -> Result<Piecewise1D> {
    if !(0.0 <= r1 && r1 < r2) {
        return Err(Error::HypothesisViolated(format!("cutoff radii {r1} < {r2} required")));
    }
    let w = r2 - r1;
    let (bps, pieces) = if r1 > 0.0 {
        (
            vec![0.0, r1, r2, r2 + w],
            vec![
                vec![1.0],
                vec![1.0, 0.0, 0.0, -10.0 / w.powi(3), 15.0 / w.powi(4), -6.0 / w.powi(5)],
                vec![0.0],
            ],
        )
    } else {
        (
            vec![0.0, r2, r2 + w],
            vec![
                vec![1.0, 0.0, 0.0, -10.0 / w.powi(3), 15.0 / w.powi(4), -6.0 / w.powi(5)],
                vec![0.0],
            ],
        )
    };
    Piecewise1D::new(bps, pieces, Continuity::C2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_examples() {
        let e = 0.1;
        let g = prop52_bump(e).unwrap();
        assert!((g.eval(e / 2.0) + e / 2.0).abs() < 1e-15);
        assert!((g.eval(3.0 * e) + 1.25 * e).abs() < 1e-15);
        assert!(g.continuity_defect() < 1e-12);
        assert!(g.min_second_derivative(-e, 4.0 * e, 1000) >= -1e-12);
        for i in 0..1000 {
            let t = 2.0 * e * i as f64 / 1000.0;
            assert!(g.d1(t) < 0.0);
        }
    }

    #[test]
    fn bump_polynomial_identities() {
        // q'' = 42 s (1-s)^5 checked coefficientwise.
        let d2: Vec<f64> = (2..9).map(|j| BUMP_Q[j] * (j * (j - 1)) as f64).collect();
        let expect = [0.0, 42.0, -210.0, 420.0, -420.0, 210.0, -42.0];
        for (a, b) in d2.iter().zip(expect) {
            assert_eq!(*a, b);
        }
        let q1: f64 = BUMP_Q.iter().sum();
        assert_eq!(q1, -0.25);
    }

    #[test]
    fn dyadic_anchors_exact() {
        let r = counterexample_rhs(10).unwrap();
        for (_, t, v) in r.anchors() {
            assert_eq!(r.g.eval(t), v);
            assert_eq!(r.g_tilde.eval(t), v);
        }
        assert_eq!(r.g.continuity_defect(), 0.0);
        assert_eq!(r.g_tilde.continuity_defect(), 0.0);
        assert_eq!(r.g.eval(0.0), 1.0);
        assert_eq!(r.g.eval(0.5), 0.5);
    }

    #[test]
    fn dyadic_slopes() {
        let r = counterexample_rhs(6).unwrap();
        assert_eq!(r.g.slopes(), vec![-2.0, -1.0, 0.0]);
        assert_eq!(r.g_tilde.slopes(), vec![-3.0, -1.0, 1.0]);
    }

    #[test]
    fn mu_k_limits() {
        assert!(mu_k(30) < 0.5 && mu_k(30) > 0.4999);
        assert!(mu_k(1) < mu_k(2));
        let c = (mu_k(3) * PI).cos();
        assert!((c * c - 3.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn h_profile_examples() {
        let delta = 0.5;
        let h = thm63_h_profile(delta).unwrap();
        let d = delta * delta * delta;
        assert_eq!(h.d2(0.0), 1.0);
        for t in [d, 1.5 * d, 3.0 * d] {
            assert!((0.0..=2.0 * f64::EPSILON).contains(&h.d2(t)), "h''({t}) = {}", h.d2(t));
        }
        for i in 0..=50 {
            let t = 0.5 * d * i as f64 / 50.0;
            assert!((h.eval(t) - t * t / 2.0).abs() < 1e-18);
        }
        assert_eq!(h.continuity_defect(), 0.0);
        for delta in [0.1, 0.3, 0.7, 0.9] {
            assert_eq!(
                thm63_h_profile(delta).unwrap().continuity_defect(),
                0.0,
                "delta = {delta}"
            );
        }
        for k in 1..3 {
            let b = h.breakpoints[k];
            let l = &h.pieces[k - 1];
            let w = b - h.breakpoints[k - 1];
            let lv: f64 = l.iter().rev().fold(0.0, |a, c| a * w + c);
            assert_eq!(lv, h.pieces[k][0]);
        }
    }

    #[test]
    fn cutoff_shape() {
        let c = cutoff_profile(0.2, 0.5).unwrap();
        assert_eq!(c.eval(0.1), 1.0);
        assert_eq!(c.eval(0.6), 0.0);
        assert!(c.continuity_defect() < 1e-12);
    }
}

//! Stencil directions, orthogonal frames and the frame-minimum Monge–Ampère operator.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Primitive integer directions up to sign and the orthogonal frames they form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Stencil {
    pub dim: usize,
    pub width: i32,
    pub directions: Vec<Vec<i32>>,
    /// Each frame lists `dim` mutually orthogonal direction indices.
    pub frames: Vec<Vec<usize>>,
}

fn canonical(v: &[i32]) -> bool {
    match v.iter().find(|c| **c != 0) {
        Some(c) => *c > 0,
        None => false,
    }
}

impl Stencil {
    pub fn new(dim: usize, width: i32) -> Self {
        let range: Vec<i32> = (-width..=width).collect();
        let directions: Vec<Vec<i32>> = (0..dim)
            .map(|_| range.iter().copied())
            .multi_cartesian_product()
            .filter(|v| canonical(v) && v.iter().fold(0, |g, c| gcd(g, *c)) == 1)
            .collect();
        let dot = |a: &[i32], b: &[i32]| a.iter().zip(b).map(|(x, y)| x * y).sum::<i32>();
        let frames: Vec<Vec<usize>> = (0..directions.len())
            .combinations(dim)
            .filter(|c| {
                c.iter()
                    .tuple_combinations()
                    .all(|(&i, &j)| dot(&directions[i], &directions[j]) == 0)
            })
            .collect();
        Stencil {
            dim,
            width,
            directions,
            frames,
        }
    }

    /// Directions equal to coordinate axes, in axis order.
    pub fn axis_directions(&self) -> Vec<usize> {
        (0..self.dim)
            .map(|a| {
                self.directions
                    .iter()
                    .position(|v| v.iter().enumerate().all(|(i, c)| *c == i32::from(i == a)))
                    .expect("axes are primitive")
            })
            .collect()
    }

    pub fn id(&self) -> String {
        format!("wide-stencil-d{}-w{}-{}frames", self.dim, self.width, self.frames.len())
    }
}

/// `Π max(D_j, 0) + Σ min(D_j, 0)` and its partial derivatives in the `D_j`.
pub fn frame_value(d: &[f64]) -> (f64, [f64; 3]) {
    let mut prod = 1.0;
    let mut neg = 0.0;
    for &x in d {
        prod *= x.max(0.0);
        neg += x.min(0.0);
    }
    let mut grad = [0.0; 3];
    for j in 0..d.len() {
        grad[j] = if d[j] > 0.0 {
            d.iter()
                .enumerate()
                .filter(|(k, _)| *k != j)
                .map(|(_, x)| x.max(0.0))
                .product()
        } else {
            1.0
        };
    }
    (prod + neg, grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_width_three() {
        let s = Stencil::new(2, 3);
        assert_eq!(s.directions.len(), 16);
        assert_eq!(s.frames.len(), 8);
        assert_eq!(s.axis_directions().len(), 2);
    }

    #[test]
    fn spatial_width_one() {
        let s = Stencil::new(3, 1);
        assert_eq!(s.directions.len(), 13);
        // The coordinate frame plus one face-diagonal frame per axis.
        assert_eq!(s.frames.len(), 4);
        let s2 = Stencil::new(3, 2);
        assert!(s2.frames.len() > 4);
    }

    #[test]
    fn frame_value_branches() {
        let (v, g) = frame_value(&[2.0, 3.0]);
        assert_eq!(v, 6.0);
        assert_eq!(g[..2], [3.0, 2.0]);
        let (v, g) = frame_value(&[-1.0, 3.0]);
        assert_eq!(v, -1.0);
        assert_eq!(g[..2], [1.0, 0.0]);
    }
}

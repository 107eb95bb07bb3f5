//! Nonlinear solve of the discrete scheme: Poisson start, semismooth Newton, explicit fallback.

use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use rayon::prelude::*;

use super::grid::Discretization;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct NewtonControls {
    pub tol: f64,
    pub max_newton: usize,
    pub max_damping: usize,
    /// Explicit steps taken whenever Newton fails to reduce the residual.
    pub pseudo_time_steps: usize,
}

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub u: Vec<f64>,
    pub iterations: usize,
    pub pseudo_time_steps: usize,
    pub residual: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.par_iter().map(|x| x.abs()).reduce(|| 0.0, f64::max)
}

fn sparse_solve(n: usize, trip: &[(usize, usize, f64)], rhs: &[f64]) -> Result<Vec<f64>> {
    let t: Vec<Triplet<usize, usize, f64>> = trip.iter().map(|&(i, j, v)| Triplet::new(i, j, v)).collect();
    let a = SparseColMat::try_new_from_triplets(n, n, &t)
        .map_err(|e| Error::NewtonDiverged(format!("sparse assembly failed: {e:?}")))?;
    let lu = a
        .sp_lu()
        .map_err(|e| Error::NewtonDiverged(format!("factorization failed: {e:?}")))?;
    let b = Mat::from_fn(n, 1, |i, _| rhs[i]);
    let x = lu.solve(&b);
    let out: Vec<f64> = (0..n).map(|i| x[(i, 0)]).collect();
    if out.iter().all(|v| v.is_finite()) {
        Ok(out)
    } else {
        Err(Error::NewtonDiverged("linear solve produced non-finite values".into()))
    }
}

/// Solution of `Σ_axes D_aa u = n f^{1/n}`, a convex-leaning starting guess.
pub fn poisson_start(disc: &Discretization) -> Result<Vec<f64>> {
    let n = disc.lattice.dim as f64;
    let (trip, constant) = disc.laplacian_rows();
    let rhs: Vec<f64> = disc
        .rhs
        .iter()
        .zip(&constant)
        .map(|(f, c)| n * f.powf(1.0 / n) - c)
        .collect();
    sparse_solve(disc.nunknowns(), &trip, &rhs)
}

/// Drives `MA_h(u) − f` to zero from `u`.
pub fn solve(disc: &Discretization, mut u: Vec<f64>, ctl: &NewtonControls) -> Result<NewtonOutcome> {
    let fmax = disc.rhs.iter().copied().fold(0.0, f64::max);
    let tol = ctl.tol * fmax.max(1.0);
    let nu = disc.nunknowns();
    let mut explicit = 0;
    let (mut res, mut frames) = disc.residual(&u);
    let mut norm = max_abs(&res);
    for it in 0..ctl.max_newton {
        if norm < tol {
            return Ok(NewtonOutcome {
                u,
                iterations: it,
                pseudo_time_steps: explicit,
                residual: norm,
            });
        }
        let trip = disc.jacobian(&u, &frames);
        let neg: Vec<f64> = res.iter().map(|r| -r).collect();
        let mut accepted = false;
        if let Ok(du) = sparse_solve(nu, &trip, &neg) {
            let mut alpha = 1.0;
            for _ in 0..=ctl.max_damping {
                let trial: Vec<f64> = u.iter().zip(&du).map(|(a, d)| a + alpha * d).collect();
                let (r2, f2) = disc.residual(&trial);
                let n2 = max_abs(&r2);
                if n2 < (1.0 - 1e-4 * alpha) * norm {
                    u = trial;
                    res = r2;
                    frames = f2;
                    norm = n2;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if !accepted {
            let diag = trip
                .iter()
                .filter(|(i, j, _)| i == j)
                .map(|(_, _, v)| v.abs())
                .fold(0.0, f64::max);
            let dt = 0.9 / diag.max(f64::MIN_POSITIVE);
            for _ in 0..ctl.pseudo_time_steps {
                u.par_iter_mut().zip(&res).for_each(|(a, r)| *a += dt * r);
                (res, frames) = disc.residual(&u);
                explicit += 1;
            }
            norm = max_abs(&res);
        }
        if !norm.is_finite() {
            return Err(Error::NewtonDiverged(format!(
                "residual became non-finite after {it} iterations"
            )));
        }
    }
    if norm < tol {
        return Ok(NewtonOutcome {
            u,
            iterations: ctl.max_newton,
            pseudo_time_steps: explicit,
            residual: norm,
        });
    }
    Err(Error::NewtonDiverged(format!(
        "residual {norm:.3e} above tolerance {tol:.3e} after {} iterations",
        ctl.max_newton
    )))
}

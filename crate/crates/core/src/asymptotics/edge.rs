//! Least-squares fit of the singular edge mode `c·r^{1/μ} sin(θ/μ)` slice by slice.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normalize::SecondOrderJet;
use crate::solver::DiscreteSolution;

/// A value of `u − ½|x|²` at polar coordinates `(r, θ)` around the edge, at height `x3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeSample {
    pub r: f64,
    pub theta: f64,
    pub x3: f64,
    pub w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeFitParams {
    pub r_min: f64,
    pub r_max: f64,
    /// Samples within this distance of a requested height belong to its slice.
    pub slice_halfwidth: f64,
    pub max_condition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionFit {
    pub mu: f64,
    pub exponent: f64,
    pub x3: Vec<f64>,
    pub coefficient_c: Vec<f64>,
    /// The quadratic the expansion is taken around (`½|x|²`, the lateral data).
    pub quadratic_part: SecondOrderJet,
    /// Smallest over slices of the log-log slope of `max |u − ½|x|² − c b|` on dyadic annuli.
    pub residual_decay_rate: f64,
    pub slice_rates: Vec<f64>,
    pub fit_window: [f64; 2],
    pub samples_per_slice: Vec<usize>,
    pub condition: f64,
}

impl ExpansionFit {
    /// The remainder decays faster than the singular mode.
    pub fn is_valid(&self) -> bool {
        self.residual_decay_rate > self.exponent
    }
}

/// `r^{1/μ} sin(θ/μ)`.
pub fn singular_mode(mu: f64, r: f64, theta: f64) -> f64 {
    r.powf(1.0 / mu) * (theta / mu).sin()
}

fn basis(mu: f64, r: f64, theta: f64) -> [f64; 4] {
    let s = theta / (mu * PI);
    let r3 = r * r * r;
    [singular_mode(mu, r, theta), r3, r3 * s, r3 * s * s]
}

/// Polar coordinates around the `x₃` axis, angle in `[0, 2π)`.
pub fn polar(x: &[f64]) -> (f64, f64) {
    let r = x[0].hypot(x[1]);
    let mut t = x[1].atan2(x[0]);
    if t < 0.0 {
        t += 2.0 * PI;
    }
    (r, t)
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 1.0 / 3.0 && mu < 0.5) {
        return Err(Error::HypothesisViolated(format!("mu = {mu} is outside (1/3, 1/2)")));
    }
    Ok(())
}

/// Fits each slice in the basis `{r^{1/μ} sin(θ/μ), r³, r³s, r³s²}` with `s = θ/(μπ)`.
pub fn fit_edge_samples(
    samples: &[EdgeSample],
    mu: f64,
    x3_samples: &[f64],
    prm: &EdgeFitParams,
) -> Result<ExpansionFit> {
    check_mu(mu)?;
    if !(prm.r_min > 0.0 && prm.r_max >= 8.0 * prm.r_min) {
        return Err(Error::WindowTooSmall(format!(
            "window [{}, {}] spans fewer than three dyadic annuli",
            prm.r_min, prm.r_max
        )));
    }
    let mut cs = Vec::new();
    let mut rates = Vec::new();
    let mut counts = Vec::new();
    let mut worst_cond: f64 = 0.0;
    for &z in x3_samples {
        let slice: Vec<&EdgeSample> = samples
            .iter()
            .filter(|s| (s.x3 - z).abs() <= prm.slice_halfwidth && s.r >= prm.r_min && s.r <= prm.r_max)
            .collect();
        if slice.len() < 16 {
            return Err(Error::WindowTooSmall(format!(
                "{} samples in the slice at x3 = {z}",
                slice.len()
            )));
        }
        let a = DMatrix::from_fn(slice.len(), 4, |i, j| basis(mu, slice[i].r, slice[i].theta)[j]);
        let b = DVector::from_iterator(slice.len(), slice.iter().map(|s| s.w));
        // Column scaling before the SVD keeps the condition number meaningful.
        let norms: Vec<f64> = (0..4).map(|j| a.column(j).norm().max(f64::MIN_POSITIVE)).collect();
        let scaled = DMatrix::from_fn(a.nrows(), 4, |i, j| a[(i, j)] / norms[j]);
        let svd = scaled.svd(true, true);
        let cond = svd.singular_values.max() / svd.singular_values.min();
        if !(cond < prm.max_condition) {
            return Err(Error::FitIllConditioned(cond));
        }
        worst_cond = worst_cond.max(cond);
        let coef = svd
            .solve(&b, 0.0)
            .map_err(|e| Error::FitIllConditioned(e.len() as f64))?;
        let c = coef[0] / norms[0];
        // Remainder after removing the singular mode only.
        let mut maxima = Vec::new();
        let mut lo = prm.r_min;
        while lo * 2.0 <= prm.r_max * (1.0 + 1e-12) {
            // Largest remainder in the annulus, located at the radius where it occurs.
            let m = slice
                .iter()
                .filter(|s| s.r >= lo && s.r < 2.0 * lo)
                .map(|s| (s.r, (s.w - c * singular_mode(mu, s.r, s.theta)).abs()))
                .fold((lo, 0.0), |a, b| if b.1 > a.1 { b } else { a });
            maxima.push(m);
            lo *= 2.0;
        }
        // Remainders at round-off level relative to the quadratic scale count as zero.
        let floor = 1e-12 * prm.r_max * prm.r_max;
        let rate = if maxima.iter().all(|(_, m)| *m <= floor) {
            f64::INFINITY
        } else {
            let pts: Vec<(f64, f64)> = maxima
                .iter()
                .filter(|(_, m)| *m > 0.0)
                .map(|(r, m)| (r.ln(), m.ln()))
                .collect();
            if pts.len() < 2 {
                f64::INFINITY
            } else {
                let k = pts.len() as f64;
                let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
                let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
                let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
                let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
                sxy / sxx
            }
        };
        cs.push(c);
        rates.push(rate);
        counts.push(slice.len());
    }
    Ok(ExpansionFit {
        mu,
        exponent: 1.0 / mu,
        x3: x3_samples.to_vec(),
        coefficient_c: cs,
        quadratic_part: SecondOrderJet::from_hessian(DVector::zeros(3), DMatrix::identity(3, 3)),
        residual_decay_rate: rates.iter().copied().fold(f64::INFINITY, f64::min),
        slice_rates: rates,
        fit_window: [prm.r_min, prm.r_max],
        samples_per_slice: counts,
        condition: worst_cond,
    })
}

/// Samples `u − ½|x|²` at the nodes of a wedge solution.
pub fn edge_samples(sol: &DiscreteSolution) -> Result<Vec<EdgeSample>> {
    if sol.dim != 3 {
        return Err(Error::InvalidParams("edge fits need a 3-D solution".into()));
    }
    Ok((0..sol.len())
        .map(|id| {
            let x = sol.physical_point(id);
            let (r, theta) = polar(&x);
            EdgeSample {
                r,
                theta,
                x3: x[2],
                w: sol.values[id] - 0.5 * x.iter().map(|v| v * v).sum::<f64>(),
            }
        })
        .collect())
}

/// Default window `[2h, R/2]` and slices one node thick.
pub fn default_fit_params(sol: &DiscreteSolution, radius: f64) -> EdgeFitParams {
    EdgeFitParams {
        r_min: 2.0 * sol.h,
        r_max: 0.5 * radius,
        slice_halfwidth: 0.5 * sol.h,
        max_condition: 1e10,
    }
}

pub fn edge_expansion_fit(
    sol: &DiscreteSolution,
    mu: f64,
    x3_samples: &[f64],
    prm: &EdgeFitParams,
) -> Result<ExpansionFit> {
    check_mu(mu)?;
    fit_edge_samples(&edge_samples(sol)?, mu, x3_samples, prm)
}

/// Recovery error of the fit on `½|x|² + c·r^{1/μ}sin(θ/μ) + q r³` sampled at the same points,
/// floored at `1e-3`.
pub fn oracle_noise_floor(points: &[EdgeSample], mu: f64, x3_samples: &[f64], prm: &EdgeFitParams) -> Result<f64> {
    let (c, q) = (0.3, 1.0);
    let planted: Vec<EdgeSample> = points
        .iter()
        .map(|s| EdgeSample {
            w: c * singular_mode(mu, s.r, s.theta) + q * s.r.powi(3),
            ..*s
        })
        .collect();
    let fit = fit_edge_samples(&planted, mu, x3_samples, prm)?;
    let err = fit.coefficient_c.iter().map(|v| (v - c).abs()).fold(0.0, f64::max);
    Ok(err.max(1e-3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(mu: f64) -> Vec<EdgeSample> {
        let mut out = Vec::new();
        for i in 1..=60 {
            for j in 1..20 {
                let r = 0.01 * i as f64;
                let theta = mu * PI * j as f64 / 20.0;
                out.push(EdgeSample {
                    r,
                    theta,
                    x3: 0.0,
                    w: 0.0,
                });
            }
        }
        out
    }

    fn prm() -> EdgeFitParams {
        EdgeFitParams {
            r_min: 0.05,
            r_max: 0.6,
            slice_halfwidth: 1e-9,
            max_condition: 1e10,
        }
    }

    #[test]
    fn planted_coefficient() {
        let mu = 0.4;
        let pts: Vec<EdgeSample> = grid(mu)
            .into_iter()
            .map(|s| EdgeSample {
                w: 0.3 * singular_mode(mu, s.r, s.theta) - 0.7 * s.r.powi(3),
                ..s
            })
            .collect();
        let fit = fit_edge_samples(&pts, mu, &[0.0], &prm()).unwrap();
        assert!((fit.coefficient_c[0] - 0.3).abs() < 1e-9);
        assert!((fit.slice_rates[0] - 3.0).abs() < 0.1, "{}", fit.slice_rates[0]);
        assert!(fit.is_valid());
    }

    #[test]
    fn rejects_bad_inputs() {
        let pts = grid(0.4);
        assert!(matches!(
            fit_edge_samples(&pts, 0.6, &[0.0], &prm()),
            Err(Error::HypothesisViolated(_))
        ));
        let narrow = EdgeFitParams { r_max: 0.2, ..prm() };
        assert!(matches!(
            fit_edge_samples(&pts, 0.4, &[0.0], &narrow),
            Err(Error::WindowTooSmall(_))
        ));
        assert!(matches!(
            fit_edge_samples(&pts, 0.4, &[1.0], &prm()),
            Err(Error::WindowTooSmall(_))
        ));
    }
}

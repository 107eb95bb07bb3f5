//! Mixed second derivative at a codimension-two corner and the dichotomy verdict.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::roots::mixed_root;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::normalize::{AffineMap, SecondOrderJet};
use crate::solver::{solve_dirichlet_from, ComputationalDomain, DiscreteSolution, SolverParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DichotomyClass {
    EqualsSubsolution,
    PlusRootBranch,
    NotC2,
}

/// One solution of a zoom sequence, resolving `|y − corner|_∞ ≤ rho`.
#[derive(Debug, Clone)]
pub struct ZoomLevel {
    pub rho: f64,
    pub solution: Arc<DiscreteSolution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerParams {
    /// Extra local re-solves, each halving the window.
    pub zoom_levels: usize,
    /// Cells per window side on zoom levels.
    pub cells: usize,
    /// First probe radius as a fraction of the window.
    pub r0_fraction: f64,
    /// Probes closer than this many cells to the corner are not used.
    pub min_cells: f64,
    pub tau_c2: f64,
    pub tau_root: f64,
}

impl Default for CornerParams {
    fn default() -> Self {
        CornerParams {
            zoom_levels: 12,
            cells: 64,
            r0_fraction: 0.125,
            min_cells: 4.0,
            tau_c2: 0.05,
            tau_root: 0.05,
        }
    }
}

/// `u₁₂` in the normal frame along one approach direction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectionSeries {
    /// Polar angle in the normalized quarter plane.
    pub angle: f64,
    pub radii: Vec<f64>,
    pub estimates: Vec<f64>,
    pub extrapolated: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyVerdict {
    pub class: DichotomyClass,
    pub estimated_u12: f64,
    pub direction_spread: f64,
    pub predicted_root: f64,
    pub subsolution_u12: f64,
    pub series: Vec<DirectionSeries>,
    pub levels_used: usize,
    pub tau_c2: f64,
    pub tau_root: f64,
}

/// Re-solves on shrinking windows at the corner, taking data from the domain boundary where the
/// window touches it and from the previous level elsewhere. Stops early if a level fails.
pub fn corner_zoom(
    dom: &ComputationalDomain,
    f: &ScalarField,
    phi: &ScalarField,
    base: DiscreteSolution,
    corner: &[f64],
    solver: &SolverParams,
    prm: &CornerParams,
) -> Result<Vec<ZoomLevel>> {
    let n = dom.dim;
    if corner.len() != n || dom.slack(corner).abs() > 1e-9 {
        return Err(Error::InvalidParams(format!(
            "{corner:?} is not a boundary point of the domain"
        )));
    }
    if dom.round.is_some() {
        return Err(Error::InvalidParams("corner zoom needs a polyhedral domain".into()));
    }
    let extent = (0..n).map(|i| dom.hi[i] - dom.lo[i]).fold(0.0, f64::max);
    let mut levels = vec![ZoomLevel {
        rho: extent,
        solution: Arc::new(base),
    }];
    let active: Vec<_> = dom
        .halfspaces
        .iter()
        .filter(|(nu, b)| (nu.iter().zip(corner).map(|(a, c)| a * c).sum::<f64>() - b).abs() < 1e-9)
        .cloned()
        .collect();
    let mut rho = extent;
    for _ in 0..prm.zoom_levels {
        rho *= 0.5;
        let mut hs = active.clone();
        for i in 0..n {
            let e = crate::linalg::unit(n, i);
            hs.push((e.clone(), corner[i] - rho));
            hs.push((-e, -(corner[i] + rho)));
        }
        let lo: Vec<f64> = (0..n).map(|i| (corner[i] - rho).max(dom.lo[i])).collect();
        let hi: Vec<f64> = (0..n).map(|i| (corner[i] + rho).min(dom.hi[i])).collect();
        let local = ComputationalDomain {
            halfspaces: hs,
            lo,
            hi,
            description: format!("corner window rho={rho:e}"),
            ..dom.clone()
        };
        let prev = levels.last().expect("base level").solution.clone();
        let outer = dom.clone();
        let phi2 = phi.clone();
        let scale = rho;
        let prev_data = prev.clone();
        let data = ScalarField::new("zoom-data", move |y| {
            if outer.slack(y).abs() <= 1e-12 * scale {
                phi2.eval(&outer.physical(y))
            } else {
                prev_data
                    .interpolate(y)
                    .unwrap_or_else(|_| phi2.eval(&outer.physical(y)))
            }
        });
        let prev_guess = prev.clone();
        let guess = ScalarField::new("zoom-guess", move |y| prev_guess.interpolate(y).unwrap_or(0.0));
        let params = SolverParams {
            h: rho / prm.cells as f64,
            ..*solver
        };
        match solve_dirichlet_from(&local, f, &data, &params, &guess) {
            Ok(sol) => levels.push(ZoomLevel {
                rho,
                solution: Arc::new(sol),
            }),
            Err(Error::NewtonDiverged(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(levels)
}

/// Estimates `u₁₂` at `corner` in the frame of `normalizing_map` (grid coordinates to the normal
/// form with the corner at the origin and the domain locally `ℝ₊² × ℝⁿ⁻²`), extrapolates in the
/// radius and classifies against the roots of `det = f₀`.
pub fn corner_jet_extract(
    levels: &[ZoomLevel],
    corner: &[f64],
    f0: f64,
    normalizing_map: &AffineMap,
    subsolution_u12: Option<f64>,
    prm: &CornerParams,
) -> Result<DichotomyVerdict> {
    let first = levels
        .first()
        .ok_or_else(|| Error::WindowTooSmall("no solutions".into()))?;
    let n = first.solution.dim;
    if normalizing_map.dim() != n || corner.len() != n {
        return Err(Error::InvalidParams("dimension mismatch".into()));
    }
    let c = DVector::from_column_slice(corner);
    if normalizing_map.apply(&c).amax() > 1e-9 {
        return Err(Error::InvalidParams(
            "normalizing map must send the corner to the origin".into(),
        ));
    }
    let inv = normalizing_map.inverse();
    let l = &normalizing_map.linear;
    let l_inv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::InvalidParams("singular normalizing map".into()))?;

    // One radius per level (an eighth of the window); the deepest level also contributes two
    // halvings so that a single solution yields three radii.
    let mut radii: Vec<(f64, usize)> = levels
        .iter()
        .enumerate()
        .map(|(i, lv)| (lv.rho * prm.r0_fraction, i))
        .collect();
    let last = levels.len() - 1;
    let r_last = radii[last].0;
    radii.push((r_last * 0.5, last));
    radii.push((r_last * 0.25, last));
    let stretch = l.clone().svd(false, false).singular_values.max();
    radii.retain(|(r, i)| *r >= prm.min_cells * levels[*i].solution.h * stretch);
    if radii.len() < 3 {
        return Err(Error::WindowTooSmall(format!(
            "only {} radii resolve at least {} cells",
            radii.len(),
            prm.min_cells
        )));
    }

    let angles = [PI / 8.0, PI / 4.0, 3.0 * PI / 8.0];
    let mut series = Vec::new();
    for &a in &angles {
        let mut rs = Vec::new();
        let mut est = Vec::new();
        for &(r, lv) in &radii {
            let mut z = DVector::zeros(n);
            z[0] = r * a.cos();
            z[1] = r * a.sin();
            let y = inv.apply(&z);
            let hy = levels[lv].solution.hessian_at(y.as_slice())?;
            let hz: DMatrix<f64> = l_inv.transpose() * hy * &l_inv;
            rs.push(r);
            est.push(hz[(0, 1)]);
        }
        let k = est.len();
        // Richardson over the last three dyadic radii, error model c₁r + c₂r².
        let extrapolated = (8.0 * est[k - 1] - 6.0 * est[k - 2] + est[k - 3]) / 3.0;
        series.push(DirectionSeries {
            angle: a,
            radii: rs,
            estimates: est,
            extrapolated,
        });
    }
    let ex: Vec<f64> = series.iter().map(|s| s.extrapolated).collect();
    let estimated = ex.iter().sum::<f64>() / ex.len() as f64;
    let spread =
        ex.iter().copied().fold(f64::NEG_INFINITY, f64::max) - ex.iter().copied().fold(f64::INFINITY, f64::min);

    let mut normal = DMatrix::identity(n, n);
    normal[(0, 1)] = 0.0;
    let roots = mixed_root(&SecondOrderJet::from_hessian(DVector::zeros(n), normal), f0)?;
    let sub = subsolution_u12.unwrap_or(roots.small);
    let class = if !(spread < prm.tau_c2) {
        DichotomyClass::NotC2
    } else if (estimated - roots.big).abs() <= prm.tau_root {
        DichotomyClass::PlusRootBranch
    } else if (estimated - sub).abs() <= prm.tau_root {
        DichotomyClass::EqualsSubsolution
    } else {
        DichotomyClass::NotC2
    };
    Ok(DichotomyVerdict {
        class,
        estimated_u12: estimated,
        direction_spread: spread,
        predicted_root: roots.big,
        subsolution_u12: sub,
        series,
        levels_used: levels.len(),
        tau_c2: prm.tau_c2,
        tau_root: prm.tau_root,
    })
}

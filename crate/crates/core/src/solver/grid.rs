//! Cartesian lattice restricted to the domain, with cut-point neighbours on the boundary.

use rayon::prelude::*;

use super::domain::ComputationalDomain;
use super::scheme::{frame_value, Stencil};
use crate::error::{Error, Result};
use crate::field::ScalarField;

/// Lattice points closer than this fraction of `h` to the boundary are treated as boundary points.
const SNAP: f64 = 1e-6;
const BOUNDARY_BIT: u32 = 1 << 31;

/// Lattice `h·ℤⁿ` over the domain's box.
#[derive(Debug, Clone)]
pub struct Lattice {
    pub dim: usize,
    pub h: f64,
    pub kmin: Vec<i64>,
    pub shape: Vec<usize>,
    /// Node id per lattice cell, `-1` when outside the closed domain.
    pub index: Vec<i32>,
    /// Grid coordinates, `dim` per node.
    pub coords: Vec<f64>,
    pub interior: Vec<bool>,
}

impl Lattice {
    pub fn new(dom: &ComputationalDomain, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParams(format!("grid spacing {h} must be positive")));
        }
        let n = dom.dim;
        let kmin: Vec<i64> = dom.lo.iter().map(|l| (l / h - 1e-9).ceil() as i64).collect();
        let kmax: Vec<i64> = dom.hi.iter().map(|u| (u / h + 1e-9).floor() as i64).collect();
        let shape: Vec<usize> = kmin
            .iter()
            .zip(&kmax)
            .map(|(a, b)| (b - a + 1).max(0) as usize)
            .collect();
        let total: usize = shape.iter().product();
        if total == 0 || total > 50_000_000 {
            return Err(Error::InvalidParams(format!("lattice with {total} cells")));
        }
        let mut index = vec![-1i32; total];
        let mut coords = Vec::new();
        let mut interior = Vec::new();
        let mut y = vec![0.0; n];
        for (cell, slot) in index.iter_mut().enumerate() {
            let mut c = cell;
            for i in 0..n {
                y[i] = (kmin[i] + (c % shape[i]) as i64) as f64 * h;
                c /= shape[i];
            }
            let s = dom.slack(&y);
            if s < -SNAP * h {
                continue;
            }
            *slot = interior.len() as i32;
            coords.extend_from_slice(&y);
            interior.push(s > SNAP * h);
        }
        if !interior.iter().any(|b| *b) {
            return Err(Error::InvalidParams("grid has no interior nodes".into()));
        }
        Ok(Lattice {
            dim: n,
            h,
            kmin,
            shape,
            index,
            coords,
            interior,
        })
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    pub fn point(&self, id: usize) -> &[f64] {
        &self.coords[id * self.dim..(id + 1) * self.dim]
    }

    /// Integer lattice coordinates of a node.
    pub fn multi_index(&self, id: usize) -> Vec<i64> {
        self.point(id).iter().map(|c| (c / self.h).round() as i64).collect()
    }

    /// Node at integer coordinates, if inside the closed domain.
    pub fn node_at(&self, k: &[i64]) -> Option<usize> {
        let mut cell = 0usize;
        let mut stride = 1usize;
        for i in 0..self.dim {
            let off = k[i] - self.kmin[i];
            if off < 0 || off as usize >= self.shape[i] {
                return None;
            }
            cell += off as usize * stride;
            stride *= self.shape[i];
        }
        let v = self.index[cell];
        (v >= 0).then_some(v as usize)
    }

    /// Nearest node to a point in grid coordinates.
    pub fn nearest(&self, y: &[f64]) -> Option<usize> {
        let k: Vec<i64> = y.iter().map(|c| (c / self.h).round() as i64).collect();
        self.node_at(&k)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BoundaryEntry {
    pub s: f64,
    pub value: f64,
}

/// Lattice plus, for every unknown and direction, the two neighbours used by the second difference.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub lattice: Lattice,
    pub stencil: Stencil,
    /// Interior node ids in unknown order.
    pub unknowns: Vec<usize>,
    /// Unknown index per node (`u32::MAX` on boundary nodes).
    pub unknown_of: Vec<u32>,
    /// `2 · ndir` codes per unknown: unknown index, or `BOUNDARY_BIT | entry`.
    pub neighbours: Vec<u32>,
    pub boundary: Vec<BoundaryEntry>,
    /// Dirichlet values at boundary lattice nodes (by node id; unused for interior nodes).
    pub node_boundary_values: Vec<f64>,
    pub dir_len: Vec<f64>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub enum Neighbour {
    Unknown(usize),
    Fixed(f64),
}

impl Discretization {
    pub fn new(dom: &ComputationalDomain, h: f64, width: i32, f: &ScalarField, phi: &ScalarField) -> Result<Self> {
        let lattice = Lattice::new(dom, h)?;
        let stencil = Stencil::new(dom.dim, width);
        let n = dom.dim;
        let unknowns: Vec<usize> = (0..lattice.len()).filter(|&i| lattice.interior[i]).collect();
        let mut unknown_of = vec![u32::MAX; lattice.len()];
        for (k, &i) in unknowns.iter().enumerate() {
            unknown_of[i] = k as u32;
        }
        let node_boundary_values: Vec<f64> = (0..lattice.len())
            .map(|i| {
                if lattice.interior[i] {
                    0.0
                } else {
                    phi.eval(&dom.physical(lattice.point(i)))
                }
            })
            .collect();
        let dir_len: Vec<f64> = stencil
            .directions
            .iter()
            .map(|v| h * (v.iter().map(|c| (c * c) as f64).sum::<f64>()).sqrt())
            .collect();
        let ndir = stencil.directions.len();
        // Per unknown: codes, plus its own boundary entries (merged after the parallel pass).
        let per: Vec<(Vec<u32>, Vec<BoundaryEntry>)> = unknowns
            .par_iter()
            .map(|&node| {
                let y = lattice.point(node);
                let k0 = lattice.multi_index(node);
                let mut codes = Vec::with_capacity(2 * ndir);
                let mut local = Vec::new();
                for (d, v) in stencil.directions.iter().enumerate() {
                    for sign in [1i64, -1] {
                        let k: Vec<i64> = (0..n).map(|i| k0[i] + sign * v[i] as i64).collect();
                        let len = dir_len[d];
                        let e: Vec<f64> = v.iter().map(|c| sign as f64 * *c as f64 * h / len).collect();
                        let (t, _) = dom.exit(y, &e);
                        match lattice.node_at(&k) {
                            Some(j) if lattice.interior[j] => codes.push(unknown_of[j]),
                            Some(j) if t >= len * (1.0 - 1e-9) => {
                                codes.push(BOUNDARY_BIT | local.len() as u32);
                                local.push(BoundaryEntry {
                                    s: 1.0,
                                    value: node_boundary_values[j],
                                });
                            }
                            _ => {
                                let s = (t / len).clamp(1e-12, 1.0);
                                let x: Vec<f64> = (0..n).map(|i| y[i] + s * len * e[i]).collect();
                                codes.push(BOUNDARY_BIT | local.len() as u32);
                                local.push(BoundaryEntry {
                                    s,
                                    value: phi.eval(&dom.physical(&x)),
                                });
                            }
                        }
                    }
                }
                (codes, local)
            })
            .collect();
        let mut neighbours = Vec::with_capacity(unknowns.len() * 2 * ndir);
        let mut boundary = Vec::new();
        for (codes, local) in per {
            let base = boundary.len() as u32;
            for c in codes {
                neighbours.push(if c & BOUNDARY_BIT != 0 {
                    BOUNDARY_BIT | (base + (c & !BOUNDARY_BIT))
                } else {
                    c
                });
            }
            boundary.extend(local);
        }
        if boundary.len() as u32 >= BOUNDARY_BIT {
            return Err(Error::InvalidParams("too many boundary entries".into()));
        }
        let factor = dom.rhs_factor();
        let rhs: Vec<f64> = unknowns
            .par_iter()
            .map(|&node| factor * f.eval(&dom.physical(lattice.point(node))))
            .collect();
        if let Some(bad) = rhs.iter().position(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParams(format!(
                "right-hand side {} is not positive at {:?}",
                rhs[bad],
                dom.physical(lattice.point(unknowns[bad]))
            )));
        }
        Ok(Discretization {
            lattice,
            stencil,
            unknowns,
            unknown_of,
            neighbours,
            boundary,
            node_boundary_values,
            dir_len,
            rhs,
        })
    }

    pub fn ndir(&self) -> usize {
        self.stencil.directions.len()
    }

    pub fn nunknowns(&self) -> usize {
        self.unknowns.len()
    }

    fn decode(&self, code: u32) -> (Neighbour, f64) {
        if code & BOUNDARY_BIT != 0 {
            let b = self.boundary[(code & !BOUNDARY_BIT) as usize];
            (Neighbour::Fixed(b.value), b.s)
        } else {
            (Neighbour::Unknown(code as usize), 1.0)
        }
    }

    /// Neighbour and step fraction on the `+` and `−` side of direction `d` at unknown `k`.
    pub fn pair(&self, k: usize, d: usize) -> [(Neighbour, f64); 2] {
        let base = (k * self.ndir() + d) * 2;
        [
            self.decode(self.neighbours[base]),
            self.decode(self.neighbours[base + 1]),
        ]
    }

    /// Second difference along direction `d` at unknown `k` and its weights `(w₊, w₋)`; the
    /// centre weight is `−(w₊ + w₋)`.
    pub fn second_difference(&self, u: &[f64], k: usize, d: usize) -> (f64, [(Neighbour, f64); 2]) {
        let l = self.dir_len[d];
        let [(p, sp), (m, sm)] = self.pair(k, d);
        let wp = 2.0 / (l * l * sp * (sp + sm));
        let wm = 2.0 / (l * l * sm * (sp + sm));
        let val = |nb: Neighbour| match nb {
            Neighbour::Unknown(j) => u[j],
            Neighbour::Fixed(v) => v,
        };
        let u0 = u[k];
        (wp * (val(p) - u0) + wm * (val(m) - u0), [(p, wp), (m, wm)])
    }

    /// Operator value and active frame at unknown `k`.
    pub fn operator_at(&self, u: &[f64], k: usize) -> (f64, usize) {
        let mut best = (f64::INFINITY, 0);
        let mut d = [0.0; 3];
        for (fi, frame) in self.stencil.frames.iter().enumerate() {
            for (j, &dir) in frame.iter().enumerate() {
                d[j] = self.second_difference(u, k, dir).0;
            }
            let (v, _) = frame_value(&d[..frame.len()]);
            if v < best.0 {
                best = (v, fi);
            }
        }
        best
    }

    /// `MA_h(u) − f` and the active frames.
    pub fn residual(&self, u: &[f64]) -> (Vec<f64>, Vec<usize>) {
        (0..self.nunknowns())
            .into_par_iter()
            .map(|k| {
                let (v, fr) = self.operator_at(u, k);
                (v - self.rhs[k], fr)
            })
            .unzip()
    }

    /// Jacobian rows of the residual for the given active frames, as triplets.
    pub fn jacobian(&self, u: &[f64], frames: &[usize]) -> Vec<(usize, usize, f64)> {
        let rows: Vec<Vec<(usize, usize, f64)>> = (0..self.nunknowns())
            .into_par_iter()
            .map(|k| {
                let frame = &self.stencil.frames[frames[k]];
                let mut dv = [0.0; 3];
                let mut parts = Vec::with_capacity(frame.len());
                for (j, &dir) in frame.iter().enumerate() {
                    let (v, w) = self.second_difference(u, k, dir);
                    dv[j] = v;
                    parts.push(w);
                }
                let (_, g) = frame_value(&dv[..frame.len()]);
                let mut row = Vec::with_capacity(1 + 2 * frame.len());
                let mut diag = 0.0;
                for (j, w) in parts.iter().enumerate() {
                    for &(nb, wt) in w {
                        diag -= g[j] * wt;
                        if let Neighbour::Unknown(i) = nb {
                            row.push((k, i, g[j] * wt));
                        }
                    }
                }
                row.push((k, k, diag));
                row
            })
            .collect();
        rows.into_iter().flatten().collect()
    }

    /// Sum of axis second differences minus `target`, linear in `u`.
    pub fn laplacian_rows(&self) -> (Vec<(usize, usize, f64)>, Vec<f64>) {
        let axes = self.stencil.axis_directions();
        let zero = vec![0.0; self.nunknowns()];
        let mut trip = Vec::new();
        let mut constant = vec![0.0; self.nunknowns()];
        for k in 0..self.nunknowns() {
            let mut diag = 0.0;
            for &d in &axes {
                let (v, w) = self.second_difference(&zero, k, d);
                constant[k] += v;
                for (nb, wt) in w {
                    diag -= wt;
                    if let Neighbour::Unknown(i) = nb {
                        trip.push((k, i, wt));
                    }
                }
            }
            trip.push((k, k, diag));
        }
        (trip, constant)
    }

    /// Smallest second difference over all directions at each unknown.
    pub fn min_second_differences(&self, u: &[f64]) -> Vec<f64> {
        (0..self.nunknowns())
            .into_par_iter()
            .map(|k| {
                (0..self.ndir())
                    .map(|d| self.second_difference(u, k, d).0)
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Nodal values for every lattice node: unknowns from `u`, boundary nodes from the data.
    pub fn node_values(&self, u: &[f64]) -> Vec<f64> {
        (0..self.lattice.len())
            .map(|i| {
                let k = self.unknown_of[i];
                if k == u32::MAX {
                    self.node_boundary_values[i]
                } else {
                    u[k as usize]
                }
            })
            .collect()
    }
}

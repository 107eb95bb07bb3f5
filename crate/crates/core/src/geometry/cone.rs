use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::polytope::Polytope;
use crate::error::{Error, Result};
use crate::linalg;

/// Polyhedral cone `{x : ν_i·(x − apex) ≥ 0}` with its lineality split.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TangentCone {
    pub apex: DVector<f64>,
    pub inward_normals: Vec<DVector<f64>>,
    /// Extreme rays; present only when the cone is pointed.
    pub generators: Option<Vec<DVector<f64>>>,
    /// Orthonormal basis of the lineality space.
    pub lineality: Vec<DVector<f64>>,
    /// Extreme rays of the pointed factor living in the orthogonal complement of the lineality.
    pub pointed_rays: Vec<DVector<f64>>,
    /// Index pairs into `inward_normals` of facets sharing a codimension-two face.
    pub adjacent_pairs: Vec<(usize, usize)>,
}

impl TangentCone {
    pub fn dim(&self) -> usize {
        self.apex.len()
    }

    /// Dimension of the pointed factor.
    pub fn pointed_dim(&self) -> usize {
        self.dim() - self.lineality.len()
    }

    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        let d = x - &self.apex;
        self.inward_normals.iter().all(|nu| nu.dot(&d) >= -tol)
    }

    /// Builds a cone from inward normals (normalized here); normals that do not carve a facet are dropped.
    pub fn from_normals(apex: DVector<f64>, normals: &[DVector<f64>], tol: f64) -> Result<Self> {
        let n = apex.len();
        let mut unit: Vec<DVector<f64>> = Vec::new();
        for v in normals {
            if v.len() != n {
                return Err(Error::InconsistentInput("normal dimension mismatch".into()));
            }
            let u = v.normalize();
            if !unit.iter().any(|w| (w - &u).amax() < 1e-12) {
                unit.push(u);
            }
        }
        if unit.is_empty() {
            return Err(Error::DegenerateCone);
        }
        let nm = DMatrix::from_fn(unit.len(), n, |r, c| unit[r][c]);
        let lineality = linalg::null_space(&nm, 1e-10);

        // Truncate by the box [-1,1]^n; facets of the cone are the facets of Q through the origin.
        let mut hs: Vec<(DVector<f64>, f64)> = unit.iter().map(|u| (u.clone(), 0.0)).collect();
        for i in 0..n {
            hs.push((linalg::unit(n, i), -1.0));
            hs.push((-linalg::unit(n, i), -1.0));
        }
        let q = Polytope::from_halfspaces(&hs, tol).map_err(|e| match e {
            Error::DegenerateInput(_) | Error::InconsistentInput(_) => Error::DegenerateCone,
            other => other,
        })?;
        let mut facet_of_normal: Vec<Option<usize>> = vec![None; unit.len()];
        for (j, f) in q.facets.iter().enumerate() {
            if f.offset.abs() > 1e-9 {
                continue;
            }
            for (k, u) in unit.iter().enumerate() {
                if (u - &f.normal).amax() < 1e-7 {
                    facet_of_normal[k] = Some(j);
                }
            }
        }
        let kept: Vec<usize> = (0..unit.len()).filter(|&k| facet_of_normal[k].is_some()).collect();
        let inward_normals: Vec<DVector<f64>> = kept.iter().map(|&k| unit[k].clone()).collect();
        let q_pairs = q.adjacent_facet_pairs();
        let mut adjacent_pairs = Vec::new();
        for a in 0..kept.len() {
            for b in (a + 1)..kept.len() {
                let fa = facet_of_normal[kept[a]].unwrap();
                let fb = facet_of_normal[kept[b]].unwrap();
                let key = (fa.min(fb), fa.max(fb));
                if q_pairs.binary_search(&key).is_ok() {
                    adjacent_pairs.push((a, b));
                }
            }
        }

        let pointed_rays = pointed_rays(&inward_normals, &lineality, tol)?;
        let generators = lineality.is_empty().then(|| pointed_rays.clone());
        Ok(TangentCone {
            apex,
            inward_normals,
            generators,
            lineality,
            pointed_rays,
            adjacent_pairs,
        })
    }

    /// Planar sector `V_μ × ℝ^{n−2}` of opening `μπ` in the (x1, x2) plane, apex at the origin.
    pub fn v_mu(mu: f64, n: usize) -> Result<Self> {
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::MuOutOfRange(mu));
        }
        let a = mu * std::f64::consts::PI;
        let mut n1 = DVector::zeros(n);
        n1[1] = 1.0;
        let mut n2 = DVector::zeros(n);
        n2[0] = a.sin();
        n2[1] = -a.cos();
        TangentCone::from_normals(DVector::zeros(n), &[n1, n2], 1e-9)
    }

    /// `(ℝ₊)^k × ℝ^{n−k}`.
    pub fn orthant(k: usize, n: usize) -> Result<Self> {
        let normals: Vec<DVector<f64>> = (0..k).map(|i| linalg::unit(n, i)).collect();
        TangentCone::from_normals(DVector::zeros(n), &normals, 1e-9)
    }

    /// Image of the cone under the linear map `x ↦ m (x − apex) + new_apex`.
    pub fn transformed(&self, m: &DMatrix<f64>, new_apex: DVector<f64>, tol: f64) -> Result<Self> {
        let m_inv_t = m
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InconsistentInput("singular map".into()))?
            .transpose();
        let normals: Vec<DVector<f64>> = self.inward_normals.iter().map(|nu| &m_inv_t * nu).collect();
        TangentCone::from_normals(new_apex, &normals, tol)
    }
}

fn pointed_rays(normals: &[DVector<f64>], lineality: &[DVector<f64>], tol: f64) -> Result<Vec<DVector<f64>>> {
    let n = normals[0].len();
    let k = n - lineality.len();
    // Orthonormal basis W of the lineality's complement.
    let w_basis: Vec<DVector<f64>> = if lineality.is_empty() {
        (0..n).map(|i| linalg::unit(n, i)).collect()
    } else {
        let lm = DMatrix::from_fn(lineality.len(), n, |r, c| lineality[r][c]);
        linalg::null_space(&lm, 1e-10)
    };
    if k == 1 {
        return Ok(vec![w_basis[0].clone() * w_basis[0].dot(&normals[0]).signum()]);
    }
    let local: Vec<(DVector<f64>, f64)> = normals
        .iter()
        .map(|nu| (DVector::from_iterator(k, w_basis.iter().map(|w| w.dot(nu))), 0.0))
        .collect();
    let mut hs = local;
    for i in 0..k {
        hs.push((linalg::unit(k, i), -1.0));
        hs.push((-linalg::unit(k, i), -1.0));
    }
    let q = Polytope::from_halfspaces(&hs, tol)?;
    let origin = q
        .vertices
        .iter()
        .position(|v| v.amax() < 1e-9)
        .ok_or(Error::DegenerateCone)?;
    let mut rays = Vec::new();
    for e in &q.faces[1] {
        if !e.vertex_ids.contains(&origin) {
            continue;
        }
        let other = e.vertex_ids.iter().find(|&&i| i != origin).copied().unwrap();
        let local_dir = q.vertices[other].normalize();
        let mut amb = DVector::zeros(n);
        for (c, w) in w_basis.iter().enumerate() {
            amb += w * local_dir[c];
        }
        rays.push(amb);
    }
    Ok(rays)
}

impl Polytope {
    /// Tangent cone at a boundary point: generated by `P − x0`, facets are the facets of `P` through `x0`.
    pub fn tangent_cone(&self, x0: &DVector<f64>) -> Result<TangentCone> {
        let tol = self.tol * self.diameter().max(1.0);
        if x0.len() != self.dim || self.facets.iter().any(|f| f.slack(x0) < -tol) {
            return Err(Error::PointNotOnBoundary(x0.iter().copied().collect()));
        }
        let active = self.active_facets(x0, tol);
        if active.is_empty() {
            return Err(Error::PointNotOnBoundary(x0.iter().copied().collect()));
        }
        let normals: Vec<DVector<f64>> = active.iter().map(|&j| self.facets[j].normal.clone()).collect();
        TangentCone::from_normals(x0.clone(), &normals, self.tol)
    }
}

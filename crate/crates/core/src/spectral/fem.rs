use faer::prelude::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;
use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use super::mesh::SphereMesh;
use crate::error::{Error, Result};

// Degree-5 seven-point rule on the reference triangle (barycentric, weight).
const QUAD: [([f64; 3], f64); 7] = [
    ([1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0], 0.225),
    (
        [0.059_715_871_789_770, 0.470_142_064_105_115, 0.470_142_064_105_115],
        0.132_394_152_788_506,
    ),
    (
        [0.470_142_064_105_115, 0.059_715_871_789_770, 0.470_142_064_105_115],
        0.132_394_152_788_506,
    ),
    (
        [0.470_142_064_105_115, 0.470_142_064_105_115, 0.059_715_871_789_770],
        0.132_394_152_788_506,
    ),
    (
        [0.797_426_985_353_087, 0.101_286_507_323_456, 0.101_286_507_323_456],
        0.125_939_180_544_827,
    ),
    (
        [0.101_286_507_323_456, 0.797_426_985_353_087, 0.101_286_507_323_456],
        0.125_939_180_544_827,
    ),
    (
        [0.101_286_507_323_456, 0.101_286_507_323_456, 0.797_426_985_353_087],
        0.125_939_180_544_827,
    ),
];

/// Element stiffness and mass for P1 functions lifted radially from a flat triangle to the sphere.
fn element(p: [Vector3<f64>; 3]) -> (Matrix3<f64>, Matrix3<f64>) {
    let cross = (p[1] - p[0]).cross(&(p[2] - p[0]));
    let area = 0.5 * cross.norm();
    let nh = cross / (2.0 * area);
    let grads: [Vector3<f64>; 3] = [
        nh.cross(&(p[2] - p[1])) / (2.0 * area),
        nh.cross(&(p[0] - p[2])) / (2.0 * area),
        nh.cross(&(p[1] - p[0])) / (2.0 * area),
    ];
    let mut k = Matrix3::zeros();
    let mut m = Matrix3::zeros();
    for (bary, w) in QUAD.iter() {
        let y = p[0] * bary[0] + p[1] * bary[1] + p[2] * bary[2];
        let ry = y.norm();
        let x = y / ry;
        let xn = x.dot(&nh);
        let ds = w * area * y.dot(&nh) / (ry * ry * ry);
        let sg: Vec<Vector3<f64>> = grads
            .iter()
            .map(|g| {
                let v = (g - nh * (g.dot(&x) / xn)) * ry;
                v - x * x.dot(&v)
            })
            .collect();
        for i in 0..3 {
            for j in 0..3 {
                k[(i, j)] += ds * sg[i].dot(&sg[j]);
                m[(i, j)] += ds * bary[i] * bary[j];
            }
        }
    }
    (k, m)
}

pub struct Assembled {
    pub dof_of_node: Vec<Option<usize>>,
    pub ndof: usize,
    pub k: SparseColMat<usize, f64>,
    pub m: SparseColMat<usize, f64>,
}

pub fn assemble(mesh: &SphereMesh) -> Result<Assembled> {
    let mut dof_of_node = vec![None; mesh.nodes.len()];
    let mut ndof = 0;
    for (i, b) in mesh.on_boundary.iter().enumerate() {
        if !b {
            dof_of_node[i] = Some(ndof);
            ndof += 1;
        }
    }
    if ndof == 0 {
        return Err(Error::MeshFailure("mesh has no interior nodes".into()));
    }
    let locals: Vec<(Matrix3<f64>, Matrix3<f64>)> = mesh
        .triangles
        .par_iter()
        .map(|t| element([mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]]))
        .collect();
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for (t, (ke, me)) in mesh.triangles.iter().zip(&locals) {
        for a in 0..3 {
            let Some(i) = dof_of_node[t[a]] else { continue };
            for b in 0..3 {
                let Some(j) = dof_of_node[t[b]] else { continue };
                kt.push(Triplet::new(i, j, ke[(a, b)]));
                mt.push(Triplet::new(i, j, me[(a, b)]));
            }
        }
    }
    let k = SparseColMat::try_new_from_triplets(ndof, ndof, &kt).map_err(|e| Error::MeshFailure(format!("{e:?}")))?;
    let m = SparseColMat::try_new_from_triplets(ndof, ndof, &mt).map_err(|e| Error::MeshFailure(format!("{e:?}")))?;
    Ok(Assembled {
        dof_of_node,
        ndof,
        k,
        m,
    })
}

fn spmv(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; a.nrows()];
    let sym = a.symbolic();
    let cp = sym.col_ptr();
    let ri = sym.row_idx();
    let vals = a.val();
    for j in 0..a.ncols() {
        for p in cp[j]..cp[j + 1] {
            y[ri[p]] += vals[p] * x[j];
        }
    }
    y
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub iterations: usize,
}

/// Smallest `count` generalized eigenpairs of `K u = λ M u` by inverse iteration with M-orthogonal deflation.
pub fn smallest_eigenpairs(sys: &Assembled, count: usize, max_iter: usize, tol: f64) -> Result<EigenPairs> {
    let lu = sys
        .k
        .sp_lu()
        .map_err(|e| Error::MeshFailure(format!("stiffness factorization failed: {e:?}")))?;
    let n = sys.ndof;
    let mut values = Vec::new();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut total = 0;
    for which in 0..count {
        let mut u: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + which * 13) % 11) as f64).collect();
        let mut lambda = f64::INFINITY;
        let mut converged = false;
        for _ in 0..max_iter {
            total += 1;
            // M-orthogonalize against earlier eigenvectors.
            for v in &vectors {
                let mv = spmv(&sys.m, v);
                let c = dot(&u, &mv);
                for (ui, vi) in u.iter_mut().zip(v) {
                    *ui -= c * vi;
                }
            }
            let mu = spmv(&sys.m, &u);
            let rhs = Mat::from_fn(n, 1, |i, _| mu[i]);
            let sol = lu.solve(&rhs);
            let mut w: Vec<f64> = (0..n).map(|i| sol[(i, 0)]).collect();
            for v in &vectors {
                let mv = spmv(&sys.m, v);
                let c = dot(&w, &mv);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
            let mw = spmv(&sys.m, &w);
            let norm = dot(&w, &mw).sqrt();
            if !(norm > 0.0 && norm.is_finite()) {
                return Err(Error::NonConvergedEigenSolve(total));
            }
            for wi in w.iter_mut() {
                *wi /= norm;
            }
            let kw = spmv(&sys.k, &w);
            let new_lambda = dot(&w, &kw);
            let done = (new_lambda - lambda).abs() <= tol * new_lambda.abs();
            lambda = new_lambda;
            u = w;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergedEigenSolve(max_iter));
        }
        if which == 0 && u.iter().sum::<f64>() < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
        values.push(lambda);
        vectors.push(u);
    }
    Ok(EigenPairs {
        values,
        vectors,
        iterations: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lifted_mass_integrates_sphere_area() {
        let cone = crate::geometry::TangentCone::orthant(3, 3).unwrap();
        let (mut mesh, normals) = super::super::mesh::coarse_mesh(&cone).unwrap();
        for _ in 0..3 {
            mesh = mesh.refine(&normals);
        }
        let mut total = 0.0;
        for t in &mesh.triangles {
            let (k, m) = element([mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]]);
            total += m.iter().sum::<f64>();
            for i in 0..3 {
                assert!(k.row(i).sum().abs() < 1e-10);
            }
        }
        assert!((total - std::f64::consts::FRAC_PI_2).abs() < 1e-6, "{total}");
    }
}

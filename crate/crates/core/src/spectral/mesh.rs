use std::collections::HashMap;

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};
use crate::geometry::TangentCone;

/// Triangulation of a spherical polygon whose flat triangles project radially onto the sphere.
#[derive(Debug, Clone)]
pub struct SphereMesh {
    pub nodes: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    pub on_boundary: Vec<bool>,
}

impl SphereMesh {
    /// Longest chord among triangle edges.
    pub fn max_edge(&self) -> f64 {
        self.triangles
            .iter()
            .flat_map(|t| (0..3).map(move |k| (self.nodes[t[k]] - self.nodes[t[(k + 1) % 3]]).norm()))
            .fold(0.0, f64::max)
    }

    pub fn interior_count(&self) -> usize {
        self.on_boundary.iter().filter(|b| !**b).count()
    }

    /// One level of 4-way subdivision with edge midpoints pushed back onto the sphere.
    pub fn refine(&self, normals: &[Vector3<f64>]) -> SphereMesh {
        let mut nodes = self.nodes.clone();
        let mut on_boundary = self.on_boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        let mut midpoint = |a: usize, b: usize, nodes: &mut Vec<Vector3<f64>>, ob: &mut Vec<bool>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let m = (nodes[a] + nodes[b]).normalize();
                nodes.push(m);
                // A midpoint is on the boundary only if both ends lie on the same facet circle.
                let bd = normals
                    .iter()
                    .any(|nu| nu.dot(&nodes[a]).abs() < 1e-10 && nu.dot(&nodes[b]).abs() < 1e-10);
                ob.push(bd);
                nodes.len() - 1
            })
        };
        for t in &self.triangles {
            let m01 = midpoint(t[0], t[1], &mut nodes, &mut on_boundary);
            let m12 = midpoint(t[1], t[2], &mut nodes, &mut on_boundary);
            let m20 = midpoint(t[2], t[0], &mut nodes, &mut on_boundary);
            triangles.push([t[0], m01, m20]);
            triangles.push([m01, t[1], m12]);
            triangles.push([m20, m12, t[2]]);
            triangles.push([m01, m12, m20]);
        }
        SphereMesh {
            nodes,
            triangles,
            on_boundary,
        }
    }
}

fn v3(v: &DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Coarse fan triangulation of `V ∩ 𝕊²` for a convex cone in ℝ³.
pub fn coarse_mesh(cone: &TangentCone) -> Result<(SphereMesh, Vec<Vector3<f64>>)> {
    if cone.dim() != 3 {
        return Err(Error::MeshFailure("spherical meshes need a cone in R^3".into()));
    }
    let normals: Vec<Vector3<f64>> = cone.inward_normals.iter().map(v3).collect();
    // Boundary polygon in cyclic order, plus a fan centre.
    let (ring, center): (Vec<Vector3<f64>>, Vector3<f64>) = match cone.lineality.len() {
        0 => {
            let rays: Vec<Vector3<f64>> = cone.pointed_rays.iter().map(|r| v3(r).normalize()).collect();
            if rays.len() < 3 {
                return Err(Error::MeshFailure("pointed cone with fewer than 3 rays".into()));
            }
            let c = rays.iter().sum::<Vector3<f64>>().normalize();
            (order_around(&rays, &c), c)
        }
        1 => {
            let l = v3(&cone.lineality[0]).normalize();
            if cone.pointed_rays.len() != 2 {
                return Err(Error::MeshFailure("lune needs two pointed rays".into()));
            }
            let g1 = v3(&cone.pointed_rays[0]).normalize();
            let g2 = v3(&cone.pointed_rays[1]).normalize();
            let c = (g1 + g2).normalize();
            (vec![l, g1, -l, g2], c)
        }
        2 => {
            let nu = normals[0];
            let a = v3(&cone.lineality[0]).normalize();
            let b = nu.cross(&a).normalize();
            (vec![a, b, -a, -b], nu)
        }
        _ => return Err(Error::MeshFailure("cone has no facets".into())),
    };
    if normals.iter().any(|nu| nu.dot(&center) <= 1e-9) {
        return Err(Error::MeshFailure("fan centre is not interior".into()));
    }
    let mut nodes = vec![center];
    nodes.extend(ring.iter().copied());
    let m = ring.len();
    let triangles: Vec<[usize; 3]> = (0..m).map(|i| [0, 1 + i, 1 + (i + 1) % m]).collect();
    let on_boundary: Vec<bool> = nodes
        .iter()
        .map(|x| normals.iter().any(|nu| nu.dot(x).abs() < 1e-10))
        .collect();
    let mut mesh = SphereMesh {
        nodes,
        triangles,
        on_boundary,
    };
    orient_outward(&mut mesh);
    Ok((mesh, normals))
}

fn order_around(points: &[Vector3<f64>], c: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let seed = points[0] - c * c.dot(&points[0]);
    let e1 = seed.normalize();
    let e2 = c.cross(&e1);
    let mut tagged: Vec<(f64, Vector3<f64>)> = points.iter().map(|p| (p.dot(&e2).atan2(p.dot(&e1)), *p)).collect();
    tagged.sort_by(|a, b| a.0.total_cmp(&b.0));
    tagged.into_iter().map(|t| t.1).collect()
}

fn orient_outward(mesh: &mut SphereMesh) {
    for t in mesh.triangles.iter_mut() {
        let (a, b, c) = (mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
        if (b - a).cross(&(c - a)).dot(&(a + b + c)) < 0.0 {
            t.swap(1, 2);
        }
    }
}

/// Refines the coarse mesh until the longest chord is at most `h`; returns the mesh and its level.
pub fn mesh_for_size(cone: &TangentCone, h: f64, max_level: usize) -> Result<(SphereMesh, Vec<Vector3<f64>>, usize)> {
    if !(h > 0.0) {
        return Err(Error::MeshFailure(format!("mesh size {h} must be positive")));
    }
    let (mut mesh, normals) = coarse_mesh(cone)?;
    let mut level = 0;
    while mesh.max_edge() > h {
        if level >= max_level {
            return Err(Error::MeshFailure(format!(
                "mesh size {h} needs more than {max_level} levels"
            )));
        }
        mesh = mesh.refine(&normals);
        level += 1;
    }
    Ok((mesh, normals, level))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit3(i: usize) -> DVector<f64> {
        crate::linalg::unit(3, i)
    }

    #[test]
    fn octant_mesh_area() {
        let cone = TangentCone::orthant(3, 3).unwrap();
        let (mut mesh, normals) = coarse_mesh(&cone).unwrap();
        for _ in 0..4 {
            mesh = mesh.refine(&normals);
        }
        // Flat area approaches π/2 from below.
        let area: f64 = mesh
            .triangles
            .iter()
            .map(|t| {
                let (a, b, c) = (mesh.nodes[t[0]], mesh.nodes[t[1]], mesh.nodes[t[2]]);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum();
        assert!(area < std::f64::consts::FRAC_PI_2 && area > 0.99 * std::f64::consts::FRAC_PI_2);
        assert!(mesh.nodes.iter().all(|x| x.iter().all(|c| *c >= -1e-12)));
        let bnd = mesh.on_boundary.iter().filter(|b| **b).count();
        assert_eq!(bnd, 3 * 16);
    }

    #[test]
    fn lune_and_halfspace_meshes() {
        let lune = TangentCone::orthant(2, 3).unwrap();
        let (m, _) = coarse_mesh(&lune).unwrap();
        assert_eq!(m.triangles.len(), 4);
        let half = TangentCone::from_normals(DVector::zeros(3), &[unit3(2)], 1e-9).unwrap();
        let (m, _) = coarse_mesh(&half).unwrap();
        assert_eq!(m.triangles.len(), 4);
        assert_eq!(m.interior_count(), 1);
    }
}

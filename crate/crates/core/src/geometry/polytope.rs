use std::collections::{BTreeSet, HashMap};

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub const DEFAULT_TOL: f64 = 1e-9;

/// Half-space `{x : normal · x ≥ offset}` with a unit inward normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Facet {
    pub normal: DVector<f64>,
    pub offset: f64,
    pub vertex_ids: Vec<usize>,
}

impl Facet {
    pub fn slack(&self, x: &DVector<f64>) -> f64 {
        self.normal.dot(x) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Face {
    pub dim: usize,
    pub vertex_ids: Vec<usize>,
    pub containing_facet_ids: Vec<usize>,
}

/// Bounded full-dimensional convex polytope with both representations and its face lattice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Polytope {
    pub dim: usize,
    pub vertices: Vec<DVector<f64>>,
    pub facets: Vec<Facet>,
    /// `faces[k]` holds the k-faces, `k = 0..dim-1`.
    pub faces: Vec<Vec<Face>>,
    pub tol: f64,
}

/// Input description accepted by [`build_polytope`].
#[derive(Debug, Clone)]
pub enum PolytopeSpec {
    Vertices(Vec<DVector<f64>>),
    Halfspaces(Vec<(DVector<f64>, f64)>),
}

pub fn build_polytope(spec: &PolytopeSpec, tol: f64) -> Result<Polytope> {
    match spec {
        PolytopeSpec::Vertices(v) => Polytope::from_vertices(v, tol),
        PolytopeSpec::Halfspaces(h) => Polytope::from_halfspaces(h, tol),
    }
}

fn check_dims(points: &[DVector<f64>]) -> Result<usize> {
    let n = points
        .first()
        .map(|p| p.len())
        .ok_or_else(|| Error::DegenerateInput("no points".into()))?;
    if n < 2 {
        return Err(Error::InconsistentInput("dimension must be at least 2".into()));
    }
    if points.iter().any(|p| p.len() != n) {
        return Err(Error::InconsistentInput("mixed point dimensions".into()));
    }
    if points.iter().any(|p| p.iter().any(|c| !c.is_finite())) {
        return Err(Error::InconsistentInput("non-finite coordinate".into()));
    }
    Ok(n)
}

impl Polytope {
    /// Convex hull of a finite point set by brute-force supporting-hyperplane search.
    pub fn from_vertices(points: &[DVector<f64>], tol: f64) -> Result<Self> {
        let n = check_dims(points)?;
        let refs: Vec<&DVector<f64>> = points.iter().collect();
        if linalg::affine_dim(&refs, tol) != Some(n) {
            return Err(Error::DegenerateInput(format!("points span fewer than {n} dimensions")));
        }
        let scale = points.iter().map(|p| p.amax()).fold(1.0, f64::max);
        let ptol = tol * scale;

        let mut planes: HashMap<Vec<usize>, (DVector<f64>, f64)> = HashMap::new();
        for combo in (0..points.len()).combinations(n) {
            let base = &points[combo[0]];
            let mut m = DMatrix::zeros(n - 1, n);
            for (r, &i) in combo[1..].iter().enumerate() {
                m.row_mut(r).copy_from(&(&points[i] - base).transpose());
            }
            if linalg::rank(&m, tol) != n - 1 {
                continue;
            }
            let ns = linalg::null_space(&m, tol);
            let Some(mut nu) = ns.into_iter().next() else {
                continue;
            };
            nu.normalize_mut();
            let mut b = nu.dot(base);
            let sides: Vec<f64> = points.iter().map(|p| nu.dot(p) - b).collect();
            let lo = sides.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = sides.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            if lo < -ptol && hi > ptol {
                continue;
            }
            if hi <= ptol {
                nu = -nu;
                b = -b;
            }
            let on: Vec<usize> = (0..points.len())
                .filter(|&i| (nu.dot(&points[i]) - b).abs() <= ptol)
                .collect();
            planes.entry(on).or_insert((nu, b));
        }

        // Keep only extreme points: those where the active normals have full rank.
        let mut keys: Vec<Vec<usize>> = planes.keys().cloned().collect();
        keys.sort();
        let mut extreme = Vec::new();
        for i in 0..points.len() {
            let active: Vec<&DVector<f64>> = keys.iter().filter(|k| k.contains(&i)).map(|k| &planes[k].0).collect();
            if active.len() < n {
                continue;
            }
            let m = DMatrix::from_fn(active.len(), n, |r, c| active[r][c]);
            if linalg::rank(&m, 1e-7) == n {
                extreme.push(i);
            }
        }
        // Duplicate input points collapse onto the first copy.
        let mut uniq: Vec<usize> = Vec::new();
        for &i in &extreme {
            if !uniq.iter().any(|&j| (&points[i] - &points[j]).amax() <= ptol) {
                uniq.push(i);
            }
        }
        let remap: HashMap<usize, usize> = uniq.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let vertices: Vec<DVector<f64>> = uniq.iter().map(|&i| points[i].clone()).collect();

        let mut facets: Vec<Facet> = keys
            .iter()
            .map(|k| {
                let (nu, b) = &planes[k];
                let mut ids: Vec<usize> = k.iter().filter_map(|i| remap.get(i).copied()).collect();
                ids.sort_unstable();
                Facet {
                    normal: nu.clone(),
                    offset: *b,
                    vertex_ids: ids,
                }
            })
            .collect();
        facets.sort_by(|a, b| a.vertex_ids.cmp(&b.vertex_ids));
        facets.dedup_by(|a, b| a.vertex_ids == b.vertex_ids);

        let mut poly = Polytope {
            dim: n,
            vertices,
            facets,
            faces: Vec::new(),
            tol,
        };
        poly.faces = poly.build_lattice();
        poly.validate()?;
        Ok(poly)
    }

    /// Intersection of half-spaces `normal · x ≥ offset`; redundant constraints are dropped.
    pub fn from_halfspaces(hs: &[(DVector<f64>, f64)], tol: f64) -> Result<Self> {
        let normals: Vec<DVector<f64>> = hs.iter().map(|(v, _)| v.clone()).collect();
        let n = check_dims(&normals).map_err(|e| match e {
            Error::DegenerateInput(_) => Error::UnboundedInput,
            other => other,
        })?;
        let mut cons = Vec::with_capacity(hs.len());
        for (v, b) in hs {
            let norm = v.norm();
            if norm <= tol || !b.is_finite() {
                return Err(Error::InconsistentInput("zero or non-finite constraint".into()));
            }
            cons.push((v / norm, b / norm));
        }
        let nmat = DMatrix::from_fn(cons.len(), n, |r, c| cons[r].0[c]);
        if linalg::rank(&nmat, tol) < n || has_recession_ray(&cons, n, tol) {
            return Err(Error::UnboundedInput);
        }

        let mut pts: Vec<DVector<f64>> = Vec::new();
        for combo in (0..cons.len()).combinations(n) {
            let a = DMatrix::from_fn(n, n, |r, c| cons[combo[r]].0[c]);
            let rhs = DVector::from_iterator(n, combo.iter().map(|&i| cons[i].1));
            let Some(x) = a.clone().lu().solve(&rhs) else {
                continue;
            };
            if linalg::rank(&a, 1e-10) < n {
                continue;
            }
            let scale = x.amax().max(1.0);
            if cons.iter().all(|(v, b)| v.dot(&x) - b >= -tol * scale)
                && !pts.iter().any(|p| (p - &x).amax() <= tol * scale)
            {
                pts.push(x);
            }
        }
        if pts.is_empty() {
            return Err(Error::InconsistentInput("half-spaces have empty intersection".into()));
        }
        Polytope::from_vertices(&pts, tol)
    }

    fn build_lattice(&self) -> Vec<Vec<Face>> {
        let n = self.dim;
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut queue: Vec<Vec<usize>> = Vec::new();
        for f in &self.facets {
            if seen.insert(f.vertex_ids.clone()) {
                queue.push(f.vertex_ids.clone());
            }
        }
        while let Some(set) = queue.pop() {
            for f in &self.facets {
                let inter: Vec<usize> = set
                    .iter()
                    .filter(|i| f.vertex_ids.binary_search(i).is_ok())
                    .copied()
                    .collect();
                if !inter.is_empty() && seen.insert(inter.clone()) {
                    queue.push(inter);
                }
            }
        }
        let mut faces: Vec<Vec<Face>> = vec![Vec::new(); n];
        for set in seen {
            let pts: Vec<&DVector<f64>> = set.iter().map(|&i| &self.vertices[i]).collect();
            let d = linalg::affine_dim(&pts, self.tol).unwrap_or(0);
            if d >= n {
                continue;
            }
            let containing: Vec<usize> = self
                .facets
                .iter()
                .enumerate()
                .filter(|(_, f)| set.iter().all(|i| f.vertex_ids.binary_search(i).is_ok()))
                .map(|(j, _)| j)
                .collect();
            faces[d].push(Face {
                dim: d,
                vertex_ids: set,
                containing_facet_ids: containing,
            });
        }
        faces
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for (j, f) in self.facets.iter().enumerate() {
            let pts: Vec<&DVector<f64>> = f.vertex_ids.iter().map(|&i| &self.vertices[i]).collect();
            if linalg::affine_dim(&pts, self.tol) != Some(n - 1) {
                return Err(Error::InconsistentInput(format!(
                    "facet {j} is not supported by {n} affinely independent vertices"
                )));
            }
        }
        if self.faces[0].len() != self.vertices.len() {
            return Err(Error::InconsistentInput(
                "vertex count does not match the 0-faces of the lattice".into(),
            ));
        }
        for r in &self.faces[n - 2] {
            if r.containing_facet_ids.len() != 2 {
                return Err(Error::InconsistentInput(format!(
                    "(n-2)-face {:?} lies on {} facets",
                    r.vertex_ids,
                    r.containing_facet_ids.len()
                )));
            }
        }
        Ok(())
    }

    pub fn num_faces(&self, k: usize) -> usize {
        self.faces.get(k).map_or(0, |f| f.len())
    }

    /// All faces of dimension at most `k`; `k < 0` gives the empty set.
    pub fn skeleton(&self, k: isize) -> Vec<Face> {
        if k < 0 {
            return Vec::new();
        }
        let top = (k as usize).min(self.dim - 1);
        self.faces[..=top].iter().flatten().cloned().collect()
    }

    /// Facet pairs sharing an (n−2)-face, sorted with `i < j`.
    pub fn adjacent_facet_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<(usize, usize)> = self.faces[self.dim - 2]
            .iter()
            .filter(|r| r.containing_facet_ids.len() == 2)
            .map(|r| (r.containing_facet_ids[0], r.containing_facet_ids[1]))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        self.facets.iter().all(|f| f.slack(x) >= -self.tol)
    }

    /// Facets whose supporting plane passes through `x` (within `tol`).
    pub fn active_facets(&self, x: &DVector<f64>, tol: f64) -> Vec<usize> {
        self.facets
            .iter()
            .enumerate()
            .filter(|(_, f)| f.slack(x).abs() <= tol)
            .map(|(j, _)| j)
            .collect()
    }

    /// Smallest face containing a boundary point, or `None` for interior/exterior points.
    pub fn minimal_face(&self, x: &DVector<f64>) -> Option<Face> {
        if !self.contains(x) {
            return None;
        }
        let active = self.active_facets(x, self.tol);
        if active.is_empty() {
            return None;
        }
        let mut ids: Vec<usize> = self.facets[active[0]].vertex_ids.clone();
        for &j in &active[1..] {
            ids.retain(|i| self.facets[j].vertex_ids.binary_search(i).is_ok());
        }
        self.faces.iter().flatten().find(|f| f.vertex_ids == ids).cloned()
    }

    pub fn on_skeleton(&self, x: &DVector<f64>, k: usize) -> bool {
        self.minimal_face(x).is_some_and(|f| f.dim <= k)
    }

    pub fn is_simple(&self) -> bool {
        (0..self.vertices.len()).all(|i| {
            self.facets
                .iter()
                .filter(|f| f.vertex_ids.binary_search(&i).is_ok())
                .count()
                == self.dim
        })
    }

    pub fn is_simplicial(&self) -> bool {
        self.facets.iter().all(|f| f.vertex_ids.len() == self.dim)
    }

    pub fn halfspaces(&self) -> Vec<(DVector<f64>, f64)> {
        self.facets.iter().map(|f| (f.normal.clone(), f.offset)).collect()
    }

    pub fn centroid(&self) -> DVector<f64> {
        let mut c = DVector::zeros(self.dim);
        for v in &self.vertices {
            c += v;
        }
        c / self.vertices.len() as f64
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        self.vertices
            .iter()
            .tuple_combinations()
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Face lattice as sorted vertex sets, for representation-independent comparison.
    pub fn lattice_signature(&self) -> Vec<Vec<Vec<usize>>> {
        self.faces
            .iter()
            .map(|fs| {
                let mut v: Vec<Vec<usize>> = fs.iter().map(|f| f.vertex_ids.clone()).collect();
                v.sort();
                v
            })
            .collect()
    }

    pub fn unit_cube(n: usize) -> Self {
        let pts: Vec<DVector<f64>> = (0..(1usize << n))
            .map(|m| DVector::from_fn(n, |i, _| ((m >> i) & 1) as f64))
            .collect();
        Polytope::from_vertices(&pts, DEFAULT_TOL).expect("unit cube is valid")
    }

    /// Cross-polytope with vertices ±e_i.
    pub fn cross_polytope(n: usize) -> Self {
        let mut pts = Vec::new();
        for i in 0..n {
            pts.push(linalg::unit(n, i));
            pts.push(-linalg::unit(n, i));
        }
        Polytope::from_vertices(&pts, DEFAULT_TOL).expect("cross-polytope is valid")
    }

    pub fn standard_simplex(n: usize) -> Self {
        let mut pts = vec![DVector::zeros(n)];
        pts.extend((0..n).map(|i| linalg::unit(n, i)));
        Polytope::from_vertices(&pts, DEFAULT_TOL).expect("simplex is valid")
    }

    pub fn axis_box(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let n = lo.len();
        let pts: Vec<DVector<f64>> = (0..(1usize << n))
            .map(|m| DVector::from_fn(n, |i, _| if (m >> i) & 1 == 1 { hi[i] } else { lo[i] }))
            .collect();
        Polytope::from_vertices(&pts, DEFAULT_TOL)
    }
}

/// Whether `{d : ν·d ≥ 0}` contains a nonzero direction (assumes the normals span ℝⁿ).
fn has_recession_ray(cons: &[(DVector<f64>, f64)], n: usize, tol: f64) -> bool {
    for combo in (0..cons.len()).combinations(n - 1) {
        let m = DMatrix::from_fn(n - 1, n, |r, c| cons[combo[r]].0[c]);
        if linalg::rank(&m, 1e-10) != n - 1 {
            continue;
        }
        let Some(d) = linalg::null_space(&m, 1e-10).into_iter().next() else {
            continue;
        };
        for s in [1.0, -1.0] {
            let ds = &d * s;
            if cons.iter().all(|(v, _)| v.dot(&ds) >= -tol) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dvec;

    #[test]
    fn square_counts() {
        let sq = Polytope::unit_cube(2);
        assert_eq!(sq.vertices.len(), 4);
        assert_eq!(sq.facets.len(), 4);
        assert_eq!(sq.num_faces(0), 4);
        assert_eq!(sq.adjacent_facet_pairs().len(), 4);
        assert_eq!(sq.skeleton(0).len(), 4);
    }

    #[test]
    fn cube_counts() {
        let c = Polytope::unit_cube(3);
        assert_eq!(c.vertices.len(), 8);
        assert_eq!(c.num_faces(1), 12);
        assert_eq!(c.facets.len(), 6);
        assert_eq!(c.skeleton(0).len(), 8);
        assert_eq!(c.skeleton(1).len(), 20);
        assert!(c.skeleton(-1).is_empty());
        assert_eq!(c.adjacent_facet_pairs().len(), 12);
        assert!(c.is_simple());
        assert!(!c.is_simplicial());
    }

    #[test]
    fn octahedron_counts() {
        let o = Polytope::cross_polytope(3);
        assert_eq!(o.vertices.len(), 6);
        assert_eq!(o.num_faces(1), 12);
        assert_eq!(o.facets.len(), 8);
        assert_eq!(o.adjacent_facet_pairs().len(), 12);
        assert!(!o.is_simple());
        assert!(o.is_simplicial());
    }

    #[test]
    fn tetrahedron_predicates() {
        let t = Polytope::standard_simplex(3);
        assert!(t.is_simple());
        assert!(t.is_simplicial());
    }

    #[test]
    fn interior_points_are_dropped() {
        let mut pts: Vec<DVector<f64>> = Polytope::unit_cube(2).vertices.clone();
        pts.push(dvec(&[0.5, 0.5]));
        pts.push(dvec(&[0.5, 0.0]));
        let p = Polytope::from_vertices(&pts, DEFAULT_TOL).unwrap();
        assert_eq!(p.vertices.len(), 4);
    }

    #[test]
    fn halfspace_errors() {
        let upper = vec![(dvec(&[0.0, 1.0]), 0.0), (dvec(&[1.0, 0.0]), 0.0)];
        assert_eq!(
            Polytope::from_halfspaces(&upper, DEFAULT_TOL).unwrap_err(),
            Error::UnboundedInput
        );
        let empty = vec![
            (dvec(&[1.0, 0.0]), 1.0),
            (dvec(&[-1.0, 0.0]), 0.0),
            (dvec(&[0.0, 1.0]), 0.0),
            (dvec(&[0.0, -1.0]), -1.0),
        ];
        assert!(matches!(
            Polytope::from_halfspaces(&empty, DEFAULT_TOL),
            Err(Error::InconsistentInput(_))
        ));
        let flat = vec![
            (dvec(&[1.0, 0.0]), 0.0),
            (dvec(&[-1.0, 0.0]), 0.0),
            (dvec(&[0.0, 1.0]), 0.0),
            (dvec(&[0.0, -1.0]), -1.0),
        ];
        assert!(matches!(
            Polytope::from_halfspaces(&flat, DEFAULT_TOL),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn collinear_points_rejected() {
        let pts = vec![dvec(&[0.0, 0.0]), dvec(&[1.0, 1.0]), dvec(&[2.0, 2.0])];
        assert!(matches!(
            Polytope::from_vertices(&pts, DEFAULT_TOL),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn minimal_face_dims() {
        let c = Polytope::unit_cube(3);
        assert_eq!(c.minimal_face(&dvec(&[0.0, 0.0, 0.0])).unwrap().dim, 0);
        assert_eq!(c.minimal_face(&dvec(&[0.5, 0.0, 0.0])).unwrap().dim, 1);
        assert_eq!(c.minimal_face(&dvec(&[0.5, 0.5, 0.0])).unwrap().dim, 2);
        assert!(c.minimal_face(&dvec(&[0.5, 0.5, 0.5])).is_none());
        assert!(c.on_skeleton(&dvec(&[1.0, 0.3, 0.0]), 1));
    }
}

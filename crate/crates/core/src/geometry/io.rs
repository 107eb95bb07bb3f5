use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::polytope::{Polytope, PolytopeSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfspaceEntry {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// On-disk polytope description. At least one representation must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolytopeFile {
    pub dim: usize,
    #[serde(default)]
    pub vertices: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub halfspaces: Option<Vec<HalfspaceEntry>>,
}

impl PolytopeFile {
    pub fn from_polytope(p: &Polytope) -> Self {
        PolytopeFile {
            dim: p.dim,
            vertices: p.vertices.iter().map(|v| v.iter().copied().collect()).collect(),
            halfspaces: Some(
                p.facets
                    .iter()
                    .map(|f| HalfspaceEntry {
                        normal: f.normal.iter().copied().collect(),
                        offset: f.offset,
                    })
                    .collect(),
            ),
        }
    }

    /// Builds the polytope, preferring vertices; when both are given they must describe the same lattice.
    pub fn build(&self, tol: f64) -> Result<Polytope> {
        let verts: Vec<DVector<f64>> = self.vertices.iter().map(|v| DVector::from_vec(v.clone())).collect();
        let hs: Option<Vec<(DVector<f64>, f64)>> = self.halfspaces.as_ref().map(|h| {
            h.iter()
                .map(|e| (DVector::from_vec(e.normal.clone()), e.offset))
                .collect()
        });
        let p = match (&verts.is_empty(), &hs) {
            (false, _) => super::build_polytope(&PolytopeSpec::Vertices(verts), tol)?,
            (true, Some(h)) => super::build_polytope(&PolytopeSpec::Halfspaces(h.clone()), tol)?,
            (true, None) => return Err(Error::InconsistentInput("neither vertices nor halfspaces given".into())),
        };
        if p.dim != self.dim {
            return Err(Error::InconsistentInput(format!(
                "declared dim {} but data has dim {}",
                self.dim, p.dim
            )));
        }
        if let (false, Some(h)) = (self.vertices.is_empty(), hs) {
            let q = Polytope::from_halfspaces(&h, tol)?;
            if q.vertices.len() != p.vertices.len()
                || !q
                    .vertices
                    .iter()
                    .all(|v| p.vertices.iter().any(|w| (v - w).amax() < 1e-7))
            {
                return Err(Error::InconsistentInput(
                    "vertex and half-space representations disagree".into(),
                ));
            }
        }
        Ok(p)
    }
}

pub fn read_polytope(path: &Path, tol: f64) -> Result<Polytope> {
    let text = std::fs::read_to_string(path)?;
    let file: PolytopeFile = serde_json::from_str(&text)?;
    file.build(tol)
}

pub fn write_polytope(p: &Polytope, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&PolytopeFile::from_polytope(p))?;
    std::fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::polytope::DEFAULT_TOL;

    #[test]
    fn round_trip_preserves_lattice() {
        let o = Polytope::cross_polytope(3);
        let file = PolytopeFile::from_polytope(&o);
        let text = serde_json::to_string(&file).unwrap();
        let back: PolytopeFile = serde_json::from_str(&text).unwrap();
        let p = back.build(DEFAULT_TOL).unwrap();
        assert_eq!(p.lattice_signature(), o.lattice_signature());
    }

    #[test]
    fn halfspace_only_file() {
        let text = r#"{"dim":2,"halfspaces":[
            {"normal":[1,0],"offset":0},{"normal":[0,1],"offset":0},
            {"normal":[-1,0],"offset":-1},{"normal":[0,-1],"offset":-1}]}"#;
        let file: PolytopeFile = serde_json::from_str(text).unwrap();
        let p = file.build(DEFAULT_TOL).unwrap();
        assert_eq!(p.vertices.len(), 4);
    }

    #[test]
    fn disagreeing_representations_rejected() {
        let mut file = PolytopeFile::from_polytope(&Polytope::unit_cube(2));
        file.halfspaces.as_mut().unwrap()[0].offset = -0.5;
        assert!(matches!(file.build(DEFAULT_TOL), Err(Error::InconsistentInput(_))));
    }
}

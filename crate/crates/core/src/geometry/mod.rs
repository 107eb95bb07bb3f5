//! Convex polytopes: vertex and half-space representations, face lattice, skeletons,
//! facet adjacency, tangent cones and the simple/simplicial predicates.

mod cone;
mod io;
mod polytope;

pub use cone::TangentCone;
pub use io::{read_polytope, write_polytope, HalfspaceEntry, PolytopeFile};
pub use polytope::{build_polytope, Face, Facet, Polytope, PolytopeSpec, DEFAULT_TOL};

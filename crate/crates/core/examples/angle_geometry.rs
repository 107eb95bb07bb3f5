//! Face lattices, simplicity and the angle functional at polytope vertices.
use nalgebra::{DMatrix, DVector};
use polyma::geometry::Polytope;
use polyma::normalize::{dihedral_angles, theta_functionals, SecondOrderJet};

fn main() -> Result<(), polyma::Error> {
    for (name, p) in [
        ("square", Polytope::unit_cube(2)),
        ("cube", Polytope::unit_cube(3)),
        ("octahedron", Polytope::cross_polytope(3)),
        ("simplex", Polytope::standard_simplex(3)),
    ] {
        let faces: Vec<usize> = (0..p.dim).map(|k| p.num_faces(k)).collect();
        println!(
            "{name:<10} f-vector {faces:?} simple {} simplicial {}",
            p.is_simple(),
            p.is_simplicial()
        );
        let cone = p.tangent_cone(&p.vertices[0])?;
        let a = dihedral_angles(&cone)?;
        println!("  vertex 0 dihedral angles in [{:.4}, {:.4}]", a.theta_min, a.theta_max);
    }
    let square = Polytope::unit_cube(2);
    for b in [-0.5, 0.0, 0.5] {
        let jet = SecondOrderJet::from_hessian(DVector::zeros(2), DMatrix::from_row_slice(2, 2, &[1.0, b, b, 1.0]));
        let t = theta_functionals(&jet, &square)?;
        println!(
            "square corner, u12 = {b}: Theta = {:.6}, arccos(b) = {:.6}",
            t.theta_max,
            f64::acos(b)
        );
    }
    Ok(())
}

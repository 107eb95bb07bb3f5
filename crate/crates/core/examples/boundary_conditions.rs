//! Evaluates the skeleton compatibility conditions for polynomial data on a polytope.
//!
//! `cargo run --example boundary_conditions -- [cube|octahedron|simplex] [phi]`
use nalgebra::DVector;
use polyma::geometry::Polytope;
use polyma::harness::{condition_report, CompiledExpr};
use polyma::normalize::{sample_skeleton, AConditionParams, SecondOrderJet};

fn main() -> Result<(), polyma::Error> {
    let p = match std::env::args().nth(1).as_deref() {
        Some("octahedron") => Polytope::cross_polytope(3),
        Some("simplex") => Polytope::standard_simplex(3),
        _ => Polytope::unit_cube(3),
    };
    let phi_src = std::env::args()
        .nth(2)
        .unwrap_or_else(|| "0.5*(x1^2 + x2^2 + x3^2) + 0.1*x1*x2*x3".into());
    let phi = CompiledExpr::new(&phi_src, 3)?;
    let f = CompiledExpr::new("1", 3)?.field();
    let pts: Vec<DVector<f64>> = sample_skeleton(&p, 1, 9);
    let jets: Vec<SecondOrderJet> = pts
        .iter()
        .map(|x| SecondOrderJet {
            base_point: x.clone(),
            value: phi.eval(x.as_slice()),
            gradient: phi.gradient_at(x.as_slice()),
            hessian: phi.hessian_at(x.as_slice()),
        })
        .collect();
    let rep = condition_report(&p, &jets, &f, None, 9, AConditionParams::default())?;
    println!("phi = {phi_src}: dim {}, simple {}", rep.dim, rep.simple);
    for c in &rep.conditions {
        println!(
            "  {:<3} {:?} over {} samples, worst margin {:?}",
            c.name, c.status, c.samples, c.worst_margin
        );
    }
    for (i, v) in rep.vertex_angles.iter().enumerate() {
        println!("  vertex {i}: Theta in [{:.4}, {:.4}]", v.theta_min, v.theta_max);
    }
    Ok(())
}

//! Explicit constructions: the convex bump, a cube sub-solution with acute vertex quadratics, and a
//! vertex barrier on the square.
use polyma::constructions::{
    acute_vertex_quadratics, prop52_bump, simple_subsolution_3d, thm63_barrier, thm63_h_profile, SubsolutionParams,
    VertexBarrierParams, VertexData,
};
use polyma::field::ScalarField;
use polyma::geometry::Polytope;

fn main() -> Result<(), polyma::Error> {
    let g = prop52_bump(0.35)?;
    println!(
        "bump: C2 defect {:.1e}, min g'' {:.1e}",
        g.continuity_defect(),
        g.min_second_derivative(0.0, 1.05, 2000)
    );
    let h = thm63_h_profile(0.7)?;
    println!(
        "h profile: C2 defect {:e}, breakpoints {:?}",
        h.continuity_defect(),
        h.breakpoints
    );

    let cube = Polytope::unit_cube(3);
    let sub = simple_subsolution_3d(&cube, &acute_vertex_quadratics(&cube)?, &SubsolutionParams::default())?;
    println!("cube sub-solution ({} terms)", sub.report.vertices.len() + 1);
    for v in &sub.report.vertices {
        println!(
            "  vertex {:?}: Theta = {:.4} (strong {})",
            v.vertex, v.theta_max, v.strong
        );
    }
    println!(
        "  min Hessian eigenvalue {:.3e} over {} samples",
        sub.report.min_hessian_eigenvalue, sub.report.samples
    );

    let square = Polytope::unit_cube(2);
    for f0 in [0.01, 10.0] {
        match thm63_barrier(
            &square,
            &VertexData::vertex(0),
            &ScalarField::constant(f0),
            &ScalarField::half_norm_sq(),
            &VertexBarrierParams::default(),
        ) {
            Ok((_, rep)) => println!(
                "square vertex barrier, f = {f0}: boundary gap {:.2e}, det margin {:.2e}",
                rep.min_boundary_gap, rep.min_det_margin
            ),
            Err(e) => println!("square vertex barrier, f = {f0}: {e}"),
        }
    }
    Ok(())
}

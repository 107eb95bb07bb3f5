//! Classifies the corner behaviour of `det D²u = 3/4` on the square with data `½|x|² − (½ + ε)x₁x₂`.
//!
//! `cargo run --release --example corner_dichotomy -- [eps] [h]`
use polyma::asymptotics::{corner_jet_extract, corner_zoom, CornerParams};
use polyma::field::ScalarField;
use polyma::geometry::Polytope;
use polyma::normalize::AffineMap;
use polyma::solver::{solve_dirichlet, ComputationalDomain, SolverParams};

fn main() -> Result<(), polyma::Error> {
    let mut args = std::env::args()
        .skip(1)
        .map(|s| s.parse::<f64>().expect("numeric argument"));
    let eps = args.next().unwrap_or(0.2);
    let h = args.next().unwrap_or(1.0 / 128.0);
    let f0 = 0.75;
    let dom = ComputationalDomain::from_polytope(&Polytope::unit_cube(2))?;
    let f = ScalarField::constant(f0);
    let phi = ScalarField::new("corner data", move |x| {
        0.5 * (x[0] * x[0] + x[1] * x[1]) - (0.5 + eps) * x[0] * x[1]
    });
    let params = SolverParams::with_h(h);
    let prm = CornerParams::default();
    let base = solve_dirichlet(&dom, &f, &phi, &params)?;
    let levels = corner_zoom(&dom, &f, &phi, base, &[0.0, 0.0], &params, &prm)?;
    let v = corner_jet_extract(&levels, &[0.0, 0.0], f0, &AffineMap::identity(2), None, &prm)?;
    println!("eps = {eps}, {} zoom levels", v.levels_used);
    println!(
        "class {:?}: u12 = {:.4} (root {:.4}, data {:.4}), spread {:.3e}",
        v.class, v.estimated_u12, v.predicted_root, v.subsolution_u12, v.direction_spread
    );
    for s in &v.series {
        println!(
            "  angle {:.3}: extrapolated {:.4} from {} radii",
            s.angle,
            s.extrapolated,
            s.radii.len()
        );
    }
    Ok(())
}

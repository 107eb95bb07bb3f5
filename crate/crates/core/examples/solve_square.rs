//! Dirichlet problem on the unit square with expression data; compares against a known solution.
//!
//! `cargo run --release --example solve_square -- [h]`
use polyma::geometry::Polytope;
use polyma::harness::CompiledExpr;
use polyma::solver::{residual_report, solve_dirichlet, ComputationalDomain, SolverParams};

fn main() -> Result<(), polyma::Error> {
    let h: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0 / 32.0);
    // u = ½|x|² + ¼x₁x₂ solves det D²u = 1 − 1/16.
    let exact = CompiledExpr::new("0.5*(x1^2 + x2^2) + 0.25*x1*x2", 2)?;
    let f = CompiledExpr::new("15/16", 2)?.field();
    let dom = ComputationalDomain::from_polytope(&Polytope::unit_cube(2))?;
    let mut ladder = Vec::new();
    for k in 0..3 {
        let hk = h / f64::from(1 << k);
        let sol = solve_dirichlet(&dom, &f, &exact.field(), &SolverParams::with_h(hk))?;
        println!(
            "h = {hk:<10} nodes = {:<6} newton = {:<3} residual = {:.2e}  max error = {:.2e}",
            sol.len(),
            sol.iterations,
            sol.residual,
            sol.max_error(|x| exact.eval(x))
        );
        ladder.push(sol);
    }
    let rep = residual_report(&ladder)?;
    println!(
        "convexity violations: {}, observed rate: {:?}",
        rep.convexity_violations, rep.grid_convergence_rate
    );
    Ok(())
}

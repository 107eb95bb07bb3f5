//! The ordered Lipschitz right-hand sides `G ≤ G̃` and the reversed ordering of the solutions.
//!
//! `cargo run --release --example lipschitz_counterexample -- [h]`
use polyma::constructions::{counterexample_bundle, counterexample_rhs, mu_k};
use polyma::solver::{solve_dirichlet, ComputationalDomain, SolverParams};

fn main() -> Result<(), polyma::Error> {
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let rhs = counterexample_rhs(8)?;
    println!(
        "Lipschitz constants: G {}, G~ {}",
        rhs.g.max_slope(),
        rhs.g_tilde.max_slope()
    );
    for (k, t, v) in rhs.anchors() {
        println!(
            "  k = {k}: t = {t:.6}  G = {}  G~ = {}  target {v}  mu_k = {:.4}",
            rhs.g.eval(t),
            rhs.g_tilde.eval(t),
            mu_k(k)
        );
    }
    let b = counterexample_bundle(8, 0.2)?;
    let dom = ComputationalDomain::from_polytope(&b.polytope)?;
    let prm = SolverParams::with_h(h);
    let u = solve_dirichlet(&dom, &b.f, &b.phi, &prm)?;
    let ut = solve_dirichlet(&dom, &b.f_tilde, &b.phi, &prm)?;
    let excess = u
        .values
        .iter()
        .zip(&ut.values)
        .map(|(a, b)| b - a)
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "tetrahedron at h = {h}: {} nodes, max(u_Ftilde - u_F) = {excess:.3e}",
        u.len()
    );
    Ok(())
}

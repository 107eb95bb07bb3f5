//! Fits the singular edge coefficient on a wedge of opening `μπ`, with and without a planted mode.
//!
//! `cargo run --release --example edge_expansion -- [h]`
use polyma::asymptotics::{default_fit_params, edge_expansion_fit, edge_samples, oracle_noise_floor};
use polyma::field::ScalarField;
use polyma::solver::{solve_dirichlet, ComputationalDomain, SolverParams};

fn main() -> Result<(), polyma::Error> {
    let h: f64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(1.0 / 32.0);
    let mu = 0.4;
    let slices = [-0.25, 0.0, 0.25];
    let dom = ComputationalDomain::wedge(mu, 1.0, 0.5)?;
    let half = |x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>();
    for amp in [0.0, 0.1] {
        let phi = ScalarField::new("wedge data", move |x| {
            let z = x[2] / 0.5;
            half(x) - amp * x[0].hypot(x[1]).powf(1.0 / mu) * (x[1].atan2(x[0]) / mu).sin() * (1.0 - z * z).powi(2)
        });
        let sol = solve_dirichlet(&dom, &ScalarField::constant(1.0), &phi, &SolverParams::with_h(h))?;
        let prm = default_fit_params(&sol, 1.0);
        let fit = edge_expansion_fit(&sol, mu, &slices, &prm)?;
        let floor = oracle_noise_floor(&edge_samples(&sol)?, mu, &slices, &prm)?;
        println!(
            "amplitude {amp}: {} nodes, c(x3) = {:?}, noise floor {floor:.1e}, remainder rate {:.2} (mode {:.2})",
            sol.len(),
            fit.coefficient_c.iter().map(|c| format!("{c:.4}")).collect::<Vec<_>>(),
            fit.residual_decay_rate,
            fit.exponent
        );
    }
    Ok(())
}

//! Eigenvalue table for a few cone cross-sections.
use polyma::spectral::{self, lambda1_arc};
use std::time::Instant;

fn main() -> Result<(), polyma::Error> {
    let r = lambda1_arc(std::f64::consts::FRAC_PI_2)?;
    println!(
        "arc(pi/2)        lambda1 = {:.12}  mu = {:.12}",
        r.lambda1, r.exponent_mu
    );
    let h: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.05);
    for (name, cone) in [
        ("quarter-space", spectral::quarter_space()),
        ("octant", spectral::octant()),
        ("lune mu=1/3", spectral::lune(1.0 / 3.0)?),
    ] {
        let t = Instant::now();
        let r = spectral::lambda1_of_cone(&cone, h)?;
        println!(
            "{name:<16} lambda1 = {:.6} +- {:.1e}  mu = {:.6}  levels = {:?}  ({:.2?})",
            r.lambda1,
            r.estimated_error,
            r.exponent_mu,
            r.levels.iter().map(|l| (l.dofs, l.lambda1)).collect::<Vec<_>>(),
            t.elapsed()
        );
    }
    Ok(())
}

//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
//! Expected values are computed here independently of the library where possible.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use polyma::asymptotics::{
    corner_jet_extract, corner_zoom, default_fit_params, edge_expansion_fit, edge_samples, fit_edge_samples,
    interpolation_bound, oracle_noise_floor, CornerParams, DichotomyClass, EdgeSample,
};
use polyma::constructions::{
    acute_vertex_quadratics, counterexample_rhs, prop52_bump, simple_subsolution_3d, thm63_h_profile, SubsolutionParams,
};
use polyma::field::ScalarField;
use polyma::geometry::{Polytope, TangentCone};
use polyma::normalize::{theta_functionals, AffineMap, SecondOrderJet};
use polyma::solver::{solve_dirichlet, solve_truncated_cone, ComputationalDomain, DiscreteSolution, Pin, SolverParams};
use polyma::spectral;

type Outcome = Result<(bool, String), polyma::Error>;
type Criterion = (&'static str, fn() -> Outcome);

fn half_sq(x: &[f64]) -> f64 {
    0.5 * x.iter().map(|v| v * v).sum::<f64>()
}

fn square() -> ComputationalDomain {
    ComputationalDomain::from_polytope(&Polytope::unit_cube(2)).unwrap()
}

/// Square data `½|x|² − (½ + ε)x₁x₂` with `f = 3/4`.
fn corner_data(eps: f64) -> ScalarField {
    ScalarField::new("corner data", move |x| {
        0.5 * (x[0] * x[0] + x[1] * x[1]) - (0.5 + eps) * x[0] * x[1]
    })
}

fn c1_exact_quadratic() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut notes = Vec::new();
    for k in [5, 6, 7] {
        let h = 0.5f64.powi(k);
        let sol = solve_dirichlet(
            &square(),
            &ScalarField::constant(1.0),
            &ScalarField::half_norm_sq(),
            &SolverParams::with_h(h),
        )?;
        let err = (0..sol.len())
            .map(|i| (sol.values[i] - half_sq(sol.point(i))).abs())
            .fold(0.0, f64::max);
        ok &= err <= 5.0 * h * h;
        notes.push(format!("h=1/{}: {err:.1e}", 1 << k));
    }
    let secs = t.elapsed().as_secs_f64();
    Ok((
        ok && secs < 60.0,
        format!("max nodal error {} (<= 5h^2), {secs:.2} s (< 60)", notes.join(", ")),
    ))
}

fn c2_sandwich() -> Outcome {
    let t = Instant::now();
    let c: f64 = 0.75;
    let h = 1.0 / 16.0;
    let sol = solve_truncated_cone(&TangentCone::orthant(2, 2)?, 4.0, c, None, &SolverParams::with_h(h))?;
    let k = (1.0 - c).sqrt();
    let excess = (0..sol.len())
        .map(|i| {
            let x = sol.point(i);
            sol.values[i] - (half_sq(x) + k * x[0] * x[1] + 2.0 * h)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let secs = t.elapsed().as_secs_f64();
    Ok((
        excess <= 0.0 && secs < 120.0,
        format!(
            "max(u - bound - 2h) = {excess:.3e} over {} nodes, {secs:.2} s",
            sol.len()
        ),
    ))
}

fn c3_conic_pin() -> Outcome {
    let p0 = vec![0.5f64.sqrt(), 0.5f64.sqrt()];
    let pin = Pin {
        p0: p0.clone(),
        a: 0.0,
        tol: 1e-4,
    };
    let sol = solve_truncated_cone(
        &TangentCone::orthant(2, 2)?,
        2.0,
        1.0,
        Some(&pin),
        &SolverParams::with_h(1.0 / 32.0),
    )?;
    let v = sol.interpolate(&p0)?;
    let gap = (0..sol.len())
        .map(|i| sol.values[i] - half_sq(sol.point(i)))
        .fold(f64::INFINITY, f64::min);
    Ok((
        v.abs() <= 1e-3 && gap < -0.1,
        format!("v(p0) = {v:.2e}, min(v - |x|^2/2) = {gap:.3}"),
    ))
}

fn c4_trichotomy() -> Outcome {
    let f0: f64 = 0.75;
    // Roots of det [[1, t], [t, 1]] = f0.
    let root = (1.0 - f0).sqrt();
    let dom = square();
    let f = ScalarField::constant(f0);
    let params = SolverParams::with_h(1.0 / 128.0);
    let prm = CornerParams::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for (eps, want) in [
        (0.0, DichotomyClass::EqualsSubsolution),
        (-0.1, DichotomyClass::PlusRootBranch),
        (0.2, DichotomyClass::NotC2),
    ] {
        let phi = corner_data(eps);
        let base = solve_dirichlet(&dom, &f, &phi, &params)?;
        let levels = corner_zoom(&dom, &f, &phi, base, &[0.0, 0.0], &params, &prm)?;
        let v = corner_jet_extract(&levels, &[0.0, 0.0], f0, &AffineMap::identity(2), None, &prm)?;
        let good = v.class == want
            && match want {
                DichotomyClass::EqualsSubsolution => (v.estimated_u12 + root).abs() <= 0.05,
                DichotomyClass::PlusRootBranch => (v.estimated_u12 - root).abs() <= 0.05,
                DichotomyClass::NotC2 => v.direction_spread > 0.2,
            };
        ok &= good;
        notes.push(format!(
            "eps={eps}: {:?} u12={:.4} spread={:.3}",
            v.class, v.estimated_u12, v.direction_spread
        ));
    }
    Ok((ok, notes.join("; ")))
}

fn c5_eigen() -> Outcome {
    let t = Instant::now();
    let arc = spectral::lambda1_arc(FRAC_PI_2)?.lambda1;
    // Homogeneous harmonic x₁x₂ (degree 2) and x₁x₂x₃ (degree 3) in ℝ³: λ = d(d + 1).
    let qs = spectral::lambda1_of_cone(&spectral::quarter_space(), 0.05)?.lambda1;
    let oc = spectral::lambda1_of_cone(&spectral::octant(), 0.05)?.lambda1;
    let rel = |a: f64, b: f64| (a - b).abs() / b;
    let secs = t.elapsed().as_secs_f64();
    let ok = arc == 4.0 && rel(qs, 6.0) <= 0.01 && rel(oc, 12.0) <= 0.01 && secs < 120.0;
    Ok((
        ok,
        format!("arc(pi/2) = {arc}, quarter-space = {qs:.6}, octant = {oc:.6}, {secs:.2} s"),
    ))
}

fn random_tet(rng: &mut ChaCha8Rng) -> Polytope {
    loop {
        let pts: Vec<DVector<f64>> = (0..4)
            .map(|i| {
                let mut p = DVector::from_fn(3, |j, _| if i > 0 && j == i - 1 { 1.0 } else { 0.0 });
                for c in p.iter_mut() {
                    *c += rng.random_range(-0.3..0.3);
                }
                p
            })
            .collect();
        if let Ok(p) = Polytope::from_vertices(&pts, 1e-9) {
            return p;
        }
    }
}

fn theta(p: &Polytope, x: &DVector<f64>, h: DMatrix<f64>) -> f64 {
    theta_functionals(&SecondOrderJet::from_hessian(x.clone(), h), p)
        .unwrap()
        .theta_max
}

fn nearest(p: &Polytope, x: &DVector<f64>) -> DVector<f64> {
    p.vertices
        .iter()
        .min_by(|a, b| (*a - x).norm().total_cmp(&(*b - x).norm()))
        .unwrap()
        .clone()
}

fn c6_geometry() -> Outcome {
    let simple = Polytope::unit_cube(3).is_simple() && !Polytope::cross_polytope(3).is_simple();
    let sq = Polytope::unit_cube(2);
    let origin = DVector::zeros(2);
    let mut theta_err: f64 = 0.0;
    for b in [-0.5, 0.0, 0.5] {
        let t = theta(&sq, &origin, DMatrix::from_row_slice(2, 2, &[1.0, b, b, 1.0]));
        theta_err = theta_err.max((t - f64::acos(b)).abs());
    }
    let mut runner = TestRunner::new_with_rng(
        Config {
            cases: 100,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    );
    let strategy = (
        any::<u64>(),
        proptest::collection::vec(-1.0f64..1.0, 9),
        proptest::collection::vec(-1.0f64..1.0, 12),
        0.1f64..10.0,
    );
    let worst = std::cell::Cell::new(0.0f64);
    let res = runner.run(&strategy, |(seed, m, a, s)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_tet(&mut rng);
        let v = p.vertices[(seed % 4) as usize].clone();
        let m = DMatrix::from_row_slice(3, 3, &m);
        let h = m.transpose() * &m + DMatrix::identity(3, 3) * 0.5;
        let base = theta(&p, &v, h.clone());
        // Orthogonal: Q from the QR factorization of a random matrix.
        let q = DMatrix::from_row_slice(3, 3, &a[..9]).qr().q();
        let pq = Polytope::from_vertices(&p.vertices.iter().map(|x| &q * x).collect::<Vec<_>>(), 1e-9).unwrap();
        let tq = theta(&pq, &nearest(&pq, &(&q * &v)), &q * &h * q.transpose());
        // Affine: x ↦ Ax + t with A = I + perturbation, Hessian pulled back by A⁻¹.
        let am = DMatrix::identity(3, 3) + DMatrix::from_row_slice(3, 3, &a[..9]) * 0.3;
        prop_assume!(am.determinant().abs() > 0.2);
        let shift = DVector::from_column_slice(&a[9..]);
        let ai = am.clone().try_inverse().unwrap();
        let pa =
            Polytope::from_vertices(&p.vertices.iter().map(|x| &am * x + &shift).collect::<Vec<_>>(), 1e-9).unwrap();
        let ta = theta(&pa, &nearest(&pa, &(&am * &v + &shift)), ai.transpose() * &h * &ai);
        let ts = theta(&p, &v, &h * s);
        let dev = (tq - base).abs().max((ta - base).abs()).max((ts - base).abs());
        worst.set(worst.get().max(dev));
        prop_assert!(dev <= 1e-9, "deviation {dev}");
        Ok(())
    });
    let ok = simple && theta_err <= 1e-9 && res.is_ok();
    Ok((
        ok,
        format!(
            "simple(cube) && !simple(octahedron) = {simple}, |Theta - arccos b| <= {theta_err:.1e}, invariance over 100 instances: {} (worst {:.1e})",
            if res.is_ok() { "ok" } else { "FAILED" },
            worst.get()
        ),
    ))
}

fn c7_constructions() -> Outcome {
    let eps0 = 0.35;
    let g = prop52_bump(eps0)?;
    let bump_ok = g.continuity_defect() <= 1e-12 && g.min_second_derivative(0.0, 3.0 * eps0, 1000) >= -1e-12;
    let p = Polytope::unit_cube(3);
    let sub = simple_subsolution_3d(&p, &acute_vertex_quadratics(&p)?, &SubsolutionParams::default())?;
    let cube_ok = sub.report.vertices.len() == 8 && sub.report.vertices.iter().all(|v| v.theta_max < FRAC_PI_2);
    let rhs = counterexample_rhs(10)?;
    let anchors_ok = (1..=10).all(|k| {
        let t = 3.0 / 2f64.powi(k + 2);
        rhs.g.eval(t) == 1.0 - t && rhs.g_tilde.eval(t) == 1.0 - t
    });
    let h = thm63_h_profile(0.7)?;
    let h_defect = h.continuity_defect();
    let ok = bump_ok && cube_ok && anchors_ok && h_defect == 0.0;
    Ok((
        ok,
        format!(
            "bump continuity/convexity {bump_ok}, cube Theta < pi/2 at 8 vertices {cube_ok}, anchors k<=10 exact {anchors_ok}, h-profile defect {h_defect:e}"
        ),
    ))
}

fn c8_edge() -> Outcome {
    let mu = 0.4;
    let slices = [-0.25, 0.0, 0.25];
    let t = Instant::now();
    let dom = ComputationalDomain::wedge(mu, 1.0, 0.5)?;
    let params = SolverParams::with_h(1.0 / 32.0);
    let flat = solve_dirichlet(&dom, &ScalarField::constant(1.0), &ScalarField::half_norm_sq(), &params)?;
    let prm = default_fit_params(&flat, 1.0);
    // Oracle: the singular mode sampled on the same nodes, with cubic remainders.
    let mode = |s: &EdgeSample| s.r.powf(1.0 / mu) * (s.theta / mu).sin();
    let nodes = edge_samples(&flat)?;
    let mut oracle_err: f64 = 0.0;
    for q in [-1.0, 0.0, 1.0] {
        let planted: Vec<EdgeSample> = nodes
            .iter()
            .map(|s| EdgeSample {
                w: 0.3 * mode(s) + q * s.r.powi(3),
                ..*s
            })
            .collect();
        let fit = fit_edge_samples(&planted, mu, &slices, &prm)?;
        oracle_err = fit
            .coefficient_c
            .iter()
            .map(|c| (c - 0.3).abs())
            .fold(oracle_err, f64::max);
    }
    let floor = oracle_noise_floor(&nodes, mu, &slices, &prm)?;
    let c_flat = edge_expansion_fit(&flat, mu, &slices, &prm)?.coefficient_c;
    let bump = ScalarField::new("perturbed", move |x| {
        let r = x[0].hypot(x[1]);
        let z = x[2] / 0.5;
        half_sq(x) - 0.1 * r.powf(1.0 / mu) * (x[1].atan2(x[0]) / mu).sin() * (1.0 - z * z).powi(2)
    });
    let pert = solve_dirichlet(&dom, &ScalarField::constant(1.0), &bump, &params)?;
    let c_pert = edge_expansion_fit(&pert, mu, &slices, &prm)?.coefficient_c;
    let secs = t.elapsed().as_secs_f64();
    let flat_max = c_flat.iter().map(|c| c.abs()).fold(0.0, f64::max);
    let pert_max = c_pert.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ok = oracle_err <= 1e-3 && flat.len() <= 49 * 49 * 49 && flat_max < floor && pert_max < -0.01 && secs < 900.0;
    Ok((
        ok,
        format!(
            "oracle |c - 0.3| = {oracle_err:.1e}; {} nodes; unperturbed max|c| = {flat_max:.1e} < floor {floor:.1e}; perturbed max c = {pert_max:.4}; {secs:.1} s",
            flat.len()
        ),
    ))
}

fn holder(xs: &[f64], g: &[f64], gamma: f64) -> f64 {
    let mut best: f64 = 0.0;
    for i in 0..xs.len() {
        for j in 0..i {
            best = best.max((g[i] - g[j]).abs() / (xs[i] - xs[j]).abs().powf(gamma));
        }
    }
    best
}

fn c9_interpolation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let xs: Vec<f64> = (0..=160).map(|i| i as f64 / 160.0).collect();
    let mut violations = 0;
    let mut formula_err: f64 = 0.0;
    for i in 0..100 {
        let deg = 1 + i % 5;
        let alpha: f64 = [0.3, 0.6, 1.0][i % 3];
        let scale = 10f64.powf(rng.random_range(-1.5..1.5));
        let c: Vec<f64> = (0..=deg).map(|_| scale * rng.random_range(-1.0..1.0)).collect();
        let f: Vec<f64> = xs
            .iter()
            .map(|x| (0..=deg).map(|k| c[k] * x.powi(k as i32)).sum())
            .collect();
        let df: Vec<f64> = xs
            .iter()
            .map(|x| (1..=deg).map(|k| k as f64 * c[k] * x.powi(k as i32 - 1)).sum())
            .collect();
        let a = f.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let dsup = df.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let b = (dsup + holder(&xs, &df, alpha)).max(a);
        let bound = interpolation_bound(a, b, alpha)?;
        let sup_formula = 6.0 * a.powf(alpha / (1.0 + alpha)) * b.powf(1.0 / (1.0 + alpha));
        let half_formula = (12.0 * b.powf(1.0 / (1.0 + alpha)) + b) * a.powf(alpha / (2.0 * (1.0 + alpha)));
        formula_err = formula_err
            .max((bound.sup_bound - sup_formula).abs() / sup_formula)
            .max((bound.holder_half_bound - half_formula).abs() / half_formula);
        if dsup > bound.sup_bound || holder(&xs, &df, alpha / 2.0) > bound.holder_half_bound {
            violations += 1;
        }
    }
    Ok((
        violations == 0 && formula_err < 1e-12,
        format!("{violations} violations over 100 polynomials; bound formula rel. error {formula_err:.1e}"),
    ))
}

fn max_eig(sol: &DiscreteSolution) -> f64 {
    sol.max_hessian_eigenvalue()
}

fn c10_comparison() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let (a, b) = (rng.random_range(0.6..1.4), rng.random_range(0.6..1.4));
        let dom = ComputationalDomain::from_polytope(&Polytope::axis_box(&[0.0, 0.0], &[a, b])?)?;
        let (q11, q12, q22) = (
            rng.random_range(0.5..2.0),
            rng.random_range(-0.4..0.4),
            rng.random_range(0.5..2.0),
        );
        let lift = rng.random_range(0.0..0.3);
        let f_hi = rng.random_range(0.5..2.0);
        let f_lo = f_hi * rng.random_range(0.2..1.0);
        let phi1 = ScalarField::new("phi1", move |x| {
            0.5 * q11 * x[0] * x[0] + q12 * x[0] * x[1] + 0.5 * q22 * x[1] * x[1]
        });
        let p1 = phi1.clone();
        let phi2 = ScalarField::new("phi2", move |x| p1.eval(x) + lift * (1.0 + x[1]));
        let prm = SolverParams::with_h(1.0 / 16.0);
        let u1 = solve_dirichlet(&dom, &ScalarField::constant(f_hi), &phi1, &prm)?;
        let u2 = solve_dirichlet(&dom, &ScalarField::constant(f_lo), &phi2, &prm)?;
        worst = u1
            .values
            .iter()
            .zip(&u2.values)
            .map(|(x, y)| x - y)
            .fold(worst, f64::max);
    }
    let f = ScalarField::constant(0.75);
    let phi = corner_data(-0.1);
    let m: Vec<f64> = [32.0, 64.0, 128.0]
        .iter()
        .map(|n| solve_dirichlet(&square(), &f, &phi, &SolverParams::with_h(1.0 / n)).map(|s| max_eig(&s)))
        .collect::<Result<_, _>>()?;
    let rel = (m[1] - m[0]).max(m[2] - m[1]) / m[0];
    let shrinking = m[2] - m[1] <= (m[1] - m[0]).max(0.0);
    let ok = worst <= 1e-6 && rel <= 0.01 && shrinking;
    Ok((
        ok,
        format!(
            "max(u1 - u2) over 50 pairs = {worst:.2e}; max Hessian eigenvalue {:.4} {:.4} {:.4} (max rel. increase {rel:.1e}, shrinking {shrinking})",
            m[0], m[1], m[2]
        ),
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exact-quadratic oracle", c1_exact_quadratic),
        ("quarter-plane sandwich", c2_sandwich),
        ("pinned conic solution", c3_conic_pin),
        ("corner trichotomy", c4_trichotomy),
        ("eigenvalue table", c5_eigen),
        ("angle condition geometry", c6_geometry),
        ("construction certificates", c7_constructions),
        ("edge expansion", c8_edge),
        ("interpolation inequality", c9_interpolation),
        ("comparison and C^{1,1} witness", c10_comparison),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (ok, detail) = match run() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "criterion {:>2} {:<32} {}  {detail}  [{:.1} s]",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}

use proptest::prelude::*;

use polyma::constructions::counterexample_bundle;
use polyma::field::ScalarField;
use polyma::geometry::Polytope;
use polyma::solver::{solve_dirichlet, ComputationalDomain, DiscreteSolution, SolverParams};

fn square() -> ComputationalDomain {
    ComputationalDomain::from_polytope(&Polytope::unit_cube(2)).unwrap()
}

fn quad(a: f64, b: f64, c: f64, k: f64) -> ScalarField {
    ScalarField::new("quad", move |x| {
        0.5 * a * x[0] * x[0] + b * x[0] * x[1] + 0.5 * c * x[1] * x[1] + k
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn comparison_principle(f2 in 0.3f64..1.5, df in 0.0f64..0.8, tilt in -0.5f64..0.5, lift in 0.0f64..0.4) {
        let prm = SolverParams::with_h(1.0 / 16.0);
        let f1 = ScalarField::new("f1", move |x| f2 + df + 0.1 * x[0]);
        let f2 = ScalarField::constant(f2);
        let phi1 = quad(1.0, 0.2, 1.0, 0.0);
        let phi2 = ScalarField::new("phi2", move |x| phi1.eval(x) + lift * (1.0 + tilt * x[0]).max(0.0));
        let u1 = solve_dirichlet(&square(), &f1, &quad(1.0, 0.2, 1.0, 0.0), &prm).unwrap();
        let u2 = solve_dirichlet(&square(), &f2, &phi2, &prm).unwrap();
        let worst = u1.values.iter().zip(&u2.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(worst <= 1e-6, "u1 - u2 reaches {worst}");
    }

    #[test]
    fn subsolutions_stay_below(a in 1.0f64..2.0, c in 1.0f64..2.0, f in 0.2f64..1.0) {
        // w = ½(a x₁² + c x₂²) − k has det D²w = ac ≥ 1 ≥ f and w ≤ ½|x|² on the unit square.
        let k = 0.5 * (a - 1.0) + 0.5 * (c - 1.0);
        let w = quad(a, 0.0, c, -k);
        let u = solve_dirichlet(&square(), &ScalarField::constant(f), &ScalarField::half_norm_sq(), &SolverParams::with_h(1.0 / 16.0)).unwrap();
        let worst = (0..u.len()).map(|i| w.eval(u.point(i)) - u.values[i]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(worst <= 1e-6, "w - u reaches {worst}");
    }
}

#[test]
fn exact_quadratic_in_three_dimensions() {
    let dom = ComputationalDomain::from_polytope(&Polytope::unit_cube(3)).unwrap();
    let h = 1.0 / 8.0;
    let phi = ScalarField::new("q", |x| {
        0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) + 0.2 * x[0] * x[1]
    });
    // det of [[1, .2, 0], [.2, 1, 0], [0, 0, 1]].
    let f = ScalarField::constant(0.96);
    let u = solve_dirichlet(&dom, &f, &phi, &SolverParams::with_h(h)).unwrap();
    let err = (0..u.len())
        .map(|i| (u.values[i] - phi.eval(u.point(i))).abs())
        .fold(0.0, f64::max);
    assert!(err <= 5.0 * h * h, "error {err}");
}

#[test]
fn rhs_ordering_reverses_solution_ordering() {
    let b = counterexample_bundle(6, 0.2).unwrap();
    let dom = ComputationalDomain::from_polytope(&b.polytope).unwrap();
    let prm = SolverParams::with_h(0.5);
    let u = solve_dirichlet(&dom, &b.f, &b.phi, &prm).unwrap();
    let ut = solve_dirichlet(&dom, &b.f_tilde, &b.phi, &prm).unwrap();
    for i in 0..u.len() {
        let x = u.point(i);
        assert!(b.f.eval(x) <= b.f_tilde.eval(x) + 1e-15);
        assert!(
            ut.values[i] <= u.values[i] + 1e-6,
            "node {i}: {} > {}",
            ut.values[i],
            u.values[i]
        );
    }
}

#[test]
fn repeated_solves_are_bitwise_identical() {
    let prm = SolverParams::with_h(1.0 / 32.0);
    let f = ScalarField::constant(0.75);
    let phi = quad(1.0, -0.4, 1.0, 0.0);
    let a = solve_dirichlet(&square(), &f, &phi, &prm).unwrap();
    let b = solve_dirichlet(&square(), &f, &phi, &prm).unwrap();
    assert_eq!(a.values, b.values);
    assert_eq!(a.iterations, b.iterations);
}

/// Lattice of the square with values replaced by `x₁⁴ + x₁²x₂`.
fn quartic_on_square(h: f64) -> DiscreteSolution {
    let mut s = solve_dirichlet(
        &square(),
        &ScalarField::constant(1.0),
        &ScalarField::half_norm_sq(),
        &SolverParams::with_h(h),
    )
    .unwrap();
    s.values = (0..s.len())
        .map(|i| {
            let x = s.point(i);
            x[0].powi(4) + x[0] * x[0] * x[1]
        })
        .collect();
    s
}

#[test]
fn hessian_probe_orders() {
    let (coarse, fine) = (quartic_on_square(1.0 / 16.0), quartic_on_square(1.0 / 32.0));
    // At the corner the mixed probe is one-sided and first order; the exact value is 0.
    let corner = |s: &DiscreteSolution| {
        let p = s.hessian_probe(&[0.0, 0.0], 0, 1).unwrap();
        assert!(!p.centered);
        assert_eq!(p.order, 1);
        p.value.abs()
    };
    let ratio = corner(&coarse) / corner(&fine);
    assert!((ratio - 2.0).abs() < 0.1, "one-sided ratio {ratio}");
    // Inside, ∂₁₁ is centered and second order; the exact value is 12x₁² + 2x₂.
    let inner = |s: &DiscreteSolution| {
        let p = s.hessian_probe(&[0.5, 0.5], 0, 0).unwrap();
        assert!(p.centered);
        (p.value - (12.0 * 0.25 + 1.0)).abs()
    };
    let ratio = inner(&coarse) / inner(&fine);
    assert!((ratio - 4.0).abs() < 0.2, "centered ratio {ratio}");
    let m = fine.hessian_probe(&[0.5, 0.5], 0, 1).unwrap();
    assert!((m.value - 1.0).abs() < 1e-10);
}
